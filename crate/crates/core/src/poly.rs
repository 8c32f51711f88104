//! Exact sparse multivariate polynomials and the level-vector monomial order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupData, GroupId};

pub type Coeff = BigRational;

pub fn coeff(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent vector of `u_1^{k_1} ⋯ u_n^{k_n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut v = vec![0; nvars];
        v[j] = 1;
        Monomial(v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// `u1u2^2` style rendering; `1` for the empty monomial.
    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (e, name) in self.0.iter().zip(names) {
            match e {
                0 => {}
                1 => s.push_str(name),
                _ => {
                    let _ = write!(s, "{name}^{e}");
                }
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }
}

/// Level-vector order on monomials.
///
/// Monomials are compared by `Σ a_j k_j` and ties are broken lexicographically on the exponent
/// vector (the larger leading exponent wins). For product groups the order is the
/// lexicographic product of the factor orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelOrder {
    blocks: Vec<Vec<i64>>,
}

impl LevelOrder {
    pub fn new(level_vector: Vec<i64>) -> Self {
        LevelOrder { blocks: vec![level_vector] }
    }

    pub fn product(blocks: Vec<Vec<i64>>) -> Self {
        LevelOrder { blocks }
    }

    pub fn for_group(g: &GroupId) -> Self {
        LevelOrder::product(g.factors().iter().map(|f| f.level_vector()).collect())
    }

    pub fn arity(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn level(&self, m: &Monomial) -> i64 {
        self.blocks
            .iter()
            .flatten()
            .zip(&m.0)
            .map(|(a, &k)| a * k as i64)
            .sum()
    }

    pub fn compare(&self, m1: &Monomial, m2: &Monomial) -> Result<Ordering> {
        let n = self.arity();
        for m in [m1, m2] {
            if m.0.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.0.len() });
            }
        }
        Ok(self.cmp_unchecked(m1, m2))
    }

    pub(crate) fn cmp_unchecked(&self, m1: &Monomial, m2: &Monomial) -> Ordering {
        let mut off = 0;
        for b in &self.blocks {
            let r = off..off + b.len();
            let lv = |m: &Monomial| -> i64 {
                b.iter().zip(&m.0[r.clone()]).map(|(a, &k)| a * k as i64).sum()
            };
            let ord = lv(m1)
                .cmp(&lv(m2))
                .then_with(|| m1.0[r.clone()].cmp(&m2.0[r.clone()]));
            if ord != Ordering::Equal {
                return ord;
            }
            off += b.len();
        }
        Ordering::Equal
    }
}

/// Sparse polynomial with exact rational coefficients; no zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Coeff>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Coeff) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        MultiPoly::constant(nvars, Coeff::one())
    }

    pub fn var(nvars: usize, j: usize) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(Monomial::var(nvars, j), Coeff::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, i64)>>(nvars: usize, it: I) -> Self {
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), coeff(c));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &Coeff) {
        assert_eq!(self.nvars, other.nvars, "arity mismatch");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Coeff) -> MultiPoly {
        let mut p = MultiPoly::zero(self.nvars);
        p.add_scaled(self, c);
        p
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: subs.len() });
        }
        let target = subs.first().map_or(0, |p| p.nvars);
        if let Some(bad) = subs.iter().find(|p| p.nvars != target) {
            return Err(Error::DimensionMismatch { expected: target, got: bad.nvars });
        }
        let mut powers: Vec<Vec<MultiPoly>> = subs.iter().map(|p| vec![MultiPoly::one(p.nvars)]).collect();
        let mut out = MultiPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out.add_scaled(&t, &Coeff::one());
        }
        Ok(out)
    }

    /// Places this polynomial's variables at `offset..offset+nvars` of a `total`-variable ring.
    pub fn embed(&self, total: usize, offset: usize) -> MultiPoly {
        let mut p = MultiPoly::zero(total);
        for (m, c) in &self.terms {
            let mut e = vec![0; total];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    pub fn eval(&self, u: &[Complex64]) -> Result<Complex64> {
        if u.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: u.len() });
        }
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            for (x, &e) in u.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_exact(&self, u: &[Coeff]) -> Result<Coeff> {
        if u.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: u.len() });
        }
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in u.iter().zip(&m.0) {
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Greatest term under `order`.
    pub fn leading_term(&self, order: &LevelOrder) -> Option<(&Monomial, &Coeff)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp_unchecked(a.0, b.0))
    }

    /// Monomials sorted ascending under `order`.
    pub fn sorted_monomials(&self, order: &LevelOrder) -> Vec<&Monomial> {
        let mut ms: Vec<_> = self.terms.keys().collect();
        ms.sort_by(|a, b| order.cmp_unchecked(a, b));
        ms
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn ensure_integral(&self, names: &[String]) -> Result<()> {
        match self.terms.iter().find(|(_, c)| !c.is_integer()) {
            None => Ok(()),
            Some((m, c)) => Err(Error::NonIntegral {
                monomial: m.render(names),
                coefficient: c.to_string(),
            }),
        }
    }

    /// Human-readable form with terms ascending under `order`, e.g.
    /// `24 + 8u1 + 6u2 - 3u3^2 + u1u2`.
    pub fn render(&self, order: &LevelOrder, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, m) in self.sorted_monomials(order).into_iter().enumerate() {
            let c = &self.terms[m];
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.render(names);
            if m.is_one() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else if a.is_integer() {
                let _ = write!(s, "{a}{mono}");
            } else {
                let _ = write!(s, "({a}){mono}");
            }
        }
        s
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                exps: m.0.clone(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_json_terms(nvars: usize, terms: &[TermJson]) -> Result<MultiPoly> {
        let mut p = MultiPoly::zero(nvars);
        for t in terms {
            if t.exps.len() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, got: t.exps.len() });
            }
            let num: BigInt = t.num.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let den: BigInt = t.den.parse().map_err(|e| Error::Parse(format!("{e}")))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            p.add_term(Monomial(t.exps.clone()), BigRational::new(num, den));
        }
        Ok(p)
    }

    /// Parses expressions such as `u1^2u2^2 - 4u1^3 + 18u1*u2 - 27` or
    /// `(Y1 + Y2)*(Y1 - 3)`. Juxtaposition is multiplication; `names` are the variable names.
    pub fn parse(s: &str, names: &[&str]) -> Result<MultiPoly> {
        let mut p = Parser { toks: tokenize(s)?, pos: 0, names, src: s };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(out)
    }
}

/// One term of the polynomial JSON schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub num: String,
    pub den: String,
}

/// Polynomial JSON document: `{group, family, label, terms}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub group: String,
    pub family: String,
    pub label: Vec<i64>,
    pub terms: Vec<TermJson>,
}

/// `u1..un`.
pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 && prefix == "Y" {
        return vec!["Y".into()];
    }
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut p = self.clone();
        p.add_scaled(rhs, &Coeff::one());
        p
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut p = self.clone();
        p.add_scaled(rhs, &-Coeff::one());
        p
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "arity mismatch");
        let mut p = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Coeff::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = chars[start..i].iter().collect();
            out.push(Tok::Num(t.parse().expect("digits")));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_alphabetic() {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [&'a str],
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} of `{}`", self.pos, self.src))
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let n = self.names.len();
        let mut acc = MultiPoly::zero(n);
        let mut sign = Coeff::one();
        if let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            if *c == '-' {
                sign = -sign;
            }
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc.add_scaled(&t, &sign);
            match self.peek() {
                Some(Tok::Op('+')) => sign = Coeff::one(),
                Some(Tok::Op('-')) => sign = -Coeff::one(),
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let f = self.power()?;
                    let c = match (f.terms.len(), f.terms.iter().next()) {
                        (1, Some((m, c))) if m.is_one() => c.clone(),
                        _ => return Err(self.err("division by non-constant")),
                    };
                    acc = acc.scale(&(Coeff::one() / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(Tok::Num(k)) => {
                    let k = k.to_u32().ok_or_else(|| self.err("exponent too large"))?;
                    self.pos += 1;
                    return Ok(base.pow(k));
                }
                _ => return Err(self.err("expected exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let n = self.names.len();
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(n, BigRational::from_integer(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let j = self
                    .names
                    .iter()
                    .position(|&x| x == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` in `{}`", self.src)))?;
                Ok(MultiPoly::var(n, j))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.toks.get(self.pos) != Some(&Tok::Op(')')) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                let a = self.power()?;
                Ok(-&a)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Level order of a group's polynomial ring.
pub fn level_order(d: &GroupData) -> LevelOrder {
    LevelOrder::for_group(&d.id)
}
