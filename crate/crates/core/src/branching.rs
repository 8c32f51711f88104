//! Reduction of orbit polynomials to maximal subgroups via projection matrices.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{c_polynomial, to_exps};
use crate::group::{group_data, GroupId, Weight};
use crate::poly::{var_names, Coeff, LevelOrder, Monomial, MultiPoly, PolyJson};

/// A parent group, a subgroup and the matrix `Pr` acting on ω-coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingRule {
    pub parent: GroupId,
    pub child: GroupId,
    /// `rank(child)` rows, `rank(parent)` columns.
    pub projection: Vec<Vec<i64>>,
}

impl BranchingRule {
    /// `Parent:Child`, e.g. `B3:A1xA1xA1`.
    pub fn name(&self) -> String {
        format!("{}:{}", self.parent, self.child)
    }

    /// Variable names of the subgroup ring: `Y` for A1, `Y1..Yn` otherwise.
    pub fn child_names(&self) -> Vec<String> {
        var_names("Y", self.child.rank())
    }

    pub fn parent_names(&self) -> Vec<String> {
        var_names("X", self.parent.rank())
    }
}

const CATALOG: &[(&str, &str, &[&[i64]])] = &[
    ("A2", "A1", &[&[2, 2]]),
    ("C2", "A1xA1", &[&[1, 1], &[0, 1]]),
    ("C2", "A1", &[&[3, 4]]),
    ("G2", "A2", &[&[1, 0], &[1, 1]]),
    ("G2", "A1xA1", &[&[1, 1], &[3, 1]]),
    ("G2", "A1", &[&[10, 6]]),
    ("A3", "C2", &[&[1, 0, 1], &[0, 1, 0]]),
    ("A3", "A1xA1", &[&[1, 0, 1], &[1, 2, 1]]),
    ("B3", "A3", &[&[0, 1, 1], &[1, 1, 0], &[0, 1, 0]]),
    ("B3", "A1xA1xA1", &[&[1, 1, 0], &[1, 1, 1], &[0, 2, 1]]),
    ("B3", "G2", &[&[0, 1, 0], &[1, 0, 1]]),
    ("C3", "C2xA1", &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
    ("C3", "A2", &[&[1, 1, 2], &[0, 1, 0]]),
    ("C3", "A1", &[&[5, 8, 9]]),
];

/// All fourteen rules, in catalog order.
pub fn rules_catalog() -> &'static [BranchingRule] {
    static RULES: OnceLock<Vec<BranchingRule>> = OnceLock::new();
    RULES.get_or_init(|| {
        CATALOG
            .iter()
            .map(|(p, c, m)| BranchingRule {
                parent: p.parse().expect("catalog parent"),
                child: c.parse().expect("catalog child"),
                projection: m.iter().map(|r| r.to_vec()).collect(),
            })
            .collect()
    })
}

/// Looks a rule up by `Parent:Child` (also accepts `⊃` and `×`).
pub fn find_rule(name: &str) -> Result<&'static BranchingRule> {
    let norm = name.replace('⊃', ":");
    let (p, c) = norm
        .split_once(':')
        .ok_or_else(|| Error::UnknownRule(name.to_string()))?;
    let parent: GroupId = p.parse().map_err(|_| Error::UnknownRule(name.to_string()))?;
    let child: GroupId = c.parse().map_err(|_| Error::UnknownRule(name.to_string()))?;
    rules_catalog()
        .iter()
        .find(|r| r.parent == parent && r.child == child)
        .ok_or_else(|| Error::UnknownRule(name.to_string()))
}

/// `Pr · μ`.
pub fn project_weight(rule: &BranchingRule, mu: &Weight) -> Result<Weight> {
    let n = rule.parent.rank();
    if mu.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mu.rank() });
    }
    Ok(Weight(
        rule.projection
            .iter()
            .map(|row| row.iter().zip(&mu.0).map(|(a, b)| a * b).sum())
            .collect(),
    ))
}

/// Child-dominant weights `δ` with the number of `ν ∈ W_λ` such that `Pr ν = δ`.
///
/// These are exactly the coefficients of `C_λ = Σ n_δ C_δ` on the subgroup torus.
pub fn branch_orbit(rule: &BranchingRule, lambda: &Weight) -> Result<BTreeMap<Weight, i64>> {
    let d = group_data(&rule.parent);
    if lambda.rank() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: lambda.rank() });
    }
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.clone()));
    }
    let mut out = BTreeMap::new();
    for p in &d.weyl_orbit(lambda)?.points {
        let w = project_weight(rule, &p.weight)?;
        if w.is_dominant() {
            *out.entry(w).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// `X_i -> f_i(Y)` for every parent variable.
pub fn substitution_map(rule: &BranchingRule) -> Result<Vec<MultiPoly>> {
    let n = rule.parent.rank();
    (0..n)
        .map(|i| expand_counts(rule, &branch_orbit(rule, &Weight::fundamental(n, i))?))
        .collect()
}

fn expand_counts(rule: &BranchingRule, counts: &BTreeMap<Weight, i64>) -> Result<MultiPoly> {
    let mut f = MultiPoly::zero(rule.child.rank());
    for (delta, k) in counts {
        f.add_scaled(&*c_polynomial(&rule.child, delta)?, &Coeff::from_integer((*k).into()));
    }
    Ok(f)
}

/// Coefficients of the image in the subgroup basis `Π_f C_{μ_f}(Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub terms: BTreeMap<Weight, Coeff>,
    pub remainder: MultiPoly,
}

impl Decomposition {
    pub fn is_exact(&self) -> bool {
        self.remainder.is_zero()
    }

    /// Integer coefficients, if every coefficient is a nonnegative integer.
    pub fn as_counts(&self) -> Option<BTreeMap<Weight, i64>> {
        self.terms
            .iter()
            .map(|(w, c)| {
                if c.is_integer() && !c.is_negative() {
                    c.to_integer().try_into().ok().map(|v: i64| (w.clone(), v))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Substitutes `f_i` for `X_i` and decomposes the result by leading-term elimination.
pub fn reduce_polynomial(rule: &BranchingRule, p: &MultiPoly) -> Result<(MultiPoly, Decomposition)> {
    let n = rule.parent.rank();
    if p.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.nvars() });
    }
    let image = p.compose(&substitution_map(rule)?)?;
    let dec = decompose(&rule.child, &image)?;
    Ok((image, dec))
}

/// Writes `q` over `child` as `Σ c_δ C_δ` by repeatedly removing the leading term.
pub fn decompose(child: &GroupId, q: &MultiPoly) -> Result<Decomposition> {
    let order = LevelOrder::for_group(child);
    let mut rest = q.clone();
    let mut terms = BTreeMap::new();
    while let Some((m, c)) = rest.leading_term(&order) {
        let label = Weight(m.0.iter().map(|&e| e as i64).collect());
        let c = c.clone();
        let basis = c_polynomial(child, &label)?;
        if basis.coefficient(m) != Coeff::one() {
            return Err(Error::NonzeroRemainder(rest.render(&order, &var_names("Y", child.rank()))));
        }
        rest.add_scaled(&basis, &-c.clone());
        terms.insert(label, c);
    }
    Ok(Decomposition { terms, remainder: rest })
}

/// `Σ c_δ C_δ(Y)`, expanded.
pub fn reassemble(child: &GroupId, dec: &Decomposition) -> Result<MultiPoly> {
    let mut out = dec.remainder.clone();
    for (w, c) in &dec.terms {
        out.add_scaled(&*c_polynomial(child, w)?, c);
    }
    Ok(out)
}

fn factor_symbol(child: &GroupId, t: crate::group::SimpleType, off: usize, label: &[i64]) -> Option<String> {
    let names = var_names("Y", child.rank());
    if label.iter().all(|&v| v == 0) {
        return None;
    }
    let single = child.is_simple();
    if t.rank() == 1 {
        let m = label[0];
        return Some(match (m, single) {
            (1, _) => names[off].clone(),
            (_, true) => format!("T~{m}"),
            (_, false) => format!("T~{m}({})", names[off]),
        });
    }
    let nz: Vec<usize> = (0..label.len()).filter(|&i| label[i] != 0).collect();
    if nz.len() == 1 && label[nz[0]] == 1 {
        return Some(names[off + nz[0]].clone());
    }
    let lab: Vec<String> = label.iter().map(|v| v.to_string()).collect();
    let mut s = format!("C({})", lab.join(","));
    if !single {
        s.push_str(&format!("({})", names[off..off + t.rank()].join(",")));
    }
    Some(s)
}

/// Renders a decomposition leading term first, e.g. `T~4 + 2T~2` or `C(2,0) + 2Y2`.
pub fn render_decomposition(child: &GroupId, dec: &Decomposition) -> String {
    let order = LevelOrder::for_group(child);
    let mut labels: Vec<&Weight> = dec.terms.keys().collect();
    labels.sort_by(|a, b| {
        order.cmp_unchecked(&Monomial(to_exps(b)), &Monomial(to_exps(a)))
    });
    let mut out = String::new();
    for (i, w) in labels.iter().enumerate() {
        let c = &dec.terms[*w];
        let sym: String = child
            .factor_offsets()
            .into_iter()
            .filter_map(|(t, off)| factor_symbol(child, t, off, &w.0[off..off + t.rank()]))
            .collect();
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coef = if a.is_integer() { a.to_integer().to_string() } else { a.to_string() };
        match (sym.is_empty(), a.is_one()) {
            (true, _) => out.push_str(&coef),
            (false, true) => out.push_str(&sym),
            (false, false) => {
                out.push_str(&coef);
                out.push_str(&sym);
            }
        }
    }
    if !dec.remainder.is_zero() {
        out.push_str(" + R(");
        out.push_str(&dec.remainder.render(&order, &var_names("Y", child.rank())));
        out.push(')');
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// JSON form of one catalog entry.
#[derive(Debug, Clone, Serialize)]
pub struct RuleJson {
    pub parent: String,
    pub child: String,
    pub projection: Vec<Vec<i64>>,
    pub substitutions: Vec<PolyJson>,
}

pub fn rule_json(rule: &BranchingRule) -> Result<RuleJson> {
    let n = rule.parent.rank();
    let subs = substitution_map(rule)?;
    Ok(RuleJson {
        parent: rule.parent.to_string(),
        child: rule.child.to_string(),
        projection: rule.projection.clone(),
        substitutions: subs
            .iter()
            .enumerate()
            .map(|(i, f)| PolyJson {
                group: rule.child.to_string(),
                family: "f".into(),
                label: Weight::fundamental(n, i).0,
                terms: f.to_json_terms(),
            })
            .collect(),
    })
}
