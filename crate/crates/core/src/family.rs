//! C- and S-polynomial families, weight multiplicities and the geometry of `x -> u`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::group::{group_data, GroupData, GroupId, SimpleType, Weight};
use crate::orbit::{EvalPoint, PreparedOrbit};
use crate::poly::{coeff, var_names, Coeff, LevelOrder, Monomial, MultiPoly};

/// `C_λ · C_μ = Σ_δ n_δ C_δ`: the map `δ -> n_δ` over dominant `δ`.
///
/// `n_δ` counts the pairs `(ν, ν') ∈ W_λ × W_μ` with `ν + ν' = δ`.
pub fn orbit_product(g: &GroupId, lambda: &Weight, mu: &Weight) -> Result<BTreeMap<Weight, i64>> {
    let d = group_data(g);
    product_counts(&d, lambda, mu)
}

fn product_counts(d: &GroupData, lambda: &Weight, mu: &Weight) -> Result<BTreeMap<Weight, i64>> {
    let a = d.weyl_orbit(lambda)?;
    let b = d.weyl_orbit(mu)?;
    let mut out = BTreeMap::new();
    for p in &a.points {
        for q in &b.points {
            let s = p.weight.add(&q.weight);
            if s.is_dominant() {
                *out.entry(s).or_insert(0) += 1;
            }
        }
    }
    Ok(out)
}

type PolyCache = RwLock<HashMap<(GroupId, Weight), Arc<MultiPoly>>>;

static C_CACHE: OnceLock<PolyCache> = OnceLock::new();
static S_CACHE: OnceLock<PolyCache> = OnceLock::new();

fn cached(cache: &OnceLock<PolyCache>, key: &(GroupId, Weight)) -> Option<Arc<MultiPoly>> {
    cache
        .get_or_init(Default::default)
        .read()
        .expect("polynomial cache poisoned")
        .get(key)
        .cloned()
}

fn store(cache: &OnceLock<PolyCache>, key: (GroupId, Weight), p: MultiPoly) -> Arc<MultiPoly> {
    cache
        .get_or_init(Default::default)
        .write()
        .expect("polynomial cache poisoned")
        .entry(key)
        .or_insert_with(|| Arc::new(p))
        .clone()
}

fn check_label(d: &GroupData, lambda: &Weight) -> Result<()> {
    if lambda.rank() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: lambda.rank() });
    }
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.clone()));
    }
    Ok(())
}

/// The polynomial `C_λ(u)` with `u_j = C_{ω_j}(x)`.
///
/// Built by induction on the level: `u_j C_{λ-ω_j}` is expanded with [`orbit_product`] and the
/// unique top term `C_λ` is solved for.
pub fn c_polynomial(g: &GroupId, lambda: &Weight) -> Result<Arc<MultiPoly>> {
    let d = group_data(g);
    check_label(&d, lambda)?;
    build_c(&d, lambda)
}

fn build_c(d: &GroupData, lambda: &Weight) -> Result<Arc<MultiPoly>> {
    let key = (d.id.clone(), lambda.clone());
    if let Some(p) = cached(&C_CACHE, &key) {
        return Ok(p);
    }
    let n = d.rank;
    let p = match lambda.0.iter().position(|&c| c > 0) {
        None => MultiPoly::one(n),
        Some(j) => {
            let omega = Weight::fundamental(n, j);
            let mu = lambda.sub(&omega);
            let mut p = &MultiPoly::var(n, j) * &*build_c(d, &mu)?;
            let counts = product_counts(d, &omega, &mu)?;
            let top = counts.get(lambda).copied().unwrap_or(0);
            assert_eq!(top, 1, "top term of u_j C_mu must be C_lambda");
            for (delta, k) in &counts {
                if delta != lambda {
                    p.add_scaled(&*build_c(d, delta)?, &coeff(-k));
                }
            }
            p
        }
    };
    p.ensure_integral(&var_names("u", n))?;
    Ok(store(&C_CACHE, key, p))
}

/// Dominant weight multiplicities of the irreducible character `χ_λ = Σ_μ m_{λμ} C_μ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicityTable {
    pub seed: Weight,
    pub entries: BTreeMap<Weight, i64>,
}

impl MultiplicityTable {
    pub fn get(&self, mu: &Weight) -> i64 {
        self.entries.get(mu).copied().unwrap_or(0)
    }

    /// `Σ_μ m_{λμ} |W_μ|`, the dimension of the representation.
    pub fn dimension(&self, g: &GroupId) -> Result<i64> {
        let d = group_data(g);
        let mut total = 0;
        for (mu, m) in &self.entries {
            total += m * d.orbit_size(mu)? as i64;
        }
        Ok(total)
    }
}

/// Dominant weights `μ` with `λ - μ` a nonnegative integer combination of simple roots,
/// sorted by decreasing level.
pub fn dominant_weights_below(g: &GroupId, lambda: &Weight) -> Result<Vec<Weight>> {
    let d = group_data(g);
    check_label(&d, lambda)?;
    Ok(weights_below(&d, lambda))
}

fn weights_below(d: &GroupData, lambda: &Weight) -> Vec<Weight> {
    let top = d.level(lambda);
    let mut out: Vec<Weight> = dominant_up_to_level(d, top)
        .into_iter()
        .filter(|mu| {
            d.alpha_coordinates(&lambda.sub(mu))
                .iter()
                .all(|c| c.is_integer() && *c >= Rational64::zero())
        })
        .collect();
    out.sort_by(|a, b| d.level(b).cmp(&d.level(a)).then_with(|| b.cmp(a)));
    out
}

/// All dominant weights with level at most `level`, in lexicographic order.
pub fn dominant_weights_up_to_level(g: &GroupId, level: i64) -> Vec<Weight> {
    dominant_up_to_level(&group_data(g), level)
}

fn dominant_up_to_level(d: &GroupData, level: i64) -> Vec<Weight> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; d.rank];
    fn rec(d: &GroupData, i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if i == d.rank {
            out.push(Weight(cur.clone()));
            return;
        }
        let a = d.level_vector[i];
        let mut k = 0;
        while k * a <= left {
            cur[i] = k;
            rec(d, i + 1, left - k * a, cur, out);
            k += 1;
        }
        cur[i] = 0;
    }
    if level >= 0 {
        rec(d, 0, level, &mut cur, &mut out);
    }
    out
}

/// Exact dominant weight multiplicities.
///
/// Uses `S_{λ+ρ} = Σ_μ m_{λμ} C_μ S_ρ` and `C_μ S_ρ = Σ_{ν ∈ W_μ} S_{ν+ρ}`; each `S_{ν+ρ}` is
/// folded into the dominant chamber with its reflection sign and the resulting unitriangular
/// system is solved from the top weight down.
pub fn weight_multiplicities(g: &GroupId, lambda: &Weight) -> Result<MultiplicityTable> {
    let d = group_data(g);
    check_label(&d, lambda)?;
    let rho = Weight::rho(d.rank);
    let mut acc: HashMap<Weight, i64> = HashMap::new();
    let mut entries = BTreeMap::new();
    for mu in weights_below(&d, lambda) {
        let m = i64::from(&mu == lambda) - acc.get(&mu).copied().unwrap_or(0);
        if m == 0 {
            continue;
        }
        assert!(m > 0, "negative multiplicity for {mu} in {lambda}");
        for p in d.weyl_orbit(&mu)?.points {
            if p.weight == mu {
                continue;
            }
            let rep = d.dominant_unchecked(&p.weight.add(&rho));
            if rep.on_wall {
                continue;
            }
            *acc.entry(rep.weight.sub(&rho)).or_insert(0) += m * rep.sign;
        }
        entries.insert(mu, m);
    }
    Ok(MultiplicityTable { seed: lambda.clone(), entries })
}

/// Maximum distance from the nearest integer tolerated by
/// [`weight_multiplicities_by_projection`].
pub const PROJECTION_RESIDUAL: f64 = 1e-6;

/// Weight multiplicities by discrete orthogonality: `m_{λμ} = <χ_λ, C_μ> / (N |W_μ|)` summed
/// over the `N = det 𝔠 · M^n` points of the shifted torus lattice `y_0 + (1/M)P̌ mod Q̌`.
///
/// `M = 2 Σ_j comarks_j λ_j + 1` keeps every pair of weights of `χ_λ` from aliasing; the shift
/// keeps the sample points off the reflection walls so `χ_λ = S_{λ+ρ}/S_ρ` is defined.
pub fn weight_multiplicities_by_projection(
    g: &GroupId,
    lambda: &Weight,
    exec: Execution,
) -> Result<MultiplicityTable> {
    let d = group_data(g);
    check_label(&d, lambda)?;
    let m = (2 * d.colevel(lambda) + 1) as u32;
    let candidates = weights_below(&d, lambda);
    let points = torus_lattice(&d, m);
    let rho = Weight::rho(d.rank);
    let num = PreparedOrbit::new(&d.weyl_orbit(&lambda.add(&rho))?);
    let den = PreparedOrbit::new(&d.weyl_orbit(&rho)?);
    let orbits = candidates
        .iter()
        .map(|mu| Ok(PreparedOrbit::new(&d.weyl_orbit(mu)?)))
        .collect::<Result<Vec<_>>>()?;
    let sums = exec::sum_vectors(exec, &points, orbits.len(), |x| {
        let chi = num.eval_s(x) / den.eval_s(x);
        orbits.iter().map(|o| chi * o.eval_c(x).conj()).collect()
    });
    let n_points = points.len() as f64;
    let mut entries = BTreeMap::new();
    let mut residual: f64 = 0.0;
    for ((mu, o), s) in candidates.iter().zip(&orbits).zip(sums) {
        let v = s / (n_points * o.size as f64);
        let r = v.re.round();
        residual = residual.max((v.re - r).abs()).max(v.im.abs());
        if r != 0.0 {
            entries.insert(mu.clone(), r as i64);
        }
    }
    if residual > PROJECTION_RESIDUAL {
        return Err(Error::ProjectionResidual { residual, m });
    }
    Ok(MultiplicityTable { seed: lambda.clone(), entries })
}

/// The `det 𝔠 · M^n` points `y_0 + (1/M)P̌ mod Q̌` in α̌-coordinates.
fn torus_lattice(d: &GroupData, m: u32) -> Vec<EvalPoint> {
    let n = d.rank;
    let big = m as i64 * d.det;
    let h = d
        .id
        .factors()
        .iter()
        .map(|f| f.coxeter_number())
        .max()
        .unwrap_or(2) as f64;
    let shift = d.omega_check_to_alpha_check_f64(&vec![1.0 / (h * m as f64); n]);
    let mut out = Vec::new();
    let mut v = vec![0i64; n];
    loop {
        let in_lattice = d
            .cartan
            .iter()
            .all(|row| row.iter().zip(&v).map(|(c, x)| c * x).sum::<i64>().rem_euclid(d.det) == 0);
        if in_lattice {
            out.push(EvalPoint::Float(
                v.iter()
                    .zip(&shift)
                    .map(|(&x, s)| x as f64 / big as f64 + s)
                    .collect(),
            ));
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            v[i] += 1;
            if v[i] < big {
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

/// The character polynomial `𝒮_λ(u) = S_{λ+ρ}(x) / S_ρ(x) = Σ_μ m_{λμ} C_μ(u)`.
pub fn s_polynomial(g: &GroupId, lambda: &Weight) -> Result<Arc<MultiPoly>> {
    let d = group_data(g);
    check_label(&d, lambda)?;
    let key = (d.id.clone(), lambda.clone());
    if let Some(p) = cached(&S_CACHE, &key) {
        return Ok(p);
    }
    let mut p = MultiPoly::zero(d.rank);
    for (mu, m) in &weight_multiplicities(g, lambda)?.entries {
        p.add_scaled(&*build_c(&d, mu)?, &coeff(*m));
    }
    Ok(store(&S_CACHE, key, p))
}

/// Classical Chebyshev polynomial `T_m(x)` of the first kind.
pub fn chebyshev_t(m: u32) -> MultiPoly {
    let x = MultiPoly::var(1, 0);
    let mut prev = MultiPoly::one(1);
    if m == 0 {
        return prev;
    }
    let mut cur = x.clone();
    let two_x = x.scale(&coeff(2));
    for _ in 1..m {
        let next = &(&two_x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T~_m(y) = 2 T_m(y/2)` for `m ≥ 1`, `T~_0 = 1`; equal to the A1 C-polynomial of label `m`.
pub fn chebyshev_t_tilde(m: u32) -> MultiPoly {
    if m == 0 {
        return MultiPoly::one(1);
    }
    let half = MultiPoly::var(1, 0).scale(&(Coeff::one() / coeff(2)));
    chebyshev_t(m)
        .compose(&[half])
        .expect("one variable")
        .scale(&coeff(2))
}

/// `u(x) = (C_{ω_1}(x), …, C_{ω_n}(x))`.
pub fn map_point_to_u(g: &GroupId, x: &EvalPoint) -> Result<Vec<Complex64>> {
    let d = group_data(g);
    if x.dim() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: x.dim() });
    }
    (0..d.rank)
        .map(|j| Ok(PreparedOrbit::new(&d.weyl_orbit(&Weight::fundamental(d.rank, j))?).eval_c(x)))
        .collect()
}

/// Real coordinates used to draw the image of `F`: `(Re u_1, Im u_1)` for A2,
/// `(Re u_1, u_2, Im u_1)` for A3 and the real parts of `u` otherwise.
pub fn real_presentation(g: &GroupId, u: &[Complex64]) -> Vec<f64> {
    match g.as_simple() {
        Ok(SimpleType::A2) => vec![u[0].re, u[0].im],
        Ok(SimpleType::A3) => vec![u[0].re, u[1].re, u[0].im],
        _ => u.iter().map(|z| z.re).collect(),
    }
}

/// Images `P_0, …, P_n` of the vertices `0, ω̌_j / m_j` of the fundamental region.
#[derive(Debug, Clone, Serialize)]
pub struct DomainVertexSet {
    pub group: GroupId,
    /// Vertices of `F` in ω̌-coordinates.
    pub preimages: Vec<Vec<String>>,
    #[serde(skip)]
    pub vertices: Vec<Vec<Complex64>>,
    /// [`real_presentation`] of each vertex.
    pub coordinates: Vec<Vec<f64>>,
}

pub fn domain_vertices(g: &GroupId) -> Result<DomainVertexSet> {
    let t = g.as_simple()?;
    let d = group_data(g);
    let n = d.rank;
    let marks = t.marks();
    let mut pre = vec![vec![Rational64::zero(); n]];
    for j in 0..n {
        let mut v = vec![Rational64::zero(); n];
        v[j] = Rational64::new(1, marks[j]);
        pre.push(v);
    }
    let mut vertices = Vec::new();
    let mut coordinates = Vec::new();
    for v in &pre {
        let u = map_point_to_u(g, &EvalPoint::Exact(d.omega_check_to_alpha_check(v)?))?;
        coordinates.push(real_presentation(g, &u));
        vertices.push(u);
    }
    Ok(DomainVertexSet {
        group: g.clone(),
        preimages: pre
            .iter()
            .map(|v| v.iter().map(|r| r.to_string()).collect())
            .collect(),
        vertices,
        coordinates,
    })
}

const WEIGHT_FORMS: [(SimpleType, &str); 5] = [
    (SimpleType::A2, "u1^2u2^2 - 4u1^3 - 4u2^3 + 18u1u2 - 27"),
    (
        SimpleType::C2,
        "u1^2u2^2 - 4(u1^4 + 4u1^2 - u2^3 - 8u2^2 - 16u2 + 6u1^2u2)",
    ),
    (
        SimpleType::A3,
        "256 - 27u1^4 + 144u1^2u2 - 128u2^2 - 4u1^2u2^3 + 16u2^4 - 192u1u3 + 18u1^3u2u3 \
         - 80u1u2^2u3 - 6u1^2u3^2 + 144u2u3^2 + u1^2u2^2u3^2 - 4u2^3u3^2 - 4u1^3u3^3 \
         + 18u1u2u3^3 - 27u3^4",
    ),
    (
        SimpleType::B3,
        "(16 + 4u2 - u3^2)(1728 + 1728u1 + 432u1^2 - 32u1^3 - 16u1^4 + 864u2 + 576u1u2 \
         + 72u1^2u2 - 8u1^3u2 + 108u2^2 + 36u1u2^2 - u1^2u2^2 + 4u2^3 - 432u3^2 - 216u1u3^2 \
         + 4u1^3u3^2 - 108u2u3^2 - 18u1u2u3^2 + 27u3^4)",
    ),
    (
        SimpleType::C3,
        "(u3 - 2u2 + 4u1 - 8)(8 + 4u1 + 2u2 + u3)\
         (u1^2u2^2 - 4u2^3 - 4u1^3u3 + 18u1u2u3 - 27u3^2)",
    ),
];

/// Closed forms of the Jacobian weight polynomial as usually tabulated: the radicand of `J^{-1}`
/// for A2 and C2, `𝐒(u)` for A3, B3 and C3. Compare with [`weight_poly_s`] through
/// [`weight_poly_sign`].
pub fn tabulated_weight_poly(g: &GroupId) -> Result<MultiPoly> {
    let t = g.as_simple()?;
    let form = WEIGHT_FORMS
        .iter()
        .find(|(s, _)| *s == t)
        .ok_or_else(|| Error::UnsupportedGroup(format!("no stored weight polynomial for {}", t.name())))?
        .1;
    let names: Vec<String> = var_names("u", t.rank());
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    MultiPoly::parse(form, &refs)
}

/// `𝐒(u) = S_ρ(x)^2`, the weight polynomial of the S-polynomials; `J(u) = 1/((2π)^n √|𝐒(u)|)`.
pub fn weight_poly_s(g: &GroupId) -> Result<MultiPoly> {
    s_rho_squared(g)
}

/// `σ ∈ {+1, -1}` with `tabulated_weight_poly(g) = σ · 𝐒`; an error if the tabulated form is
/// not `±𝐒`.
pub fn weight_poly_sign(g: &GroupId) -> Result<i64> {
    let stored = tabulated_weight_poly(g)?;
    let generic = s_rho_squared(g)?;
    if stored == generic {
        Ok(1)
    } else if stored == -&generic {
        Ok(-1)
    } else {
        Err(Error::NonzeroRemainder(format!(
            "tabulated weight polynomial of {g} is not ±S_rho^2"
        )))
    }
}

/// `S_ρ(x)^2` as a polynomial in `u`, from the signed orbit product of `ρ` with itself.
pub fn s_rho_squared(g: &GroupId) -> Result<MultiPoly> {
    let d = group_data(g);
    let orbit = d.weyl_orbit(&Weight::rho(d.rank))?;
    let mut counts: BTreeMap<Weight, i64> = BTreeMap::new();
    for p in &orbit.points {
        for q in &orbit.points {
            let s = p.weight.add(&q.weight);
            if s.is_dominant() {
                *counts.entry(s).or_insert(0) += p.sign() * q.sign();
            }
        }
    }
    let mut out = MultiPoly::zero(d.rank);
    for (delta, k) in counts {
        out.add_scaled(&*build_c(&d, &delta)?, &coeff(k));
    }
    Ok(out)
}

/// `∂u_j/∂x_k` at `x` (α̌-coordinates).
pub fn jacobian_matrix(g: &GroupId, x: &EvalPoint) -> Result<Vec<Vec<Complex64>>> {
    let d = group_data(g);
    if x.dim() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: x.dim() });
    }
    (0..d.rank)
        .map(|j| {
            Ok(PreparedOrbit::new(&d.weyl_orbit(&Weight::fundamental(d.rank, j))?).gradient_c(x))
        })
        .collect()
}

/// `|det ∂u/∂x|`.
pub fn jacobian_abs_det(g: &GroupId, x: &EvalPoint) -> Result<f64> {
    Ok(complex_det(jacobian_matrix(g, x)?).norm())
}

pub(crate) fn complex_det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut det = Complex64::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .expect("nonempty");
        if a[p][c].norm() == 0.0 {
            return Complex64::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    det
}

/// `P(u)` for complex `u`.
pub fn eval_poly(p: &MultiPoly, u: &[Complex64]) -> Result<Complex64> {
    p.eval(u)
}

/// Block label used when printing coefficient tables. Equal to [`GroupData::congruence_class`]
/// except for A2, whose blocks are numbered by `(2λ_1 + λ_2) mod 3`.
pub fn table_class(g: &GroupId, lambda: &Weight) -> Result<i64> {
    let d = group_data(g);
    let c = d.congruence_class(lambda)?;
    Ok(match d.id.as_simple()? {
        SimpleType::A2 => (3 - c) % 3,
        _ => c,
    })
}

/// Labels with `Σ λ_i ≤ max_sum`, sorted by level.
pub fn default_table_labels(g: &GroupId, max_sum: i64) -> Vec<Weight> {
    let d = group_data(g);
    let bound = max_sum * d.level_vector.iter().max().copied().unwrap_or(1);
    let mut out: Vec<Weight> = dominant_up_to_level(&d, bound)
        .into_iter()
        .filter(|w| w.0.iter().sum::<i64>() <= max_sum)
        .collect();
    out.sort_by(|a, b| d.level(a).cmp(&d.level(b)).then_with(|| b.cmp(a)));
    out
}

/// One congruence block of a coefficient table.
#[derive(Debug, Clone, Serialize)]
pub struct TableBlock {
    pub class: i64,
    /// Leading monomials of the block's rows, ascending in the level order.
    pub columns: Vec<Monomial>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub label: Weight,
    /// Coefficient per column; `None` above the row's leading monomial.
    pub cells: Vec<Option<i64>>,
}

/// C-polynomial coefficient table split by congruence class; rows sorted by level.
pub fn coefficient_table(g: &GroupId, labels: &[Weight]) -> Result<Vec<TableBlock>> {
    let d = group_data(g);
    let order = LevelOrder::for_group(g);
    let mut by_class: BTreeMap<i64, Vec<Weight>> = BTreeMap::new();
    for l in labels {
        check_label(&d, l)?;
        by_class.entry(table_class(g, l)?).or_default().push(l.clone());
    }
    let mut blocks = Vec::new();
    for (class, mut rows) in by_class {
        rows.sort_by(|a, b| order.cmp_unchecked(&Monomial(to_exps(a)), &Monomial(to_exps(b))));
        let columns: Vec<Monomial> = rows.iter().map(|l| Monomial(to_exps(l))).collect();
        let mut out_rows = Vec::new();
        for (i, l) in rows.iter().enumerate() {
            let p = c_polynomial(g, l)?;
            let mut cells = Vec::new();
            for (k, col) in columns.iter().enumerate() {
                cells.push(if k > i {
                    None
                } else {
                    Some(p.coefficient(col).to_integer().try_into().unwrap_or(i64::MAX))
                });
            }
            out_rows.push(TableRow { label: l.clone(), cells });
        }
        blocks.push(TableBlock { class, columns, rows: out_rows });
    }
    Ok(blocks)
}

pub(crate) fn to_exps(w: &Weight) -> Vec<u32> {
    w.0.iter().map(|&c| c as u32).collect()
}
