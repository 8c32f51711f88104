//! Lattice fragments `F_M`, `F~_M` of the fundamental region and discrete orthogonality.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::family::{dominant_weights_up_to_level, map_point_to_u};
use crate::group::{group_data, GroupData, GroupId, Weight};
use crate::orbit::{EvalPoint, PreparedOrbit};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub group: GroupId,
    pub m: u32,
}

impl GridSpec {
    pub fn new(group: GroupId, m: u32) -> Self {
        GridSpec { group, m }
    }
}

/// The point `Σ (s_i / M) ω̌_i` of `F_M` with its weight `ε(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub s: Vec<i64>,
    pub epsilon: u64,
}

impl GridPoint {
    pub fn eval_point(&self, data: &GroupData, m: u32) -> EvalPoint {
        EvalPoint::from_grid(data, &self.s, m)
    }
}

/// `Σ m_i s_i ≤ M` on every simple factor (`< M` with `s > 0` when `interior`).
fn in_grid(d: &GroupData, m: u32, s: &[i64], interior: bool) -> bool {
    let lo = i64::from(interior);
    d.id.factor_offsets().into_iter().all(|(t, off)| {
        let block = off..off + t.rank();
        let total: i64 = d.marks[block.clone()].iter().zip(&s[block.clone()]).map(|(a, b)| a * b).sum();
        s[block].iter().all(|&v| v >= lo) && total + lo <= m as i64
    })
}

fn simplex(marks: &[i64], budget: i64, lo: i64) -> Vec<Vec<i64>> {
    fn rec(marks: &[i64], i: usize, left: i64, lo: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == marks.len() {
            out.push(cur.clone());
            return;
        }
        let mut k = lo;
        while k * marks[i] <= left {
            cur[i] = k;
            rec(marks, i + 1, left - k * marks[i], lo, cur, out);
            k += 1;
        }
    }
    let mut out = Vec::new();
    if budget >= 0 {
        rec(marks, 0, budget, lo, &mut vec![0; marks.len()], &mut out);
    }
    out
}

/// Grid vectors `s` in lexicographic order; products take one simplex per factor.
fn enumerate(d: &GroupData, m: u32, interior: bool) -> Vec<Vec<i64>> {
    let lo = i64::from(interior);
    let mut out = vec![Vec::new()];
    for (t, off) in d.id.factor_offsets() {
        let part = simplex(&d.marks[off..off + t.rank()], m as i64 - lo, lo);
        out = out
            .iter()
            .flat_map(|head| {
                part.iter().map(move |tail| {
                    let mut v = head.clone();
                    v.extend_from_slice(tail);
                    v
                })
            })
            .collect();
    }
    out
}

/// `F_M`: all grid points of the fundamental region. `M = 0` yields the origin only.
pub fn grid(spec: &GridSpec) -> Vec<GridPoint> {
    let d = group_data(&spec.group);
    enumerate(&d, spec.m, false)
        .into_iter()
        .map(|s| {
            let epsilon = epsilon_unchecked(&d, spec.m, &s);
            GridPoint { s, epsilon }
        })
        .collect()
}

/// `F~_M`: grid points strictly inside the fundamental region.
pub fn interior_grid(spec: &GridSpec) -> Vec<GridPoint> {
    let d = group_data(&spec.group);
    enumerate(&d, spec.m, true)
        .into_iter()
        .map(|s| {
            let epsilon = epsilon_unchecked(&d, spec.m, &s);
            GridPoint { s, epsilon }
        })
        .collect()
}

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// `|F_M|` from the closed forms for A_n, B_n and C_n; enumeration for other groups.
pub fn grid_cardinality(spec: &GridSpec) -> u64 {
    use crate::group::SimpleType::*;
    let m = spec.m as i64;
    match spec.group.as_simple() {
        Ok(t @ (A1 | A2 | A3)) => binomial(m + t.rank() as i64, t.rank() as i64),
        Ok(t @ (C2 | B3 | C3)) => {
            let n = t.rank() as i64;
            let k = m / 2;
            if m % 2 == 0 {
                binomial(n + k, n) + binomial(n + k - 1, n)
            } else {
                2 * binomial(n + k, n)
            }
        }
        _ => enumerate(&group_data(&spec.group), spec.m, false).len() as u64,
    }
}

/// `|F~_M|`: 0 below the Coxeter number `h`, 1 at `h`, `|F_{M-h}|` above.
pub fn interior_cardinality(spec: &GridSpec) -> u64 {
    match spec.group.as_simple() {
        Ok(t) => {
            let h = t.coxeter_number();
            match spec.m.cmp(&h) {
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Greater => {
                    grid_cardinality(&GridSpec::new(spec.group.clone(), spec.m - h))
                }
            }
        }
        Err(_) => enumerate(&group_data(&spec.group), spec.m, true).len() as u64,
    }
}

/// `ε(x)`: the size of the W-orbit of `x = Σ (s_i/M) ω̌_i` on the torus `ℝ^n / Q̌`.
pub fn epsilon_weight(g: &GroupId, m: u32, s: &[i64]) -> Result<u64> {
    let d = group_data(g);
    if s.len() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: s.len() });
    }
    if !in_grid(&d, m, s, false) {
        return Err(Error::OutsideGrid { s: s.to_vec(), m });
    }
    Ok(epsilon_unchecked(&d, m, s))
}

fn epsilon_unchecked(d: &GroupData, m: u32, s: &[i64]) -> u64 {
    if m == 0 {
        return 1;
    }
    // X = M det 𝔠 x is integral; the torus is X mod M det.
    let big = m as i64 * d.det;
    let start: Vec<i64> = d
        .cartan_inverse
        .iter()
        .map(|row| {
            let v: num_rational::Rational64 =
                row.iter().zip(s).map(|(a, &b)| a * b).sum::<num_rational::Rational64>() * d.det;
            assert!(v.is_integer());
            v.to_integer().rem_euclid(big)
        })
        .collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for j in 0..d.rank {
            let cx: i64 = d.cartan[j].iter().zip(&x).map(|(c, v)| c * v).sum();
            let mut y = x.clone();
            y[j] = (y[j] - cx).rem_euclid(big);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len() as u64
}

/// Which orthogonality relation a Gram matrix checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    C,
    S,
}

/// `Σ_i comarks_i λ_i < M`: labels that stay pairwise distinct at level `M`.
pub fn is_admissible(g: &GroupId, m: u32, lambda: &Weight, family: Family) -> bool {
    let d = group_data(g);
    let ok = lambda.rank() == d.rank && d.colevel(lambda) < m as i64;
    match family {
        Family::C => ok && lambda.is_dominant(),
        Family::S => ok && lambda.is_strictly_dominant(),
    }
}

/// The full admissible window for `family` at level `M`, sorted by level then label.
pub fn admissible_weights(g: &GroupId, m: u32, family: Family) -> Vec<Weight> {
    let d = group_data(g);
    let bound = (m as i64) * d.level_vector.iter().max().copied().unwrap_or(1);
    let mut out: Vec<Weight> = dominant_weights_up_to_level(g, bound)
        .into_iter()
        .filter(|w| is_admissible(g, m, w, family))
        .collect();
    out.sort_by(|a, b| d.level(a).cmp(&d.level(b)).then_with(|| b.cmp(a)));
    out
}

/// Pairwise scalar products of orbit functions over `F_M` (C) or `F~_M` (S).
#[derive(Debug, Clone, Serialize)]
pub struct GramReport {
    pub group: GroupId,
    pub m: u32,
    pub family: Family,
    pub labels: Vec<Weight>,
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: Vec<Vec<Complex64>>,
    /// `det 𝔠 |W_λ| M^n` (C) or `det 𝔠 |W| M^n` (S).
    pub expected_diagonal: Vec<u64>,
    /// The C diagonal after scaling each `C_λ` by `|W| / |W_λ|`: `det 𝔠 |W|^2 / |W_λ| M^n`.
    pub normalized_expected_diagonal: Vec<u64>,
    /// Largest `|G_{ab}|`, `a ≠ b`, among admissible labels.
    pub max_offdiag: f64,
    /// Largest `|G_{aa} - expected_a| / expected_a` among admissible labels.
    pub max_diag_rel_error: f64,
    /// Labels outside the admissible window; still listed in the matrix.
    pub inadmissible: Vec<Weight>,
}

fn ser_matrix<S: serde::Serializer>(
    m: &[Vec<Complex64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()))
}

impl GramReport {
    /// Smallest expected diagonal entry among admissible labels.
    pub fn diagonal_scale(&self) -> f64 {
        self.admissible_indices()
            .map(|i| self.expected_diagonal[i] as f64)
            .fold(f64::INFINITY, f64::min)
    }

    fn admissible_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels.len()).filter(|&i| !self.inadmissible.contains(&self.labels[i]))
    }

    /// `max_offdiag` relative to [`Self::diagonal_scale`].
    pub fn max_offdiag_relative(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.max_offdiag / self.diagonal_scale()
    }

    /// Largest deviation of the matrix from its conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                worst = worst.max((z - self.matrix[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Diagonal within `diag_tol` (relative) and off-diagonal below `offdiag_tol` (relative).
    pub fn passes(&self, diag_tol: f64, offdiag_tol: f64) -> bool {
        self.max_diag_rel_error <= diag_tol && self.max_offdiag_relative() <= offdiag_tol
    }
}

/// `Σ_{x ∈ F_M} ε(x) C_λ(x) conj(C_λ'(x))` for all pairs of `labels`.
pub fn gram_c(g: &GroupId, m: u32, labels: &[Weight], exec: Execution) -> Result<GramReport> {
    gram(g, m, labels, Family::C, exec)
}

/// `Σ_{x ∈ F~_M} |W| S_λ(x) conj(S_λ'(x))` for all pairs of `labels`.
pub fn gram_s(g: &GroupId, m: u32, labels: &[Weight], exec: Execution) -> Result<GramReport> {
    gram(g, m, labels, Family::S, exec)
}

fn gram(g: &GroupId, m: u32, labels: &[Weight], family: Family, exec: Execution) -> Result<GramReport> {
    if m == 0 {
        return Err(Error::ZeroDenominator);
    }
    let d = group_data(g);
    let mut orbits = Vec::with_capacity(labels.len());
    for l in labels {
        if l.rank() != d.rank {
            return Err(Error::DimensionMismatch { expected: d.rank, got: l.rank() });
        }
        if family == Family::S && !l.is_strictly_dominant() {
            return Err(Error::NotStrictlyDominant(l.clone()));
        }
        orbits.push(PreparedOrbit::new(&d.weyl_orbit(l)?));
    }
    let spec = GridSpec::new(g.clone(), m);
    let points = match family {
        Family::C => grid(&spec),
        Family::S => interior_grid(&spec),
    };
    let k = labels.len();
    let w_order = d.weyl_order as f64;
    let flat = exec::sum_vectors(exec, &points, k * k, |p| {
        let x = p.eval_point(&d, m);
        let (vals, weight): (Vec<Complex64>, f64) = match family {
            Family::C => (orbits.iter().map(|o| o.eval_c(&x)).collect(), p.epsilon as f64),
            Family::S => (orbits.iter().map(|o| o.eval_s(&x)).collect(), w_order),
        };
        let mut out = Vec::with_capacity(k * k);
        for a in &vals {
            for b in &vals {
                out.push(a * b.conj() * weight);
            }
        }
        out
    });
    let matrix: Vec<Vec<Complex64>> = flat.chunks(k.max(1)).take(k).map(|r| r.to_vec()).collect();
    let mn = (m as u64).pow(d.rank as u32);
    let det = d.det as u64;
    let mut expected = Vec::with_capacity(k);
    let mut normalized = Vec::with_capacity(k);
    for o in &orbits {
        let size = o.size as u64;
        match family {
            Family::C => {
                expected.push(det * size * mn);
                normalized.push(det * d.weyl_order * d.weyl_order / size * mn);
            }
            Family::S => {
                expected.push(det * d.weyl_order * mn);
                normalized.push(det * d.weyl_order * mn);
            }
        }
    }
    let inadmissible: Vec<Weight> = labels
        .iter()
        .filter(|l| !is_admissible(g, m, l, family))
        .cloned()
        .collect();
    let ok: Vec<bool> = labels.iter().map(|l| !inadmissible.contains(l)).collect();
    let mut max_offdiag: f64 = 0.0;
    let mut max_diag: f64 = 0.0;
    for i in 0..k {
        if !ok[i] {
            continue;
        }
        max_diag = max_diag.max((matrix[i][i] - expected[i] as f64).norm() / expected[i] as f64);
        for j in 0..k {
            if i != j && ok[j] {
                max_offdiag = max_offdiag.max(matrix[i][j].norm());
            }
        }
    }
    Ok(GramReport {
        group: g.clone(),
        m,
        family,
        labels: labels.to_vec(),
        matrix,
        expected_diagonal: expected,
        normalized_expected_diagonal: normalized,
        max_offdiag,
        max_diag_rel_error: max_diag,
        inadmissible,
    })
}

/// One exported grid row: `s`, `ε`, α̌-coordinates and the image `u(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct GridRow {
    pub s: Vec<i64>,
    pub epsilon: u64,
    pub x: Vec<f64>,
    #[serde(serialize_with = "ser_complex_vec")]
    pub u: Vec<Complex64>,
}

fn ser_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

/// `F_M` (or `F~_M`) with the α̌-coordinates and `u`-image of every point.
pub fn grid_rows(spec: &GridSpec, interior: bool) -> Result<Vec<GridRow>> {
    let d = group_data(&spec.group);
    let pts = if interior { interior_grid(spec) } else { grid(spec) };
    pts.into_iter()
        .map(|p| {
            let x = p.eval_point(&d, spec.m);
            let u = map_point_to_u(&spec.group, &x)?;
            Ok(GridRow { x: x.to_f64(), u, s: p.s, epsilon: p.epsilon })
        })
        .collect()
}
