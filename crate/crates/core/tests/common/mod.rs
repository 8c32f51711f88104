#![allow(dead_code)]


use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use weylpoly::branching::{
    branch_orbit, find_rule, reassemble, reduce_polynomial, substitution_map, BranchingRule,
};
use weylpoly::family::{
    c_polynomial, chebyshev_t_tilde, domain_vertices, jacobian_abs_det, map_point_to_u,
    real_presentation, s_polynomial, weight_multiplicities, weight_poly_s, weight_poly_sign,
};
use weylpoly::grid::{
    admissible_weights, gram_c, gram_s, grid, grid_cardinality, interior_cardinality,
    interior_grid, Family, GridSpec,
};
use weylpoly::group::group_data;
use weylpoly::orbit::EvalPoint;
use weylpoly::poly::{coeff, var_names, Coeff};
use weylpoly::{Execution, GroupId, MultiPoly, SimpleType, Weight};

use fixtures::Fam;

/// Result of one named check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: String,
    pub ok: bool,
    pub detail: String,
    /// Reported alongside a criterion without deciding it.
    pub report_only: bool,
}

impl Outcome {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Outcome { name: name.into(), ok, detail: detail.into(), report_only: false }
    }

    fn report(mut self) -> Self {
        self.report_only = true;
        self
    }
}

/// Panics with every failing check listed.
pub fn assert_all(outcomes: &[Outcome]) {
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.ok && !o.report_only)
        .map(|o| format!("{}: {}", o.name, o.detail))
        .collect();
    assert!(failed.is_empty(), "{} failing checks:\n{}", failed.len(), failed.join("\n"));
}

pub fn gid(s: &str) -> GroupId {
    s.parse().expect("group name")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    var_names(prefix, n)
}

pub fn parse(s: &str, prefix: &str, n: usize) -> MultiPoly {
    let ns = if prefix == "u" {
        (1..=n).map(|i| format!("u{i}")).collect::<Vec<_>>()
    } else {
        names(prefix, n)
    };
    let refs: Vec<&str> = ns.iter().map(String::as_str).collect();
    MultiPoly::parse(s, &refs).unwrap_or_else(|e| panic!("cannot parse {s:?}: {e}"))
}

fn cartan_of(g: &GroupId) -> Vec<Vec<i64>> {
    let n = g.rank();
    let mut out = vec![vec![0; n]; n];
    for (t, off) in g.factor_offsets() {
        for (i, row) in t.cartan().iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[off + i][off + j] = v;
            }
        }
    }
    out
}

fn det_int(a: &[Vec<i64>]) -> i64 {
    let c: Vec<Vec<Complex64>> =
        a.iter().map(|r| r.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect()).collect();
    oracle::det(&c).re.round() as i64
}

/// `Σ_{μ ∈ Wλ} e^{2πi<μ,x>}` from a brute-force orbit.
pub fn orbit_sum(cartan: &[Vec<i64>], lambda: &[i64], x: &[f64]) -> Complex64 {
    oracle::brute_orbit(cartan, lambda)
        .iter()
        .map(|mu| {
            let p: f64 = mu.iter().zip(x).map(|(&m, &xi)| m as f64 * xi).sum();
            Complex64::from_polar(1.0, 2.0 * PI * p)
        })
        .sum()
}

/// Alternating orbit sum with the parity of each point's distance from the seed.
pub fn signed_orbit_sum(cartan: &[Vec<i64>], lambda: &[i64], x: &[f64]) -> Complex64 {
    let n = cartan.len();
    let mut depth: BTreeMap<Vec<i64>, u32> = BTreeMap::from([(lambda.to_vec(), 0)]);
    let mut queue = std::collections::VecDeque::from([lambda.to_vec()]);
    while let Some(w) = queue.pop_front() {
        let dw = depth[&w];
        for j in 0..n {
            let r: Vec<i64> = (0..n).map(|k| w[k] - w[j] * cartan[j][k]).collect();
            if !depth.contains_key(&r) {
                depth.insert(r.clone(), dw + 1);
                queue.push_back(r);
            }
        }
    }
    depth
        .iter()
        .map(|(mu, d)| {
            let p: f64 = mu.iter().zip(x).map(|(&m, &xi)| m as f64 * xi).sum();
            let s = if d % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::from_polar(s, 2.0 * PI * p)
        })
        .sum()
}

fn fundamental_sums(cartan: &[Vec<i64>], x: &[f64]) -> Vec<Complex64> {
    let n = cartan.len();
    (0..n)
        .map(|j| {
            let mut w = vec![0; n];
            w[j] = 1;
            orbit_sum(cartan, &w, x)
        })
        .collect()
}

/// `p(u)` evaluated in exact rational arithmetic on the binary values of `u`, rounded once.
pub fn exact_eval(p: &MultiPoly, u: &[Complex64]) -> Complex64 {
    use num_traits::{ToPrimitive, Zero};
    let ur: Vec<(Coeff, Coeff)> = u
        .iter()
        .map(|z| (Coeff::from_float(z.re).unwrap(), Coeff::from_float(z.im).unwrap()))
        .collect();
    let mut re = Coeff::zero();
    let mut im = Coeff::zero();
    for (m, c) in p.terms() {
        let mut tr = c.clone();
        let mut ti = Coeff::zero();
        for ((xr, xi), &e) in ur.iter().zip(&m.0) {
            for _ in 0..e {
                let nr = &tr * xr - &ti * xi;
                ti = &tr * xi + &ti * xr;
                tr = nr;
            }
        }
        re += tr;
        im += ti;
    }
    Complex64::new(re.to_f64().unwrap(), im.to_f64().unwrap())
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_point(r: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(0.0..1.0)).collect()
}

fn fmt_w(w: &[i64]) -> String {
    format!("({})", w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

const SIMPLE: [&str; 7] = ["A1", "A2", "C2", "G2", "A3", "B3", "C3"];

// ---------------------------------------------------------------- 1. tables

pub fn check_tables() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut r = rng(1);
    for (group, rows) in tables::TABLES {
        let g = gid(group);
        let n = g.rank();
        let cartan = cartan_of(&g);
        let mut bad = Vec::new();
        let mut worst: f64 = 0.0;
        for (label, text) in rows.iter() {
            let expected = parse(text, "u", n);
            let got = c_polynomial(&g, &Weight(label.to_vec())).expect("label");
            if *got != expected {
                bad.push(fmt_w(label));
            }
            for _ in 0..3 {
                let x = random_point(&mut r, n);
                let u = fundamental_sums(&cartan, &x);
                let lhs = expected.eval(&u).unwrap();
                worst = worst.max(rel_err(lhs, orbit_sum(&cartan, label, &x)));
            }
        }
        out.push(Outcome::new(
            format!("table {group}: {} printed rows match c_polynomial", rows.len()),
            bad.is_empty(),
            format!("mismatching labels {bad:?}"),
        ));
        out.push(Outcome::new(
            format!("table {group}: printed rows equal orbit sums at random points"),
            worst < 1e-9,
            format!("max relative error {worst:e}"),
        ));
    }
    out
}

// ---------------------------------------------------------------- 2. grid images

fn a2_vertices() -> Vec<Vec<f64>> {
    let h = 1.5 * 3f64.sqrt();
    vec![vec![3.0, 0.0], vec![-1.5, -h], vec![-1.5, h]]
}

/// `C_{ω_1}` at `(b,a)/M` is the conjugate of its value at `(a,b)/M` for A2; compares the printed
/// images of mirrored points.
fn a2_conjugation_report() -> Outcome {
    let pts: Vec<_> = fixtures::grid_images().into_iter().filter(|p| p.group == "A2").collect();
    let mut bad = Vec::new();
    for p in &pts {
        let mirror = [p.s[1], p.s[0]];
        if let Some(q) = pts.iter().find(|q| q.s == mirror) {
            let err = (p.image[0] - q.image[0]).abs() + (p.image[1] + q.image[1]).abs();
            if err > 1e-10 {
                bad.push(format!("{:?} vs {:?}", p.s, q.s));
            }
        }
    }
    Outcome::new(
        "grid images A2: printed images of mirrored points are complex conjugates",
        bad.is_empty(),
        format!("asymmetric printed pairs {bad:?}"),
    )
    .report()
}

pub fn check_grid_images() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut by_group: BTreeMap<&str, (usize, usize, f64, Vec<String>)> = BTreeMap::new();
    for p in fixtures::grid_images() {
        let g = gid(p.group);
        let d = group_data(&g);
        let u = map_point_to_u(&g, &EvalPoint::from_grid(&d, &p.s, p.m)).unwrap();
        let got = real_presentation(&g, &u);
        let err = got.iter().zip(&p.image).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let tol = if p.algebraic { 1e-12 } else { 1e-10 };
        let e = by_group.entry(p.group).or_insert((0, 0, 0.0, Vec::new()));
        e.0 += 1;
        if err <= tol {
            e.1 += 1;
        } else {
            e.3.push(format!("s={:?} printed {:?} computed {:?}", p.s, p.image, got));
        }
        e.2 = e.2.max(err);
    }
    for (group, (total, good, worst, bad)) in by_group {
        out.push(Outcome::new(
            format!("grid images {group}: {total} printed points"),
            total == good,
            format!("{good}/{total} within tolerance, max error {worst:e}; {}", bad.join("; ")),
        ));
    }
    out.push(a2_conjugation_report());
    for &(group, m, count) in fixtures::GRID_COUNTS {
        let g = gid(group);
        let pts = grid(&GridSpec::new(g.clone(), m));
        out.push(Outcome::new(
            format!("grid count {group} M={m} = {count}"),
            pts.len() == count,
            format!("got {}", pts.len()),
        ));
    }
    let a2 = a2_vertices();
    let mut vertex_sets: Vec<(&str, Vec<Vec<f64>>)> = vec![("A2", a2)];
    for (group, vs) in fixtures::DOMAIN_VERTICES {
        vertex_sets.push((group, vs.iter().map(|v| v.to_vec()).collect()));
    }
    for (group, expected) in vertex_sets {
        let got = domain_vertices(&gid(group)).unwrap().coordinates;
        let err = got
            .iter()
            .zip(&expected)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        out.push(Outcome::new(
            format!("domain vertices {group}"),
            got.len() == expected.len() && err < 1e-12,
            format!("got {got:?}"),
        ));
    }
    out
}

// ---------------------------------------------------------------- 3. cardinalities

fn brute_count(marks: &[i64], m: i64, interior: bool) -> u64 {
    fn rec(marks: &[i64], budget: i64, lo: i64) -> u64 {
        match marks.split_first() {
            None => 1,
            Some((&a, rest)) => {
                let mut total = 0;
                let mut s = lo;
                while a * s <= budget {
                    total += rec(rest, budget - a * s, lo);
                    s += 1;
                }
                total
            }
        }
    }
    if interior {
        // s ≥ 1 and Σ m_i s_i < M, i.e. ≤ M - 1
        if m < 1 {
            return 0;
        }
        rec(marks, m - 1, 1)
    } else {
        rec(marks, m, 0)
    }
}

pub fn check_cardinalities() -> Vec<Outcome> {
    let mut out = Vec::new();
    for group in SIMPLE {
        let g = gid(group);
        let marks = group_data(&g).marks.clone();
        let mut bad = Vec::new();
        for m in 1..=20u32 {
            let spec = GridSpec::new(g.clone(), m);
            let full = brute_count(&marks, m as i64, false);
            let inner = brute_count(&marks, m as i64, true);
            if grid_cardinality(&spec) != full || grid(&spec).len() as u64 != full {
                bad.push(format!("F M={m}: {} vs {full}", grid_cardinality(&spec)));
            }
            if interior_cardinality(&spec) != inner || interior_grid(&spec).len() as u64 != inner {
                bad.push(format!("F~ M={m}: {} vs {inner}", interior_cardinality(&spec)));
            }
        }
        out.push(Outcome::new(
            format!("cardinalities {group}, M = 1..20"),
            bad.is_empty(),
            bad.join("; "),
        ));
    }
    out
}

// ---------------------------------------------------------------- 4. discrete orthogonality

pub fn check_gram() -> Vec<Outcome> {
    let mut out = Vec::new();
    for group in ["A1", "A2", "C2", "A3", "B3", "C3"] {
        let g = gid(group);
        let cartan = cartan_of(&g);
        let n = g.rank() as u32;
        let det = det_int(&cartan) as f64;
        let weyl = oracle::brute_orbit(&cartan, &vec![1; n as usize]).len() as f64;
        for m in 3..=6u32 {
            let mn = (m as f64).powi(n as i32);
            for fam in [Family::C, Family::S] {
                let labels = admissible_weights(&g, m, fam);
                let rep = match fam {
                    Family::C => gram_c(&g, m, &labels, Execution::default()),
                    Family::S => gram_s(&g, m, &labels, Execution::default()),
                }
                .unwrap();
                let mut diag_err: f64 = 0.0;
                let mut off: f64 = 0.0;
                let mut scale = f64::INFINITY;
                for (i, l) in labels.iter().enumerate() {
                    let expected = match fam {
                        Family::C => det * oracle::brute_orbit(&cartan, &l.0).len() as f64 * mn,
                        Family::S => det * weyl * mn,
                    };
                    scale = scale.min(expected);
                    diag_err = diag_err.max((rep.matrix[i][i].re - expected).abs() / expected);
                    diag_err = diag_err.max(rep.matrix[i][i].im.abs() / expected);
                    for j in 0..labels.len() {
                        if i != j {
                            off = off.max(rep.matrix[i][j].norm());
                        }
                    }
                }
                let off_rel = if labels.is_empty() { 0.0 } else { off / scale };
                let vacuous = labels.is_empty()
                    && fam == Family::S
                    && interior_grid(&GridSpec::new(g.clone(), m)).is_empty();
                out.push(Outcome::new(
                    if vacuous {
                        format!("gram {group} {fam:?} M={m}: interior grid empty, no S-functions to test")
                    } else {
                        format!("gram {group} {fam:?} M={m}: {} labels", labels.len())
                    },
                    vacuous || (!labels.is_empty() && diag_err <= 1e-9 && off_rel <= 1e-8),
                    format!("diag rel {diag_err:e}, offdiag rel {off_rel:e}"),
                ));
            }
        }
    }
    out
}

// ---------------------------------------------------------------- 5. recurrences

#[derive(Debug, Clone, Copy)]
enum Idx {
    Var(usize, i64),
    Lit(i64),
}

fn parse_index(s: &str) -> Idx {
    let s = s.trim();
    let var = |c: char| match c {
        'k' => 0,
        'l' => 1,
        'm' => 2,
        _ => panic!("bad index variable {c}"),
    };
    let first = s.chars().next().unwrap();
    if first.is_ascii_digit() || first == '-' {
        return Idx::Lit(s.parse().unwrap());
    }
    let v = var(first);
    let rest = &s[1..];
    let off = if rest.is_empty() { 0 } else { rest.parse::<i64>().unwrap() };
    Idx::Var(v, off)
}

fn parse_label(s: &str) -> Vec<Idx> {
    s.split(',').map(parse_index).collect()
}

fn instantiate(label: &[Idx], vals: &[i64; 3]) -> Vec<i64> {
    label
        .iter()
        .map(|i| match *i {
            Idx::Var(v, o) => vals[v] + o,
            Idx::Lit(c) => c,
        })
        .collect()
}

fn parse_range(s: &str) -> [i64; 3] {
    let mut lo = [2i64; 3];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let v = match part.chars().next().unwrap() {
            'k' => 0,
            'l' => 1,
            'm' => 2,
            c => panic!("bad range variable {c}"),
        };
        let rest = &part[1..];
        lo[v] = if let Some(b) = rest.strip_prefix(">=") {
            b.parse().unwrap()
        } else {
            rest.strip_prefix('>').unwrap().parse::<i64>().unwrap() + 1
        };
    }
    lo
}

fn family_poly(g: &GroupId, fam: Fam, label: &[i64]) -> Result<MultiPoly, String> {
    match fam {
        Fam::C => {
            if label.iter().any(|&v| v < 0) {
                return Err(format!("negative C label {}", fmt_w(label)));
            }
            Ok((*c_polynomial(g, &Weight(label.to_vec())).unwrap()).clone())
        }
        Fam::S => {
            if label.iter().any(|&v| v < 0) {
                return Err(format!("negative S label {}", fmt_w(label)));
            }
            if label.iter().any(|&v| v == 0) {
                return Ok(MultiPoly::zero(g.rank()));
            }
            let shifted: Vec<i64> = label.iter().map(|v| v - 1).collect();
            Ok((*s_polynomial(g, &Weight(shifted)).unwrap()).clone())
        }
    }
}

/// Checks one recurrence on every instance in its range up to level 40 (or the first
/// instances past the smallest admissible level when none fit below 40).
pub fn check_recurrence(r: &fixtures::Recurrence) -> Outcome {
    let g = gid(r.group);
    let d = group_data(&g);
    let n = g.rank();
    let lhs = parse_label(r.lhs);
    let base = parse_label(r.base);
    let minus: Vec<Vec<Idx>> = r.minus.iter().map(|s| parse_label(s)).collect();
    let mut used = [false; 3];
    for l in std::iter::once(&lhs).chain(std::iter::once(&base)).chain(&minus) {
        for i in l {
            if let Idx::Var(v, _) = i {
                used[*v] = true;
            }
        }
    }
    let lo = parse_range(r.range);
    let level = |vals: &[i64; 3]| d.level(&Weight(instantiate(&lhs, vals)));
    let mut start = [0i64; 3];
    for v in 0..3 {
        start[v] = if used[v] { lo[v] } else { 0 };
    }
    let min_level = level(&start);
    let cap = if min_level <= 40 { 40 } else { min_level + 10 };
    let mut instances = Vec::new();
    let hi = 60;
    for k in start[0]..=(if used[0] { hi } else { 0 }) {
        for l in start[1]..=(if used[1] { hi } else { 0 }) {
            for m in start[2]..=(if used[2] { hi } else { 0 }) {
                let vals = [k, l, m];
                if level(&vals) <= cap {
                    instances.push(vals);
                }
            }
        }
    }
    let name = format!(
        "{} {:?} recurrence {} = u{} {} - ...",
        r.group, r.family, fmt_w_str(r.lhs), r.var, fmt_w_str(r.base)
    );
    let mut failures = Vec::new();
    let mut interior_failures = 0;
    for vals in &instances {
        let res: Result<bool, String> = (|| {
            let p_lhs = family_poly(&g, r.family, &instantiate(&lhs, vals))?;
            let p_base = family_poly(&g, r.family, &instantiate(&base, vals))?;
            let mut rhs = &MultiPoly::var(n, r.var - 1) * &p_base;
            for mi in &minus {
                rhs = &rhs - &family_poly(&g, r.family, &instantiate(mi, vals))?;
            }
            Ok(rhs == p_lhs)
        })();
        match res {
            Ok(true) => {}
            Ok(false) => {
                if (0..3).all(|v| !used[v] || vals[v] >= 2) {
                    interior_failures += 1;
                }
                failures.push(format!("fails at (k,l,m)={vals:?}"))
            }
            Err(e) => failures.push(format!("at (k,l,m)={vals:?}: {e}")),
        }
    }
    let ok = !instances.is_empty() && failures.is_empty();
    let detail = if instances.is_empty() {
        "no instance in range".to_string()
    } else {
        format!(
            "{} instances (level <= {cap}), {} failing ({} with every index >= 2){}",
            instances.len(),
            failures.len(),
            interior_failures,
            failures.first().map(|f| format!(", first {f}")).unwrap_or_default()
        )
    };
    Outcome::new(name, ok, detail)
}

fn fmt_w_str(s: &str) -> String {
    format!("P({s})")
}

/// `u_j C_λ = Σ n_δ C_δ` with `n_δ` counted from brute-force orbits, for generic `λ`.
pub fn check_orbit_product_recurrences(group: &str) -> Outcome {
    let g = gid(group);
    let cartan = cartan_of(&g);
    let n = g.rank();
    let mut bad = Vec::new();
    let mut count = 0;
    let labels: Vec<Vec<i64>> = match n {
        2 => vec![vec![2, 2], vec![3, 2], vec![2, 3]],
        _ => vec![vec![2, 2, 2], vec![3, 2, 2], vec![2, 3, 2], vec![2, 2, 3]],
    };
    for lambda in labels {
        let orbit_l = oracle::brute_orbit(&cartan, &lambda);
        for j in 0..n {
            let mut w = vec![0; n];
            w[j] = 1;
            let mut counts: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
            for mu in oracle::brute_orbit(&cartan, &w) {
                for nu in &orbit_l {
                    let s: Vec<i64> = mu.iter().zip(nu).map(|(a, b)| a + b).collect();
                    if s.iter().all(|&v| v >= 0) {
                        *counts.entry(s).or_insert(0) += 1;
                    }
                }
            }
            let mut rhs = MultiPoly::zero(n);
            for (delta, k) in &counts {
                rhs.add_scaled(&c_polynomial(&g, &Weight(delta.clone())).unwrap(), &coeff(*k));
            }
            let lhs = &MultiPoly::var(n, j) * &*c_polynomial(&g, &Weight(lambda.clone())).unwrap();
            count += 1;
            if lhs != rhs {
                bad.push(format!("u{} C{}", j + 1, fmt_w(&lambda)));
            }
        }
    }
    Outcome::new(
        format!("{group} orbit-product recurrences u_j C_λ, {count} generic cases"),
        bad.is_empty(),
        bad.join(", "),
    )
}

/// Criterion 5: the printed generic recurrences.
pub fn check_generic_recurrences() -> Vec<Outcome> {
    let mut out: Vec<Outcome> = fixtures::RECURRENCES
        .iter()
        .filter(|r| r.generic)
        .map(|r| {
            let o = check_recurrence(r);
            if r.group == "B3" {
                Outcome { name: format!("{} (printed form, reported)", o.name), ..o }.report()
            } else {
                o
            }
        })
        .collect();
    for group in ["A2", "C2", "A3", "B3", "C3"] {
        out.push(check_orbit_product_recurrences(group));
    }
    out
}

/// The printed special-case relations (boundary labels).
pub fn check_additional_recurrences() -> Vec<Outcome> {
    fixtures::RECURRENCES.iter().filter(|r| !r.generic).map(check_recurrence).collect()
}

// ---------------------------------------------------------------- 6. branching

/// `Pr` transcribed from the printed projection matrices.
pub const PROJECTIONS: &[(&str, &[&[i64]])] = &[
    ("A2:A1", &[&[2, 2]]),
    ("C2:A1xA1", &[&[1, 1], &[0, 1]]),
    ("C2:A1", &[&[3, 4]]),
    ("G2:A2", &[&[1, 0], &[1, 1]]),
    ("G2:A1xA1", &[&[1, 1], &[3, 1]]),
    ("G2:A1", &[&[10, 6]]),
    ("A3:C2", &[&[1, 0, 1], &[0, 1, 0]]),
    ("A3:A1xA1", &[&[1, 0, 1], &[1, 2, 1]]),
    ("B3:A3", &[&[0, 1, 1], &[1, 1, 0], &[0, 1, 0]]),
    ("B3:A1xA1xA1", &[&[1, 1, 0], &[1, 1, 1], &[0, 2, 1]]),
    ("B3:G2", &[&[0, 1, 0], &[1, 0, 1]]),
    ("C3:C2xA1", &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]),
    ("C3:A2", &[&[1, 1, 2], &[0, 1, 0]]),
    ("C3:A1", &[&[5, 8, 9]]),
];

fn child_prefix(rule: &BranchingRule) -> usize {
    rule.child.rank()
}

fn parse_child(rule: &BranchingRule, s: &str) -> MultiPoly {
    parse(s, "Y", child_prefix(rule))
}

fn parse_parent(rule: &BranchingRule, s: &str) -> MultiPoly {
    parse(s, "X", rule.parent.rank())
}

/// Brute-force orbit branching `C_λ -> Σ count_δ C_δ` through `Pr`.
fn brute_branch(rule: &BranchingRule, pr: &[&[i64]], lambda: &[i64]) -> BTreeMap<Vec<i64>, i64> {
    let mut out = BTreeMap::new();
    for mu in oracle::brute_orbit(&cartan_of(&rule.parent), lambda) {
        let img: Vec<i64> =
            pr.iter().map(|row| row.iter().zip(&mu).map(|(a, b)| a * b).sum()).collect();
        if img.iter().all(|&v| v >= 0) {
            *out.entry(img).or_insert(0) += 1;
        }
    }
    out
}

pub fn check_projections() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut r = rng(6);
    for &(name, pr) in PROJECTIONS {
        let rule = find_rule(name).unwrap();
        let same = rule.projection.len() == pr.len()
            && rule.projection.iter().zip(pr).all(|(a, b)| a.as_slice() == *b);
        out.push(Outcome::new(format!("{name}: projection matrix"), same, format!("{:?}", rule.projection)));
        // C_λ(Prᵀ y) = Σ count_δ C_δ(y) at random y
        let pc = cartan_of(&rule.parent);
        let cc = cartan_of(&rule.child);
        let np = rule.parent.rank();
        let nc = rule.child.rank();
        let mut worst: f64 = 0.0;
        let mut branch_ok = true;
        for j in 0..np {
            let mut lambda = vec![0; np];
            lambda[j] = 1;
            let counts = brute_branch(rule, pr, &lambda);
            let lib = branch_orbit(rule, &Weight(lambda.clone())).unwrap();
            let lib: BTreeMap<Vec<i64>, i64> = lib.into_iter().map(|(w, k)| (w.0, k)).collect();
            branch_ok &= lib == counts;
            for _ in 0..20 {
                let y = random_point(&mut r, nc);
                let x: Vec<f64> =
                    (0..np).map(|c| (0..nc).map(|i| pr[i][c] as f64 * y[i]).sum()).collect();
                let lhs = orbit_sum(&pc, &lambda, &x);
                let rhs: Complex64 =
                    counts.iter().map(|(d, k)| orbit_sum(&cc, d, &y) * *k as f64).sum();
                worst = worst.max(rel_err(lhs, rhs));
            }
        }
        out.push(Outcome::new(
            format!("{name}: orbit branching equals brute-force projection"),
            branch_ok,
            "branch_orbit differs from projected orbit",
        ));
        let mut sizes = Vec::new();
        for j in 0..np {
            let mut lambda = vec![0; np];
            lambda[j] = 1;
            let parent = oracle::brute_orbit(&pc, &lambda).len() as i64;
            let child: i64 = brute_branch(rule, pr, &lambda)
                .iter()
                .map(|(d, k)| k * oracle::brute_orbit(&cc, d).len() as i64)
                .sum();
            if parent != child {
                sizes.push(format!("ω{}: |W_λ| = {parent}, branched orbits cover {child}", j + 1));
            }
        }
        out.push(
            Outcome::new(
                format!("{name}: branching preserves orbit sizes"),
                sizes.is_empty(),
                sizes.join("; "),
            )
            .report(),
        );
        out.push(
            Outcome::new(
                format!("{name}: C_λ(Prᵀy) = Σ C_δ(y) at 20 random points"),
                worst < 1e-9,
                format!("max relative error {worst:e}"),
            )
            .report(),
        );
    }
    out
}

pub fn check_substitutions() -> Vec<Outcome> {
    let mut out = Vec::new();
    for &(name, i, text) in fixtures::SUBSTITUTIONS {
        let rule = find_rule(name).unwrap();
        let got = &substitution_map(rule).unwrap()[i - 1];
        let expected = parse_child(rule, text);
        out.push(Outcome::new(
            format!("{name}: X{i} -> {text}"),
            *got == expected,
            format!("computed {}", got.render(&weylpoly::LevelOrder::for_group(&rule.child), &rule.child_names())),
        ));
    }
    out
}

pub fn check_orbit_branchings() -> Vec<Outcome> {
    let mut out = Vec::new();
    for &(name, lambda, expected) in fixtures::ORBIT_BRANCHINGS {
        let rule = find_rule(name).unwrap();
        let got: BTreeMap<Vec<i64>, i64> = branch_orbit(rule, &Weight(lambda.to_vec()))
            .unwrap()
            .into_iter()
            .map(|(w, k)| (w.0, k))
            .collect();
        let exp: BTreeMap<Vec<i64>, i64> = expected.iter().map(|(w, k)| (w.to_vec(), *k)).collect();
        let cc = cartan_of(&rule.child);
        let cover = |m: &BTreeMap<Vec<i64>, i64>| -> i64 {
            m.iter().map(|(d, k)| k * oracle::brute_orbit(&cc, d).len() as i64).sum()
        };
        let parent_size = oracle::brute_orbit(&cartan_of(&rule.parent), lambda).len();
        out.push(Outcome::new(
            format!("{name}: C{} branches as printed", fmt_w(lambda)),
            got == exp,
            format!(
                "computed {got:?}; |W_λ| = {parent_size}, printed orbits cover {}, computed cover {}",
                cover(&exp),
                cover(&got)
            ),
        ));
    }
    out
}

/// Four checks per printed reduction: the parent polynomial, its image, the printed
/// decomposition expanding to the printed image, and our decomposition agreeing with it.
pub fn check_reductions() -> Vec<Outcome> {
    let mut out = Vec::new();
    for red in fixtures::REDUCTIONS {
        let rule = find_rule(red.rule).unwrap();
        let tag = format!("{} C{}", red.rule, fmt_w(red.label));
        let known = if red.note.is_empty() { String::new() } else { format!(" [{}]", red.note) };
        let child_order = weylpoly::LevelOrder::for_group(&rule.child);
        let label = Weight(red.label.to_vec());
        let printed_parent = parse_parent(rule, red.parent);
        let printed_image = parse_child(rule, red.image);
        let mut printed_dec = MultiPoly::zero(rule.child.rank());
        for (d, k) in red.decomposition {
            printed_dec.add_scaled(&c_polynomial(&rule.child, &Weight(d.to_vec())).unwrap(), &coeff(*k));
        }
        let ours_parent = c_polynomial(&rule.parent, &label).unwrap();
        let (image, dec) = reduce_polynomial(rule, &printed_parent).unwrap();
        let reassembled = reassemble(&rule.child, &dec).unwrap();
        let printed_terms: BTreeMap<Weight, Coeff> =
            red.decomposition.iter().map(|(d, k)| (Weight(d.to_vec()), coeff(*k))).collect();
        out.push(Outcome::new(
            format!("{tag}: printed parent polynomial"),
            *ours_parent == printed_parent,
            format!(
                "computed {}{known}",
                ours_parent.render(&weylpoly::LevelOrder::for_group(&rule.parent), &rule.parent_names())
            ),
        ));
        out.push(Outcome::new(
            format!("{tag}: image under the substitution"),
            image == printed_image,
            format!("computed {}{known}", image.render(&child_order, &rule.child_names())),
        ));
        out.push(Outcome::new(
            format!("{tag}: printed decomposition expands to the printed image"),
            printed_dec == printed_image,
            format!(
                "printed right-hand side minus printed image = {}{known}",
                (&printed_dec - &printed_image).render(&child_order, &rule.child_names())
            ),
        ));
        out.push(Outcome::new(
            format!("{tag}: decomposition matches the printed one"),
            dec.is_exact() && reassembled == image && dec.terms == printed_terms,
            format!(
                "computed {}{known}",
                weylpoly::branching::render_decomposition(&rule.child, &dec)
            ),
        ));
    }
    out
}

/// Every C-polynomial with `Σλ ≤ 2` reduces to nonnegative integer counts that agree with the
/// orbit-level branching of its dominant weights.
pub fn check_consistency_triangle() -> Vec<Outcome> {
    let mut out = Vec::new();
    for rule in weylpoly::branching::rules_catalog() {
        let n = rule.parent.rank();
        let mut bad = Vec::new();
        let labels: Vec<Vec<i64>> = (0..3i64.pow(n as u32))
            .map(|mut c| {
                (0..n)
                    .map(|_| {
                        let v = c % 3;
                        c /= 3;
                        v
                    })
                    .collect::<Vec<i64>>()
            })
            .filter(|w| w.iter().sum::<i64>() <= 2)
            .collect();
        for lambda in labels {
            let p = c_polynomial(&rule.parent, &Weight(lambda.clone())).unwrap();
            let (_, dec) = reduce_polynomial(rule, &p).unwrap();
            let pr = PROJECTIONS.iter().find(|(nm, _)| *nm == rule.name()).unwrap().1;
            let brute: BTreeMap<Weight, i64> =
                brute_branch(rule, pr, &lambda).into_iter().map(|(w, k)| (Weight(w), k)).collect();
            if dec.as_counts() != Some(brute) {
                bad.push(fmt_w(&lambda));
            }
        }
        out.push(
            Outcome::new(
                format!("{}: polynomial reduction = orbit branching for Σλ ≤ 2", rule.name()),
                bad.is_empty(),
                bad.join(", "),
            )
            .report(),
        );
    }
    out
}

pub fn check_branching() -> Vec<Outcome> {
    let mut out = check_projections();
    out.extend(check_substitutions());
    out.extend(check_orbit_branchings());
    out.extend(check_reductions());
    out.extend(check_consistency_triangle());
    out
}

// ---------------------------------------------------------------- 7. analytic identities

/// Points of the fundamental region away from the walls: `|S_ρ(x)| > 1e-3`.
fn regular_points(g: &GroupId, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let cartan = cartan_of(g);
    let n = g.rank();
    let mut r = rng(seed);
    let mut pts = Vec::new();
    while pts.len() < count {
        let x = random_point(&mut r, n);
        if signed_orbit_sum(&cartan, &vec![1; n], &x).norm() > 1e-3 {
            pts.push(x);
        }
    }
    pts
}

pub fn check_jacobian() -> Vec<Outcome> {
    let mut out = Vec::new();
    for group in ["A2", "C2", "G2", "A3", "B3", "C3"] {
        let g = gid(group);
        let cartan = cartan_of(&g);
        let n = g.rank();
        let s_poly = weight_poly_s(&g).unwrap();
        let mut analytic: f64 = 0.0;
        let mut fd: f64 = 0.0;
        let mut s_err: f64 = 0.0;
        let points = regular_points(&g, 100, 7);
        for x in &points {
            let lib = jacobian_abs_det(&g, &EvalPoint::Float(x.clone())).unwrap();
            let u = fundamental_sums(&cartan, x);
            let s_rho = signed_orbit_sum(&cartan, &vec![1; n], x);
            let bold_s = exact_eval(&s_poly, &u);
            s_err = s_err.max((bold_s - s_rho * s_rho).norm() / (s_rho * s_rho).norm().max(1.0));
            let expected = (2.0 * PI).powi(n as i32) * bold_s.norm().sqrt();
            analytic = analytic.max((lib - expected).abs() / expected);
            let h = 1e-6;
            let cols: Vec<Vec<Complex64>> = (0..n)
                .map(|k| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let up = fundamental_sums(&cartan, &xp);
                    let um = fundamental_sums(&cartan, &xm);
                    up.iter().zip(&um).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                })
                .collect();
            let num = oracle::det(&cols).norm();
            fd = fd.max((lib - num).abs() / num);
        }
        out.push(Outcome::new(
            format!("{group}: |det ∂u/∂x| = (2π)^n √|𝐒(u)| at {} points", points.len()),
            analytic < 1e-7,
            format!("max relative error {analytic:e}"),
        ));
        out.push(Outcome::new(
            format!("{group}: Jacobian agrees with finite differences at {} points", points.len()),
            fd < 1e-4,
            format!("max relative error {fd:e}"),
        ));
        out.push(Outcome::new(
            format!("{group}: 𝐒(u(x)) = S_ρ(x)^2 at {} points", points.len()),
            s_err < 1e-8,
            format!("max relative error {s_err:e}"),
        ));
    }
    for (group, expected) in [("A2", Some(1)), ("C2", None), ("A3", Some(1)), ("B3", Some(1)), ("C3", Some(1))] {
        let g = gid(group);
        let sign = weight_poly_sign(&g).ok();
        out.push(
            Outcome::new(
                format!("{group}: tabulated weight polynomial is {}", match expected {
                    Some(1) => "+𝐒".to_string(),
                    Some(_) => "-𝐒".to_string(),
                    None => "not ±𝐒".to_string(),
                }),
                sign == expected,
                format!("observed sign {sign:?}"),
            )
            .report(),
        );
    }
    out
}

fn small_labels(n: usize, max_sum: i64) -> Vec<Vec<i64>> {
    let base = (max_sum + 1) as usize;
    (0..base.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = (c % base) as i64;
                    c /= base;
                    v
                })
                .collect::<Vec<i64>>()
        })
        .filter(|w| w.iter().sum::<i64>() <= max_sum)
        .collect()
}

pub fn check_multiplicities() -> Vec<Outcome> {
    let mut out = Vec::new();
    for group in SIMPLE {
        let g = gid(group);
        let cartan = cartan_of(&g);
        let mut bad = Vec::new();
        let labels = small_labels(g.rank(), 3);
        for l in &labels {
            let table = weight_multiplicities(&g, &Weight(l.clone())).unwrap();
            let got: BTreeMap<Vec<i64>, i64> =
                table.entries.iter().map(|(w, m)| (w.0.clone(), *m)).collect();
            let expected = oracle::freudenthal(&cartan, l);
            let dim = oracle::weyl_dimension(&cartan, l);
            let brute_dim: i64 = expected
                .iter()
                .map(|(mu, m)| m * oracle::brute_orbit(&cartan, mu).len() as i64)
                .sum();
            let u0: Vec<Complex64> = (0..g.rank())
                .map(|j| {
                    let mut w = vec![0; g.rank()];
                    w[j] = 1;
                    Complex64::new(oracle::brute_orbit(&cartan, &w).len() as f64, 0.0)
                })
                .collect();
            let at_zero = s_polynomial(&g, &Weight(l.clone())).unwrap().eval(&u0).unwrap();
            if got != expected
                || table.dimension(&g).unwrap() != dim
                || brute_dim != dim
                || (at_zero - Complex64::new(dim as f64, 0.0)).norm() > 1e-9
            {
                bad.push(fmt_w(l));
            }
        }
        out.push(Outcome::new(
            format!("{group}: multiplicities and dimensions for {} labels with Σλ ≤ 3", labels.len()),
            bad.is_empty(),
            bad.join(", "),
        ));
    }
    out
}

pub fn check_analytic() -> Vec<Outcome> {
    let mut out = check_jacobian();
    out.extend(check_multiplicities());
    out
}

// ---------------------------------------------------------------- 8. Chebyshev

pub fn check_chebyshev() -> Vec<Outcome> {
    let mut out = Vec::new();
    let a1 = gid("A1");
    let mut bad = Vec::new();
    for m in 1..=20usize {
        let coeffs = oracle::chebyshev_tilde_coeffs(m);
        let expected = MultiPoly::from_terms(
            1,
            coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (vec![i as u32], *c)),
        );
        let t = chebyshev_t_tilde(m as u32);
        let c = c_polynomial(&a1, &Weight(vec![m as i64])).unwrap();
        if t != expected || *c != expected {
            bad.push(m.to_string());
        }
    }
    out.push(Outcome::new("A1: C_m = T~_m for m = 1..20", bad.is_empty(), bad.join(", ")));
    let mut worst: f64 = 0.0;
    let mut r = rng(9);
    let xs: Vec<f64> = (0..20).map(|_| r.gen_range(0.01..0.49)).collect();
    for m in 0..=20u32 {
        let s = s_polynomial(&a1, &Weight(vec![m as i64])).unwrap();
        for &x in &xs {
            let theta = 2.0 * PI * x;
            let v = exact_eval(&s, &[Complex64::new(2.0 * theta.cos(), 0.0)]);
            worst = worst.max((v.re - oracle::second_kind(m, theta)).abs().max(v.im.abs()));
        }
    }
    out.push(Outcome::new(
        "A1: S_m(2cos 2πx) = sin(2π(m+1)x)/sin 2πx at 20 random x",
        worst < 1e-10,
        format!("max error {worst:e}"),
    ));
    out
}

/// All eight acceptance criteria, in order.
pub fn criteria() -> Vec<(&'static str, fn() -> Vec<Outcome>)> {
    vec![
        ("1 lowest C-polynomial tables", check_tables as fn() -> Vec<Outcome>),
        ("2 grid images, counts and domain vertices", check_grid_images),
        ("3 grid cardinalities", check_cardinalities),
        ("4 discrete orthogonality", check_gram),
        ("5 generic recurrences", check_generic_recurrences),
        ("6 branching rules", check_branching),
        ("7 Jacobian, weight polynomial and multiplicities", check_analytic),
        ("8 Chebyshev specialisation", check_chebyshev),
    ]
}

pub fn simple_types() -> [SimpleType; 7] {
    SimpleType::ALL
}

/// Every outcome passes except those whose names contain one of `known`, which must fail.
pub fn assert_expected(outcomes: &[Outcome], known: &[&str]) {
    let mut problems = Vec::new();
    for o in outcomes {
        let listed = known.iter().any(|k| o.name.contains(k));
        if listed && o.ok {
            problems.push(format!("expected a deviation but it holds: {}", o.name));
        }
        if !listed && !o.ok {
            problems.push(format!("{}: {}", o.name, o.detail));
        }
    }
    for k in known {
        if !outcomes.iter().any(|o| o.name.contains(k)) {
            problems.push(format!("no check named {k:?}"));
        }
    }
    assert!(problems.is_empty(), "{}", problems.join("\n"));
}
