//! Evaluation of C-functions, S-functions and irreducible characters.
//!
//! `C_λ(x) = Σ_{μ ∈ W_λ} e^{2πi<μ,x>}` and `S_λ(x) = Σ_{μ ∈ W_λ} (-1)^{p(μ)} e^{2πi<μ,x>}`,
//! with `x` in α̌-coordinates so that `<μ,x> = Σ μ_j x_j`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{group_data, ratio_f64, GroupData, GroupId, Weight, WeylOrbit};

/// `|S_ρ(x)|` below this is treated as a wall point by [`eval_character`].
pub const WALL_TOLERANCE: f64 = 1e-6;

/// A point of the torus in α̌-coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalPoint {
    Exact(Vec<Rational64>),
    Float(Vec<f64>),
}

impl EvalPoint {
    /// The point with ω̌-coordinates `t`.
    pub fn from_omega_check(g: &GroupId, t: &[Rational64]) -> Result<Self> {
        Ok(EvalPoint::Exact(group_data(g).omega_check_to_alpha_check(t)?))
    }

    /// The grid point `Σ (s_i / M) ω̌_i`.
    pub fn from_grid(data: &GroupData, s: &[i64], m: u32) -> Self {
        let t: Vec<Rational64> = s
            .iter()
            .map(|&v| if m == 0 { Rational64::zero() } else { Rational64::new(v, m as i64) })
            .collect();
        EvalPoint::Exact(
            data.omega_check_to_alpha_check(&t)
                .expect("grid vector has group rank"),
        )
    }

    pub fn dim(&self) -> usize {
        match self {
            EvalPoint::Exact(v) => v.len(),
            EvalPoint::Float(v) => v.len(),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            EvalPoint::Exact(v) => v.iter().map(ratio_f64).collect(),
            EvalPoint::Float(v) => v.clone(),
        }
    }

    /// `e^{2πi<μ,x>}`; exact phases are reduced modulo 1 first and quarter turns are returned
    /// exactly.
    pub fn character(&self, mu: &[i64]) -> Complex64 {
        match self {
            EvalPoint::Exact(x) => {
                let p: Rational64 = mu.iter().zip(x).map(|(&m, xi)| xi * m).sum();
                cis_exact(p)
            }
            EvalPoint::Float(x) => {
                let p: f64 = mu.iter().zip(x).map(|(&m, xi)| m as f64 * xi).sum();
                let p = p - p.round();
                Complex64::from_polar(1.0, std::f64::consts::TAU * p)
            }
        }
    }

    fn check_dim(&self, rank: usize) -> Result<()> {
        if self.dim() != rank {
            return Err(Error::DimensionMismatch { expected: rank, got: self.dim() });
        }
        Ok(())
    }
}

fn cis_exact(p: Rational64) -> Complex64 {
    let frac = p - p.round();
    let quarter = frac * 4;
    if quarter.is_integer() {
        return match quarter.to_integer().rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // Evaluate at |frac| so that conjugate phases round identically.
    let (s, c) = (ratio_f64(&frac.abs()) * std::f64::consts::TAU).sin_cos();
    Complex64::new(c, if frac.is_negative() { -s } else { s })
}

/// An orbit flattened into `(coordinates, sign)` pairs for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedOrbit {
    pub size: usize,
    terms: Vec<(Vec<i64>, f64)>,
}

impl PreparedOrbit {
    pub fn new(orbit: &WeylOrbit) -> Self {
        PreparedOrbit {
            size: orbit.len(),
            terms: orbit
                .points
                .iter()
                .map(|p| (p.weight.0.clone(), p.sign() as f64))
                .collect(),
        }
    }

    /// Symmetric sum (C-function).
    pub fn eval_c(&self, x: &EvalPoint) -> Complex64 {
        self.terms.iter().map(|(m, _)| x.character(m)).sum()
    }

    /// Alternating sum (S-function).
    pub fn eval_s(&self, x: &EvalPoint) -> Complex64 {
        self.terms.iter().map(|(m, s)| x.character(m) * *s).sum()
    }

    /// `∂C/∂x_k = Σ 2πi μ_k e^{2πi<μ,x>}` for every `k`.
    pub fn gradient_c(&self, x: &EvalPoint) -> Vec<Complex64> {
        let n = x.dim();
        let mut g = vec![Complex64::zero(); n];
        for (m, _) in &self.terms {
            let e = x.character(m) * Complex64::new(0.0, std::f64::consts::TAU);
            for k in 0..n {
                g[k] += e * m[k] as f64;
            }
        }
        g
    }
}

/// C-function of a dominant weight.
pub fn eval_c(g: &GroupId, lambda: &Weight, x: &EvalPoint) -> Result<Complex64> {
    let d = group_data(g);
    x.check_dim(d.rank)?;
    Ok(PreparedOrbit::new(&d.weyl_orbit(lambda)?).eval_c(x))
}

/// S-function of a strictly dominant weight.
pub fn eval_s(g: &GroupId, lambda: &Weight, x: &EvalPoint) -> Result<Complex64> {
    let d = group_data(g);
    x.check_dim(d.rank)?;
    if !lambda.is_strictly_dominant() {
        return Err(Error::NotStrictlyDominant(lambda.clone()));
    }
    Ok(PreparedOrbit::new(&d.weyl_orbit(lambda)?).eval_s(x))
}

/// `S_{λ+ρ}(x) / S_ρ(x)`, or `Σ m_{λμ} C_μ(x)` where `S_ρ` vanishes.
pub fn eval_character(g: &GroupId, lambda: &Weight, x: &EvalPoint) -> Result<Complex64> {
    let d = group_data(g);
    x.check_dim(d.rank)?;
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.clone()));
    }
    if lambda.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let rho = Weight::rho(d.rank);
    let denom = PreparedOrbit::new(&d.weyl_orbit(&rho)?).eval_s(x);
    if denom.norm() > WALL_TOLERANCE {
        let num = PreparedOrbit::new(&d.weyl_orbit(&lambda.add(&rho))?).eval_s(x);
        return Ok(num / denom);
    }
    let table = crate::family::weight_multiplicities(g, lambda)?;
    let mut acc = Complex64::zero();
    for (mu, m) in &table.entries {
        acc += PreparedOrbit::new(&d.weyl_orbit(mu)?).eval_c(x) * *m as f64;
    }
    Ok(acc)
}

/// Contragredient action of the simple reflection `r_j` on a point in α̌-coordinates:
/// `x_j -> x_j - (C x)_j`.
pub fn reflect_point(g: &GroupId, j: usize, x: &[f64]) -> Result<Vec<f64>> {
    let d = group_data(g);
    if x.len() != d.rank {
        return Err(Error::DimensionMismatch { expected: d.rank, got: x.len() });
    }
    if j >= d.rank {
        return Err(Error::IndexOutOfRange { index: j, rank: d.rank });
    }
    let cx: f64 = d.cartan[j].iter().zip(x).map(|(&c, xi)| c as f64 * xi).sum();
    let mut out = x.to_vec();
    out[j] -= cx;
    Ok(out)
}
