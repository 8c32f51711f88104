//! Root-system and Weyl-group data for A1, A2, C2, G2, A3, B3, C3 and their finite products.
//!
//! Weights are always integer vectors in the basis of fundamental weights (ω-basis). Points of
//! the torus live either in the basis of fundamental coweights (ω̌-basis, used by the grids) or
//! in the basis of simple coroots (α̌-basis, in which `<λ, x> = Σ λ_j x_j`).

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple factor supported by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimpleType {
    A1,
    A2,
    C2,
    G2,
    A3,
    B3,
    C3,
}

impl SimpleType {
    pub const ALL: [SimpleType; 7] = [
        SimpleType::A1,
        SimpleType::A2,
        SimpleType::C2,
        SimpleType::G2,
        SimpleType::A3,
        SimpleType::B3,
        SimpleType::C3,
    ];

    pub fn rank(self) -> usize {
        match self {
            SimpleType::A1 => 1,
            SimpleType::A2 | SimpleType::C2 | SimpleType::G2 => 2,
            SimpleType::A3 | SimpleType::B3 | SimpleType::C3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SimpleType::A1 => "A1",
            SimpleType::A2 => "A2",
            SimpleType::C2 => "C2",
            SimpleType::G2 => "G2",
            SimpleType::A3 => "A3",
            SimpleType::B3 => "B3",
            SimpleType::C3 => "C3",
        }
    }

    /// Rows are the simple roots written in the ω-basis: `α_j = Σ_k c[j][k] ω_k`.
    pub fn cartan(self) -> Vec<Vec<i64>> {
        let rows: &[&[i64]] = match self {
            SimpleType::A1 => &[&[2]],
            SimpleType::A2 => &[&[2, -1], &[-1, 2]],
            SimpleType::C2 => &[&[2, -1], &[-2, 2]],
            // α1 long, α2 short: the highest root is ω1 = 2α1 + 3α2.
            SimpleType::G2 => &[&[2, -3], &[-1, 2]],
            SimpleType::A3 => &[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]],
            SimpleType::B3 => &[&[2, -1, 0], &[-1, 2, -2], &[0, -1, 2]],
            SimpleType::C3 => &[&[2, -1, 0], &[-1, 2, -1], &[0, -2, 2]],
        };
        rows.iter().map(|r| r.to_vec()).collect()
    }

    /// Coefficients of the highest root in the α-basis.
    pub fn marks(self) -> Vec<i64> {
        match self {
            SimpleType::A1 => vec![1],
            SimpleType::A2 => vec![1, 1],
            SimpleType::C2 => vec![2, 1],
            SimpleType::G2 => vec![2, 3],
            SimpleType::A3 => vec![1, 1, 1],
            SimpleType::B3 => vec![1, 2, 2],
            SimpleType::C3 => vec![2, 2, 1],
        }
    }

    /// Coefficients of the highest coroot (the coroot of the highest short root) in the
    /// α̌-basis; `Σ comarks_j λ_j` is the level of a weight under the dual affine action.
    pub fn comarks(self) -> Vec<i64> {
        match self {
            SimpleType::A1 => vec![1],
            SimpleType::A2 => vec![1, 1],
            SimpleType::C2 => vec![1, 2],
            SimpleType::G2 => vec![3, 2],
            SimpleType::A3 => vec![1, 1, 1],
            SimpleType::B3 => vec![2, 2, 1],
            SimpleType::C3 => vec![1, 2, 2],
        }
    }

    pub fn level_vector(self) -> Vec<i64> {
        match self {
            SimpleType::A1 => vec![1],
            SimpleType::A2 => vec![2, 2],
            SimpleType::C2 => vec![3, 4],
            SimpleType::G2 => vec![10, 6],
            SimpleType::A3 => vec![3, 4, 3],
            SimpleType::B3 => vec![6, 10, 6],
            SimpleType::C3 => vec![5, 8, 9],
        }
    }

    pub fn coxeter_number(self) -> u32 {
        match self {
            SimpleType::A1 => 2,
            SimpleType::A2 => 3,
            SimpleType::C2 => 4,
            SimpleType::G2 => 6,
            SimpleType::A3 => 4,
            SimpleType::B3 | SimpleType::C3 => 6,
        }
    }

    pub fn weyl_order(self) -> u64 {
        match self {
            SimpleType::A1 => 2,
            SimpleType::A2 => 6,
            SimpleType::C2 => 8,
            SimpleType::G2 => 12,
            SimpleType::A3 => 24,
            SimpleType::B3 | SimpleType::C3 => 48,
        }
    }
}

impl FromStr for SimpleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        SimpleType::ALL
            .into_iter()
            .find(|t| t.name() == up)
            .ok_or_else(|| Error::UnsupportedGroup(s.to_string()))
    }
}

/// A simple group or an ordered product of simple factors, e.g. `A1xA1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupId {
    factors: Vec<SimpleType>,
}

impl GroupId {
    pub fn simple(t: SimpleType) -> Self {
        GroupId { factors: vec![t] }
    }

    pub fn product(factors: Vec<SimpleType>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::UnsupportedGroup(String::new()));
        }
        let g = GroupId { factors };
        if g.rank() > 3 {
            return Err(Error::UnsupportedGroup(g.to_string()));
        }
        Ok(g)
    }

    pub fn factors(&self) -> &[SimpleType] {
        &self.factors
    }

    pub fn is_simple(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn as_simple(&self) -> Result<SimpleType> {
        match self.factors.as_slice() {
            [t] => Ok(*t),
            _ => Err(Error::NotSimple(self.to_string())),
        }
    }

    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    /// `(factor, first coordinate index)` for every factor.
    pub fn factor_offsets(&self) -> Vec<(SimpleType, usize)> {
        let mut off = 0;
        self.factors
            .iter()
            .map(|&f| {
                let r = (f, off);
                off += f.rank();
                r
            })
            .collect()
    }

    pub fn data(&self) -> Arc<GroupData> {
        group_data(self)
    }
}

impl From<SimpleType> for GroupId {
    fn from(t: SimpleType) -> Self {
        GroupId::simple(t)
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.factors.iter().map(|t| t.name()).collect();
        f.write_str(&names.join("x"))
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace('×', "x");
        if lower.is_empty() {
            return Err(Error::UnsupportedGroup(s.to_string()));
        }
        let factors = lower
            .split('x')
            .map(|p| p.parse::<SimpleType>())
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::UnsupportedGroup(s.to_string()))?;
        GroupId::product(factors)
    }
}

impl Serialize for GroupId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Integer coordinates in the ω-basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The fundamental weight `ω_j` (0-based `j`).
    pub fn fundamental(rank: usize, j: usize) -> Self {
        let mut v = vec![0; rank];
        v[j] = 1;
        Weight(v)
    }

    pub fn rho(rank: usize) -> Self {
        Weight(vec![1; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_strictly_dominant(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        t.split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad weight `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Weight)
    }
}

impl From<Vec<i64>> for Weight {
    fn from(v: Vec<i64>) -> Self {
        Weight(v)
    }
}

/// A point of a Weyl orbit with the length of the shortest reflection word reaching it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitPoint {
    pub weight: Weight,
    pub depth: u32,
}

impl OrbitPoint {
    /// `(-1)^p(μ)`.
    pub fn sign(&self) -> i64 {
        if self.depth % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeylOrbit {
    pub seed: Weight,
    pub points: Vec<OrbitPoint>,
}

impl WeylOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points sorted lexicographically by coordinates, descending.
    pub fn sorted_points(&self) -> Vec<OrbitPoint> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| b.weight.cmp(&a.weight));
        pts
    }
}

/// Result of folding a weight into the dominant chamber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantRep {
    pub weight: Weight,
    /// Parity of the reflection word used, as `±1`.
    pub sign: i64,
    /// The weight is fixed by some reflection (its dominant representative lies on a wall),
    /// so alternating sums over its orbit vanish.
    pub on_wall: bool,
}

/// Metadata record of a (possibly product) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupData {
    pub id: GroupId,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    #[serde(serialize_with = "ser_rational_matrix")]
    pub cartan_inverse: Vec<Vec<Rational64>>,
    pub det: i64,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub level_vector: Vec<i64>,
    /// `None` for proper products.
    pub coxeter_number: Option<u32>,
    pub weyl_order: u64,
    #[serde(serialize_with = "ser_rational_vec")]
    pub fundamental_vertex_scalings: Vec<Rational64>,
}

fn ser_rational_vec<S: serde::Serializer>(
    v: &[Rational64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ser_rational_matrix<S: serde::Serializer>(
    m: &[Vec<Rational64>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(
        m.iter()
            .map(|row| row.iter().map(|r| r.to_string()).collect::<Vec<_>>()),
    )
}

fn block_diagonal(blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = vec![vec![0; n]; n];
    let mut off = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                out[off + i][off + j] = v;
            }
        }
        off += b.len();
    }
    out
}

/// Exact inverse and determinant of a small nonsingular integer matrix.
pub(crate) fn invert(m: &[Vec<i64>]) -> (Vec<Vec<Rational64>>, i64) {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .map(|r| r.iter().map(|&v| Rational64::from_integer(v)).collect())
        .collect();
    let mut inv: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational64::one() } else { Rational64::zero() })
                .collect()
        })
        .collect();
    let mut det = Rational64::one();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrices are nonsingular");
        if pivot != col {
            a.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * ac;
                    inv[r][j] -= f * ic;
                }
            }
        }
    }
    debug_assert!(det.is_integer());
    (inv, det.to_integer())
}

impl GroupData {
    fn build(id: &GroupId) -> GroupData {
        let factors = id.factors();
        let cartan = block_diagonal(&factors.iter().map(|f| f.cartan()).collect::<Vec<_>>());
        let (cartan_inverse, det) = invert(&cartan);
        let cat = |f: fn(SimpleType) -> Vec<i64>| -> Vec<i64> {
            factors.iter().flat_map(|&t| f(t)).collect()
        };
        let marks = cat(SimpleType::marks);
        GroupData {
            id: id.clone(),
            rank: id.rank(),
            cartan,
            cartan_inverse,
            det,
            fundamental_vertex_scalings: marks.iter().map(|&m| Rational64::new(1, m)).collect(),
            marks,
            comarks: cat(SimpleType::comarks),
            level_vector: cat(SimpleType::level_vector),
            coxeter_number: id.is_simple().then(|| factors[0].coxeter_number()),
            weyl_order: factors.iter().map(|f| f.weyl_order()).product(),
        }
    }

    fn check_rank(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: v.len() });
        }
        Ok(())
    }

    /// Simple reflection `r_j` (0-based `j`) of a weight: subtract `λ_j` times row `j` of the
    /// Cartan matrix.
    pub fn reflect(&self, j: usize, w: &Weight) -> Result<Weight> {
        self.check_rank(&w.0)?;
        if j >= self.rank {
            return Err(Error::IndexOutOfRange { index: j, rank: self.rank });
        }
        Ok(self.reflect_unchecked(j, w))
    }

    pub(crate) fn reflect_unchecked(&self, j: usize, w: &Weight) -> Weight {
        let lj = w.0[j];
        if lj == 0 {
            return w.clone();
        }
        Weight(
            w.0.iter()
                .zip(&self.cartan[j])
                .map(|(&l, &c)| l - lj * c)
                .collect(),
        )
    }

    /// Breadth-first closure of a dominant weight under the simple reflections.
    pub fn weyl_orbit(&self, seed: &Weight) -> Result<WeylOrbit> {
        self.check_rank(&seed.0)?;
        if !seed.is_dominant() {
            return Err(Error::NotDominant(seed.clone()));
        }
        let mut seen: HashMap<Weight, u32> = HashMap::new();
        let mut points = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(seed.clone(), 0);
        queue.push_back(seed.clone());
        while let Some(w) = queue.pop_front() {
            let depth = seen[&w];
            for j in 0..self.rank {
                if w.0[j] == 0 {
                    continue;
                }
                let r = self.reflect_unchecked(j, &w);
                if !seen.contains_key(&r) {
                    seen.insert(r.clone(), depth + 1);
                    queue.push_back(r);
                }
            }
            points.push(OrbitPoint { weight: w, depth });
        }
        Ok(WeylOrbit { seed: seed.clone(), points })
    }

    pub fn orbit_size(&self, seed: &Weight) -> Result<usize> {
        Ok(self.weyl_orbit(seed)?.len())
    }

    pub fn dominant_representative(&self, w: &Weight) -> Result<DominantRep> {
        self.check_rank(&w.0)?;
        Ok(self.dominant_unchecked(w))
    }

    pub(crate) fn dominant_unchecked(&self, w: &Weight) -> DominantRep {
        let mut cur = w.clone();
        let mut sign = 1;
        while let Some(j) = cur.0.iter().position(|&c| c < 0) {
            cur = self.reflect_unchecked(j, &cur);
            sign = -sign;
        }
        let on_wall = cur.0.iter().any(|&c| c == 0);
        DominantRep { weight: cur, sign, on_wall }
    }

    /// `x = C^{-1} t`: α̌-coordinates of the point with ω̌-coordinates `t`.
    pub fn omega_check_to_alpha_check(&self, t: &[Rational64]) -> Result<Vec<Rational64>> {
        if t.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: t.len() });
        }
        Ok(self
            .cartan_inverse
            .iter()
            .map(|row| row.iter().zip(t).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Float version of [`Self::omega_check_to_alpha_check`].
    pub fn omega_check_to_alpha_check_f64(&self, t: &[f64]) -> Vec<f64> {
        self.cartan_inverse
            .iter()
            .map(|row| row.iter().zip(t).map(|(a, b)| ratio_f64(a) * b).sum())
            .collect()
    }

    /// Coordinates of a weight in the α-basis.
    pub fn alpha_coordinates(&self, w: &Weight) -> Vec<Rational64> {
        (0..self.rank)
            .map(|k| {
                (0..self.rank)
                    .map(|j| self.cartan_inverse[j][k] * w.0[j])
                    .sum()
            })
            .collect()
    }

    /// Modified total degree `Σ a_j λ_j` of a label.
    pub fn level(&self, w: &Weight) -> i64 {
        self.level_vector.iter().zip(&w.0).map(|(a, l)| a * l).sum()
    }

    /// `Σ comarks_j λ_j`.
    pub fn colevel(&self, w: &Weight) -> i64 {
        self.comarks.iter().zip(&w.0).map(|(a, l)| a * l).sum()
    }

    pub fn congruence_class(&self, w: &Weight) -> Result<i64> {
        let t = self.id.as_simple()?;
        self.check_rank(&w.0)?;
        let l = &w.0;
        let c = match t {
            SimpleType::A1 => l[0],
            SimpleType::A2 => l[0] + 2 * l[1],
            SimpleType::A3 => l[0] + 2 * l[1] + 3 * l[2],
            SimpleType::B3 => l[2],
            SimpleType::C2 => l[0],
            SimpleType::C3 => l[0] + l[2],
            SimpleType::G2 => 0,
        };
        let modulus = match t {
            SimpleType::A2 => 3,
            SimpleType::A3 => 4,
            SimpleType::G2 => 1,
            _ => 2,
        };
        Ok(c.rem_euclid(modulus))
    }
}

pub(crate) fn ratio_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

static REGISTRY: OnceLock<RwLock<HashMap<GroupId, Arc<GroupData>>>> = OnceLock::new();

/// Shared, immutable metadata of a group.
pub fn group_data(g: &GroupId) -> Arc<GroupData> {
    let reg = REGISTRY.get_or_init(Default::default);
    if let Some(d) = reg.read().expect("registry poisoned").get(g) {
        return d.clone();
    }
    let d = Arc::new(GroupData::build(g));
    reg.write()
        .expect("registry poisoned")
        .entry(g.clone())
        .or_insert(d)
        .clone()
}

pub fn reflect(g: &GroupId, j: usize, w: &Weight) -> Result<Weight> {
    group_data(g).reflect(j, w)
}

pub fn weyl_orbit(g: &GroupId, seed: &Weight) -> Result<WeylOrbit> {
    group_data(g).weyl_orbit(seed)
}

pub fn dominant_representative(g: &GroupId, w: &Weight) -> Result<DominantRep> {
    group_data(g).dominant_representative(w)
}

pub fn omega_check_to_alpha_check(g: &GroupId, t: &[Rational64]) -> Result<Vec<Rational64>> {
    group_data(g).omega_check_to_alpha_check(t)
}

pub fn congruence_class(g: &GroupId, w: &Weight) -> Result<i64> {
    group_data(g).congruence_class(w)
}
