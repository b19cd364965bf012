//! Exact and approximate primitives on spheres.
//!
//! Sphere points come in two regimes. [`Direction`] is an unnormalized
//! rational vector: two directions are the same sphere point when one is a
//! positive multiple of the other, and every exact predicate in this crate is
//! invariant under such scaling. [`ApproxPoint`] is a unit binary64 vector used
//! wherever the data is irrational (regular simplices, geodesic radii).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{dot_f64, inverse_f64, norm_f64};

pub type Rat = num_rational::BigRational;

/// Default tolerance on `| |x| - 1 |` for approximate sphere points.
pub const UNIT_TOL: f64 = 1e-12;

/// Default sign-decision tolerance in the approximate regime.
pub const TAU: f64 = 1e-9;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical `p/q` text form (always with a denominator).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, rejecting non-reduced forms and non-positive denominators.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let (p, q) = s
        .split_once('/')
        .ok_or_else(|| Error::Schema(format!("rational {s:?} is not of the form p/q")))?;
    let p = BigInt::from_str(p.trim()).map_err(|e| Error::Schema(format!("{s:?}: {e}")))?;
    let q = BigInt::from_str(q.trim()).map_err(|e| Error::Schema(format!("{s:?}: {e}")))?;
    if !q.is_positive() {
        return Err(Error::Schema(format!("rational {s:?} needs a positive denominator")));
    }
    if !p.gcd(&q).eq(&BigInt::from(1)) {
        return Err(Error::Schema(format!("rational {s:?} is not in reduced form")));
    }
    Ok(Rat::new_raw(p, q))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// A nonzero rational vector standing for the sphere point `x / |x|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Direction(Vec<Rat>);

impl Direction {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if coords.iter().all(Zero::is_zero) {
            return Err(Error::ZeroDirection);
        }
        Ok(Direction(coords))
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| rat(c)).collect())
    }

    /// Unit basis vector `e_axis` in `R^ambient`.
    pub fn axis(ambient: usize, axis: usize) -> Self {
        let mut v = vec![Rat::zero(); ambient];
        v[axis] = rat(1);
        Direction(v)
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.0
    }

    /// Ambient dimension `d + 1` of the sphere `S^d` this point lives on.
    pub fn ambient(&self) -> usize {
        self.0.len()
    }

    pub fn last(&self) -> &Rat {
        self.0.last().expect("directions are nonempty")
    }

    pub fn neg(&self) -> Self {
        Direction(self.0.iter().map(|c| -c).collect())
    }

    pub fn scaled(&self, s: &Rat) -> Result<Self> {
        Direction::new(self.0.iter().map(|c| c * s).collect())
    }

    /// True when `other` is a positive multiple of `self`.
    pub fn sphere_eq(&self, other: &Direction) -> bool {
        if self.ambient() != other.ambient() {
            return false;
        }
        let Some(k) = self.0.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let s = &other.0[k] / &self.0[k];
        s.is_positive() && self.0.iter().zip(&other.0).all(|(a, b)| a * &s == *b)
    }

    pub fn to_approx(&self) -> ApproxPoint {
        ApproxPoint::normalized(self.0.iter().map(rat_to_f64).collect())
            .expect("nonzero rational direction normalizes")
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rat).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let coords = items.iter().map(|s| parse_rat(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Direction::new(coords)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if c.is_integer() {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())?;
            }
        }
        write!(f, ")")
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        Direction::from_strings(&items).map_err(serde::de::Error::custom)
    }
}

/// Exact inner product of the stored representatives. Only the sign carries
/// sphere meaning.
pub fn dot_exact(a: &Direction, b: &Direction) -> Result<Rat> {
    dot_coords(a.coords(), b.coords())
}

pub(crate) fn dot_coords(a: &[Rat], b: &[Rat]) -> Result<Rat> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y))
}

/// A binary64 point on the unit sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxPoint {
    pub coords: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    UNIT_TOL
}

impl ApproxPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::with_tol(coords, UNIT_TOL)
    }

    pub fn with_tol(coords: Vec<f64>, tol: f64) -> Result<Self> {
        let n = norm_f64(&coords);
        if !((n - 1.0).abs() <= tol) {
            return Err(Error::InvalidParameter(format!("point has norm {n}, not 1 within {tol}")));
        }
        Ok(ApproxPoint { coords, tol })
    }

    /// Normalizes any nonzero finite vector onto the sphere.
    pub fn normalized(coords: Vec<f64>) -> Result<Self> {
        let n = norm_f64(&coords);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroDirection);
        }
        Ok(ApproxPoint { coords: coords.iter().map(|c| c / n).collect(), tol: UNIT_TOL })
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }

    /// Exact float negation, so `x` and `-x` are bit-consistent antipodes.
    pub fn neg(&self) -> Self {
        ApproxPoint { coords: self.coords.iter().map(|c| -c).collect(), tol: self.tol }
    }

    pub fn last(&self) -> f64 {
        *self.coords.last().expect("points are nonempty")
    }

    pub fn dot(&self, other: &ApproxPoint) -> f64 {
        dot_f64(&self.coords, &other.coords)
    }
}

pub fn geodesic_distance(u: &ApproxPoint, v: &ApproxPoint) -> f64 {
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// Precomputed face projectors of a polyhedral cone for repeated
/// [`Cone::angle`] queries.
#[derive(Clone, Debug)]
pub struct Cone {
    dim: usize,
    generators: Vec<Vec<f64>>,
    faces: Vec<Face>,
}

#[derive(Clone, Debug)]
struct Face {
    members: Vec<usize>,
    gram_inv: Vec<Vec<f64>>,
}

impl Cone {
    /// Generators need not be normalized; linearly dependent subsets are
    /// skipped, since every point of their cone lies in an independent subcone.
    pub fn new(generators: &[Vec<f64>]) -> Result<Self> {
        let first = generators.first().ok_or(Error::EmptyGenerators)?;
        let dim = first.len();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: g.len() });
            }
            let n = norm_f64(g);
            if n == 0.0 {
                return Err(Error::ZeroDirection);
            }
            gens.push(g.iter().map(|c| c / n).collect::<Vec<f64>>());
        }
        let k = gens.len();
        let mut faces = Vec::new();
        for mask in 1u32..(1u32 << k) {
            let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            if members.len() > dim {
                continue;
            }
            let gram: Vec<Vec<f64>> = members
                .iter()
                .map(|&a| members.iter().map(|&b| dot_f64(&gens[a], &gens[b])).collect())
                .collect();
            if let Some(gram_inv) = inverse_f64(&gram, 1e-12) {
                faces.push(Face { members, gram_inv });
            }
        }
        Ok(Cone { dim, generators: gens, faces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Largest `<u, y>` over unit vectors `y` of the cone.
    pub fn max_dot(&self, u: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for g in &self.generators {
            best = best.max(dot_f64(u, g));
        }
        let mut rhs = Vec::with_capacity(self.dim);
        for face in &self.faces {
            if face.members.len() == 1 {
                continue;
            }
            rhs.clear();
            rhs.extend(face.members.iter().map(|&m| dot_f64(&self.generators[m], u)));
            let coef: Vec<f64> = face.gram_inv.iter().map(|row| dot_f64(row, &rhs)).collect();
            if coef.iter().any(|&c| c < -1e-12) {
                continue;
            }
            // <u, p> = |p|^2 for the orthogonal projection p, so the
            // normalized candidate scores |p|.
            let p2: f64 = coef.iter().zip(&rhs).map(|(c, r)| c * r).sum();
            if p2 > 1e-30 {
                best = best.max(p2.sqrt());
            }
        }
        best.min(1.0)
    }

    /// Geodesic distance from `u` to the radial projection of the cone.
    pub fn angle(&self, u: &[f64]) -> f64 {
        self.max_dot(u).clamp(-1.0, 1.0).acos()
    }
}

/// Geodesic distance from `u` to the spherical image of `cone(generators)`.
pub fn cone_angle(u: &ApproxPoint, generators: &[ApproxPoint]) -> Result<f64> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let gens: Vec<Vec<f64>> = generators.iter().map(|g| g.coords.clone()).collect();
    let cone = Cone::new(&gens)?;
    if cone.dim() != u.ambient() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), got: u.ambient() });
    }
    Ok(cone.angle(&u.coords))
}
