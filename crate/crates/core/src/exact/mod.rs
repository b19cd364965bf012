//! Exact multiplicity analysis of hemisphere covers.
//!
//! The multiplicity of a point only depends on its sign vector against the
//! central hyperplanes orthogonal to the poles, so the extrema over a region
//! are extrema over the realizable sign vectors. Realizability is decided by
//! an exact rational LP.

pub mod arc;
pub mod enumerate;
pub mod lp;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::Region;
use crate::error::{Error, Result};
use crate::geometry::{dot_coords, Direction, Rat};
use crate::linalg::nullspace;

pub use arc::{arc_sweep, ArcSweepReport};
pub use enumerate::{multiplicity_extrema, multiplicity_extrema_with, verify_claims, ClaimVerdict, ExactConfig, MultiplicityReport};
use lp::{Lp, LpOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    pub fn of(r: &Rat) -> Sign {
        if r.is_positive() {
            Sign::Pos
        } else if r.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }
}

/// Position of a point relative to the hyperplanes of a hemisphere cover.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn of_point(poles: &[Direction], x: &Direction) -> Result<Self> {
        poles.iter().map(|p| Ok(Sign::of(&dot_coords(p.coords(), x.coords())?))).collect::<Result<_>>().map(SignVector)
    }

    pub fn positives(&self) -> usize {
        self.0.iter().filter(|&&s| s == Sign::Pos).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Neg => "-",
                Sign::Zero => "0",
                Sign::Pos => "+",
            })?;
        }
        Ok(())
    }
}

/// A point realizing a sign pattern, with the margin the LP achieved on the
/// strict constraints (in the LP's own box normalization).
#[derive(Clone, Debug, PartialEq)]
pub struct LpWitness {
    pub x: Direction,
    pub margin: Rat,
}

/// Decides whether some `x != 0` in `region` has `sign(<q_i, x>) = signs[i]`
/// for every `i < signs.len()`; trailing poles are unconstrained.
pub fn feasible(poles: &[Direction], signs: &[Sign], region: Region) -> Result<Option<LpWitness>> {
    let ambient = poles.first().map(Direction::ambient).ok_or_else(|| Error::InvalidParameter("no poles".into()))?;
    feasible_in(ambient, poles, signs, region)
}

pub(crate) fn feasible_in(ambient: usize, poles: &[Direction], signs: &[Sign], region: Region) -> Result<Option<LpWitness>> {
    if signs.len() > poles.len() {
        return Err(Error::InvalidParameter("more signs than poles".into()));
    }
    for p in poles.iter().take(signs.len()) {
        if p.ambient() != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: p.ambient() });
        }
    }
    let up = Direction::axis(ambient, ambient - 1);

    let mut equalities: Vec<Vec<Rat>> = Vec::new();
    let mut strict: Vec<Vec<Rat>> = Vec::new();
    let mut weak: Vec<Vec<Rat>> = Vec::new();
    for (p, &s) in poles.iter().zip(signs) {
        match s {
            Sign::Zero => equalities.push(p.coords().to_vec()),
            Sign::Pos => strict.push(p.coords().to_vec()),
            Sign::Neg => strict.push(p.neg().into_coords()),
        }
    }
    match region {
        Region::Sphere => {}
        Region::OpenNorth => strict.push(up.coords().to_vec()),
        Region::OpenSouth => strict.push(up.neg().into_coords()),
        Region::ClosedNorth => weak.push(up.coords().to_vec()),
        Region::Equator => equalities.push(up.coords().to_vec()),
    }
    solve_cone(ambient, &equalities, &strict, &weak)
}

/// Finds `x != 0` with `<e, x> = 0`, `<s, x> > 0`, `<w, x> >= 0`.
pub(crate) fn solve_cone(
    ambient: usize,
    equalities: &[Vec<Rat>],
    strict: &[Vec<Rat>],
    weak: &[Vec<Rat>],
) -> Result<Option<LpWitness>> {
    debug_assert!(weak.len() <= 1, "only the region contributes a weak row");
    // Parametrize the solution space of the equalities: x = sum_j y_j K_j.
    let basis = if equalities.is_empty() { None } else { Some(nullspace(equalities, ambient)) };
    let k = basis.as_ref().map_or(ambient, Vec::len);
    if k == 0 {
        return Ok(None);
    }
    let reduce = |row: &Vec<Rat>| -> Vec<Rat> {
        match &basis {
            None => row.clone(),
            Some(b) => b.iter().map(|kv| dot_coords(kv, row).expect("same length")).collect(),
        }
    };
    let strict_r: Vec<Vec<Rat>> = strict.iter().map(reduce).collect();
    let weak_r: Vec<Vec<Rat>> = weak.iter().map(reduce).collect();
    if strict_r.iter().any(|r| r.iter().all(Zero::is_zero)) {
        return Ok(None);
    }
    let lift = |y: &[Rat]| -> Vec<Rat> {
        match &basis {
            None => y.to_vec(),
            Some(b) => {
                let mut x = vec![Rat::zero(); ambient];
                for (yj, kv) in y.iter().zip(b) {
                    if !yj.is_zero() {
                        for (xi, ki) in x.iter_mut().zip(kv) {
                            *xi += yj * ki;
                        }
                    }
                }
                x
            }
        }
    };

    if strict_r.is_empty() {
        // Any nonzero point of the subspace works; flip it onto the weak side.
        let mut y = vec![Rat::zero(); k];
        y[0] = Rat::one();
        for w in &weak_r {
            if w.iter().any(|c| !c.is_zero()) {
                // Pick a coordinate where the weak constraint is active.
                let j = w.iter().position(|c| !c.is_zero()).expect("nonzero row");
                y = vec![Rat::zero(); k];
                y[j] = if w[j].is_positive() { Rat::one() } else { -Rat::one() };
                break;
            }
        }
        let x = lift(&y);
        if weak.iter().all(|w| !dot_coords(w, &x).expect("same length").is_negative()) {
            return Ok(Some(LpWitness { x: primitive(x)?, margin: Rat::one() }));
        }
    }

    // Variables: y+ (k), y- (k), t. Maximize t.
    let nv = 2 * k + 1;
    let mut lp = Lp::new(nv);
    lp.c[2 * k] = Rat::one();
    let push_row = |row: &[Rat], with_t: bool, lp: &mut Lp| {
        let mut r = vec![Rat::zero(); nv];
        for j in 0..k {
            r[j] = -row[j].clone();
            r[k + j] = row[j].clone();
        }
        if with_t {
            r[2 * k] = Rat::one();
        }
        lp.push_le(r, Rat::zero());
    };
    for row in &strict_r {
        push_row(row, true, &mut lp);
    }
    for row in &weak_r {
        push_row(row, strict_r.is_empty(), &mut lp);
    }
    for j in 0..nv {
        let mut r = vec![Rat::zero(); nv];
        r[j] = Rat::one();
        lp.push_le(r, Rat::one());
    }
    match lp.solve() {
        LpOutcome::Optimal { z, value } if value.is_positive() => {
            let y: Vec<Rat> = (0..k).map(|j| &z[j] - &z[k + j]).collect();
            let x = lift(&y);
            if x.iter().all(Zero::is_zero) {
                return Err(Error::Internal("LP returned the zero vector with positive margin".into()));
            }
            Ok(Some(LpWitness { x: primitive(x)?, margin: value }))
        }
        LpOutcome::Optimal { .. } => Ok(None),
        LpOutcome::Unbounded => Err(Error::Internal("bounded LP reported unbounded".into())),
    }
}

/// Rescales a rational vector to coprime integers (same sphere point).
pub fn primitive(x: Vec<Rat>) -> Result<Direction> {
    let lcm = x.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = x.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Err(Error::ZeroDirection);
    }
    Direction::new(ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect())
}

/// Checks a witness against its sign pattern by substitution.
pub fn witness_satisfies(poles: &[Direction], signs: &[Sign], region: Region, x: &Direction) -> Result<bool> {
    for (p, &s) in poles.iter().zip(signs) {
        if Sign::of(&dot_coords(p.coords(), x.coords())?) != s {
            return Ok(false);
        }
    }
    Ok(region.contains_exact(x))
}
