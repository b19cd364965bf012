//! Ky Fan alternating chains on lifted hemisphere covers, and the deep
//! points they certify.
//!
//! For an antipodal cover with a linear order, some `F_1 < ... < F_{d+2}`
//! has `F_1 ∩ -F_2 ∩ F_3 ∩ ...` nonempty. Applied to the cover by nonempty
//! `n`-wise intersections, ordered lexicographically by their index tuples,
//! a witness of such a chain lies in `ceil(d/2) + n` distinct base sets.

use std::collections::HashMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cover::{Cover, Region};
use crate::error::{Error, Result};
use crate::exact::{feasible_in, multiplicity_extrema, Sign};
use crate::geometry::{dot_exact, Direction};
use num_traits::Signed;

/// A hemisphere cover with a fixed linear order on its sets.
#[derive(Clone, Debug)]
pub struct OrderedCover {
    pub base: Cover,
    /// `order[r]` is the base index of the set of rank `r`.
    pub order: Vec<usize>,
}

impl OrderedCover {
    /// Construction order.
    pub fn identity(base: Cover) -> Self {
        let order = (0..base.len()).collect();
        OrderedCover { base, order }
    }

    pub fn new(base: Cover, order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; base.len()];
        if order.len() != base.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidParameter("order must be a permutation of the set indices".into()));
        }
        Ok(OrderedCover { base, order })
    }

    fn ranked_poles(&self) -> Result<Vec<Direction>> {
        let poles = self.base.poles()?;
        Ok(self.order.iter().map(|&i| poles[i].clone()).collect())
    }
}

/// A nonempty intersection of `n` base hemispheres.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedSet {
    /// Strictly increasing ranks in the base order.
    pub tuple: Vec<usize>,
    /// Base indices of the same sets.
    pub sets: Vec<usize>,
    pub witness: Direction,
}

/// All nonempty `n`-wise intersections, in lexicographic tuple order.
pub fn lift_cover(oc: &OrderedCover, n: usize) -> Result<Vec<LiftedSet>> {
    let poles = oc.ranked_poles()?;
    if n == 0 || n > poles.len() {
        return Err(Error::InvalidParameter(format!("cannot lift {} sets {n}-wise", poles.len())));
    }
    let ambient = oc.base.ambient();
    let mut out = Vec::new();
    for tuple in (0..poles.len()).combinations(n) {
        let subset: Vec<Direction> = tuple.iter().map(|&r| poles[r].clone()).collect();
        if let Some(w) = feasible_in(ambient, &subset, &vec![Sign::Pos; n], Region::Sphere)? {
            let sets = tuple.iter().map(|&r| oc.order[r]).collect();
            out.push(LiftedSet { tuple, sets, witness: w.x });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeepPoint {
    pub x: Direction,
    /// Distinct base indices whose hemispheres contain `x`.
    pub sets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KyFanCertificate {
    pub d: usize,
    pub n: usize,
    /// Positions in the lifted list.
    pub chain: Vec<usize>,
    /// Index tuples (ranks) of the chain's lifted sets.
    pub chain_tuples: Vec<Vec<usize>>,
    /// The same tuples as base set indices.
    pub chain_sets: Vec<Vec<usize>>,
    /// Lies in the odd-position chain sets and the negatives of the others.
    pub witness: Direction,
    pub deep_point: Option<DeepPoint>,
    pub count: usize,
    /// Whether the first tuple coordinates along the chain are all distinct.
    pub first_coordinates_distinct: bool,
    pub lp_calls: u64,
}

impl KyFanCertificate {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificates serialize")
    }
}

struct ChainSearch<'a> {
    poles: &'a [Direction],
    lifted: &'a [LiftedSet],
    ambient: usize,
    len: usize,
    memo: HashMap<Vec<(usize, bool)>, Option<Direction>>,
    lp_calls: u64,
    chain: Vec<usize>,
}

impl ChainSearch<'_> {
    /// Signed poles of the current chain: `(rank, positive)` pairs, or `None`
    /// when one pole is required on both sides.
    fn key(&self) -> Option<Vec<(usize, bool)>> {
        let mut key: Vec<(usize, bool)> = Vec::new();
        for (pos, &l) in self.chain.iter().enumerate() {
            let positive = pos % 2 == 0;
            for &r in &self.lifted[l].tuple {
                key.push((r, positive));
            }
        }
        key.sort_unstable();
        key.dedup();
        if key.windows(2).any(|w| w[0].0 == w[1].0) {
            return None;
        }
        Some(key)
    }

    fn feasible(&mut self) -> Result<Option<Direction>> {
        let Some(key) = self.key() else { return Ok(None) };
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let signed: Vec<Direction> =
            key.iter().map(|&(r, pos)| if pos { self.poles[r].clone() } else { self.poles[r].neg() }).collect();
        self.lp_calls += 1;
        let res = feasible_in(self.ambient, &signed, &vec![Sign::Pos; signed.len()], Region::Sphere)?.map(|w| w.x);
        self.memo.insert(key, res.clone());
        Ok(res)
    }

    fn dfs(&mut self, start: usize) -> Result<Option<Direction>> {
        let need = self.len - self.chain.len();
        for l in start..self.lifted.len() {
            if self.lifted.len() - l < need {
                break;
            }
            self.chain.push(l);
            if let Some(w) = self.feasible()? {
                if self.chain.len() == self.len {
                    return Ok(Some(w));
                }
                if let Some(found) = self.dfs(l + 1)? {
                    return Ok(Some(found));
                }
            }
            self.chain.pop();
        }
        Ok(None)
    }
}

/// First increasing `(d+2)`-chain of `lifted` with a nonempty alternating
/// intersection, in lexicographic order of chains.
pub fn find_chain(oc: &OrderedCover, lifted: &[LiftedSet], d: usize) -> Result<KyFanCertificate> {
    let poles = oc.ranked_poles()?;
    let ambient = oc.base.ambient();
    if ambient != d + 1 {
        return Err(Error::DimensionMismatch { expected: d + 1, got: ambient });
    }
    check_lift_covers(&poles, lifted, ambient)?;
    let mut search = ChainSearch {
        poles: &poles,
        lifted,
        ambient,
        len: d + 2,
        memo: HashMap::new(),
        lp_calls: 0,
        chain: Vec::new(),
    };
    let witness = search
        .dfs(0)?
        .ok_or_else(|| Error::Internal("no alternating chain exists although the lift is an antipodal cover".into()))?;
    let chain = search.chain.clone();
    let chain_tuples: Vec<Vec<usize>> = chain.iter().map(|&l| lifted[l].tuple.clone()).collect();
    let chain_sets: Vec<Vec<usize>> = chain.iter().map(|&l| lifted[l].sets.clone()).collect();
    let firsts: Vec<usize> = chain_tuples.iter().map(|t| t[0]).collect();
    if firsts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Internal(format!("consecutive chain sets share first coordinate: {firsts:?}")));
    }
    let first_coordinates_distinct = firsts.iter().all_unique();
    let n = lifted.first().map_or(0, |l| l.tuple.len());
    let cert = KyFanCertificate {
        d,
        n,
        chain,
        chain_tuples,
        chain_sets,
        witness,
        deep_point: None,
        count: 0,
        first_coordinates_distinct,
        lp_calls: search.lp_calls,
    };
    verify_chain(&poles, &cert)?;
    Ok(cert)
}

/// Random integer points must each lie in some lifted set.
fn check_lift_covers(poles: &[Direction], lifted: &[LiftedSet], ambient: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0fe);
    for _ in 0..64 {
        let c: Vec<i64> = (0..ambient).map(|_| rng.random_range(-997..=997)).collect();
        let Ok(x) = Direction::from_ints(&c) else { continue };
        let mut inside = false;
        for l in lifted {
            let mut all = true;
            for &r in &l.tuple {
                all &= dot_exact(&poles[r], &x)?.is_positive();
            }
            if all {
                inside = true;
                break;
            }
        }
        if !inside {
            return Err(Error::Precondition(format!("the lifted family misses the point {x}; input is not a cover")));
        }
    }
    Ok(())
}

fn verify_chain(poles: &[Direction], cert: &KyFanCertificate) -> Result<()> {
    for (pos, tuple) in cert.chain_tuples.iter().enumerate() {
        for &r in tuple {
            let v = dot_exact(&poles[r], &cert.witness)?;
            let ok = if pos % 2 == 0 { v.is_positive() } else { v.is_negative() };
            if !ok {
                return Err(Error::Internal(format!("witness fails chain position {pos}")));
            }
        }
    }
    Ok(())
}

/// Lifts an antipodal `n`-fold hemisphere cover, finds a chain, and reads
/// off a point in at least `ceil(d/2) + n` sets.
pub fn deep_point(cover: &Cover, n: usize) -> Result<KyFanCertificate> {
    deep_point_ordered(&OrderedCover::identity(cover.clone()), n)
}

pub fn deep_point_ordered(oc: &OrderedCover, n: usize) -> Result<KyFanCertificate> {
    let cover = &oc.base;
    if !cover.is_hemisphere_cover() {
        return Err(Error::Regime("chain search needs exact emptiness tests, so hemisphere covers only".into()));
    }
    let d = cover.dim();
    let fold = multiplicity_extrema(cover, Region::Sphere)?.min;
    if fold < n {
        return Err(Error::Precondition(format!("cover is only {fold}-fold, not {n}-fold")));
    }
    let lifted = lift_cover(oc, n)?;
    let mut cert = find_chain(oc, &lifted, d)?;
    // The witness lies in every odd-position set. Their first coordinates
    // are pairwise distinct; the last one contributes all n coordinates.
    let odd: Vec<&Vec<usize>> = cert.chain_tuples.iter().step_by(2).collect();
    let mut ranks: Vec<usize> = odd.iter().map(|t| t[0]).collect();
    ranks.extend(odd.last().expect("chains are nonempty").iter().copied());
    ranks.sort_unstable();
    ranks.dedup();
    let poles = oc.ranked_poles()?;
    for &r in &ranks {
        if !dot_exact(&poles[r], &cert.witness)?.is_positive() {
            return Err(Error::Internal(format!("deep point misses set of rank {r}")));
        }
    }
    let mut sets: Vec<usize> = ranks.iter().map(|&r| oc.order[r]).collect();
    sets.sort_unstable();
    cert.count = sets.len();
    cert.n = n;
    cert.deep_point = Some(DeepPoint { x: cert.witness.clone(), sets });
    let floor = d.div_ceil(2) + n;
    if cert.count < floor {
        return Err(Error::Internal(format!("deep point lies in {} sets, fewer than {floor}", cert.count)));
    }
    Ok(cert)
}

/// Independent re-check of a certificate against its cover.
pub fn verify_certificate(cover: &Cover, cert: &KyFanCertificate) -> Result<bool> {
    let poles = cover.poles()?;
    if cert.chain_tuples.len() != cover.dim() + 2 || !cert.chain_tuples.windows(2).all(|w| w[0] < w[1]) {
        return Ok(false);
    }
    if cert.chain_sets.len() != cert.chain_tuples.len() {
        return Ok(false);
    }
    for (pos, sets) in cert.chain_sets.iter().enumerate() {
        for &s in sets {
            let Some(p) = poles.get(s) else { return Ok(false) };
            let v = dot_exact(p, &cert.witness)?;
            if (pos % 2 == 0 && !v.is_positive()) || (pos % 2 == 1 && !v.is_negative()) {
                return Ok(false);
            }
        }
    }
    if let Some(dp) = &cert.deep_point {
        if !dp.sets.iter().all_unique() || dp.sets.len() != cert.count {
            return Ok(false);
        }
        for &s in &dp.sets {
            let Some(p) = poles.get(s) else { return Ok(false) };
            if !dot_exact(p, &dp.x)?.is_positive() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
