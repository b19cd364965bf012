//! Depth-first sign-vector enumeration with LP prefix pruning and
//! branch-and-bound on the number of positive signs.

use itertools::Itertools;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{feasible_in, Sign};
use crate::cover::{Claims, Cover, Region};
use crate::error::{Error, Result};
use crate::geometry::{dot_coords, Direction, Rat};
use crate::linalg::nullspace;

#[derive(Clone, Debug)]
pub struct ExactConfig {
    /// Largest cover handled exactly.
    pub cap: usize,
    /// Prefix pruning and bounding; off means brute force over `{+,0,-}^N`.
    pub prune: bool,
    pub seed: u64,
    /// Random rational points used to initialize the incumbents.
    pub incumbent_samples: usize,
    /// Also seed the minimum from the arrangement's rays.
    pub vertex_seeding: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { cap: 14, prune: true, seed: 0x5eed, incumbent_samples: 64, vertex_seeding: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityReport {
    pub region: Region,
    pub min: usize,
    pub max: usize,
    pub min_witness: Direction,
    pub max_witness: Direction,
    pub cells_explored: u64,
    pub lp_calls: u64,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    region: &'static str,
    min: usize,
    max: usize,
    min_witness: &'a Direction,
    max_witness: &'a Direction,
    lp_calls: u64,
    cells_explored: u64,
    exact: bool,
}

impl MultiplicityReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            region: self.region.name(),
            min: self.min,
            max: self.max,
            min_witness: &self.min_witness,
            max_witness: &self.max_witness,
            lp_calls: self.lp_calls,
            cells_explored: self.cells_explored,
            exact: true,
        })
        .expect("report serializes")
    }
}

/// Exact min and max of `#{i : <q_i, x> > 0}` over `region`.
pub fn multiplicity_extrema(cover: &Cover, region: Region) -> Result<MultiplicityReport> {
    multiplicity_extrema_with(cover, region, &ExactConfig::default())
}

pub fn multiplicity_extrema_with(cover: &Cover, region: Region, config: &ExactConfig) -> Result<MultiplicityReport> {
    let poles = cover.poles()?;
    if poles.len() > config.cap {
        return Err(Error::OverCap { sets: poles.len(), cap: config.cap });
    }
    let ambient = cover.ambient();
    let report = if config.prune {
        let (min_inc, max_inc) = incumbents(&poles, ambient, region, config)?;
        let mut hi = Search::new(&poles, ambient, region, true, max_inc);
        hi.run()?;
        let (max, max_witness) = hi.best.ok_or_else(|| Error::Internal("region has no realizable cell".into()))?;
        let (min, min_witness, lo_leaves, lo_lps) = if region == Region::OpenNorth || region == Region::OpenSouth {
            let mut lo = Search::new(&poles, ambient, region, false, min_inc);
            lo.run()?;
            let (min, w) = lo.best.ok_or_else(|| Error::Internal("region has no realizable cell".into()))?;
            (min, w, lo.leaves, lo.lp_calls)
        } else {
            let (min, w, rays) = closed_region_min(&poles, ambient, region)?;
            (min, w, rays, 0)
        };
        MultiplicityReport {
            region,
            min,
            max,
            min_witness,
            max_witness,
            cells_explored: lo_leaves + hi.leaves,
            lp_calls: lo_lps + hi.lp_calls,
        }
    } else {
        brute_force(&poles, ambient, region)?
    };
    for (value, w) in [(report.min, &report.min_witness), (report.max, &report.max_witness)] {
        if !region.contains_exact(w) || count_positive(&poles, w)? != value {
            return Err(Error::Internal(format!("witness {w} does not reproduce multiplicity {value}")));
        }
    }
    Ok(report)
}

fn count_positive(poles: &[Direction], x: &Direction) -> Result<usize> {
    let mut c = 0;
    for p in poles {
        c += (Sign::of(&dot_coords(p.coords(), x.coords())?) == Sign::Pos) as usize;
    }
    Ok(c)
}

type Incumbent = Option<(usize, Direction)>;

fn incumbents(poles: &[Direction], ambient: usize, region: Region, config: &ExactConfig) -> Result<(Incumbent, Incumbent)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut candidates = Vec::new();
    for _ in 0..config.incumbent_samples {
        let mut c: Vec<i64> = (0..ambient).map(|_| rng.random_range(-1000..=1000)).collect();
        let last = c[ambient - 1].abs();
        c[ambient - 1] = match region {
            Region::Sphere => c[ambient - 1],
            Region::OpenNorth => last + 1,
            Region::ClosedNorth => last,
            Region::Equator => 0,
            Region::OpenSouth => -(last + 1),
        };
        if let Ok(x) = Direction::from_ints(&c) {
            candidates.push(x);
        }
    }
    let mut best_min: Incumbent = None;
    let mut best_max: Incumbent = None;
    let consider = |x: Direction, best_min: &mut Incumbent, best_max: &mut Incumbent| -> Result<()> {
        if !region.contains_exact(&x) {
            return Ok(());
        }
        let c = count_positive(poles, &x)?;
        if best_min.as_ref().is_none_or(|(b, _)| c < *b) {
            *best_min = Some((c, x.clone()));
        }
        if best_max.as_ref().is_none_or(|(b, _)| c > *b) {
            *best_max = Some((c, x));
        }
        Ok(())
    };
    for x in candidates {
        consider(x, &mut best_min, &mut best_max)?;
    }
    if config.vertex_seeding {
        for x in arrangement_rays(poles, ambient, region, 20_000) {
            let mut no_max = None;
            consider(x, &mut best_min, &mut no_max)?;
        }
    }
    Ok((best_min, best_max))
}

/// One-dimensional faces of the arrangement (plus the equator hyperplane for
/// the regions that touch it), capped at `limit` subsets.
fn arrangement_rays(poles: &[Direction], ambient: usize, region: Region, limit: usize) -> Vec<Direction> {
    let up = Direction::axis(ambient, ambient - 1);
    let (forced, optional): (Vec<Vec<Rat>>, Vec<Vec<Rat>>) = match region {
        Region::Equator => (vec![up.coords().to_vec()], poles.iter().map(|p| p.coords().to_vec()).collect()),
        Region::ClosedNorth | Region::Sphere => {
            let mut all: Vec<Vec<Rat>> = poles.iter().map(|p| p.coords().to_vec()).collect();
            if region == Region::ClosedNorth {
                all.push(up.coords().to_vec());
            }
            (Vec::new(), all)
        }
        Region::OpenNorth | Region::OpenSouth => return Vec::new(),
    };
    if ambient < 1 + forced.len() {
        return Vec::new();
    }
    let choose = ambient - 1 - forced.len();
    let mut out = Vec::new();
    for idx in (0..optional.len()).combinations(choose).take(limit) {
        let mut rows = forced.clone();
        rows.extend(idx.iter().map(|&i| optional[i].clone()));
        let ns = nullspace(&rows, ambient);
        if ns.len() == 1 {
            if let Ok(r) = Direction::new(ns[0].clone()) {
                out.push(r.neg());
                out.push(r);
            }
        }
    }
    out
}

/// Minimum over a closed region, read off the arrangement's rays.
///
/// Moving from a face to its boundary only turns signs into zeros, so the
/// count of positive signs is smallest on minimal faces. The faces inside a
/// closed region have their closures there too; when the hyperplanes meet
/// only in the origin those minimal faces are rays, and otherwise the common
/// line has no positive sign at all.
fn closed_region_min(poles: &[Direction], ambient: usize, region: Region) -> Result<(usize, Direction, u64)> {
    let mut rows: Vec<Vec<Rat>> = poles.iter().map(|p| p.coords().to_vec()).collect();
    if region != Region::Sphere {
        rows.push(Direction::axis(ambient, ambient - 1).coords().to_vec());
    }
    if let Some(line) = nullspace(&rows, ambient).into_iter().next() {
        let x = Direction::new(line)?;
        return Ok((0, x, 0));
    }
    let mut best: Option<(usize, Direction)> = None;
    let mut rays = 0u64;
    for x in arrangement_rays(poles, ambient, region, usize::MAX) {
        if !region.contains_exact(&x) {
            continue;
        }
        rays += 1;
        let c = count_positive(poles, &x)?;
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, x));
        }
    }
    let (c, x) = best.ok_or_else(|| Error::Internal("arrangement has no ray in the region".into()))?;
    Ok((c, x, rays))
}

struct Search<'a> {
    poles: &'a [Direction],
    ambient: usize,
    region: Region,
    maximize: bool,
    best: Incumbent,
    lp_calls: u64,
    leaves: u64,
    signs: Vec<Sign>,
    /// Poles parallel to the last axis, which vanish on the equator.
    vertical: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(poles: &'a [Direction], ambient: usize, region: Region, maximize: bool, best: Incumbent) -> Self {
        let vertical = poles.iter().map(|p| p.coords()[..ambient - 1].iter().all(|c| c.is_zero())).collect();
        Search { poles, ambient, region, maximize, best, lp_calls: 0, leaves: 0, signs: Vec::new(), vertical }
    }

    fn run(&mut self) -> Result<()> {
        self.lp_calls += 1;
        let Some(root) = feasible_in(self.ambient, self.poles, &[], self.region)? else {
            return Err(Error::Internal("region is empty".into()));
        };
        self.dfs(0, &root.x)
    }

    fn pruned(&self, positives: usize, depth: usize) -> bool {
        let Some((best, _)) = &self.best else { return false };
        if self.maximize {
            positives + (self.poles.len() - depth) <= *best
        } else {
            positives >= *best
        }
    }

    fn dfs(&mut self, positives: usize, witness: &Direction) -> Result<()> {
        let depth = self.signs.len();
        if depth == self.poles.len() {
            self.leaves += 1;
            let better = match &self.best {
                None => true,
                Some((b, _)) => (self.maximize && positives > *b) || (!self.maximize && positives < *b),
            };
            if better {
                self.best = Some((positives, witness.clone()));
            }
            return Ok(());
        }
        // A generic nudge inside the region turns zeros into nonzero signs
        // without losing a positive one, so the maximum lives on open cells.
        let order: &[Sign] = if !self.maximize {
            &[Sign::Neg, Sign::Pos, Sign::Zero]
        } else if self.region == Region::Equator && self.vertical[depth] {
            &[Sign::Zero]
        } else {
            &[Sign::Pos, Sign::Neg]
        };
        let current = Sign::of(&dot_coords(self.poles[depth].coords(), witness.coords())?);
        for &s in order {
            let child_pos = positives + (s == Sign::Pos) as usize;
            if self.pruned(child_pos, depth + 1) {
                continue;
            }
            self.signs.push(s);
            let next = if s == current {
                Some(witness.clone())
            } else {
                self.lp_calls += 1;
                feasible_in(self.ambient, self.poles, &self.signs, self.region)?.map(|w| w.x)
            };
            if let Some(w) = next {
                self.dfs(child_pos, &w)?;
            }
            self.signs.pop();
        }
        Ok(())
    }
}

/// Every sign vector in `{+,0,-}^N`, one LP each; the oracle for pruning.
fn brute_force(poles: &[Direction], ambient: usize, region: Region) -> Result<MultiplicityReport> {
    let n = poles.len();
    let all = [Sign::Neg, Sign::Zero, Sign::Pos];
    let mut digits = vec![0usize; n];
    let mut lo: Incumbent = None;
    let mut hi: Incumbent = None;
    let (mut lp_calls, mut cells) = (0u64, 0u64);
    loop {
        let signs: Vec<Sign> = digits.iter().map(|&d| all[d]).collect();
        lp_calls += 1;
        if let Some(w) = feasible_in(ambient, poles, &signs, region)? {
            cells += 1;
            let c = signs.iter().filter(|&&s| s == Sign::Pos).count();
            if lo.as_ref().is_none_or(|(b, _)| c < *b) {
                lo = Some((c, w.x.clone()));
            }
            if hi.as_ref().is_none_or(|(b, _)| c > *b) {
                hi = Some((c, w.x));
            }
        }
        let mut i = 0;
        while i < n && digits[i] == 2 {
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        digits[i] += 1;
    }
    let (min, min_witness) = lo.ok_or_else(|| Error::Internal("no realizable cell".into()))?;
    let (max, max_witness) = hi.ok_or_else(|| Error::Internal("no realizable cell".into()))?;
    Ok(MultiplicityReport { region, min, max, min_witness, max_witness, cells_explored: cells, lp_calls })
}

/// Outcome of checking one claimed property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimVerdict {
    pub claim: String,
    pub region: Option<&'static str>,
    pub required: Option<u32>,
    pub observed: Option<usize>,
    pub pass: bool,
    pub reason: String,
    pub witness: Option<Direction>,
}

/// Checks `claims` against the exact extrema of a hemisphere cover.
pub fn verify_claims(cover: &Cover, claims: &Claims) -> Result<Vec<ClaimVerdict>> {
    verify_claims_with(cover, claims, &ExactConfig::default())
}

pub fn verify_claims_with(cover: &Cover, claims: &Claims, config: &ExactConfig) -> Result<Vec<ClaimVerdict>> {
    claims.validate()?;
    let mut out = Vec::new();
    let mut check = |region: Region, required: u32| -> Result<()> {
        let r = multiplicity_extrema_with(cover, region, config)?;
        let pass = r.min >= required as usize;
        out.push(ClaimVerdict {
            claim: format!("{required}-fold over {}", region.name()),
            region: Some(region.name()),
            required: Some(required),
            observed: Some(r.min),
            pass,
            reason: if pass {
                format!("exact minimum {} >= {required}", r.min)
            } else {
                format!("point {} is covered only {} times", r.min_witness, r.min)
            },
            witness: Some(r.min_witness),
        });
        Ok(())
    };
    check(Region::Sphere, claims.n)?;
    if let Some((region, m)) = claims.north_region() {
        check(region, m)?;
    }
    out.push(ClaimVerdict {
        claim: "antipodal-free".into(),
        region: None,
        required: None,
        observed: None,
        pass: true,
        reason: "open hemispheres contain no antipodal pair".into(),
        witness: None,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{CoverSet, Provenance};

    fn cover(dim: usize, poles: &[&[i64]]) -> Cover {
        let sets = poles.iter().map(|p| CoverSet::hemisphere(Direction::from_ints(p).unwrap())).collect();
        Cover::new(dim, sets, Claims::fold(1), Provenance::named("test")).unwrap()
    }

    #[test]
    fn single_hemisphere_extrema() {
        let c = cover(2, &[&[0, 0, 1]]);
        let r = multiplicity_extrema(&c, Region::Sphere).unwrap();
        assert_eq!((r.min, r.max), (0, 1));
    }

    #[test]
    fn gale_1_1_extrema() {
        let c = cover(1, &[&[-1, -1], &[1, 2], &[-1, -3]]);
        let r = multiplicity_extrema(&c, Region::Sphere).unwrap();
        assert_eq!((r.min, r.max), (1, 2));
    }

    #[test]
    fn over_cap_rejected() {
        let poles: Vec<Vec<i64>> = (0..15).map(|i| vec![1, i]).collect();
        let refs: Vec<&[i64]> = poles.iter().map(|p| p.as_slice()).collect();
        assert!(matches!(multiplicity_extrema(&cover(1, &refs), Region::Sphere), Err(Error::OverCap { .. })));
    }

    #[test]
    fn regions_on_axis_cover() {
        // Northern hemisphere plus one equatorial pole.
        let c = cover(2, &[&[0, 0, 1], &[1, 0, 0]]);
        let north = multiplicity_extrema(&c, Region::OpenNorth).unwrap();
        assert_eq!((north.min, north.max), (1, 2));
        let eq = multiplicity_extrema(&c, Region::Equator).unwrap();
        assert_eq!((eq.min, eq.max), (0, 1));
        let closed = multiplicity_extrema(&c, Region::ClosedNorth).unwrap();
        assert_eq!((closed.min, closed.max), (0, 2));
        let south = multiplicity_extrema(&c, Region::OpenSouth).unwrap();
        assert_eq!((south.min, south.max), (0, 1));
    }

    #[test]
    fn pruning_matches_brute_force() {
        let c = cover(2, &[&[1, 2, 0], &[-1, 1, 1], &[0, -1, 3], &[2, 1, -1], &[-1, -1, -1]]);
        let brute = ExactConfig { prune: false, ..Default::default() };
        for region in Region::ALL {
            let a = multiplicity_extrema(&c, region).unwrap();
            let b = multiplicity_extrema_with(&c, region, &brute).unwrap();
            assert_eq!((a.min, a.max), (b.min, b.max), "{region:?}");
        }
    }

    #[test]
    fn circle_equator_uses_axis_points() {
        let c = cover(1, &[&[-1, -1], &[1, 2], &[-1, -3]]);
        let r = multiplicity_extrema(&c, Region::Equator).unwrap();
        let brute = multiplicity_extrema_with(&c, Region::Equator, &ExactConfig { prune: false, ..Default::default() }).unwrap();
        assert_eq!((r.min, r.max), (brute.min, brute.max));
    }

    #[test]
    fn degenerate_arrangement_has_zero_minimum() {
        let c = cover(2, &[&[1, 0, 0], &[-1, 0, 0]]);
        for region in [Region::Sphere, Region::ClosedNorth, Region::Equator] {
            assert_eq!(multiplicity_extrema(&c, region).unwrap().min, 0);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn pruned_search_matches_brute_force_randomly(
            poles in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..5),
        ) {
            proptest::prop_assume!(poles.iter().all(|p| p.iter().any(|&c| c != 0)));
            let refs: Vec<&[i64]> = poles.iter().map(|p| p.as_slice()).collect();
            let c = cover(2, &refs);
            let brute = ExactConfig { prune: false, ..Default::default() };
            for region in Region::ALL {
                let a = multiplicity_extrema(&c, region).unwrap();
                let b = multiplicity_extrema_with(&c, region, &brute).unwrap();
                proptest::prop_assert_eq!((a.min, a.max), (b.min, b.max), "{:?}", region);
            }
        }
    }

    #[test]
    fn claim_failure_names_a_witness() {
        let c = cover(1, &[&[-1, -1], &[1, 2], &[-1, -3]]);
        let v = verify_claims(&c, &Claims::open_north(1, 2)).unwrap();
        assert!(v[0].pass);
        assert!(!v[1].pass);
        let w = v[1].witness.as_ref().unwrap();
        assert_eq!(c.multiplicity_at(w).unwrap(), 1);
    }
}
