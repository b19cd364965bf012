//! Seeded, stratified sampling verification. A PASS here only means no
//! counterexample was found among the samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::constructions::belt::{deep_strata, BeltGeometry};
use crate::constructions::simplex_frame;
use crate::cover::{Cover, CoverSet, Evaluation, PredicateSet, Region};
use crate::error::{Error, Result};
use crate::geometry::{ApproxPoint, TAU};
use crate::linalg::{dot_f64, norm_f64};

/// Where a stratum draws its points from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stratum {
    Uniform,
    /// `|x_{d+1}| < half_height`.
    Belt { half_height: f64 },
    /// Within `radius` of the deep strata of the equatorial simplex.
    Tube { radius: f64 },
    /// `x_{d+1} = 0` exactly.
    Equator,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub total: usize,
    pub strata: Vec<(Stratum, f64)>,
    pub includes_antipodes: bool,
}

impl SamplePlan {
    pub fn uniform(seed: u64, total: usize) -> Self {
        SamplePlan { seed, total, strata: vec![(Stratum::Uniform, 1.0)], includes_antipodes: true }
    }

    /// Default mixture: belt-construction covers get extra weight near the
    /// slabs, the deep strata and the equator.
    pub fn for_cover(cover: &Cover, seed: u64, total: usize) -> Self {
        let strata = match belt_geometry(cover) {
            Some(g) => {
                let p = g.params();
                vec![
                    (Stratum::Uniform, 0.4),
                    (Stratum::Belt { half_height: 2.0 * p.heights().1 }, 0.3),
                    (Stratum::Tube { radius: 2.0 * p.eps2 }, 0.15),
                    (Stratum::Equator, 0.15),
                ]
            }
            None => vec![(Stratum::Uniform, 0.7), (Stratum::Equator, 0.3)],
        };
        SamplePlan { seed, total, strata, includes_antipodes: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total < 1 {
            return Err(Error::InvalidParameter("a sample plan needs at least one sample".into()));
        }
        if self.strata.iter().any(|(_, f)| f.is_nan() || *f < 0.0) {
            return Err(Error::InvalidParameter("stratum fractions must be nonnegative".into()));
        }
        let sum: f64 = self.strata.iter().map(|(_, f)| f).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("stratum fractions sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Sample counts per stratum; rounding leftovers go to the first one.
    fn counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = self.strata.iter().map(|(_, f)| (f * self.total as f64).floor() as usize).collect();
        let used: usize = counts.iter().sum();
        counts[0] += self.total - used.min(self.total);
        counts
    }

    fn stratum_of(&self, counts: &[usize], k: usize) -> Stratum {
        let mut acc = 0;
        for (c, (s, _)) in counts.iter().zip(&self.strata) {
            acc += c;
            if k < acc {
                return *s;
            }
        }
        self.strata.last().expect("validated nonempty").0
    }
}

/// Generator of the `k`-th sample; each index owns an independent stream.
fn rng_for(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn gaussian_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm_f64(&v);
        if n > 1e-12 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Random point of `cone(gens)` pushed along a random tangent direction by
/// an angle of at most `radius`.
fn tube_point(rng: &mut ChaCha8Rng, gens: &[Vec<f64>], dim: usize, radius: f64) -> Vec<f64> {
    let mut a = vec![0.0; dim];
    for g in gens {
        let w: f64 = Exp1.sample(rng);
        for (ac, gc) in a.iter_mut().zip(g) {
            *ac += w * gc;
        }
    }
    let n = norm_f64(&a);
    a.iter_mut().for_each(|c| *c /= n);
    let mut t = gaussian_unit(rng, dim);
    let along = dot_f64(&t, &a);
    t.iter_mut().zip(&a).for_each(|(tc, ac)| *tc -= along * ac);
    let tn = norm_f64(&t);
    if tn < 1e-12 {
        return a;
    }
    let theta = rng.random::<f64>() * radius;
    a.iter().zip(&t).map(|(ac, tc)| theta.cos() * ac + theta.sin() * tc / tn).collect()
}

fn draw(d: usize, stratum: Stratum, rng: &mut ChaCha8Rng, strata: &[Vec<Vec<f64>>]) -> Vec<f64> {
    let dim = d + 1;
    match stratum {
        Stratum::Uniform => gaussian_unit(rng, dim),
        Stratum::Equator => {
            let mut u = gaussian_unit(rng, d);
            u.push(0.0);
            u
        }
        Stratum::Belt { half_height } => {
            let b = half_height.min(1.0);
            let h = (2.0 * rng.random::<f64>() - 1.0) * b;
            let s = (1.0 - h * h).sqrt();
            let mut x: Vec<f64> = gaussian_unit(rng, d).into_iter().map(|c| c * s).collect();
            x.push(h);
            x
        }
        Stratum::Tube { radius } => {
            if strata.is_empty() {
                return gaussian_unit(rng, dim);
            }
            let which = rng.random_range(0..strata.len());
            let lifted: Vec<Vec<f64>> = strata[which].iter().map(|g| [g.as_slice(), &[0.0]].concat()).collect();
            tube_point(rng, &lifted, dim, radius)
        }
    }
}

/// Generators of the deep strata, on `S^{d-1}`.
fn strata_generators(d: usize) -> Vec<Vec<Vec<f64>>> {
    if d < 2 {
        return Vec::new();
    }
    let raw = simplex_frame(d).expect("d >= 2").raw_vertices();
    deep_strata(d).into_iter().map(|g| g.into_iter().map(|k| raw[k].clone()).collect()).collect()
}

/// The `k`-th point of the plan on `S^d`.
pub fn sample_at(d: usize, plan: &SamplePlan, k: usize) -> ApproxPoint {
    let strata = strata_generators(d);
    let counts = plan.counts();
    point_at(d, plan, &counts, &strata, k)
}

fn point_at(d: usize, plan: &SamplePlan, counts: &[usize], strata: &[Vec<Vec<f64>>], k: usize) -> ApproxPoint {
    let mut rng = rng_for(plan.seed, k);
    let coords = draw(d, plan.stratum_of(counts, k), &mut rng, strata);
    ApproxPoint { coords, tol: crate::geometry::UNIT_TOL }
}

/// The plan's points in index order.
pub fn sample_sphere(d: usize, plan: &SamplePlan) -> Result<impl Iterator<Item = ApproxPoint> + '_> {
    plan.validate()?;
    let strata = strata_generators(d);
    let counts = plan.counts();
    Ok((0..plan.total).map(move |k| point_at(d, plan, &counts, &strata, k)))
}

fn belt_geometry(cover: &Cover) -> Option<&BeltGeometry> {
    cover.sets().iter().find_map(|s| match s {
        CoverSet::Predicate(PredicateSet::Belt { geometry, .. }) => Some(geometry.as_ref()),
        _ => None,
    })
}

/// What a sampled cover must satisfy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Requirements {
    pub sphere_min: usize,
    pub north: Option<(Region, usize)>,
    pub antipodal_free: bool,
    /// Largest allowed count of closed equatorial facet sets.
    pub equator_f_max: Option<usize>,
}

impl Requirements {
    pub fn from_claims(cover: &Cover) -> Self {
        let c = cover.claims();
        let belt = belt_geometry(cover).is_some();
        Requirements {
            sphere_min: c.n as usize,
            north: c.north_region().map(|(r, m)| (r, m as usize)),
            antipodal_free: true,
            equator_f_max: belt.then(|| cover.dim().div_ceil(2)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleWitness {
    pub index: usize,
    /// Whether the point is the negation of sample `index`.
    pub antipode: bool,
    pub point: Vec<f64>,
    pub members: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionStats {
    pub region: &'static str,
    pub samples: usize,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub min_witness: Option<SampleWitness>,
    pub max_witness: Option<SampleWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: &'static str,
    pub index: usize,
    pub antipode: bool,
    pub point: Vec<f64>,
    pub set: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingReport {
    pub exact: bool,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
    pub samples_evaluated: usize,
    pub boundary_ambiguous: usize,
    pub requirements: Requirements,
    pub regions: Vec<RegionStats>,
    pub antipodal_violations: usize,
    pub equator_f_max: Option<usize>,
    pub violation_count: usize,
    /// First violations by sample index.
    pub violations: Vec<Violation>,
    pub verdict: &'static str,
    pub note: &'static str,
}

impl SamplingReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn region(&self, region: Region) -> Option<&RegionStats> {
        self.regions.iter().find(|r| r.region == region.name())
    }

    pub fn ambiguous_fraction(&self) -> f64 {
        self.boundary_ambiguous as f64 / self.samples_evaluated.max(1) as f64
    }
}

const KEEP_VIOLATIONS: usize = 32;
const CHUNK: usize = 2048;

/// (count, index, antipode, point, members) of a regional extremum.
type Extreme = Option<(usize, usize, bool, Vec<f64>, Vec<bool>)>;

#[derive(Clone, Debug, Default)]
struct Acc {
    evaluated: usize,
    ambiguous: usize,
    // (count, index, antipode) keyed extrema per region.
    min: [Extreme; 5],
    max: [Extreme; 5],
    region_samples: [usize; 5],
    antipodal: usize,
    equator_f_max: Option<usize>,
    violation_count: usize,
    violations: Vec<Violation>,
}

impl Acc {
    fn merge(mut self, o: Acc) -> Acc {
        self.evaluated += o.evaluated;
        self.ambiguous += o.ambiguous;
        for r in 0..5 {
            self.region_samples[r] += o.region_samples[r];
            self.min[r] = pick(self.min[r].take(), o.min[r].clone(), |a, b| (a.0, a.1, a.2) < (b.0, b.1, b.2));
            self.max[r] = pick(self.max[r].take(), o.max[r].clone(), |a, b| (a.0, std::cmp::Reverse((a.1, a.2))) > (b.0, std::cmp::Reverse((b.1, b.2))));
        }
        self.antipodal += o.antipodal;
        self.equator_f_max = match (self.equator_f_max, o.equator_f_max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.violation_count += o.violation_count;
        self.violations.extend(o.violations);
        self.violations.sort_by_key(|v| (v.index, v.antipode));
        self.violations.truncate(KEEP_VIOLATIONS);
        self
    }

    fn violation(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < KEEP_VIOLATIONS {
            self.violations.push(v);
        }
    }
}

fn pick<T>(a: Option<T>, b: Option<T>, better: impl Fn(&T, &T) -> bool) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
        (a, b) => a.or(b),
    }
}

struct Checker<'a> {
    cover: &'a Cover,
    req: &'a Requirements,
    belt: Option<&'a BeltGeometry>,
    tau: f64,
}

impl Checker<'_> {
    fn record(&self, acc: &mut Acc, index: usize, antipode: bool, x: &ApproxPoint, ev: &Evaluation) {
        let count = ev.count();
        let h = x.last();
        for (r, region) in Region::ALL.iter().enumerate() {
            if !region.contains_height(h) {
                continue;
            }
            acc.region_samples[r] += 1;
            let entry = (count, index, antipode, x.coords.clone(), ev.members.clone());
            acc.min[r] = pick(acc.min[r].take(), Some(entry.clone()), |a, b| (a.0, a.1, a.2) < (b.0, b.1, b.2));
            acc.max[r] = pick(acc.max[r].take(), Some(entry), |a, b| (a.0, std::cmp::Reverse((a.1, a.2))) > (b.0, std::cmp::Reverse((b.1, b.2))));
        }
        let fail = |kind: &'static str, set: Option<usize>, detail: String| Violation {
            kind,
            index,
            antipode,
            point: x.coords.clone(),
            set,
            detail,
        };
        if count < self.req.sphere_min {
            acc.violation(fail("sphere_fold", None, format!("multiplicity {count} < {}", self.req.sphere_min)));
        }
        if let Some((region, m)) = self.req.north {
            if region.contains_height(h) && count < m {
                acc.violation(fail("north_fold", None, format!("multiplicity {count} < {m} on {}", region.name())));
            }
        }
    }

    fn check(&self, plan: &SamplePlan, counts: &[usize], strata: &[Vec<Vec<f64>>], range: std::ops::Range<usize>) -> Acc {
        let d = self.cover.dim();
        let mut acc = Acc::default();
        for k in range {
            let x = point_at(d, plan, counts, strata, k);
            let ev = self.cover.evaluate(&x).expect("plan points match the cover dimension");
            let neg = plan.includes_antipodes.then(|| x.neg());
            let ev_neg = neg.as_ref().map(|n| self.cover.evaluate(n).expect("same dimension"));
            let eq = self.belt.zip(equatorial_direction(d, &x, self.tau));
            let eq_sets = eq.as_ref().map(|(g, u)| {
                let minus: Vec<f64> = u.iter().map(|c| -c).collect();
                (g.equator_sets(u), g.equator_sets(&minus))
            });
            let mut margin = ev.margin.min(ev_neg.as_ref().map_or(f64::INFINITY, |e| e.margin));
            if let Some((a, b)) = &eq_sets {
                margin = margin.min(a.margin()).min(b.margin());
            }
            acc.evaluated += 1;
            if margin < self.tau {
                acc.ambiguous += 1;
                continue;
            }
            self.record(&mut acc, k, false, &x, &ev);
            if let (Some(n), Some(en)) = (&neg, &ev_neg) {
                self.record(&mut acc, k, true, n, en);
                if self.req.antipodal_free {
                    for (i, (a, b)) in ev.members.iter().zip(&en.members).enumerate() {
                        if *a && *b {
                            acc.antipodal += 1;
                            acc.violation(Violation {
                                kind: "antipodal",
                                index: k,
                                antipode: false,
                                point: x.coords.clone(),
                                set: Some(i),
                                detail: "set holds x and -x".into(),
                            });
                        }
                    }
                }
            }
            if let (Some((a, b)), Some(limit)) = (&eq_sets, self.req.equator_f_max) {
                let here = a.f_closure_count();
                acc.equator_f_max = Some(acc.equator_f_max.map_or(here, |m| m.max(here)));
                if here > limit {
                    acc.violation(Violation {
                        kind: "equator_overlap",
                        index: k,
                        antipode: false,
                        point: x.coords.clone(),
                        set: None,
                        detail: format!("{here} closed facet sets meet at the equatorial direction, limit {limit}"),
                    });
                }
                // Northern points lose a facet set only to the closure of an antipodal slab.
                let dd = d + 1;
                for (pt, e, mirror, anti) in [(&x, &ev, b, false)].into_iter().chain(
                    neg.as_ref().zip(ev_neg.as_ref()).map(|(n, en)| (n, en, a, true)),
                ) {
                    if pt.last() > 0.0 {
                        let have = e.members[..dd].iter().filter(|&&m| m).count();
                        let floor = dd.saturating_sub(mirror.f_closure_count());
                        if have < floor {
                            acc.violation(Violation {
                                kind: "propagation",
                                index: k,
                                antipode: anti,
                                point: pt.coords.clone(),
                                set: None,
                                detail: format!("{have} facet extensions, expected at least {floor}"),
                            });
                        }
                    }
                }
            }
        }
        acc
    }
}

fn equatorial_direction(d: usize, x: &ApproxPoint, tau: f64) -> Option<Vec<f64>> {
    let head = &x.coords[..d];
    let n = norm_f64(head);
    (n > tau).then(|| head.iter().map(|c| c / n).collect())
}

/// Evaluates every sample of `plan` against `req`.
pub fn verify_sampled(cover: &Cover, plan: &SamplePlan, req: &Requirements) -> Result<SamplingReport> {
    plan.validate()?;
    let belt = belt_geometry(cover);
    let tau = belt.map_or(TAU, |g| g.params().tau);
    let checker = Checker { cover, req, belt, tau };
    let d = cover.dim();
    let strata = strata_generators(d);
    let counts = plan.counts();
    let chunks: Vec<std::ops::Range<usize>> =
        (0..plan.total).step_by(CHUNK).map(|s| s..(s + CHUNK).min(plan.total)).collect();
    let run = |r: &std::ops::Range<usize>| checker.check(plan, &counts, &strata, r.clone());
    #[cfg(feature = "parallel")]
    let parts: Vec<Acc> = {
        use rayon::prelude::*;
        chunks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Acc> = chunks.iter().map(run).collect();
    let acc = parts.into_iter().fold(Acc::default(), Acc::merge);
    let witness = |e: &Extreme| {
        e.as_ref().map(|(_, index, antipode, point, members)| SampleWitness {
            index: *index,
            antipode: *antipode,
            point: point.clone(),
            members: members.clone(),
        })
    };
    let regions = Region::ALL
        .iter()
        .enumerate()
        .map(|(r, region)| RegionStats {
            region: region.name(),
            samples: acc.region_samples[r],
            min: acc.min[r].as_ref().map(|e| e.0),
            max: acc.max[r].as_ref().map(|e| e.0),
            min_witness: witness(&acc.min[r]),
            max_witness: witness(&acc.max[r]),
        })
        .collect();
    Ok(SamplingReport {
        exact: false,
        seed: plan.seed,
        m: plan.total,
        samples_evaluated: acc.evaluated,
        boundary_ambiguous: acc.ambiguous,
        requirements: req.clone(),
        regions,
        antipodal_violations: acc.antipodal,
        equator_f_max: acc.equator_f_max,
        violation_count: acc.violation_count,
        violations: acc.violations,
        verdict: if acc.violation_count == 0 { "PASS" } else { "FAIL" },
        note: "sampling can falsify claims but never proves them",
    })
}

/// Equatorial preconditions of the belt construction on `S^{d-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquatorCheck {
    pub samples: usize,
    pub ambiguous: usize,
    /// Samples where some closed facet set holds both `u` and `-u`.
    pub antipodal_f: usize,
    pub antipodal_d: usize,
    pub max_f_closure: usize,
    pub overlap_violations: usize,
    /// Samples in no open facet set and not in `D`.
    pub uncovered: usize,
}

impl EquatorCheck {
    pub fn passed(&self) -> bool {
        self.antipodal_f == 0 && self.antipodal_d == 0 && self.overlap_violations == 0 && self.uncovered == 0
    }
}

pub fn equator_check(g: &BeltGeometry, samples: usize, seed: u64) -> EquatorCheck {
    let d = g.d();
    let raw = g.frame().raw_vertices();
    let strata = strata_generators(d);
    let limit = d.div_ceil(2);
    let p = g.params();
    let mut out = EquatorCheck {
        samples,
        ambiguous: 0,
        antipodal_f: 0,
        antipodal_d: 0,
        max_f_closure: 0,
        overlap_violations: 0,
        uncovered: 0,
    };
    for k in 0..samples {
        let mut rng = rng_for(seed, k);
        let u = match k % 10 {
            0..=4 => gaussian_unit(&mut rng, d),
            5..=7 => {
                let which = rng.random_range(0..strata.len());
                tube_point(&mut rng, &strata[which], d, 2.0 * p.eps2)
            }
            _ => {
                // Near a random proper face of the simplex.
                let size = rng.random_range(1..d);
                let mut verts: Vec<usize> = (0..=d).collect();
                for i in 0..size {
                    let j = rng.random_range(i..verts.len());
                    verts.swap(i, j);
                }
                let gens: Vec<Vec<f64>> = verts[..size].iter().map(|&v| raw[v].clone()).collect();
                tube_point(&mut rng, &gens, d, 3.0 * p.eps1)
            }
        };
        let minus: Vec<f64> = u.iter().map(|c| -c).collect();
        let here = g.equator_sets(&u);
        let there = g.equator_sets(&minus);
        if here.margin().min(there.margin()) < p.tau {
            out.ambiguous += 1;
            continue;
        }
        if here.f_closure.iter().zip(&there.f_closure).any(|(a, b)| a.value && b.value) {
            out.antipodal_f += 1;
        }
        if here.d_closure.value && there.d_closure.value {
            out.antipodal_d += 1;
        }
        let c = here.f_closure_count();
        out.max_f_closure = out.max_f_closure.max(c);
        if c > limit {
            out.overlap_violations += 1;
        }
        if here.f_count() == 0 && !here.d.value {
            out.uncovered += 1;
        }
    }
    out
}
