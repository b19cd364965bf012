//! The belt construction: `d + 2` open antipodal-free sets on `S^d` forming
//! a 1-fold cover that is `floor(d/2) + 1`-fold on the open north.
//!
//! On the equator `S^{d-1}` take a regular simplex. `F'_i` is the radial
//! projection of the facet opposite `v_i` and `D'` the union of the faces
//! lying in at least `ceil(d/2) + 1` facets. `D` is the open
//! `eps2`-neighbourhood of `D'`; `F_i` is the open `eps1`-neighbourhood of
//! `F'_i` with the closed `(eps2 - eps1)`-neighbourhood of `D'` removed.
//! The sets thicken into slabs around the equator (`C'_i`), get unioned with
//! the open north (or south for the cap), and have the closure of their own
//! antipodal slab removed.

use std::f64::consts::FRAC_PI_2;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::simplex::{simplex_frame, SimplexFrame};
use crate::cover::{BeltRole, Claims, Cover, CoverSet, Evaluation, PredicateSet, Provenance};
use crate::error::{Error, Result};
use crate::geometry::{ApproxPoint, Cone, TAU};
use crate::linalg::norm_f64;
use crate::sampling::{equator_check, EquatorCheck};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeltParams {
    /// Facet neighbourhood radius (radians).
    pub eps1: f64,
    /// Deep-stratum neighbourhood radius (radians).
    pub eps2: f64,
    /// Upper slope of the cap slab.
    pub delta1p: f64,
    /// Slope of the facet slabs and lower slope of the cap slab.
    pub delta2p: f64,
    /// Resolution of the stratum-separation estimate (radians).
    pub rho: f64,
    /// Closure relaxation and ambiguity threshold.
    #[serde(default = "default_tau")]
    pub tau: f64,
}

fn default_tau() -> f64 {
    TAU
}

impl BeltParams {
    pub fn from_eps2(eps2: f64) -> Self {
        let eps1 = eps2 / 10.0;
        BeltParams { eps1, eps2, delta1p: 0.25, delta2p: 0.5, rho: eps1 / 10.0, tau: TAU }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("belt params: {msg}")));
        let all = [self.eps1, self.eps2, self.delta1p, self.delta2p, self.rho, self.tau];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        if !(0.0 < self.eps1 && self.eps1 < self.eps2 && self.eps2 < FRAC_PI_2) {
            return bad("need 0 < eps1 < eps2 < pi/2");
        }
        if !(0.0 < self.delta1p && self.delta1p < self.delta2p && self.delta2p < 1.0) {
            return bad("need 0 < delta1p < delta2p < 1");
        }
        if !(self.rho > 0.0 && self.rho <= self.eps1 / 10.0 * (1.0 + 1e-12)) {
            return bad("need 0 < rho <= eps1/10");
        }
        if !(self.tau > 0.0 && self.tau < self.eps1) {
            return bad("need 0 < tau < eps1");
        }
        Ok(())
    }

    /// Slab half-heights on the sphere, `sin(atan(delta'))`.
    pub fn heights(&self) -> (f64, f64) {
        (self.delta1p.atan().sin(), self.delta2p.atan().sin())
    }
}

/// A boolean together with how far its deciding quantities were from
/// flipping it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Robust {
    pub value: bool,
    pub margin: f64,
}

impl Robust {
    /// Decided by stored coordinates, so no rounding can flip it.
    pub fn exact(value: bool) -> Self {
        Robust { value, margin: f64::INFINITY }
    }

    pub fn lt(a: f64, b: f64) -> Self {
        Robust { value: a < b, margin: (a - b).abs() }
    }

    pub fn le(a: f64, b: f64) -> Self {
        Robust { value: a <= b, margin: (a - b).abs() }
    }

    pub fn and(self, o: Robust) -> Self {
        match (self.value, o.value) {
            (true, true) => Robust { value: true, margin: self.margin.min(o.margin) },
            (false, false) => Robust { value: false, margin: self.margin.max(o.margin) },
            (true, false) => o,
            (false, true) => self,
        }
    }

    pub fn or(self, o: Robust) -> Self {
        self.not().and(o.not()).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Robust { value: !self.value, margin: self.margin }
    }
}

/// Equatorial sets at one direction of `S^{d-1}`.
#[derive(Clone, Debug)]
pub struct EquatorSets {
    pub f: Vec<Robust>,
    pub f_closure: Vec<Robust>,
    pub d: Robust,
    pub d_closure: Robust,
}

impl EquatorSets {
    pub fn f_count(&self) -> usize {
        self.f.iter().filter(|r| r.value).count()
    }

    pub fn f_closure_count(&self) -> usize {
        self.f_closure.iter().filter(|r| r.value).count()
    }

    pub fn margin(&self) -> f64 {
        self.f
            .iter()
            .chain(&self.f_closure)
            .chain([&self.d, &self.d_closure])
            .map(|r| r.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct BeltGeometry {
    d: usize,
    params: BeltParams,
    frame: SimplexFrame,
    facets: Vec<Cone>,
    strata: Vec<Cone>,
    strata_members: Vec<Vec<usize>>,
}

/// Vertex sets spanning the deep faces: complements of `ceil(d/2) + 1` facets.
pub fn deep_strata(d: usize) -> Vec<Vec<usize>> {
    let k = d.div_ceil(2) + 1;
    (0..=d)
        .combinations(k)
        .map(|j| (0..=d).filter(|v| !j.contains(v)).collect())
        .collect()
}

impl BeltGeometry {
    pub fn new(d: usize, params: BeltParams) -> Result<Self> {
        params.validate()?;
        Self::new_unvalidated(d, params)
    }

    /// Skips the parameter checks; for mutation tests of the verifiers.
    pub fn new_unvalidated(d: usize, params: BeltParams) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("belt construction needs d >= 2, got {d}")));
        }
        let frame = simplex_frame(d)?;
        let raw = frame.raw_vertices();
        let facets = (0..=d)
            .map(|i| Cone::new(&(0..=d).filter(|&k| k != i).map(|k| raw[k].clone()).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let strata_members = deep_strata(d);
        let strata = strata_members
            .iter()
            .map(|g| Cone::new(&g.iter().map(|&k| raw[k].clone()).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BeltGeometry { d, params, frame, facets, strata, strata_members })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn params(&self) -> &BeltParams {
        &self.params
    }

    pub fn frame(&self) -> &SimplexFrame {
        &self.frame
    }

    pub fn strata(&self) -> &[Cone] {
        &self.strata
    }

    pub fn strata_members(&self) -> &[Vec<usize>] {
        &self.strata_members
    }

    pub fn role_index(&self, role: BeltRole) -> usize {
        match role {
            BeltRole::Facet(i) => i,
            BeltRole::Cap => self.d + 1,
        }
    }

    /// Geodesic distance from `u` to `F'_i`.
    pub fn facet_angle(&self, u: &[f64], i: usize) -> f64 {
        self.facets[i].angle(u)
    }

    /// Geodesic distance from `u` to `D'`.
    pub fn dist_dp(&self, u: &[f64]) -> f64 {
        self.strata.iter().map(|c| c.angle(u)).fold(f64::INFINITY, f64::min)
    }

    pub fn equator_sets(&self, u: &[f64]) -> EquatorSets {
        let p = &self.params;
        let dist = self.dist_dp(u);
        let far = Robust::lt(p.eps2 - p.eps1, dist);
        let far_closed = Robust::le(p.eps2 - p.eps1 - p.tau, dist);
        let mut f = Vec::with_capacity(self.d + 1);
        let mut f_closure = Vec::with_capacity(self.d + 1);
        for i in 0..=self.d {
            let a = self.facet_angle(u, i);
            f.push(Robust::lt(a, p.eps1).and(far));
            f_closure.push(Robust::le(a, p.eps1 + p.tau).and(far_closed));
        }
        EquatorSets { f, f_closure, d: Robust::lt(dist, p.eps2), d_closure: Robust::le(dist, p.eps2 + p.tau) }
    }

    /// Memberships of `C_1, ..., C_{d+2}` at `x`.
    pub fn evaluate(&self, x: &ApproxPoint) -> Evaluation {
        let d = self.d;
        let p = &self.params;
        let h = x.coords[d];
        let head = &x.coords[..d];
        let pn = norm_f64(head);
        if pn <= p.tau {
            let mut members = vec![h > 0.0; d + 1];
            members.push(h < 0.0);
            return Evaluation { members, margin: f64::INFINITY };
        }
        let u: Vec<f64> = head.iter().map(|c| c / pn).collect();
        let minus_u: Vec<f64> = u.iter().map(|c| -c).collect();
        let r = h / pn;
        let here = self.equator_sets(&u);
        let there = self.equator_sets(&minus_u);
        let north = Robust::exact(h > 0.0);
        let south = Robust::exact(h < 0.0);
        let slab = Robust::lt(-p.delta2p, r).and(Robust::lt(r, p.delta2p));
        let slab_neg_closed = Robust::le(-p.delta2p - p.tau, -r).and(Robust::le(-r, p.delta2p + p.tau));
        let cap_slab = Robust::lt(-p.delta2p, r).and(Robust::lt(r, p.delta1p));
        let cap_neg_closed = Robust::le(-p.delta2p - p.tau, -r).and(Robust::le(-r, p.delta1p + p.tau));
        let mut margin = f64::INFINITY;
        let mut members = Vec::with_capacity(d + 2);
        for i in 0..=d {
            let inner = here.f[i].and(slab);
            let mirrored = there.f_closure[i].and(slab_neg_closed);
            let c = north.or(inner).and(mirrored.not());
            margin = margin.min(c.margin);
            members.push(c.value);
        }
        let inner = here.d.and(cap_slab);
        let mirrored = there.d_closure.and(cap_neg_closed);
        let c = south.or(inner).and(mirrored.not());
        margin = margin.min(c.margin);
        members.push(c.value);
        Evaluation { members, margin }
    }
}

pub fn belt_cover(d: usize, params: BeltParams) -> Result<Cover> {
    let geometry = std::sync::Arc::new(BeltGeometry::new(d, params.clone())?);
    cover_from_geometry(geometry)
}

pub fn cover_from_geometry(geometry: std::sync::Arc<BeltGeometry>) -> Result<Cover> {
    let d = geometry.d();
    let mut sets: Vec<CoverSet> = (0..=d)
        .map(|i| CoverSet::Predicate(PredicateSet::Belt { role: BeltRole::Facet(i), geometry: geometry.clone() }))
        .collect();
    sets.push(CoverSet::Predicate(PredicateSet::Belt { role: BeltRole::Cap, geometry: geometry.clone() }));
    let mut provenance = Provenance::named("belt");
    provenance.params = Some(geometry.params().clone());
    Cover::new(d, sets, Claims::open_north(1, (d / 2 + 1) as u32), provenance)
}

/// Smallest angle between a deep stratum and the antipode of another (or
/// the same) one.
///
/// Each stratum cone is sampled on a barycentric grid, then the best sample
/// is polished by a pattern search over the barycentric weights.
pub fn strata_separation(d: usize) -> Result<f64> {
    let frame = simplex_frame(d)?;
    let raw = frame.raw_vertices();
    let members = deep_strata(d);
    let cones = members
        .iter()
        .map(|g| Cone::new(&g.iter().map(|&k| raw[k].clone()).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let k = members[0].len();
    let mut steps = 1usize;
    while k > 1 && grid_size(steps * 2, k) <= 4096 {
        steps *= 2;
    }
    let grid = barycentric_grid(steps, k);
    let mut eta = f64::INFINITY;
    for gens in &members {
        let g: Vec<&Vec<f64>> = gens.iter().map(|&i| &raw[i]).collect();
        for other in &cones {
            let objective = |w: &[f64]| -> f64 {
                let mut a = vec![0.0; d];
                for (wi, gi) in w.iter().zip(&g) {
                    for (ac, gc) in a.iter_mut().zip(gi.iter()) {
                        *ac -= wi * gc;
                    }
                }
                if norm_f64(&a) < 1e-15 {
                    return f64::INFINITY;
                }
                other.angle(&a)
            };
            let (mut best_w, mut best) = grid
                .iter()
                .map(|w| (w.clone(), objective(w)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("grid is nonempty");
            let mut step = 1.0 / steps as f64;
            while k > 1 && step > 1e-12 {
                let mut improved = false;
                for (a, b) in (0..k).tuple_combinations().flat_map(|(a, b)| [(a, b), (b, a)]) {
                    let s = step.min(best_w[b]);
                    if s <= 0.0 {
                        continue;
                    }
                    let mut w = best_w.clone();
                    w[a] += s;
                    w[b] -= s;
                    let v = objective(&w);
                    if v < best {
                        best = v;
                        best_w = w;
                        improved = true;
                    }
                }
                if !improved {
                    step /= 2.0;
                }
            }
            eta = eta.min(best);
        }
    }
    Ok(eta)
}

fn grid_size(steps: usize, k: usize) -> usize {
    // C(steps + k - 1, k - 1)
    (1..k).fold(1usize, |acc, i| acc * (steps + i) / i)
}

fn barycentric_grid(steps: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for take in 0..=left {
            cur.push(take);
            rec(left - take, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(steps, k, &mut Vec::new(), &mut out);
    out.into_iter().map(|c| c.into_iter().map(|x| x as f64 / steps as f64).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AutoParamsReport {
    pub d: usize,
    /// Stratum separation (radians).
    pub eta: f64,
    /// Shrinking rounds needed after the first attempt.
    pub rounds: usize,
    pub params: BeltParams,
    pub check: EquatorCheck,
}

pub const AUTO_ROUNDS: usize = 8;
pub const AUTO_CHECK_SAMPLES: usize = 20_000;
const AUTO_SEED: u64 = 0xbe17;

pub fn belt_auto_params(d: usize) -> Result<BeltParams> {
    Ok(belt_auto_params_report(d)?.params)
}

/// Parameters from the stratum separation, shrunk until the equatorial
/// preconditions hold on a deterministic sample.
pub fn belt_auto_params_report(d: usize) -> Result<AutoParamsReport> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("belt construction needs d >= 2, got {d}")));
    }
    let eta = strata_separation(d)?;
    let mut params = BeltParams::from_eps2(eta / 4.0);
    let mut last = None;
    for round in 0..=AUTO_ROUNDS {
        let geometry = BeltGeometry::new(d, params.clone())?;
        let check = equator_check(&geometry, AUTO_CHECK_SAMPLES, AUTO_SEED);
        if check.passed() {
            return Ok(AutoParamsReport { d, eta, rounds: round, params, check });
        }
        last = Some(check);
        if round < AUTO_ROUNDS / 2 {
            params.eps1 /= 2.0;
        } else {
            params.eps2 /= 2.0;
            params.eps1 = params.eps1.min(params.eps2 / 10.0);
        }
        params.rho = params.eps1 / 10.0;
    }
    Err(Error::NoParameters(format!(
        "d = {d}: equatorial checks still failing after {AUTO_ROUNDS} rounds: {:?}",
        last.expect("at least one round ran")
    )))
}
