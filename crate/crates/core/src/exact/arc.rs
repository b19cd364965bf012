//! Endpoint sweep for covers of the circle.

use serde::Serialize;

use crate::cover::{angle_deg, angular_gap, Arc1, Cover, CoverSet, PredicateSet, Region};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSweepReport {
    pub region: &'static str,
    pub min: usize,
    pub max: usize,
    /// Witness angles in degrees.
    pub min_witness: f64,
    pub max_witness: f64,
    /// Indices of sets that contain an antipodal pair.
    pub antipodal_violations: Vec<usize>,
    pub exact: bool,
}

/// Arcs of a circle cover; hemispheres become open half-circles.
pub fn cover_arcs(cover: &Cover) -> Result<Vec<Arc1>> {
    if cover.dim() != 1 {
        return Err(Error::Regime(format!("arc sweep needs a cover of S^1, got S^{}", cover.dim())));
    }
    cover
        .sets()
        .iter()
        .map(|s| match s {
            CoverSet::Hemisphere(h) => {
                Ok(Arc1 { center_deg: angle_deg(&h.pole.to_approx().coords), half_width_deg: 90.0 })
            }
            CoverSet::Predicate(PredicateSet::Arc(a)) => Ok(*a),
            CoverSet::Predicate(_) => Err(Error::Regime("arc sweep handles arcs and hemispheres only".into())),
        })
        .collect()
}

fn in_region(theta: f64, region: Region) -> bool {
    match region {
        Region::Sphere => true,
        Region::OpenNorth => theta > 0.0 && theta < 180.0,
        Region::ClosedNorth => (0.0..=180.0).contains(&theta),
        Region::Equator => theta == 0.0 || theta == 180.0,
        Region::OpenSouth => theta > 180.0,
    }
}

/// Multiplicity profile of a circle cover over `region`.
///
/// The multiplicity is constant on the open intervals between consecutive
/// arc endpoints, so evaluating every endpoint and one interior point per
/// interval sees every value that occurs.
pub fn arc_sweep(cover: &Cover, region: Region) -> Result<ArcSweepReport> {
    let arcs = cover_arcs(cover)?;
    let mut breaks: Vec<f64> = vec![0.0, 180.0];
    for a in &arcs {
        breaks.push((a.center_deg - a.half_width_deg).rem_euclid(360.0));
        breaks.push((a.center_deg + a.half_width_deg).rem_euclid(360.0));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut probes = breaks.clone();
    for (i, &b) in breaks.iter().enumerate() {
        let next = if i + 1 < breaks.len() { breaks[i + 1] } else { breaks[0] + 360.0 };
        probes.push(((b + next) / 2.0).rem_euclid(360.0));
    }
    let mut min: Option<(usize, f64)> = None;
    let mut max: Option<(usize, f64)> = None;
    for &t in probes.iter().filter(|&&t| in_region(t, region)) {
        let c = arcs.iter().filter(|a| a.contains_angle(t)).count();
        if min.is_none_or(|(m, _)| c < m) {
            min = Some((c, t));
        }
        if max.is_none_or(|(m, _)| c > m) {
            max = Some((c, t));
        }
    }
    let (min, min_witness) = min.ok_or_else(|| Error::Internal("empty region".into()))?;
    let (max, max_witness) = max.ok_or_else(|| Error::Internal("empty region".into()))?;
    let antipodal_violations = arcs.iter().enumerate().filter(|(_, a)| !a.is_antipodal_free()).map(|(i, _)| i).collect();
    Ok(ArcSweepReport {
        region: region.name(),
        min,
        max,
        min_witness,
        max_witness,
        antipodal_violations,
        exact: true,
    })
}

/// True when some point of the open arc has its antipode in the arc too;
/// cross-checks [`Arc1::is_antipodal_free`] by intersecting with the image.
pub fn arc_meets_antipode(a: &Arc1) -> bool {
    let image = Arc1 { center_deg: a.center_deg + 180.0, half_width_deg: a.half_width_deg };
    // Two open arcs intersect iff their centers are closer than the summed half-widths.
    angular_gap(a.center_deg, image.center_deg) < a.half_width_deg + image.half_width_deg
}
