//! The sampling engine against the exact engine, the arc sweep against the
//! hyperplane enumeration, and the sampling verdicts against fresh evaluation.

use proptest::prelude::*;

use spherecover::constructions::{bar_cover, belt_auto_params, belt_cover, gale_cover, nm_cover_upper, BeltGeometry, BeltParams};
use spherecover::constructions::belt::cover_from_geometry;
use spherecover::cover::{Claims, CoverSet, Provenance};
use spherecover::exact::{arc_sweep, multiplicity_extrema};
use spherecover::sampling::{verify_sampled, Requirements, SamplePlan};
use spherecover::{Cover, Direction, Region};

fn assert_sampled_within_exact(cover: &Cover, samples: usize) {
    let plan = SamplePlan::for_cover(cover, 11, samples);
    let report = verify_sampled(cover, &plan, &Requirements::from_claims(cover)).unwrap();
    for region in Region::ALL {
        let exact = multiplicity_extrema(cover, region).unwrap();
        let Some(stats) = report.region(region) else { continue };
        if let (Some(lo), Some(hi)) = (stats.min, stats.max) {
            assert!(lo >= exact.min, "{}: sampled min {lo} below exact {}", region.name(), exact.min);
            assert!(hi <= exact.max, "{}: sampled max {hi} above exact {}", region.name(), exact.max);
        }
    }
}

#[test]
fn sampled_extrema_lie_within_exact_ones() {
    for c in [gale_cover(2, 2).unwrap(), gale_cover(4, 1).unwrap(), bar_cover(3, 1, 2).unwrap(), nm_cover_upper(3, 2, 4).unwrap()] {
        assert_sampled_within_exact(&c, 20_000);
    }
}

#[test]
fn every_reported_violation_reproduces() {
    // Facet sets as wide as the deep-strata set break the equatorial condition.
    let mut p = BeltParams::from_eps2(0.3);
    p.eps1 = p.eps2;
    let g = BeltGeometry::new_unvalidated(3, p).unwrap();
    let cover = cover_from_geometry(std::sync::Arc::new(g)).unwrap();
    let plan = SamplePlan::for_cover(&cover, 5, 20_000);
    let req = Requirements::from_claims(&cover);
    let report = verify_sampled(&cover, &plan, &req).unwrap();
    assert!(!report.passed());
    assert!(!report.violations.is_empty());
    let geometry = match &cover.sets()[0] {
        CoverSet::Predicate(spherecover::cover::PredicateSet::Belt { geometry, .. }) => geometry.clone(),
        _ => unreachable!(),
    };
    for v in &report.violations {
        let x = spherecover::ApproxPoint::new(v.point.clone()).unwrap();
        let ev = cover.evaluate(&x).unwrap();
        let reproduced = match v.kind {
            "sphere_fold" => ev.count() < req.sphere_min,
            "north_fold" => ev.count() < req.north.unwrap().1,
            "antipodal" => {
                let s = v.set.unwrap();
                ev.members[s] && cover.evaluate(&x.neg()).unwrap().members[s]
            }
            "equator_overlap" => {
                // Checked at the equatorial direction of the sample.
                let head = &v.point[..3];
                let r = head.iter().map(|c| c * c).sum::<f64>().sqrt();
                let u: Vec<f64> = head.iter().map(|c| c / r).collect();
                geometry.equator_sets(&u).f_closure_count() > req.equator_f_max.unwrap()
            }
            "propagation" => ev.count() < req.north.unwrap().1,
            other => panic!("unknown violation kind {other}"),
        };
        assert!(reproduced, "violation {v:?} did not reproduce");
    }
}

#[test]
fn belt_pole_multiplicities() {
    for d in 2..=4 {
        let c = belt_cover(d, belt_auto_params(d).unwrap()).unwrap();
        let mut north = vec![0.0; d + 1];
        north[d] = 1.0;
        let north = spherecover::ApproxPoint::new(north).unwrap();
        assert_eq!(c.evaluate(&north).unwrap().count(), d + 1);
        assert_eq!(c.evaluate(&north.neg()).unwrap().count(), 1);
    }
}

fn circle_cover_of(angles: &[i64]) -> Cover {
    let sets = angles
        .iter()
        .map(|&a| {
            let t = (a as f64).to_radians();
            // Rational poles near the requested angle.
            let x = (t.cos() * 1000.0).round() as i64;
            let y = (t.sin() * 1000.0).round() as i64;
            CoverSet::hemisphere(Direction::from_ints(&[x, y]).unwrap())
        })
        .collect();
    Cover::new(1, sets, Claims::fold(1), Provenance::named("prop")).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hyperplane_enumeration_agrees_with_arc_sweep(angles in prop::collection::vec(0i64..360, 1..=7)) {
        let c = circle_cover_of(&angles);
        for region in Region::ALL {
            let a = multiplicity_extrema(&c, region).unwrap();
            let b = arc_sweep(&c, region).unwrap();
            prop_assert_eq!((a.min, a.max), (b.min, b.max), "region {}", region.name());
        }
    }

    #[test]
    fn hyperplane_enumeration_agrees_with_arc_sweep_on_axes(angles in prop::collection::vec(0i64..4, 1..=6)) {
        // Poles on the axes hit the equator points exactly.
        let c = circle_cover_of(&angles.iter().map(|a| a * 90).collect::<Vec<_>>());
        for region in Region::ALL {
            let a = multiplicity_extrema(&c, region).unwrap();
            let b = arc_sweep(&c, region).unwrap();
            prop_assert_eq!((a.min, a.max), (b.min, b.max), "region {}", region.name());
        }
    }
}
