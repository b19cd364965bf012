//! Independent oracles for values the library derives: cone angles, LP
//! witnesses and exact extrema.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherecover::constructions::{bar_cover, gale_cover, nm_cover_upper};
use spherecover::exact::{feasible, multiplicity_extrema, multiplicity_extrema_with, witness_satisfies, ExactConfig, Sign};
use spherecover::geometry::{cone_angle, Cone};
use spherecover::{ApproxPoint, Cover, Direction, Region};

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

/// `<u, Vc / |Vc|>` for coefficients `c` on the simplex.
fn score(u: &[f64], gens: &[Vec<f64>], c: &[f64]) -> f64 {
    let mut y = vec![0.0; u.len()];
    for (g, &w) in gens.iter().zip(c) {
        for (yi, gi) in y.iter_mut().zip(g) {
            *yi += w * gi;
        }
    }
    let n = y.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n < 1e-300 {
        return f64::NEG_INFINITY;
    }
    y.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / n
}

/// Random nonnegative combinations, then mass-transfer pattern search.
fn brute_max_dot(u: &[f64], gens: &[Vec<f64>], rng: &mut ChaCha8Rng) -> f64 {
    let k = gens.len();
    let mut starts: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as u8 as f64).collect()).collect();
    for _ in 0..4000 {
        let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let s: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|x| x / s).collect());
    }
    starts.sort_by(|a, b| score(u, gens, b).total_cmp(&score(u, gens, a)));
    let mut best = f64::NEG_INFINITY;
    for mut c in starts.into_iter().take(8) {
        let mut f = score(u, gens, &c);
        let mut step: f64 = 0.25;
        while step > 1e-14 {
            let mut improved = false;
            for i in 0..k {
                for j in 0..k {
                    if i == j || c[j] <= 0.0 {
                        continue;
                    }
                    let delta = step.min(c[j]);
                    let mut t = c.clone();
                    t[i] += delta;
                    t[j] -= delta;
                    let ft = score(u, gens, &t);
                    if ft > f {
                        c = t;
                        f = ft;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        best = best.max(f);
    }
    best
}

fn vec_in(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

fn cone_case() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, u64)> {
    (2usize..=5).prop_flat_map(|dim| (vec_in(dim), prop::collection::vec(vec_in(dim), 1..=4), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cone_angle_matches_dense_maximization((u, gens, seed) in cone_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = normalize(&u);
        let gens: Vec<Vec<f64>> = gens.iter().map(|g| normalize(g)).collect();
        let oracle_dot = brute_max_dot(&u, &gens, &mut rng);
        let oracle = oracle_dot.clamp(-1.0, 1.0).acos();
        let points: Vec<ApproxPoint> = gens.iter().map(|g| ApproxPoint::new(g.clone()).unwrap()).collect();
        let got = cone_angle(&ApproxPoint::new(u.clone()).unwrap(), &points).unwrap();
        let cone = Cone::new(&gens).unwrap();
        // The oracle only ever underestimates the maximum dot product.
        prop_assert!(cone.max_dot(&u) >= oracle_dot - 1e-12, "library {} below oracle {oracle_dot}", cone.max_dot(&u));
        prop_assert!((got - oracle).abs() < 1e-6, "library {got} vs oracle {oracle}");
        prop_assert!((cone.angle(&u) - got).abs() < 1e-15);
    }

    #[test]
    fn lp_witnesses_satisfy_their_sign_vectors(
        poles in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 2..=5),
        signs in prop::collection::vec(0usize..3, 5),
        region in 0usize..5,
    ) {
        prop_assume!(poles.iter().all(|p| p.iter().any(|&c| c != 0)));
        let poles: Vec<Direction> = poles.iter().map(|p| Direction::from_ints(p).unwrap()).collect();
        let signs: Vec<Sign> = signs[..poles.len()].iter().map(|&s| [Sign::Neg, Sign::Zero, Sign::Pos][s]).collect();
        let region = Region::ALL[region];
        if let Some(w) = feasible(&poles, &signs, region).unwrap() {
            prop_assert!(witness_satisfies(&poles, &signs, region, &w.x).unwrap());
            // Direct substitution, independent of the library's checker.
            for (p, s) in poles.iter().zip(&signs) {
                let dot: spherecover::Rat = p.coords().iter().zip(w.x.coords()).map(|(a, b)| a * b).sum();
                prop_assert_eq!(Sign::of(&dot), *s);
            }
            prop_assert!(region.contains_exact(&w.x));
        }
    }
}

fn random_direction(rng: &mut ChaCha8Rng, ambient: usize) -> Direction {
    loop {
        let c: Vec<i64> = (0..ambient).map(|_| rng.random_range(-60..=60)).collect();
        if c.iter().any(|&x| x != 0) {
            return Direction::from_ints(&c).unwrap();
        }
    }
}

fn check_pointwise(cover: &Cover, samples: usize, seed: u64) {
    let r = multiplicity_extrema(cover, Region::Sphere).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_direction(&mut rng, cover.ambient());
        let m = cover.multiplicity_at(&x).unwrap();
        assert!(r.min <= m && m <= r.max, "multiplicity {m} at {x} outside [{}, {}]", r.min, r.max);
    }
    assert_eq!(cover.multiplicity_at(&r.min_witness).unwrap(), r.min);
    assert_eq!(cover.multiplicity_at(&r.max_witness).unwrap(), r.max);
}

#[test]
fn random_points_stay_within_exact_extrema() {
    let covers = [
        gale_cover(2, 1).unwrap(),
        gale_cover(3, 2).unwrap(),
        bar_cover(2, 1, 3).unwrap(),
        nm_cover_upper(3, 1, 3).unwrap(),
    ];
    for (i, c) in covers.iter().enumerate() {
        check_pointwise(c, 10_000, i as u64);
    }
}

#[test]
fn pruning_is_sound_on_small_constructions() {
    let brute = ExactConfig { prune: false, ..Default::default() };
    let covers = [gale_cover(1, 2).unwrap(), gale_cover(2, 2).unwrap(), bar_cover(2, 1, 2).unwrap(), nm_cover_upper(2, 1, 3).unwrap()];
    for c in &covers {
        assert!(c.len() <= 8);
        for region in Region::ALL {
            let a = multiplicity_extrema(c, region).unwrap();
            let b = multiplicity_extrema_with(c, region, &brute).unwrap();
            assert_eq!((a.min, a.max), (b.min, b.max), "{} over {}", c.provenance().construction, region.name());
        }
    }
}
