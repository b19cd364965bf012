//! Builders for the covers studied here, plus the bounds calculator.

pub mod belt;
mod bounds;
mod simplex;

pub use belt::{belt_auto_params, belt_auto_params_report, belt_cover, AutoParamsReport, BeltGeometry, BeltParams};
pub use bounds::{bounds_table, BoundsTable};
pub use simplex::{facet_multiplicity, simplex_frame, SimplexFrame};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cover::{Arc1, Claims, Cover, CoverSet, PredicateSet, Provenance};
use crate::error::{Error, Result};
use crate::exact::primitive;
use crate::geometry::{rat, Direction, Rat};
use crate::linalg::{inverse, mat_vec};

/// Alternating moment-curve configuration of `d + 2n` points on `S^d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaleConfig {
    pub d: usize,
    pub n: usize,
    #[serde(serialize_with = "ser_rats")]
    pub t_values: Vec<Rat>,
    pub points: Vec<Direction>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::geometry::format_rat))
}

fn check_dn(d: usize, n: usize) -> Result<()> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidParameter(format!("need d >= 1 and n >= 1, got d = {d}, n = {n}")));
    }
    Ok(())
}

fn check_mn(n: usize, m: usize) -> Result<()> {
    if m <= n {
        return Err(Error::InvalidParameter(format!("need m > n, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// `t_i = i` for `i = 1..=d+2n`.
pub fn gale_points(d: usize, n: usize) -> Result<GaleConfig> {
    let t = (1..=(d + 2 * n) as i64).map(rat).collect();
    gale_points_with(d, n, t)
}

/// Point `i` (1-based) is `(-1)^i (1, t_i, ..., t_i^d)`.
pub fn gale_points_with(d: usize, n: usize, t_values: Vec<Rat>) -> Result<GaleConfig> {
    check_dn(d, n)?;
    if t_values.len() != d + 2 * n {
        return Err(Error::InvalidParameter(format!(
            "expected {} t-values, got {}",
            d + 2 * n,
            t_values.len()
        )));
    }
    if t_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("t-values must be strictly increasing".into()));
    }
    let points = t_values
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let sign = if i % 2 == 0 { -Rat::one() } else { Rat::one() };
            let mut coords = Vec::with_capacity(d + 1);
            let mut power = Rat::one();
            for _ in 0..=d {
                coords.push(&sign * &power);
                power *= t;
            }
            Direction::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GaleConfig { d, n, t_values, points })
}

pub fn gale_cover(d: usize, n: usize) -> Result<Cover> {
    cover_from_config(gale_points(d, n)?)
}

pub fn gale_cover_with(d: usize, n: usize, t_values: Vec<Rat>) -> Result<Cover> {
    cover_from_config(gale_points_with(d, n, t_values)?)
}

fn cover_from_config(cfg: GaleConfig) -> Result<Cover> {
    let mut provenance = Provenance::named("gale");
    provenance.t_values = Some(cfg.t_values);
    let sets = cfg.points.into_iter().map(CoverSet::hemisphere).collect();
    Cover::new(cfg.d, sets, Claims::fold(cfg.n as u32), provenance)
}

/// Rational invertible `P` with `P q = -e_last` up to a positive factor.
///
/// Hemispheres transform through their poles: `<P q, y> = <q, P^T y>`, so
/// applying `P` to every pole pulls the cover back along `y -> P^T y`, a
/// homeomorphism of the sphere. Every multiplicity survives.
fn sink_map(q: &Direction) -> Result<Vec<Vec<Rat>>> {
    let dim = q.ambient();
    let j = (0..dim)
        .rev()
        .find(|&j| !q.coords()[j].is_zero())
        .ok_or(Error::ZeroDirection)?;
    // M = I with column j replaced by -q, so M e_j = -q and M^{-1} q = -e_j.
    let mut m: Vec<Vec<Rat>> = (0..dim)
        .map(|r| (0..dim).map(|c| if r == c { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for (r, row) in m.iter_mut().enumerate() {
        row[j] = -q.coords()[r].clone();
    }
    let mut p = inverse(&m).ok_or_else(|| Error::Internal("sink map is singular".into()))?;
    p.swap(j, dim - 1);
    Ok(p)
}

/// Gale's `m`-fold cover with one hemisphere turned into the southern one
/// and removed: `n`-fold everywhere, `m`-fold on the closed north.
pub fn bar_cover(d: usize, n: usize, m: usize) -> Result<Cover> {
    check_dn(d, n)?;
    check_mn(n, m)?;
    let cfg = gale_points(d, m)?;
    let p = sink_map(&cfg.points[0])?;
    let mapped: Vec<Direction> =
        cfg.points.iter().map(|q| primitive(mat_vec(&p, q.coords()))).collect::<Result<_>>()?;
    let south = Direction::axis(d + 1, d).neg();
    if !mapped[0].sphere_eq(&south) {
        return Err(Error::Internal(format!("first pole mapped to {}, not the south pole", mapped[0])));
    }
    let mut provenance = Provenance::named("bar");
    provenance.t_values = Some(cfg.t_values);
    provenance.notes.push(format!("gale({d},{m}) with the first hemisphere mapped south and removed"));
    let sets = mapped.into_iter().skip(1).map(CoverSet::hemisphere).collect();
    Cover::new(d, sets, Claims::closed_north(n as u32, m as u32), provenance)
}

/// Gale's `n`-fold cover plus `m - n` copies of the northern hemisphere.
pub fn nm_cover_upper(d: usize, n: usize, m: usize) -> Result<Cover> {
    check_mn(n, m)?;
    let base = gale_cover(d, n)?;
    let mut cover = base.add_hemispheres(m - n, &Direction::axis(d + 1, d), Claims::open_north(n as u32, m as u32))?;
    let mut provenance = cover.provenance().clone();
    provenance.construction = "nm_upper".into();
    cover = Cover::new(d, cover.sets().to_vec(), *cover.claims(), provenance)?;
    Ok(cover)
}

pub const CIRCLE_HALF_WIDTH_DEG: f64 = 65.0;

/// Three open arcs around the circle plus `m - 1` northern half-circles.
pub fn circle_cover(m: usize) -> Result<Cover> {
    if m < 1 {
        return Err(Error::InvalidParameter("circle_cover needs m >= 1".into()));
    }
    let mut sets: Vec<CoverSet> = [90.0, 210.0, 330.0]
        .iter()
        .map(|&c| CoverSet::Predicate(PredicateSet::Arc(Arc1 { center_deg: c, half_width_deg: CIRCLE_HALF_WIDTH_DEG })))
        .collect();
    sets.extend(std::iter::repeat_n(CoverSet::hemisphere(Direction::axis(2, 1)), m - 1));
    let claims = if m == 1 { Claims::fold(1) } else { Claims::open_north(1, m as u32) };
    Cover::new(1, sets, claims, Provenance::named("circle"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Region;
    use crate::exact::{arc_sweep, multiplicity_extrema};

    #[test]
    fn gale_small_example() {
        let g = gale_points(1, 1).unwrap();
        let want: Vec<Direction> =
            [[-1, -1], [1, 2], [-1, -3]].iter().map(|p| Direction::from_ints(p).unwrap()).collect();
        assert_eq!(g.points, want);
    }

    #[test]
    fn t_values_must_increase() {
        assert!(gale_points_with(1, 1, vec![rat(1), rat(1), rat(2)]).is_err());
        assert!(gale_points_with(1, 1, vec![rat(3), rat(2), rat(1)]).is_err());
        assert!(gale_points_with(1, 1, vec![rat(-1), rat(0), rat(5)]).is_ok());
    }

    #[test]
    fn gale_counts_and_extrema() {
        let c = gale_cover(2, 1).unwrap();
        assert_eq!(c.len(), 4);
        let r = multiplicity_extrema(&c, Region::Sphere).unwrap();
        assert_eq!(r.min, 1);
        assert!(r.max <= 3);
        let c = gale_cover(2, 2).unwrap();
        let r = multiplicity_extrema(&c, Region::Sphere).unwrap();
        assert_eq!(r.min, 2);
        assert!(r.max <= 4);
    }

    #[test]
    fn bar_cover_small() {
        let c = bar_cover(2, 1, 2).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(multiplicity_extrema(&c, Region::ClosedNorth).unwrap().min, 2);
        assert!(multiplicity_extrema(&c, Region::Sphere).unwrap().min >= 1);
        assert!(bar_cover(2, 2, 2).is_err());
    }

    #[test]
    fn sink_map_handles_zero_tail() {
        let q = Direction::from_ints(&[3, 0]).unwrap();
        let p = sink_map(&q).unwrap();
        let img = primitive(mat_vec(&p, q.coords())).unwrap();
        assert_eq!(img, Direction::from_ints(&[0, -1]).unwrap());
    }

    #[test]
    fn nm_upper_small() {
        let c = nm_cover_upper(2, 1, 2).unwrap();
        assert_eq!(c.len(), 5);
        assert!(multiplicity_extrema(&c, Region::OpenNorth).unwrap().min >= 2);
        assert_eq!(nm_cover_upper(1, 1, 2).unwrap().len(), 4);
    }

    #[test]
    fn circle_cover_sweeps() {
        let c = circle_cover(1).unwrap();
        assert_eq!(arc_sweep(&c, Region::Sphere).unwrap().min, 1);
        let c = circle_cover(3).unwrap();
        assert_eq!(c.len(), 5);
        let r = arc_sweep(&c, Region::OpenNorth).unwrap();
        assert!(r.min >= 3);
        assert!(r.antipodal_violations.is_empty());
    }
}
