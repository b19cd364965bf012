//! Covers of `S^d`: sets, regions, claims and structural operations.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constructions::belt::{BeltGeometry, BeltParams};
use crate::error::{Error, Result};
use crate::geometry::{dot_exact, ApproxPoint, Direction, Rat};
use crate::linalg::dot_f64;

/// Parts of the sphere a property is asserted over. The last coordinate is
/// the "height" `x_{d+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    Sphere,
    OpenNorth,
    ClosedNorth,
    Equator,
    OpenSouth,
}

impl Region {
    pub const ALL: [Region; 5] =
        [Region::Sphere, Region::OpenNorth, Region::ClosedNorth, Region::Equator, Region::OpenSouth];

    pub fn contains_height(self, h: f64) -> bool {
        match self {
            Region::Sphere => true,
            Region::OpenNorth => h > 0.0,
            Region::ClosedNorth => h >= 0.0,
            Region::Equator => h == 0.0,
            Region::OpenSouth => h < 0.0,
        }
    }

    pub fn contains_exact(self, x: &Direction) -> bool {
        let h = x.last();
        match self {
            Region::Sphere => true,
            Region::OpenNorth => h.is_positive(),
            Region::ClosedNorth => !h.is_negative(),
            Region::Equator => h.is_zero(),
            Region::OpenSouth => h.is_negative(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Sphere => "SPHERE",
            Region::OpenNorth => "OPEN_NORTH",
            Region::ClosedNorth => "CLOSED_NORTH",
            Region::Equator => "EQUATOR",
            Region::OpenSouth => "OPEN_SOUTH",
        }
    }
}

impl std::str::FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_uppercase().replace('-', "_");
        Region::ALL
            .into_iter()
            .find(|r| r.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown region {s:?}")))
    }
}

/// Open hemisphere `{x : <pole, x> > 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hemisphere {
    pub pole: Direction,
}

impl Hemisphere {
    pub fn new(pole: Direction) -> Self {
        Hemisphere { pole }
    }

    pub fn contains(&self, x: &Direction) -> Result<bool> {
        Ok(dot_exact(&self.pole, x)?.is_positive())
    }
}

/// Open arc of `S^1`, angles in degrees measured from `e_1` towards `e_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc1 {
    pub center_deg: f64,
    pub half_width_deg: f64,
}

impl Arc1 {
    /// Signed distance (degrees) from `theta` to the arc boundary; positive inside.
    pub fn depth(&self, theta_deg: f64) -> f64 {
        self.half_width_deg - angular_gap(theta_deg, self.center_deg)
    }

    pub fn contains_angle(&self, theta_deg: f64) -> bool {
        self.depth(theta_deg) > 0.0
    }

    /// Open arcs of length at most a half-turn never hold an antipodal pair.
    pub fn is_antipodal_free(&self) -> bool {
        self.half_width_deg <= 90.0
    }
}

/// Unsigned angular difference in `[0, 180]` degrees.
pub fn angular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

pub fn angle_deg(x: &[f64]) -> f64 {
    x[1].atan2(x[0]).to_degrees().rem_euclid(360.0)
}

/// Which of the belt-construction sets a predicate stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BeltRole {
    /// Extension `C_i` of the `i`-th facet set (0-based).
    Facet(usize),
    /// Extension `C_{d+2}` of the set around the deep strata.
    Cap,
}

#[derive(Clone, Debug)]
pub enum PredicateSet {
    Arc(Arc1),
    Belt { role: BeltRole, geometry: Arc<BeltGeometry> },
}

impl PartialEq for PredicateSet {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PredicateSet::Arc(a), PredicateSet::Arc(b)) => a == b,
            (
                PredicateSet::Belt { role: r1, geometry: g1 },
                PredicateSet::Belt { role: r2, geometry: g2 },
            ) => r1 == r2 && g1.d() == g2.d() && g1.params() == g2.params(),
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoverSet {
    Hemisphere(Hemisphere),
    Predicate(PredicateSet),
}

impl CoverSet {
    pub fn hemisphere(pole: Direction) -> Self {
        CoverSet::Hemisphere(Hemisphere::new(pole))
    }

    pub fn as_hemisphere(&self) -> Option<&Hemisphere> {
        match self {
            CoverSet::Hemisphere(h) => Some(h),
            CoverSet::Predicate(_) => None,
        }
    }
}

/// Fold properties a cover is claimed to have. Engines never trust these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub n: u32,
    pub m: Option<u32>,
    pub north_closed: bool,
}

impl Claims {
    pub fn fold(n: u32) -> Self {
        Claims { n, m: None, north_closed: false }
    }

    pub fn open_north(n: u32, m: u32) -> Self {
        Claims { n, m: Some(m), north_closed: false }
    }

    pub fn closed_north(n: u32, m: u32) -> Self {
        Claims { n, m: Some(m), north_closed: true }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.m {
            if m <= self.n {
                return Err(Error::InvalidParameter(format!(
                    "northern fold m = {m} must exceed global fold n = {}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn north_region(&self) -> Option<(Region, u32)> {
        self.m.map(|m| (if self.north_closed { Region::ClosedNorth } else { Region::OpenNorth }, m))
    }
}

/// Construction record sufficient to rebuild a cover.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rats")]
    pub t_values: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BeltParams>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn named(construction: &str) -> Self {
        Provenance { construction: construction.to_string(), ..Default::default() }
    }
}

mod opt_rats {
    use super::Rat;
    use crate::geometry::{format_rat, parse_rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rat>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(format_rat)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rat>>, D::Error> {
        let items = Option::<Vec<String>>::deserialize(d)?;
        items
            .map(|v| v.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
            .transpose()
            .map_err(serde::de::Error::custom)
    }
}

/// An ordered family of open sets on `S^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cover {
    dim: usize,
    sets: Vec<CoverSet>,
    claims: Claims,
    provenance: Provenance,
    /// Unit-normalized float poles, cached for sampling.
    approx_poles: Vec<Option<Vec<f64>>>,
}

/// A sphere point in either regime.
#[derive(Clone, Copy, Debug)]
pub enum PointRef<'a> {
    Exact(&'a Direction),
    Approx(&'a ApproxPoint),
}

impl<'a> From<&'a Direction> for PointRef<'a> {
    fn from(x: &'a Direction) -> Self {
        PointRef::Exact(x)
    }
}

impl<'a> From<&'a ApproxPoint> for PointRef<'a> {
    fn from(x: &'a ApproxPoint) -> Self {
        PointRef::Approx(x)
    }
}

/// Set memberships at one approximate point, with the smallest slack of any
/// comparison that decided them.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub members: Vec<bool>,
    pub margin: f64,
}

impl Evaluation {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }
}

impl Cover {
    pub fn new(dim: usize, sets: Vec<CoverSet>, claims: Claims, provenance: Provenance) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidParameter("sphere dimension must be at least 1".into()));
        }
        if sets.is_empty() {
            return Err(Error::InvalidParameter("a cover needs at least one set".into()));
        }
        claims.validate()?;
        for s in &sets {
            match s {
                CoverSet::Hemisphere(h) if h.pole.ambient() != dim + 1 => {
                    return Err(Error::DimensionMismatch { expected: dim + 1, got: h.pole.ambient() })
                }
                CoverSet::Predicate(PredicateSet::Arc(_)) if dim != 1 => {
                    return Err(Error::InvalidParameter("arcs only live on S^1".into()))
                }
                CoverSet::Predicate(PredicateSet::Belt { geometry, .. }) if geometry.d() != dim => {
                    return Err(Error::DimensionMismatch { expected: dim, got: geometry.d() })
                }
                _ => {}
            }
        }
        let approx_poles = sets.iter().map(|s| s.as_hemisphere().map(|h| h.pole.to_approx().coords)).collect();
        Ok(Cover { dim, sets, claims, provenance, approx_poles })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.dim + 1
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn claims(&self) -> &Claims {
        &self.claims
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_claims(mut self, claims: Claims) -> Result<Self> {
        claims.validate()?;
        self.claims = claims;
        Ok(self)
    }

    pub fn is_hemisphere_cover(&self) -> bool {
        self.sets.iter().all(|s| s.as_hemisphere().is_some())
    }

    /// Poles of a pure hemisphere cover.
    pub fn poles(&self) -> Result<Vec<Direction>> {
        self.sets
            .iter()
            .map(|s| {
                s.as_hemisphere()
                    .map(|h| h.pole.clone())
                    .ok_or_else(|| Error::Regime("cover contains predicate sets".into()))
            })
            .collect()
    }

    pub fn kind(&self) -> &'static str {
        if self.is_hemisphere_cover() {
            "hemispheres"
        } else {
            "predicate"
        }
    }

    /// Number of sets containing `x`.
    pub fn multiplicity_at<'a>(&self, x: impl Into<PointRef<'a>>) -> Result<usize> {
        match x.into() {
            PointRef::Exact(x) => {
                if x.ambient() != self.ambient() {
                    return Err(Error::DimensionMismatch { expected: self.ambient(), got: x.ambient() });
                }
                let mut count = 0;
                for s in &self.sets {
                    let h = s.as_hemisphere().ok_or_else(|| {
                        Error::Regime("exact points need a pure hemisphere cover".into())
                    })?;
                    count += h.contains(x)? as usize;
                }
                Ok(count)
            }
            PointRef::Approx(x) => Ok(self.evaluate(x)?.count()),
        }
    }

    /// Exact membership vector at a rational point.
    pub fn members_exact(&self, x: &Direction) -> Result<Vec<bool>> {
        self.poles()?.iter().map(|p| Ok(dot_exact(p, x)?.is_positive())).collect()
    }

    /// Approximate membership of every set at `x`.
    pub fn evaluate(&self, x: &ApproxPoint) -> Result<Evaluation> {
        if x.ambient() != self.ambient() {
            return Err(Error::DimensionMismatch { expected: self.ambient(), got: x.ambient() });
        }
        let mut margin = f64::INFINITY;
        let mut members = Vec::with_capacity(self.sets.len());
        let mut belt: Option<(Arc<BeltGeometry>, Evaluation)> = None;
        for (s, approx) in self.sets.iter().zip(&self.approx_poles) {
            let inside = match s {
                CoverSet::Hemisphere(_) => {
                    let pole = approx.as_ref().expect("cached for every hemisphere");
                    let v = dot_f64(pole, &x.coords);
                    margin = margin.min(v.abs());
                    v > 0.0
                }
                CoverSet::Predicate(PredicateSet::Arc(a)) => {
                    let depth = a.depth(angle_deg(&x.coords));
                    margin = margin.min(depth.abs().to_radians());
                    depth > 0.0
                }
                CoverSet::Predicate(PredicateSet::Belt { role, geometry }) => {
                    let fresh = match &belt {
                        Some((g, _)) => !Arc::ptr_eq(g, geometry),
                        None => true,
                    };
                    if fresh {
                        belt = Some((geometry.clone(), geometry.evaluate(x)));
                    }
                    let ev = &belt.as_ref().expect("cached").1;
                    margin = margin.min(ev.margin);
                    ev.members[geometry.role_index(*role)]
                }
            };
            members.push(inside);
        }
        Ok(Evaluation { members, margin })
    }

    /// Intersection with the equator `x_{d+1} = 0`, as a cover of `S^{d-1}`.
    pub fn restrict_to_equator(&self) -> Result<Cover> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter("restriction needs d >= 2 so the equator is a sphere of dimension >= 1".into()));
        }
        let mut sets = Vec::new();
        for s in &self.sets {
            let h = s
                .as_hemisphere()
                .ok_or_else(|| Error::Regime("restriction is defined for hemisphere covers only".into()))?;
            let head = h.pole.coords()[..self.dim].to_vec();
            if let Ok(p) = Direction::new(head) {
                sets.push(CoverSet::hemisphere(p));
            }
        }
        if sets.is_empty() {
            return Err(Error::InvalidParameter("no set meets the equator".into()));
        }
        // The equator lies in the closed northern hemisphere.
        let fold = match self.claims.north_region() {
            Some((Region::ClosedNorth, m)) => m,
            _ => self.claims.n,
        };
        let mut provenance = Provenance::named("equator_restriction");
        provenance.notes.push(format!("restricted from {}", self.provenance.construction));
        Cover::new(self.dim - 1, sets, Claims::fold(fold), provenance)
    }

    /// Appends `count` copies of the hemisphere with the given pole.
    pub fn add_hemispheres(&self, count: usize, pole: &Direction, claims: Claims) -> Result<Cover> {
        if pole.ambient() != self.ambient() {
            return Err(Error::DimensionMismatch { expected: self.ambient(), got: pole.ambient() });
        }
        let mut sets = self.sets.clone();
        sets.extend(std::iter::repeat_n(CoverSet::hemisphere(pole.clone()), count));
        let mut provenance = self.provenance.clone();
        if count > 0 {
            provenance.notes.push(format!("added {count} hemispheres with pole {pole}"));
        }
        Cover::new(self.dim, sets, claims, provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;
    use proptest::prelude::*;

    fn single(pole: &[i64]) -> Cover {
        Cover::new(
            pole.len() - 1,
            vec![CoverSet::hemisphere(Direction::from_ints(pole).unwrap())],
            Claims::fold(1),
            Provenance::named("test"),
        )
        .unwrap()
    }

    #[test]
    fn multiplicity_examples() {
        let c = single(&[0, 0, 1]);
        let m = |x: &[i64]| c.multiplicity_at(&Direction::from_ints(x).unwrap()).unwrap();
        assert_eq!(m(&[0, 0, 1]), 1);
        assert_eq!(m(&[0, 0, -1]), 0);
        assert_eq!(m(&[1, 0, 0]), 0);
    }

    #[test]
    fn exact_point_on_predicate_cover_is_regime_error() {
        let c = Cover::new(
            1,
            vec![CoverSet::Predicate(PredicateSet::Arc(Arc1 { center_deg: 90.0, half_width_deg: 65.0 }))],
            Claims::fold(1),
            Provenance::named("test"),
        )
        .unwrap();
        let x = Direction::from_ints(&[0, 1]).unwrap();
        assert!(matches!(c.multiplicity_at(&x), Err(Error::Regime(_))));
        assert_eq!(c.multiplicity_at(&x.to_approx()).unwrap(), 1);
    }

    #[test]
    fn claims_require_m_above_n() {
        assert!(Claims::open_north(2, 2).validate().is_err());
        assert!(Claims::open_north(1, 2).validate().is_ok());
    }

    #[test]
    fn restriction_examples() {
        let polar = single(&[0, 0, 1]);
        assert!(polar.restrict_to_equator().is_err());
        let c = Cover::new(
            2,
            vec![
                CoverSet::hemisphere(Direction::from_ints(&[0, 0, 1]).unwrap()),
                CoverSet::hemisphere(Direction::from_ints(&[1, 0, 0]).unwrap()),
            ],
            Claims::fold(1),
            Provenance::named("test"),
        )
        .unwrap();
        let r = c.restrict_to_equator().unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.poles().unwrap(), vec![Direction::from_ints(&[1, 0]).unwrap()]);
    }

    #[test]
    fn add_zero_hemispheres_is_identity() {
        let c = single(&[1, 2, 3]);
        let same = c.add_hemispheres(0, &Direction::axis(3, 2), *c.claims()).unwrap();
        assert_eq!(same, c);
    }

    #[test]
    fn arc_geometry() {
        let a = Arc1 { center_deg: 330.0, half_width_deg: 65.0 };
        assert!(a.contains_angle(10.0));
        assert!(!a.contains_angle(35.0));
        assert!(a.is_antipodal_free());
        assert!(!Arc1 { center_deg: 0.0, half_width_deg: 91.0 }.is_antipodal_free());
        assert_eq!(angular_gap(350.0, 10.0), 20.0);
    }

    proptest! {
        #[test]
        fn hemisphere_never_holds_antipodes(
            pole in prop::collection::vec(-9i64..9, 3),
            x in prop::collection::vec(-9i64..9, 3),
        ) {
            prop_assume!(pole.iter().any(|&c| c != 0) && x.iter().any(|&c| c != 0));
            let h = Hemisphere::new(Direction::from_ints(&pole).unwrap());
            let x = Direction::from_ints(&x).unwrap();
            prop_assert!(!(h.contains(&x).unwrap() && h.contains(&x.neg()).unwrap()));
        }

        #[test]
        fn restriction_commutes_with_multiplicity(
            poles in prop::collection::vec(prop::collection::vec(-6i64..6, 4), 1..7),
            x in prop::collection::vec(-9i64..9, 3),
        ) {
            prop_assume!(x.iter().any(|&c| c != 0));
            prop_assume!(poles.iter().all(|p| p.iter().any(|&c| c != 0)));
            prop_assume!(poles.iter().any(|p| p[..3].iter().any(|&c| c != 0)));
            let sets = poles.iter().map(|p| CoverSet::hemisphere(Direction::from_ints(p).unwrap())).collect();
            let cover = Cover::new(3, sets, Claims::fold(1), Provenance::named("prop")).unwrap();
            let restricted = cover.restrict_to_equator().unwrap();
            let mut lifted: Vec<Rat> = x.iter().map(|&c| rat(c)).collect();
            lifted.push(rat(0));
            let lifted = Direction::new(lifted).unwrap();
            let flat = Direction::from_ints(&x).unwrap();
            prop_assert_eq!(cover.multiplicity_at(&lifted).unwrap(), restricted.multiplicity_at(&flat).unwrap());
        }
    }
}
