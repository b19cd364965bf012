//! JSON cover documents.
//!
//! ```json
//! { "dim": 2, "kind": "hemispheres",
//!   "sets": [ { "type": "hemisphere", "pole": ["-1/1", "-1/1", "-1/1"] } ],
//!   "claims": { "n": 1, "m": null, "north_closed": false },
//!   "provenance": { "construction": "gale", "t_values": ["1/1", "2/1"] } }
//! ```
//!
//! Predicate sets are catalogued tags only: `arc` (with `center_deg`,
//! `half_width_deg`), `facet_extension` (with `index`) and `cap_extension`.
//! The last two take their geometry from `provenance.params`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructions::belt::BeltGeometry;
use crate::cover::{Arc1, Claims, Cover, CoverSet, PredicateSet, Provenance, BeltRole};
use crate::error::{Error, Result};
use crate::geometry::Direction;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDocument {
    pub dim: usize,
    pub kind: String,
    pub sets: Vec<SetDocument>,
    pub claims: Claims,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDocument {
    Hemisphere { pole: Direction },
    Arc { center_deg: f64, half_width_deg: f64 },
    FacetExtension { index: usize },
    CapExtension,
}

impl CoverDocument {
    pub fn from_cover(cover: &Cover) -> Self {
        let sets = cover
            .sets()
            .iter()
            .map(|s| match s {
                CoverSet::Hemisphere(h) => SetDocument::Hemisphere { pole: h.pole.clone() },
                CoverSet::Predicate(PredicateSet::Arc(a)) => {
                    SetDocument::Arc { center_deg: a.center_deg, half_width_deg: a.half_width_deg }
                }
                CoverSet::Predicate(PredicateSet::Belt { role, .. }) => match role {
                    BeltRole::Facet(i) => SetDocument::FacetExtension { index: *i },
                    BeltRole::Cap => SetDocument::CapExtension,
                },
            })
            .collect();
        CoverDocument {
            dim: cover.dim(),
            kind: cover.kind().to_string(),
            sets,
            claims: *cover.claims(),
            provenance: cover.provenance().clone(),
        }
    }

    pub fn into_cover(self) -> Result<Cover> {
        let mut geometry: Option<Arc<BeltGeometry>> = None;
        let mut sets = Vec::with_capacity(self.sets.len());
        for s in self.sets {
            let set = match s {
                SetDocument::Hemisphere { pole } => CoverSet::hemisphere(pole),
                SetDocument::Arc { center_deg, half_width_deg } => {
                    if !(center_deg.is_finite() && half_width_deg.is_finite() && half_width_deg > 0.0) {
                        return Err(Error::Schema("arc needs finite center and positive half-width".into()));
                    }
                    CoverSet::Predicate(PredicateSet::Arc(Arc1 { center_deg, half_width_deg }))
                }
                SetDocument::FacetExtension { .. } | SetDocument::CapExtension => {
                    if geometry.is_none() {
                        let params = self.provenance.params.clone().ok_or_else(|| {
                            Error::Schema("belt-construction sets need provenance.params".into())
                        })?;
                        geometry = Some(Arc::new(BeltGeometry::new(self.dim, params)?));
                    }
                    let g = geometry.clone().expect("built above");
                    let role = match s {
                        SetDocument::FacetExtension { index } if index <= self.dim => BeltRole::Facet(index),
                        SetDocument::FacetExtension { index } => {
                            return Err(Error::Schema(format!("facet index {index} out of range")))
                        }
                        _ => BeltRole::Cap,
                    };
                    CoverSet::Predicate(PredicateSet::Belt { role, geometry: g })
                }
            };
            sets.push(set);
        }
        let cover = Cover::new(self.dim, sets, self.claims, self.provenance)
            .map_err(|e| Error::Schema(e.to_string()))?;
        if cover.kind() != self.kind {
            return Err(Error::Schema(format!("kind {:?} does not match the sets ({})", self.kind, cover.kind())));
        }
        Ok(cover)
    }
}

pub fn to_json(cover: &Cover) -> String {
    serde_json::to_string_pretty(&CoverDocument::from_cover(cover)).expect("cover documents serialize")
}

pub fn from_json(text: &str) -> Result<Cover> {
    let doc: CoverDocument = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    doc.into_cover()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO_POLE: &str = r#"{"dim":1,"kind":"hemispheres",
        "sets":[{"type":"hemisphere","pole":["0/1","0/1"]}],
        "claims":{"n":1,"m":null,"north_closed":false},
        "provenance":{"construction":"hand"}}"#;

    #[test]
    fn zero_pole_rejected() {
        assert!(matches!(from_json(ZERO_POLE), Err(Error::Schema(_))));
    }

    #[test]
    fn m_not_above_n_rejected() {
        let text = r#"{"dim":1,"kind":"hemispheres",
            "sets":[{"type":"hemisphere","pole":["1/1","0/1"]}],
            "claims":{"n":2,"m":2,"north_closed":false},
            "provenance":{"construction":"hand"}}"#;
        assert!(matches!(from_json(text), Err(Error::Schema(_))));
    }

    #[test]
    fn non_reduced_rational_rejected() {
        let text = ZERO_POLE.replace(r#"["0/1","0/1"]"#, r#"["2/2","0/1"]"#);
        assert!(from_json(&text).is_err());
        let ok = ZERO_POLE.replace(r#"["0/1","0/1"]"#, r#"["1/1","0/1"]"#);
        assert!(from_json(&ok).is_ok());
    }

    #[test]
    fn kind_must_match() {
        let text = ZERO_POLE.replace(r#"["0/1","0/1"]"#, r#"["1/1","0/1"]"#).replace("hemispheres", "predicate");
        assert!(from_json(&text).is_err());
    }

    #[test]
    fn unknown_tags_rejected() {
        let text = ZERO_POLE.replace(r#""type":"hemisphere","pole":["0/1","0/1"]"#, r#""type":"lua","code":"x"#);
        assert!(from_json(&text).is_err());
    }
}
