//! Browser bindings: bound tables, exact multiplicity ranges and SVG
//! renderings of the built-in constructions.

use wasm_bindgen::prelude::*;

use spherecover::constructions::{
    bar_cover, belt_auto_params, belt_cover, bounds_table, circle_cover, gale_cover, nm_cover_upper,
};
use spherecover::exact::{arc_sweep, multiplicity_extrema};
use spherecover::render::{render_svg, View};
use spherecover::{Cover, Region};

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Builds a cover by construction name; `n` and `m` are ignored where unused.
pub fn build(kind: &str, d: usize, n: usize, m: usize) -> spherecover::Result<Cover> {
    match kind {
        "gale" => gale_cover(d, n),
        "bar" => bar_cover(d, n, m),
        "nm_upper" => nm_cover_upper(d, n, m),
        "circle" => circle_cover(m),
        "belt" => belt_cover(d, belt_auto_params(d)?),
        other => Err(spherecover::Error::InvalidParameter(format!("unknown construction {other:?}"))),
    }
}

fn region(name: &str) -> spherecover::Result<Region> {
    Region::ALL
        .into_iter()
        .find(|r| r.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| spherecover::Error::InvalidParameter(format!("unknown region {name:?}")))
}

/// Bounds on f, f-bar and Q as JSON; `m = 0` leaves m out.
#[wasm_bindgen]
pub fn bounds_json(d: usize, n: usize, m: usize) -> Result<String, JsValue> {
    let t = bounds_table(d, n, (m > 0).then_some(m)).map_err(js_err)?;
    serde_json::to_string_pretty(&t).map_err(js_err)
}

/// Exact minimum and maximum multiplicity over a region, as JSON.
#[wasm_bindgen]
pub fn extrema_json(kind: &str, d: usize, n: usize, m: usize, region_name: &str) -> Result<String, JsValue> {
    let cover = build(kind, d, n, m).map_err(js_err)?;
    let r = region(region_name).map_err(js_err)?;
    let value = if cover.is_hemisphere_cover() {
        multiplicity_extrema(&cover, r).map_err(js_err)?.to_json_value()
    } else {
        serde_json::to_value(arc_sweep(&cover, r).map_err(js_err)?).map_err(js_err)?
    };
    let out = serde_json::json!({ "sets": cover.len(), "claims": cover.claims(), "report": value });
    serde_json::to_string_pretty(&out).map_err(js_err)
}

/// SVG picture of a construction; `view` is equator, north or south.
#[wasm_bindgen]
pub fn render(kind: &str, d: usize, n: usize, m: usize, view: &str) -> Result<String, JsValue> {
    let cover = build(kind, d, n, m).map_err(js_err)?;
    let view: View = view.parse().map_err(js_err)?;
    render_svg(&cover, view).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_every_kind() {
        assert_eq!(build("gale", 2, 1, 0).unwrap().len(), 4);
        assert_eq!(build("circle", 1, 1, 2).unwrap().len(), 4);
        assert_eq!(build("belt", 2, 1, 2).unwrap().len(), 4);
        assert!(build("spiral", 2, 1, 2).is_err());
    }

    #[test]
    fn extrema_for_hemispheres_and_arcs() {
        let v: serde_json::Value = serde_json::from_str(&extrema_json("gale", 2, 2, 0, "sphere").unwrap()).unwrap();
        assert_eq!(v["report"]["min"], 2);
        assert_eq!(v["report"]["max"], 4);
        let v: serde_json::Value = serde_json::from_str(&extrema_json("circle", 1, 1, 3, "OPEN_NORTH").unwrap()).unwrap();
        assert_eq!(v["report"]["min"], 3);
    }

    #[test]
    fn bounds_and_render() {
        let v: serde_json::Value = serde_json::from_str(&bounds_json(2, 1, 2).unwrap()).unwrap();
        assert_eq!(v["f_exact"], 4);
        assert!(render("gale", 2, 1, 0, "south").unwrap().contains("<svg"));
    }
}
