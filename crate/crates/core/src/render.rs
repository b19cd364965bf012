//! SVG figures of low-dimensional covers, rasterized from membership
//! evaluations so predicate sets render the same way as hemispheres.
//!
//! `Equator` draws one ring per set around the circle (the whole of `S^1`
//! for `d = 1`, the equator of `S^2` for `d = 2`). `North` and `South` draw
//! an orthographic disk of that hemisphere of `S^2` on a 720 x 360 polar grid.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cover::{BeltRole, Cover, CoverSet, PredicateSet};
use crate::error::{Error, Result};
use crate::geometry::ApproxPoint;

pub const AZIMUTH_STEPS: usize = 720;
pub const RADIAL_STEPS: usize = 360;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Equator,
    North,
    South,
}

impl std::str::FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equator" => Ok(View::Equator),
            "north" => Ok(View::North),
            "south" => Ok(View::South),
            _ => Err(Error::InvalidParameter(format!("unknown view {s:?}; expected equator, north or south"))),
        }
    }
}

/// Short label of each set, used in the legend.
pub fn set_labels(cover: &Cover) -> Vec<String> {
    let d = cover.dim();
    cover
        .sets()
        .iter()
        .enumerate()
        .map(|(i, s)| match s {
            CoverSet::Hemisphere(_) => format!("H{}", i + 1),
            CoverSet::Predicate(PredicateSet::Arc(_)) => format!("A{}", i + 1),
            CoverSet::Predicate(PredicateSet::Belt { role: BeltRole::Facet(j), .. }) => format!("C{}", j + 1),
            CoverSet::Predicate(PredicateSet::Belt { role: BeltRole::Cap, .. }) => format!("C{}", d + 2),
        })
        .collect()
}

fn num(x: f64) -> String {
    // Fixed precision keeps output byte-stable; normalize -0.
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn azimuth(k: usize) -> f64 {
    2.0 * std::f64::consts::PI * k as f64 / AZIMUTH_STEPS as f64
}

/// Membership rows: `rows[k][s]` for azimuth cell `k`.
fn circle_memberships(cover: &Cover) -> Result<Vec<Vec<bool>>> {
    (0..AZIMUTH_STEPS)
        .map(|k| {
            let a = azimuth(k) + std::f64::consts::PI / AZIMUTH_STEPS as f64;
            let mut c = vec![a.cos(), a.sin()];
            if cover.dim() == 2 {
                c.push(0.0);
            }
            Ok(cover.evaluate(&ApproxPoint::new(c)?)?.members)
        })
        .collect()
}

/// Maximal runs of `true` in a cyclic or linear row, as `[start, end)`.
fn runs(row: impl Iterator<Item = bool>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut len = 0;
    for (i, b) in row.enumerate() {
        len = i + 1;
        match (b, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, len));
    }
    out
}

/// Annular sector between radii `r0 < r1` and azimuth cells `[a0, a1)`;
/// y grows downwards in SVG so angles are negated.
fn sector(cx: f64, cy: f64, r0: f64, r1: f64, a0: usize, a1: usize) -> String {
    let (t0, t1) = (azimuth(a0), azimuth(a1));
    let pt = |r: f64, t: f64| (cx + r * t.cos(), cy - r * t.sin());
    if a1 - a0 == AZIMUTH_STEPS {
        // Full ring: two half arcs per boundary, even-odd fill.
        let mut p = format!(
            "M{} {}A{} {} 0 1 0 {} {}A{} {} 0 1 0 {} {}Z",
            num(cx + r1), num(cy), num(r1), num(r1), num(cx - r1), num(cy), num(r1), num(r1), num(cx + r1), num(cy)
        );
        if r0 > 0.0 {
            let _ = write!(
                p,
                "M{} {}A{} {} 0 1 0 {} {}A{} {} 0 1 0 {} {}Z",
                num(cx + r0), num(cy), num(r0), num(r0), num(cx - r0), num(cy), num(r0), num(r0), num(cx + r0), num(cy)
            );
        }
        return p;
    }
    let large = if t1 - t0 > std::f64::consts::PI { 1 } else { 0 };
    let (x0, y0) = pt(r1, t0);
    let (x1, y1) = pt(r1, t1);
    let (x2, y2) = pt(r0, t1);
    let (x3, y3) = pt(r0, t0);
    if r0 <= 0.0 {
        return format!(
            "M{} {}L{} {}A{} {} 0 {large} 0 {} {}Z",
            num(cx), num(cy), num(x0), num(y0), num(r1), num(r1), num(x1), num(y1)
        );
    }
    format!(
        "M{} {}A{} {} 0 {large} 0 {} {}L{} {}A{} {} 0 {large} 1 {} {}Z",
        num(x0), num(y0), num(r1), num(r1), num(x1), num(y1), num(x2), num(y2), num(r0), num(r0), num(x3), num(y3)
    )
}

/// Merges runs that wrap through azimuth 0 into one.
fn cyclic_runs(row: impl Iterator<Item = bool>, n: usize) -> Vec<(usize, usize)> {
    let mut r = runs(row);
    if r.len() >= 2 && r[0].0 == 0 && r[r.len() - 1].1 == n {
        let last = r.pop().expect("nonempty");
        // Rotate: the wrapped run ends past n.
        r[0] = (last.0, r[0].1 + n);
    }
    r
}

fn sector_wrapping(cx: f64, cy: f64, r0: f64, r1: f64, a0: usize, a1: usize) -> String {
    if a1 <= AZIMUTH_STEPS {
        return sector(cx, cy, r0, r1, a0, a1);
    }
    // Split the wrap into two pieces that share the 0 azimuth.
    let mut p = sector(cx, cy, r0, r1, a0, AZIMUTH_STEPS);
    p.push_str(&sector(cx, cy, r0, r1, 0, a1 - AZIMUTH_STEPS));
    p
}

fn header(out: &mut String, w: u32, h: u32, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
}

fn legend(out: &mut String, labels: &[String], x: f64, y0: f64) {
    for (i, l) in labels.iter().enumerate() {
        let y = y0 + 22.0 * i as f64;
        let c = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="14" height="14" fill="{c}" fill-opacity="0.6"/><text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            num(x), num(y), num(x + 20.0), num(y + 12.0), escape(l)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_rings(cover: &Cover, title: &str) -> Result<String> {
    let rows = circle_memberships(cover)?;
    let labels = set_labels(cover);
    let k = cover.len();
    let (inner, width, gap) = (60.0, 18.0, 4.0);
    let outer = inner + k as f64 * (width + gap);
    let size = 2.0 * outer + 40.0;
    let (cx, cy) = (size / 2.0, size / 2.0);
    let mut out = String::new();
    header(&mut out, (size + 120.0) as u32, size as u32, title);
    let _ = writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#000000" stroke-width="1"/>"##,
        num(cx), num(cy), num(inner - gap)
    );
    for s in 0..k {
        let r0 = inner + s as f64 * (width + gap);
        let color = PALETTE[s % PALETTE.len()];
        let mut d = String::new();
        for (a0, a1) in cyclic_runs(rows.iter().map(|r| r[s]), AZIMUTH_STEPS) {
            d.push_str(&sector_wrapping(cx, cy, r0, r0 + width, a0, a1));
        }
        let _ = writeln!(
            out,
            r#"<path id="set{}" class="ring" d="{d}" fill="{color}" fill-opacity="0.6" fill-rule="evenodd"/>"#,
            s + 1
        );
    }
    // Mark azimuth 0 (the point (1, 0)) and the poles of S^1.
    let _ = writeln!(
        out,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#000000" stroke-dasharray="4 3"/>"##,
        num(cx - outer), num(cy), num(cx + outer), num(cy)
    );
    legend(&mut out, &labels, size, 20.0);
    out.push_str("</svg>\n");
    Ok(out)
}

fn render_disk(cover: &Cover, view: View, title: &str) -> Result<String> {
    let k = cover.len();
    let labels = set_labels(cover);
    let radius = 300.0;
    let size = 2.0 * radius + 40.0;
    let (cx, cy) = (size / 2.0, size / 2.0);
    let sign = if view == View::North { 1.0 } else { -1.0 };
    let dphi = std::f64::consts::FRAC_PI_2 / RADIAL_STEPS as f64;
    // memberships[j][a][s]: ring j (polar angle from the visible pole), azimuth a.
    let ring = |j: usize| -> Result<Vec<Vec<bool>>> {
        let phi = (j as f64 + 0.5) * dphi;
        (0..AZIMUTH_STEPS)
            .map(|a| {
                let t = azimuth(a) + std::f64::consts::PI / AZIMUTH_STEPS as f64;
                // Seen from below, x is mirrored so the picture is what an
                // observer at the south pole sees.
                let x = sign * phi.sin() * t.cos();
                let p = ApproxPoint::new(vec![x, phi.sin() * t.sin(), sign * phi.cos()])?;
                Ok(cover.evaluate(&p)?.members)
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    let grid: Vec<Vec<Vec<bool>>> = {
        use rayon::prelude::*;
        (0..RADIAL_STEPS).into_par_iter().map(ring).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let grid: Vec<Vec<Vec<bool>>> = (0..RADIAL_STEPS).map(ring).collect::<Result<_>>()?;

    let mut out = String::new();
    header(&mut out, (size + 120.0) as u32, size as u32, title);
    for s in 0..k {
        let color = PALETTE[s % PALETTE.len()];
        let mut d = String::new();
        for (j, row) in grid.iter().enumerate() {
            let r0 = radius * (j as f64 * dphi).sin();
            let r1 = radius * ((j + 1) as f64 * dphi).sin();
            for (a0, a1) in cyclic_runs(row.iter().map(|m| m[s]), AZIMUTH_STEPS) {
                d.push_str(&sector_wrapping(cx, cy, r0, r1, a0, a1));
            }
        }
        let _ = writeln!(
            out,
            r#"<path id="set{}" class="region" d="{d}" fill="{color}" fill-opacity="0.3" fill-rule="evenodd"/>"#,
            s + 1
        );
    }
    let _ = writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#000000" stroke-width="1.5"/>"##,
        num(cx), num(cy), num(radius)
    );
    legend(&mut out, &labels, size, 20.0);
    out.push_str("</svg>\n");
    Ok(out)
}

/// SVG 1.1 picture of `cover` from the given view.
pub fn render_svg(cover: &Cover, view: View) -> Result<String> {
    let title = format!("{} cover of S^{} ({} sets), {:?} view", cover.provenance().construction, cover.dim(), cover.len(), view);
    match (cover.dim(), view) {
        (1, View::Equator) | (2, View::Equator) => render_rings(cover, &title),
        (2, _) => render_disk(cover, view, &title),
        (1, _) => Err(Error::InvalidParameter("S^1 covers only have the equator (ring) view".into())),
        (d, _) => Err(Error::InvalidParameter(format!("rendering supports d = 1 or 2, got d = {d}"))),
    }
}
