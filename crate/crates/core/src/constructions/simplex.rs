use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::ApproxPoint;
use crate::linalg::dot_f64;

/// Vertices of a regular simplex inscribed in `S^{d-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexFrame {
    pub d: usize,
    pub vertices: Vec<ApproxPoint>,
}

/// Coordinates of `e_i - centroid` in the Helmert basis of the centroid's
/// orthogonal complement, normalized.
pub fn simplex_frame(d: usize) -> Result<SimplexFrame> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("simplex frame needs d >= 2, got {d}")));
    }
    // Helmert vector k (1-based): (1, ..., 1, -k, 0, ...) / sqrt(k (k + 1)).
    let helmert = |k: usize, i: usize| -> f64 {
        let scale = ((k * (k + 1)) as f64).sqrt();
        match i.cmp(&k) {
            std::cmp::Ordering::Less => 1.0 / scale,
            std::cmp::Ordering::Equal => -(k as f64) / scale,
            std::cmp::Ordering::Greater => 0.0,
        }
    };
    let vertices = (0..=d)
        .map(|i| ApproxPoint::normalized((1..=d).map(|k| helmert(k, i)).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplexFrame { d, vertices })
}

impl SimplexFrame {
    pub fn raw_vertices(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.coords.clone()).collect()
    }
}

/// Facet projections containing `u`: the facet opposite `v_j` holds `u`
/// exactly when `<u, v_j>` is minimal, since the ray through `u` leaves the
/// simplex through that facet.
pub fn facet_multiplicity(frame: &SimplexFrame, u: &ApproxPoint, tol: f64) -> Result<(usize, Vec<usize>)> {
    if u.ambient() != frame.d {
        return Err(Error::DimensionMismatch { expected: frame.d, got: u.ambient() });
    }
    let dots: Vec<f64> = frame.vertices.iter().map(|v| dot_f64(&v.coords, &u.coords)).collect();
    let min = dots.iter().copied().fold(f64::INFINITY, f64::min);
    let idx: Vec<usize> = (0..dots.len()).filter(|&j| dots[j] <= min + tol).collect();
    Ok((idx.len(), idx))
}
