//! The Delzant polytope `{0 ≤ x_i ≤ 1, Σ x_i ≤ 2}` and planar hull helpers.

use serde::{Deserialize, Serialize};

use crate::moment::MomentVector;
use crate::{Error, Result};

/// `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    /// Positive part of `normal · x − offset`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.normal.iter().zip(x).map(|(a, b)| a * b).sum();
        (lhs - self.offset).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelzantPolytope {
    k: usize,
    half_spaces: Vec<HalfSpace>,
}

impl DelzantPolytope {
    /// The unit cube in `ℝ^k` cut by `Σ x_i ≤ 2`.
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("polytope dimension must be positive".into()));
        }
        let unit = |i: usize, s: f64| {
            let mut v = vec![0.0; k];
            v[i] = s;
            v
        };
        let mut half_spaces = Vec::with_capacity(2 * k + 1);
        for i in 0..k {
            half_spaces.push(HalfSpace { normal: unit(i, -1.0), offset: 0.0 });
            half_spaces.push(HalfSpace { normal: unit(i, 1.0), offset: 1.0 });
        }
        half_spaces.push(HalfSpace { normal: vec![1.0; k], offset: 2.0 });
        Ok(Self { k, half_spaces })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn half_spaces(&self) -> &[HalfSpace] {
        &self.half_spaces
    }

    /// 0/1 vectors with at most two ones.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let k = self.k;
        let mut out = vec![vec![0.0; k]];
        for i in 0..k {
            let mut v = vec![0.0; k];
            v[i] = 1.0;
            out.push(v);
        }
        for i in 0..k {
            for j in i + 1..k {
                let mut v = vec![0.0; k];
                v[i] = 1.0;
                v[j] = 1.0;
                out.push(v);
            }
        }
        out
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.half_spaces.iter().map(|h| h.violation(x)).fold(0.0, f64::max)
    }

    pub fn max_violation(&self, samples: &[MomentVector]) -> f64 {
        samples.iter().map(|m| self.violation(m.values())).fold(0.0, f64::max)
    }

    /// Upper estimate of the Hausdorff distance between the polytope and the
    /// convex hull of `samples`.
    ///
    /// The hull-to-polytope part is the largest half-space violation. The
    /// polytope-to-hull distance is a convex function, so it peaks at a
    /// vertex; for `k = 2` it is computed exactly against the hull polygon,
    /// otherwise bounded by the distance to the nearest sample.
    pub fn hausdorff_estimate(&self, samples: &[MomentVector]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("no samples".into()));
        }
        if let Some(bad) = samples.iter().find(|m| m.len() != self.k) {
            return Err(Error::DimensionMismatch { expected: self.k, actual: bad.len() });
        }
        let outward = self.max_violation(samples);
        let inward = if self.k == 2 {
            let points: Vec<[f64; 2]> = samples.iter().map(|m| [m.values()[0], m.values()[1]]).collect();
            let hull = convex_hull_2d(&points);
            self.vertices()
                .iter()
                .map(|v| distance_to_polygon([v[0], v[1]], &hull))
                .fold(0.0, f64::max)
        } else {
            self.vertices()
                .iter()
                .map(|v| {
                    samples
                        .iter()
                        .map(|m| m.values().iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>())
                        .fold(f64::INFINITY, f64::min)
                        .sqrt()
                })
                .fold(0.0, f64::max)
        };
        Ok(outward.max(inward))
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, without
/// collinear points.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(polygon: &[[f64; 2]]) -> f64 {
    let m = polygon.len();
    if m < 3 {
        return 0.0;
    }
    let twice: f64 = (0..m)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    0.5 * twice.abs()
}

fn distance_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)).sqrt()
}

/// Distance from `p` to a counter-clockwise convex polygon (zero inside).
fn distance_to_polygon(p: [f64; 2], hull: &[[f64; 2]]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => distance_to_segment(p, hull[0], hull[0]),
        m => {
            let inside = m >= 3 && (0..m).all(|i| cross(hull[i], hull[(i + 1) % m], p) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..m).map(|i| distance_to_segment(p, hull[i], hull[(i + 1) % m])).fold(f64::INFINITY, f64::min)
        }
    }
}
