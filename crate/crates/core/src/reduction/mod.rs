//! Reduction of `Gr(1, n)` by the torus generated by `μ̃_0, …, μ̃_{k-1}`.
//!
//! A line `l` skew to `P = ⟨p_0, …, p_{k-1}⟩` determines the line
//! `l₀ = ⟨l, P⟩ ∩ ⟨p_k, …, p_n⟩` and points `s_j ∈ l₀`: the point of `l` on
//! `⟨l₀, p_m : m ≠ j⟩`, projected from `⟨p_m : m ≠ j⟩` onto `l₀`. The data
//! `(l₀, s_0, …, s_{k-1})` is constant on torus orbits, and the level sets of
//! the moments inside each fiber are `k`-tori.

mod chart;
mod polytope;
mod sampling;

pub use chart::{FiberChart, SolverOptions};
pub use polytope::{convex_hull_2d, polygon_area, DelzantPolytope, HalfSpace};
pub use sampling::{
    degenerate_fiber_check, moment_image_sample, random_base, sample_level_set, DegenerateFiberReport,
    LOG_MODULUS_RANGE,
};

use crate::moment::{moment_vector, torus_flow, MomentVector};
use crate::plucker::PluckerLine;
use crate::projective::{join, meet, project_from_center, Conjugate, HomogeneousVector, ProjectiveSubspace};
use crate::tol::{TAU_OPEN, TAU_SUB};
use crate::{CMatrix, Error, Result};

/// Whether `w` lies in the open stratum `Gr⁰(1, n)`:
/// `μ̃_i > τ_open` for `i < k` and `Σ μ̃_i < 1 − τ_open`.
pub fn in_gr0(w: &PluckerLine, k: usize) -> bool {
    let mv = moment_vector(w, k);
    mv.values().iter().all(|&x| x > TAU_OPEN) && mv.sum() < 1.0 - TAU_OPEN
}

/// `⟨p_k, …, p_n⟩`.
pub fn base_block(n: usize, k: usize) -> Result<ProjectiveSubspace> {
    ProjectiveSubspace::coordinate(n, &(k..=n).collect::<Vec<_>>())
}

/// A point of the reduced space: a line `l₀ ⊂ ⟨p_k, …, p_n⟩` with `k`
/// marked points on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPoint {
    n: usize,
    k: usize,
    l0: ProjectiveSubspace,
    s: Vec<HomogeneousVector>,
}

impl ReducedPoint {
    pub fn new(n: usize, k: usize, l0: ProjectiveSubspace, s: Vec<HomogeneousVector>) -> Result<Self> {
        if k + 1 > n {
            return Err(Error::InvalidBase(format!("need k ≤ n − 1, got k = {k}, n = {n}")));
        }
        if l0.ambient_dim() != n || l0.proj_dim() != 1 {
            return Err(Error::InvalidBase("l0 must be a line of CP^n".into()));
        }
        if s.len() != k {
            return Err(Error::InvalidBase(format!("expected {k} marked points, got {}", s.len())));
        }
        let block = base_block(n, k)?;
        let off_block = block.containment_angle(&l0);
        if off_block >= TAU_SUB {
            return Err(Error::InvalidBase(format!("l0 leaves ⟨p_k..p_n⟩ by {off_block:e} rad")));
        }
        for (j, point) in s.iter().enumerate() {
            let angle = l0.angle_to_point(point);
            if point.ambient_dim() != n || angle >= TAU_SUB {
                return Err(Error::InvalidBase(format!("s_{j} is off l0 by {angle:e} rad")));
            }
        }
        Ok(Self { n, k, l0, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l0(&self) -> &ProjectiveSubspace {
        &self.l0
    }

    pub fn s(&self) -> &[HomogeneousVector] {
        &self.s
    }

    /// Largest angle between corresponding data of two base points.
    pub fn discrepancy(&self, other: &ReducedPoint) -> f64 {
        if self.n != other.n || self.k != other.k {
            return f64::INFINITY;
        }
        let l0 = self.l0.max_principal_angle(&other.l0).unwrap_or(f64::INFINITY);
        self.s.iter().zip(&other.s).map(|(a, b)| a.angle_to(b)).fold(l0, f64::max)
    }

    /// Image under a linear map preserving `⟨p_k, …, p_n⟩`.
    pub fn transform(&self, map: &CMatrix) -> Result<Self> {
        let l0 = self.l0.transform(map)?;
        let s = self
            .s
            .iter()
            .map(|p| HomogeneousVector::new(map * p.entries()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.n, self.k, l0, s)
    }

    /// Swaps the marked points `s_a`, `s_b`.
    pub fn swap_points(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        out.s.swap(a, b);
        out
    }

    /// Short human-readable summary for diagnostics.
    pub fn describe(&self) -> String {
        let fmt = |v: &crate::CVector| {
            let parts: Vec<String> = v.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
            format!("[{}]", parts.join(", "))
        };
        let b = self.l0.basis();
        let mut out = format!(
            "n={} k={} l0=span({}, {})",
            self.n,
            self.k,
            fmt(&b.column(0).into_owned()),
            fmt(&b.column(1).into_owned())
        );
        for (j, p) in self.s.iter().enumerate() {
            out.push_str(&format!(" s{j}={}", fmt(&p.normalized())));
        }
        out
    }
}

impl Conjugate for ReducedPoint {
    fn conjugate(&self) -> Self {
        Self {
            n: self.n,
            k: self.k,
            l0: self.l0.conjugate(),
            s: self.s.iter().map(|p| p.conjugate()).collect(),
        }
    }
}

fn not_in_chart(what: impl Into<String>) -> Error {
    Error::NotInChart(what.into())
}

/// The projection `l ↦ (l₀, s_0, …, s_{k-1})`.
///
/// Defined wherever the intermediate meets are proper: `l` skew to
/// `⟨p_0, …, p_{k-1}⟩` and no `μ̃_j` vanishing. This is a neighbourhood of
/// `Gr⁰(1, n)`, not only the stratum itself.
pub fn project_to_base(line: &ProjectiveSubspace, k: usize) -> Result<ReducedPoint> {
    if line.proj_dim() != 1 {
        return Err(Error::InvalidArgument("project_to_base expects a line".into()));
    }
    let n = line.ambient_dim();
    if k + 1 > n {
        return Err(Error::InvalidArgument(format!("need k ≤ n − 1, got k = {k}, n = {n}")));
    }
    if k == 0 {
        return ReducedPoint::new(n, 0, line.clone(), Vec::new());
    }
    let hull = ProjectiveSubspace::coordinate(n, &(0..k).collect::<Vec<_>>())?;
    if meet(line, &hull)?.is_some() {
        return Err(not_in_chart("line meets ⟨p_0, …, p_{k-1}⟩"));
    }
    let h_l = join(&[line, &hull])?;
    let l0 = meet(&h_l, &base_block(n, k)?)?
        .filter(|m| m.proj_dim() == 1)
        .ok_or_else(|| not_in_chart("⟨l, p_0, …, p_{k-1}⟩ does not cut ⟨p_k, …, p_n⟩ in a line"))?;

    let mut s = Vec::with_capacity(k);
    for j in 0..k {
        let others: Vec<usize> = (0..k).filter(|&m| m != j).collect();
        let center = if others.is_empty() { None } else { Some(ProjectiveSubspace::coordinate(n, &others)?) };
        let span = match &center {
            Some(c) => join(&[&l0, c])?,
            None => l0.clone(),
        };
        let s0 = meet(&span, line)?
            .filter(|m| m.proj_dim() == 0)
            .ok_or_else(|| not_in_chart(format!("s_{j}: line does not meet ⟨l0, p_m : m ≠ {j}⟩ in a point")))?;
        let x = HomogeneousVector::new(s0.basis().column(0).into_owned())?;
        let sj = match &center {
            Some(c) => project_from_center(&x, c, &l0).map_err(|e| not_in_chart(format!("s_{j}: {e}")))?,
            None => x,
        };
        s.push(sj);
    }
    ReducedPoint::new(n, k, l0, s)
}

/// Flows by `angles[i]` along generator `i` for `i = 0, …, len − 1`.
pub fn torus_orbit(w: &PluckerLine, angles: &[f64]) -> PluckerLine {
    angles.iter().enumerate().fold(w.clone(), |acc, (i, &theta)| torus_flow(&acc, i, theta))
}

/// Solves for the point of the chart of `base` on the level set `μ̃ = c`,
/// with all torus angles zero.
pub fn solve_fiber_point(base: &ReducedPoint, c: &MomentVector) -> Result<PluckerLine> {
    let chart = FiberChart::new(base)?;
    let moduli = chart.solve_moduli(c, &SolverOptions::default())?;
    chart.point(&moduli, &vec![0.0; base.k()])
}
