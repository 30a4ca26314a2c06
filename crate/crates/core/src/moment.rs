//! Moment maps of the coordinate torus action.
//!
//! On `CP^n` the `i`-th generator rotates `z_i ↦ e^{iθ} z_i` with moment
//! `μ_i = |z_i|² / |z|²`. On `Gr(1, n)` the induced moment `μ̃_i` has two
//! independent expressions: the maximum of `|⟨e_i, v⟩|²` over unit vectors
//! of the line's 2-plane, and the rational function
//! `Σ_{j≠i} |w_ij|² / Σ |w|²` of the Plücker coordinates.

use serde::{Deserialize, Serialize};

use crate::plucker::{pairs, PluckerLine, PluckerTangent};
use crate::projective::{HomogeneousVector, ProjectiveSubspace};
use crate::tol::TAU_OPEN;
use crate::{CVector, Error, Result, C64};

/// Values `(μ̃_0, …, μ̃_{k-1})`, or a tuple of moment targets `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    /// Values must lie in `[0, 1]` (up to `1e-12`).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&v| !(v >= -1e-12 && v <= 1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("moment value {bad} outside [0, 1]")));
        }
        Ok(Self { values })
    }

    /// An admissible tuple of targets: every `c_i > τ_open` and
    /// `Σ c_i < 1 − τ_open`.
    pub fn target(values: Vec<f64>) -> Result<Self> {
        let v = Self::new(values)?;
        if !v.is_admissible_target() {
            return Err(Error::InvalidArgument(format!(
                "moment targets {:?} must satisfy c_i > {TAU_OPEN:e} and sum < 1 - {TAU_OPEN:e}",
                v.values
            )));
        }
        Ok(v)
    }

    pub fn is_admissible_target(&self) -> bool {
        self.values.iter().all(|&c| c > TAU_OPEN) && self.sum() < 1.0 - TAU_OPEN
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sup-norm distance.
    pub fn distance(&self, other: &MomentVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(if self.len() == other.len() { 0.0 } else { f64::INFINITY }, f64::max)
    }
}

/// `μ_i(z) = |z_i|² / Σ|z_j|²` on `CP^n`.
pub fn mu_cp(z: &HomogeneousVector, i: usize) -> f64 {
    let e = z.entries();
    e[i].norm_sqr() / e.norm_squared()
}

/// `μ̃_i(l) = max_{v ∈ V, |v| = 1} |⟨e_i, v⟩|²`, evaluated as `|u_i|² + |v_i|²`
/// for an orthonormal basis `(u, v)` of the plane `V`.
pub fn mu_grass_max(line: &ProjectiveSubspace, i: usize) -> Result<f64> {
    if line.proj_dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a line, got projective dimension {}",
            line.proj_dim()
        )));
    }
    let b = line.basis();
    Ok(b[(i, 0)].norm_sqr() + b[(i, 1)].norm_sqr())
}

/// `μ̃_i = Σ_{j≠i} |w_ij|² / Σ|w|²`.
pub fn mu_grass_plucker(w: &PluckerLine, i: usize) -> f64 {
    let n = w.n();
    let num: f64 = (0..=n).filter(|&j| j != i).map(|j| w.get(i, j).norm_sqr()).sum();
    num / w.coords().norm_squared()
}

/// `(μ̃_0, …, μ̃_{k-1})`.
pub fn moment_vector(w: &PluckerLine, k: usize) -> MomentVector {
    MomentVector { values: (0..k).map(|i| mu_grass_plucker(w, i)).collect() }
}

/// Charge vector of generator `i`: 1 on coordinates `w_ab` with `i ∈ {a, b}`.
fn charges(n: usize, i: usize) -> impl Iterator<Item = f64> {
    pairs(n).map(move |(a, b)| if a == i || b == i { 1.0 } else { 0.0 })
}

/// Flow of the `i`-th generator by angle `theta`.
pub fn torus_flow(w: &PluckerLine, i: usize, theta: f64) -> PluckerLine {
    let phase = C64::from_polar(1.0, theta);
    let coords = CVector::from_iterator(
        w.coords().len(),
        w.coords().iter().zip(charges(w.n(), i)).map(|(z, q)| if q > 0.0 { z * phase } else { *z }),
    );
    PluckerLine::from_parts_unchecked(w.n(), coords)
}

/// Hamiltonian vector field of `μ̃_i`: the gauge-projected derivative of the
/// flow at `θ = 0`.
pub fn hamiltonian_field(w: &PluckerLine, i: usize) -> PluckerTangent {
    let raw = CVector::from_iterator(
        w.coords().len(),
        w.coords().iter().zip(charges(w.n(), i)).map(|(z, q)| z * C64::new(0.0, q)),
    );
    PluckerTangent::project(w, raw)
}

/// `dμ̃_i(Y)` from the quotient rule of the rational formula.
pub fn dmu_grass(w: &PluckerLine, i: usize, y: &PluckerTangent) -> f64 {
    let coords = w.coords();
    let norm2 = coords.norm_squared();
    let mu = mu_grass_plucker(w, i);
    let weighted: C64 = coords
        .iter()
        .zip(y.vector().iter())
        .zip(charges(w.n(), i))
        .map(|((z, dz), q)| z.conj() * dz * q)
        .sum();
    let radial = coords.dotc(y.vector()).re;
    2.0 * (weighted.re - mu * radial) / norm2
}

/// Residual of `μ̃_0 + μ̃_1 = 1 + (|w_01|² − Σ_{2≤i<j}|w_ij|²) / Σ|w|²`;
/// for `n = 3` the subtracted sum is the single term `|w_23|²`.
pub fn sum_identity_residual(w: &PluckerLine) -> f64 {
    let n = w.n();
    let total = w.coords().norm_squared();
    let far: f64 = pairs(n).filter(|&(a, _)| a >= 2).map(|(a, b)| w.get(a, b).norm_sqr()).sum();
    let rhs = 1.0 + (w.get(0, 1).norm_sqr() - far) / total;
    (mu_grass_plucker(w, 0) + mu_grass_plucker(w, 1) - rhs).abs()
}
