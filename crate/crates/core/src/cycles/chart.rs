//! Local charts of a cycle and the reconstruction pipeline
//! `params → base → level-set point → torus orbit`.
//!
//! Parameter layout, `2(n − 1)` reals in total:
//!
//! * `x_1 … x_{b−2}, y_1 … y_{b−2}` with `b = n − k + 1`: the real plane
//!   `l₀ = span(E1 + Σ x_t C_t, E2 + Σ y_t C_t)` around a real orthonormal
//!   pair `(E1, E2)` of `⟨p_k, …, p_n⟩` with real complement `C_t`;
//! * one angle per unpaired marked point, `s_j = cos(ψ_j + t) g1 + sin(ψ_j + t) g2`;
//! * two coordinates per pair `(i, j)`, a complex affine chart of the point
//!   `s_i ∈ l₀ ≅ CP¹` around a random centre, with `s_j = conj(s_i)`;
//! * `k` torus angles.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use super::CycleDescriptor;
use crate::moment::moment_vector;
use crate::plucker::PluckerLine;
use crate::projective::Conjugate;
use crate::reduction::{project_to_base, FiberChart, ReducedPoint, SolverOptions};
use crate::rng::{complex_gaussian, item_rng};
use crate::{CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
enum MarkedChart {
    Real { psi: f64 },
    /// `(α, β) = centre + ζ · normal`.
    Lead { centre: [C64; 2], normal: [C64; 2] },
    Follow { lead: usize },
}

/// A chart of the cycle around a randomly drawn point of its base locus.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleChart {
    descriptor: CycleDescriptor,
    frame: [CVector; 2],
    complement: Vec<CVector>,
    marked: Vec<MarkedChart>,
}

fn real_vector(n: usize, offset: usize, entries: impl Iterator<Item = f64>) -> CVector {
    let mut v = CVector::zeros(n + 1);
    for (t, x) in entries.enumerate() {
        v[offset + t] = C64::new(x, 0.0);
    }
    v
}

impl CycleChart {
    pub fn random<R: Rng + ?Sized>(descriptor: &CycleDescriptor, rng: &mut R) -> Self {
        let (n, k) = (descriptor.n(), descriptor.k());
        let b = n + 1 - k;
        let gauss = DMatrix::<f64>::from_fn(b, b, |_, _| rng.sample(rand_distr::StandardNormal));
        let q = gauss.qr().q();
        let column = |t: usize| real_vector(n, k, q.column(t).iter().copied());
        let frame = [column(0), column(1)];
        let complement = (2..b).map(column).collect();

        let marked = (0..k)
            .map(|j| match descriptor.partner(j) {
                None => MarkedChart::Real { psi: rng.random_range(0.0..std::f64::consts::PI) },
                Some(p) if p < j => MarkedChart::Follow { lead: p },
                Some(_) => {
                    let (a, b) = (complex_gaussian(rng), complex_gaussian(rng));
                    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                    let centre = [a / norm, b / norm];
                    MarkedChart::Lead { centre, normal: [-centre[1].conj(), centre[0].conj()] }
                }
            })
            .collect();
        Self { descriptor: descriptor.clone(), frame, complement, marked }
    }

    pub fn descriptor(&self) -> &CycleDescriptor {
        &self.descriptor
    }

    pub fn param_count(&self) -> usize {
        self.descriptor.dimension()
    }

    /// Index of the first torus angle in the parameter vector.
    pub fn angle_offset(&self) -> usize {
        self.descriptor.base_dim()
    }

    fn check(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch { expected: self.param_count(), actual: params.len() });
        }
        Ok(())
    }

    /// Frame `(g1, g2)` of `l₀` and the coordinates of each `s_j` in it.
    fn frame_and_marks(&self, params: &[f64]) -> (CVector, CVector, Vec<(C64, C64)>) {
        let c = self.complement.len();
        let mut g1 = self.frame[0].clone();
        let mut g2 = self.frame[1].clone();
        for (t, ct) in self.complement.iter().enumerate() {
            g1 += ct * C64::new(params[t], 0.0);
            g2 += ct * C64::new(params[c + t], 0.0);
        }
        let mut cursor = 2 * c;
        let mut coeffs: Vec<(C64, C64)> = Vec::with_capacity(self.marked.len());
        for mark in &self.marked {
            let coeff = match mark {
                MarkedChart::Real { psi } => {
                    let t = psi + params[cursor];
                    cursor += 1;
                    (C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0))
                }
                MarkedChart::Lead { centre, normal } => {
                    let zeta = C64::new(params[cursor], params[cursor + 1]);
                    cursor += 2;
                    (centre[0] + zeta * normal[0], centre[1] + zeta * normal[1])
                }
                MarkedChart::Follow { lead } => {
                    let (a, b) = coeffs[*lead];
                    (a.conj(), b.conj())
                }
            };
            coeffs.push(coeff);
        }
        (g1, g2, coeffs)
    }

    pub fn fiber_chart(&self, params: &[f64]) -> Result<FiberChart> {
        self.check(params)?;
        let (g1, g2, coeffs) = self.frame_and_marks(params);
        FiberChart::with_frame(self.descriptor.n(), self.descriptor.k(), g1, g2, coeffs)
    }

    pub fn base(&self, params: &[f64]) -> Result<ReducedPoint> {
        Ok(self.fiber_chart(params)?.base().clone())
    }

    /// The point of the cycle with chart coordinates `params`.
    pub fn evaluate(&self, params: &[f64]) -> Result<PluckerLine> {
        let chart = self.fiber_chart(params)?;
        let moduli = chart.solve_moduli(self.descriptor.c(), &SolverOptions::default())?;
        chart.point(&moduli, &params[self.angle_offset()..])
    }
}

/// A point of a cycle with the chart that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSamplePoint {
    pub params: Vec<f64>,
    pub line: PluckerLine,
    pub chart: CycleChart,
}

impl CycleSamplePoint {
    /// Sample `index` of the batch seeded with `seed`: chart centred at a
    /// random base point, uniform torus angles.
    pub fn draw(descriptor: &CycleDescriptor, seed: u64, index: usize) -> Result<Self> {
        let mut rng = item_rng(seed, index as u64);
        let chart = CycleChart::random(descriptor, &mut rng);
        let mut params = vec![0.0; chart.param_count()];
        for theta in &mut params[chart.angle_offset()..] {
            *theta = rng.random_range(0.0..std::f64::consts::TAU);
        }
        let line = chart.evaluate(&params).map_err(|e| Error::SampleFailed {
            index,
            base: chart.base(&params).map(|b| b.describe()).unwrap_or_else(|_| "unavailable".into()),
            source: Box::new(e),
        })?;
        Ok(Self { params, line, chart })
    }
}

/// Base points of the cycle; the same streams as [`lift_cycle_sample`].
pub fn sample_base_cycle(descriptor: &CycleDescriptor, count: usize, seed: u64) -> Result<Vec<ReducedPoint>> {
    (0..count)
        .into_par_iter()
        .map(|index| {
            let chart = CycleChart::random(descriptor, &mut item_rng(seed, index as u64));
            chart.base(&vec![0.0; chart.param_count()])
        })
        .collect()
}

pub fn lift_cycle_sample(descriptor: &CycleDescriptor, count: usize, seed: u64) -> Result<Vec<CycleSamplePoint>> {
    (0..count).into_par_iter().map(|index| CycleSamplePoint::draw(descriptor, seed, index)).collect()
}

/// Conjugation followed by `z_i ↔ z_j` for every pair.
pub fn nonstandard_involution(descriptor: &CycleDescriptor, w: &PluckerLine) -> PluckerLine {
    descriptor.pairs().iter().fold(w.conjugate(), |acc, &(i, j)| acc.swap_coordinates(i, j))
}

/// How far `w` is from the cycle: the moment residual together with the
/// failure of its base to be real (unpaired points) or conjugate (pairs).
pub fn membership_residual(descriptor: &CycleDescriptor, w: &PluckerLine) -> Result<f64> {
    let k = descriptor.k();
    let base = project_to_base(&w.to_line()?, k)?;
    let mut worst = moment_vector(w, k).distance(descriptor.c());
    worst = worst.max(base.l0().max_principal_angle(&base.l0().conjugate())?);
    for j in 0..k {
        let target = match descriptor.partner(j) {
            Some(p) => base.s()[p].clone(),
            None => base.s()[j].clone(),
        };
        worst = worst.max(base.s()[j].angle_to(&target.conjugate()));
    }
    Ok(worst)
}
