//! Samplers for level sets, moment images and degenerate fibers.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FiberChart, ReducedPoint, SolverOptions};
use crate::moment::{moment_vector, MomentVector};
use crate::plucker::PluckerLine;
use crate::projective::{HomogeneousVector, ProjectiveSubspace};
use crate::rng::{complex_gaussian_vector, item_rng, real_gaussian_vector};
use crate::tol::TAU_SUB;
use crate::{CVector, Error, Result, C64};

/// Chart moduli are sampled with `ln |a_j|` uniform on `[−R, R]`.
pub const LOG_MODULUS_RANGE: f64 = 10.0;

fn embed_block(n: usize, k: usize, block: CVector) -> CVector {
    let mut v = CVector::zeros(n + 1);
    v.rows_mut(k, n + 1 - k).copy_from(&block);
    v
}

/// Random base point: Gaussian `l₀` in `⟨p_k, …, p_n⟩` and Gaussian points
/// on it, all real when `real` is set.
pub fn random_base<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R, real: bool) -> Result<ReducedPoint> {
    if k + 1 > n {
        return Err(Error::InvalidArgument(format!("need k ≤ n − 1, got k = {k}, n = {n}")));
    }
    let block = n + 1 - k;
    let mut draw = |len: usize| if real { real_gaussian_vector(rng, len) } else { complex_gaussian_vector(rng, len) };
    let (g1, g2) = loop {
        let g1 = embed_block(n, k, draw(block));
        let g2 = embed_block(n, k, draw(block));
        if ProjectiveSubspace::span(&[g1.clone(), g2.clone()]).is_ok_and(|l| l.proj_dim() == 1) {
            break (g1, g2);
        }
    };
    let l0 = ProjectiveSubspace::span(&[g1.clone(), g2.clone()])?;
    let s = (0..k)
        .map(|_| loop {
            let c = draw(2);
            if let Ok(p) = HomogeneousVector::new(&g1 * c[0] + &g2 * c[1]) {
                break p;
            }
        })
        .collect();
    ReducedPoint::new(n, k, l0, s)
}

fn uniform_angles<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

/// `count` points of `μ̃⁻¹(c)` over random bases, with uniform torus angles.
pub fn sample_level_set(n: usize, k: usize, c: &MomentVector, count: usize, seed: u64, real: bool) -> Result<Vec<PluckerLine>> {
    if c.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: c.len() });
    }
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = item_rng(seed, index as u64);
            let base = random_base(n, k, &mut rng, real)?;
            let angles = uniform_angles(&mut rng, k);
            let solve = || -> Result<PluckerLine> {
                let chart = FiberChart::new(&base)?;
                let moduli = chart.solve_moduli(c, &SolverOptions::default())?;
                chart.point(&moduli, &angles)
            };
            solve().map_err(|e| Error::SampleFailed { index, base: base.describe(), source: Box::new(e) })
        })
        .collect()
}

fn random_chart_coords<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<C64> {
    (0..k)
        .map(|_| {
            let log_modulus = rng.random_range(-LOG_MODULUS_RANGE..=LOG_MODULUS_RANGE);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            C64::from_polar(log_modulus.exp(), phase)
        })
        .collect()
}

/// Moment vectors of `count` chart points over `base`.
pub fn moment_image_sample(base: &ReducedPoint, count: usize, seed: u64) -> Result<Vec<MomentVector>> {
    let chart = FiberChart::new(base)?;
    let k = base.k();
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = item_rng(seed, index as u64);
            let a = random_chart_coords(&mut rng, k);
            Ok(moment_vector(&chart.line(&a)?, k))
        })
        .collect()
}

/// Summary of a fiber over a base with one coincident pair `s_i = s_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateFiberReport {
    pub pair: (usize, usize),
    pub samples: usize,
    /// Largest `|w_ij|` over the solved level-set points.
    pub max_coupling: f64,
    pub max_moment_residual: f64,
    /// Largest `Σ μ̃` over random chart points.
    pub max_chart_sum: f64,
}

fn coincident_pair(base: &ReducedPoint) -> Result<(usize, usize)> {
    let s = base.s();
    let mut found = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if s[i].angle_to(&s[j]) < TAU_SUB {
                found.push((i, j));
            }
        }
    }
    match found.as_slice() {
        [pair] => Ok(*pair),
        [] => Err(Error::InvalidBase("no coincident pair of marked points".into())),
        _ => Err(Error::InvalidBase(format!("expected exactly one coincident pair, found {found:?}"))),
    }
}

/// Solves the level set over a degenerate base at random angles and checks
/// which component of the fiber the chart lands in.
pub fn degenerate_fiber_check(base: &ReducedPoint, c: &MomentVector, count: usize, seed: u64) -> Result<DegenerateFiberReport> {
    let pair = coincident_pair(base)?;
    let k = base.k();
    let chart = FiberChart::new(base)?;
    let moduli = chart.solve_moduli(c, &SolverOptions::default())?;
    let per_sample = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = item_rng(seed, index as u64);
            let w = chart.point(&moduli, &uniform_angles(&mut rng, k))?;
            let coupling = w.get(pair.0, pair.1).norm();
            let residual = moment_vector(&w, k).distance(c);
            let probe = chart.line(&random_chart_coords(&mut rng, k))?;
            Ok((coupling, residual, moment_vector(&probe, k).sum()))
        })
        .collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&(f64, f64, f64)) -> f64| per_sample.iter().map(f).fold(0.0, f64::max);
    Ok(DegenerateFiberReport {
        pair,
        samples: count,
        max_coupling: fold(|t| t.0),
        max_moment_residual: fold(|t| t.1),
        max_chart_sum: fold(|t| t.2),
    })
}

