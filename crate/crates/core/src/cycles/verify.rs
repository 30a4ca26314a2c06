//! Finite-difference tangent frames and the Lagrangian check.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CycleDescriptor, CycleSamplePoint};
use crate::plucker::{symplectic_form, tangent_from_curve, PluckerLine, PluckerTangent};
use crate::tol::{DEFAULT_FD_STEP, FRAME_RANK_CUTOFF, TAU_LAG};
use crate::{Error, Result};

/// Admissible range of the central-difference step.
pub const FRAME_STEP_RANGE: (f64, f64) = (1e-6, 1e-3);

/// Which frame the verifier pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameVariant {
    /// The chart tangents of the cycle.
    Standard,
    /// Negative control: the last tangent is replaced by `J` applied to the
    /// first one, which spans a complex line and must pair nontrivially.
    ComplexControl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub h: f64,
    pub variant: FrameVariant,
    /// Also evaluate every frame with step `h / 2`.
    pub richardson: bool,
    pub tau_lag: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { h: DEFAULT_FD_STEP, variant: FrameVariant::Standard, richardson: true, tau_lag: TAU_LAG }
    }
}

fn check_step(h: f64) -> Result<()> {
    let (lo, hi) = FRAME_STEP_RANGE;
    if h.is_finite() && h < lo {
        return Err(Error::StepTooSmall { h });
    }
    if !(h.is_finite() && h <= hi) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h:e} outside [{lo:e}, {hi:e}]")));
    }
    Ok(())
}

fn raw_frame(pt: &CycleSamplePoint, h: f64) -> Result<Vec<PluckerTangent>> {
    (0..pt.chart.param_count())
        .map(|a| {
            let family = |t: f64| {
                let mut p = pt.params.clone();
                p[a] += t;
                pt.chart.evaluate(&p)
            };
            tangent_from_curve(family, 0.0, h)
        })
        .collect()
}

/// Singular values of the frame as a real matrix with unit columns.
pub fn normalized_singular_values(frame: &[PluckerTangent]) -> DVector<f64> {
    let len = frame.first().map_or(0, |t| t.vector().len());
    let m = DMatrix::from_fn(2 * len, frame.len(), |i, j| {
        let t = &frame[j];
        let scale = if t.norm() > 0.0 { 1.0 / t.norm() } else { 0.0 };
        let z = t.vector()[i % len];
        scale * if i < len { z.re } else { z.im }
    });
    m.singular_values()
}

/// Central-difference tangents along all `2(n − 1)` chart parameters.
pub fn tangent_frame(pt: &CycleSamplePoint, h: f64) -> Result<Vec<PluckerTangent>> {
    check_step(h)?;
    let frame = raw_frame(pt, h)?;
    let smallest = normalized_singular_values(&frame).min();
    if !(smallest > FRAME_RANK_CUTOFF) {
        return Err(Error::RankDeficient { min_singular: smallest });
    }
    Ok(frame)
}

/// Largest `|ω(t_a, t_b)| / (‖t_a‖ ‖t_b‖)` over pairs `a < b`.
pub fn max_normalized_pairing(w: &PluckerLine, frame: &[PluckerTangent]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..frame.len() {
        for b in a + 1..frame.len() {
            let scale = frame[a].norm() * frame[b].norm();
            if scale > 0.0 {
                worst = worst.max(symplectic_form(w, &frame[a], &frame[b]).abs() / scale);
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub max_omega: Option<f64>,
    pub max_omega_half_step: Option<f64>,
    pub frame_rank: Option<usize>,
    pub min_singular: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianReport {
    pub descriptor: CycleDescriptor,
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
    pub variant: FrameVariant,
    pub tau_lag: f64,
    pub dimension: usize,
    pub per_sample: Vec<SampleOutcome>,
    pub global_max: f64,
    pub global_max_half_step: Option<f64>,
    /// `global_max / global_max_half_step`; about 4 when the pairing is
    /// truncation error, absent when the half-step maximum is exactly zero.
    pub richardson_ratio: Option<f64>,
    pub min_frame_rank: usize,
    pub failures: usize,
    pub pass: bool,
    pub wall_time_s: f64,
}

fn frame_for(pt: &CycleSamplePoint, h: f64, variant: FrameVariant) -> Result<Vec<PluckerTangent>> {
    let mut frame = raw_frame(pt, h)?;
    if variant == FrameVariant::ComplexControl {
        let rotated = frame[0].rotate();
        *frame.last_mut().expect("frames are never empty") = rotated;
    }
    Ok(frame)
}

fn evaluate_sample(d: &CycleDescriptor, seed: u64, index: usize, options: &VerifyOptions) -> SampleOutcome {
    let run = || -> Result<SampleOutcome> {
        let pt = CycleSamplePoint::draw(d, seed, index)?;
        let frame = frame_for(&pt, options.h, options.variant)?;
        let singular = normalized_singular_values(&frame);
        let half = if options.richardson {
            Some(max_normalized_pairing(&pt.line, &frame_for(&pt, options.h / 2.0, options.variant)?))
        } else {
            None
        };
        Ok(SampleOutcome {
            index,
            max_omega: Some(max_normalized_pairing(&pt.line, &frame)),
            max_omega_half_step: half,
            frame_rank: Some(singular.iter().filter(|&&s| s > FRAME_RANK_CUTOFF).count()),
            min_singular: Some(singular.min()),
            error: None,
        })
    };
    run().unwrap_or_else(|e| SampleOutcome {
        index,
        max_omega: None,
        max_omega_half_step: None,
        frame_rank: None,
        min_singular: None,
        error: Some(e.to_string()),
    })
}

/// Pairs the tangent frames of `count` cycle samples. Reconstruction
/// failures are recorded per sample and never abort the run.
pub fn verify_lagrangian(d: &CycleDescriptor, count: usize, seed: u64, options: &VerifyOptions) -> Result<LagrangianReport> {
    check_step(options.h)?;
    if count == 0 {
        return Err(Error::InvalidArgument("verify_lagrangian needs at least one sample".into()));
    }
    let start = Instant::now();
    let per_sample: Vec<SampleOutcome> =
        (0..count).into_par_iter().map(|index| evaluate_sample(d, seed, index, options)).collect();

    let ok: Vec<&SampleOutcome> = per_sample.iter().filter(|s| s.error.is_none()).collect();
    let failures = count - ok.len();
    let global_max = ok.iter().filter_map(|s| s.max_omega).fold(0.0, f64::max);
    let global_max_half_step =
        options.richardson.then(|| ok.iter().filter_map(|s| s.max_omega_half_step).fold(0.0, f64::max));
    let richardson_ratio = global_max_half_step.filter(|&half| half > 0.0).map(|half| global_max / half);
    let min_frame_rank = ok.iter().filter_map(|s| s.frame_rank).min().unwrap_or(0);
    let dimension = d.dimension();
    let pass = !ok.is_empty() && global_max < options.tau_lag && min_frame_rank == dimension;

    Ok(LagrangianReport {
        descriptor: d.clone(),
        samples: count,
        seed,
        h: options.h,
        variant: options.variant,
        tau_lag: options.tau_lag,
        dimension,
        per_sample,
        global_max,
        global_max_half_step,
        richardson_ratio,
        min_frame_rank,
        failures,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
