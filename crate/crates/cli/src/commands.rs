//! The subcommands. Each returns the text to print and the exit code:
//! 0 pass, 1 verification failure, 2 configuration error, 3 degraded run.

use std::fmt::Write as _;
use std::time::Instant;

use grreduce::cycles::{self, FrameVariant, TypeCensus, VerifyOptions, FRAME_STEP_RANGE};
use grreduce::moment::{dmu_grass, hamiltonian_field, moment_vector, mu_grass_max, mu_grass_plucker, sum_identity_residual, torus_flow};
use grreduce::plucker::{pair_count, pair_index, pairs, plucker_residual, symplectic_form, PluckerLine, PluckerTangent};
use grreduce::projective::random_line_with;
use grreduce::reduction::{convex_hull_2d, moment_image_sample, polygon_area, random_base, sample_level_set, DelzantPolytope};
use grreduce::rng::{complex_gaussian_vector, item_rng};
use grreduce::{CVector, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, Envelope, Flags, Format, Outcome, RunConfig, SCHEMA};

const EQUIVALENCE_TOL: f64 = 1e-10;
const SUM_IDENTITY_TOL: f64 = 1e-12;
const HAMILTONIAN_TOL: f64 = 1e-8;
const FLOW_TOL: f64 = 1e-12;
const HAUSDORFF_TOL: f64 = 0.05;
const CONTAINMENT_TOL: f64 = 1e-10;
const FLOW_ANGLES: [f64; 3] = [0.1, 1.0, 3.0];

fn to_json<T: Serialize>(command: &'static str, config: &RunConfig, body: T) -> Result<String, CliError> {
    let envelope = Envelope { schema: SCHEMA, command, config, body };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// A JSON report goes to `--out` when given, to stdout otherwise.
fn json_outcome(flags: &Flags, json: String, exit_code: i32) -> Result<Outcome, CliError> {
    match &flags.out {
        Some(path) => {
            write_file(path, &json)?;
            Ok(Outcome { exit_code, ..Outcome::default() })
        }
        None => Ok(Outcome { stdout: json, stderr: String::new(), exit_code }),
    }
}

/// CSV goes to `--out` or stdout; the JSON summary takes whichever stream
/// the CSV leaves free.
fn csv_outcome(flags: &Flags, csv: String, json: String, exit_code: i32) -> Result<Outcome, CliError> {
    match &flags.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(Outcome { stdout: json, stderr: String::new(), exit_code })
        }
        None => Ok(Outcome { stdout: csv, stderr: json, exit_code }),
    }
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn new(name: &'static str, max_residual: f64, tolerance: f64) -> Self {
        Self { name, max_residual, tolerance, pass: max_residual < tolerance }
    }
}

#[derive(Debug, Serialize)]
struct MomentBody {
    samples: usize,
    corrupt_injected: bool,
    checks: Vec<Check>,
    pass: bool,
    wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct MomentResiduals {
    equivalence: f64,
    sum_identity: f64,
    hamiltonian: f64,
    flow: f64,
    quadric: f64,
}

fn moment_residuals(n: usize, seed: u64, index: usize) -> Result<MomentResiduals, CliError> {
    let mut rng = item_rng(seed, index as u64);
    let line = random_line_with(n, &mut rng);
    let b = line.basis();
    let (u, v) = (b.column(0).into_owned(), b.column(1).into_owned());
    let (du, dv) = (complex_gaussian_vector(&mut rng, n + 1), complex_gaussian_vector(&mut rng, n + 1));
    let (w, y) = PluckerTangent::from_basis_variation(&u, &v, &du, &dv)?;

    let mut out = MomentResiduals { sum_identity: sum_identity_residual(&w), quadric: w.residual(), ..Default::default() };
    for i in 0..=n {
        out.equivalence = out.equivalence.max((mu_grass_max(&line, i)? - mu_grass_plucker(&w, i)).abs());
        let x = hamiltonian_field(&w, i);
        let scale = x.norm() * y.norm();
        if scale > 0.0 {
            let gap = (symplectic_form(&w, &x, &y) - dmu_grass(&w, i, &y)).abs() / scale;
            out.hamiltonian = out.hamiltonian.max(gap);
        }
        for theta in FLOW_ANGLES {
            let moved = torus_flow(&w, i, theta);
            for j in 0..=n {
                out.flow = out.flow.max((mu_grass_plucker(&moved, j) - mu_grass_plucker(&w, j)).abs());
            }
        }
    }
    Ok(out)
}

/// `w_01 = w_23 = 1/√2`, which violates `w_01 w_23 − w_02 w_13 + w_03 w_12 = 0`.
fn corrupt_vector(n: usize) -> CVector {
    let mut w = CVector::zeros(pair_count(n));
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    w[pair_index(n, 0, 1)] = h;
    w[pair_index(n, 2, 3)] = h;
    w
}

pub fn verify_moment(config: &RunConfig, flags: &Flags, inject_corrupt: bool) -> Result<Outcome, CliError> {
    if inject_corrupt && config.n < 3 {
        return Err(CliError::Config("the corrupted sample needs n ≥ 3".into()));
    }
    let start = Instant::now();
    let per_sample = (0..config.samples)
        .into_par_iter()
        .map(|index| moment_residuals(config.n, config.seed, index))
        .collect::<Result<Vec<_>, _>>()?;
    let mut worst = per_sample.iter().fold(MomentResiduals::default(), |acc, r| MomentResiduals {
        equivalence: acc.equivalence.max(r.equivalence),
        sum_identity: acc.sum_identity.max(r.sum_identity),
        hamiltonian: acc.hamiltonian.max(r.hamiltonian),
        flow: acc.flow.max(r.flow),
        quadric: acc.quadric.max(r.quadric),
    });
    if inject_corrupt {
        worst.quadric = worst.quadric.max(plucker_residual(config.n, &corrupt_vector(config.n)));
    }
    let checks = vec![
        Check::new("max_formula_vs_plucker_formula", worst.equivalence, EQUIVALENCE_TOL),
        Check::new("sum_identity", worst.sum_identity, SUM_IDENTITY_TOL),
        Check::new("hamiltonian_identity", worst.hamiltonian, HAMILTONIAN_TOL),
        Check::new("flow_invariance", worst.flow, FLOW_TOL),
        Check::new("plucker_quadric", worst.quadric, config.tolerances.tau_pluck),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let body = MomentBody {
        samples: config.samples,
        corrupt_injected: inject_corrupt,
        checks,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    json_outcome(flags, to_json("verify-moment", config, body)?, if pass { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct DelzantBody {
    base: String,
    samples: usize,
    max_violation: f64,
    containment_tolerance: f64,
    max_sum: f64,
    hausdorff_estimate: f64,
    hausdorff_tolerance: f64,
    hull_close: bool,
    hull_area: Option<f64>,
    pass: bool,
    wall_time_s: f64,
}

pub fn delzant(config: &RunConfig, flags: &Flags) -> Result<Outcome, CliError> {
    if config.k < 2 {
        return Err(CliError::Config(format!("delzant needs k ≥ 2, got k = {}", config.k)));
    }
    let start = Instant::now();
    let base = random_base(config.n, config.k, &mut item_rng(config.seed, u64::MAX), false)?;
    let samples = moment_image_sample(&base, config.samples, config.seed)?;
    let polytope = DelzantPolytope::new(config.k)?;
    let max_violation = polytope.max_violation(&samples);
    let hausdorff_estimate = polytope.hausdorff_estimate(&samples)?;
    let hull_area = (config.k == 2).then(|| {
        let pts: Vec<[f64; 2]> = samples.iter().map(|m| [m.values()[0], m.values()[1]]).collect();
        polygon_area(&convex_hull_2d(&pts))
    });
    let pass = max_violation < CONTAINMENT_TOL;
    let body = DelzantBody {
        base: base.describe(),
        samples: samples.len(),
        max_violation,
        containment_tolerance: CONTAINMENT_TOL,
        max_sum: samples.iter().map(|m| m.sum()).fold(0.0, f64::max),
        hausdorff_estimate,
        hausdorff_tolerance: HAUSDORFF_TOL,
        hull_close: hausdorff_estimate < HAUSDORFF_TOL,
        hull_area,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let json = to_json("delzant", config, body)?;
    let code = if pass { 0 } else { 1 };
    match flags.format.unwrap_or(Format::Json) {
        Format::Json => json_outcome(flags, json, code),
        Format::Csv => {
            let mut csv = (0..config.k).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
            csv.push('\n');
            for m in &samples {
                let row: Vec<String> = m.values().iter().map(|x| x.to_string()).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            csv_outcome(flags, csv, json, code)
        }
    }
}

pub fn verify_lagrangian(config: &RunConfig, flags: &Flags, control: bool) -> Result<Outcome, CliError> {
    let (lo, hi) = FRAME_STEP_RANGE;
    if !(lo..=hi).contains(&config.fd_step) {
        return Err(CliError::Config(format!("fd_step must lie in [{lo:e}, {hi:e}], got {:e}", config.fd_step)));
    }
    let descriptor = config.descriptor()?;
    let options = VerifyOptions {
        h: config.fd_step,
        variant: if control { FrameVariant::ComplexControl } else { FrameVariant::Standard },
        richardson: true,
        tau_lag: config.tolerances.tau_lag,
    };
    let report = cycles::verify_lagrangian(&descriptor, config.samples, config.seed, &options)?;
    let code = if report.failures * 10 > report.samples {
        3
    } else if report.pass {
        0
    } else {
        1
    };
    json_outcome(flags, to_json("verify-lagrangian", config, &report)?, code)
}

#[derive(Debug, Serialize)]
struct CensusBody {
    #[serde(flatten)]
    census: TypeCensus,
    pass: bool,
    wall_time_s: f64,
}

pub fn count_types(config: &RunConfig, flags: &Flags) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let census = cycles::count_types(config.n as u64)?;
    let pass = census.matches_formula();
    let body = CensusBody { census, pass, wall_time_s: start.elapsed().as_secs_f64() };
    json_outcome(flags, to_json("count-types", config, body)?, if pass { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct LevelBody {
    samples: usize,
    real_bases: bool,
    max_moment_residual: f64,
    max_plucker_residual: f64,
    all_in_open_stratum: bool,
    pass: bool,
    wall_time_s: f64,
}

fn level_csv(k: usize, lines: &[PluckerLine]) -> String {
    let Some(first) = lines.first() else { return String::new() };
    let n = first.n();
    let mut header: Vec<String> = vec!["index".into()];
    header.extend((0..k).map(|i| format!("mu{i}")));
    for (i, j) in pairs(n) {
        header.push(format!("w{i}{j}_re"));
        header.push(format!("w{i}{j}_im"));
    }
    let mut csv = header.join(",");
    csv.push('\n');
    for (index, w) in lines.iter().enumerate() {
        let _ = write!(csv, "{index}");
        for x in moment_vector(w, k).values() {
            let _ = write!(csv, ",{x}");
        }
        for z in w.coords().iter() {
            let _ = write!(csv, ",{},{}", z.re, z.im);
        }
        csv.push('\n');
    }
    csv
}

pub fn level_sample(config: &RunConfig, flags: &Flags, real: bool) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let c = config.targets()?;
    let lines = sample_level_set(config.n, config.k, &c, config.samples, config.seed, real)?;
    let tau_open = config.tolerances.tau_open;
    let moments: Vec<_> = lines.iter().map(|w| moment_vector(w, config.k)).collect();
    let max_moment_residual = moments.iter().map(|m| m.distance(&c)).fold(0.0, f64::max);
    let max_plucker_residual = lines.iter().map(PluckerLine::residual).fold(0.0, f64::max);
    let all_in_open_stratum =
        moments.iter().all(|m| m.values().iter().all(|&x| x > tau_open) && m.sum() < 1.0 - tau_open);
    let pass = max_moment_residual < config.tolerances.tau_solve
        && max_plucker_residual < config.tolerances.tau_pluck
        && all_in_open_stratum;
    let body = LevelBody {
        samples: lines.len(),
        real_bases: real,
        max_moment_residual,
        max_plucker_residual,
        all_in_open_stratum,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let json = to_json("level-sample", config, body)?;
    let code = if pass { 0 } else { 1 };
    match flags.format.unwrap_or(Format::Csv) {
        Format::Json => json_outcome(flags, json, code),
        Format::Csv => csv_outcome(flags, level_csv(config.k, &lines), json, code),
    }
}
