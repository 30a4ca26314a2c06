//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use grreduce::cycles::{count_types, verify_lagrangian, CycleDescriptor, CycleType, FrameVariant, VerifyOptions};
use grreduce::moment::{dmu_grass, hamiltonian_field, mu_grass_max, mu_grass_plucker, sum_identity_residual, torus_flow, MomentVector};
use grreduce::plucker::{symplectic_form, PluckerLine, PluckerTangent};
use grreduce::projective::{HomogeneousVector, ProjectiveSubspace};
use grreduce::reduction::{
    degenerate_fiber_check, moment_image_sample, project_to_base, random_base, solve_fiber_point, ReducedPoint,
};
use grreduce::rng::{complex_gaussian, complex_gaussian_vector, item_rng};
use grreduce::{CVector, C64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

// ---------- oracles ----------

/// 2×2 minors `u_i v_j − u_j v_i`, `i < j`, as a map keyed by `(i, j)`.
fn oracle_minors(u: &CVector, v: &CVector) -> Vec<((usize, usize), C64)> {
    let n = u.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(((i, j), u[i] * v[j] - u[j] * v[i]));
        }
    }
    out
}

fn oracle_mu_plucker(w: &[((usize, usize), C64)], i: usize) -> f64 {
    let total: f64 = w.iter().map(|(_, z)| z.norm_sqr()).sum();
    w.iter().filter(|((a, b), _)| *a == i || *b == i).map(|(_, z)| z.norm_sqr()).sum::<f64>() / total
}

/// `max |z_i|²/|z|²` over `z = Bx`: the Rayleigh quotient maximum
/// `b* G⁻¹ b` with `G = B*B`, `b = B* e_i`, by explicit 2×2 inversion.
fn oracle_mu_max(u: &CVector, v: &CVector, i: usize) -> f64 {
    let (g11, g12, g22) = (u.dotc(u), u.dotc(v), v.dotc(v));
    let det = (g11 * g22 - g12 * g12.conj()).re;
    let (b1, b2) = (u[i].conj(), v[i].conj());
    let quad = b1.conj() * g22 * b1 - b1.conj() * g12 * b2 - b2.conj() * g12.conj() * b1 + b2.conj() * g11 * b2;
    quad.re / det
}

/// `dμ̃_i` along `t ↦ span(u + t du, v + t dv)` by a five-point stencil.
fn oracle_dmu(u: &CVector, v: &CVector, du: &CVector, dv: &CVector, i: usize) -> f64 {
    let h = 1e-4;
    let mu = |t: f64| {
        let s = C64::new(t, 0.0);
        oracle_mu_plucker(&oracle_minors(&(u + du * s), &(v + dv * s)), i)
    };
    (mu(-2.0 * h) - 8.0 * mu(-h) + 8.0 * mu(h) - mu(2.0 * h)) / (12.0 * h)
}

fn within(budget_s: f64, elapsed: Duration) -> bool {
    elapsed.as_secs_f64() < budget_s
}

// ---------- criteria ----------

fn moment_equivalence() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in 3..=6 {
        for idx in 0..1000 {
            let mut rng = item_rng(1, (n * 10_000 + idx) as u64);
            let (u, v) = (complex_gaussian_vector(&mut rng, n + 1), complex_gaussian_vector(&mut rng, n + 1));
            let line = ProjectiveSubspace::span(&[u.clone(), v.clone()]).unwrap();
            let w = PluckerLine::from_spanning(&u, &v).unwrap();
            let minors = oracle_minors(&u, &v);
            for i in 0..=n {
                let (eq1, eq2) = (mu_grass_max(&line, i).unwrap(), mu_grass_plucker(&w, i));
                worst = worst.max((eq1 - eq2).abs());
                worst_oracle = worst_oracle
                    .max((eq1 - oracle_mu_max(&u, &v, i)).abs())
                    .max((eq2 - oracle_mu_plucker(&minors, i)).abs());
            }
        }
    }
    verdict(
        worst < 1e-10 && worst_oracle < 1e-10,
        format!("max |eq1 − eq2| = {worst:.2e}, max deviation from oracles = {worst_oracle:.2e} (tol 1e-10)"),
    )
}

fn sum_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for idx in 0..1000 {
        let mut rng = item_rng(2, idx);
        let (u, v) = (complex_gaussian_vector(&mut rng, 4), complex_gaussian_vector(&mut rng, 4));
        let w = PluckerLine::from_spanning(&u, &v).unwrap();
        worst = worst.max(sum_identity_residual(&w));
        let m = oracle_minors(&u, &v);
        let total: f64 = m.iter().map(|(_, z)| z.norm_sqr()).sum();
        let get = |a, b| m.iter().find(|(k, _)| *k == (a, b)).unwrap().1.norm_sqr();
        let rhs = 1.0 + (get(0, 1) - get(2, 3)) / total;
        worst_oracle = worst_oracle.max((oracle_mu_plucker(&m, 0) + oracle_mu_plucker(&m, 1) - rhs).abs());
    }
    verdict(
        worst < 1e-12 && worst_oracle < 1e-12,
        format!("library residual {worst:.2e}, oracle residual {worst_oracle:.2e} (tol 1e-12)"),
    )
}

fn hamiltonian_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    for n in 2..=5 {
        for i in 0..=n {
            for idx in 0..200 {
                let mut rng = item_rng(3, (n * 100_000 + i * 1000 + idx) as u64);
                let g = |rng: &mut _| complex_gaussian_vector(rng, n + 1);
                let (u, v, du, dv) = (g(&mut rng), g(&mut rng), g(&mut rng), g(&mut rng));
                let (w, y) = PluckerTangent::from_basis_variation(&u, &v, &du, &dv).unwrap();
                let x = hamiltonian_field(&w, i);
                let scale = x.norm() * y.norm();
                if scale == 0.0 {
                    continue;
                }
                let omega = symplectic_form(&w, &x, &y);
                worst = worst.max((omega - dmu_grass(&w, i, &y)).abs() / scale);
                worst_oracle = worst_oracle.max((omega - oracle_dmu(&u, &v, &du, &dv, i)).abs() / scale);
            }
        }
    }
    verdict(
        worst < 1e-8 && worst_oracle < 1e-8,
        format!("max normalized gap {worst:.2e}, against stencil oracle {worst_oracle:.2e} (tol 1e-8)"),
    )
}

fn fibration_round_trips() -> Verdict {
    let mut orbit_worst: f64 = 0.0;
    let mut section_worst: f64 = 0.0;
    let mut level_worst: f64 = 0.0;
    for &(n, k) in &[(3, 2), (4, 2), (4, 3), (5, 3)] {
        let c = MomentVector::target(vec![0.8 / k as f64; k]).unwrap();
        for idx in 0..100u64 {
            let base = random_base(n, k, &mut item_rng(4, (n * 1000 + k * 100) as u64 + idx), idx % 2 == 0).unwrap();
            let w = solve_fiber_point(&base, &c).unwrap();
            let back = project_to_base(&w.to_line().unwrap(), k).unwrap();
            section_worst = section_worst.max(back.discrepancy(&base));
            let coords: Vec<_> = grreduce::plucker::pairs(n).zip(w.coords().iter().copied()).collect();
            for (j, &target) in c.values().iter().enumerate() {
                level_worst = level_worst.max((oracle_mu_plucker(&coords, j) - target).abs());
            }
            for i in 0..k {
                let moved = torus_flow(&w, i, 0.7 + idx as f64 * 0.05);
                let d = project_to_base(&moved.to_line().unwrap(), k).unwrap().discrepancy(&back);
                orbit_worst = orbit_worst.max(d);
            }
        }
    }
    verdict(
        orbit_worst < 1e-9 && section_worst < 1e-8 && level_worst < 1e-10,
        format!(
            "orbit invariance {orbit_worst:.2e} (tol 1e-9), project∘solve {section_worst:.2e} (tol 1e-8), level {level_worst:.2e}"
        ),
    )
}

/// 0/1 vectors with at most two ones.
fn oracle_vertices(k: usize) -> Vec<Vec<f64>> {
    (0u32..1 << k)
        .filter(|m| m.count_ones() <= 2)
        .map(|m| (0..k).map(|i| f64::from((m >> i) & 1)).collect())
        .collect()
}

fn delzant_polytope() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for &(n, k) in &[(3usize, 2usize), (4, 3)] {
        let base = random_base(n, k, &mut item_rng(5, k as u64), false).unwrap();
        let samples = moment_image_sample(&base, 100_000, 5).unwrap();
        let violation = samples
            .iter()
            .flat_map(|m| {
                let x = m.values();
                let s: f64 = x.iter().sum();
                x.iter().map(|&xi| (-xi).max(xi - 1.0)).chain(std::iter::once(s - 2.0)).collect::<Vec<_>>()
            })
            .fold(0.0, f64::max);
        let hausdorff = oracle_vertices(k)
            .iter()
            .map(|v| {
                samples
                    .iter()
                    .map(|m| m.values().iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        pass &= violation < 1e-10 && hausdorff < 0.05;
        parts.push(format!("k={k}: containment {violation:.2e} (tol 1e-10), hausdorff ≤ {hausdorff:.3e} (tol 0.05)"));
    }
    verdict(pass, parts.join("; "))
}

fn degenerate_fiber() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut solved = 0;
    for idx in 0..20u64 {
        let mut rng = item_rng(6, idx);
        let l0 = ProjectiveSubspace::coordinate(3, &[2, 3]).unwrap();
        let mut s = CVector::zeros(4);
        s[2] = complex_gaussian(&mut rng);
        s[3] = complex_gaussian(&mut rng);
        let s = HomogeneousVector::new(s).unwrap();
        let base = ReducedPoint::new(3, 2, l0, vec![s.clone(), s]).unwrap();
        for c in [[0.2, 0.3], [0.1, 0.1], [0.45, 0.45]] {
            let c = MomentVector::target(c.to_vec()).unwrap();
            let report = degenerate_fiber_check(&base, &c, 50, idx).unwrap();
            let w = solve_fiber_point(&base, &c).unwrap();
            let oracle = (w.coords()[0].norm_sqr() / w.coords().norm_squared()).sqrt();
            worst = worst.max(report.max_coupling).max(oracle);
            solved += 51;
        }
    }
    verdict(worst < 1e-8, format!("max |w01| = {worst:.2e} over {solved} solved points (tol 1e-8)"))
}

fn lagrangian_verification() -> Verdict {
    let descriptors = [(3, 2, 0), (3, 2, 1), (4, 2, 0), (4, 2, 1), (4, 3, 0), (4, 3, 1), (5, 4, 0), (5, 4, 1), (5, 4, 2)];
    let mut pass = true;
    let mut parts = Vec::new();
    for &(n, k, m) in &descriptors {
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        let report = verify_lagrangian(&d, 50, 7, &VerifyOptions::default()).unwrap();
        let control =
            verify_lagrangian(&d, 50, 7, &VerifyOptions { variant: FrameVariant::ComplexControl, ..VerifyOptions::default() })
                .unwrap();
        let ratio = report.richardson_ratio.unwrap_or(0.0);
        let ok = report.failures == 0
            && report.global_max < 1e-5
            && report.min_frame_rank == 2 * (n - 1)
            && ratio >= 3.0
            && !control.pass
            && control.global_max > 0.1;
        pass &= ok;
        parts.push(format!(
            "({n},{k},{m}) max {:.1e} rank {} ratio {ratio:.2} control {:.2}",
            report.global_max, report.min_frame_rank, control.global_max
        ));
    }
    verdict(pass, parts.join("; "))
}

fn type_census() -> Verdict {
    let t = |k, m| CycleType { k, m };
    let expected = [
        (3, vec![t(0, 0), t(1, 0), t(2, 0), t(2, 1)]),
        (4, vec![t(0, 0), t(1, 0), t(2, 0), t(2, 1), t(3, 0), t(3, 1)]),
        (5, vec![t(0, 0), t(1, 0), t(2, 0), t(2, 1), t(3, 0), t(3, 1), t(4, 0), t(4, 1), t(4, 2)]),
    ];
    let lists_ok = expected.iter().all(|(n, types)| count_types(*n).unwrap().types == *types);
    let mut mismatches = 0;
    for n in 2..=1000u64 {
        let census = count_types(n).unwrap();
        let oracle: u64 = (0..n).map(|k| 1 + k / 2).sum();
        let closed = n + (n / 2) * ((n - 1) / 2);
        if census.total != oracle || oracle != closed || !census.matches_formula() {
            mismatches += 1;
        }
    }
    verdict(lists_ok && mismatches == 0, format!("explicit lists n=3,4,5 ok: {lists_ok}; mismatches for n ≤ 1000: {mismatches}"))
}

fn run_binary(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_grreduce")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

/// Parses every JSON document in `text` with `wall_time_s` removed; other
/// text is kept verbatim.
fn without_wall_time(text: &str) -> String {
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(mut v) => {
            strip(&mut v);
            v.to_string()
        }
        Err(_) => text.to_string(),
    }
}

fn strip(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip),
        _ => {}
    }
}

fn determinism() -> Verdict {
    let runs: [&[&str]; 6] = [
        &["verify-moment", "--samples", "50", "--seed", "11"],
        &["delzant", "--samples", "2000", "--seed", "11", "--format", "csv"],
        &["verify-lagrangian", "--samples", "8", "--seed", "11", "--n", "4", "--k", "3", "--pairs", "0-1"],
        &["count-types", "--n", "9"],
        &["level-sample", "--samples", "20", "--seed", "11", "--n", "4"],
        &["level-sample", "--samples", "20", "--seed", "11", "--real"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let (a, b) = (run_binary(args), run_binary(args));
        let same = a.0 == b.0
            && without_wall_time(&a.1) == without_wall_time(&b.1)
            && without_wall_time(&a.2) == without_wall_time(&b.2);
        if !same || a.0 != 0 {
            differing.push(args[0]);
        }
    }
    verdict(differing.is_empty(), format!("{} commands rerun; differing or failing: {differing:?}", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Verdict); 9] = [
        ("moment-map equivalence", 10.0, moment_equivalence),
        ("sum identity", 1.0, sum_identity),
        ("hamiltonian identity", 30.0, hamiltonian_identity),
        ("fibration and section round trips", 60.0, fibration_round_trips),
        ("delzant polytope", 60.0, delzant_polytope),
        ("degenerate fiber", 10.0, degenerate_fiber),
        ("lagrangian verification", 300.0, lagrangian_verification),
        ("type census", 1.0, type_census),
        ("determinism", 60.0, determinism),
    ];
    let mut failed = 0;
    for (number, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let pass = v.pass && within(budget, elapsed);
        failed += usize::from(!pass);
        println!(
            "{} criterion {} ({name}): {} [{:.2}s, budget {budget}s]",
            if pass { "PASS" } else { "FAIL" },
            number + 1,
            v.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
