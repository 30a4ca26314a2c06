use super::*;
use crate::moment::{hamiltonian_field, moment_vector};
use crate::plucker::PluckerTangent;
use crate::projective::Conjugate;
use crate::reduction::{in_gr0, random_base, solve_fiber_point};
use crate::rng::item_rng;
use proptest::prelude::*;

fn descriptor(n: usize, k: usize, m: usize, c: &[f64]) -> CycleDescriptor {
    CycleDescriptor::new(n, k, CycleDescriptor::leading_pairs(m), MomentVector::target(c.to_vec()).unwrap()).unwrap()
}

fn diff_norm(a: &PluckerTangent, b: &PluckerTangent) -> f64 {
    (a.vector() - b.vector()).norm()
}

#[test]
fn descriptor_validation() {
    let c = |v: &[f64]| MomentVector::target(v.to_vec()).unwrap();
    assert!(CycleDescriptor::new(3, 3, vec![], c(&[0.1, 0.1, 0.1])).is_err());
    assert!(CycleDescriptor::new(1, 0, vec![], c(&[])).is_err());
    assert!(CycleDescriptor::new(3, 2, vec![], c(&[0.1])).is_err());
    assert!(CycleDescriptor::new(3, 2, vec![(0, 1)], c(&[0.2, 0.3])).is_err());
    assert!(CycleDescriptor::new(4, 3, vec![(0, 1), (1, 2)], c(&[0.2, 0.2, 0.2])).is_err());
    assert!(CycleDescriptor::new(4, 3, vec![(0, 3)], c(&[0.2, 0.2, 0.2])).is_err());
    assert!(CycleDescriptor::new(4, 3, vec![(1, 1)], c(&[0.2, 0.2, 0.2])).is_err());
    let d = CycleDescriptor::new(4, 3, vec![(2, 0)], c(&[0.2, 0.2, 0.2])).unwrap();
    assert_eq!(d.pairs(), &[(0, 2)]);
    assert_eq!(d.partner(2), Some(0));
    assert_eq!(d.partner(1), None);
    let d = CycleDescriptor::with_default_targets(5, 4, CycleDescriptor::leading_pairs(2)).unwrap();
    assert_eq!(d.c().values(), &[0.125; 4]);
}

#[test]
fn dimension_bookkeeping() {
    for n in 2..=8 {
        for k in 0..n {
            for m in 0..=k / 2 {
                let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
                assert_eq!(d.grassmann_dim(), 2 * (n - k - 1));
                assert_eq!(d.marked_dim(), (k - 2 * m) + 2 * m);
                assert_eq!(d.dimension(), 2 * (n - 1));
                let chart = CycleChart::random(&d, &mut item_rng(1, 0));
                assert_eq!(chart.param_count(), 2 * (n - 1));
                assert_eq!(chart.angle_offset(), 2 * (n - k - 1) + k);
            }
        }
    }
}

#[test]
fn census_small_cases() {
    let labels = |n| count_types(n).unwrap().types.iter().map(|t| (t.k, t.m)).collect::<Vec<_>>();
    assert_eq!(labels(2), vec![(0, 0), (1, 0)]);
    assert_eq!(labels(3), vec![(0, 0), (1, 0), (2, 0), (2, 1)]);
    assert_eq!(labels(4), vec![(0, 0), (1, 0), (2, 0), (2, 1), (3, 0), (3, 1)]);
    assert_eq!(
        labels(5),
        vec![(0, 0), (1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2)]
    );
    assert_eq!(count_types(3).unwrap().total, 4);
    assert_eq!(count_types(4).unwrap().total, 6);
    assert!(count_types(1).is_err());
}

#[test]
fn census_identity_up_to_1000() {
    for n in 2..=1000u64 {
        let census = count_types(n).unwrap();
        let independent: u64 = (0..n).map(|k| 1 + k / 2).sum();
        assert_eq!(census.total, independent);
        assert_eq!(census.total, n + (n / 2) * ((n - 1) / 2));
        assert!(census.matches_formula());
    }
}

#[test]
fn real_bases_have_real_marked_points() {
    for (n, k) in [(3, 2), (4, 3), (5, 2)] {
        let d = CycleDescriptor::with_default_targets(n, k, vec![]).unwrap();
        for base in sample_base_cycle(&d, 20, 3).unwrap() {
            assert!(base.l0().max_principal_angle(&base.l0().conjugate()).unwrap() < 1e-10);
            for s in base.s() {
                assert!(s.angle_to(&s.conjugate()) < 1e-10);
            }
        }
    }
}

#[test]
fn paired_bases_are_fixed_by_the_involution() {
    for (n, k, m) in [(3, 2, 1), (4, 3, 1), (5, 4, 2)] {
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        for base in sample_base_cycle(&d, 20, 5).unwrap() {
            let image = d.pairs().iter().fold(base.conjugate(), |b, &(i, j)| b.swap_points(i, j));
            assert!(image.discrepancy(&base) < 1e-10);
            // Paired points are genuinely complex, not a degenerate real pair.
            for &(i, j) in d.pairs() {
                assert!(base.s()[i].angle_to(&base.s()[j]) > 1e-5);
            }
        }
    }
}

#[test]
fn bases_agree_with_lifts() {
    let d = descriptor(4, 3, 1, &[0.2, 0.2, 0.2]);
    let bases = sample_base_cycle(&d, 5, 9).unwrap();
    let lifts = lift_cycle_sample(&d, 5, 9).unwrap();
    for (base, pt) in bases.iter().zip(&lifts) {
        let back = crate::reduction::project_to_base(&pt.line.to_line().unwrap(), 3).unwrap();
        assert!(back.discrepancy(base) < 1e-8);
    }
}

#[test]
fn k0_cycle_is_the_real_grassmannian() {
    let d = CycleDescriptor::new(4, 0, vec![], MomentVector::target(vec![]).unwrap()).unwrap();
    for pt in lift_cycle_sample(&d, 30, 2).unwrap() {
        let w = pt.line.coords();
        let biggest = w.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let aligned = w * (biggest.conj() / biggest.norm());
        assert!(aligned.iter().all(|z| z.im.abs() < 1e-10));
    }
}

#[test]
fn lifted_samples_lie_in_the_level_set() {
    let d = descriptor(3, 2, 0, &[0.2, 0.3]);
    let pts = lift_cycle_sample(&d, 50, 4).unwrap();
    assert_eq!(pts, lift_cycle_sample(&d, 50, 4).unwrap());
    for pt in &pts {
        assert!(moment_vector(&pt.line, 2).distance(d.c()) < 1e-11);
        assert!(in_gr0(&pt.line, 2));
        assert_eq!(pt.params.len(), 4);
        assert_eq!(pt.chart.evaluate(&pt.params).unwrap(), pt.line);
        assert!(membership_residual(&d, &pt.line).unwrap() < 1e-8);
        assert!(membership_residual(&d, &nonstandard_involution(&d, &pt.line)).unwrap() < 1e-8);
    }
}

#[test]
fn involution_maps_paired_cycles_to_themselves() {
    for (n, k, m) in [(3, 2, 1), (4, 2, 1), (5, 4, 2)] {
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        for pt in lift_cycle_sample(&d, 20, 6).unwrap() {
            let image = nonstandard_involution(&d, &pt.line);
            assert!(membership_residual(&d, &image).unwrap() < 1e-8);
        }
    }
}

#[test]
fn generic_level_points_are_not_on_the_cycle() {
    let d = descriptor(4, 2, 0, &[0.2, 0.3]);
    for idx in 0..10 {
        let base = random_base(4, 2, &mut item_rng(8, idx), false).unwrap();
        let w = solve_fiber_point(&base, d.c()).unwrap();
        assert!(membership_residual(&d, &w).unwrap() > 1e-3);
    }
}

#[test]
fn frame_has_full_dimension_and_is_tangent() {
    for (n, k, m) in [(3, 2, 0), (4, 3, 1), (5, 4, 2), (4, 0, 0)] {
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        let pt = CycleSamplePoint::draw(&d, 12, 0).unwrap();
        let frame = tangent_frame(&pt, 1e-4).unwrap();
        assert_eq!(frame.len(), 2 * (n - 1));
        for t in &frame {
            assert!(t.gauge_residual(&pt.line) < 1e-10);
            assert!(t.relation_residual(&pt.line) < 1e-6);
        }
    }
}

#[test]
fn step_range_is_enforced() {
    let d = descriptor(3, 2, 0, &[0.2, 0.3]);
    let pt = CycleSamplePoint::draw(&d, 12, 0).unwrap();
    assert!(matches!(tangent_frame(&pt, 1e-7), Err(Error::StepTooSmall { .. })));
    assert!(matches!(tangent_frame(&pt, 1e-2), Err(Error::InvalidArgument(_))));
    assert!(matches!(tangent_frame(&pt, f64::NAN), Err(Error::InvalidArgument(_))));
    assert!(tangent_frame(&pt, 1e-6).is_ok());
    assert!(tangent_frame(&pt, 1e-3).is_ok());
}

#[test]
fn angle_tangents_are_hamiltonian_fields() {
    let d = descriptor(4, 3, 1, &[0.2, 0.2, 0.2]);
    let pt = CycleSamplePoint::draw(&d, 14, 0).unwrap();
    let coarse = tangent_frame(&pt, 1e-3).unwrap();
    let fine = tangent_frame(&pt, 5e-4).unwrap();
    for i in 0..3 {
        let exact = hamiltonian_field(&pt.line, i);
        let a = pt.chart.angle_offset() + i;
        let (e1, e2) = (diff_norm(&coarse[a], &exact), diff_norm(&fine[a], &exact));
        assert!(e1 < 1e-6, "{e1:e}");
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn tangents_converge_at_second_order() {
    let d = descriptor(4, 2, 1, &[0.25, 0.25]);
    let pt = CycleSamplePoint::draw(&d, 15, 0).unwrap();
    let frames: Vec<_> = [8e-4, 4e-4, 2e-4].iter().map(|&h| tangent_frame(&pt, h).unwrap()).collect();
    for a in 0..frames[0].len() {
        let ratio = diff_norm(&frames[0][a], &frames[1][a]) / diff_norm(&frames[1][a], &frames[2][a]);
        assert!((3.0..5.0).contains(&ratio), "direction {a}: ratio {ratio}");
    }
}

#[test]
fn base_directions_are_isotropic_and_displacements_stay_in_the_level_set() {
    for (n, k, m) in [(4, 2, 0), (4, 3, 1)] {
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        let pt = CycleSamplePoint::draw(&d, 16, 0).unwrap();
        let frame = tangent_frame(&pt, 1e-4).unwrap();
        let base_only = &frame[..pt.chart.angle_offset()];
        assert!(max_normalized_pairing(&pt.line, base_only) < 1e-5);
        for a in 0..pt.params.len() {
            for sign in [-1.0, 1.0] {
                let mut p = pt.params.clone();
                p[a] += sign * 1e-4;
                let w = pt.chart.evaluate(&p).unwrap();
                assert!(moment_vector(&w, k).distance(d.c()) < 1e-10);
            }
        }
    }
}

#[test]
fn verifier_passes_and_control_fails() {
    let d = descriptor(3, 2, 0, &[0.2, 0.3]);
    let report = verify_lagrangian(&d, 50, 42, &VerifyOptions::default()).unwrap();
    assert!(report.pass, "{report:?}");
    assert!(report.global_max < 1e-5);
    assert_eq!(report.min_frame_rank, 4);
    assert_eq!(report.dimension, 4);
    assert_eq!(report.failures, 0);
    assert!(report.richardson_ratio.unwrap() >= 3.0);

    let control = VerifyOptions { variant: FrameVariant::ComplexControl, ..VerifyOptions::default() };
    let report = verify_lagrangian(&d, 10, 42, &control).unwrap();
    assert!(!report.pass);
    assert!(report.global_max > 0.1);

    let d = descriptor(4, 3, 1, &[0.2, 0.2, 0.2]);
    assert!(verify_lagrangian(&d, 50, 42, &VerifyOptions::default()).unwrap().pass);
}

#[test]
fn verifier_is_deterministic() {
    let d = descriptor(4, 2, 1, &[0.2, 0.2]);
    let mut a = verify_lagrangian(&d, 12, 7, &VerifyOptions::default()).unwrap();
    let mut b = verify_lagrangian(&d, 12, 7, &VerifyOptions::default()).unwrap();
    a.wall_time_s = 0.0;
    b.wall_time_s = 0.0;
    assert_eq!(a, b);
}

#[test]
fn verifier_rejects_bad_options() {
    let d = descriptor(3, 2, 0, &[0.2, 0.3]);
    let opts = VerifyOptions { h: 1e-9, ..VerifyOptions::default() };
    assert!(matches!(verify_lagrangian(&d, 1, 0, &opts), Err(Error::StepTooSmall { .. })));
    assert!(verify_lagrangian(&d, 0, 0, &VerifyOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cycle_samples_are_members(n in 3usize..6, k_raw in 0usize..5, m_raw in 0usize..3, seed in 0u64..1000) {
        let k = k_raw % n;
        let m = m_raw.min(k / 2);
        let d = CycleDescriptor::with_default_targets(n, k, CycleDescriptor::leading_pairs(m)).unwrap();
        let pt = CycleSamplePoint::draw(&d, seed, 0).unwrap();
        prop_assert_eq!(pt.params.len(), 2 * (n - 1));
        if k > 0 {
            prop_assert!(membership_residual(&d, &pt.line).unwrap() < 1e-8);
            prop_assert!(membership_residual(&d, &nonstandard_involution(&d, &pt.line)).unwrap() < 1e-8);
        }
    }
}
