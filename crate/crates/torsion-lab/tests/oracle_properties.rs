mod common;

use common::*;
use proptest::prelude::*;
use torsion_lab::closed_form::profile_solution;
use torsion_lab::fields::ProfileField;
use torsion_lab::oracle::*;
use torsion_lab::{stiffness, Error, MaterialParameters, ModelKind};

fn profile_error(model: ModelKind, p: &MaterialParameters, radius: f64, nodes: usize, degree: usize) -> f64 {
    let exact = profile_solution(model, p, radius, p.lc.into()).unwrap();
    let spec = bvp_spec(model, p, radius).unwrap().unwrap();
    let num = solve_bvp_with_degree(&spec, nodes, degree).unwrap();
    (0..=100)
        .map(|i| {
            let r = radius * i as f64 / 100.0;
            let v = exact.at(r);
            let (gp, gm) = num.eval(r);
            (gp[0] - v.gp[0]).abs().max((gm[0] - v.gm[0]).abs())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn oracle_agrees_with_closed_form(seed in any::<u64>(), model_index in 0usize..PROFILE_MODELS.len()) {
        let mut g = rng(seed);
        let p = random_parameters(&mut g);
        let radius = log_uniform(&mut g, 0.1, 10.0);
        let p = p.with_lc(log_uniform(&mut g, 1e-3, 1e3) * radius);
        let m = PROFILE_MODELS[model_index];
        let (_, numeric) = oracle_stiffness(m, &p, radius, 200).unwrap();
        let closed = stiffness(m, &p, radius).unwrap().t_w;
        prop_assert!(rel(numeric.t_w.value, closed) <= 1e-7);
        prop_assert!(numeric.t_w.estimated_error <= 1e-9 * closed);
    }

    #[test]
    fn profiles_match_at_default_resolution(seed in any::<u64>(), model_index in 0usize..PROFILE_MODELS.len()) {
        let mut g = rng(seed);
        let p = random_parameters(&mut g);
        let radius = log_uniform(&mut g, 0.1, 10.0);
        let p = p.with_lc(log_uniform(&mut g, 1e-2, 1e2) * radius);
        let m = PROFILE_MODELS[model_index];
        prop_assert!(profile_error(m, &p, radius, 200, DEFAULT_DEGREE) <= 1e-8);
    }
}

#[test]
fn quartic_elements_converge_at_fourth_order() {
    let mut g = rng(21);
    for _ in 0..5 {
        let p = random_parameters(&mut g);
        let radius = log_uniform(&mut g, 0.5, 2.0);
        let p = p.with_lc(log_uniform(&mut g, 0.05, 0.5) * radius);
        for m in [ModelKind::RelaxedMicromorphic, ModelKind::Cosserat, ModelKind::MicroStrain] {
            let errs: Vec<f64> = [50, 100, 200, 400].iter().map(|&n| profile_error(m, &p, radius, n, 4)).collect();
            for w in errs.windows(2) {
                assert!(w[1] <= w[0] || w[1] < 1e-10, "{m}: {errs:?}");
            }
            let order = (errs[1] / errs[3]).log2() / 2.0;
            assert!(order >= 3.5 || errs[3] < 1e-10, "{m}: order {order}, {errs:?}");
        }
    }
}

#[test]
fn energy_derivative_matches_torque() {
    let p = MaterialParameters {
        mu_macro: 1.0,
        lambda_macro: 1.0,
        mu_e: 2.0,
        lambda_e: 1.0,
        mu_micro: 2.0,
        lambda_micro: 1.0,
        mu_c: 0.5,
        mu: 1.0,
        a1: 0.2,
        a2: 0.3,
        a3: 1.0 / 7.0,
        a4: 0.4,
        lc: 1.0,
    };
    let twists = [0.5, 0.75, 1.0, 1.25, 1.5];
    for m in ModelKind::ALL {
        let report = energy_derivative_check(m, &p, 1.0, 0.7, &twists).unwrap();
        assert!(report.max_relative_error <= 1e-9, "{m}: {}", report.max_relative_error);
        let tw = stiffness(m, &p.with_lc(0.7), 1.0).unwrap().t_w;
        for d2 in &report.second_derivatives {
            assert!(rel(*d2, tw) <= 1e-8, "{m}: {d2} vs {tw}");
        }
    }
}

#[test]
fn degenerate_curvature_without_coupling() {
    let spec = BvpSpec {
        radius: 1.0,
        equations: vec![RadialOde { unknown: Unknown::Gp, c2: 0.0, c0: 0.0, rhs: 0.0 }],
        boundary: vec![BoundaryRow { alpha: vec![1.0], beta: vec![1.0], gamma: 0.0 }],
    };
    assert!(matches!(solve_bvp(&spec, 50), Err(Error::Degenerate(_))));
}

#[test]
fn constant_limit_is_unsupported_for_cauchy() {
    let p = MaterialParameters { mu_macro: 1.0, ..Default::default() };
    assert!(constant_p_limit(ModelKind::Cauchy, &p, 1.0, 1.0).is_err());
}
