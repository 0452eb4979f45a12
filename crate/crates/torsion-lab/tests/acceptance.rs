mod common;

use common::*;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};
use torsion_lab::closed_form::profile_solution;
use torsion_lab::fields::{boundary_residual, equilibrium_residual, Mat3};
use torsion_lab::identify::{fit, lakes_omega_dislocation, synthetic_dataset, FitProblem, FreeParameter, Observation};
use torsion_lab::materials::{classical_from_dislocation, dislocation_from_classical};
use torsion_lab::oracle::{constant_p_limit, disk_integral_du, oracle_stiffness};
use torsion_lab::{stiffness, stiffness_at, LengthScale, MaterialParameters, ModelKind};

fn report(n: u32, name: &str, ok: bool, detail: String, elapsed: Duration) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{tag} criterion {n:>2} {name}: {detail} [{:.2} s]", elapsed.as_secs_f64()).unwrap();
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn at(model: ModelKind, p: &MaterialParameters, r: f64, lc: f64) -> torsion_lab::StiffnessTriple {
    stiffness_at(model, p, r, LengthScale::Finite(lc)).unwrap()
}

#[test]
fn criterion_01_macro_recovery() {
    let t0 = Instant::now();
    let mut g = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        for m in ModelKind::ALL {
            let expected = macro_shear(m, &p) * PI * r.powi(4) / 2.0;
            worst = worst.max(rel(at(m, &p, r, 0.0).t_w, expected));
        }
    }
    let el = t0.elapsed();
    let ok = worst <= 1e-12 && el < Duration::from_secs(5);
    report(1, "macro recovery", ok, format!("max rel err {worst:.2e} over 17 models x 50 sets"), el);
}

#[test]
fn criterion_02_energy_consistency() {
    let t0 = Instant::now();
    let mut g = rng(2);
    let grid: Vec<f64> = (0..=24).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        for m in ModelKind::ALL {
            for &lc in &grid {
                let t = at(m, &p, r, lc * r);
                worst = worst.max((t.t_c + t.t_m - t.t_w).abs() / t.t_w);
            }
        }
    }
    let el = t0.elapsed();
    let ok = worst <= 1e-10 && el < Duration::from_secs(5);
    report(2, "energy consistency", ok, format!("max |T_c+T_m-T_w|/T_w {worst:.2e}"), el);
}

#[test]
fn criterion_03_bounded_limits() {
    let t0 = Instant::now();
    let mut g = rng(3);
    let mut exact = 0.0f64;
    let mut large = 0.0f64;
    for _ in 0..50 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let ip = polar(r);
        let no_couple = MaterialParameters { mu_c: 0.0, ..p };
        let inner = 9.0 * p.mu_c + p.mu_e;
        let cases = [
            (ModelKind::RelaxedMicromorphic, p, p.mu_micro),
            (ModelKind::RelaxedMicromorphic, no_couple, p.mu_micro),
            (ModelKind::RelaxedConformal, p, p.mu_micro * inner / (inner + p.mu_micro)),
            (ModelKind::CosseratConformal, p, 9.0 * p.mu_c + p.mu_macro),
            (ModelKind::MicroStrain, p, p.mu_e),
        ];
        for (m, q, modulus) in cases {
            let expected = modulus * ip;
            let inf = stiffness_at(m, &q, r, LengthScale::Infinite).unwrap().t_w;
            exact = exact.max(rel(inf, expected));
            large = large.max(rel(at(m, &q, r, 1e4 * r).t_w, expected));
        }
    }
    let el = t0.elapsed();
    let ok = exact <= 1e-12 && large <= 1e-4;
    report(3, "bounded limits", ok, format!("exact {exact:.2e}, at Lc=1e4 R {large:.2e}"), el);
}

fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_04_unbounded_growth() {
    let t0 = Instant::now();
    let mut g = rng(4);
    let ratios: Vec<f64> = (0..=8).map(|i| 10f64.powf(2.0 + 0.25 * i as f64)).collect();
    let mut slope_err = 0.0f64;
    let mut coef_err = 0.0f64;
    for _ in 0..20 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let ip = polar(r);
        let cosserat = p.mu * 24.0 * p.a1 * p.a3 / (p.a1 + 8.0 * p.a3);
        let cases = [
            (ModelKind::Cosserat, p, Some(cosserat)),
            (ModelKind::Cosserat, MaterialParameters { mu_c: 0.0, ..p }, Some(cosserat)),
            (ModelKind::IndeterminateCoupleStress, p, Some(3.0 * p.a1 * p.mu)),
            (ModelKind::SecondGradient, p, Some(2.0 * p.mu * (p.a1 + 3.0 * p.a2))),
            (ModelKind::Micromorphic, p, Some(4.0 * p.a2 * p.mu)),
            (ModelKind::AdHoc, p, None),
        ];
        for (m, q, c) in cases {
            let tw: Vec<f64> = ratios.iter().map(|x| at(m, &q, r, x * r).t_w).collect();
            slope_err = slope_err.max((loglog_slope(&ratios, &tw) - 2.0).abs());
            if let Some(c) = c {
                let (x1, x2) = (1e3, 1e4);
                let (t1, t2) = (at(m, &q, r, x1 * r).t_w, at(m, &q, r, x2 * r).t_w);
                coef_err = coef_err.max(rel((t2 - t1) / (ip * (x2 * x2 - x1 * x1)), c));
            }
        }
    }
    let el = t0.elapsed();
    let ok = slope_err <= 1e-3 && coef_err <= 1e-6;
    report(4, "unbounded growth", ok, format!("slope err {slope_err:.2e}, coefficient err {coef_err:.2e}"), el);
}

#[test]
fn criterion_05_oracle_equivalence() {
    let t0 = Instant::now();
    let mut g = rng(5);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..50 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let q = p.with_lc(log_uniform(&mut g, 1e-3, 1e3) * r);
        for m in PROFILE_MODELS {
            let closed = stiffness(m, &q, r).unwrap().t_w;
            let (_, numeric) = oracle_stiffness(m, &q, r, 200).unwrap();
            worst = worst.max(rel(numeric.t_w.value, closed));
            cases += 1;
        }
    }
    let el = t0.elapsed();
    let ok = worst <= 1e-7 && el < Duration::from_secs(60);
    report(5, "two-path oracle", ok, format!("max rel dev {worst:.2e} over {cases} cases"), el);
}

#[test]
fn criterion_06_model_collapse() {
    let t0 = Instant::now();
    let mut g = rng(6);
    let (mut mm, mut cs, mut rm, mut split) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut delegates = true;
    for _ in 0..20 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let lc = log_uniform(&mut g, 1e-2, 1e2) * r;
        let q = p.with_lc(lc);

        let a = at(ModelKind::Micromorphic, &MaterialParameters { a2: 0.0, ..q }, r, lc);
        let b = at(ModelKind::MicroStrain, &q, r, lc);
        mm = mm.max(rel(a.t_w, b.t_w));

        // both gaps close like (Lc/R) times the inverse square root of the stiff modulus
        let short = log_uniform(&mut g, 1e-2, 1.0) * r;
        let q = q.with_lc(short);

        // a third of the couple-stress T_m moves into T_c
        let stiff = MaterialParameters { mu_c: 1e12, ..q };
        let c = at(ModelKind::Cosserat, &stiff, r, short);
        let d = at(ModelKind::IndeterminateCoupleStress, &q, r, short);
        cs = cs.max(rel(c.t_w, d.t_w));
        split = split.max(rel(c.t_c - d.t_c, d.t_m / 3.0)).max(rel(c.t_m, 2.0 * d.t_m / 3.0));

        let relaxed = at(ModelKind::RelaxedMicromorphic, &MaterialParameters { mu_micro: 1e10, ..q }, r, short);
        let cos = at(ModelKind::Cosserat, &MaterialParameters { mu_macro: q.mu_e, ..q }, r, short);
        rm = rm.max(rel(relaxed.t_w, cos.t_w));

        let same = |a: torsion_lab::StiffnessTriple, b: torsion_lab::StiffnessTriple| {
            (a.t_c, a.t_m, a.t_w) == (b.t_c, b.t_m, b.t_w)
        };
        for lc in [lc, short] {
            delegates &= same(at(ModelKind::MicroStretch, &q, r, lc), at(ModelKind::Cosserat, &q, r, lc));
            delegates &= same(at(ModelKind::MicroVoid, &q, r, lc), at(ModelKind::Cauchy, &q, r, lc));
        }
    }
    let el = t0.elapsed();
    let ok = mm <= 1e-12 && cs <= 1e-5 && split <= 1e-5 && rm <= 1e-4 && delegates;
    report(
        6,
        "model collapse",
        ok,
        format!("MM/MS {mm:.2e}, Cos/CS {cs:.2e} (T_c/T_m split {split:.2e}), RM/Cos {rm:.2e}, delegates {delegates}"),
        el,
    );
}

#[test]
fn criterion_07_lakes_equivalence() {
    let t0 = Instant::now();
    let mut g = rng(7);
    let (mut worst, mut round) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let d = lakes_omega_dislocation(&p, r).unwrap();
        let tw = stiffness(ModelKind::Cosserat, &p, r).unwrap().t_w;
        worst = worst.max(rel(d.omega * p.mu_macro * polar(r), tw));
        let c = classical_from_dislocation(p.a1, p.a2, p.a3, p.mu, p.lc).unwrap();
        let (a1, a2, a3) = dislocation_from_classical(&c, p.mu, p.lc).unwrap();
        round = round.max(rel(a1, p.a1)).max(rel(a2, p.a2)).max(rel(a3, p.a3));
    }
    let el = t0.elapsed();
    let ok = worst <= 1e-10 && round <= 1e-12;
    report(7, "Lakes equivalence", ok, format!("Omega vs T_w {worst:.2e}, round trip {round:.2e}"), el);
}

#[test]
fn criterion_08_residuals() {
    let t0 = Instant::now();
    let mut g = rng(8);
    let (mut bc, mut ode) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let q = p.with_lc(log_uniform(&mut g, 1e-2, 1e2) * r);
        for m in PROFILE_MODELS {
            let sol = profile_solution(m, &q, r, q.lc.into()).unwrap();
            for k in 0..4 {
                let b = boundary_residual(m, &q, r, 0.4 + 1.3 * k as f64, &sol).unwrap();
                bc = bc.max(b.traction).max(b.moment.unwrap_or(0.0));
            }
            for i in 1..=20 {
                let e = equilibrium_residual(m, &q, r * i as f64 / 21.0, &sol).unwrap();
                ode = ode.max(e.gp.abs()).max(e.gm.abs());
            }
        }
    }
    let el = t0.elapsed();
    let ok = bc <= 1e-8 && ode <= 1e-8;
    report(8, "boundary and equilibrium residuals", ok, format!("BC {bc:.2e}, ODE {ode:.2e}"), el);
}

#[test]
fn criterion_09_constant_limit() {
    let t0 = Instant::now();
    let mut g = rng(9);
    let (mut disk, mut zero, mut te) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = random_parameters(&mut g);
        let r = log_uniform(&mut g, 0.1, 10.0);
        let twist = log_uniform(&mut g, 0.1, 10.0);
        let z = log_uniform(&mut g, 0.1, 10.0);
        // ∫ Du dA over the disk; the x₁, x₂ columns average out
        let a = twist * z * PI * r * r;
        let expected = Mat3::new(0.0, -a, 0.0, a, 0.0, 0.0, 0.0, 0.0, 0.0);
        disk = disk.max((disk_integral_du(r, twist, z) - expected).abs().max() / a);
        for m in [ModelKind::MicroStrain, ModelKind::Micromorphic] {
            let lim = constant_p_limit(m, &p, r, 2.0 * r).unwrap();
            zero = zero.max(lim.minimizer.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())));
        }
        let ms = constant_p_limit(ModelKind::MicroStrain, &p, r, 2.0 * r).unwrap();
        te = te.max(rel(ms.stiffness.unwrap_or(f64::NAN), p.mu_e * polar(r)));
    }
    let el = t0.elapsed();
    let ok = disk <= 1e-14 && zero == 0.0 && te <= 1e-12;
    report(9, "constant-field limit", ok, format!("disk integral {disk:.2e}, |P| {zero:.1e}, T_e {te:.2e}"), el);
}

fn roundtrip_problem(observations: Vec<Observation>, truth: MaterialParameters) -> FitProblem {
    FitProblem {
        model: ModelKind::Cosserat,
        observations,
        free: vec![
            FreeParameter { name: "mu_c".into(), lower: 1e-2, upper: 1e2 },
            FreeParameter { name: "Lc".into(), lower: 1e-2, upper: 1e1 },
        ],
        fixed: truth,
        max_iterations: 200,
    }
}

#[test]
fn criterion_10_identification() {
    let t0 = Instant::now();
    let truth = MaterialParameters { mu_macro: 1.0, mu_c: 0.5, a1: 5.0, a3: 0.0, mu: 1.0, lc: 0.3, ..Default::default() };
    let radii: Vec<f64> = (0..8).map(|i| 0.1 * (30f64).powf(i as f64 / 7.0)).collect();
    let err = |f: &torsion_lab::identify::FitResult| rel(f.fitted_values["mu_c"], 0.5).max(rel(f.fitted_values["Lc"], 0.3));

    let clean = fit(&roundtrip_problem(synthetic_dataset(ModelKind::Cosserat, &truth, &radii, 0.0, 0).unwrap(), truth)).unwrap();
    let clean_err = err(&clean);

    let mut noisy: Vec<f64> = (0..20)
        .map(|seed| {
            let data = synthetic_dataset(ModelKind::Cosserat, &truth, &radii, 0.01, seed).unwrap();
            err(&fit(&roundtrip_problem(data, truth)).unwrap())
        })
        .collect();
    noisy.sort_by(f64::total_cmp);
    let median = 0.5 * (noisy[9] + noisy[10]);

    let cs = MaterialParameters { mu_macro: 1.0, mu: 1.0, a1: 2.0, lc: 0.5, ..Default::default() };
    let data = synthetic_dataset(ModelKind::IndeterminateCoupleStress, &cs, &radii, 0.0, 0).unwrap();
    let redundant = fit(&FitProblem {
        model: ModelKind::IndeterminateCoupleStress,
        observations: data,
        free: vec![
            FreeParameter { name: "a1".into(), lower: 0.1, upper: 10.0 },
            FreeParameter { name: "Lc".into(), lower: 0.1, upper: 10.0 },
        ],
        fixed: cs,
        max_iterations: 200,
    })
    .unwrap();
    let flagged = redundant.convergence.singular_jacobian;

    let el = t0.elapsed();
    let ok = clean_err <= 1e-6 && median <= 0.05 && flagged && el < Duration::from_secs(30);
    report(
        10,
        "identification",
        ok,
        format!("noiseless {clean_err:.2e}, 1% noise median {median:.2e}, redundancy flagged {flagged}"),
        el,
    );
}
