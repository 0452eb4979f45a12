#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use torsion_lab::{MaterialParameters, ModelKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Positive moduli spread over two decades; every model accepts the set.
pub fn random_parameters(rng: &mut ChaCha8Rng) -> MaterialParameters {
    let mut m = || log_uniform(rng, 0.1, 10.0);
    MaterialParameters {
        mu_macro: m(),
        lambda_macro: m(),
        mu_e: m(),
        lambda_e: m(),
        mu_micro: m(),
        lambda_micro: m(),
        mu_c: m(),
        mu: m(),
        a1: m(),
        a2: m(),
        a3: m(),
        a4: m(),
        lc: m(),
    }
}

pub fn polar(r: f64) -> f64 {
    PI * r.powi(4) / 2.0
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn reuss(a: f64, b: f64) -> f64 {
    a * b / (a + b)
}

/// Shear modulus at vanishing length scale.
pub fn macro_shear(model: ModelKind, p: &MaterialParameters) -> f64 {
    use ModelKind::*;
    match model {
        RelaxedMicromorphic | RelaxedConformal | RelaxedSymmetricStress | Micromorphic
        | MicromorphicReducedCurvature | MicroStrain | AdHoc => reuss(p.mu_e, p.mu_micro),
        _ => p.mu_macro,
    }
}

pub const PROFILE_MODELS: [ModelKind; 10] = [
    ModelKind::RelaxedMicromorphic,
    ModelKind::RelaxedConformal,
    ModelKind::RelaxedSymmetricStress,
    ModelKind::Cosserat,
    ModelKind::CosseratConformal,
    ModelKind::Micromorphic,
    ModelKind::MicromorphicReducedCurvature,
    ModelKind::MicroStrain,
    ModelKind::MicroStretch,
    ModelKind::AdHoc,
];
