//! Parameter identification from stiffness-versus-radius data, and the
//! Lakes-normalized size-effect diagnostics.

use crate::closed_form::{macro_modulus, polar_moment, stiffness};
use crate::error::{Error, Result};
use crate::materials::{classical_from_dislocation, ClassicalCosseratCoefficients, MaterialParameters};
use crate::model::ModelKind;
use crate::specfun::ReducedBessel;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Scaled-Jacobian condition number above which the free set is reported
/// as not identifiable.
pub const SINGULAR_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "T_w")]
    pub t_w: f64,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeParameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub model: ModelKind,
    pub observations: Vec<Observation>,
    pub free: Vec<FreeParameter>,
    /// Values of every parameter; the free ones are overwritten.
    pub fixed: MaterialParameters,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
}

fn default_iterations() -> usize {
    200
}

impl FitProblem {
    pub fn validate(&self) -> Result<()> {
        if self.free.is_empty() {
            return Err(Error::Invalid("no free parameters".into()));
        }
        if self.observations.len() < self.free.len() {
            return Err(Error::Invalid(format!(
                "{} observations cannot determine {} parameters",
                self.observations.len(),
                self.free.len()
            )));
        }
        let mut radii: Vec<f64> = self.observations.iter().map(|o| o.radius).collect();
        if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Invalid("radii must be positive".into()));
        }
        radii.sort_by(f64::total_cmp);
        if radii.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("radii must be distinct".into()));
        }
        for o in &self.observations {
            if !o.t_w.is_finite() || !(o.weight >= 0.0) {
                return Err(Error::Invalid("observations need finite T_w and weight >= 0".into()));
            }
        }
        for f in &self.free {
            self.fixed.get(&f.name)?;
            if !(f.lower > 0.0 && f.upper > f.lower && f.upper.is_finite()) {
                return Err(Error::Invalid(format!("bounds of {} must satisfy 0 < lower < upper", f.name)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
    pub max_iterations: usize,
    pub singular_jacobian: bool,
    /// A step left the bounds and was projected back.
    pub projected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub fitted_values: BTreeMap<String, f64>,
    pub parameters: MaterialParameters,
    pub residual_norm: f64,
    /// `√wᵢ (T_model(Rᵢ) − T_wᵢ)`.
    pub per_point_residuals: Vec<f64>,
    pub convergence: Convergence,
    /// Of the column-scaled Jacobian in log-parameters at the solution.
    pub condition_number: f64,
    /// In log-parameters, when the residual has spare degrees of freedom.
    pub covariance_estimate: Option<Vec<Vec<f64>>>,
    /// Objective after every accepted step.
    pub objective_history: Vec<f64>,
}

struct Evaluator<'a> {
    problem: &'a FitProblem,
}

impl Evaluator<'_> {
    fn params(&self, theta: &DVector<f64>) -> Result<MaterialParameters> {
        let mut p = self.problem.fixed;
        for (f, t) in self.problem.free.iter().zip(theta.iter()) {
            p.set(&f.name, t.exp())?;
        }
        Ok(p)
    }

    fn residuals(&self, theta: &DVector<f64>) -> Result<DVector<f64>> {
        let p = self.params(theta)?;
        let obs = &self.problem.observations;
        let mut r = DVector::zeros(obs.len());
        for (i, o) in obs.iter().enumerate() {
            let t = stiffness(self.problem.model, &p, o.radius)?.t_w;
            r[i] = o.weight.sqrt() * (t - o.t_w);
        }
        Ok(r)
    }

    fn jacobian(&self, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
        let m = self.problem.observations.len();
        let n = theta.len();
        let mut j = DMatrix::zeros(m, n);
        for k in 0..n {
            let h = 1e-6 * theta[k].abs().max(1.0);
            let mut up = theta.clone();
            let mut down = theta.clone();
            up[k] += h;
            down[k] -= h;
            let col = (self.residuals(&up)? - self.residuals(&down)?) / (2.0 * h);
            j.set_column(k, &col);
        }
        Ok(j)
    }
}

fn scaled_condition(j: &DMatrix<f64>) -> f64 {
    let mut s = j.clone();
    for mut col in s.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        }
    }
    let sv = s.svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Damped least squares in log-parameters, started at the geometric mean of
/// each bound pair.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let ev = Evaluator { problem };
    let lo = DVector::from_iterator(problem.free.len(), problem.free.iter().map(|f| f.lower.ln()));
    let hi = DVector::from_iterator(problem.free.len(), problem.free.iter().map(|f| f.upper.ln()));
    let mut theta = (&lo + &hi) * 0.5;
    let mut r = ev.residuals(&theta)?;
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut projected = false;
    let mut converged = false;
    let mut iterations = 0;
    let mut j = ev.jacobian(&theta)?;
    while iterations < problem.max_iterations {
        iterations += 1;
        let g = j.transpose() * &r;
        let jtj = j.transpose() * &j;
        // bounds the descent direction pushes against are held fixed
        let active: Vec<usize> = (0..theta.len())
            .filter(|&k| !((theta[k] <= lo[k] && g[k] > 0.0) || (theta[k] >= hi[k] && g[k] < 0.0)))
            .collect();
        let pg = active.iter().map(|&k| g[k].abs()).fold(0.0, f64::max);
        let scale = (j.norm() * r.norm()).max(f64::MIN_POSITIVE);
        if cost == 0.0 || active.is_empty() || pg <= 1e-14 * scale {
            converged = true;
            break;
        }
        let n = active.len();
        let sub = DMatrix::from_fn(n, n, |a, b| jtj[(active[a], active[b])]);
        let rhs = DVector::from_fn(n, |a, _| -g[active[a]]);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = sub.clone();
            for k in 0..n {
                a[(k, k)] += lambda * sub[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&rhs) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = theta.clone();
            for (s, &k) in step.iter().zip(&active) {
                trial[k] += s;
                if trial[k] < lo[k] || trial[k] > hi[k] {
                    trial[k] = trial[k].clamp(lo[k], hi[k]);
                    projected = true;
                }
            }
            let tr = match ev.residuals(&trial) {
                Ok(v) if v.iter().all(|x| x.is_finite()) => v,
                _ => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let tc = tr.norm_squared();
            if tc <= cost {
                let dtheta = (&trial - &theta).norm();
                let small_step = dtheta <= 1e-10 * (theta.norm() + 1e-10);
                let small_change = cost - tc <= 1e-15 * cost;
                theta = trial;
                r = tr;
                cost = tc;
                history.push(cost);
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                j = ev.jacobian(&theta)?;
                let g = j.transpose() * &r;
                let pg = (0..theta.len())
                    .filter(|&k| !((theta[k] <= lo[k] && g[k] > 0.0) || (theta[k] >= hi[k] && g[k] < 0.0)))
                    .map(|k| g[k].abs())
                    .fold(0.0, f64::max);
                let grad_small = pg <= 1e-10 * (j.norm() * r.norm()).max(f64::MIN_POSITIVE);
                if (small_step && grad_small) || small_change {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // no descent direction left at machine precision
            converged = true;
            break;
        }
    }
    let condition_number = scaled_condition(&j);
    let singular = !(condition_number < SINGULAR_CONDITION);
    let params = ev.params(&theta)?;
    let (m, n) = (r.len(), theta.len());
    let covariance_estimate = if m > n && !singular {
        (j.transpose() * &j).try_inverse().map(|inv| {
            let s2 = cost / (m - n) as f64;
            (0..n).map(|a| (0..n).map(|b| s2 * inv[(a, b)]).collect()).collect()
        })
    } else {
        None
    };
    let fitted_values = problem
        .free
        .iter()
        .zip(theta.iter())
        .map(|(f, t)| (f.name.clone(), t.exp()))
        .collect();
    let per_point_residuals: Vec<f64> = r.iter().copied().collect();
    Ok(FitResult {
        fitted_values,
        parameters: params,
        residual_norm: per_point_residuals.iter().map(|v| v * v).sum::<f64>().sqrt(),
        per_point_residuals,
        convergence: Convergence {
            converged,
            iterations,
            max_iterations: problem.max_iterations,
            singular_jacobian: singular,
            projected,
        },
        condition_number,
        covariance_estimate,
        objective_history: history,
    })
}

/// Stiffness data of `model` at `radii` with multiplicative Gaussian noise of
/// relative size `noise`. Weights are `1/T_w²`, so residuals are relative.
pub fn synthetic_dataset(
    model: ModelKind,
    params: &MaterialParameters,
    radii: &[f64],
    noise: f64,
    seed: u64,
) -> Result<Vec<Observation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Invalid(e.to_string()))?;
    radii
        .iter()
        .map(|&radius| {
            let clean = stiffness(model, params, radius)?.t_w;
            let t_w = clean * (1.0 + noise * normal.sample(&mut rng));
            Ok(Observation { radius, t_w, weight: 1.0 / (t_w * t_w) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LakesDiagnostics {
    pub ell_t: f64,
    #[serde(rename = "Psi")]
    pub psi: f64,
    #[serde(rename = "N")]
    pub coupling_number: f64,
    pub chi: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
}

/// `Ω = 1 + 6 (ℓ_t/R)² (1 − 4Ψχ/3)/(1 − Ψχ)` from classical coefficients.
pub fn lakes_omega(
    c: &ClassicalCosseratCoefficients,
    mu_macro: f64,
    mu_c: f64,
    radius: f64,
) -> Result<LakesDiagnostics> {
    let total = c.alpha + c.beta + c.gamma;
    if !(total > 0.0) || !(radius > 0.0) || !(mu_macro > 0.0) || !(mu_c >= 0.0) {
        return Err(Error::Domain("need α+β+γ > 0, R > 0, mu_macro > 0, mu_c >= 0".into()));
    }
    let ell2 = (c.beta + c.gamma) / (2.0 * mu_macro);
    let psi = (c.beta + c.gamma) / total;
    let chi = if mu_c.is_infinite() {
        0.0
    } else {
        let b = ReducedBessel::new((4.0 * mu_c / total).sqrt() * radius);
        b.j1 / b.i0
    };
    let den = 1.0 - psi * chi;
    if den == 0.0 {
        return Err(Error::Domain("1 − Ψχ vanishes: pole of the Ω formula".into()));
    }
    Ok(LakesDiagnostics {
        ell_t: ell2.sqrt(),
        psi,
        coupling_number: (mu_c / (mu_macro + mu_c)).sqrt(),
        chi,
        omega: 1.0 + 6.0 * ell2 / (radius * radius) * (1.0 - 4.0 / 3.0 * psi * chi) / den,
    })
}

/// [`lakes_omega`] for dislocation-format parameters.
pub fn lakes_omega_dislocation(p: &MaterialParameters, radius: f64) -> Result<LakesDiagnostics> {
    let c = classical_from_dislocation(p.a1, p.a2, p.a3, p.mu, p.lc)?;
    lakes_omega(&c, p.mu_macro, p.mu_c, radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeEffectRow {
    pub r_squared: f64,
    pub t_w_over_r2: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEffectTable {
    pub model: ModelKind,
    pub rows: Vec<SizeEffectRow>,
    /// Intercept of `T_w/R²` at `R² → 0` for `μ_c → 0`.
    pub ell_a: f64,
    /// Intercept of `T_w/R²` at `R² → 0` for `μ_c → ∞`.
    pub ell_b: f64,
}

pub fn size_effect_table(model: ModelKind, params: &MaterialParameters, radii: &[f64]) -> Result<SizeEffectTable> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Invalid("radius grid must be nonempty and positive".into()));
    }
    let macro_ = macro_modulus(model, params);
    let rows = radii
        .iter()
        .map(|&r| {
            let t = stiffness(model, params, r)?.t_w;
            Ok(SizeEffectRow { r_squared: r * r, t_w_over_r2: t / (r * r), omega: t / (macro_ * polar_moment(r)) })
        })
        .collect::<Result<Vec<_>>>()?;
    let ml2 = params.mu * params.lc * params.lc;
    let (a1, a3) = (params.a1, params.a3);
    let ell_a = if a1 + 8.0 * a3 > 0.0 { ml2 * 12.0 * PI * a1 * a3 / (a1 + 8.0 * a3) } else { 0.0 };
    Ok(SizeEffectTable { model, rows, ell_a, ell_b: ml2 * 1.5 * PI * a1 })
}
