//! Material parameters, Reuss scale relations, positivity checks and the
//! classical Cosserat coefficient dictionary.

use crate::error::{Error, Result};
use crate::model::ModelKind;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// All moduli of the family in MPa, curvature coefficients dimensionless,
/// `Lc` in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "ParameterDocument")]
pub struct MaterialParameters {
    pub mu_macro: f64,
    pub lambda_macro: f64,
    pub mu_e: f64,
    pub lambda_e: f64,
    pub mu_micro: f64,
    pub lambda_micro: f64,
    pub mu_c: f64,
    pub mu: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    #[serde(rename = "Lc")]
    pub lc: f64,
}

/// Flat key-value form; each scale may give `lambda_*` or `kappa_*`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterDocument {
    mu_macro: Option<f64>,
    lambda_macro: Option<f64>,
    kappa_macro: Option<f64>,
    mu_e: Option<f64>,
    lambda_e: Option<f64>,
    kappa_e: Option<f64>,
    mu_micro: Option<f64>,
    lambda_micro: Option<f64>,
    kappa_micro: Option<f64>,
    mu_c: Option<f64>,
    mu: Option<f64>,
    a1: Option<f64>,
    a2: Option<f64>,
    a3: Option<f64>,
    a4: Option<f64>,
    #[serde(rename = "Lc")]
    lc: Option<f64>,
}

fn lambda_of(mu: f64, lambda: Option<f64>, kappa: Option<f64>, scale: &str) -> Result<f64> {
    match (lambda, kappa) {
        (Some(_), Some(_)) => Err(Error::Invalid(format!(
            "give either lambda_{scale} or kappa_{scale}, not both"
        ))),
        (Some(l), None) => Ok(l),
        (None, Some(k)) => Ok((3.0 * k - 2.0 * mu) / 3.0),
        (None, None) => Ok(0.0),
    }
}

impl TryFrom<ParameterDocument> for MaterialParameters {
    type Error = Error;

    fn try_from(d: ParameterDocument) -> Result<Self> {
        let mu_macro = d.mu_macro.unwrap_or(0.0);
        let mu_e = d.mu_e.unwrap_or(0.0);
        let mu_micro = d.mu_micro.unwrap_or(0.0);
        Ok(Self {
            mu_macro,
            lambda_macro: lambda_of(mu_macro, d.lambda_macro, d.kappa_macro, "macro")?,
            mu_e,
            lambda_e: lambda_of(mu_e, d.lambda_e, d.kappa_e, "e")?,
            mu_micro,
            lambda_micro: lambda_of(mu_micro, d.lambda_micro, d.kappa_micro, "micro")?,
            mu_c: d.mu_c.unwrap_or(0.0),
            mu: d.mu.unwrap_or(0.0),
            a1: d.a1.unwrap_or(0.0),
            a2: d.a2.unwrap_or(0.0),
            a3: d.a3.unwrap_or(0.0),
            a4: d.a4.unwrap_or(0.0),
            lc: d.lc.unwrap_or(0.0),
        })
    }
}

pub const PARAMETER_NAMES: [&str; 13] = [
    "mu_macro",
    "lambda_macro",
    "mu_e",
    "lambda_e",
    "mu_micro",
    "lambda_micro",
    "mu_c",
    "mu",
    "a1",
    "a2",
    "a3",
    "a4",
    "Lc",
];

impl MaterialParameters {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("parameter document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        PARAMETER_NAMES
            .iter()
            .map(|k| (k.to_string(), self.get(k).unwrap()))
            .collect()
    }

    pub fn get(&self, key: &str) -> Result<f64> {
        Ok(match key {
            "mu_macro" => self.mu_macro,
            "lambda_macro" => self.lambda_macro,
            "mu_e" => self.mu_e,
            "lambda_e" => self.lambda_e,
            "mu_micro" => self.mu_micro,
            "lambda_micro" => self.lambda_micro,
            "mu_c" => self.mu_c,
            "mu" => self.mu,
            "a1" => self.a1,
            "a2" => self.a2,
            "a3" => self.a3,
            "a4" => self.a4,
            "Lc" | "lc" => self.lc,
            "kappa_macro" => self.kappa_macro(),
            "kappa_e" => self.kappa_e(),
            "kappa_micro" => self.kappa_micro(),
            _ => return Err(Error::Invalid(format!("unknown parameter '{key}'"))),
        })
    }

    /// Sets one field by name. `kappa_*` keys set the matching `lambda_*`
    /// using the current shear modulus of that scale.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "mu_macro" => &mut self.mu_macro,
            "lambda_macro" => &mut self.lambda_macro,
            "mu_e" => &mut self.mu_e,
            "lambda_e" => &mut self.lambda_e,
            "mu_micro" => &mut self.mu_micro,
            "lambda_micro" => &mut self.lambda_micro,
            "mu_c" => &mut self.mu_c,
            "mu" => &mut self.mu,
            "a1" => &mut self.a1,
            "a2" => &mut self.a2,
            "a3" => &mut self.a3,
            "a4" => &mut self.a4,
            "Lc" | "lc" => &mut self.lc,
            "kappa_macro" => {
                self.lambda_macro = (3.0 * value - 2.0 * self.mu_macro) / 3.0;
                return Ok(());
            }
            "kappa_e" => {
                self.lambda_e = (3.0 * value - 2.0 * self.mu_e) / 3.0;
                return Ok(());
            }
            "kappa_micro" => {
                self.lambda_micro = (3.0 * value - 2.0 * self.mu_micro) / 3.0;
                return Ok(());
            }
            _ => return Err(Error::Invalid(format!("unknown parameter '{key}'"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn with_lc(mut self, lc: f64) -> Self {
        self.lc = lc;
        self
    }

    pub fn kappa_macro(&self) -> f64 {
        kappa(self.mu_macro, self.lambda_macro)
    }

    pub fn kappa_e(&self) -> f64 {
        kappa(self.mu_e, self.lambda_e)
    }

    pub fn kappa_micro(&self) -> f64 {
        kappa(self.mu_micro, self.lambda_micro)
    }

    /// Reuss combination `mu_e mu_micro / (mu_e + mu_micro)`.
    pub fn reuss_mu_macro(&self) -> f64 {
        reuss_combine(self.mu_e, self.mu_micro)
    }
}

pub fn kappa(mu: f64, lambda: f64) -> f64 {
    (2.0 * mu + 3.0 * lambda) / 3.0
}

/// Springs in series: `a b / (a + b)`; an infinite partner returns the other.
pub fn reuss_combine(a: f64, b: f64) -> f64 {
    if a.is_infinite() {
        return b;
    }
    if b.is_infinite() {
        return a;
    }
    a * b / (a + b)
}

fn reuss_meso(macro_: f64, micro: f64, what: &str) -> Result<f64> {
    if !(macro_ > 0.0) {
        return Err(Error::Degenerate(format!("{what}_macro must be positive")));
    }
    if micro.is_infinite() {
        return Ok(macro_);
    }
    if !(micro > macro_) {
        return Err(Error::Degenerate(format!(
            "{what}_micro = {micro} must exceed {what}_macro = {macro_}"
        )));
    }
    Ok(macro_ * micro / (micro - macro_))
}

/// Meso-scale shear modulus from the Reuss relation.
pub fn reuss_mu_e(mu_macro: f64, mu_micro: f64) -> Result<f64> {
    reuss_meso(mu_macro, mu_micro, "mu")
}

/// Meso-scale bulk modulus from the Reuss relation.
pub fn reuss_kappa_e(kappa_macro: f64, kappa_micro: f64) -> Result<f64> {
    reuss_meso(kappa_macro, kappa_micro, "kappa")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalCosseratCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn classical_from_dislocation(
    a1: f64,
    a2: f64,
    a3: f64,
    mu: f64,
    lc: f64,
) -> Result<ClassicalCosseratCoefficients> {
    if !(mu > 0.0) || !(lc >= 0.0) {
        return Err(Error::Domain("need mu > 0 and Lc >= 0".into()));
    }
    let s = mu * lc * lc;
    Ok(ClassicalCosseratCoefficients {
        alpha: s * (4.0 * a3 - a1) / 3.0,
        beta: s * (a1 - a2) / 2.0,
        gamma: s * (a1 + a2) / 2.0,
    })
}

/// Inverse of [`classical_from_dislocation`]; returns `(a1, a2, a3)`.
pub fn dislocation_from_classical(
    c: &ClassicalCosseratCoefficients,
    mu: f64,
    lc: f64,
) -> Result<(f64, f64, f64)> {
    let s = mu * lc * lc;
    if !(s.abs() > 0.0) || !s.is_finite() {
        return Err(Error::Degenerate("mu Lc^2 must be nonzero".into()));
    }
    Ok((
        (c.gamma + c.beta) / s,
        (c.gamma - c.beta) / s,
        (3.0 * c.alpha + c.beta + c.gamma) / (4.0 * s),
    ))
}

/// Shear and pressure wave speeds `(c_s, c_p)`.
pub fn wave_speeds(mu: f64, lambda: f64, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0) || !(mu > 0.0) || !(2.0 * mu + lambda > 0.0) {
        return Err(Error::Domain("wave speeds need rho > 0, mu > 0, 2mu + lambda > 0".into()));
    }
    Ok(((mu / rho).sqrt(), ((2.0 * mu + lambda) / rho).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineeringModuli {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    pub kappa: f64,
    pub lambda: f64,
}

pub fn engineering_moduli(mu: f64, kappa: f64) -> Result<EngineeringModuli> {
    if !(mu > 0.0) || !(kappa > 0.0) {
        return Err(Error::Domain("engineering moduli need mu > 0 and kappa > 0".into()));
    }
    Ok(EngineeringModuli {
        e: 9.0 * kappa * mu / (3.0 * kappa + mu),
        nu: (3.0 * kappa - 2.0 * mu) / (2.0 * (3.0 * kappa + mu)),
        kappa,
        lambda: (3.0 * kappa - 2.0 * mu) / 3.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitenessReport {
    pub admissible: bool,
    /// `mu_c = 0`: semi-definite but admissible.
    pub semi_definite: bool,
    pub violations: Vec<String>,
}

/// Positive-definiteness of the energy of `model` with the parameters it uses.
pub fn positive_definiteness_check(p: &MaterialParameters, model: ModelKind) -> DefinitenessReport {
    let mut bad = Vec::new();
    let mut semi = false;
    let mut positive = |name: &str, v: f64| {
        if !(v > 0.0) || !v.is_finite() {
            bad.push(format!("{name} = {v} must be positive"));
        }
    };
    let m = model.delegate();
    if model.uses_reuss_macro() {
        positive("mu_e", p.mu_e);
        positive("kappa_e", p.kappa_e());
        positive("mu_micro", p.mu_micro);
        positive("kappa_micro", p.kappa_micro());
    } else {
        positive("mu_macro", p.mu_macro);
        positive("kappa_macro", p.kappa_macro());
    }
    let curvature: &[(&str, f64)] = match m {
        ModelKind::Cauchy => &[],
        ModelKind::RelaxedMicromorphic | ModelKind::RelaxedSymmetricStress | ModelKind::Cosserat => {
            // a3 = 0 leaves the conformal curvature
            if p.a3 == 0.0 {
                semi = true;
                &[("a1", p.a1)]
            } else {
                &[("a1", p.a1), ("a3", p.a3)]
            }
        }
        ModelKind::RelaxedConformal | ModelKind::CosseratConformal => &[("a1", p.a1)],
        ModelKind::IndeterminateCoupleStress
        | ModelKind::MicroStrain
        | ModelKind::MicromorphicReducedCurvature
        | ModelKind::StrainGradient => &[("a1", p.a1)],
        ModelKind::Micromorphic | ModelKind::SecondGradient => &[("a1", p.a1), ("a2", p.a2)],
        ModelKind::AdHoc => &[("a1", p.a1), ("a3", p.a3), ("a4", p.a4)],
        _ => unreachable!("delegated"),
    };
    if !curvature.is_empty() {
        positive("mu", p.mu);
        for (name, v) in curvature {
            positive(name, *v);
        }
    }
    let couple = matches!(
        m,
        ModelKind::RelaxedMicromorphic
            | ModelKind::RelaxedConformal
            | ModelKind::Cosserat
            | ModelKind::CosseratConformal
            | ModelKind::Micromorphic
            | ModelKind::AdHoc
    );
    if couple {
        if p.mu_c < 0.0 || p.mu_c.is_nan() {
            bad.push(format!("mu_c = {} must be >= 0", p.mu_c));
        } else if p.mu_c == 0.0 {
            semi = true;
        }
    }
    if !(p.lc >= 0.0) {
        bad.push(format!("Lc = {} must be >= 0", p.lc));
    }
    DefinitenessReport {
        admissible: bad.is_empty(),
        semi_definite: semi,
        violations: bad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reuss_examples() {
        let v = reuss_mu_e(1.0 / 14.0, 2.0).unwrap();
        assert!((v - 2.0 / 27.0).abs() < 1e-16);
        assert!((reuss_mu_e(0.1, 0.25).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(reuss_mu_e(0.3, f64::INFINITY).unwrap(), 0.3);
        assert!((reuss_kappa_e(1.0, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((reuss_kappa_e(2.0 / 3.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(reuss_mu_e(1.0, 1.0).is_err());
        assert!(reuss_mu_e(1.0, 0.5).is_err());
    }

    #[test]
    fn dictionary_examples() {
        let c = classical_from_dislocation(0.0, 0.0, 0.0, 3.0, 2.0).unwrap();
        assert_eq!((c.alpha, c.beta, c.gamma), (0.0, 0.0, 0.0));
        let c = classical_from_dislocation(1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert!((c.alpha - 2.0).abs() < 1e-15 && c.beta == 0.0 && (c.gamma - 2.0).abs() < 1e-15);
        let c = ClassicalCosseratCoefficients { alpha: 1.0, beta: 0.0, gamma: 1.0 };
        let (a1, a2, a3) = dislocation_from_classical(&c, 2.0, 1.0).unwrap();
        assert_eq!((a1, a2, a3), (0.5, 0.5, 0.5));
        assert!(dislocation_from_classical(&c, 2.0, 0.0).is_err());
    }

    #[test]
    fn elementary_moduli() {
        assert_eq!(wave_speeds(1.0, 0.0, 1.0).unwrap(), (1.0, 2f64.sqrt()));
        assert_eq!(wave_speeds(4.0, 1.0, 1.0).unwrap(), (2.0, 3.0));
        let m = engineering_moduli(2.0, 2.0).unwrap();
        assert!((m.nu - 0.125).abs() < 1e-15);
        let m = engineering_moduli(3.0, 1.0).unwrap();
        assert!((m.lambda + 1.0).abs() < 1e-15);
    }

    #[test]
    fn document_accepts_kappa() {
        let p = MaterialParameters::from_json(r#"{"mu_macro": 1.0, "kappa_macro": 2.0, "Lc": 0.5}"#)
            .unwrap();
        assert!((p.kappa_macro() - 2.0).abs() < 1e-15);
        assert_eq!(p.lc, 0.5);
        assert!(MaterialParameters::from_json(r#"{"mu_macro": 1, "bogus": 2}"#).is_err());
        assert!(MaterialParameters::from_json(r#"{"lambda_e": 1, "kappa_e": 2}"#).is_err());
        let back = MaterialParameters::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn definiteness_rejects_nonpositive_micro() {
        let p = MaterialParameters {
            mu_e: 0.1,
            mu_micro: 0.0,
            mu_c: 0.5,
            mu: 1.0,
            a1: 0.2,
            a3: 0.1,
            ..Default::default()
        };
        let r = positive_definiteness_check(&p, ModelKind::RelaxedMicromorphic);
        assert!(!r.admissible);
        let ok = MaterialParameters { mu_micro: 0.25, ..p };
        assert!(positive_definiteness_check(&ok, ModelKind::RelaxedMicromorphic).admissible);
        let semi = MaterialParameters { mu_c: 0.0, ..ok };
        let r = positive_definiteness_check(&semi, ModelKind::RelaxedMicromorphic);
        assert!(r.admissible && r.semi_definite);
    }
}
