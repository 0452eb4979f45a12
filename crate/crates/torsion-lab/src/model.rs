use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Members of the generalized-continuum family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Cauchy,
    RelaxedMicromorphic,
    RelaxedConformal,
    RelaxedSymmetricStress,
    Cosserat,
    CosseratConformal,
    IndeterminateCoupleStress,
    ModifiedCoupleStress,
    PseudoConsistentCoupleStress,
    Micromorphic,
    MicromorphicReducedCurvature,
    MicroStrain,
    MicroStretch,
    MicroVoid,
    SecondGradient,
    StrainGradient,
    AdHoc,
}

/// Curvature measure used by a model's higher-order energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    None,
    /// Second-order moment tensor paired with `Curl P`.
    Curl,
    /// Third-order hyperstress paired with `D P`.
    Gradient,
    /// Both, as in the ad-hoc model.
    Mixed,
}

impl ModelKind {
    pub const ALL: [ModelKind; 17] = [
        ModelKind::Cauchy,
        ModelKind::RelaxedMicromorphic,
        ModelKind::RelaxedConformal,
        ModelKind::RelaxedSymmetricStress,
        ModelKind::Cosserat,
        ModelKind::CosseratConformal,
        ModelKind::IndeterminateCoupleStress,
        ModelKind::ModifiedCoupleStress,
        ModelKind::PseudoConsistentCoupleStress,
        ModelKind::Micromorphic,
        ModelKind::MicromorphicReducedCurvature,
        ModelKind::MicroStrain,
        ModelKind::MicroStretch,
        ModelKind::MicroVoid,
        ModelKind::SecondGradient,
        ModelKind::StrainGradient,
        ModelKind::AdHoc,
    ];

    /// The model whose formulas are actually evaluated.
    pub fn delegate(self) -> ModelKind {
        match self {
            ModelKind::MicroStretch => ModelKind::Cosserat,
            ModelKind::MicroVoid | ModelKind::PseudoConsistentCoupleStress => ModelKind::Cauchy,
            ModelKind::ModifiedCoupleStress => ModelKind::IndeterminateCoupleStress,
            other => other,
        }
    }

    /// Models whose macroscopic modulus is the Reuss combination of
    /// `mu_e` and `mu_micro`.
    pub fn uses_reuss_macro(self) -> bool {
        matches!(
            self.delegate(),
            ModelKind::RelaxedMicromorphic
                | ModelKind::RelaxedConformal
                | ModelKind::RelaxedSymmetricStress
                | ModelKind::Micromorphic
                | ModelKind::MicromorphicReducedCurvature
                | ModelKind::MicroStrain
                | ModelKind::AdHoc
        )
    }

    /// Models with nontrivial radial profile functions.
    pub fn has_profiles(self) -> bool {
        !matches!(
            self.delegate(),
            ModelKind::Cauchy
                | ModelKind::IndeterminateCoupleStress
                | ModelKind::SecondGradient
                | ModelKind::StrainGradient
        )
    }

    pub fn curvature(self) -> CurvatureKind {
        match self.delegate() {
            ModelKind::Cauchy => CurvatureKind::None,
            ModelKind::RelaxedMicromorphic
            | ModelKind::RelaxedConformal
            | ModelKind::RelaxedSymmetricStress
            | ModelKind::Cosserat
            | ModelKind::CosseratConformal
            | ModelKind::IndeterminateCoupleStress => CurvatureKind::Curl,
            ModelKind::AdHoc => CurvatureKind::Mixed,
            _ => CurvatureKind::Gradient,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Cauchy => "Cauchy",
            ModelKind::RelaxedMicromorphic => "RelaxedMicromorphic",
            ModelKind::RelaxedConformal => "RelaxedConformal",
            ModelKind::RelaxedSymmetricStress => "RelaxedSymmetricStress",
            ModelKind::Cosserat => "Cosserat",
            ModelKind::CosseratConformal => "CosseratConformal",
            ModelKind::IndeterminateCoupleStress => "IndeterminateCoupleStress",
            ModelKind::ModifiedCoupleStress => "ModifiedCoupleStress",
            ModelKind::PseudoConsistentCoupleStress => "PseudoConsistentCoupleStress",
            ModelKind::Micromorphic => "Micromorphic",
            ModelKind::MicromorphicReducedCurvature => "MicromorphicReducedCurvature",
            ModelKind::MicroStrain => "MicroStrain",
            ModelKind::MicroStretch => "MicroStretch",
            ModelKind::MicroVoid => "MicroVoid",
            ModelKind::SecondGradient => "SecondGradient",
            ModelKind::StrainGradient => "StrainGradient",
            ModelKind::AdHoc => "AdHoc",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Invalid(format!("unknown model '{s}'")))
    }
}

/// Classical-torque, higher-order-torque and energy stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessTriple {
    #[serde(rename = "T_c")]
    pub t_c: f64,
    #[serde(rename = "T_m")]
    pub t_m: f64,
    #[serde(rename = "T_w")]
    pub t_w: f64,
    pub model: ModelKind,
}

impl StiffnessTriple {
    pub(crate) fn scaled(model: ModelKind, ip: f64, c: f64, m: f64, w: Option<f64>) -> Self {
        Self {
            t_c: c * ip,
            t_m: m * ip,
            t_w: w.unwrap_or(c + m) * ip,
            model,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t_w.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for m in ModelKind::ALL {
            assert_eq!(m.name().parse::<ModelKind>().unwrap(), m);
        }
        assert_eq!("micro-strain".parse::<ModelKind>().unwrap(), ModelKind::MicroStrain);
        assert!("foo".parse::<ModelKind>().is_err());
    }

    #[test]
    fn delegation() {
        assert_eq!(ModelKind::MicroStretch.delegate(), ModelKind::Cosserat);
        assert_eq!(ModelKind::MicroVoid.delegate(), ModelKind::Cauchy);
        assert_eq!(
            ModelKind::ModifiedCoupleStress.delegate(),
            ModelKind::IndeterminateCoupleStress
        );
        assert_eq!(ModelKind::PseudoConsistentCoupleStress.delegate(), ModelKind::Cauchy);
    }
}
