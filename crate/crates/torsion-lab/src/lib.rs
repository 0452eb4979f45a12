//! Torsional stiffness of an infinite circular cylinder for a family of
//! isotropic generalized continua.
//!
//! The crate evaluates closed-form Bessel solutions for the stiffness triple
//! `(T_c, T_m, T_w)`, cross-checks them with an independent collocation and
//! quadrature path in [`oracle`], and fits material parameters to
//! stiffness-versus-radius data in [`identify`].

pub mod closed_form;
pub mod error;
pub mod fields;
pub mod identify;
pub mod materials;
pub mod model;
pub mod oracle;
pub mod specfun;

pub use closed_form::{
    polar_moment, stiffness, stiffness_at, stiffness_curve, LengthScale, RadialProfile,
    StiffnessTriple, TorsionGeometry,
};
pub use error::{Error, Result};
pub use materials::MaterialParameters;
pub use model::ModelKind;
