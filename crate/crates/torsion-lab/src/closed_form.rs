//! Closed-form torsional stiffness and radial profiles.
//!
//! The radial profiles of every model are sums of a constant and the regular
//! Bessel branch `I_1(k r)/r`. All formulas are written with the scaled
//! reduced functions of [`crate::specfun::ReducedBessel`], so they are finite
//! for every `L_c > 0` and contain no cancelling differences.

use crate::error::{Error, Result};
use crate::fields::{ProfileField, ProfileValues};
use crate::materials::{reuss_combine, MaterialParameters};
use crate::model::ModelKind;
pub use crate::model::StiffnessTriple;
use crate::specfun::ReducedBessel;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Polar moment of inertia `π R⁴ / 2`.
pub fn polar_moment(radius: f64) -> f64 {
    0.5 * PI * radius.powi(4)
}

/// Characteristic length; `Infinite` selects the analytic `L_c → ∞` limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthScale {
    Finite(f64),
    Infinite,
}

impl From<f64> for LengthScale {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            LengthScale::Infinite
        } else {
            LengthScale::Finite(v)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionGeometry {
    pub radius: f64,
    pub twist_rate: f64,
}

impl TorsionGeometry {
    pub fn new(radius: f64) -> Self {
        Self { radius, twist_rate: 1.0 }
    }
}

/// One profile branch `g(r) = g_inf + amp · [I_1(kr)/(kr)] / [I_1(kR)/(kR)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileBranch {
    pub g_inf: f64,
    pub amp: f64,
    pub k: f64,
    pub radius: f64,
}

impl ProfileBranch {
    pub fn constant(value: f64, radius: f64) -> Self {
        Self { g_inf: value, amp: 0.0, k: 0.0, radius }
    }

    pub fn zero(radius: f64) -> Self {
        Self::constant(0.0, radius)
    }

    /// `[g, g', g'']` at `r`.
    pub fn eval(&self, r: f64) -> [f64; 3] {
        if self.amp == 0.0 || self.k == 0.0 {
            return [self.g_inf + self.amp, 0.0, 0.0];
        }
        let k = self.k;
        let y = k * r;
        let a = ReducedBessel::new(y);
        let b = ReducedBessel::new(k * self.radius);
        let s = self.amp * (y - b.x).exp() / b.j1;
        [
            self.g_inf + s * a.j1,
            s * k * k * r * a.j2,
            s * k * k * (a.j2 + y * y * a.j3),
        ]
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }
}

/// Analytic profiles of one model: sum `g_p = g1 + g2` and difference
/// `g_m = g1 − g2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub model: ModelKind,
    pub radius: f64,
    pub gp: ProfileBranch,
    pub gm: ProfileBranch,
}

impl ProfileField for ProfileSolution {
    fn at(&self, r: f64) -> ProfileValues {
        ProfileValues { gp: self.gp.eval(r), gm: self.gm.eval(r) }
    }
}

/// Sampled profiles on a uniform grid of `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub g_p: Vec<f64>,
    pub g_m: Vec<f64>,
    pub dg_p: Vec<f64>,
    pub dg_m: Vec<f64>,
    pub model: ModelKind,
}

impl RadialProfile {
    pub fn sample<F: ProfileField>(model: ModelKind, field: &F, radius: f64, n: usize) -> Self {
        let n = n.max(2);
        let mut out = RadialProfile {
            radii: Vec::with_capacity(n),
            g1: Vec::with_capacity(n),
            g2: Vec::with_capacity(n),
            g_p: Vec::with_capacity(n),
            g_m: Vec::with_capacity(n),
            dg_p: Vec::with_capacity(n),
            dg_m: Vec::with_capacity(n),
            model,
        };
        for i in 0..n {
            let r = if i + 1 == n { radius } else { radius * i as f64 / (n - 1) as f64 };
            let v = field.at(r);
            out.radii.push(r);
            out.g_p.push(v.gp[0]);
            out.g_m.push(v.gm[0]);
            out.g1.push(v.g1());
            out.g2.push(v.g2());
            out.dg_p.push(v.gp[1]);
            out.dg_m.push(v.gm[1]);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// Cubic Hermite interpolation between samples; second derivatives are those
/// of the interpolating cubic.
impl ProfileField for RadialProfile {
    fn at(&self, r: f64) -> ProfileValues {
        let n = self.radii.len();
        let i = match self.radii.partition_point(|&x| x <= r) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (r0, r1) = (self.radii[i], self.radii[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let herm = |f: &[f64], d: &[f64]| -> [f64; 3] {
            let (f0, f1, d0, d1) = (f[i], f[i + 1], d[i] * h, d[i + 1] * h);
            let t2 = t * t;
            let t3 = t2 * t;
            let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * d0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * d1;
            let dv = (6.0 * t2 - 6.0 * t) * f0
                + (3.0 * t2 - 4.0 * t + 1.0) * d0
                + (-6.0 * t2 + 6.0 * t) * f1
                + (3.0 * t2 - 2.0 * t) * d1;
            let ddv = (12.0 * t - 6.0) * f0
                + (6.0 * t - 4.0) * d0
                + (-12.0 * t + 6.0) * f1
                + (6.0 * t - 2.0) * d1;
            [v, dv / h, ddv / (h * h)]
        };
        ProfileValues {
            gp: herm(&self.g_p, &self.dg_p),
            gm: herm(&self.g_m, &self.dg_m),
        }
    }
}

/// Macroscopic shear modulus seen at `L_c = 0`.
pub fn macro_modulus(model: ModelKind, p: &MaterialParameters) -> f64 {
    if model.uses_reuss_macro() {
        p.reuss_mu_macro()
    } else {
        p.mu_macro
    }
}

/// Stiffness and profiles normalized by `I_p`.
struct Solved {
    c: f64,
    m: f64,
    w: Option<f64>,
    gp: ProfileBranch,
    gm: ProfileBranch,
}

impl Solved {
    fn plain(c: f64, m: f64, radius: f64) -> Self {
        Self {
            c,
            m,
            w: None,
            gp: ProfileBranch::zero(radius),
            gm: ProfileBranch::zero(radius),
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParameterDomain(msg.to_string()))
    }
}

fn check_geometry(radius: f64, lc: LengthScale) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::ParameterDomain(format!("radius must be positive, got {radius}")));
    }
    if let LengthScale::Finite(l) = lc {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::ParameterDomain(format!("Lc must be >= 0, got {l}")));
        }
    }
    Ok(())
}

fn meso_split(p: &MaterialParameters) -> Result<(f64, f64, f64)> {
    require(p.mu_e > 0.0, "mu_e must be positive")?;
    require(p.mu_micro > 0.0, "mu_micro must be positive")?;
    let s = p.mu_e + p.mu_micro;
    Ok((s, p.mu_micro / s, p.mu_e / s))
}

/// Relaxed micromorphic model with Curl-based curvature.
fn relaxed(p: &MaterialParameters, radius: f64, lc: LengthScale) -> Result<Solved> {
    require(p.a1 > 0.0, "relaxed micromorphic needs a1 > 0")?;
    require(p.a3 >= 0.0, "relaxed micromorphic needs a3 >= 0")?;
    require(p.mu > 0.0, "mu must be positive")?;
    require(p.mu_c >= 0.0, "mu_c must be >= 0")?;
    let (s, nu, eta) = meso_split(p)?;
    let (a1, a3, mu_e, mu_mi, mu_c) = (p.a1, p.a3, p.mu_e, p.mu_micro, p.mu_c);
    let macro_ = mu_e * nu;
    let l = match lc {
        LengthScale::Finite(l) if l == 0.0 => {
            return Ok(Solved {
                c: macro_,
                m: 0.0,
                w: None,
                gp: ProfileBranch::constant(1.0, radius),
                gm: ProfileBranch::constant(-eta, radius),
            })
        }
        LengthScale::Finite(l) => l,
        LengthScale::Infinite => {
            let (c, m, gp, gm) = if a3 > 0.0 {
                (0.0, mu_mi, 1.0, -1.0)
            } else {
                let d = s + 9.0 * mu_c;
                (
                    mu_mi * (mu_e + 3.0 * mu_c) / d,
                    6.0 * mu_c * mu_mi / d,
                    1.0 - 3.0 * mu_mi / d,
                    -eta - 27.0 * mu_c * mu_mi / (s * d),
                )
            };
            return Ok(Solved {
                c,
                m,
                w: None,
                gp: ProfileBranch::constant(gp, radius),
                gm: ProfileBranch::constant(gm, radius),
            });
        }
    };
    let f1 = (6.0 * mu_c / ((a1 + 2.0 * a3) * p.mu)).sqrt();
    let f2 = (2.0 * s / (a1 * p.mu)).sqrt();
    let (k1, k2) = (f1 / l, f2 / l);
    let (x1, x2) = (k1 * radius, k2 * radius);
    let a = ReducedBessel::new(x1);
    let b = ReducedBessel::new(x2);
    let (xx1, xx2) = (x1 * x1, x2 * x2);
    let w = 2.0 * a1 + 4.0 * a3;
    let hat_a = 8.0 * a3 * a.j1 + w * xx1 * a.j2;
    let det = 24.0 * a3 * a.j1 * b.j1
        + 2.0 * (a1 + 8.0 * a3) * a.j1 * xx2 * b.j2
        + 3.0 * w * xx1 * a.j2 * b.j1
        + 2.0 * w * xx1 * xx2 * a.j2 * b.j2;
    let c = macro_ - 12.0 * mu_e * nu * hat_a * b.j2 / det
        + 24.0 * mu_c * a1 * nu * xx2 * a.j2 * b.j2 / det;
    let m = 8.0 * mu_mi * b.j2 * (12.0 * a3 * a.j1 + w * xx1 * a.j2) / det;
    Ok(Solved {
        c,
        m,
        w: None,
        gp: ProfileBranch {
            g_inf: 1.0,
            amp: -6.0 * a1 * nu * xx2 * b.j2 * a.j1 / det,
            k: k1,
            radius,
        },
        gm: ProfileBranch {
            g_inf: -eta,
            amp: -3.0 * nu * hat_a * b.j1 / det,
            k: k2,
            radius,
        },
    })
}

/// Energy stiffness of the relaxed model with `mu_c = 0` in the form
/// `T_w / I_p` written with `v1 = (a1+2a3)/(a1+8a3)` and
/// `v2 = 24 a1 a3 mu/(a1+8a3)`.
fn relaxed_symmetric_energy(p: &MaterialParameters, radius: f64, l: f64) -> f64 {
    let (a1, a3) = (p.a1, p.a3);
    let s = p.mu_e + p.mu_micro;
    let v1 = (a1 + 2.0 * a3) / (a1 + 8.0 * a3);
    let v2 = 24.0 * a1 * a3 * p.mu / (a1 + 8.0 * a3);
    let f2 = (2.0 * s / (a1 * p.mu)).sqrt();
    let y = f2 * radius / l;
    let b = ReducedBessel::new(y);
    let yy = y * y;
    let num = yy * b.j2 * p.mu_e * s + v2 * p.mu_micro * f2 * f2 * b.j2 + 2.0 * b.j1 * p.mu_e * s * (1.0 - v1);
    let den = yy * b.j2 + 2.0 * (1.0 - v1) * b.j1;
    p.mu_micro / (s * s) * num / den
}

fn cosserat_core(
    mu_macro: f64,
    p: &MaterialParameters,
    radius: f64,
    lc: LengthScale,
) -> Result<Solved> {
    require(p.a1 > 0.0, "Cosserat needs a1 > 0")?;
    require(p.a3 >= 0.0, "Cosserat needs a3 >= 0")?;
    require(p.mu > 0.0, "mu must be positive")?;
    require(p.mu_c >= 0.0, "mu_c must be >= 0")?;
    let (a1, a3, mu_c) = (p.a1, p.a3, p.mu_c);
    let w = 2.0 * a1 + 4.0 * a3;
    let l = match lc {
        LengthScale::Finite(l) if l == 0.0 => {
            return Ok(Solved {
                gp: ProfileBranch::constant(1.0, radius),
                ..Solved::plain(mu_macro, 0.0, radius)
            })
        }
        LengthScale::Finite(l) => l,
        LengthScale::Infinite => {
            let gp = 1.0 - 3.0 * a1 / (a1 + 8.0 * a3);
            let (c, m) = if a3 > 0.0 {
                (mu_macro + 3.0 * a1 * mu_c / (a1 + 8.0 * a3), f64::INFINITY)
            } else {
                (mu_macro + 3.0 * mu_c, 6.0 * mu_c)
            };
            return Ok(Solved {
                gp: ProfileBranch::constant(gp, radius),
                ..Solved::plain(c, m, radius)
            });
        }
    };
    let ell = l / radius;
    if mu_c == 0.0 {
        // symmetric force stress: constant micro-rotation profile
        let m = 24.0 * p.mu * a1 * a3 / (a1 + 8.0 * a3) * ell * ell;
        let gp = 1.0 - 3.0 * a1 / (a1 + 8.0 * a3);
        return Ok(Solved {
            gp: ProfileBranch::constant(gp, radius),
            ..Solved::plain(mu_macro, m, radius)
        });
    }
    let f1 = (6.0 * mu_c / ((a1 + 2.0 * a3) * p.mu)).sqrt();
    let k = f1 / l;
    let x = k * radius;
    let b = ReducedBessel::new(x);
    let xx = x * x;
    let alpha = (a1 + 8.0 * a3) * b.j1 + w * xx * b.j2;
    let c = mu_macro + 12.0 * a1 * mu_c * b.j2 / alpha;
    let m = 2.0 * p.mu * a1 * (12.0 * a3 * ell * ell * b.j1 + w * f1 * f1 * b.j2) / alpha;
    Ok(Solved {
        c,
        m,
        w: None,
        gp: ProfileBranch {
            g_inf: 1.0,
            amp: -3.0 * a1 * b.j1 / alpha,
            k,
            radius,
        },
        gm: ProfileBranch::zero(radius),
    })
}

/// Micro-strain part: Reuss term plus the boundary-layer excess, curvature
/// coefficient `a` (a1, or a4 in the ad-hoc model).
fn micro_strain_core(p: &MaterialParameters, a: f64, radius: f64, lc: LengthScale) -> Result<Solved> {
    require(a > 0.0, "micro-strain curvature coefficient must be positive")?;
    require(p.mu > 0.0, "mu must be positive")?;
    let (s, nu, eta) = meso_split(p)?;
    let mu_e = p.mu_e;
    let l = match lc {
        LengthScale::Finite(l) if l == 0.0 => {
            return Ok(Solved {
                gm: ProfileBranch::constant(-eta, radius),
                ..Solved::plain(mu_e * nu, 0.0, radius)
            })
        }
        LengthScale::Finite(l) => l,
        LengthScale::Infinite => {
            return Ok(Solved {
                gm: ProfileBranch::zero(radius),
                ..Solved::plain(mu_e, 0.0, radius)
            })
        }
    };
    let f2 = (2.0 * s / (a * p.mu)).sqrt();
    let k = f2 / l;
    let x = k * radius;
    let b = ReducedBessel::new(x);
    let q = b.j1 + x * x * b.j2;
    Ok(Solved {
        c: mu_e * nu + 4.0 * mu_e * mu_e / s * b.j2 / q,
        m: 0.0,
        w: None,
        gp: ProfileBranch::zero(radius),
        gm: ProfileBranch { g_inf: -eta, amp: eta * b.j1 / q, k, radius },
    })
}

fn micromorphic_core(p: &MaterialParameters, radius: f64, lc: LengthScale) -> Result<Solved> {
    require(p.a2 >= 0.0, "a2 must be >= 0")?;
    require(p.mu_c >= 0.0, "mu_c must be >= 0")?;
    let ms = micro_strain_core(p, p.a1, radius, lc)?;
    if p.a2 == 0.0 {
        return Ok(ms);
    }
    let (c, m, gp) = match lc {
        LengthScale::Finite(l) if l == 0.0 => (0.0, 0.0, ProfileBranch::constant(1.0, radius)),
        LengthScale::Finite(l) => {
            let f1 = (2.0 * p.mu_c / (p.a2 * p.mu)).sqrt();
            let k = f1 / l;
            let x = k * radius;
            let a = ReducedBessel::new(x);
            let q = a.j1 + x * x * a.j2;
            let ell = l / radius;
            (
                4.0 * p.mu_c * a.j2 / q,
                4.0 * p.a2 * p.mu * ell * ell,
                ProfileBranch { g_inf: 1.0, amp: -a.j1 / q, k, radius },
            )
        }
        LengthScale::Infinite => (p.mu_c, f64::INFINITY, ProfileBranch::constant(0.0, radius)),
    };
    Ok(Solved { c: ms.c + c, m, w: None, gp, gm: ms.gm })
}

fn adhoc_core(p: &MaterialParameters, radius: f64, lc: LengthScale) -> Result<Solved> {
    let ms = micro_strain_core(p, p.a4, radius, lc)?;
    let cos = cosserat_core(0.0, p, radius, lc)?;
    Ok(Solved { c: ms.c + cos.c, m: cos.m, w: None, gp: cos.gp, gm: ms.gm })
}

fn ell_squared(radius: f64, lc: LengthScale) -> f64 {
    match lc {
        LengthScale::Finite(l) => (l / radius).powi(2),
        LengthScale::Infinite => f64::INFINITY,
    }
}

fn gradient_moment(coef: f64, radius: f64, lc: LengthScale) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * ell_squared(radius, lc)
    }
}

fn solve(model: ModelKind, p: &MaterialParameters, radius: f64, lc: LengthScale) -> Result<Solved> {
    check_geometry(radius, lc)?;
    let m = model.delegate();
    match m {
        ModelKind::Cauchy => {
            require(p.mu_macro > 0.0, "mu_macro must be positive")?;
            Ok(Solved::plain(p.mu_macro, 0.0, radius))
        }
        ModelKind::RelaxedMicromorphic if p.mu_c == 0.0 => {
            solve(ModelKind::RelaxedSymmetricStress, p, radius, lc)
        }
        ModelKind::RelaxedMicromorphic => relaxed(p, radius, lc),
        ModelKind::RelaxedConformal => relaxed(&MaterialParameters { a3: 0.0, ..*p }, radius, lc),
        ModelKind::RelaxedSymmetricStress => {
            let q = MaterialParameters { mu_c: 0.0, ..*p };
            require(p.a1 + 8.0 * p.a3 > 0.0, "a1 + 8 a3 must be positive")?;
            let mut out = relaxed(&q, radius, lc)?;
            if let LengthScale::Finite(l) = lc {
                if l > 0.0 {
                    out.w = Some(relaxed_symmetric_energy(&q, radius, l));
                }
            }
            Ok(out)
        }
        ModelKind::Cosserat => {
            require(p.mu_macro > 0.0, "mu_macro must be positive")?;
            cosserat_core(p.mu_macro, p, radius, lc)
        }
        ModelKind::CosseratConformal => {
            require(p.mu_macro > 0.0, "mu_macro must be positive")?;
            cosserat_core(p.mu_macro, &MaterialParameters { a3: 0.0, ..*p }, radius, lc)
        }
        ModelKind::IndeterminateCoupleStress => {
            require(p.mu_macro > 0.0, "mu_macro must be positive")?;
            require(p.a1 >= 0.0 && p.mu >= 0.0, "a1 and mu must be >= 0")?;
            Ok(Solved::plain(
                p.mu_macro,
                gradient_moment(3.0 * p.a1 * p.mu, radius, lc),
                radius,
            ))
        }
        ModelKind::Micromorphic => micromorphic_core(p, radius, lc),
        ModelKind::MicromorphicReducedCurvature => {
            micromorphic_core(&MaterialParameters { a2: 0.0, ..*p }, radius, lc)
        }
        ModelKind::MicroStrain => micro_strain_core(p, p.a1, radius, lc),
        ModelKind::SecondGradient | ModelKind::StrainGradient => {
            require(p.mu_macro > 0.0, "mu_macro must be positive")?;
            let a2 = if m == ModelKind::StrainGradient { 0.0 } else { p.a2 };
            require(p.a1 >= 0.0 && a2 >= 0.0 && p.mu >= 0.0, "a1, a2, mu must be >= 0")?;
            Ok(Solved::plain(
                p.mu_macro,
                gradient_moment(2.0 * p.mu * (p.a1 + 3.0 * a2), radius, lc),
                radius,
            ))
        }
        ModelKind::AdHoc => adhoc_core(p, radius, lc),
        ModelKind::MicroStretch
        | ModelKind::MicroVoid
        | ModelKind::ModifiedCoupleStress
        | ModelKind::PseudoConsistentCoupleStress => unreachable!("delegated"),
    }
}

/// Stiffness triple of `model` at an explicit characteristic length.
pub fn stiffness_at(
    model: ModelKind,
    params: &MaterialParameters,
    radius: f64,
    lc: LengthScale,
) -> Result<StiffnessTriple> {
    let s = solve(model, params, radius, lc)?;
    Ok(StiffnessTriple::scaled(model, polar_moment(radius), s.c, s.m, s.w))
}

/// Stiffness triple of `model` at `params.lc`.
pub fn stiffness(model: ModelKind, params: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness_at(model, params, radius, params.lc.into())
}

pub fn cauchy_stiffness(mu_macro: f64, radius: f64) -> Result<StiffnessTriple> {
    let p = MaterialParameters { mu_macro, ..Default::default() };
    stiffness_at(ModelKind::Cauchy, &p, radius, LengthScale::Finite(0.0))
}

pub fn relaxed_micromorphic_stiffness(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::RelaxedMicromorphic, p, radius)
}

pub fn relaxed_micromorphic_mu_c_zero(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::RelaxedSymmetricStress, p, radius)
}

/// `lim_{L_c→∞} T_w` of the relaxed model with conformal curvature.
pub fn relaxed_conformal_limit(p: &MaterialParameters, radius: f64) -> Result<f64> {
    require(p.mu_micro > 0.0, "mu_micro must be positive")?;
    let ip = polar_moment(radius);
    let outer = 9.0 * p.mu_c + p.mu_e;
    if p.mu_micro.is_infinite() {
        return Ok(outer * ip);
    }
    if p.mu_c.is_infinite() {
        return Ok(p.mu_micro * ip);
    }
    Ok(reuss_combine(p.mu_micro, outer) * ip)
}

pub fn cosserat_stiffness(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::Cosserat, p, radius)
}

/// `(9 mu_c + mu_macro) I_p`.
pub fn cosserat_conformal_limit(p: &MaterialParameters, radius: f64) -> Result<f64> {
    require(p.mu_c >= 0.0, "mu_c must be >= 0")?;
    Ok((9.0 * p.mu_c + p.mu_macro) * polar_moment(radius))
}

pub fn couple_stress_stiffness(mu_macro: f64, mu: f64, a1: f64, lc: f64, radius: f64) -> Result<StiffnessTriple> {
    let p = MaterialParameters { mu_macro, mu, a1, lc, ..Default::default() };
    stiffness(ModelKind::IndeterminateCoupleStress, &p, radius)
}

pub fn micromorphic_stiffness(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::Micromorphic, p, radius)
}

pub fn micro_strain_stiffness(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::MicroStrain, p, radius)
}

pub fn second_gradient_stiffness(
    mu_macro: f64,
    mu: f64,
    a1: f64,
    a2: f64,
    lc: f64,
    radius: f64,
) -> Result<StiffnessTriple> {
    let p = MaterialParameters { mu_macro, mu, a1, a2, lc, ..Default::default() };
    stiffness(ModelKind::SecondGradient, &p, radius)
}

pub fn adhoc_stiffness(p: &MaterialParameters, radius: f64) -> Result<StiffnessTriple> {
    stiffness(ModelKind::AdHoc, p, radius)
}

/// Closed-form profiles of `model` at `lc`.
pub fn profile_solution(
    model: ModelKind,
    params: &MaterialParameters,
    radius: f64,
    lc: LengthScale,
) -> Result<ProfileSolution> {
    if !model.has_profiles() {
        return Err(Error::UnsupportedModel(model.to_string()));
    }
    let s = solve(model, params, radius, lc)?;
    Ok(ProfileSolution { model, radius, gp: s.gp, gm: s.gm })
}

/// Profiles sampled at `n_samples` uniform radii of `[0, R]`.
pub fn radial_profiles(
    model: ModelKind,
    params: &MaterialParameters,
    radius: f64,
    n_samples: usize,
) -> Result<RadialProfile> {
    let sol = profile_solution(model, params, radius, params.lc.into())?;
    Ok(RadialProfile::sample(model, &sol, radius, n_samples))
}

/// One triple per `L_c` grid value.
pub fn stiffness_curve(
    model: ModelKind,
    params: &MaterialParameters,
    radius: f64,
    lc_grid: &[f64],
) -> Result<Vec<StiffnessTriple>> {
    if lc_grid.is_empty() {
        return Err(Error::Invalid("empty Lc grid".into()));
    }
    if lc_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Invalid("Lc grid must be sorted ascending".into()));
    }
    lc_grid
        .iter()
        .enumerate()
        .map(|(index, &lc)| {
            stiffness_at(model, params, radius, lc.into())
                .map_err(|e| Error::GridPoint { index, source: Box::new(e) })
        })
        .collect()
}

/// Whether `T_w` stays finite as `L_c → ∞`.
pub fn is_bounded(model: ModelKind, params: &MaterialParameters) -> Result<bool> {
    Ok(stiffness_at(model, params, 1.0, LengthScale::Infinite)?.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn rm() -> MaterialParameters {
        MaterialParameters {
            mu: 1.0,
            mu_e: 0.1,
            mu_micro: 0.25,
            mu_c: 0.5,
            a1: 0.2,
            a2: 1.0 / 6.0,
            a3: 1.0 / 7.0,
            ..Default::default()
        }
    }

    #[test]
    fn cauchy_examples() {
        let t = cauchy_stiffness(1.0, 1.0).unwrap();
        assert_eq!((t.t_c, t.t_m, t.t_w), (PI / 2.0, 0.0, PI / 2.0));
        assert_eq!(cauchy_stiffness(2.0, 1.0).unwrap().t_w, PI);
        assert_eq!(cauchy_stiffness(1.0, 2.0).unwrap().t_w, 8.0 * PI);
    }

    #[test]
    fn relaxed_endpoints() {
        let p = rm();
        let t0 = stiffness_at(ModelKind::RelaxedMicromorphic, &p, 1.0, 0.0.into()).unwrap();
        assert!(rel(t0.t_w, PI / 28.0) < 1e-15);
        let big = stiffness_at(ModelKind::RelaxedMicromorphic, &p, 1.0, 1e6.into()).unwrap();
        assert!(rel(big.t_w, PI / 8.0) < 1e-6);
        let inf = stiffness_at(ModelKind::RelaxedMicromorphic, &p, 1.0, LengthScale::Infinite).unwrap();
        assert!(rel(inf.t_w, PI / 8.0) < 1e-15);
    }

    #[test]
    fn symmetric_stress_energy_matches_torque_sum() {
        let p = MaterialParameters {
            mu: 1.0,
            mu_e: 1.0 / 3.0,
            mu_micro: 0.25,
            a1: 10.0,
            a3: 0.02,
            mu_c: 0.0,
            ..Default::default()
        };
        for lc in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let t = stiffness_at(ModelKind::RelaxedSymmetricStress, &p, 1.0, lc.into()).unwrap();
            assert!(rel(t.t_c + t.t_m, t.t_w) < 1e-12, "lc {lc}");
        }
    }

    #[test]
    fn micromorphic_moment_is_exact() {
        let p = MaterialParameters {
            mu: 1.0,
            mu_e: 1.0 / 3.0,
            mu_micro: 0.25,
            mu_c: 0.2,
            a1: 0.2,
            a2: 1.0 / 6.0,
            lc: 1.0,
            ..Default::default()
        };
        let t = micromorphic_stiffness(&p, 1.0).unwrap();
        assert!(rel(t.t_m, PI / 3.0) < 1e-15);
    }

    #[test]
    fn couple_stress_example() {
        let t = couple_stress_stiffness(1.0 / 3.0, 1.0, 0.2, 1.0, 1.0).unwrap();
        assert!(rel(t.t_m, 0.6 * PI / 2.0) < 1e-15);
    }

    #[test]
    fn curve_rejects_unsorted() {
        let p = rm();
        assert!(stiffness_curve(ModelKind::RelaxedMicromorphic, &p, 1.0, &[1.0, 0.5]).is_err());
        assert!(stiffness_curve(ModelKind::RelaxedMicromorphic, &p, 1.0, &[]).is_err());
        let e = stiffness_curve(ModelKind::RelaxedMicromorphic, &p, 1.0, &[0.0, f64::NAN]);
        assert!(e.is_err());
    }

    #[test]
    fn profile_at_origin_is_finite() {
        let p = rm().with_lc(0.7);
        let prof = radial_profiles(ModelKind::RelaxedMicromorphic, &p, 1.0, 11).unwrap();
        assert_eq!(prof.radii[0], 0.0);
        assert!(prof.g_p.iter().chain(&prof.g_m).all(|v| v.is_finite()));
        assert!(radial_profiles(ModelKind::Cauchy, &p, 1.0, 5).is_err());
    }
}
