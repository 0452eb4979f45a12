//! Three-dimensional fields of the torsion ansatz.
//!
//! Displacement `u = ϑ(−x₂z, x₁z, 0)` and micro-distortion
//!
//! ```text
//!         ⎡ 0      −z      −g₂ x₂ ⎤
//! P = ϑ · ⎢ z       0       g₂ x₁ ⎥
//!         ⎣ g₁ x₂  −g₁ x₁   0     ⎦
//! ```
//!
//! with `g₁, g₂` functions of `r`. Cosserat models use the skew part
//! (`g₁ = g₂ = g_p/2`), micro-strain models the symmetric part without the
//! `z` entries (`g₁ = −g₂ = g_m/2`).
//!
//! Third-order hyperstresses are stored as `[Mat3; 3]` with `h[i][(j, k)]`
//! the coefficient of `∂P_jk/∂x_i`. The cross product of a tensor with a
//! vector acts row-wise: row `i` of `m × b` is `b × (row i of m)`.

use crate::error::{Error, Result};
use crate::materials::MaterialParameters;
use crate::model::ModelKind;
use nalgebra::{Matrix3, Vector3};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Hyper = [Mat3; 3];

/// `[g, g', g'']` of the sum and difference profiles at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileValues {
    pub gp: [f64; 3],
    pub gm: [f64; 3],
}

impl ProfileValues {
    pub fn constant(gp: f64, gm: f64) -> Self {
        Self { gp: [gp, 0.0, 0.0], gm: [gm, 0.0, 0.0] }
    }

    pub fn g1(&self) -> f64 {
        0.5 * (self.gp[0] + self.gm[0])
    }

    pub fn g2(&self) -> f64 {
        0.5 * (self.gp[0] - self.gm[0])
    }

    pub fn dg1(&self) -> f64 {
        0.5 * (self.gp[1] + self.gm[1])
    }

    pub fn dg2(&self) -> f64 {
        0.5 * (self.gp[1] - self.gm[1])
    }

    /// Only the sum part, as seen by the skew micro-rotation.
    pub fn skew_part(&self) -> Self {
        Self { gp: self.gp, gm: [0.0; 3] }
    }

    /// Only the difference part, as seen by the symmetric micro-strain.
    pub fn sym_part(&self) -> Self {
        Self { gp: [0.0; 3], gm: self.gm }
    }
}

/// Anything that yields profile values at a radius.
pub trait ProfileField {
    fn at(&self, r: f64) -> ProfileValues;
}

impl ProfileField for ProfileValues {
    fn at(&self, _r: f64) -> ProfileValues {
        *self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Cartesian { x1: f64, x2: f64, x3: f64 },
    Cylindrical { r: f64, phi: f64, z: f64 },
}

impl Point {
    pub fn cartesian(&self) -> [f64; 3] {
        match *self {
            Point::Cartesian { x1, x2, x3 } => [x1, x2, x3],
            Point::Cylindrical { r, phi, z } => [r * phi.cos(), r * phi.sin(), z],
        }
    }

    /// `(r, φ, z)` with `φ ∈ (−π, π]`.
    pub fn cylindrical(&self) -> [f64; 3] {
        match *self {
            Point::Cartesian { x1, x2, x3 } => [x1.hypot(x2), x2.atan2(x1), x3],
            Point::Cylindrical { r, phi, z } => [r, phi, z],
        }
    }

    pub fn radius(&self) -> f64 {
        self.cylindrical()[0]
    }
}

pub fn e_r(phi: f64) -> Vec3 {
    Vec3::new(phi.cos(), phi.sin(), 0.0)
}

pub fn e_phi(phi: f64) -> Vec3 {
    Vec3::new(-phi.sin(), phi.cos(), 0.0)
}

pub fn e_z() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

pub fn sym(a: &Mat3) -> Mat3 {
    0.5 * (a + a.transpose())
}

pub fn skew(a: &Mat3) -> Mat3 {
    0.5 * (a - a.transpose())
}

pub fn dev(a: &Mat3) -> Mat3 {
    a - Mat3::identity() * (a.trace() / 3.0)
}

/// Axial vector of a skew matrix: `A b = axl(A) × b`.
pub fn axl(a: &Mat3) -> Vec3 {
    Vec3::new(-a[(1, 2)], a[(0, 2)], -a[(0, 1)])
}

/// Skew matrix of a vector, inverse of [`axl`].
pub fn anti(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

/// Row-wise `m × b`.
pub fn cross_rows(m: &Mat3, b: &Vec3) -> Mat3 {
    let mut out = Mat3::zeros();
    for i in 0..3 {
        let row = Vec3::new(m[(i, 0)], m[(i, 1)], m[(i, 2)]);
        let c = b.cross(&row);
        for j in 0..3 {
            out[(i, j)] = c[j];
        }
    }
    out
}

/// Contraction `Σ_i h[i] b_i`.
pub fn hyper_dot(h: &Hyper, b: &Vec3) -> Mat3 {
    h[0] * b[0] + h[1] * b[1] + h[2] * b[2]
}

pub fn displacement(point: &Point, twist: f64) -> Vec3 {
    let [x1, x2, x3] = point.cartesian();
    Vec3::new(-x2 * x3, x1 * x3, 0.0) * twist
}

pub fn displacement_gradient(point: &Point, twist: f64) -> Mat3 {
    let [x1, x2, z] = point.cartesian();
    Mat3::new(0.0, -z, -x2, z, 0.0, x1, 0.0, 0.0, 0.0) * twist
}

fn ansatz(g1: f64, g2: f64, x1: f64, x2: f64, z: f64, with_z: bool) -> Mat3 {
    let zz = if with_z { z } else { 0.0 };
    Mat3::new(0.0, -zz, -g2 * x2, zz, 0.0, g2 * x1, g1 * x2, -g1 * x1, 0.0)
}

/// Gradient `∂_k P` of the ansatz with profile `(g₁, g₂)`.
fn ansatz_gradient(v: &ProfileValues, x1: f64, x2: f64, with_z: bool) -> Hyper {
    let r = x1.hypot(x2);
    let (g1, g2, d1, d2) = (v.g1(), v.g2(), v.dg1(), v.dg2());
    // radial direction cosines; the r-derivative terms vanish on the axis
    let (n1, n2) = if r > 0.0 { (x1 / r, x2 / r) } else { (0.0, 0.0) };
    let mut out = [Mat3::zeros(); 3];
    for (k, nk) in [(0usize, n1), (1usize, n2)] {
        let dx1 = if k == 0 { 1.0 } else { 0.0 };
        let dx2 = if k == 1 { 1.0 } else { 0.0 };
        let m = &mut out[k];
        m[(0, 2)] = -(d2 * nk * x2 + g2 * dx2);
        m[(1, 2)] = d2 * nk * x1 + g2 * dx1;
        m[(2, 0)] = d1 * nk * x2 + g1 * dx2;
        m[(2, 1)] = -(d1 * nk * x1 + g1 * dx1);
    }
    if with_z {
        out[2][(0, 1)] = -1.0;
        out[2][(1, 0)] = 1.0;
    }
    out
}

/// Row-wise curl `(Curl P)_ij = ε_jkl ∂_k P_il` from a gradient.
pub fn curl_from_gradient(d: &Hyper) -> Mat3 {
    let mut c = Mat3::zeros();
    for i in 0..3 {
        c[(i, 0)] = d[1][(i, 2)] - d[2][(i, 1)];
        c[(i, 1)] = d[2][(i, 0)] - d[0][(i, 2)];
        c[(i, 2)] = d[0][(i, 1)] - d[1][(i, 0)];
    }
    c
}

/// Which part of the ansatz a model carries as its micro-distortion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Micro {
    None,
    Full,
    Skew,
    Sym,
    SkewOfDu,
}

fn micro_kind(model: ModelKind) -> Micro {
    match model.delegate() {
        ModelKind::Cauchy | ModelKind::SecondGradient | ModelKind::StrainGradient => Micro::None,
        ModelKind::Cosserat | ModelKind::CosseratConformal => Micro::Skew,
        ModelKind::IndeterminateCoupleStress => Micro::SkewOfDu,
        ModelKind::MicroStrain | ModelKind::MicromorphicReducedCurvature => Micro::Sym,
        _ => Micro::Full,
    }
}

fn values_for(kind: Micro, v: ProfileValues) -> ProfileValues {
    match kind {
        Micro::Skew => v.skew_part(),
        Micro::Sym => v.sym_part(),
        Micro::SkewOfDu => ProfileValues::constant(1.0, 0.0),
        _ => v,
    }
}

/// Micro-distortion `P` (or `A`, `S`) of `model` at `point`.
pub fn micro_distortion<F: ProfileField>(
    point: &Point,
    twist: f64,
    field: &F,
    model: ModelKind,
) -> Result<Mat3> {
    let kind = micro_kind(model);
    if kind == Micro::None {
        return Err(Error::UnsupportedModel(model.to_string()));
    }
    let [x1, x2, z] = point.cartesian();
    let v = values_for(kind, field.at(point.radius()));
    Ok(ansatz(v.g1(), v.g2(), x1, x2, z, kind != Micro::Sym) * twist)
}

/// `Curl P` in the closed matrix form of the ansatz.
pub fn curl_p(point: &Point, twist: f64, v: &ProfileValues, with_z: bool) -> Mat3 {
    let [r, phi, _] = point.cylindrical();
    let (s, c) = phi.sin_cos();
    let (g1, g2, d1, d2) = (v.g1(), v.g2(), v.dg1(), v.dg2());
    let one = if with_z { 1.0 } else { 0.0 };
    Mat3::new(
        one - g2 - r * d2 * s * s,
        r * d2 * s * c,
        0.0,
        r * d2 * s * c,
        one - g2 - r * d2 * c * c,
        0.0,
        0.0,
        0.0,
        -(2.0 * g1 + r * d1),
    ) * twist
}

/// First and second order chain-rule tensors between Cartesian and
/// cylindrical derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalJacobian {
    /// `Q1[(α, j)] = ∂r_α/∂x_j`.
    pub q1: Mat3,
    /// `q2[α][β][(j, k)]`, symmetrized over `(α, β)`.
    pub q2: Option<[[Mat3; 3]; 3]>,
    /// `q3[α][j][k] = ∂²r_α/∂x_j∂x_k`.
    pub q3: Option<[[Vec3; 3]; 3]>,
}

pub fn cylindrical_jacobian(order: u32, r: f64, phi: f64) -> Result<CylindricalJacobian> {
    if !(r > 0.0) {
        return Err(Error::Domain("cylindrical chain rule is singular at r = 0".into()));
    }
    if order == 0 || order > 2 {
        return Err(Error::Domain(format!("chain-rule order must be 1 or 2, got {order}")));
    }
    let (s, c) = phi.sin_cos();
    let q1 = Mat3::new(c, s, 0.0, -s / r, c / r, 0.0, 0.0, 0.0, 1.0);
    if order == 1 {
        return Ok(CylindricalJacobian { q1, q2: None, q3: None });
    }
    let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
    let rr = Mat3::new(c * c, s * c, 0.0, s * c, s * s, 0.0, 0.0, 0.0, 0.0);
    let rp = Mat3::new(-s * c / r, c2 / (2.0 * r), 0.0, c2 / (2.0 * r), s * c / r, 0.0, 0.0, 0.0, 0.0);
    let rz = Mat3::new(0.0, 0.0, c / 2.0, 0.0, 0.0, s / 2.0, c / 2.0, s / 2.0, 0.0);
    let pp = Mat3::new(
        s * s / (r * r),
        -s * c / (r * r),
        0.0,
        -s * c / (r * r),
        c * c / (r * r),
        0.0,
        0.0,
        0.0,
        0.0,
    );
    let pz = Mat3::new(0.0, 0.0, -s / (2.0 * r), 0.0, 0.0, c / (2.0 * r), -s / (2.0 * r), c / (2.0 * r), 0.0);
    let zz = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let q2 = [[rr, rp, rz], [rp, pp, pz], [rz, pz, zz]];
    let zero = Vec3::zeros();
    let q3 = [
        [
            Vec3::new(s * s / r, -s * c / r, 0.0),
            Vec3::new(-s * c / r, c * c / r, 0.0),
            zero,
        ],
        [
            Vec3::new(s2 / (r * r), -c2 / (r * r), 0.0),
            Vec3::new(-c2 / (r * r), -s2 / (r * r), 0.0),
            zero,
        ],
        [zero, zero, zero],
    ];
    Ok(CylindricalJacobian { q1, q2: Some(q2), q3: Some(q3) })
}

/// Moment stress of a model: second order for `Curl`-based curvature, third
/// order for gradient-based curvature.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentTensor {
    None,
    Second(Mat3),
    Third(Hyper),
    Mixed(Mat3, Hyper),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Vec3,
    pub du: Mat3,
    pub p: Option<Mat3>,
    pub curl_p: Option<Mat3>,
    pub sigma_tilde: Mat3,
    pub moment: MomentTensor,
}

impl FieldState {
    /// Flat `(name, value)` list for dumps.
    pub fn components(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for i in 0..3 {
            out.push((format!("u{}", i + 1), self.u[i]));
        }
        let mut push = |name: &str, m: &Mat3| {
            for i in 0..3 {
                for j in 0..3 {
                    out.push((format!("{name}{}{}", i + 1, j + 1), m[(i, j)]));
                }
            }
        };
        push("Du", &self.du);
        if let Some(p) = &self.p {
            push("P", p);
        }
        if let Some(c) = &self.curl_p {
            push("CurlP", c);
        }
        push("sigma", &self.sigma_tilde);
        let hyper = |out: &mut Vec<(String, f64)>, h: &Hyper| {
            for (i, m) in h.iter().enumerate() {
                for j in 0..3 {
                    for k in 0..3 {
                        out.push((format!("mm{}{}{}", i + 1, j + 1, k + 1), m[(j, k)]));
                    }
                }
            }
        };
        match &self.moment {
            MomentTensor::None => {}
            MomentTensor::Second(m) => push("m", m),
            MomentTensor::Third(h) => hyper(&mut out, h),
            MomentTensor::Mixed(m, h) => {
                push("m", m);
                hyper(&mut out, h);
            }
        }
        out
    }
}

fn require_modulus(v: f64, name: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be finite")))
    }
}

/// Everything at one point: kinematics, force stress and moment stress.
pub fn field_state<F: ProfileField>(
    model: ModelKind,
    params: &MaterialParameters,
    point: &Point,
    twist: f64,
    field: &F,
) -> Result<FieldState> {
    let p = params;
    let kind = micro_kind(model);
    let [x1, x2, z] = point.cartesian();
    let r = x1.hypot(x2);
    let du = displacement_gradient(point, twist);
    let u = displacement(point, twist);
    let id = Mat3::identity();
    let ml2 = p.mu * p.lc * p.lc;
    let curl_moment = |c: &Mat3, a1: f64, a2: f64, a3: f64| -> Mat3 {
        (dev(&sym(c)) * a1 + skew(c) * a2 + id * (a3 / 3.0 * c.trace())) * ml2
    };
    let all = field.at(r);
    let state = match model.delegate() {
        ModelKind::Cauchy | ModelKind::SecondGradient | ModelKind::StrainGradient => {
            require_modulus(p.mu_macro, "mu_macro")?;
            let sigma = sym(&du) * (2.0 * p.mu_macro) + id * (p.lambda_macro * du.trace());
            let moment = if model.delegate() == ModelKind::Cauchy {
                MomentTensor::None
            } else {
                // second gradient: hyperstress of D Du with dev sym / skew split
                let a2 = if model.delegate() == ModelKind::StrainGradient { 0.0 } else { p.a2 };
                let g = ansatz_gradient(&ProfileValues::constant(1.0, 0.0), x1, x2, true);
                let d_du = g.map(|m| m * twist);
                MomentTensor::Third(d_du.map(|m| (dev(&sym(&m)) * p.a1 + skew(&m) * a2) * ml2))
            };
            FieldState { u, du, p: None, curl_p: None, sigma_tilde: sigma, moment }
        }
        ModelKind::RelaxedMicromorphic | ModelKind::RelaxedConformal | ModelKind::RelaxedSymmetricStress => {
            let (mu_c, a3) = match model.delegate() {
                ModelKind::RelaxedConformal => (p.mu_c, 0.0),
                ModelKind::RelaxedSymmetricStress => (0.0, p.a3),
                _ => (p.mu_c, p.a3),
            };
            let pm = ansatz(all.g1(), all.g2(), x1, x2, z, true) * twist;
            let e = du - pm;
            let sigma = sym(&e) * (2.0 * p.mu_e) + id * (p.lambda_e * e.trace()) + skew(&e) * (2.0 * mu_c);
            let c = curl_p(point, twist, &all, true);
            let m = curl_moment(&c, p.a1, p.a2, a3);
            FieldState { u, du, p: Some(pm), curl_p: Some(c), sigma_tilde: sigma, moment: MomentTensor::Second(m) }
        }
        ModelKind::Cosserat | ModelKind::CosseratConformal | ModelKind::IndeterminateCoupleStress => {
            let v = values_for(kind, all);
            let a3 = match model.delegate() {
                ModelKind::Cosserat => p.a3,
                _ => 0.0,
            };
            let am = ansatz(v.g1(), v.g2(), x1, x2, z, true) * twist;
            let mut sigma = sym(&du) * (2.0 * p.mu_macro) + id * (p.lambda_macro * du.trace());
            if kind == Micro::Skew {
                sigma += skew(&(du - am)) * (2.0 * p.mu_c);
            }
            let c = curl_p(point, twist, &v, true);
            let m = curl_moment(&c, p.a1, 0.0, a3);
            FieldState { u, du, p: Some(am), curl_p: Some(c), sigma_tilde: sigma, moment: MomentTensor::Second(m) }
        }
        ModelKind::Micromorphic | ModelKind::MicromorphicReducedCurvature | ModelKind::MicroStrain => {
            let reduced = model.delegate() != ModelKind::Micromorphic || p.a2 == 0.0;
            let v = if reduced { all.sym_part() } else { all };
            let with_z = !reduced;
            let pm = ansatz(v.g1(), v.g2(), x1, x2, z, with_z) * twist;
            let e = du - pm;
            let mu_c = if reduced { 0.0 } else { p.mu_c };
            let sigma = if reduced {
                dev(&(sym(&du) - pm)) * (2.0 * p.mu_e) + id * (p.kappa_e() * e.trace())
            } else {
                dev(&sym(&e)) * (2.0 * p.mu_e) + id * (p.kappa_e() * e.trace()) + skew(&e) * (2.0 * mu_c)
            };
            let a2 = if reduced { 0.0 } else { p.a2 };
            let d = ansatz_gradient(&v, x1, x2, with_z).map(|m| m * twist);
            let h = d.map(|m| (dev(&sym(&m)) * p.a1 + skew(&m) * a2 + id * (2.0 * p.a3 / 3.0 * m.trace())) * ml2);
            FieldState { u, du, p: Some(pm), curl_p: None, sigma_tilde: sigma, moment: MomentTensor::Third(h) }
        }
        ModelKind::AdHoc => {
            let va = all.skew_part();
            let vs = all.sym_part();
            let am = ansatz(va.g1(), va.g2(), x1, x2, z, true) * twist;
            let sm = ansatz(vs.g1(), vs.g2(), x1, x2, z, false) * twist;
            let es = du - sm;
            let sigma = (sym(&du) - sm) * (2.0 * p.mu_e)
                + id * (p.lambda_e * es.trace())
                + skew(&(du - am)) * (2.0 * p.mu_c);
            let c = curl_p(point, twist, &va, true);
            let m = curl_moment(&c, p.a1, 0.0, p.a3);
            let d = ansatz_gradient(&vs, x1, x2, false).map(|m| m * twist);
            let h = d.map(|m| dev(&m) * (p.a4 * ml2));
            FieldState {
                u,
                du,
                p: Some(am + sm),
                curl_p: Some(c),
                sigma_tilde: sigma,
                moment: MomentTensor::Mixed(m, h),
            }
        }
        _ => unreachable!("delegated"),
    };
    Ok(state)
}

/// Force stress and moment stress of `model` at `point`.
pub fn stress_and_moment<F: ProfileField>(
    model: ModelKind,
    params: &MaterialParameters,
    point: &Point,
    twist: f64,
    field: &F,
) -> Result<(Mat3, MomentTensor)> {
    let s = field_state(model, params, point, twist, field)?;
    Ok((s.sigma_tilde, s.moment))
}

/// Scaled residuals of the lateral-surface conditions at `r = R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    pub traction: f64,
    /// `None` where the model carries no independent moment condition.
    pub moment: Option<f64>,
}

pub fn boundary_residual<F: ProfileField>(
    model: ModelKind,
    params: &MaterialParameters,
    radius: f64,
    phi: f64,
    field: &F,
) -> Result<BoundaryResidual> {
    let point = Point::Cylindrical { r: radius, phi, z: 0.3 * radius };
    let s = field_state(model, params, &point, 1.0, field)?;
    let n = e_r(phi);
    let stiff = [params.mu_macro, params.mu_e, params.mu_c, params.mu_micro, params.lambda_e.abs(), params.lambda_macro.abs()]
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let traction = (s.sigma_tilde * n).norm() / (stiff * radius);
    let ml2 = params.mu * params.lc * params.lc;
    let coef = [params.a1, params.a2, params.a3, params.a4].into_iter().fold(0.0f64, f64::max);
    let scale = ml2 * coef;
    let moment = match (&s.moment, model.delegate()) {
        (MomentTensor::Second(m), ModelKind::Cosserat | ModelKind::CosseratConformal) => {
            Some(skew(&cross_rows(m, &n)).norm())
        }
        (MomentTensor::Second(m), ModelKind::RelaxedMicromorphic | ModelKind::RelaxedConformal | ModelKind::RelaxedSymmetricStress) => {
            Some(cross_rows(m, &n).norm())
        }
        (MomentTensor::Third(h), ModelKind::Micromorphic) if params.a2 > 0.0 => Some(hyper_dot(h, &n).norm()),
        (MomentTensor::Third(h), ModelKind::Micromorphic | ModelKind::MicroStrain | ModelKind::MicromorphicReducedCurvature) => {
            Some(sym(&hyper_dot(h, &n)).norm())
        }
        (MomentTensor::Mixed(m, h), ModelKind::AdHoc) => {
            Some(skew(&cross_rows(m, &n)).norm() + sym(&hyper_dot(h, &n)).norm())
        }
        _ => None,
    };
    Ok(BoundaryResidual {
        traction,
        moment: moment.map(|v| if scale > 0.0 { v / scale } else { v }),
    })
}

/// Scaled residuals of the reduced radial equations for `g_p` and `g_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeResidual {
    pub gp: f64,
    pub gm: f64,
}

fn bessel_residual(c2: f64, c0: f64, rhs: f64, r: f64, g: [f64; 3]) -> f64 {
    // c2 (r g'' + 3 g') − c0 r g − rhs r
    let terms = [c2 * r * g[2], 3.0 * c2 * g[1], c0 * r * g[0], rhs * r];
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    (terms[0] + terms[1] - terms[2] - terms[3]) / scale
}

pub fn equilibrium_residual<F: ProfileField>(
    model: ModelKind,
    params: &MaterialParameters,
    r: f64,
    field: &F,
) -> Result<OdeResidual> {
    if !(r > 0.0) {
        return Err(Error::Domain("reduced equations are evaluated for r > 0".into()));
    }
    let p = params;
    let ml2 = p.mu * p.lc * p.lc;
    let v = field.at(r);
    let s = p.mu_e + p.mu_micro;
    let strain = |a: f64| bessel_residual(a * ml2, 2.0 * s, 2.0 * p.mu_e, r, v.gm);
    let rot = |c2: f64, mu_c: f64| bessel_residual(c2 * ml2, 2.0 * mu_c, -2.0 * mu_c, r, v.gp);
    let out = match model.delegate() {
        ModelKind::RelaxedMicromorphic => OdeResidual { gp: rot((p.a1 + 2.0 * p.a3) / 3.0, p.mu_c), gm: strain(p.a1) },
        ModelKind::RelaxedConformal => OdeResidual { gp: rot(p.a1 / 3.0, p.mu_c), gm: strain(p.a1) },
        ModelKind::RelaxedSymmetricStress => OdeResidual { gp: rot((p.a1 + 2.0 * p.a3) / 3.0, 0.0), gm: strain(p.a1) },
        ModelKind::Cosserat => OdeResidual { gp: rot((p.a1 + 2.0 * p.a3) / 3.0, p.mu_c), gm: 0.0 },
        ModelKind::CosseratConformal => OdeResidual { gp: rot(p.a1 / 3.0, p.mu_c), gm: 0.0 },
        ModelKind::Micromorphic if p.a2 > 0.0 => OdeResidual { gp: rot(p.a2, p.mu_c), gm: strain(p.a1) },
        ModelKind::Micromorphic | ModelKind::MicromorphicReducedCurvature | ModelKind::MicroStrain => {
            OdeResidual { gp: 0.0, gm: strain(p.a1) }
        }
        ModelKind::AdHoc => OdeResidual { gp: rot((p.a1 + 2.0 * p.a3) / 3.0, p.mu_c), gm: strain(p.a4) },
        _ => OdeResidual { gp: 0.0, gm: 0.0 },
    };
    Ok(out)
}

/// Full balance residuals at a point, derivatives of the stresses by central
/// differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceResidual {
    /// `Div σ̃`.
    pub force: Vec3,
    /// Micro balance; zero matrix for models without micro-distortion.
    pub micro: Mat3,
}

pub fn balance_residual<F: ProfileField>(
    model: ModelKind,
    params: &MaterialParameters,
    point: &Point,
    twist: f64,
    field: &F,
    h: f64,
) -> Result<BalanceResidual> {
    let x = point.cartesian();
    let at = |k: usize, d: f64| -> Result<FieldState> {
        let mut y = x;
        y[k] += d;
        field_state(model, params, &Point::Cartesian { x1: y[0], x2: y[1], x3: y[2] }, twist, field)
    };
    let mut div_sigma = Vec3::zeros();
    let mut dm = [Mat3::zeros(); 3];
    let mut div_h = Mat3::zeros();
    for k in 0..3 {
        let (a, b) = (at(k, h)?, at(k, -h)?);
        let ds = (a.sigma_tilde - b.sigma_tilde) / (2.0 * h);
        for i in 0..3 {
            div_sigma[i] += ds[(i, k)];
        }
        match (&a.moment, &b.moment) {
            (MomentTensor::Second(ma), MomentTensor::Second(mb)) => dm[k] = (ma - mb) / (2.0 * h),
            (MomentTensor::Third(ha), MomentTensor::Third(hb)) => div_h += (ha[k] - hb[k]) / (2.0 * h),
            (MomentTensor::Mixed(ma, ha), MomentTensor::Mixed(mb, hb)) => {
                dm[k] = (ma - mb) / (2.0 * h);
                div_h += (ha[k] - hb[k]) / (2.0 * h);
            }
            _ => {}
        }
    }
    let curl_m = curl_from_gradient(&dm);
    let s = field_state(model, params, point, twist, field)?;
    let p = params;
    let id = Mat3::identity();
    let micro = match model.delegate() {
        ModelKind::RelaxedMicromorphic | ModelKind::RelaxedConformal | ModelKind::RelaxedSymmetricStress => {
            let pm = s.p.unwrap();
            s.sigma_tilde - sym(&pm) * (2.0 * p.mu_micro) - id * (p.lambda_micro * pm.trace()) - curl_m
        }
        ModelKind::Cosserat | ModelKind::CosseratConformal => skew(&(s.sigma_tilde - curl_m)),
        ModelKind::IndeterminateCoupleStress => curl_m,
        ModelKind::Micromorphic | ModelKind::MicromorphicReducedCurvature | ModelKind::MicroStrain => {
            let pm = s.p.unwrap();
            let full = s.sigma_tilde - dev(&sym(&pm)) * (2.0 * p.mu_micro) - id * (p.kappa_micro() * pm.trace()) + div_h;
            if matches!(s.moment, MomentTensor::Third(_)) && model.delegate() == ModelKind::Micromorphic && p.a2 > 0.0 {
                full
            } else {
                sym(&full)
            }
        }
        ModelKind::AdHoc => {
            let pm = s.p.unwrap();
            let sm = sym(&pm);
            skew(&(s.sigma_tilde - curl_m))
                + sym(&(s.sigma_tilde - dev(&sm) * (2.0 * p.mu_micro) - id * (p.lambda_micro * sm.trace()) + div_h))
        }
        _ => Mat3::zeros(),
    };
    Ok(BalanceResidual { force: div_sigma, micro })
}

/// Higher-order torque integrand of the Cosserat form,
/// `⟨skew(m × e_z) e_φ, e_r⟩ − ⟨skew(m × e_z) e_r, e_φ⟩`.
pub fn skew_torque_integrand(m: &Mat3, phi: f64) -> f64 {
    let a = skew(&cross_rows(m, &e_z()));
    let (er, ep) = (e_r(phi), e_phi(phi));
    (a * ep).dot(&er) - (a * er).dot(&ep)
}

/// Four-term higher-order torque integrand of the couple-stress model.
pub fn couple_stress_torque_integrand(m: &Mat3, phi: f64) -> f64 {
    let (er, ep, ez) = (e_r(phi), e_phi(phi), e_z());
    let a = cross_rows(m, &ez);
    let b = cross_rows(m, &er);
    (a * ep).dot(&er) - (a * er).dot(&ep) + (b * ep).dot(&ez) - (b * ez).dot(&ep)
}

/// Classical Cosserat moment `m̄ = −mᵀ + tr(m) 𝟙` paired with the
/// dislocation-format moment `m = −m̄ᵀ + tr(m̄)/2 𝟙`.
pub fn classical_moment(m: &Mat3) -> Mat3 {
    -m.transpose() + Mat3::identity() * m.trace()
}

pub fn dislocation_moment(m_bar: &Mat3) -> Mat3 {
    -m_bar.transpose() + Mat3::identity() * (0.5 * m_bar.trace())
}
