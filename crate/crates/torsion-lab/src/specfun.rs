//! Modified Bessel functions of the first kind, orders 0 to 2.
//!
//! Small arguments use the power series, large arguments the exponentially
//! scaled asymptotic expansion. Every stiffness formula in this crate is
//! written in terms of the reduced forms `I_n(x)/x^n` scaled by `e^{-x}`, which
//! stay finite at `x = 0` and never overflow.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Series below, asymptotic expansion at or above.
pub const CROSSOVER: f64 = 15.0;

const MAX_ORDER: u32 = 2;

/// One evaluated value `I_order(argument)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
}

impl BesselEval {
    pub fn new(order: u32, argument: f64) -> Result<Self> {
        Ok(Self {
            order,
            argument,
            value: bessel_i(order, argument)?,
        })
    }
}

fn check(order: u32, x: f64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::Domain(format!("unsupported Bessel order {order}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// `I_n(x)/x^n` from the power series. Accurate for any `x` below overflow;
/// all terms are positive.
fn series_reduced(n: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5f64.powi(n as i32) / factorial(n);
    let mut sum = term;
    let mut k = 0.0;
    let nf = n as f64;
    loop {
        k += 1.0;
        term *= q / (k * (k + nf));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `e^{-x} I_n(x)` from the asymptotic expansion, summed up to its smallest term.
fn asymptotic_scaled(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= prev || next == 0.0 {
            break;
        }
        prev = next.abs();
        term = next;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// `I_n(x)` from the power series alone.
pub fn bessel_i_series(order: u32, x: f64) -> Result<f64> {
    check(order, x)?;
    Ok(series_reduced(order, x) * x.powi(order as i32))
}

/// `e^{-x} I_n(x)` from the asymptotic expansion alone. Requires `x > 0`.
pub fn bessel_i_asymptotic_scaled(order: u32, x: f64) -> Result<f64> {
    check(order, x)?;
    if x == 0.0 {
        return Err(Error::Domain("asymptotic form needs x > 0".into()));
    }
    Ok(asymptotic_scaled(order, x))
}

/// `I_n(x)`. Overflows to infinity beyond `x ≈ 709`; use
/// [`bessel_i_scaled`] or [`bessel_i_ratio`] there.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    check(order, x)?;
    if x < CROSSOVER {
        Ok(series_reduced(order, x) * x.powi(order as i32))
    } else {
        Ok(asymptotic_scaled(order, x) * x.exp())
    }
}

/// `e^{-x} I_n(x)`.
pub fn bessel_i_scaled(order: u32, x: f64) -> Result<f64> {
    check(order, x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < CROSSOVER {
        Ok(series_reduced(order, x) * x.powi(order as i32) * (-x).exp())
    } else {
        Ok(asymptotic_scaled(order, x))
    }
}

/// `I_num(x) / I_den(x)` without overflow.
pub fn bessel_i_ratio(num_order: u32, den_order: u32, x: f64) -> Result<f64> {
    check(num_order, x)?;
    check(den_order, x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    if x == 0.0 {
        return Ok(match (num_order, den_order) {
            (a, b) if a == b => 1.0,
            (_, 0) => 0.0,
            _ => {
                return Err(Error::Domain(format!(
                    "I{num_order}/I{den_order} has a pole at x = 0"
                )))
            }
        });
    }
    if x < CROSSOVER {
        let p = series_reduced(num_order, x) / series_reduced(den_order, x);
        Ok(p * x.powi(num_order as i32 - den_order as i32))
    } else {
        Ok(asymptotic_scaled(num_order, x) / asymptotic_scaled(den_order, x))
    }
}

/// Scaled reduced Bessel values at one argument:
/// `i0 = e^{-x} I_0(x)` and `jn = e^{-x} I_n(x)/x^n` for n = 1, 2, 3.
///
/// `j1(0) = 1/2`, `j2(0) = 1/8`, `j3(0) = 1/48`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBessel {
    pub x: f64,
    pub i0: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

impl ReducedBessel {
    pub fn new(x: f64) -> Self {
        debug_assert!(x >= 0.0);
        if x < CROSSOVER {
            let e = (-x).exp();
            Self {
                x,
                i0: series_reduced(0, x) * e,
                j1: series_reduced(1, x) * e,
                j2: series_reduced(2, x) * e,
                j3: series_reduced(3, x) * e,
            }
        } else {
            Self {
                x,
                i0: asymptotic_scaled(0, x),
                j1: asymptotic_scaled(1, x) / x,
                j2: asymptotic_scaled(2, x) / (x * x),
                j3: asymptotic_scaled(3, x) / (x * x * x),
            }
        }
    }
}

/// `(I_1(y)/y) / (I_1(x)/x)` for `0 ≤ y ≤ x`, safe for large arguments.
pub fn reduced_i1_quotient(y: f64, x: f64) -> f64 {
    let a = ReducedBessel::new(y);
    let b = ReducedBessel::new(x);
    a.j1 / b.j1 * (y - x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(1, 0.0).unwrap(), 0.0);
        let v = bessel_i(1, 2.0).unwrap();
        assert!((v - 1.590_636_854_637_329).abs() < 1e-14);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(bessel_i_ratio(2, 0, 0.0).unwrap(), 0.0);
        let r = bessel_i_ratio(2, 0, 2.0).unwrap();
        assert!((r - 0.302_225_342_035_992).abs() < 1e-14);
        let big = bessel_i_ratio(1, 0, 1e4).unwrap();
        assert!((big - 1.0).abs() < 1e-4);
        assert!(bessel_i_ratio(0, 2, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(bessel_i(3, 1.0).is_err());
        assert!(bessel_i(0, -1.0).is_err());
        assert!(bessel_i(0, f64::NAN).is_err());
    }

    #[test]
    fn reduced_at_origin() {
        let b = ReducedBessel::new(0.0);
        assert_eq!(b.i0, 1.0);
        assert_eq!(b.j1, 0.5);
        assert_eq!(b.j2, 0.125);
        assert!((b.j3 - 1.0 / 48.0).abs() < 1e-17);
    }

    #[test]
    fn reduced_is_continuous_at_crossover() {
        let lo = ReducedBessel::new(CROSSOVER * (1.0 - 1e-12));
        let hi = ReducedBessel::new(CROSSOVER);
        for (a, b) in [(lo.i0, hi.i0), (lo.j1, hi.j1), (lo.j2, hi.j2), (lo.j3, hi.j3)] {
            assert!((a - b).abs() <= 1e-11 * b);
        }
    }
}
