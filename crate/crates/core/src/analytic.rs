//! Point evaluation of `f_s(z) = exp(2πiz) + exp(2πis/z) − 2` and its
//! derivatives.
//!
//! Both exponents are reduced modulo `2πi` before exponentiating. For
//! `exp(2πiz)` the reduction `x − round(x)` is exact; for `exp(2πis/z)` the
//! quotient `s·x / |z|²` is formed in double-double so the phase error stays
//! near one ulp instead of growing like `s · 2⁻⁵³`. `f` is then assembled as
//! `expm1(a) + expm1(b)`, which keeps full relative accuracy next to the real
//! zeros where the two terms nearly cancel.
//!
//! When `exp(2πis/z)` (or `exp(2πiz)`) exceeds `e³⁰` the dominant factor is
//! pulled out and carried as a separate real log-scale, see [`ScaledEval`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::two_prod;
use crate::error::CoreError;
use crate::oracle;

pub type ComplexValue = Complex64;

/// Largest `s` accepted by [`Natural::new`].
pub const DEFAULT_MAX_NATURAL: u64 = 10_000_000;

/// Default floor on `|f_s|` below which the logarithmic derivative is refused.
pub const DEFAULT_POLE_FLOOR: f64 = 1e-10;

const SINGULARITY_RADIUS: f64 = 1e-12;
const SCALE_THRESHOLD: f64 = 30.0;

/// The integer `s` under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Natural(u64);

impl Natural {
    pub fn new(value: u64) -> Result<Self, CoreError> {
        Self::with_max(value, DEFAULT_MAX_NATURAL)
    }

    pub fn with_max(value: u64, max: u64) -> Result<Self, CoreError> {
        if value == 0 || value > max {
            return Err(CoreError::InvalidNatural { value, max });
        }
        Ok(Natural(value))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn sqrt(self) -> f64 {
        self.as_f64().sqrt()
    }

    pub fn is_perfect_square(self) -> bool {
        oracle::is_perfect_square(self.0)
    }
}

impl std::fmt::Display for Natural {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// A real zero of `f_s` at a divisor, with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: u64,
    pub order: u8,
}

/// `2πiz = re_a + i·θ_a` and `2πis/z = re_b + i·θ_b` with both angles reduced
/// to `[−π, π]`.
#[derive(Debug, Clone, Copy)]
struct Exponents {
    re_a: f64,
    theta_a: f64,
    re_b: f64,
    theta_b: f64,
}

fn exponents(s: f64, z: Complex64) -> Exponents {
    let (x, y) = (z.re, z.im);
    let theta_a = TAU * (x - x.round());

    let den = two_prod(x, x).add(two_prod(y, y));
    let q = two_prod(s, x).div(den);
    let theta_b = TAU * q.frac_centered();
    let re_b = TAU * s * y / den.hi;

    Exponents {
        re_a: -TAU * y,
        theta_a,
        re_b,
        theta_b,
    }
}

/// `exp(re + iθ) − 1` without cancellation for small arguments.
#[inline]
fn expm1_polar(re: f64, theta: f64) -> Complex64 {
    let (sin, cos) = theta.sin_cos();
    let half = (0.5 * theta).sin();
    Complex64::new(re.exp_m1() * cos - 2.0 * half * half, re.exp() * sin)
}

#[inline]
fn exp_polar(re: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(re.exp(), theta)
}

fn check_domain(z: Complex64) -> Result<(), CoreError> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() < SINGULARITY_RADIUS {
        return Err(CoreError::Domain { z });
    }
    Ok(())
}

/// `f_s(z)` and `f′_s(z) / (2πi)` sharing a common factor `exp(scale)`.
///
/// `scale` is zero unless one exponential exceeds `e³⁰`; the true values are
/// `exp(scale)·f` and `exp(scale)·numerator`. The ratio, which is all the
/// residue engines need, never overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEval {
    pub scale: f64,
    pub f: Complex64,
    pub numerator: Complex64,
    /// `|exp(2πiz)| + |exp(2πis/z)| + 2` in the same scaling, the size of the
    /// terms whose sum is `f`.
    pub magnitude: f64,
}

impl ScaledEval {
    /// `ln |f_s(z)|`; `-inf` at an exact zero.
    pub fn ln_abs_f(&self) -> f64 {
        self.scale + self.f.norm().ln()
    }

    pub fn abs_f(&self) -> f64 {
        self.ln_abs_f().exp()
    }

    /// `f′ / (2πi·f)`, the integrand of the logarithmic residue.
    pub fn logderiv(&self) -> Complex64 {
        self.numerator / self.f
    }

    /// Rounding error of [`ScaledEval::logderiv`] at `z`: the terms of `f`
    /// cancel near a zero, and `z` itself is only known to an ulp.
    pub fn logderiv_noise(&self, z: Complex64) -> f64 {
        let ld = self.logderiv().norm();
        let from_f = 4.0 * f64::EPSILON * self.magnitude / self.f.norm();
        let from_z = TAU * ld * f64::EPSILON * z.norm();
        ld * (from_f + from_z)
    }
}

/// Evaluates `f_s` and its normalized derivative with overflow-safe scaling.
pub fn eval_scaled(s: Natural, z: Complex64) -> Result<ScaledEval, CoreError> {
    check_domain(z)?;
    let sf = s.as_f64();
    let e = exponents(sf, z);
    let z2 = z * z;
    let ratio = Complex64::new(sf, 0.0) / z2;
    let scale = e.re_a.max(e.re_b).max(0.0);

    if scale <= SCALE_THRESHOLD {
        let am1 = expm1_polar(e.re_a, e.theta_a);
        let bm1 = expm1_polar(e.re_b, e.theta_b);
        // (z² − s)/z² carries the cancelling "1 − s/z²" part exactly
        let z2_minus_s = Complex64::new(z.re.mul_add(z.re, -sf) - z.im * z.im, 2.0 * z.re * z.im);
        Ok(ScaledEval {
            scale: 0.0,
            f: am1 + bm1,
            numerator: am1 - ratio * bm1 + z2_minus_s / z2,
            magnitude: e.re_a.exp() + e.re_b.exp() + 2.0,
        })
    } else {
        let a = exp_polar(e.re_a - scale, e.theta_a);
        let b = exp_polar(e.re_b - scale, e.theta_b);
        Ok(ScaledEval {
            scale,
            f: a + b - 2.0 * (-scale).exp(),
            numerator: a - ratio * b,
            magnitude: (e.re_a - scale).exp() + (e.re_b - scale).exp() + 2.0 * (-scale).exp(),
        })
    }
}

fn unscale(z: Complex64, scale: f64, value: Complex64) -> Result<Complex64, CoreError> {
    let out = if scale == 0.0 {
        value
    } else {
        value * scale.exp()
    };
    if out.re.is_finite() && out.im.is_finite() {
        Ok(out)
    } else {
        Err(CoreError::Overflow { z })
    }
}

/// `f_s(z) = exp(2πiz) + exp(2πis/z) − 2`.
pub fn eval_f(s: Natural, z: Complex64) -> Result<Complex64, CoreError> {
    let ev = eval_scaled(s, z)?;
    unscale(z, ev.scale, ev.f)
}

/// `f′_s(z) = 2πi[exp(2πiz) − (s/z²)·exp(2πis/z)]`.
pub fn eval_f_prime(s: Natural, z: Complex64) -> Result<Complex64, CoreError> {
    let ev = eval_scaled(s, z)?;
    unscale(z, ev.scale, Complex64::new(0.0, TAU) * ev.numerator)
}

/// `f″_s(z) = 2πi[2πi·exp(2πiz) + (2s/z³ + 2πi·s²/z⁴)·exp(2πis/z)]`.
pub fn eval_f_second(s: Natural, z: Complex64) -> Result<Complex64, CoreError> {
    check_domain(z)?;
    let sf = s.as_f64();
    let e = exponents(sf, z);
    let scale = e.re_a.max(e.re_b).max(0.0);
    let a = exp_polar(e.re_a - scale, e.theta_a);
    let b = exp_polar(e.re_b - scale, e.theta_b);
    let two_pi_i = Complex64::new(0.0, TAU);
    let z3 = z * z * z;
    let z4 = z3 * z;
    let b_coeff = 2.0 * sf / z3 + two_pi_i * (sf * sf) / z4;
    unscale(z, scale, two_pi_i * (two_pi_i * a + b_coeff * b))
}

/// `f′_s / (2πi·f_s)`: the printed residue integrand, whose contour integral
/// is directly the zero count (the `2πi` of `f′` cancels the `1/(2πi)`
/// prefactor of the argument principle).
///
/// Refuses points where `|f_s| ≤ floor`.
pub fn eval_logderiv(s: Natural, z: Complex64, floor: f64) -> Result<Complex64, CoreError> {
    let ev = eval_scaled(s, z)?;
    let ln_abs = ev.ln_abs_f();
    if !(ln_abs > floor.ln()) {
        return Err(CoreError::PoleProximity {
            z,
            abs_f: ln_abs.exp(),
            floor,
        });
    }
    Ok(ev.logderiv())
}

/// Real zeros of `f_s` in `[1, √s]` with their orders: simple below `√s`,
/// double at `√s` when `s` is a perfect square.
pub fn predicted_zero_orders(s: Natural) -> Vec<ZeroRecord> {
    let n = s.get();
    oracle::divisors(n)
        .divisors
        .into_iter()
        .take_while(|&d| d.saturating_mul(d) <= n)
        .map(|d| ZeroRecord {
            location: d,
            order: if d * d == n { 2 } else { 1 },
        })
        .collect()
}

/// `f″_s(√s) = −8π² + 4πi/√s` for perfect squares.
pub fn second_derivative_at_root(s: Natural) -> Complex64 {
    Complex64::new(-8.0 * PI * PI, 4.0 * PI / s.sqrt())
}
