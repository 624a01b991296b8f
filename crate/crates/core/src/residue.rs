//! Logarithmic residue `(1/2πi)∮ f′/f dz` along a contour, computed two ways.
//!
//! [`residue_quadrature`] integrates [`eval_logderiv`](crate::analytic::eval_logderiv)
//! with adaptive 15-point Gauss–Legendre panels. [`residue_winding`] never
//! touches `f′`: it walks the contour accumulating the continuous argument of
//! `f_s`. [`reconcile`] demands that both round to the same integer.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{eval_scaled, Natural, DEFAULT_POLE_FLOOR};
use crate::contour::{scaled_floor, Contour, Segment};
use crate::error::{CoreError, ResidueError};

const GL_ORDER: usize = 15;

/// Initial panels per unit length per unit of `s/|z|² + 1`.
const PANELS_PER_PHASE_UNIT: f64 = 4.0;

/// Panels are kept no longer than this many local zero distances, the
/// distance being estimated by `|f/f′|` at the Gauss nodes.
const RESOLUTION_FACTOR: f64 = 2.0;

/// Partition chunk used when applying the phase-speed panel rule.
const CHUNK_LENGTH: f64 = 0.25;

/// Argument changes above this at the minimum step are ambiguous.
const PHASE_GUARD: f64 = FRAC_PI_2;

/// Numerical policy shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Largest argument change accepted per winding step, radians.
    pub max_phase_step: f64,
    pub abs_tolerance: f64,
    /// Panel budget per contour for quadrature; also sets the winding step floor.
    pub max_subdivisions: usize,
    /// Floor on `|f_s|` at `ε = 1/4`; scaled by `(ε/¼)²` for thinner contours.
    pub pole_floor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            max_phase_step: FRAC_PI_8,
            abs_tolerance: 1e-6,
            max_subdivisions: 1 << 20,
            pole_floor: DEFAULT_POLE_FLOOR,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), ResidueError> {
        let bad = |msg: String| Err(ResidueError::InvalidArgument(msg));
        if !(self.max_phase_step > 0.0 && self.max_phase_step < PI) {
            return bad(format!(
                "max_phase_step {} outside (0, π)",
                self.max_phase_step
            ));
        }
        if !(self.abs_tolerance > 0.0) {
            return bad(format!(
                "abs_tolerance {} must be positive",
                self.abs_tolerance
            ));
        }
        if self.max_subdivisions < 1 << 10 {
            return bad(format!(
                "max_subdivisions {} below 2^10",
                self.max_subdivisions
            ));
        }
        if !(self.pole_floor > 0.0) {
            return bad(format!("pole_floor {} must be positive", self.pole_floor));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Winding,
}

/// A logarithmic residue and how close it came to an integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueResult {
    pub raw: Complex64,
    pub rounded: u64,
    pub residual: f64,
    pub method: Method,
    pub evaluations: u64,
}

impl ResidueResult {
    fn from_raw(raw: Complex64, method: Method, evaluations: u64) -> Result<Self, ResidueError> {
        let nearest = raw.re.round();
        let residual = (raw - nearest).norm();
        let result = ResidueResult {
            raw,
            rounded: nearest.max(0.0) as u64,
            residual,
            method,
            evaluations,
        };
        if residual <= 0.25 && raw.im.abs() <= 0.25 && nearest >= 0.0 {
            Ok(result)
        } else {
            Err(ResidueError::NonInteger(Box::new(result)))
        }
    }
}

fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // three-term recurrence for P_n and P_n'
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

struct Integrator<'a> {
    s: Natural,
    floor: f64,
    seg: &'a Segment,
    evaluations: u64,
}

struct PanelEstimate {
    value: Complex64,
    /// Smallest `|f/f′|` seen at the nodes, in units of `t`.
    min_scale_t: f64,
    /// Rounding noise in `value`; no refinement can go below it.
    noise: f64,
}

impl Integrator<'_> {
    fn panel(&mut self, a: f64, b: f64) -> Result<PanelEstimate, ResidueError> {
        let (nodes, weights) = gauss_legendre();
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let len = self.seg.length();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut min_scale = f64::INFINITY;
        let mut noise = 0.0;
        for (&x, &w) in nodes.iter().zip(weights) {
            let z = self.seg.point_at(mid + half * x);
            let ev = eval_scaled(self.s, z)?;
            if !(ev.ln_abs_f() > self.floor.ln()) {
                return Err(CoreError::PoleProximity {
                    z,
                    abs_f: ev.abs_f(),
                    floor: self.floor,
                }
                .into());
            }
            let ld = ev.logderiv();
            sum += w * ld;
            noise += w * ev.logderiv_noise(z);
            // |f/f′| = 1 / (2π |f′/(2πi f)|)
            min_scale = min_scale.min(1.0 / (TAU * ld.norm() * len));
        }
        self.evaluations += GL_ORDER as u64;
        Ok(PanelEstimate {
            value: sum * half * self.seg.direction(),
            min_scale_t: min_scale,
            noise: noise * half * len,
        })
    }
}

fn quadrature_segment(
    s: Natural,
    seg: &Segment,
    floor: f64,
    tol_per_length: f64,
    config: &QuadratureConfig,
    panels_used: &mut usize,
) -> Result<(Complex64, u64), ResidueError> {
    let len = seg.length();
    let sf = s.as_f64();
    let mut integ = Integrator {
        s,
        floor,
        seg,
        evaluations: 0,
    };

    // Initial mesh from the phase speed 2π(s/|z|² + 1), chunk by chunk.
    let chunks = (len / CHUNK_LENGTH).ceil().max(1.0) as usize;
    let mut initial = Vec::new();
    for c in 0..chunks {
        let t0 = c as f64 / chunks as f64;
        let t1 = (c + 1) as f64 / chunks as f64;
        let speed = sf / seg.min_abs_sq(t0, t1) + 1.0;
        let n = ((t1 - t0) * len * speed * PANELS_PER_PHASE_UNIT)
            .ceil()
            .max(1.0) as usize;
        for k in 0..n {
            let a = t0 + (t1 - t0) * k as f64 / n as f64;
            let b = if k + 1 == n {
                t1
            } else {
                t0 + (t1 - t0) * (k + 1) as f64 / n as f64
            };
            initial.push((a, b));
        }
    }
    *panels_used += initial.len();
    if *panels_used > config.max_subdivisions {
        return Err(ResidueError::NonConvergence {
            panels: *panels_used,
        });
    }

    // Panels narrower than a few ulps of the coordinates cannot be refined.
    let scale = seg.start().norm().max(seg.end().norm());
    let min_width_t = 64.0 * f64::EPSILON * scale / len;

    let mut total = Complex64::new(0.0, 0.0);
    let mut stack: Vec<(f64, f64, PanelEstimate)> = Vec::new();
    for (a, b) in initial.into_iter().rev() {
        let est = integ.panel(a, b)?;
        stack.push((a, b, est));
    }
    while let Some((a, b, whole)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = integ.panel(a, m)?;
        let right = integ.panel(m, b)?;
        let refined = left.value + right.value;
        let width = b - a;
        let noise = 8.0 * (whole.noise + left.noise + right.noise);
        let tol = (tol_per_length * width * len)
            .max(1e-13 * refined.norm())
            .max(noise);
        let resolved = width <= RESOLUTION_FACTOR * whole.min_scale_t;
        if width <= min_width_t || (resolved && (refined - whole.value).norm() <= tol) {
            total += refined;
            continue;
        }
        *panels_used += 1;
        if *panels_used > config.max_subdivisions {
            return Err(ResidueError::NonConvergence {
                panels: *panels_used,
            });
        }
        stack.push((m, b, right));
        stack.push((a, m, left));
    }
    Ok((total, integ.evaluations))
}

fn effective_floor(contour: &Contour, config: &QuadratureConfig) -> f64 {
    scaled_floor(config.pole_floor, contour.epsilon())
}

fn check_inputs(
    s: Natural,
    contour: &Contour,
    config: &QuadratureConfig,
) -> Result<(), ResidueError> {
    config.validate()?;
    if contour.s() != s {
        return Err(ResidueError::InvalidArgument(format!(
            "contour built for s = {} used with s = {s}",
            contour.s()
        )));
    }
    Ok(())
}

/// `∮ f′/(2πi f) dz` by adaptive Gauss–Legendre quadrature.
///
/// Each edge starts from `⌈4·len·(s/min|z|² + 1)⌉` panels per quarter-unit
/// chunk. A panel is split until it is no wider than twice the local zero
/// distance `|f/f′|` and its 15-point value agrees with the sum over its two
/// halves to within its share of `abs_tolerance`.
pub fn residue_quadrature(
    s: Natural,
    contour: &Contour,
    config: &QuadratureConfig,
) -> Result<ResidueResult, ResidueError> {
    check_inputs(s, contour, config)?;
    let floor = effective_floor(contour, config);
    let tol_per_length = config.abs_tolerance / contour.perimeter();
    let mut panels = 0usize;
    let mut evaluations = 0u64;
    let mut raw = Complex64::new(0.0, 0.0);
    for seg in contour.segments() {
        let (value, evals) =
            quadrature_segment(s, seg, floor, tol_per_length, config, &mut panels)?;
        raw += value;
        evaluations += evals;
    }
    ResidueResult::from_raw(raw, Method::Quadrature, evaluations)
}

/// Total change of `arg f_s` around the contour, divided by `2π`.
///
/// Steps are capped so the exponentials rotate at most `max_phase_step` per
/// step, and halved whenever the observed change of `arg f_s` exceeds it.
/// The step floor is `min(len / max_subdivisions, ε/64)`, never below a few
/// ulps; if the argument still jumps by more than `π/2` there, the count is
/// ambiguous and a [`ResidueError::PhaseJump`] is returned.
pub fn residue_winding(
    s: Natural,
    contour: &Contour,
    config: &QuadratureConfig,
) -> Result<ResidueResult, ResidueError> {
    let total = winding_angle(s, contour, config)?;
    ResidueResult::from_raw(
        Complex64::new(total.angle / TAU, 0.0),
        Method::Winding,
        total.evaluations,
    )
}

/// Accumulated argument around a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingAngle {
    pub angle: f64,
    pub evaluations: u64,
    pub steps: u64,
}

pub fn winding_angle(
    s: Natural,
    contour: &Contour,
    config: &QuadratureConfig,
) -> Result<WindingAngle, ResidueError> {
    check_inputs(s, contour, config)?;
    let sf = s.as_f64();
    let mut angle = 0.0;
    let mut evaluations = 0u64;
    let mut steps = 0u64;

    for seg in contour.segments() {
        let len = seg.length();
        let scale = seg.start().norm().max(seg.end().norm());
        let floor_len = (len / config.max_subdivisions as f64)
            .min(contour.epsilon() / 64.0)
            .max(8.0 * f64::EPSILON * scale);
        let min_step = (floor_len / len).min(1.0);

        let mut t = 0.0;
        let mut z = seg.point_at(0.0);
        let mut cur = eval_scaled(s, z)?;
        evaluations += 1;
        let mut h: f64 = 1.0;
        while t < 1.0 {
            h = h.min(1.0 - t);
            let speed = TAU * (sf / seg.min_abs_sq(t, t + h) + 1.0) * len;
            h = h
                .min(config.max_phase_step / speed)
                .max(min_step.min(1.0 - t));
            let t_next = if t + h >= 1.0 - 0.5 * min_step {
                1.0
            } else {
                t + h
            };
            let z_next = seg.point_at(t_next);
            let next = eval_scaled(s, z_next)?;
            evaluations += 1;
            if next.f == Complex64::new(0.0, 0.0) {
                return Err(ResidueError::PhaseJump {
                    z: z_next,
                    phase: PI,
                });
            }
            let delta = (next.f * cur.f.conj()).arg();
            let at_floor = h <= min_step * (1.0 + 1e-12);
            if delta.abs() > config.max_phase_step && !at_floor {
                h = (0.5 * h).max(min_step);
                continue;
            }
            if delta.abs() > PHASE_GUARD {
                return Err(ResidueError::PhaseJump { z, phase: delta });
            }
            angle += delta;
            steps += 1;
            t = t_next;
            z = z_next;
            cur = next;
            h *= 2.0;
        }
    }
    Ok(WindingAngle {
        angle,
        evaluations,
        steps,
    })
}

/// The common integer of a quadrature and a winding result.
pub fn reconcile(a: &ResidueResult, b: &ResidueResult) -> Result<u64, ResidueError> {
    if a.method == b.method {
        return Err(ResidueError::InvalidArgument(format!(
            "reconcile needs one result per method, got two {:?}",
            a.method
        )));
    }
    if a.rounded == b.rounded {
        Ok(a.rounded)
    } else {
        Err(ResidueError::MethodDisagreement {
            a: Box::new(a.clone()),
            b: Box::new(b.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_contour, default_epsilon, ContourKind};

    fn nat(v: u64) -> Natural {
        Natural::new(v).unwrap()
    }

    fn contour(kind: ContourKind, s: u64) -> Contour {
        build_contour(kind, nat(s), default_epsilon(nat(s))).unwrap()
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_29() {
        let (nodes, weights) = gauss_legendre();
        assert!((weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in [2, 10, 28] {
            let got: f64 = nodes
                .iter()
                .zip(weights)
                .map(|(x, w)| w * x.powi(deg))
                .sum();
            let want = 2.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "deg {deg}");
        }
        let odd: f64 = nodes.iter().zip(weights).map(|(x, w)| w * x.powi(29)).sum();
        assert!(odd.abs() < 1e-14);
    }

    #[test]
    fn config_invariants() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let c = QuadratureConfig {
            max_phase_step: PI,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = QuadratureConfig {
            max_subdivisions: 1000,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = QuadratureConfig {
            abs_tolerance: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn quadrature_examples() {
        let cfg = QuadratureConfig::default();
        let r = residue_quadrature(nat(6), &contour(ContourKind::Minus, 6), &cfg).unwrap();
        assert_eq!(r.rounded, 2);
        assert!(r.residual < 1e-5, "{r:?}");
        let r = residue_quadrature(nat(4), &contour(ContourKind::Center, 4), &cfg).unwrap();
        assert_eq!(r.rounded, 2);
        let r = residue_quadrature(nat(7), &contour(ContourKind::Center, 7), &cfg).unwrap();
        assert_eq!(r.rounded, 0);
        assert!(r.raw.norm() < 1e-5);
    }

    #[test]
    fn winding_examples() {
        let cfg = QuadratureConfig::default();
        let r = residue_winding(nat(12), &contour(ContourKind::Plus, 12), &cfg).unwrap();
        assert_eq!(r.rounded, 3);
        let r = residue_winding(nat(16), &contour(ContourKind::Plus, 16), &cfg).unwrap();
        assert_eq!(r.rounded, 4);
    }

    #[test]
    fn winding_angle_is_a_multiple_of_two_pi() {
        let cfg = QuadratureConfig::default();
        for s in [2u64, 9, 30, 64, 101] {
            for kind in ContourKind::ALL {
                let w = winding_angle(nat(s), &contour(kind, s), &cfg).unwrap();
                let k = (w.angle / TAU).round();
                assert!(
                    (w.angle - k * TAU).abs() < 1e-3,
                    "s={s} {kind:?}: {}",
                    w.angle
                );
            }
        }
    }

    #[test]
    fn both_methods_on_thirty_six() {
        let cfg = QuadratureConfig::default();
        let c = contour(ContourKind::Plus, 36);
        let q = residue_quadrature(nat(36), &c, &cfg).unwrap();
        let w = residue_winding(nat(36), &c, &cfg).unwrap();
        assert_eq!(reconcile(&q, &w).unwrap(), 6);
    }

    #[test]
    fn reconcile_rules() {
        let r = |rounded, method| ResidueResult {
            raw: Complex64::new(rounded as f64, 0.0),
            rounded,
            residual: 0.0,
            method,
            evaluations: 0,
        };
        assert_eq!(
            reconcile(&r(2, Method::Quadrature), &r(2, Method::Winding)).unwrap(),
            2
        );
        assert!(matches!(
            reconcile(&r(2, Method::Quadrature), &r(3, Method::Winding)),
            Err(ResidueError::MethodDisagreement { .. })
        ));
        assert!(matches!(
            reconcile(&r(2, Method::Winding), &r(2, Method::Winding)),
            Err(ResidueError::InvalidArgument(_))
        ));
    }

    #[test]
    fn non_integer_results_are_rejected() {
        let err =
            ResidueResult::from_raw(Complex64::new(1.4, 0.0), Method::Quadrature, 0).unwrap_err();
        assert!(matches!(err, ResidueError::NonInteger(_)));
        assert!(ResidueResult::from_raw(Complex64::new(2.0, 0.3), Method::Quadrature, 0).is_err());
        assert!(ResidueResult::from_raw(Complex64::new(-1.0, 0.0), Method::Winding, 0).is_err());
        let ok = ResidueResult::from_raw(Complex64::new(2.1, 0.05), Method::Quadrature, 0).unwrap();
        assert_eq!(ok.rounded, 2);
        assert!((ok.residual - (0.1f64.hypot(0.05))).abs() < 1e-12);
    }

    #[test]
    fn contour_through_zero_is_refused() {
        // left edge of this box sits exactly on the zero at 1
        let c = Contour::rectangle(ContourKind::Plus, nat(6), 0.25, 1.0, 2.7).unwrap();
        let cfg = QuadratureConfig::default();
        assert!(residue_quadrature(nat(6), &c, &cfg).is_err());
        assert!(residue_winding(nat(6), &c, &cfg).is_err());
    }

    #[test]
    fn wide_contour_counts_off_axis_zeros() {
        // ε = 1/4 also encloses non-real zeros; both engines still agree
        let cfg = QuadratureConfig::default();
        let c = build_contour(ContourKind::Minus, nat(10), 0.25).unwrap();
        let q = residue_quadrature(nat(10), &c, &cfg).unwrap();
        let w = residue_winding(nat(10), &c, &cfg).unwrap();
        assert_eq!(q.rounded, w.rounded);
        assert_eq!(w.rounded, 12);
    }

    #[test]
    fn mismatched_s_is_rejected() {
        let c = contour(ContourKind::Plus, 6);
        assert!(residue_quadrature(nat(7), &c, &QuadratureConfig::default()).is_err());
    }
}
