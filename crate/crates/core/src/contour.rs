//! The rectangles `L−`, `Lc` and `L+` hugging the real segment `[1, √s]`.
//!
//! ```text
//!   Im
//!   +ε ┌──────────────────────────┬───────┐
//!      │            L−            │  Lc   │
//!   −ε └──────────────────────────┴───────┘
//!     1−ε                       √s−ε    √s+ε   Re
//!      └───────────────── L+ ─────────────┘
//! ```
//!
//! Every contour is a closed loop of four axis-aligned segments traversed
//! counterclockwise, starting at the bottom-left corner.
//!
//! The half-height `ε` has to stay below every non-real zero of `f_s` whose
//! real part falls inside the rectangle. Those zeros sit just above the axis
//! near `x = s/m`, the lowest at height `≈ 2π/s³` next to `x = 1 + 1/(s−1)`,
//! so [`default_epsilon`] shrinks like `s⁻³`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{eval_scaled, Natural, DEFAULT_POLE_FLOOR};
use crate::error::CoreError;

/// Upper bound on `ε`; pole floors are quoted at this half-height.
pub const MAX_EPSILON: f64 = 0.25;

/// Smallest sampling density accepted by [`validate_epsilon`].
pub const MIN_SAMPLES_PER_UNIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourKind {
    Minus,
    Center,
    Plus,
}

impl ContourKind {
    pub const ALL: [ContourKind; 3] = [ContourKind::Minus, ContourKind::Center, ContourKind::Plus];

    pub fn name(self) -> &'static str {
        match self {
            ContourKind::Minus => "minus",
            ContourKind::Center => "center",
            ContourKind::Plus => "plus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Horizontal,
    Vertical,
}

/// A directed, axis-aligned edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    start: Complex64,
    end: Complex64,
    kind: SegmentKind,
}

impl Segment {
    pub fn new(start: Complex64, end: Complex64) -> Result<Self, CoreError> {
        let kind = match (start.re == end.re, start.im == end.im) {
            (false, true) => SegmentKind::Horizontal,
            (true, false) => SegmentKind::Vertical,
            _ => {
                return Err(CoreError::InvalidArgument(format!(
                    "segment {start} -> {end} is not a non-degenerate axis-aligned edge"
                )))
            }
        };
        Ok(Segment { start, end, kind })
    }

    pub fn start(&self) -> Complex64 {
        self.start
    }

    pub fn end(&self) -> Complex64 {
        self.end
    }

    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// `end − start`, i.e. `dz/dt` for the parametrisation `t ∈ [0, 1]`.
    pub fn direction(&self) -> Complex64 {
        self.end - self.start
    }

    /// Point at parameter `t ∈ [0, 1]`; the constant coordinate is exact.
    pub fn point_at(&self, t: f64) -> Complex64 {
        match self.kind {
            SegmentKind::Horizontal => {
                Complex64::new(lerp(self.start.re, self.end.re, t), self.start.im)
            }
            SegmentKind::Vertical => {
                Complex64::new(self.start.re, lerp(self.start.im, self.end.im, t))
            }
        }
    }

    /// Minimum of `|z|²` over the sub-segment `[t0, t1]`.
    pub fn min_abs_sq(&self, t0: f64, t1: f64) -> f64 {
        let (a, b) = (self.point_at(t0), self.point_at(t1));
        let (fixed, lo, hi) = match self.kind {
            SegmentKind::Horizontal => (a.im, a.re.min(b.re), a.re.max(b.re)),
            SegmentKind::Vertical => (a.re, a.im.min(b.im), a.im.max(b.im)),
        };
        let closest = 0f64.clamp(lo, hi);
        fixed * fixed + closest * closest
    }
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t >= 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

/// A closed rectangular contour `[x_lo, x_hi] × [−ε, ε]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    kind: ContourKind,
    s: Natural,
    epsilon: f64,
    segments: Vec<Segment>,
}

impl Contour {
    /// Counterclockwise rectangle with arbitrary real extent. [`build_contour`]
    /// is the constructor for the three named contours; this one exists for
    /// probing validation on shifted boxes.
    pub fn rectangle(
        kind: ContourKind,
        s: Natural,
        epsilon: f64,
        x_lo: f64,
        x_hi: f64,
    ) -> Result<Self, CoreError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(CoreError::InvalidEpsilon(epsilon));
        }
        if !(x_hi > x_lo) {
            return Err(CoreError::InvalidArgument(format!(
                "empty x-range [{x_lo}, {x_hi}]"
            )));
        }
        let corners = [
            Complex64::new(x_lo, -epsilon),
            Complex64::new(x_hi, -epsilon),
            Complex64::new(x_hi, epsilon),
            Complex64::new(x_lo, epsilon),
        ];
        let segments = (0..4)
            .map(|i| Segment::new(corners[i], corners[(i + 1) % 4]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Contour {
            kind,
            s,
            epsilon,
            segments,
        })
    }

    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn s(&self) -> Natural {
        self.s
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn corners(&self) -> Vec<Complex64> {
        self.segments.iter().map(Segment::start).collect()
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.segments[0].start.re, self.segments[0].end.re)
    }

    pub fn perimeter(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn is_closed(&self) -> bool {
        let n = self.segments.len();
        (0..n).all(|i| self.segments[i].end == self.segments[(i + 1) % n].start)
    }

    /// Shoelace area; positive for counterclockwise traversal.
    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .segments
            .iter()
            .map(|seg| seg.start.re * seg.end.im - seg.end.re * seg.start.im)
            .sum::<f64>()
    }

    pub fn geometry(&self) -> ContourGeometry {
        let (x_lo, x_hi) = self.x_range();
        ContourGeometry {
            kind: self.kind,
            s: self.s.get(),
            epsilon: self.epsilon,
            orientation: if self.signed_area() > 0.0 {
                "counterclockwise"
            } else {
                "clockwise"
            },
            x_range: [x_lo, x_hi],
            y_range: [-self.epsilon, self.epsilon],
            corners: self.corners().into_iter().map(|c| [c.re, c.im]).collect(),
            signed_area: self.signed_area(),
        }
    }
}

/// Serializable corner listing of a contour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourGeometry {
    pub kind: ContourKind,
    pub s: u64,
    pub epsilon: f64,
    pub orientation: &'static str,
    pub x_range: [f64; 2],
    pub y_range: [f64; 2],
    pub corners: Vec<[f64; 2]>,
    pub signed_area: f64,
}

/// Builds `L−` (`[1−ε, √s−ε]`), `Lc` (`[√s−ε, √s+ε]`) or `L+` (`[1−ε, √s+ε]`),
/// all of half-height `ε`.
pub fn build_contour(kind: ContourKind, s: Natural, epsilon: f64) -> Result<Contour, CoreError> {
    if !(epsilon > 0.0 && epsilon <= MAX_EPSILON) {
        return Err(CoreError::InvalidEpsilon(epsilon));
    }
    let root = s.sqrt();
    let (x_lo, x_hi) = match kind {
        ContourKind::Minus => (1.0 - epsilon, root - epsilon),
        ContourKind::Center => (root - epsilon, root + epsilon),
        ContourKind::Plus => (1.0 - epsilon, root + epsilon),
    };
    // √s ± ε must be distinguishable in f64; fails near s ≈ 2.6·10⁴ with the default ε
    if (root + epsilon) - (root - epsilon) < epsilon {
        return Err(CoreError::InvalidArgument(format!(
            "epsilon {epsilon:e} is below the f64 resolution at sqrt({}) = {root}",
            s.get()
        )));
    }
    if kind == ContourKind::Minus && x_hi <= x_lo + 1e-9 {
        return Err(CoreError::DegenerateContour { s: s.get() });
    }
    Contour::rectangle(kind, s, epsilon, x_lo, x_hi)
}

/// `min(1/4, 1/(4s³))`.
///
/// Beyond `s ≈ 2.6·10⁴` this is smaller than the spacing of doubles at `√s`,
/// and [`build_contour`] refuses it.
///
/// Non-real zeros of `f_s` with real part in `[1, √s]` lie no lower than about
/// `2π/s³`, which leaves a margin of roughly 25. Real divisors other than `√s`
/// stay at least `0.375` from the vertical edges at `√s ± ε` because two
/// distinct integer co-divisors cannot straddle `√s` more tightly.
pub fn default_epsilon(s: Natural) -> f64 {
    let sf = s.as_f64();
    MAX_EPSILON.min(0.25 / (sf * sf * sf))
}

/// Pole floor scaled to a half-height: `base · (ε / ¼)²`.
///
/// Along a contour of half-height `ε`, `|f_s|` next to a simple real zero is
/// of order `ε` and next to the double zero at `√s` of order `ε²`; the floor
/// follows the quadratic case so neither trips it.
pub fn scaled_floor(base: f64, epsilon: f64) -> f64 {
    let r = epsilon / MAX_EPSILON;
    base * r * r
}

/// Result of sampling `|f_s|` along a contour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub epsilon: f64,
    pub min_abs_f_on_contour: f64,
    pub samples_checked: usize,
    pub accepted: bool,
}

/// Samples `|f_s|` along `contour` at a local density of
/// `samples_per_unit · (1 + s/|z|²)` and accepts when the minimum exceeds
/// `10³` times the default pole floor scaled to the contour's `ε`.
pub fn validate_epsilon(
    s: Natural,
    contour: &Contour,
    samples_per_unit: usize,
) -> Result<EpsilonReport, CoreError> {
    validate_with_floor(s, contour, samples_per_unit, DEFAULT_POLE_FLOOR)
}

/// [`validate_epsilon`] with an explicit base pole floor.
pub fn validate_with_floor(
    s: Natural,
    contour: &Contour,
    samples_per_unit: usize,
    base_floor: f64,
) -> Result<EpsilonReport, CoreError> {
    if samples_per_unit < MIN_SAMPLES_PER_UNIT {
        return Err(CoreError::InvalidArgument(format!(
            "samples_per_unit = {samples_per_unit} is below {MIN_SAMPLES_PER_UNIT}"
        )));
    }
    let sf = s.as_f64();
    let density = samples_per_unit as f64;
    let mut min_ln = f64::INFINITY;
    let mut samples = 0usize;

    for seg in contour.segments() {
        let len = seg.length();
        let mut t = 0.0;
        while t < 1.0 {
            let z = seg.point_at(t);
            let ln_abs = match eval_scaled(s, z) {
                Ok(ev) => ev.ln_abs_f(),
                Err(_) => f64::NEG_INFINITY,
            };
            min_ln = min_ln.min(ln_abs);
            samples += 1;
            let local = density * (1.0 + sf / z.norm_sqr());
            t += 1.0 / (local * len);
        }
        // the real zeros can only touch a contour where an edge crosses the axis
        let (a, b) = (seg.start(), seg.end());
        if a.re == b.re && (a.im < 0.0) != (b.im < 0.0) {
            let ln_abs = eval_scaled(s, Complex64::new(a.re, 0.0))
                .map_or(f64::NEG_INFINITY, |ev| ev.ln_abs_f());
            min_ln = min_ln.min(ln_abs);
            samples += 1;
        }
    }

    let min_abs = min_ln.exp().min(f64::MAX);
    let threshold = 1e3 * scaled_floor(base_floor, contour.epsilon());
    Ok(EpsilonReport {
        epsilon: contour.epsilon(),
        min_abs_f_on_contour: min_abs,
        samples_checked: samples,
        accepted: min_abs > threshold,
    })
}
