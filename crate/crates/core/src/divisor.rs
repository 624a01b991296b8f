//! `τ(s)` from the three contour residues, and the primality predicate
//! `τ+(p) = 1`.

use serde::{Deserialize, Serialize};

use crate::analytic::Natural;
use crate::contour::{
    build_contour, default_epsilon, validate_with_floor, ContourKind, EpsilonReport, MAX_EPSILON,
};
use crate::error::{CoreError, DivisorError};
use crate::residue::{
    reconcile, residue_quadrature, residue_winding, QuadratureConfig, ResidueResult,
};

/// Zero counts inside `L−`, `Lc`, `L+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComponentTriple {
    pub tau_minus: u64,
    pub tau_center: u64,
    pub tau_plus: u64,
}

impl ComponentTriple {
    /// `2τ` by each of `2τ− + ½τc`, `(3/2)τ− + ½τ+` and `2τ+ − (3/2)τc`.
    pub fn doubled_tau_forms(&self) -> [i64; 3] {
        let (m, c, p) = (
            self.tau_minus as i64,
            self.tau_center as i64,
            self.tau_plus as i64,
        );
        [4 * m + c, 3 * m + p, 4 * p - 3 * c]
    }
}

/// Knobs for the full pipeline on top of the engine policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub quadrature: QuadratureConfig,
    /// Overrides [`default_epsilon`].
    pub epsilon: Option<f64>,
    pub validation_density: usize,
    /// Halvings of `ε` tried after the first attempt fails.
    pub max_retries: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            quadrature: QuadratureConfig::default(),
            epsilon: None,
            validation_density: 64,
            max_retries: 3,
        }
    }
}

impl From<QuadratureConfig> for EvalOptions {
    fn from(quadrature: QuadratureConfig) -> Self {
        EvalOptions {
            quadrature,
            ..EvalOptions::default()
        }
    }
}

/// Everything computed for one contour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourEvaluation {
    pub kind: ContourKind,
    pub report: EpsilonReport,
    pub quadrature: ResidueResult,
    pub winding: ResidueResult,
    pub count: u64,
}

impl ContourEvaluation {
    pub fn evaluations(&self) -> u64 {
        self.quadrature.evaluations + self.winding.evaluations
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEvaluation {
    pub s: Natural,
    pub components: ComponentTriple,
    pub epsilon_used: f64,
    pub retries: u32,
    /// `s = 1`: no contour integral is taken.
    pub analytic: bool,
    pub contours: Vec<ContourEvaluation>,
}

impl ComponentEvaluation {
    pub fn evaluations(&self) -> u64 {
        self.contours
            .iter()
            .map(ContourEvaluation::evaluations)
            .sum()
    }

    pub fn contour(&self, kind: ContourKind) -> Option<&ContourEvaluation> {
        self.contours.iter().find(|c| c.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub s: Natural,
    pub components: ComponentTriple,
    pub tau: u64,
    pub formulas_agreed: bool,
    pub epsilon_used: f64,
    pub retries: u32,
    pub evaluations: u64,
    pub analytic_degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeReport {
    pub p: Natural,
    pub is_prime: bool,
    pub tau_plus: u64,
    pub quadrature: ResidueResult,
    pub winding: ResidueResult,
    pub epsilon_used: f64,
    pub retries: u32,
    pub evaluations: u64,
}

#[derive(Debug, Default)]
struct AttemptFailure {
    error: String,
    report: Option<EpsilonReport>,
    results: Vec<ResidueResult>,
}

fn evaluate_contour(
    s: Natural,
    kind: ContourKind,
    epsilon: f64,
    opts: &EvalOptions,
) -> Result<ContourEvaluation, AttemptFailure> {
    let fail = |error: String| AttemptFailure {
        error,
        ..AttemptFailure::default()
    };
    let contour = build_contour(kind, s, epsilon).map_err(|e| fail(e.to_string()))?;
    let report = validate_with_floor(
        s,
        &contour,
        opts.validation_density,
        opts.quadrature.pole_floor,
    )
    .map_err(|e| fail(e.to_string()))?;
    if !report.accepted {
        return Err(AttemptFailure {
            error: format!(
                "{} contour rejected: min |f| = {:e}",
                kind.name(),
                report.min_abs_f_on_contour
            ),
            report: Some(report),
            results: Vec::new(),
        });
    }
    let with_report = |error: String, results: Vec<ResidueResult>| AttemptFailure {
        error,
        report: Some(report.clone()),
        results,
    };
    let quadrature = residue_quadrature(s, &contour, &opts.quadrature)
        .map_err(|e| with_report(e.to_string(), vec![]))?;
    let winding = residue_winding(s, &contour, &opts.quadrature)
        .map_err(|e| with_report(e.to_string(), vec![quadrature.clone()]))?;
    let count = reconcile(&quadrature, &winding)
        .map_err(|e| with_report(e.to_string(), vec![quadrature.clone(), winding.clone()]))?;
    Ok(ContourEvaluation {
        kind,
        report,
        quadrature,
        winding,
        count,
    })
}

fn starting_epsilon(s: Natural, opts: &EvalOptions) -> Result<f64, CoreError> {
    let eps = opts.epsilon.unwrap_or_else(|| default_epsilon(s));
    if !(eps > 0.0 && eps <= MAX_EPSILON) {
        return Err(CoreError::InvalidEpsilon(eps));
    }
    Ok(eps)
}

/// Runs `attempt` at `ε, ε/2, …` until it succeeds or retries run out.
fn with_retries<T>(
    s: Natural,
    opts: &EvalOptions,
    mut attempt: impl FnMut(f64) -> Result<T, AttemptFailure>,
) -> Result<(T, f64, u32), DivisorError> {
    let eps0 = starting_epsilon(s, opts)?;
    let mut last = AttemptFailure::default();
    for retry in 0..=opts.max_retries {
        let eps = eps0 / f64::powi(2.0, retry as i32);
        match attempt(eps) {
            Ok(value) => return Ok((value, eps, retry)),
            Err(failure) => last = failure,
        }
    }
    Err(DivisorError::EvaluationFailure {
        s: s.get(),
        attempts: opts.max_retries + 1,
        last_error: last.error,
        last_report: last.report,
        results: last.results,
    })
}

/// All three contour counts with their diagnostics.
///
/// `s = 1` is answered analytically with `(0, 2, 2)`: `L−` has zero width and
/// `1 = √1` is a double zero. Otherwise each contour is validated, evaluated by
/// both engines and reconciled; the triple must satisfy `τ+ = τ− + τc` and
/// `τc = 2` exactly on perfect squares. Any failure retries with `ε/2`.
pub fn evaluate_components(
    s: Natural,
    opts: &EvalOptions,
) -> Result<ComponentEvaluation, DivisorError> {
    if s.get() == 1 {
        return Ok(ComponentEvaluation {
            s,
            components: ComponentTriple {
                tau_minus: 0,
                tau_center: 2,
                tau_plus: 2,
            },
            epsilon_used: starting_epsilon(s, opts)?,
            retries: 0,
            analytic: true,
            contours: Vec::new(),
        });
    }
    let square = s.is_perfect_square();
    let (contours, epsilon_used, retries) = with_retries(s, opts, |eps| {
        let contours = ContourKind::ALL
            .iter()
            .map(|&kind| evaluate_contour(s, kind, eps, opts))
            .collect::<Result<Vec<_>, _>>()?;
        let [m, c, p] = [contours[0].count, contours[1].count, contours[2].count];
        if p != m + c || !(c == 0 || c == 2) || (c == 2) != square {
            return Err(AttemptFailure {
                error: format!("inconsistent contour counts ({m}, {c}, {p})"),
                report: None,
                results: contours
                    .iter()
                    .flat_map(|e| [e.quadrature.clone(), e.winding.clone()])
                    .collect(),
            });
        }
        Ok(contours)
    })?;
    Ok(ComponentEvaluation {
        s,
        components: ComponentTriple {
            tau_minus: contours[0].count,
            tau_center: contours[1].count,
            tau_plus: contours[2].count,
        },
        epsilon_used,
        retries,
        analytic: false,
        contours,
    })
}

pub fn tau_components(
    s: Natural,
    config: &QuadratureConfig,
) -> Result<ComponentTriple, DivisorError> {
    Ok(evaluate_components(s, &EvalOptions::from(*config))?.components)
}

/// Combines an evaluated triple into `τ(s)`; all three forms must agree.
pub fn tau_from_evaluation(eval: &ComponentEvaluation) -> Result<TauReport, DivisorError> {
    let doubled = eval.components.doubled_tau_forms();
    if doubled[0] != doubled[1] || doubled[1] != doubled[2] || doubled[0] % 2 != 0 || doubled[0] < 2
    {
        return Err(DivisorError::IdentityViolation {
            s: eval.s.get(),
            doubled,
        });
    }
    Ok(TauReport {
        s: eval.s,
        components: eval.components,
        tau: (doubled[0] / 2) as u64,
        formulas_agreed: true,
        epsilon_used: eval.epsilon_used,
        retries: eval.retries,
        evaluations: eval.evaluations(),
        analytic_degenerate: eval.analytic,
    })
}

pub fn tau_with(s: Natural, opts: &EvalOptions) -> Result<TauReport, DivisorError> {
    tau_from_evaluation(&evaluate_components(s, opts)?)
}

/// `τ(s)` by the contour pipeline.
pub fn tau(s: Natural, config: &QuadratureConfig) -> Result<TauReport, DivisorError> {
    tau_with(s, &EvalOptions::from(*config))
}

/// Evaluates `τ+(p)` on `L+` alone.
pub fn prime_residue(p: Natural, opts: &EvalOptions) -> Result<PrimeReport, DivisorError> {
    if p.get() < 2 {
        return Err(CoreError::InvalidArgument(format!("primality needs p >= 2, got {p}")).into());
    }
    let (eval, epsilon_used, retries) = with_retries(p, opts, |eps| {
        evaluate_contour(p, ContourKind::Plus, eps, opts)
    })?;
    Ok(PrimeReport {
        p,
        is_prime: eval.count == 1,
        tau_plus: eval.count,
        evaluations: eval.evaluations(),
        quadrature: eval.quadrature,
        winding: eval.winding,
        epsilon_used,
        retries,
    })
}

/// `true` exactly when the `L+` residue equals one.
pub fn is_prime_via_residue(p: Natural, config: &QuadratureConfig) -> Result<bool, DivisorError> {
    Ok(prime_residue(p, &EvalOptions::from(*config))?.is_prime)
}
