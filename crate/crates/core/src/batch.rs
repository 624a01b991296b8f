//! Range scans, parallel across `s` with the `parallel` feature.
//!
//! Results are returned in ascending `s` regardless of completion order.

use serde::{Deserialize, Serialize};

use crate::analytic::Natural;
use crate::divisor::{tau_with, EvalOptions, TauReport};
use crate::error::CoreError;
use crate::oracle;

/// One scanned value compared against trial division.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: u64,
    pub tau: Option<u64>,
    pub sigma0: u64,
    pub matches: bool,
    /// `τ+(s) = 1` from the contour pipeline.
    pub prime_residue: Option<bool>,
    pub prime_trial: bool,
    pub evaluations: u64,
    pub error: Option<String>,
}

impl ScanRow {
    fn from_outcome(s: u64, outcome: Result<TauReport, String>) -> Self {
        let sigma0 = oracle::sigma0(s);
        let prime_trial = oracle::is_prime_trial(s);
        match outcome {
            Ok(report) => ScanRow {
                s,
                tau: Some(report.tau),
                sigma0,
                matches: report.tau == sigma0,
                // τ+ = 1 is the primality condition; s = 1 has τ+ = 2
                prime_residue: Some(report.components.tau_plus == 1),
                prime_trial,
                evaluations: report.evaluations,
                error: None,
            },
            Err(error) => ScanRow {
                s,
                tau: None,
                sigma0,
                matches: false,
                prime_residue: None,
                prime_trial,
                evaluations: 0,
                error: Some(error),
            },
        }
    }
}

fn scan_one(s: u64, max: u64, opts: &EvalOptions) -> ScanRow {
    let outcome = Natural::with_max(s, max)
        .map_err(|e| e.to_string())
        .and_then(|n| tau_with(n, opts).map_err(|e| e.to_string()));
    ScanRow::from_outcome(s, outcome)
}

fn check_range(start: u64, end: u64) -> Result<(), CoreError> {
    if start == 0 || start > end {
        return Err(CoreError::InvalidArgument(format!(
            "invalid range {start}..={end}"
        )));
    }
    Ok(())
}

pub fn scan_sequential(
    start: u64,
    end: u64,
    opts: &EvalOptions,
) -> Result<Vec<ScanRow>, CoreError> {
    check_range(start, end)?;
    let max = end.max(crate::analytic::DEFAULT_MAX_NATURAL);
    Ok((start..=end).map(|s| scan_one(s, max, opts)).collect())
}

#[cfg(feature = "parallel")]
pub fn scan_parallel(start: u64, end: u64, opts: &EvalOptions) -> Result<Vec<ScanRow>, CoreError> {
    use rayon::prelude::*;
    check_range(start, end)?;
    let max = end.max(crate::analytic::DEFAULT_MAX_NATURAL);
    Ok((start..=end)
        .into_par_iter()
        .map(|s| scan_one(s, max, opts))
        .collect())
}

/// [`scan_parallel`] when built with `parallel`, otherwise [`scan_sequential`].
pub fn scan(start: u64, end: u64, opts: &EvalOptions) -> Result<Vec<ScanRow>, CoreError> {
    #[cfg(feature = "parallel")]
    {
        scan_parallel(start, end, opts)
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_sequential(start, end, opts)
    }
}

/// Maps `f` over `items`, in parallel when the feature is enabled, keeping order.
pub fn map_ordered<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
