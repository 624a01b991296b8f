use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use divres::analytic::eval_f;
use divres::batch::{self, ScanRow};
use divres::contour::{build_contour, default_epsilon, ContourGeometry};
use divres::divisor::{prime_residue, tau_with, PrimeReport};
use divres::{ComplexValue, ContourKind, CoreError, TauReport};

use super::render::{csv_line, svg_polyline, write_json};
use super::{
    natural, warn_wide_epsilon, Context, Failure, Format, EXIT_COMPOSITE, EXIT_FAILURE,
    EXIT_MISMATCH, EXIT_OK,
};

#[derive(Serialize)]
struct TauDocument<'a> {
    #[serde(flatten)]
    report: &'a TauReport,
    wall_time_s: f64,
}

pub fn tau(ctx: &mut Context, s: u64) -> Result<i32, Failure> {
    let s = natural(s)?;
    let opts = ctx.eval_options()?;
    warn_wide_epsilon(ctx, s);
    let started = Instant::now();
    let report = tau_with(s, &opts).map_err(Failure::runtime)?;
    let wall = started.elapsed().as_secs_f64();
    let c = report.components;
    match ctx.format {
        Format::Human => {
            let out = ctx.out();
            writeln!(out, "s = {}", report.s)?;
            writeln!(out, "tau = {}", report.tau)?;
            writeln!(
                out,
                "components: tau- = {}, tau_c = {}, tau+ = {}",
                c.tau_minus, c.tau_center, c.tau_plus
            )?;
            if report.analytic_degenerate {
                writeln!(
                    out,
                    "analytic-degenerate: L- has zero width, components taken in closed form"
                )?;
            }
            writeln!(
                out,
                "epsilon = {:e} (retries: {})",
                report.epsilon_used, report.retries
            )?;
            writeln!(out, "evaluations = {}", report.evaluations)?;
            writeln!(out, "wall time = {wall:.3} s")?;
        }
        Format::Json => write_json(
            ctx.out(),
            &TauDocument {
                report: &report,
                wall_time_s: wall,
            },
        )?,
        Format::Csv => {
            let out = ctx.out();
            writeln!(out, "s,tau,tau_minus,tau_center,tau_plus,epsilon,retries,evaluations,analytic_degenerate,wall_time_s")?;
            csv_line(
                out,
                &[
                    report.s.to_string(),
                    report.tau.to_string(),
                    c.tau_minus.to_string(),
                    c.tau_center.to_string(),
                    c.tau_plus.to_string(),
                    format!("{:e}", report.epsilon_used),
                    report.retries.to_string(),
                    report.evaluations.to_string(),
                    report.analytic_degenerate.to_string(),
                    format!("{wall:.6}"),
                ],
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PrimeDocument<'a> {
    #[serde(flatten)]
    report: &'a PrimeReport,
    wall_time_s: f64,
}

pub fn prime(ctx: &mut Context, p: u64) -> Result<i32, Failure> {
    let n = natural(p)?;
    if p < 2 {
        return Err(Failure::usage(format!("prime needs p >= 2, got {p}")));
    }
    let opts = ctx.eval_options()?;
    warn_wide_epsilon(ctx, n);
    let started = Instant::now();
    let report = prime_residue(n, &opts).map_err(Failure::runtime)?;
    let wall = started.elapsed().as_secs_f64();
    let verdict = if report.is_prime {
        "prime"
    } else {
        "composite"
    };
    let q = &report.quadrature;
    match ctx.format {
        Format::Human => {
            let out = ctx.out();
            writeln!(out, "{p} is {verdict}")?;
            writeln!(out, "tau+ = {}", report.tau_plus)?;
            writeln!(
                out,
                "L+ residue = {:.12} {:+.3e}i (residual {:.3e})",
                q.raw.re, q.raw.im, q.residual
            )?;
            writeln!(
                out,
                "winding = {:.12} (residual {:.3e})",
                report.winding.raw.re, report.winding.residual
            )?;
            writeln!(
                out,
                "epsilon = {:e} (retries: {})",
                report.epsilon_used, report.retries
            )?;
            writeln!(out, "evaluations = {}", report.evaluations)?;
            writeln!(out, "wall time = {wall:.3} s")?;
        }
        Format::Json => write_json(
            ctx.out(),
            &PrimeDocument {
                report: &report,
                wall_time_s: wall,
            },
        )?,
        Format::Csv => {
            let out = ctx.out();
            writeln!(out, "p,verdict,tau_plus,residue_re,residue_im,residual,winding,epsilon,retries,evaluations,wall_time_s")?;
            csv_line(
                out,
                &[
                    p.to_string(),
                    verdict.to_string(),
                    report.tau_plus.to_string(),
                    format!("{:.15}", q.raw.re),
                    format!("{:e}", q.raw.im),
                    format!("{:e}", q.residual),
                    format!("{:.15}", report.winding.raw.re),
                    format!("{:e}", report.epsilon_used),
                    report.retries.to_string(),
                    report.evaluations.to_string(),
                    format!("{wall:.6}"),
                ],
            )?;
        }
    }
    Ok(if report.is_prime {
        EXIT_OK
    } else {
        EXIT_COMPOSITE
    })
}

fn row_mismatch(row: &ScanRow) -> bool {
    row.error.is_none() && (!row.matches || row.prime_residue != Some(row.prime_trial))
}

pub fn scan(ctx: &mut Context, start: u64, end: u64) -> Result<i32, Failure> {
    if start == 0 || start > end {
        return Err(Failure::usage(format!(
            "scan needs 1 <= start <= end, got {start} {end}"
        )));
    }
    let opts = ctx.eval_options()?;
    warn_wide_epsilon(ctx, natural(end)?);
    let started = Instant::now();
    let rows = batch::scan(start, end, &opts).map_err(Failure::usage)?;
    let wall = started.elapsed().as_secs_f64();
    let mismatches = rows.iter().filter(|r| row_mismatch(r)).count();
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    let evaluations: u64 = rows.iter().map(|r| r.evaluations).sum();
    let opt = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    let opt_bool = |v: Option<bool>| v.map_or_else(|| "-".to_string(), |v| v.to_string());

    match ctx.format {
        Format::Human => {
            let out = ctx.out();
            writeln!(
                out,
                "{:>8} {:>6} {:>6} {:>6} {:>9} {:>9}",
                "s", "tau", "sigma0", "match", "prime_res", "prime_div"
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{:>8} {:>6} {:>6} {:>6} {:>9} {:>9}{}",
                    r.s,
                    opt(r.tau),
                    r.sigma0,
                    if row_mismatch(r) {
                        "NO"
                    } else if r.error.is_some() {
                        "-"
                    } else {
                        "yes"
                    },
                    opt_bool(r.prime_residue),
                    r.prime_trial,
                    r.error
                        .as_deref()
                        .map(|e| format!("  error: {e}"))
                        .unwrap_or_default()
                )?;
            }
            writeln!(
                out,
                "{} values, {mismatches} mismatches, {failures} failures, {evaluations} evaluations, {wall:.3} s",
                rows.len()
            )?;
        }
        Format::Json => write_json(
            ctx.out(),
            &json!({
                "start": start,
                "end": end,
                "rows": rows,
                "mismatches": mismatches,
                "failures": failures,
                "evaluations": evaluations,
                "wall_time_s": wall,
            }),
        )?,
        Format::Csv => {
            let out = ctx.out();
            writeln!(
                out,
                "s,tau,sigma0,match,prime_residue,prime_trial,evaluations,error"
            )?;
            for r in &rows {
                csv_line(
                    out,
                    &[
                        r.s.to_string(),
                        opt(r.tau),
                        r.sigma0.to_string(),
                        (!row_mismatch(r) && r.error.is_none()).to_string(),
                        opt_bool(r.prime_residue),
                        r.prime_trial.to_string(),
                        r.evaluations.to_string(),
                        r.error.clone().unwrap_or_default(),
                    ],
                )?;
            }
        }
    }
    if failures > 0 {
        eprintln!("error: {failures} evaluations failed");
        Ok(EXIT_FAILURE)
    } else if mismatches > 0 {
        eprintln!("error: {mismatches} values disagree with trial division");
        Ok(EXIT_MISMATCH)
    } else {
        Ok(EXIT_OK)
    }
}

/// `x = from + k/density` for `k = 0, 1, …` up to `to`.
pub fn sample_points(from: f64, to: f64, density: f64) -> Vec<f64> {
    let n = ((to - from) * density + 1e-9).floor() as u64;
    (0..=n).map(|k| from + k as f64 / density).collect()
}

pub fn plot_f(
    ctx: &mut Context,
    s: u64,
    from: Option<f64>,
    to: Option<f64>,
    svg: Option<&Path>,
) -> Result<i32, Failure> {
    let s = natural(s)?;
    let from = from.unwrap_or(1.0);
    let to = to.unwrap_or(s.as_f64());
    if !(from.is_finite() && to.is_finite() && from > 0.0 && from <= to) {
        return Err(Failure::usage(format!(
            "plot-f needs 0 < from <= to, got {from} {to}"
        )));
    }
    let density = ctx.density.unwrap_or(100) as f64;
    // |f_s| oscillates with local frequency s/x² + 1; the fastest point is x = from
    let needed = 4.0 * s.as_f64() / (from * from);
    if density < needed {
        eprintln!(
            "warning: density {density} undersamples the oscillations of |f_{s}| near x = {from} (needs at least {needed:.0} per unit)"
        );
    }
    if density < 10.0 {
        eprintln!("warning: density {density} is below 10 samples per unit");
    }
    let xs = sample_points(from, to, density);
    let mut samples = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = eval_f(s, ComplexValue::new(x, 0.0)).map_err(Failure::runtime)?;
        samples.push((x, v.norm()));
    }
    match ctx.format {
        Format::Json => write_json(
            ctx.out(),
            &json!({
                "s": s,
                "from": from,
                "to": to,
                "density": density,
                "samples": samples.iter().map(|&(x, abs_f)| json!({"x": x, "abs_f": abs_f})).collect::<Vec<_>>(),
            }),
        )?,
        Format::Human | Format::Csv => {
            let out = ctx.out();
            writeln!(out, "x,abs_f")?;
            for (x, a) in &samples {
                writeln!(out, "{x},{a:e}")?;
            }
        }
    }
    if let Some(path) = svg {
        std::fs::write(path, svg_polyline(&samples, &format!("|f_{s}(x)|")))
            .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
#[serde(untagged)]
enum ContourEntry {
    Built(ContourGeometry),
    Degenerate {
        kind: ContourKind,
        s: u64,
        epsilon: f64,
        degenerate: bool,
    },
}

pub fn contours(ctx: &mut Context, s: u64) -> Result<i32, Failure> {
    let s = natural(s)?;
    let epsilon = ctx.epsilon.unwrap_or_else(|| default_epsilon(s));
    let mut entries = Vec::new();
    for kind in ContourKind::ALL {
        match build_contour(kind, s, epsilon) {
            Ok(c) => entries.push(ContourEntry::Built(c.geometry())),
            Err(CoreError::DegenerateContour { .. }) => entries.push(ContourEntry::Degenerate {
                kind,
                s: s.get(),
                epsilon,
                degenerate: true,
            }),
            Err(e) => return Err(Failure::usage(e)),
        }
    }
    match ctx.format {
        Format::Human | Format::Json => write_json(
            ctx.out(),
            &json!({ "s": s, "epsilon": epsilon, "sqrt_s": s.sqrt(), "contours": entries }),
        )?,
        Format::Csv => {
            let out = ctx.out();
            writeln!(out, "kind,x_lo,x_hi,y_lo,y_hi,orientation,degenerate")?;
            for e in &entries {
                match e {
                    ContourEntry::Built(g) => writeln!(
                        out,
                        "{},{},{},{},{},{},false",
                        g.kind.name(),
                        g.x_range[0],
                        g.x_range[1],
                        g.y_range[0],
                        g.y_range[1],
                        g.orientation
                    )?,
                    ContourEntry::Degenerate { kind, .. } => {
                        writeln!(out, "{},,,,,,true", kind.name())?
                    }
                }
            }
        }
    }
    Ok(EXIT_OK)
}

/// `start·10^(k/per_decade)` rounded and deduplicated, capped at and ending
/// with `end`.
pub fn bench_points(start: u64, end: u64, per_decade: u32) -> Vec<u64> {
    let mut points = Vec::new();
    let mut k = 0;
    loop {
        let v = (start as f64 * 10f64.powf(k as f64 / per_decade as f64)).round() as u64;
        if v > end {
            break;
        }
        if points.last() != Some(&v) {
            points.push(v);
        }
        k += 1;
    }
    if points.last() != Some(&end) {
        points.push(end);
    }
    points
}

#[derive(Serialize)]
struct BenchRow {
    s: u64,
    tau: Option<u64>,
    evaluations: u64,
    wall_time_s: f64,
    error: Option<String>,
}

/// Least-squares slope of `ln evaluations` against `ln s`.
fn log_log_slope(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error.is_none() && r.evaluations > 0)
        .map(|r| ((r.s as f64).ln(), (r.evaluations as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn bench(ctx: &mut Context, start: u64, end: u64, per_decade: u32) -> Result<i32, Failure> {
    if start == 0 || start > end {
        return Err(Failure::usage(format!(
            "bench needs 1 <= start <= end, got {start} {end}"
        )));
    }
    let opts = ctx.eval_options()?;
    warn_wide_epsilon(ctx, natural(end)?);
    let mut rows = Vec::new();
    for s in bench_points(start, end, per_decade) {
        let started = Instant::now();
        let outcome = tau_with(natural(s)?, &opts);
        let wall = started.elapsed().as_secs_f64();
        rows.push(match outcome {
            Ok(r) => BenchRow {
                s,
                tau: Some(r.tau),
                evaluations: r.evaluations,
                wall_time_s: wall,
                error: None,
            },
            Err(e) => BenchRow {
                s,
                tau: None,
                evaluations: 0,
                wall_time_s: wall,
                error: Some(e.to_string()),
            },
        });
    }
    let slope = log_log_slope(&rows);
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    match ctx.format {
        Format::Human => {
            let out = ctx.out();
            writeln!(
                out,
                "{:>10} {:>6} {:>14} {:>12} {:>14}",
                "s", "tau", "evaluations", "wall_s", "evals/s"
            )?;
            for r in &rows {
                let tau = r.tau.map_or_else(|| "-".into(), |t| t.to_string());
                writeln!(
                    out,
                    "{:>10} {:>6} {:>14} {:>12.4} {:>14.1}{}",
                    r.s,
                    tau,
                    r.evaluations,
                    r.wall_time_s,
                    r.evaluations as f64 / r.s as f64,
                    r.error
                        .as_deref()
                        .map(|e| format!("  error: {e}"))
                        .unwrap_or_default()
                )?;
            }
            if let Some(k) = slope {
                writeln!(out, "evaluations ~ s^{k:.2}")?;
            }
        }
        Format::Json => write_json(ctx.out(), &json!({ "rows": rows, "log_log_slope": slope }))?,
        Format::Csv => {
            let out = ctx.out();
            writeln!(out, "s,tau,evaluations,wall_time_s,error")?;
            for r in &rows {
                csv_line(
                    out,
                    &[
                        r.s.to_string(),
                        r.tau.map_or_else(String::new, |t| t.to_string()),
                        r.evaluations.to_string(),
                        format!("{:.6}", r.wall_time_s),
                        r.error.clone().unwrap_or_default(),
                    ],
                )?;
            }
        }
    }
    Ok(if failures > 0 { EXIT_FAILURE } else { EXIT_OK })
}
