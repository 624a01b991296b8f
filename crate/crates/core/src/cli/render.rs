use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

pub fn write_json(out: &mut dyn Write, value: &impl Serialize) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

/// Joins fields with commas, quoting any that need it.
pub fn csv_line(out: &mut dyn Write, fields: &[String]) -> io::Result<()> {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    writeln!(out, "{}", quoted.join(","))
}

/// Single-polyline chart of `(x, y)` samples.
pub fn svg_polyline(samples: &[(f64, f64)], title: &str) -> String {
    const W: f64 = 800.0;
    const H: f64 = 300.0;
    const PAD: f64 = 20.0;
    let (x0, x1) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    let y1 = samples
        .iter()
        .fold(0.0f64, |hi, &(_, y)| hi.max(y))
        .max(f64::MIN_POSITIVE);
    let xspan = if x1 > x0 { x1 - x0 } else { 1.0 };
    let mut points = String::new();
    for &(x, y) in samples {
        let px = PAD + (x - x0) / xspan * (W - 2.0 * PAD);
        let py = H - PAD - y / y1 * (H - 2.0 * PAD);
        let _ = write!(points, "{px:.2},{py:.2} ");
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n\
         <title>{title}</title>\n\
         <polyline fill=\"none\" stroke=\"black\" points=\"{}\"/>\n\
         </svg>\n",
        points.trim_end()
    )
}
