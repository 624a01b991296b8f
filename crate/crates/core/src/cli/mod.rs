//! Argument parsing and dispatch for the `divres` binary.

mod commands;
mod render;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use divres::contour::{default_epsilon, MAX_EPSILON};
use divres::{EvalOptions, Natural, QuadratureConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_COMPOSITE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "divres",
    version,
    about = "Divisor counts and primality from contour residues of exp(2πiz) + exp(2πis/z) − 2"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Contour half-height; defaults to min(1/4, 1/(4s³)).
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub parallel: Option<u32>,
    /// Samples per unit length: plot-f sampling (default 100) or contour
    /// validation (default 64, minimum 64).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub density: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// τ(s) with its three contour components.
    Tau { s: u64 },
    /// Primality from the L+ residue alone; exits 3 on composites.
    Prime { p: u64 },
    /// τ over a range compared with trial division; exits 4 on any mismatch.
    Scan { start: u64, end: u64 },
    /// Samples of |f_s(x)| on the real axis.
    PlotF {
        s: u64,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        /// Also write a polyline chart.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Corner coordinates of L−, Lc and L+.
    Contours { s: u64 },
    /// Evaluation counts and wall time at logarithmically spaced s.
    Bench {
        start: u64,
        end: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=100))]
        per_decade: u32,
    },
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    pub fn runtime(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::runtime(format!("I/O error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::runtime(format!("serialization error: {e}"))
    }
}

pub struct Context {
    pub format: Format,
    pub epsilon: Option<f64>,
    pub tolerance: Option<f64>,
    pub density: Option<u32>,
    out: Box<dyn Write + Send>,
}

impl Context {
    fn new(global: &GlobalArgs) -> Result<Self, Failure> {
        if let Some(eps) = global.epsilon {
            if !(eps > 0.0 && eps <= MAX_EPSILON) {
                return Err(Failure::usage(format!(
                    "--epsilon must lie in (0, {MAX_EPSILON}], got {eps}"
                )));
            }
        }
        if let Some(tol) = global.tolerance {
            if !(tol > 0.0 && tol < 0.25) {
                return Err(Failure::usage(format!(
                    "--tolerance must lie in (0, 0.25), got {tol}"
                )));
            }
        }
        let out: Box<dyn Write + Send> = match &global.output {
            Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
                Failure::runtime(format!("cannot create {}: {e}", path.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Context {
            format: global.format,
            epsilon: global.epsilon,
            tolerance: global.tolerance,
            density: global.density,
            out,
        })
    }

    pub fn out(&mut self) -> &mut dyn Write {
        &mut self.out
    }

    pub fn eval_options(&self) -> Result<EvalOptions, Failure> {
        let mut quadrature = QuadratureConfig::default();
        if let Some(tol) = self.tolerance {
            quadrature.abs_tolerance = tol;
        }
        let validation_density = match self.density {
            Some(d) if d < 64 => {
                return Err(Failure::usage(format!(
                    "--density must be at least 64 for contour validation, got {d}"
                )))
            }
            Some(d) => d as usize,
            None => 64,
        };
        Ok(EvalOptions {
            quadrature,
            epsilon: self.epsilon,
            validation_density,
            ..EvalOptions::default()
        })
    }
}

/// Warns when an explicit `--epsilon` is wider than the default for `s_max`;
/// such rectangles can enclose non-real zeros and still give consistent counts.
pub fn warn_wide_epsilon(ctx: &Context, s_max: Natural) {
    if let Some(eps) = ctx.epsilon {
        let safe = default_epsilon(s_max);
        if eps > safe {
            eprintln!("warning: --epsilon {eps} exceeds {safe:e} for s = {s_max}; non-real zeros may be counted");
        }
    }
}

pub fn natural(value: u64) -> Result<Natural, Failure> {
    Natural::new(value).map_err(Failure::usage)
}

fn dispatch(command: &Command, ctx: &mut Context) -> Result<i32, Failure> {
    match command {
        Command::Tau { s } => commands::tau(ctx, *s),
        Command::Prime { p } => commands::prime(ctx, *p),
        Command::Scan { start, end } => commands::scan(ctx, *start, *end),
        Command::PlotF { s, from, to, svg } => {
            commands::plot_f(ctx, *s, *from, *to, svg.as_deref())
        }
        Command::Contours { s } => commands::contours(ctx, *s),
        Command::Bench {
            start,
            end,
            per_decade,
        } => commands::bench(ctx, *start, *end, *per_decade),
    }
}

fn run_in_pool(
    threads: Option<u32>,
    job: impl FnOnce() -> Result<i32, Failure> + Send,
) -> Result<i32, Failure> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| Failure::runtime(format!("cannot start {n} workers: {e}")))?;
        return pool.install(job);
    }
    #[cfg(not(feature = "parallel"))]
    if threads.is_some_and(|n| n > 1) {
        eprintln!("warning: built without the `parallel` feature; --parallel is ignored");
    }
    job()
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = Context::new(&cli.global).and_then(|ctx| {
        let command = cli.command;
        run_in_pool(cli.global.parallel, move || {
            let mut ctx = ctx;
            let code = dispatch(&command, &mut ctx)?;
            ctx.out().flush()?;
            Ok(code)
        })
    });
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}
