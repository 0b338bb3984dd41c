use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{CommandFactory, Parser, Subcommand};

use crate::error::Error;
use crate::explorer::config::{config_file_args, ExperimentConfig, ExperimentKind, Functional};
use crate::explorer::run;

/// Numerical experiments on quasi-convex and p-convex bodies.
#[derive(Debug, Parser)]
#[command(name = "qclab", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo estimate of one functional of a body.
    Estimate(Args),
    /// Covering counts of `--outer` by translates of `t·inner`.
    Cover(Args),
    /// Failure rate of two-sided norm concentration under random projections.
    Jl(Args),
    /// Gauge lower bounds on random sections.
    Section(Args),
    /// Containment of the projected euclidean ball in the projected body.
    Project(Args),
    /// Containment of the euclidean ball in `K + UK` for random rotations `U`.
    Global(Args),
    /// Mean norm against mean width for ℓ₁ balls.
    L1(Args),
    /// Projection containment from covering numbers and entropy numbers.
    Fact(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// Flat `key = value` file whose keys mirror these flags; flags given on the
    /// command line take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Body descriptor, e.g. `lp(p=0.5,n=6)`, `ellipsoid(diag=1,2)`, `scale(lp(p=1,n=3),2)`.
    #[arg(long)]
    body: Option<String>,
    /// Body being covered.
    #[arg(long)]
    outer: Option<String>,
    /// Body whose translates cover.
    #[arg(long)]
    inner: Option<String>,
    #[arg(long, value_enum, ignore_case = true)]
    functional: Option<Functional>,
    /// Dimension(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Rank(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Section proportion(s) in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Distortion(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    /// Covering radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Exponent for `ctheta`.
    #[arg(long)]
    theta: Option<f64>,
    /// Number of points in the concentration experiment.
    #[arg(long)]
    points: Option<usize>,
    /// Monte Carlo sample size.
    #[arg(long)]
    samples: Option<usize>,
    /// Independent trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Size of the uniform point cloud of the body.
    #[arg(long)]
    cloud: Option<usize>,
    /// Number of probe directions.
    #[arg(long)]
    directions: Option<usize>,
    /// Half-angle of the radial cones, in radians.
    #[arg(long)]
    cone: Option<f64>,
    /// Constant `c` in `γ = c·√α`.
    #[arg(long)]
    fact_c: Option<f64>,
    /// Bracket width for entropy-number bisection.
    #[arg(long)]
    tol: Option<f64>,
    /// Use the transposed rotation.
    #[arg(long)]
    transpose_u: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text file receiving the covering centers.
    #[arg(long)]
    centers_out: Option<PathBuf>,
}

impl Args {
    fn into_config(self, experiment: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(experiment);
        c.body = self.body;
        c.outer = self.outer;
        c.inner = self.inner;
        c.functional = self.functional;
        c.n = self.n;
        c.k = self.k;
        c.lambda = self.lambda;
        c.epsilon = self.epsilon;
        c.t = self.t;
        c.theta = self.theta;
        c.points = self.points.unwrap_or(c.points);
        c.samples = self.samples.unwrap_or(c.samples);
        c.trials = self.trials.unwrap_or(c.trials);
        c.cloud = self.cloud.unwrap_or(c.cloud);
        c.directions = self.directions.unwrap_or(c.directions);
        c.cone = self.cone.unwrap_or(c.cone);
        c.fact_c = self.fact_c.unwrap_or(c.fact_c);
        c.tol = self.tol.unwrap_or(c.tol);
        c.transpose_u = self.transpose_u;
        c.seed = self.seed;
        c.out = self.out;
        c.centers_out = self.centers_out;
        c
    }
}

fn parse_config(args: Vec<String>) -> Result<ExperimentConfig, String> {
    let cli = Cli::try_parse_from(expand_config(args)?).map_err(|e| e.render().to_string())?;
    let (kind, args) = match cli.command {
        Command::Estimate(a) => (ExperimentKind::Estimate, a),
        Command::Cover(a) => (ExperimentKind::Cover, a),
        Command::Jl(a) => (ExperimentKind::Jl, a),
        Command::Section(a) => (ExperimentKind::SectionDiameter, a),
        Command::Project(a) => (ExperimentKind::ProjectionContainment, a),
        Command::Global(a) => (ExperimentKind::GlobalForm, a),
        Command::L1(a) => (ExperimentKind::L1Compare, a),
        Command::Fact(a) => (ExperimentKind::FactCheck, a),
    };
    let cfg = args.into_config(kind);
    let usage = || Cli::command().render_usage().to_string();
    cfg.validate().map_err(|e| format!("error: {e}\n\n{}", usage()))?;
    for desc in [&cfg.body, &cfg.outer, &cfg.inner].into_iter().flatten() {
        crate::bodies::parse_body::<f64>(desc).map_err(|e| format!("error: {e}\n\n{}", usage()))?;
    }
    Ok(cfg)
}

/// Replaces `--config FILE` by the flags it contains, placed before the other flags
/// so that explicit flags win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let (path, consumed) = match args[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (args.get(pos + 1).cloned().ok_or("error: --config needs a file")?, 2),
    };
    let expanded = config_file_args(std::path::Path::new(&path)).map_err(|e| format!("error: {e}"))?;
    let mut out: Vec<String> = Vec::with_capacity(args.len() + expanded.len());
    let insert_at = 2.min(args.len());
    for (i, a) in args.iter().enumerate() {
        if i == insert_at {
            out.extend(expanded.iter().cloned());
        }
        if i >= pos && i < pos + consumed {
            continue;
        }
        out.push(a.clone());
    }
    if insert_at >= args.len() {
        out.extend(expanded);
    }
    Ok(out)
}

fn worker_count() -> Result<Option<usize>, String> {
    match std::env::var("QCLAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("error: QCLAB_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

/// Parses `argv` (program name first), runs the experiment, writes the CSV, and
/// returns the process exit code: 0 on success, 2 on configuration errors, 1 on
/// runtime errors.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString>,
{
    let args: Vec<String> = argv.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cfg = match parse_config(args) {
        Ok(c) => c,
        Err(msg) => {
            let help = msg.contains("Usage:") && !msg.starts_with("error");
            if help {
                print!("{msg}");
                return 0;
            }
            eprintln!("{}", msg.trim_end());
            return 2;
        }
    };
    let threads = match worker_count() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("{msg}");
            return 2;
        }
    };
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cfg)),
            Err(e) => {
                eprintln!("error: cannot start worker pool: {e}");
                return 1;
            }
        },
        None => run(&cfg),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::InvalidParameter(_) | Error::Parse(_) => 2,
                _ => 1,
            };
        }
    };
    let written = match &cfg.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|f| report.write_csv(std::io::BufWriter::new(f))),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            report.write_csv(&mut lock).and_then(|_| lock.flush().map_err(Error::from))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    eprintln!("{}", report.summary);
    0
}
