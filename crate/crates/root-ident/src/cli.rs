//! Command-line front end: parses experiment configurations, dispatches to
//! the library modules, and emits reproducible tabular artifacts.
//!
//! Every artifact is delimiter-separated values prefixed by `#` comment
//! lines that record the full configuration (including an `argv:` line that
//! reproduces the run and the seed when randomness is involved). Re-running
//! the recorded argv regenerates the artifact bit-identically apart from
//! the timestamp comment, regardless of worker thread count.
//!
//! Exit codes: 0 success, 2 parameter-domain violation, 3 computation
//! failure (search cap, zero derivative, divergence), 4 I/O failure.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::bounds::{self, BoundResult, BoundStatus, CurveConfig};
use crate::error::{Error, Result};
use crate::idcodes;
use crate::idtests::{IdentTest, RegionKind, ThreeErrorSpec, TwoErrorSpec};
use crate::model::UniformRootModel;
use crate::montecarlo::{self, MeasureReport, SweepReport};
use crate::rootfind::{self, StepSchedule};

#[derive(Debug, Parser)]
#[command(
    name = "root-ident",
    version,
    about = "Root identification laboratory: observation bounds, interval tests, Monte Carlo verification"
)]
pub struct Cli {
    /// Write the artifact to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for Monte Carlo trials (0 = library default). Trial
    /// seeding is counter-based, so results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an observation-count lower bound (or compare two of them).
    Bounds(BoundsArgs),
    /// Emit lower-bound curves over a lambda grid.
    Curves(CurvesArgs),
    /// Monte Carlo error estimation for a concrete test.
    Simulate(SimulateArgs),
    /// Empirical box-measure inequality checks for the three-error test.
    Verify(VerifyArgs),
    /// Root computation with trajectory export.
    Rootfind(RootfindArgs),
    /// Coloring-code construction and pairwise overlap statistics.
    Idcodes(IdcodesArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Two-error bound from eps, delta, lambda.
    #[arg(long)]
    pub two_error: bool,
    /// Three-error bound from eps1, eps2, delta, lambda.
    #[arg(long)]
    pub three_error: bool,
    /// Degenerate three-error bound with the inner gap closed (eps1 = 0).
    #[arg(long)]
    pub eps1_zero: bool,
    /// Compare the two-error and the new bound over a lambda grid.
    #[arg(long)]
    pub compare: bool,

    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Inclusive lambda grid start:stop:step (compare mode).
    #[arg(long, value_name = "START:STOP:STEP")]
    pub lambda_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Inclusive lambda grid start:stop:step.
    #[arg(long, value_name = "START:STOP:STEP")]
    pub lambda_grid: String,
    /// eps/(2 delta) shorthand; sets delta = 0.5 so eps equals the ratio.
    #[arg(long, conflicts_with = "eps")]
    pub eps_ratio: Option<f64>,
    #[arg(long, conflicts_with = "eps1")]
    pub eps1_ratio: Option<f64>,
    #[arg(long, conflicts_with = "eps2")]
    pub eps2_ratio: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Inner gap of the new bound; defaults to 0 (closed-form degenerate bound).
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Outer gap of the new bound; defaults to eps.
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Test family: two | three.
    #[arg(long, value_parser = ["two", "three"])]
    pub test: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps1: Option<f64>,
    #[arg(long)]
    pub eps2: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Observation count (ignored with --achievable).
    #[arg(long)]
    pub n: Option<usize>,
    /// Uniform error budget for all regions.
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub lambda3: Option<f64>,
    /// Region to probe: target | reject | ring.
    #[arg(long, value_parser = ["target", "reject", "ring"])]
    pub region: Option<String>,
    /// Probe a single root position instead of sweeping the region.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Search the smallest n meeting --lambda-target across all regions.
    #[arg(long)]
    pub achievable: bool,
    #[arg(long)]
    pub lambda_target: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub search_cap: usize,
    #[arg(long, default_value_t = 9)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long)]
    pub eps1: f64,
    #[arg(long)]
    pub eps2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long)]
    pub lambda3: Option<f64>,
    /// Comma-separated probe positions; defaults to the four adjacent
    /// points a, a-eps1, a-eps2+eps1, a-eps2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct RootfindArgs {
    #[command(subcommand)]
    pub method: RootfindMethod,
}

#[derive(Debug, Subcommand)]
pub enum RootfindMethod {
    /// Tangent-line iteration on a polynomial.
    Newton {
        /// Polynomial coefficients, ascending powers (e.g. -2,0,1 for x^2 - 2).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        poly: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x1: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
    },
    /// Stochastic approximation on the uniform noisy-root model.
    RobbinsMonro {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x1: f64,
        /// Step constant for the a_k = c/k schedule.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Emit every thin-th trajectory point (start and end always kept).
        #[arg(long, default_value_t = 1)]
        thin: usize,
    },
}

#[derive(Debug, Args)]
pub struct IdcodesArgs {
    #[arg(long)]
    pub m_prime: u32,
    #[arg(long)]
    pub m_double_prime: u32,
    #[arg(long)]
    pub n_codes: u64,
    #[arg(long)]
    pub distinct: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Parses process arguments, runs the command, writes the artifact.
/// Returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    finish(&cli)
}

/// Same as [`run`] for an explicit argument vector (argv[0] included).
pub fn run_from<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => finish(&cli),
        Err(e) => {
            // clap reports usage problems on stderr with exit code 2
            let _ = e.print();
            2
        }
    }
}

fn finish(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(artifact) => match write_artifact(cli.out.as_deref(), &artifact) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: kind={} message=\"{e}\"", e.kind());
                4
            }
        },
        Err(e) => {
            eprintln!("error: kind={} message=\"{e}\"", e.kind());
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::InconsistentData(_) | Error::UndefinedLogarithm(_) => 2,
        Error::ZeroDerivative { .. } | Error::Divergence { .. } | Error::CapExhausted { .. } => 3,
        Error::Io(_) => 4,
    }
}

fn write_artifact(out: Option<&std::path::Path>, artifact: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, artifact).map_err(Error::Io),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

/// Runs the command and renders the artifact text, honoring `--threads`.
pub fn execute(cli: &Cli) -> Result<String> {
    if cli.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| dispatch(&cli.command))
    } else {
        dispatch(&cli.command)
    }
}

fn dispatch(command: &Command) -> Result<String> {
    match command {
        Command::Bounds(args) => cmd_bounds(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Rootfind(args) => cmd_rootfind(args),
        Command::Idcodes(args) => cmd_idcodes(args),
    }
}

// ---------------------------------------------------------------- artifacts

struct Artifact {
    lines: Vec<String>,
}

impl Artifact {
    fn new(command: &str, argv: &str, seed: Option<u64>) -> Self {
        let mut lines = vec![
            format!("# root-ident {command} artifact"),
            format!("# argv: {argv}"),
            match seed {
                Some(s) => format!("# seed: {s}"),
                None => "# seed: - (deterministic command)".to_string(),
            },
        ];
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        lines.push(format!("# timestamp: {stamp} (unix seconds, excluded from reproducibility comparisons)"));
        Artifact { lines }
    }

    fn note(&mut self, line: impl AsRef<str>) {
        self.lines.push(format!("# {}", line.as_ref()));
    }

    fn columns(&mut self, cols: &str) {
        self.lines.push(format!("# columns: {cols}"));
    }

    fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    fn render(self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_else(|| "-".to_string())
}

fn fmt_note(note: &Option<String>) -> String {
    match note {
        Some(n) => n.replace(',', ";"),
        None => "-".to_string(),
    }
}

/// Inclusive start:stop:step grid; endpoints hit within 1e-12.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "lambda grid must be start:stop:step, got '{spec}'"
        )));
    }
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("bad grid number '{s}'")))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid step must be positive, got {step}"
        )));
    }
    if stop < start - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "grid stop {stop} precedes start {start}"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v > stop + 1e-12 {
            break;
        }
        grid.push(v);
        k += 1;
    }
    Ok(grid)
}

// ------------------------------------------------------------------- bounds

fn bound_cells(kind: &str, args: &BoundsArgs, lambda: f64, r: &BoundResult) -> Vec<String> {
    vec![
        kind.to_string(),
        fmt_opt(args.eps),
        fmt_opt(args.eps1),
        fmt_opt(args.eps2),
        fmt_f64(args.delta),
        fmt_f64(lambda),
        fmt_f64(r.raw_value),
        r.n_min.to_string(),
        r.vacuous.to_string(),
        fmt_note(&r.domain_note),
    ]
}

fn cmd_bounds(args: &BoundsArgs) -> Result<String> {
    let selected = [args.two_error, args.three_error, args.eps1_zero, args.compare]
        .iter()
        .filter(|&&f| f)
        .count();
    if selected != 1 {
        return Err(Error::InvalidArgument(
            "select exactly one of --two-error, --three-error, --eps1-zero, --compare".into(),
        ));
    }

    let need = |value: Option<f64>, name: &str| -> Result<f64> {
        value.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required here")))
    };

    if args.compare {
        let grid_spec = args
            .lambda_grid
            .clone()
            .ok_or_else(|| Error::InvalidArgument("--compare needs --lambda-grid".into()))?;
        let grid = parse_grid(&grid_spec)?;
        let eps = need(args.eps, "eps")?;
        let eps1 = args.eps1.unwrap_or(0.0);
        let eps2 = args.eps2.unwrap_or(eps);
        let rows = bounds::compare_bounds(eps, eps1, eps2, args.delta, &grid)?;

        let argv = format!(
            "bounds --compare --eps {} --eps1 {} --eps2 {} --delta {} --lambda-grid {}",
            fmt_f64(eps),
            fmt_f64(eps1),
            fmt_f64(eps2),
            fmt_f64(args.delta),
            grid_spec
        );
        let mut art = Artifact::new("bounds", &argv, None);
        if eps1 == 0.0 && eps2 == eps {
            art.note("note: with eps1 = 0 and eps2 = eps the raw bounds cross at lambda = 1/2");
        }
        art.columns(
            "lambda,old_raw,old_min,old_vacuous,new_raw,new_min,new_vacuous,new_undefined,larger,note",
        );
        for row in rows {
            let (new_raw, new_min, new_vac, new_undef) = match &row.new {
                BoundStatus::Defined(r) => (fmt_f64(r.raw_value), r.n_min.to_string(), r.vacuous, false),
                BoundStatus::Undefined(_) => ("nan".to_string(), "0".to_string(), false, true),
            };
            art.row(&[
                fmt_f64(row.lambda),
                fmt_f64(row.old.raw_value),
                row.old.n_min.to_string(),
                row.old.vacuous.to_string(),
                new_raw,
                new_min,
                new_vac.to_string(),
                new_undef.to_string(),
                row.larger.to_string(),
                fmt_note(&row.note),
            ]);
        }
        return Ok(art.render());
    }

    let lambda = need(args.lambda, "lambda")?;
    let (kind, result, argv) = if args.two_error {
        let eps = need(args.eps, "eps")?;
        (
            "two_error",
            bounds::min_obs_two_error(eps, args.delta, lambda)?,
            format!(
                "bounds --two-error --eps {} --delta {} --lambda {}",
                fmt_f64(eps),
                fmt_f64(args.delta),
                fmt_f64(lambda)
            ),
        )
    } else if args.three_error {
        let eps1 = need(args.eps1, "eps1")?;
        let eps2 = need(args.eps2, "eps2")?;
        (
            "three_error",
            bounds::min_obs_three_error(eps1, eps2, args.delta, lambda)?,
            format!(
                "bounds --three-error --eps1 {} --eps2 {} --delta {} --lambda {}",
                fmt_f64(eps1),
                fmt_f64(eps2),
                fmt_f64(args.delta),
                fmt_f64(lambda)
            ),
        )
    } else {
        let eps2 = need(args.eps2, "eps2")?;
        (
            "eps1_zero",
            bounds::min_obs_eps1_zero(eps2, args.delta, lambda)?,
            format!(
                "bounds --eps1-zero --eps2 {} --delta {} --lambda {}",
                fmt_f64(eps2),
                fmt_f64(args.delta),
                fmt_f64(lambda)
            ),
        )
    };

    let mut art = Artifact::new("bounds", &argv, None);
    art.columns("kind,eps,eps1,eps2,delta,lambda,raw_value,n_min,vacuous,domain_note");
    art.row(&bound_cells(kind, args, lambda, &result));
    Ok(art.render())
}

// ------------------------------------------------------------------- curves

fn cmd_curves(args: &CurvesArgs) -> Result<String> {
    let ratio_mode = args.eps_ratio.is_some();
    let (eps, eps1, eps2, delta) = if ratio_mode {
        let r = args.eps_ratio.unwrap();
        let eps1 = args.eps1_ratio.unwrap_or(0.0);
        let eps2 = args.eps2_ratio.unwrap_or(r);
        (r, eps1, eps2, 0.5)
    } else {
        let eps = args
            .eps
            .ok_or_else(|| Error::InvalidArgument("need --eps or --eps-ratio".into()))?;
        let eps1 = args.eps1.unwrap_or(0.0);
        let eps2 = args.eps2.unwrap_or(eps);
        (eps, eps1, eps2, args.delta)
    };

    let grid = parse_grid(&args.lambda_grid)?;
    let config = CurveConfig {
        lambda_grid: grid,
        eps,
        eps1,
        eps2,
        delta,
    };
    let rows = bounds::bound_curves(&config)?;

    let argv = format!(
        "curves --lambda-grid {} --eps {} --eps1 {} --eps2 {} --delta {}",
        args.lambda_grid,
        fmt_f64(eps),
        fmt_f64(eps1),
        fmt_f64(eps2),
        fmt_f64(delta)
    );
    let mut art = Artifact::new("curves", &argv, None);
    art.note("n_reference: ceil(log2 of first-order raw bound), clipped at 0 -- reference curve, not from the theory");
    art.note("vacuous_flags: o = old vacuous, n = new vacuous, u = new undefined, '-' = none");
    art.columns("lambda,n_old_raw,n_old_min,n_new_raw,n_new_min,n_reference,vacuous_flags");
    for row in rows {
        let mut flags = String::new();
        if row.old_vacuous {
            flags.push('o');
        }
        if row.new_vacuous {
            flags.push('n');
        }
        if row.new_undefined {
            flags.push('u');
        }
        if flags.is_empty() {
            flags.push('-');
        }
        art.row(&[
            fmt_f64(row.lambda),
            fmt_f64(row.n_old_raw),
            row.n_old_min.to_string(),
            fmt_f64(row.n_new_raw),
            row.n_new_min.to_string(),
            row.n_reference.to_string(),
            flags,
        ]);
    }
    Ok(art.render())
}

// ----------------------------------------------------------------- simulate

enum AnyTest {
    Two(TwoErrorSpec),
    Three(ThreeErrorSpec),
}

fn parse_region(name: &str) -> Result<RegionKind> {
    match name {
        "target" => Ok(RegionKind::Target),
        "reject" => Ok(RegionKind::Reject),
        "ring" => Ok(RegionKind::Ring),
        other => Err(Error::InvalidArgument(format!("unknown region '{other}'"))),
    }
}

fn build_test(args: &SimulateArgs, n: usize) -> Result<AnyTest> {
    let l1 = args.lambda1.unwrap_or(args.lambda);
    let l2 = args.lambda2.unwrap_or(args.lambda);
    let l3 = args.lambda3.unwrap_or(args.lambda);
    match args.test.as_str() {
        "two" => {
            let eps = args
                .eps
                .ok_or_else(|| Error::InvalidArgument("two-error test needs --eps".into()))?;
            Ok(AnyTest::Two(TwoErrorSpec::new(
                args.a, args.b, eps, args.delta, n, l1, l2,
            )?))
        }
        "three" => {
            let eps1 = args
                .eps1
                .ok_or_else(|| Error::InvalidArgument("three-error test needs --eps1".into()))?;
            let eps2 = args
                .eps2
                .ok_or_else(|| Error::InvalidArgument("three-error test needs --eps2".into()))?;
            Ok(AnyTest::Three(ThreeErrorSpec::new(
                args.a, args.b, eps1, eps2, args.delta, n, l1, l2, l3,
            )?))
        }
        other => Err(Error::InvalidArgument(format!("unknown test '{other}'"))),
    }
}

fn simulate_argv(args: &SimulateArgs, n_for_argv: usize) -> String {
    let mut argv = format!("simulate --test {}", args.test);
    argv.push_str(&format!(
        " --a {} --b {}",
        fmt_f64(args.a),
        fmt_f64(args.b)
    ));
    if let Some(eps) = args.eps {
        argv.push_str(&format!(" --eps {}", fmt_f64(eps)));
    }
    if let Some(eps1) = args.eps1 {
        argv.push_str(&format!(" --eps1 {}", fmt_f64(eps1)));
    }
    if let Some(eps2) = args.eps2 {
        argv.push_str(&format!(" --eps2 {}", fmt_f64(eps2)));
    }
    argv.push_str(&format!(" --delta {}", fmt_f64(args.delta)));
    if args.achievable {
        argv.push_str(&format!(
            " --achievable --lambda-target {} --search-cap {}",
            fmt_f64(args.lambda_target.unwrap_or(args.lambda)),
            args.search_cap
        ));
    } else {
        argv.push_str(&format!(" --n {n_for_argv}"));
    }
    argv.push_str(&format!(" --lambda {}", fmt_f64(args.lambda)));
    if let Some(l) = args.lambda1 {
        argv.push_str(&format!(" --lambda1 {}", fmt_f64(l)));
    }
    if let Some(l) = args.lambda2 {
        argv.push_str(&format!(" --lambda2 {}", fmt_f64(l)));
    }
    if let Some(l) = args.lambda3 {
        argv.push_str(&format!(" --lambda3 {}", fmt_f64(l)));
    }
    if let Some(region) = &args.region {
        argv.push_str(&format!(" --region {region}"));
    }
    if let Some(kappa) = args.kappa {
        argv.push_str(&format!(" --kappa {}", fmt_f64(kappa)));
    }
    argv.push_str(&format!(
        " --grid-points {} --trials {} --seed {} --confidence {}",
        args.grid_points,
        args.trials,
        args.seed,
        fmt_f64(args.confidence)
    ));
    argv
}

fn simulate_row(
    art: &mut Artifact,
    region: RegionKind,
    kappa: f64,
    n: usize,
    budget: f64,
    est: &montecarlo::ErrorEstimate,
) {
    let pass = est.ci_hi <= budget;
    art.row(&[
        region.to_string(),
        fmt_f64(kappa),
        n.to_string(),
        est.trials.to_string(),
        est.failures.to_string(),
        fmt_f64(est.p_hat),
        fmt_f64(est.ci_lo),
        fmt_f64(est.ci_hi),
        fmt_f64(budget),
        pass.to_string(),
    ]);
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    if args.achievable {
        return cmd_achievable(args);
    }
    let n = args
        .n
        .ok_or_else(|| Error::InvalidArgument("--n is required (or use --achievable)".into()))?;
    let region_name = args
        .region
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--region is required".into()))?;
    let region = parse_region(region_name)?;
    let test = build_test(args, n)?;

    let argv = simulate_argv(args, n);
    let mut art = Artifact::new("simulate", &argv, Some(args.seed));
    art.note(format!("confidence: {}", fmt_f64(args.confidence)));
    if args.kappa.is_none() {
        art.note(format!(
            "grid_points: {} (finite grid; suprema over continuum regions are under-approximated)",
            args.grid_points
        ));
    }
    art.columns("region,kappa,n,trials,failures,p_hat,ci_lo,ci_hi,budget_lambda,pass");

    match (&test, args.kappa) {
        (AnyTest::Two(spec), Some(kappa)) => {
            let budget = spec.budget(region).unwrap_or(f64::NAN);
            let est = montecarlo::estimate_error_probability(
                spec,
                kappa,
                region,
                args.trials,
                args.seed,
                args.confidence,
            )?;
            simulate_row(&mut art, region, kappa, n, budget, &est);
        }
        (AnyTest::Three(spec), Some(kappa)) => {
            let budget = spec.budget(region).unwrap_or(f64::NAN);
            let est = montecarlo::estimate_error_probability(
                spec,
                kappa,
                region,
                args.trials,
                args.seed,
                args.confidence,
            )?;
            simulate_row(&mut art, region, kappa, n, budget, &est);
        }
        (AnyTest::Two(spec), None) => {
            let budget = spec.budget(region).unwrap_or(f64::NAN);
            let report = montecarlo::worst_case_error(
                spec,
                region,
                args.grid_points,
                args.trials,
                args.seed,
                args.confidence,
            )?;
            emit_sweep(&mut art, region, n, budget, &report);
        }
        (AnyTest::Three(spec), None) => {
            let budget = spec.budget(region).unwrap_or(f64::NAN);
            let report = montecarlo::worst_case_error(
                spec,
                region,
                args.grid_points,
                args.trials,
                args.seed,
                args.confidence,
            )?;
            emit_sweep(&mut art, region, n, budget, &report);
        }
    }
    Ok(art.render())
}

fn emit_sweep(art: &mut Artifact, region: RegionKind, n: usize, budget: f64, report: &SweepReport) {
    art.note(format!(
        "worst_kappa: {} (p_hat {})",
        fmt_f64(report.worst_kappa),
        fmt_f64(report.worst_estimate.p_hat)
    ));
    for (kappa, est) in &report.grid {
        simulate_row(art, region, *kappa, n, budget, est);
    }
}

fn cmd_achievable(args: &SimulateArgs) -> Result<String> {
    let lambda_target = args.lambda_target.unwrap_or(args.lambda);
    let family = build_test(args, 1)?;
    let found = match &family {
        AnyTest::Two(spec) => montecarlo::achievable_n(
            spec,
            lambda_target,
            args.search_cap,
            args.grid_points,
            args.trials,
            args.seed,
            args.confidence,
        )?,
        AnyTest::Three(spec) => montecarlo::achievable_n(
            spec,
            lambda_target,
            args.search_cap,
            args.grid_points,
            args.trials,
            args.seed,
            args.confidence,
        )?,
    };

    let argv = simulate_argv(args, found);
    let mut art = Artifact::new("simulate", &argv, Some(args.seed));
    art.note(format!("confidence: {}", fmt_f64(args.confidence)));
    art.note(format!(
        "grid_points: {} (finite grid; suprema over continuum regions are under-approximated)",
        args.grid_points
    ));
    art.note("achievable_n: smallest n whose worst-case CI upper bound meets lambda_target in every region");
    art.columns("test,lambda_target,search_cap,grid_points,trials,achievable_n");
    art.row(&[
        args.test.clone(),
        fmt_f64(lambda_target),
        args.search_cap.to_string(),
        args.grid_points.to_string(),
        args.trials.to_string(),
        found.to_string(),
    ]);
    Ok(art.render())
}

// ------------------------------------------------------------------- verify

fn cmd_verify(args: &VerifyArgs) -> Result<String> {
    let l1 = args.lambda1.unwrap_or(args.lambda);
    let l2 = args.lambda2.unwrap_or(args.lambda);
    let l3 = args.lambda3.unwrap_or(args.lambda);
    let spec = ThreeErrorSpec::new(
        args.a, args.b, args.eps1, args.eps2, args.delta, args.n, l1, l2, l3,
    )?;
    let points = args.c.clone().unwrap_or_else(|| {
        vec![
            args.a,
            args.a - args.eps1,
            args.a - args.eps2 + args.eps1,
            args.a - args.eps2,
        ]
    });

    let mut argv = format!(
        "verify --a {} --b {} --eps1 {} --eps2 {} --delta {} --n {} --lambda {}",
        fmt_f64(args.a),
        fmt_f64(args.b),
        fmt_f64(args.eps1),
        fmt_f64(args.eps2),
        fmt_f64(args.delta),
        args.n,
        fmt_f64(args.lambda)
    );
    if let Some(l) = args.lambda1 {
        argv.push_str(&format!(" --lambda1 {}", fmt_f64(l)));
    }
    if let Some(l) = args.lambda2 {
        argv.push_str(&format!(" --lambda2 {}", fmt_f64(l)));
    }
    if let Some(l) = args.lambda3 {
        argv.push_str(&format!(" --lambda3 {}", fmt_f64(l)));
    }
    argv.push_str(&format!(
        " --c {}",
        points
            .iter()
            .map(|c| fmt_f64(*c))
            .collect::<Vec<_>>()
            .join(",")
    ));
    argv.push_str(&format!(
        " --trials {} --seed {} --confidence {}",
        args.trials,
        args.seed,
        fmt_f64(args.confidence)
    ));

    let mut art = Artifact::new("verify", &argv, Some(args.seed));
    art.note(format!("confidence: {}", fmt_f64(args.confidence)));

    let mut reports: Vec<MeasureReport> = Vec::with_capacity(points.len());
    for &c in &points {
        reports.push(montecarlo::verify_measure_inequalities(
            &spec,
            c,
            args.trials,
            args.seed,
            args.confidence,
        )?);
    }
    if let Some(first) = reports.first() {
        for (idx, cap) in first.caps.iter().enumerate() {
            art.note(format!(
                "cap_pair_{}: lhs={} rhs={} separation={} normalized_cap={}",
                idx + 1,
                fmt_f64(cap.lhs),
                fmt_f64(cap.rhs),
                fmt_f64(cap.separation),
                fmt_f64(cap.normalized_cap)
            ));
        }
    }
    art.columns("c,region,desired_bit,trials,successes,ratio,ci_lo,ci_hi,budget,holds,holds_at_ci_lo");
    for report in &reports {
        art.row(&[
            fmt_f64(report.c),
            report.region.to_string(),
            report.desired_bit.to_string(),
            report.ratio.trials.to_string(),
            report.ratio.failures.to_string(),
            fmt_f64(report.ratio.p_hat),
            fmt_f64(report.ratio.ci_lo),
            fmt_f64(report.ratio.ci_hi),
            fmt_f64(report.budget),
            report.holds.to_string(),
            report.holds_at_ci_lo.to_string(),
        ]);
    }
    Ok(art.render())
}

// ----------------------------------------------------------------- rootfind

fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn cmd_rootfind(args: &RootfindArgs) -> Result<String> {
    match &args.method {
        RootfindMethod::Newton {
            poly,
            x1,
            tol,
            max_iter,
        } => {
            if poly.len() < 2 {
                return Err(Error::InvalidArgument(
                    "polynomial needs at least degree 1 (two coefficients)".into(),
                ));
            }
            let deriv = poly_derivative(poly);
            let result = rootfind::newton_raphson(
                |x| poly_eval(poly, x),
                |x| poly_eval(&deriv, x),
                *x1,
                *tol,
                *max_iter,
            )?;

            let argv = format!(
                "rootfind newton --poly {} --x1 {} --tol {} --max-iter {}",
                poly.iter().map(|c| fmt_f64(*c)).collect::<Vec<_>>().join(","),
                fmt_f64(*x1),
                fmt_f64(*tol),
                max_iter
            );
            let mut art = Artifact::new("rootfind", &argv, None);
            art.note(format!(
                "estimate: {} converged: {} iterations: {} residual: {}",
                fmt_f64(result.estimate),
                result.converged,
                result.iterations,
                fmt_f64(result.residual)
            ));
            art.columns("iteration,x,fx");
            let trajectory = result.trajectory.as_deref().unwrap_or(&[]);
            for (i, &x) in trajectory.iter().enumerate() {
                art.row(&[i.to_string(), fmt_f64(x), fmt_f64(poly_eval(poly, x))]);
            }
            Ok(art.render())
        }
        RootfindMethod::RobbinsMonro {
            kappa,
            delta,
            alpha,
            x1,
            c,
            steps,
            seed,
            thin,
        } => {
            if *thin == 0 {
                return Err(Error::InvalidArgument("--thin must be at least 1".into()));
            }
            let model = UniformRootModel::new(*kappa, *delta, *seed)?;
            let schedule = StepSchedule::c_over_n(*c)?;
            let result = rootfind::robbins_monro(&model, *alpha, *x1, &schedule, *steps, true)?;

            let argv = format!(
                "rootfind robbins-monro --kappa {} --delta {} --alpha {} --x1 {} --c {} --steps {} --seed {} --thin {}",
                fmt_f64(*kappa),
                fmt_f64(*delta),
                fmt_f64(*alpha),
                fmt_f64(*x1),
                fmt_f64(*c),
                steps,
                seed,
                thin
            );
            let mut art = Artifact::new("rootfind", &argv, Some(*seed));
            art.note(format!(
                "estimate: {} residual_mean_response: {}",
                fmt_f64(result.estimate),
                fmt_f64(result.residual)
            ));
            art.columns("step,x,mean_response");
            let trajectory = result.trajectory.as_deref().unwrap_or(&[]);
            let last = trajectory.len() - 1;
            for (i, &x) in trajectory.iter().enumerate() {
                if i % *thin == 0 || i == last {
                    art.row(&[
                        i.to_string(),
                        fmt_f64(x),
                        fmt_f64(model.expected_value(x) - alpha),
                    ]);
                }
            }
            Ok(art.render())
        }
    }
}

// ------------------------------------------------------------------ idcodes

fn cmd_idcodes(args: &IdcodesArgs) -> Result<String> {
    let code = idcodes::build_coloring_code(
        args.m_prime,
        args.m_double_prime,
        args.n_codes,
        args.distinct,
        args.seed,
    )?;
    let histogram = idcodes::overlap_histogram(&code)?;
    let max_overlap = idcodes::max_pairwise_overlap(&code)?;

    let mut argv = format!(
        "idcodes --m-prime {} --m-double-prime {} --n-codes {}",
        args.m_prime, args.m_double_prime, args.n_codes
    );
    if args.distinct {
        argv.push_str(" --distinct");
    }
    argv.push_str(&format!(" --seed {}", args.seed));

    let mut art = Artifact::new("idcodes", &argv, Some(args.seed));
    art.note(format!(
        "distinct_colorings_available: {}",
        idcodes::distinct_code_count(args.m_prime, args.m_double_prime)
    ));
    art.note(format!("max_pairwise_overlap: {}", fmt_f64(max_overlap)));
    art.note(format!(
        "expected_agreement_rate_of_random_pair: {}",
        fmt_f64(1.0 / args.m_double_prime as f64)
    ));
    art.columns("agreements,overlap,pairs");
    for (k, &count) in histogram.iter().enumerate() {
        art.row(&[
            k.to_string(),
            fmt_f64(k as f64 / args.m_prime as f64),
            count.to_string(),
        ]);
    }
    Ok(art.render())
}
