//! `logistic`: command-line access to every analysis in `logistic-core`.
//!
//! Each subcommand writes a CSV table (and `bifurcate` optionally a PGM
//! image). Files are written to a temporary sibling and renamed into place.
//! Exit codes: 0 success, 1 runtime failure, 2 invalid arguments, 3 a
//! convergence the caller demanded did not happen.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use logistic_core::continuous::{exact_solution, rk4_integrate};
use logistic_core::cycles::{
    accumulation_point, detect_cycle, feigenbaum_delta, superstable_ladder, SuperstableSequence,
};
use logistic_core::ergodic::{
    self, bifurcation_scan, bifurcation_scan_with_workers, lyapunov, parameter_grid, ScanSettings,
};
use logistic_core::map::{classify_fixed_point, fixed_points, orbit};
use logistic_core::picard::{self, breakdown_scan_with, picard_iterate, BridgeSettings};
use logistic_core::{BridgeClass, Error, InitialState, MapParams, OdeParams, PicardRun};
use thiserror::Error;

pub mod pgm;

pub use pgm::render_bifurcation_pgm;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotConverged(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(Error::InvalidArgument(_)) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(format!("InvalidArgument: {}", msg.into()))
}

#[derive(Debug, Parser)]
#[command(
    name = "logistic",
    version,
    about = "Logistic map and logistic ODE analyses"
)]
#[command(subcommand_required = true, arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the map and write `step,x`.
    Orbit(OrbitArgs),
    /// Fixed points and their regime: `a,x_star,classification`.
    FixedPoints(FixedPointArgs),
    /// Detect the attracting cycle: `a,period,point_index,x,multiplier`.
    Cycle(CycleArgs),
    /// Superstable parameters of the doubling ladder: `k,period,a_k`.
    Superstable(LadderArgs),
    /// Feigenbaum ratios and accumulation point: `k,delta_k,a_inf_estimate`.
    Feigenbaum(LadderArgs),
    /// Lyapunov exponents: `a,exponent,n_used`.
    Lyapunov(LyapunovArgs),
    /// Bifurcation diagram as PGM and/or CSV `a,sample_index,x,escaped`.
    Bifurcate(BifurcateArgs),
    /// Logistic ODE, closed form against RK4: `t,P_exact,P_rk4,abs_err`.
    Ode(OdeArgs),
    /// Picard iteration of the ODE: `iterate,sup_delta,ratio,contraction_bound`.
    Picard(PicardArgs),
    /// Scalar Picard recurrence x -> a x (1 - x): `a,classification,limit_or_period,steps`.
    Bridge(BridgeArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OrbitArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.3)]
    pub x0: f64,
    /// Number of recorded states.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Steps discarded before recording.
    #[arg(long, default_value_t = ergodic::DEFAULT_TRANSIENT)]
    pub transient: usize,
    /// Accept a outside [0, 4] (orbits may escape).
    #[arg(long)]
    pub allow_out_of_domain: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FixedPointArgs {
    /// One or more parameters, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CycleArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.3)]
    pub x0: f64,
    /// Recorded tail length; must be at least 2 * max-period.
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = ergodic::DEFAULT_TRANSIENT)]
    pub transient: usize,
    #[arg(long, default_value = "1e-8")]
    pub tol: f64,
    #[arg(long, default_value_t = 64)]
    pub max_period: usize,
    /// Exit with status 3 when no cycle is found.
    #[arg(long)]
    pub require_cycle: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LadderArgs {
    /// Deepest period of the ladder (power of two, at most 256).
    #[arg(long, default_value_t = 128)]
    pub max_period: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Either an explicit list `--a 2.5,3.2` or a uniform grid.
#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ParamSelection {
    /// Explicit parameters, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a_min", "a_max", "n_params"])]
    pub a: Vec<f64>,
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub n_params: Option<usize>,
}

impl ParamSelection {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        if !self.a.is_empty() {
            for &a in &self.a {
                check_param(a)?;
            }
            return Ok(self.a.clone());
        }
        match (self.a_min, self.a_max, self.n_params) {
            (Some(lo), Some(hi), Some(n)) => {
                check_range(lo, hi, n)?;
                Ok(parameter_grid(lo, hi, n))
            }
            _ => Err(usage(
                "give either --a or all of --a-min, --a-max, --n-params",
            )),
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct LyapunovArgs {
    #[command(flatten)]
    pub params: ParamSelection,
    #[arg(long, default_value_t = 0.3)]
    pub x0: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = ergodic::DEFAULT_TRANSIENT)]
    pub transient: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BifurcateArgs {
    #[arg(long, default_value_t = 2.8)]
    pub a_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_params: usize,
    #[arg(long, default_value_t = ergodic::DEFAULT_TRANSIENT)]
    pub transient: usize,
    #[arg(long, default_value_t = ergodic::DEFAULT_KEEP)]
    pub keep: usize,
    /// Initial state of every column (the critical point by default).
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
    /// Image height in pixels.
    #[arg(long, default_value_t = 600)]
    pub height: usize,
    /// Binary PGM output.
    #[arg(long, visible_alias = "pgm-out")]
    pub png_out: Option<PathBuf>,
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Worker threads for the per-parameter sweep; output is identical for any count.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct OdeArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PicardArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
    /// Horizon T [default: 0.5 / L, L the Lipschitz bound on [0, max(M, 2 x0)]].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Grid step [default: T / 512].
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Exit with status 3 unless the iteration converges.
    #[arg(long)]
    pub require_converged: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BridgeArgs {
    #[command(flatten)]
    pub params: ParamSelection,
    #[arg(long, default_value_t = 0.3)]
    pub x_start: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, default_value = "1e-10")]
    pub tol: f64,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Exit with status 3 unless every parameter converges.
    #[arg(long)]
    pub require_converged: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the subcommand, returning the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.render().to_string();
            eprintln!(
                "error: InvalidArgument: {}",
                text.trim_start_matches("error: ").trim_end()
            );
            return 2;
        }
        Err(e) => {
            let _ = e.print();
            return 0;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Orbit(args) => cmd_orbit(args),
        Command::FixedPoints(args) => cmd_fixed_points(args),
        Command::Cycle(args) => cmd_cycle(args),
        Command::Superstable(args) => cmd_superstable(args),
        Command::Feigenbaum(args) => cmd_feigenbaum(args),
        Command::Lyapunov(args) => cmd_lyapunov(args),
        Command::Bifurcate(args) => cmd_bifurcate(args),
        Command::Ode(args) => cmd_ode(args),
        Command::Picard(args) => cmd_picard(args),
        Command::Bridge(args) => cmd_bridge(args),
    }
}

fn check_param(a: f64) -> Result<MapParams, CliError> {
    MapParams::new(a).map_err(|_| usage(format!("--a {a} outside [0, 4]")))
}

fn check_range(lo: f64, hi: f64, n: usize) -> Result<(), CliError> {
    if !(0.0 <= lo && lo < hi && hi <= 4.0) {
        return Err(usage(format!(
            "need 0 <= a-min < a-max <= 4, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(usage("--n-params must be at least 2"));
    }
    Ok(())
}

fn check_workers(workers: Option<usize>) -> Result<(), CliError> {
    match workers {
        Some(0) => Err(usage("--workers must be at least 1")),
        _ => Ok(()),
    }
}

fn check_unit_open(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} {x} must lie in (0, 1)")))
    }
}

fn check_positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{name} {x} must be positive")))
    }
}

fn check_ladder_depth(max_period: usize, min: usize) -> Result<(), CliError> {
    if max_period.is_power_of_two()
        && (min..=logistic_core::cycles::MAX_LADDER_PERIOD).contains(&max_period)
    {
        Ok(())
    } else {
        Err(usage(format!(
            "--max-period {max_period} must be a power of two in [{min}, {}]",
            logistic_core::cycles::MAX_LADDER_PERIOD
        )))
    }
}

/// Shortest round-trip decimal form of an `f64`.
fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

struct Table(String);

impl Table {
    fn new(header: &str) -> Self {
        Table(format!("{header}\n"))
    }

    fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.0.push(',');
            }
            let _ = write!(self.0, "{f}");
        }
        self.0.push('\n');
    }

    fn write_to(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, self.0.as_bytes())
    }
}

fn cmd_orbit(args: OrbitArgs) -> Result<(), CliError> {
    let params = if args.allow_out_of_domain {
        MapParams::new_unchecked(args.a)
    } else {
        check_param(args.a)?
    };
    if args.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let o = orbit(params, args.x0, args.n, args.transient)?;
    let mut t = Table::new("step,x");
    for (k, x) in o.states.iter().enumerate() {
        t.row(&[&(o.transient + k), &num(*x)]);
    }
    if o.escaped {
        eprintln!(
            "warning: orbit escaped after {} recorded states",
            o.states.len()
        );
    }
    t.write_to(&args.out)
}

fn cmd_fixed_points(args: FixedPointArgs) -> Result<(), CliError> {
    let params: Vec<MapParams> = args
        .a
        .iter()
        .map(|&a| check_param(a))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new("a,x_star,classification");
    for p in params {
        let class = classify_fixed_point(p);
        for x in fixed_points(p) {
            t.row(&[&num(p.a()), &num(x), &class.name()]);
        }
    }
    t.write_to(&args.out)
}

fn cmd_cycle(args: CycleArgs) -> Result<(), CliError> {
    let params = check_param(args.a)?;
    if args.max_period == 0 {
        return Err(usage("--max-period must be at least 1"));
    }
    if args.n < 2 * args.max_period {
        return Err(usage(format!(
            "--n {} must be at least 2 * max-period",
            args.n
        )));
    }
    check_positive("--tol", args.tol)?;
    let o = orbit(params, args.x0, args.n, args.transient)?;
    let cycle = detect_cycle(&o, args.tol, args.max_period)?;
    let mut t = Table::new("a,period,point_index,x,multiplier");
    if let Some(c) = &cycle {
        for (i, x) in c.points.iter().enumerate() {
            t.row(&[&num(args.a), &c.period, &i, &num(*x), &num(c.multiplier)]);
        }
    }
    t.write_to(&args.out)?;
    match cycle {
        None if args.require_cycle => Err(CliError::NotConverged(format!(
            "no cycle of period <= {} at a = {}",
            args.max_period, args.a
        ))),
        _ => Ok(()),
    }
}

fn cmd_superstable(args: LadderArgs) -> Result<(), CliError> {
    check_ladder_depth(args.max_period, 1)?;
    let seq = superstable_ladder(args.max_period)?;
    let mut t = Table::new("k,period,a_k");
    for (k, &(period, a)) in seq.entries().iter().enumerate() {
        t.row(&[&k, &period, &num(a)]);
    }
    t.write_to(&args.out)
}

fn cmd_feigenbaum(args: LadderArgs) -> Result<(), CliError> {
    check_ladder_depth(args.max_period, 4)?;
    let seq = superstable_ladder(args.max_period)?;
    let deltas = feigenbaum_delta(&seq)?;
    let mut t = Table::new("k,delta_k,a_inf_estimate");
    for (i, &delta) in deltas.iter().enumerate() {
        let k = i + 1;
        let prefix = SuperstableSequence::from_entries(seq.entries()[..=k + 1].to_vec());
        let a_inf = accumulation_point(&prefix, delta)?;
        t.row(&[&k, &num(delta), &num(a_inf)]);
    }
    t.write_to(&args.out)
}

fn cmd_lyapunov(args: LyapunovArgs) -> Result<(), CliError> {
    let values = args.params.values()?;
    check_unit_open("--x0", args.x0)?;
    if args.n < ergodic::MIN_LYAPUNOV_SAMPLES {
        return Err(usage(format!(
            "--n must be at least {}",
            ergodic::MIN_LYAPUNOV_SAMPLES
        )));
    }
    let mut t = Table::new("a,exponent,n_used");
    for a in values {
        let r = lyapunov(MapParams::new(a)?, args.x0, args.n, args.transient)?;
        t.row(&[&num(a), &r.exponent, &r.n_used]);
    }
    t.write_to(&args.out)
}

fn cmd_bifurcate(args: BifurcateArgs) -> Result<(), CliError> {
    check_range(args.a_min, args.a_max, args.n_params)?;
    check_workers(args.workers)?;
    if args.keep == 0 {
        return Err(usage("--keep must be at least 1"));
    }
    if args.height < 2 {
        return Err(usage("--height must be at least 2"));
    }
    if !(0.0..=1.0).contains(&args.x0) {
        return Err(usage(format!("--x0 {} must lie in [0, 1]", args.x0)));
    }
    if args.png_out.is_none() && args.csv_out.is_none() {
        return Err(usage("give --png-out and/or --csv-out"));
    }
    let settings = ScanSettings {
        transient: args.transient,
        keep: args.keep,
        initial: InitialState::Fixed(args.x0),
        ..ScanSettings::new(args.a_min, args.a_max, args.n_params)
    };
    let data = match args.workers {
        Some(w) => bifurcation_scan_with_workers(&settings, w)?,
        None => bifurcation_scan(&settings)?,
    };
    if let Some(path) = &args.png_out {
        write_atomic(path, &render_bifurcation_pgm(&data, args.height))?;
    }
    if let Some(path) = &args.csv_out {
        let mut t = Table::new("a,sample_index,x,escaped");
        for ((a, samples), &escaped) in data.a_values.iter().zip(&data.samples).zip(&data.escaped) {
            if escaped {
                t.row(&[&num(*a), &"", &"", &escaped]);
            }
            for (i, x) in samples.iter().enumerate() {
                t.row(&[&num(*a), &i, &num(*x), &escaped]);
            }
        }
        t.write_to(path)?;
    }
    Ok(())
}

fn ode_params(r: f64, m: f64, p0: f64) -> Result<OdeParams, CliError> {
    OdeParams::new(r, m, p0).map_err(|e| usage(e.to_string()))
}

fn cmd_ode(args: OdeArgs) -> Result<(), CliError> {
    let params = ode_params(args.r, args.m, args.p0)?;
    check_positive("--t-end", args.t_end)?;
    if !(args.dt > 0.0 && args.dt <= args.t_end) {
        return Err(usage(format!("--dt {} must lie in (0, t-end]", args.dt)));
    }
    let sol = rk4_integrate(params, args.t_end, args.dt)?;
    let mut t = Table::new("t,P_exact,P_rk4,abs_err");
    for (time, p) in sol.times().zip(&sol.values) {
        let exact = exact_solution(params, time);
        t.row(&[&num(time), &num(exact), &num(*p), &num((p - exact).abs())]);
    }
    t.write_to(&args.out)
}

fn cmd_picard(args: PicardArgs) -> Result<(), CliError> {
    let params = ode_params(args.r, args.m, args.x0)?;
    let t_end = args
        .t_end
        .unwrap_or_else(|| picard::default_horizon(params, args.x0));
    check_positive("--t-end", t_end)?;
    let dt = args.dt.unwrap_or(t_end / 512.0);
    if !(dt > 0.0 && dt <= t_end / 8.0) {
        return Err(usage(format!(
            "--dt {dt} must lie in (0, T/8] with T = {t_end}"
        )));
    }
    check_positive("--tol", args.tol)?;
    let (run, converged) = match picard_iterate(params, args.x0, t_end, dt, args.tol, args.max_iter)
    {
        Ok(run) => (run, true),
        Err(Error::IterationBudgetExhausted { run }) => (*run, false),
        Err(e) => return Err(e.into()),
    };
    write_picard_table(&run, &args.out)?;
    if !converged {
        let msg = format!(
            "IterationBudgetExhausted: no convergence after {} iterations",
            run.deltas.len()
        );
        if args.require_converged {
            return Err(CliError::NotConverged(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn write_picard_table(run: &PicardRun, path: &Path) -> Result<(), CliError> {
    let mut t = Table::new("iterate,sup_delta,ratio,contraction_bound");
    let ratios = run.ratios();
    for (k, delta) in run.deltas.iter().enumerate() {
        let ratio = if k == 0 {
            String::new()
        } else {
            num(ratios[k - 1])
        };
        t.row(&[&(k + 1), &num(*delta), &ratio, &num(run.contraction_bound)]);
    }
    t.write_to(path)
}

fn cmd_bridge(args: BridgeArgs) -> Result<(), CliError> {
    let values = args.params.values()?;
    check_unit_open("--x-start", args.x_start)?;
    check_workers(args.workers)?;
    check_positive("--tol", args.tol)?;
    if args.max_iter < 1000 {
        return Err(usage("--max-iter must be at least 1000"));
    }
    let settings = BridgeSettings {
        x_start: args.x_start,
        max_iter: args.max_iter,
        tol: args.tol,
    };
    let outcomes = if args.params.a.is_empty() {
        let (lo, hi, n) = (
            args.params.a_min.unwrap(),
            args.params.a_max.unwrap(),
            args.params.n_params.unwrap(),
        );
        breakdown_scan_with(lo, hi, n, settings, args.workers)?
    } else {
        values
            .iter()
            .map(|&a| picard::scalar_bridge(a, settings.x_start, settings.max_iter, settings.tol))
            .collect::<Result<Vec<_>, _>>()?
    };
    let mut t = Table::new("a,classification,limit_or_period,steps");
    let mut failures = 0;
    for o in &outcomes {
        let value = match o.classification {
            BridgeClass::Converged { limit, .. } => num(limit),
            BridgeClass::Cycle { period } => period.to_string(),
            BridgeClass::NonConvergent => String::new(),
        };
        if !matches!(o.classification, BridgeClass::Converged { .. }) {
            failures += 1;
        }
        t.row(&[&num(o.a), &o.classification.name(), &value, &o.iterations]);
    }
    t.write_to(&args.out)?;
    if args.require_converged && failures > 0 {
        return Err(CliError::NotConverged(format!(
            "{failures} of {} parameters did not converge",
            outcomes.len()
        )));
    }
    Ok(())
}
