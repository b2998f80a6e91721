//! Long-run statistics over orbits and parameter sweeps.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::map::{derivative, orbit, step, MapParams, CRITICAL_POINT};

/// Discarded iterations before sampling. Near period-doubling points the
/// approach to the attractor is only algebraic; 10^4 steps keeps the
/// cluster counts in the tests stable at a tolerance of 1e-4.
pub const DEFAULT_TRANSIENT: usize = 10_000;
pub const DEFAULT_KEEP: usize = 256;

/// Minimum orbit length for a reported Lyapunov exponent.
pub const MIN_LYAPUNOV_SAMPLES: usize = 1_000;

const SUPERSTABLE_SLOPE: f64 = 1e-300;

/// A Lyapunov exponent, or the marker for an orbit that hit the critical
/// point exactly (zero derivative, exponent minus infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    NegativeInfinity,
}

impl Exponent {
    pub fn value(&self) -> f64 {
        match *self {
            Exponent::Finite(v) => v,
            Exponent::NegativeInfinity => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::NegativeInfinity => f.write_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovResult {
    pub a: f64,
    pub exponent: Exponent,
    pub n_used: usize,
}

/// Average of `ln |a (1 - 2 x_i)|` over `n` states following a transient.
pub fn lyapunov(params: MapParams, x0: f64, n: usize, transient: usize) -> Result<LyapunovResult> {
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(invalid(format!("x0 = {x0} must lie in (0, 1)")));
    }
    if n < MIN_LYAPUNOV_SAMPLES {
        return Err(invalid(format!(
            "n = {n} below the minimum of {MIN_LYAPUNOV_SAMPLES}"
        )));
    }
    let mut x = x0;
    for k in 0..transient {
        x = step(params, x);
        check_inside(k + 1, x)?;
    }
    let mut sum = 0.0;
    let mut superstable = false;
    for k in 0..n {
        let slope = derivative(params, x).abs();
        if slope < SUPERSTABLE_SLOPE {
            superstable = true;
        } else {
            sum += slope.ln();
        }
        x = step(params, x);
        check_inside(transient + k + 1, x)?;
    }
    let exponent = if superstable {
        Exponent::NegativeInfinity
    } else {
        Exponent::Finite(sum / n as f64)
    };
    Ok(LyapunovResult {
        a: params.a(),
        exponent,
        n_used: n,
    })
}

fn check_inside(step: usize, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::EscapedOrbit { step, value: x })
    }
}

/// Where each column of a scan starts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialState {
    /// The critical point 1/2, whose orbit is attracted by any attracting cycle.
    #[default]
    Critical,
    Fixed(f64),
}

impl InitialState {
    pub fn value(&self) -> f64 {
        match *self {
            InitialState::Critical => CRITICAL_POINT,
            InitialState::Fixed(x) => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub a_min: f64,
    pub a_max: f64,
    pub n_params: usize,
    pub transient: usize,
    pub keep: usize,
    pub initial: InitialState,
}

impl ScanSettings {
    pub fn new(a_min: f64, a_max: f64, n_params: usize) -> Self {
        Self {
            a_min,
            a_max,
            n_params,
            transient: DEFAULT_TRANSIENT,
            keep: DEFAULT_KEEP,
            initial: InitialState::Critical,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0 <= self.a_min && self.a_min < self.a_max && self.a_max <= 4.0) {
            return Err(invalid(format!(
                "need 0 <= a_min < a_max <= 4, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if self.n_params < 2 {
            return Err(invalid("n_params must be at least 2"));
        }
        if self.keep == 0 {
            return Err(invalid("keep must be at least 1"));
        }
        Ok(())
    }
}

/// Uniform grid of `n >= 2` parameters with both endpoints hit exactly.
pub fn parameter_grid(a_min: f64, a_max: f64, n: usize) -> Vec<f64> {
    let last = n - 1;
    (0..n)
        .map(|i| {
            if i == last {
                a_max
            } else {
                a_min + (a_max - a_min) * (i as f64 / last as f64)
            }
        })
        .collect()
}

/// Post-transient samples for every parameter of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationData {
    pub a_values: Vec<f64>,
    /// Empty for escaped columns.
    pub samples: Vec<Vec<f64>>,
    pub escaped: Vec<bool>,
}

impl BifurcationData {
    pub fn len(&self) -> usize {
        self.a_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_values.is_empty()
    }

    pub fn push_column(&mut self, a: f64, column: Column) {
        self.a_values.push(a);
        self.escaped.push(column.escaped);
        self.samples.push(column.samples);
    }
}

impl FromIterator<(f64, Column)> for BifurcationData {
    fn from_iter<I: IntoIterator<Item = (f64, Column)>>(iter: I) -> Self {
        let mut data = BifurcationData {
            a_values: Vec::new(),
            samples: Vec::new(),
            escaped: Vec::new(),
        };
        for (a, column) in iter {
            data.push_column(a, column);
        }
        data
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub samples: Vec<f64>,
    pub escaped: bool,
}

/// One column of a diagram. Works for out-of-domain parameters too; a column
/// whose orbit leaves `[0, 1]` is flagged and carries no samples.
pub fn sample_column(params: MapParams, x0: f64, transient: usize, keep: usize) -> Column {
    let o = orbit(params, x0, keep.max(1), transient).expect("keep >= 1");
    if o.escaped || o.exit_step.is_some() {
        Column {
            samples: Vec::new(),
            escaped: true,
        }
    } else {
        Column {
            samples: o.states,
            escaped: false,
        }
    }
}

/// Sweeps the parameter grid on the global rayon pool.
pub fn bifurcation_scan(settings: &ScanSettings) -> Result<BifurcationData> {
    settings.validate()?;
    Ok(scan_columns(settings))
}

/// Same as [`bifurcation_scan`] on a dedicated pool of `workers` threads.
/// The result is bitwise identical for every worker count.
pub fn bifurcation_scan_with_workers(
    settings: &ScanSettings,
    workers: usize,
) -> Result<BifurcationData> {
    settings.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| scan_columns(settings)))
}

fn scan_columns(settings: &ScanSettings) -> BifurcationData {
    let x0 = settings.initial.value();
    parameter_grid(settings.a_min, settings.a_max, settings.n_params)
        .into_par_iter()
        .map(|a| {
            let column = sample_column(
                MapParams::new_unchecked(a),
                x0,
                settings.transient,
                settings.keep,
            );
            (a, column)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Number of clusters among `samples` when neighbours (after sorting) closer
/// than `tol` are merged.
pub fn attractor_cardinality(samples: &[f64], tol: f64) -> usize {
    if samples.is_empty() {
        return 0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    1 + sorted.windows(2).filter(|w| w[1] - w[0] > tol).count()
}
