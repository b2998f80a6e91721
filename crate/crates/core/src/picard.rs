//! Successive approximation for the logistic equation.
//!
//! Writing `dP/dt = f(P)` as `x(t) = x0 + ∫_0^t f(x(s)) ds` and feeding each
//! approximation back into the right-hand side gives the Picard recurrence
//! `x_{n+1} = F(x_n)`. Two readings are provided:
//!
//! * the function-space operator ([`picard_step`], [`picard_iterate`]) acting
//!   on grid functions, which contracts when `L T < 1`;
//! * the scalar recurrence with `F(x) = a x (1 - x)` ([`scalar_bridge`]),
//!   which is the logistic map and stops converging once `a` leaves the
//!   stable-fixed-point range. Cycle detection and Newton polishing are
//!   borrowed from [`crate::cycles`].

use rayon::prelude::*;

use crate::continuous::{exact_solution, lipschitz_bound, rhs, step_count, OdeParams};
use crate::cycles::{detect_cycle, refine_cycle};
use crate::ergodic::parameter_grid;
use crate::error::{invalid, Error, Result};
use crate::map::{MapParams, Orbit};

/// Samples of a function on `t0 + k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn constant(t0: f64, dt: f64, len: usize, value: f64) -> Self {
        Self {
            t0,
            dt,
            values: vec![value; len],
        }
    }

    pub fn sample(t0: f64, dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..len).map(|k| f(t0 + k as f64 * dt)).collect();
        Self { t0, dt, values }
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conformable(&self, other: &GridFunction) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.values.len() == other.values.len()
    }

    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if !self.conformable(other) {
            return Err(invalid("grid functions are not conformable"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// One application of the Picard operator,
/// `t -> x0 + ∫_{t0}^t r (M - x(s)) x(s) ds`, with the integral accumulated
/// by the trapezoid rule on the grid of `current`.
pub fn picard_step(params: OdeParams, x0: f64, current: &GridFunction) -> GridFunction {
    let half = 0.5 * current.dt;
    let mut values = Vec::with_capacity(current.len());
    let mut integral = 0.0;
    let mut prev = None;
    for &x in &current.values {
        let f = rhs(params, x);
        if let Some(p) = prev {
            integral += half * (p + f);
        }
        prev = Some(f);
        values.push(x0 + integral);
    }
    GridFunction {
        t0: current.t0,
        dt: current.dt,
        values,
    }
}

/// A sequence of Picard iterates and the sup-norm gaps between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub iterates: Vec<GridFunction>,
    /// `deltas[k] = ||iterates[k + 1] - iterates[k]||_inf`.
    pub deltas: Vec<f64>,
    pub converged: bool,
    /// `L T`, the guaranteed contraction factor of the operator on the run.
    pub contraction_bound: f64,
    pub tol: f64,
}

impl PicardRun {
    /// `deltas[k + 1] / deltas[k]`, undefined (NaN) when `deltas[k] == 0`.
    pub fn ratios(&self) -> Vec<f64> {
        self.deltas
            .windows(2)
            .map(|w| if w[0] == 0.0 { f64::NAN } else { w[1] / w[0] })
            .collect()
    }

    pub fn last(&self) -> &GridFunction {
        self.iterates
            .last()
            .expect("a run holds at least the seed iterate")
    }
}

/// Horizon `T = 0.5 / L` on which the operator contracts by at least one half.
pub fn default_horizon(params: OdeParams, x0: f64) -> f64 {
    0.5 / lipschitz_bound(params, contraction_domain(params, x0))
}

fn contraction_domain(params: OdeParams, x0: f64) -> f64 {
    params.m.max(2.0 * x0)
}

/// Picard iteration from the constant seed `x(t) = x0` on `[0, t_end]`.
///
/// The grid has `ceil(t_end / dt)` equal steps ending exactly at `t_end`.
/// Stops when the sup-norm change drops below `tol`; if `max_iter` steps are
/// not enough the partial run is returned inside
/// [`Error::IterationBudgetExhausted`].
pub fn picard_iterate(
    params: OdeParams,
    x0: f64,
    t_end: f64,
    dt: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PicardRun> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid(format!("horizon T = {t_end} must be positive")));
    }
    if !(dt > 0.0 && dt <= t_end / 8.0) {
        return Err(invalid(format!("dt = {dt} must lie in (0, T/8]")));
    }
    if !(x0 >= 0.0 && x0.is_finite()) {
        return Err(invalid(format!("x0 = {x0} must be non-negative")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    let steps = step_count(t_end, dt);
    let dt = t_end / steps as f64;
    let contraction_bound = lipschitz_bound(params, contraction_domain(params, x0)) * t_end;

    let mut run = PicardRun {
        iterates: vec![GridFunction::constant(0.0, dt, steps + 1, x0)],
        deltas: Vec::new(),
        converged: false,
        contraction_bound,
        tol,
    };
    for _ in 0..max_iter {
        let next = picard_step(params, x0, run.last());
        let delta = next.sup_distance(run.last())?;
        run.iterates.push(next);
        run.deltas.push(delta);
        if delta < tol {
            run.converged = true;
            return Ok(run);
        }
    }
    Err(Error::IterationBudgetExhausted { run: Box::new(run) })
}

/// Fit window for [`leading_error_exponent`].
pub const TAYLOR_WINDOW: (f64, f64) = (1e-3, 1e-2);

/// Allowed shortfall of a fitted exponent below the expected order.
pub const TAYLOR_SLACK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorExponent {
    Finite(f64),
    /// The iterate equals the exact solution at every point of the window.
    Exact,
}

/// Slope of `log |x_n(t) - P(t)|` against `log t` over grid times in
/// `window`, where `P` is the exact solution through `x_n(t0)`.
pub fn leading_error_exponent(
    iterate: &GridFunction,
    params: OdeParams,
    window: (f64, f64),
) -> Result<ErrorExponent> {
    let exact = params.with_p0(iterate.values[0]);
    let points: Vec<(f64, f64)> = (0..iterate.len())
        .map(|k| (iterate.time(k), iterate.values[k]))
        .filter(|&(t, _)| t > 0.0 && t >= window.0 && t <= window.1)
        .map(|(t, x)| (t, (x - exact_solution(exact, t)).abs()))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, e)| e > 0.0)
        .map(|&(t, e)| (t.ln(), e.ln()))
        .collect();
    if logs.len() < 2 {
        return Ok(ErrorExponent::Exact);
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    Ok(ErrorExponent::Finite(sxy / sxx))
}

/// First iterate index `n` whose error exponent on [`TAYLOR_WINDOW`] falls
/// short of `n + 1` (less [`TAYLOR_SLACK`]); the iterate count if none does.
///
/// On a trapezoid grid the quadrature error, linear in `t` and of size
/// `~dt^2`, eventually swamps the truncation error, so later iterates stop
/// showing their true order.
pub fn taylor_agreement_order(run: &PicardRun, params: OdeParams) -> Result<usize> {
    if run.iterates.len() < 2 {
        return Err(invalid("run needs at least 2 iterates"));
    }
    for (n, it) in run.iterates.iter().enumerate() {
        match leading_error_exponent(it, params, TAYLOR_WINDOW)? {
            ErrorExponent::Exact => {}
            ErrorExponent::Finite(m) => {
                if m < (n + 1) as f64 - TAYLOR_SLACK {
                    return Ok(n);
                }
            }
        }
    }
    Ok(run.iterates.len())
}

/// `F(x) = a x (1 - x)`, the right-hand side of the scalar Picard recurrence.
#[inline]
pub fn logistic_update(a: f64, x: f64) -> f64 {
    a * x * (1.0 - x)
}

/// `x_start, F(x_start), F(F(x_start)), ...`, `len` values in all.
pub fn bridge_trajectory(a: f64, x_start: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut x = x_start;
    for _ in 0..len {
        out.push(x);
        x = logistic_update(a, x);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BridgeClass {
    Converged { limit: f64, steps: usize },
    Cycle { period: usize },
    NonConvergent,
}

impl BridgeClass {
    pub fn name(&self) -> &'static str {
        match self {
            BridgeClass::Converged { .. } => "Converged",
            BridgeClass::Cycle { .. } => "Cycle",
            BridgeClass::NonConvergent => "NonConvergent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeOutcome {
    pub a: f64,
    pub classification: BridgeClass,
    /// Recurrence steps taken.
    pub iterations: usize,
}

/// Longest cycle the bridge looks for before declaring non-convergence.
pub const BRIDGE_MAX_PERIOD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeSettings {
    pub x_start: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for BridgeSettings {
    fn default() -> Self {
        Self {
            x_start: 0.3,
            max_iter: 10_000,
            tol: 1e-10,
        }
    }
}

/// Runs `x_{n+1} = a x_n (1 - x_n)` and classifies the outcome: converged
/// (limit Newton-polished), settled on a cycle of period at most
/// [`BRIDGE_MAX_PERIOD`], or neither.
pub fn scalar_bridge(a: f64, x_start: f64, max_iter: usize, tol: f64) -> Result<BridgeOutcome> {
    let params = MapParams::new(a)?;
    if !(x_start > 0.0 && x_start < 1.0) {
        return Err(invalid(format!("x_start = {x_start} must lie in (0, 1)")));
    }
    if max_iter < 1000 {
        return Err(invalid(format!("max_iter = {max_iter} below 1000")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    let mut trajectory = Vec::with_capacity(max_iter + 1);
    let mut x = x_start;
    trajectory.push(x);
    for n in 0..max_iter {
        let next = logistic_update(a, x);
        trajectory.push(next);
        if (next - x).abs() < tol {
            let limit = refine_cycle(params, next.clamp(0.0, 1.0), 1)
                .map(|c| c.points[0])
                .unwrap_or(next);
            return Ok(BridgeOutcome {
                a,
                classification: BridgeClass::Converged {
                    limit,
                    steps: n + 1,
                },
                iterations: n + 1,
            });
        }
        x = next;
    }
    let tail_len = 4 * BRIDGE_MAX_PERIOD;
    let tail = trajectory.split_off(trajectory.len() - tail_len);
    let orbit = Orbit {
        params,
        x0: x_start,
        transient: trajectory.len(),
        states: tail,
        escaped: false,
        exit_step: None,
    };
    let classification = match detect_cycle(&orbit, tol, BRIDGE_MAX_PERIOD)? {
        Some(c) => BridgeClass::Cycle { period: c.period },
        None => BridgeClass::NonConvergent,
    };
    Ok(BridgeOutcome {
        a,
        classification,
        iterations: max_iter,
    })
}

/// [`scalar_bridge`] over a uniform grid of `n_params` parameters with
/// default settings, in grid order.
pub fn breakdown_scan(a_min: f64, a_max: f64, n_params: usize) -> Result<Vec<BridgeOutcome>> {
    breakdown_scan_with(a_min, a_max, n_params, BridgeSettings::default(), None)
}

/// [`breakdown_scan`] with explicit settings, optionally on a dedicated pool
/// of `workers` threads. Output does not depend on the worker count.
pub fn breakdown_scan_with(
    a_min: f64,
    a_max: f64,
    n_params: usize,
    settings: BridgeSettings,
    workers: Option<usize>,
) -> Result<Vec<BridgeOutcome>> {
    if !(0.0 <= a_min && a_min < a_max && a_max <= 4.0) {
        return Err(invalid(format!(
            "need 0 <= a_min < a_max <= 4, got [{a_min}, {a_max}]"
        )));
    }
    if n_params < 2 {
        return Err(invalid("n_params must be at least 2"));
    }
    let grid = parameter_grid(a_min, a_max, n_params);
    let run = || -> Result<Vec<BridgeOutcome>> {
        grid.par_iter()
            .map(|&a| scalar_bridge(a, settings.x_start, settings.max_iter, settings.tol))
            .collect()
    };
    match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(run),
    }
}
