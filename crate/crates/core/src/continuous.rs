//! The continuous logistic equation `dP/dt = r (M - P) P`.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeParams {
    /// Growth rate, per unit time.
    pub r: f64,
    /// Carrying capacity.
    pub m: f64,
    /// Initial population.
    pub p0: f64,
}

impl OdeParams {
    pub fn new(r: f64, m: f64, p0: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("growth rate r = {r} must be positive")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid(format!("capacity M = {m} must be positive")));
        }
        if !(p0 >= 0.0 && p0.is_finite()) {
            return Err(invalid(format!(
                "initial population P0 = {p0} must be non-negative"
            )));
        }
        Ok(Self { r, m, p0 })
    }

    pub fn with_p0(self, p0: f64) -> Self {
        Self { p0, ..self }
    }
}

/// Right-hand side `r (M - P) P`.
#[inline]
pub fn rhs(params: OdeParams, p: f64) -> f64 {
    params.r * (params.m - p) * p
}

/// Closed-form solution `M P0 / (P0 + (M - P0) e^{-r M t})`.
pub fn exact_solution(params: OdeParams, t: f64) -> f64 {
    let OdeParams { r, m, p0 } = params;
    if p0 == 0.0 || p0 == m {
        return p0;
    }
    m * p0 / (p0 + (m - p0) * (-r * m * t).exp())
}

/// Samples on `t_k = t0 + k dt`, except the last point which sits at
/// `t_end` (the final step may be shorter than `dt`).
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub t0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub values: Vec<f64>,
}

impl OdeSolution {
    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.values.len() {
            self.t_end
        } else {
            self.t0 + k as f64 * self.dt
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| self.time(k))
    }

    pub fn last(&self) -> f64 {
        *self
            .values
            .last()
            .expect("solution has at least two samples")
    }

    /// Largest `|P_k - exact(t_k)|` over the grid.
    pub fn max_error(&self, params: OdeParams) -> f64 {
        self.times()
            .zip(&self.values)
            .map(|(t, v)| (v - exact_solution(params, t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Number of steps of size `dt` needed to cover `span`, tolerating rounding
/// in `span / dt`.
pub(crate) fn step_count(span: f64, dt: f64) -> usize {
    let ratio = span / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Classical fourth-order Runge-Kutta from `t = 0` to `t_end`.
pub fn rk4_integrate(params: OdeParams, t_end: f64, dt: f64) -> Result<OdeSolution> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid(format!("t_end = {t_end} must be positive")));
    }
    if !(dt > 0.0 && dt <= t_end) {
        return Err(invalid(format!("dt = {dt} must lie in (0, t_end]")));
    }
    let steps = step_count(t_end, dt);
    let f = |p: f64| rhs(params, p);
    let mut values = Vec::with_capacity(steps + 1);
    let mut p = params.p0;
    values.push(p);
    for k in 0..steps {
        let h = if k + 1 == steps {
            t_end - k as f64 * dt
        } else {
            dt
        };
        let k1 = f(p);
        let k2 = f(p + 0.5 * h * k1);
        let k3 = f(p + 0.5 * h * k2);
        let k4 = f(p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values.push(p);
    }
    Ok(OdeSolution {
        t0: 0.0,
        dt,
        t_end,
        values,
    })
}

/// `sup |d rhs / dP| = r max(M, |M - 2 domain_hi|)` over `P in [0, domain_hi]`.
pub fn lipschitz_bound(params: OdeParams, domain_hi: f64) -> f64 {
    params.r * params.m.max((params.m - 2.0 * domain_hi).abs())
}
