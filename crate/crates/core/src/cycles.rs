//! Periodic orbits, superstable parameters and the Feigenbaum ratio.

use crate::error::{invalid, Error, Result};
use crate::map::{derivative, step, MapParams, Orbit, CRITICAL_POINT};

/// Tolerance used when checking that no proper divisor of a period closes
/// the orbit.
pub const MINIMALITY_TOL: f64 = 1e-8;

/// Residual `|f^p(x) - x|` below which Newton refinement stops.
pub const REFINE_RESIDUAL: f64 = 1e-12;

const MAX_NEWTON_STEPS: usize = 100;
const FLAT_DERIVATIVE: f64 = 1e-10;

/// Required `|g(a)|` for a superstable parameter.
pub const SUPERSTABLE_RESIDUAL: f64 = 1e-13;

/// Deepest rung of the superstable ladder.
///
/// Gaps between successive superstable parameters shrink by ~4.669 per
/// doubling; at period 2^8 the gap is ~2.5e-5 and the next one ~5e-6, while
/// evaluating `f^(2^k)(1/2)` loses accuracy roughly in proportion to `2^k`.
/// Past this depth the bisection residual and the gap ratio are no longer
/// resolved cleanly in `f64`.
pub const MAX_LADDER_PERIOD: usize = 256;

const LADDER_SCAN_STEP: f64 = 1e-3;
const LADDER_SCAN_END: f64 = 3.6;

/// A periodic orbit of the logistic map.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub period: usize,
    pub points: Vec<f64>,
    /// Product of `a (1 - 2 x_i)` over the cycle.
    pub multiplier: f64,
}

impl Cycle {
    fn from_start(params: MapParams, x: f64, period: usize) -> Self {
        let mut points = Vec::with_capacity(period);
        let mut y = x;
        for _ in 0..period {
            points.push(y);
            y = step(params, y);
        }
        let multiplier = product_of_derivatives(params, &points);
        Cycle {
            period,
            points,
            multiplier,
        }
    }

    /// `|f^p(points[0]) - points[0]|`.
    pub fn residual(&self, params: MapParams) -> f64 {
        (iterate(params, self.points[0], self.period) - self.points[0]).abs()
    }

    /// Smallest proper divisor `d` of the period with
    /// `|f^d(points[0]) - points[0]| < tol`, if any.
    pub fn closing_divisor(&self, params: MapParams, tol: f64) -> Option<usize> {
        closing_divisor(params, self.points[0], self.period, tol)
    }

    pub fn is_attracting(&self) -> bool {
        self.multiplier.abs() < 1.0
    }
}

/// `f^n(x)`.
pub fn iterate(params: MapParams, x: f64, n: usize) -> f64 {
    (0..n).fold(x, |y, _| step(params, y))
}

fn product_of_derivatives(params: MapParams, points: &[f64]) -> f64 {
    points.iter().map(|&x| derivative(params, x)).product()
}

fn proper_divisors(p: usize) -> impl Iterator<Item = usize> {
    (1..p).filter(move |&d| p.is_multiple_of(d))
}

fn closing_divisor(params: MapParams, x: f64, p: usize, tol: f64) -> Option<usize> {
    proper_divisors(p).find(|&d| (iterate(params, x, d) - x).abs() < tol)
}

/// Looks for the shortest period `p <= max_period` that repeats over the last
/// full period of the orbit: `|x_{N-j} - x_{N-j-p}| < tol` for `j < p`.
///
/// Points are read straight off the tail, oldest first.
pub fn detect_cycle(orbit: &Orbit, tol: f64, max_period: usize) -> Result<Option<Cycle>> {
    if orbit.escaped {
        return Err(invalid("cannot detect a cycle on an escaped orbit"));
    }
    if max_period == 0 {
        return Err(invalid("max_period must be at least 1"));
    }
    let xs = &orbit.states;
    if xs.len() < 2 * max_period {
        return Err(Error::InsufficientData {
            needed: 2 * max_period,
            got: xs.len(),
        });
    }
    let n = xs.len() - 1;
    let found = (1..=max_period).find(|&p| (0..p).all(|j| (xs[n - j] - xs[n - j - p]).abs() < tol));
    Ok(found.map(|p| {
        let points = xs[n + 1 - p..].to_vec();
        let multiplier = product_of_derivatives(orbit.params, &points);
        Cycle {
            period: p,
            points,
            multiplier,
        }
    }))
}

/// Newton iteration on `f^p(x) - x` from `guess`.
///
/// Falls back to bisection on a locally found sign change when the Newton
/// derivative `(f^p)'(x) - 1` is flat.
pub fn refine_cycle(params: MapParams, guess: f64, p: usize) -> Result<Cycle> {
    if p == 0 {
        return Err(invalid("period must be at least 1"));
    }
    if !(0.0..=1.0).contains(&guess) {
        return Err(invalid(format!("guess {guess} outside [0, 1]")));
    }
    let h = |x: f64| iterate(params, x, p) - x;
    let mut x = guess;
    let mut converged = false;
    for _ in 0..MAX_NEWTON_STEPS {
        let r = h(x);
        if r.abs() < REFINE_RESIDUAL {
            converged = true;
            break;
        }
        let cycle = Cycle::from_start(params, x, p);
        let slope = cycle.multiplier - 1.0;
        if slope.abs() < FLAT_DERIVATIVE {
            x = bisect_near(&h, x).ok_or_else(|| {
                Error::NoConvergence(format!(
                    "flat Newton step at x = {x} and no sign change nearby"
                ))
            })?;
            if h(x).abs() < REFINE_RESIDUAL {
                converged = true;
                break;
            }
            continue;
        }
        x = (x - r / slope).clamp(0.0, 1.0);
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Newton refinement of period {p} from {guess} did not reach residual {REFINE_RESIDUAL:e} in {MAX_NEWTON_STEPS} steps"
        )));
    }
    if let Some(divisor) = closing_divisor(params, x, p, MINIMALITY_TOL) {
        return Err(Error::NotMinimalPeriod { period: p, divisor });
    }
    Ok(Cycle::from_start(params, x, p))
}

/// Expands a window around `x` until `h` changes sign, then bisects.
fn bisect_near(h: &impl Fn(f64) -> f64, x: f64) -> Option<f64> {
    let mut width = 1e-6;
    while width <= 0.5 {
        let lo = (x - width).max(0.0);
        let hi = (x + width).min(1.0);
        let (h_lo, h_hi) = (h(lo), h(hi));
        if h_lo == 0.0 {
            return Some(lo);
        }
        if h_hi == 0.0 {
            return Some(hi);
        }
        if (h_lo < 0.0) != (h_hi < 0.0) {
            return Some(bisect(h, lo, hi, h_lo));
        }
        width *= 2.0;
    }
    None
}

/// Bisects until the midpoint no longer separates the endpoints (at least 60
/// halvings for any bracket wider than a few ulps), returning the endpoint
/// with the smaller `|h|`.
fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut h_lo: f64) -> f64 {
    let mut h_hi = h(hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return mid;
        }
        if (h_mid < 0.0) == (h_lo < 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
    }
    if h_lo.abs() <= h_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Product of derivatives along the cycle, recomputed from its points.
pub fn cycle_multiplier(params: MapParams, cycle: &Cycle) -> f64 {
    product_of_derivatives(params, &cycle.points)
}

/// `g(a) = f_a^period(1/2) - 1/2`; zero exactly when the critical point lies
/// on a cycle whose period divides `period`.
pub fn superstable_residual(a: f64, period: usize) -> f64 {
    iterate(MapParams::new_unchecked(a), CRITICAL_POINT, period) - CRITICAL_POINT
}

/// Parameter in `bracket` at which the critical point closes after `period`
/// steps, located by bisection with a final secant polish.
pub fn find_superstable(bracket: (f64, f64), period: usize) -> Result<f64> {
    if !period.is_power_of_two() {
        return Err(invalid(format!("period {period} is not a power of two")));
    }
    let (lo, hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let g = |a: f64| superstable_residual(a, period);
    let (g_lo, g_hi) = (g(lo), g(hi));
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if (g_lo < 0.0) == (g_hi < 0.0) {
        return Err(Error::BadBracket { lo, hi, g_lo, g_hi });
    }
    let mut best = bisect(&g, lo, hi, g_lo);
    let mut g_best = g(best);

    // secant polish across the final one-ulp bracket
    let other = if g(best.next_up()).signum() != g_best.signum() {
        best.next_up()
    } else {
        best.next_down()
    };
    let g_other = g(other);
    if g_other != g_best {
        let cand = best - g_best * (other - best) / (g_other - g_best);
        let g_cand = g(cand);
        if cand.is_finite() && g_cand.abs() < g_best.abs() {
            best = cand;
            g_best = g_cand;
        }
    }

    if g_best.abs() < SUPERSTABLE_RESIDUAL {
        Ok(best)
    } else {
        Err(Error::NoConvergence(format!(
            "superstable search for period {period} stalled at a = {best} with |g| = {:e}",
            g_best.abs()
        )))
    }
}

/// Superstable parameters for periods `1, 2, 4, ...`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuperstableSequence {
    entries: Vec<(usize, f64)>,
}

impl SuperstableSequence {
    /// Wraps arbitrary `(period, a)` pairs without checking them; see
    /// [`SuperstableSequence::verify`].
    pub fn from_entries(entries: Vec<(usize, f64)>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, a)| a)
    }

    /// Checks the ladder shape: periods `2^k` in order, strictly increasing
    /// parameters, and each parameter closing the critical orbit.
    pub fn verify(&self) -> Result<()> {
        for (k, &(period, a)) in self.entries.iter().enumerate() {
            if period != 1 << k {
                return Err(invalid(format!(
                    "entry {k} has period {period}, expected {}",
                    1usize << k
                )));
            }
            let g = superstable_residual(a, period).abs();
            if g >= 1e-12 {
                return Err(invalid(format!("entry {k}: |g(a)| = {g:e}")));
            }
        }
        for w in self.entries.windows(2) {
            if !(w[1].1 > w[0].1) {
                return Err(invalid(format!(
                    "parameters {} and {} not increasing",
                    w[0].1, w[1].1
                )));
            }
        }
        Ok(())
    }
}

/// Builds the superstable ladder through `max_period` (a power of two, at
/// most [`MAX_LADDER_PERIOD`]).
///
/// Each rung is bracketed by scanning `g` upward from the previous rung. The
/// scan spacing is `1e-3`, shrunk to a sixteenth of the previous gap once the
/// gaps get that small, so the sign change at the next rung is never stepped
/// over.
pub fn superstable_ladder(max_period: usize) -> Result<SuperstableSequence> {
    if !max_period.is_power_of_two() || max_period > MAX_LADDER_PERIOD {
        return Err(invalid(format!(
            "max_period {max_period} must be a power of two no larger than {MAX_LADDER_PERIOD}"
        )));
    }
    let mut entries: Vec<(usize, f64)> = Vec::new();
    let mut period = 1;
    while period <= max_period {
        let (start, spacing) = match entries.as_slice() {
            [] => (1.0, LADDER_SCAN_STEP),
            [(_, prev)] => (*prev, LADDER_SCAN_STEP),
            [.., (_, before), (_, prev)] => (*prev, LADDER_SCAN_STEP.min((prev - before) / 16.0)),
        };
        let bracket = scan_for_sign_change(period, start, spacing)?;
        let a = find_superstable(bracket, period)?;
        entries.push((period, a));
        period *= 2;
    }
    Ok(SuperstableSequence { entries })
}

fn scan_for_sign_change(period: usize, start: f64, spacing: f64) -> Result<(f64, f64)> {
    let g = |a: f64| superstable_residual(a, period);
    let mut lo = start + spacing;
    let g_first = g(lo);
    let mut i = 1u32;
    loop {
        i += 1;
        let hi = (start + spacing * i as f64).min(LADDER_SCAN_END);
        let g_hi = g(hi);
        if (g_hi < 0.0) != (g_first < 0.0) || g_hi == 0.0 {
            return Ok((lo, hi));
        }
        if hi >= LADDER_SCAN_END {
            return Err(Error::BadBracket {
                lo: start + spacing,
                hi,
                g_lo: g_first,
                g_hi,
            });
        }
        lo = hi;
    }
}

/// Ratios `(a_k - a_{k-1}) / (a_{k+1} - a_k)` for `k = 1 ..= len - 2`.
pub fn feigenbaum_delta(seq: &SuperstableSequence) -> Result<Vec<f64>> {
    let a: Vec<f64> = seq.parameters().collect();
    if a.len() < 3 {
        return Err(invalid(format!(
            "need at least 3 ladder entries, got {}",
            a.len()
        )));
    }
    if let Some(w) = a.windows(2).find(|w| (w[1] - w[0]).abs() < 1e-14) {
        return Err(Error::DegenerateSpacing(w[0], w[1]));
    }
    Ok(a.windows(3)
        .map(|w| (w[1] - w[0]) / (w[2] - w[1]))
        .collect())
}

/// Geometric extrapolation `a_k + (a_k - a_{k-1}) / (delta - 1)` from the
/// last two ladder entries.
pub fn accumulation_point(seq: &SuperstableSequence, delta: f64) -> Result<f64> {
    let e = seq.entries();
    if e.len() < 2 {
        return Err(invalid("need at least 2 ladder entries"));
    }
    if !(delta > 1.0) {
        return Err(invalid(format!("delta {delta} must exceed 1")));
    }
    let last = e[e.len() - 1].1;
    let prev = e[e.len() - 2].1;
    Ok(last + (last - prev) / (delta - 1.0))
}
