//! The logistic map `x_{n+1} = a x_n (1 - x_n)`.
//!
//! All arithmetic is plain `f64`, evaluated in a fixed order, so orbits are
//! bit-reproducible.

use crate::error::{invalid, Error, Result};

/// Orbits whose magnitude exceeds this are stopped and flagged as escaped.
pub const ESCAPE_RADIUS: f64 = 1e6;

/// The location of the maximum of `a x (1 - x)`.
pub const CRITICAL_POINT: f64 = 0.5;

/// Growth parameter `a` of the normalised logistic map.
///
/// Dynamics on `[0, 1]` are closed only for `0 <= a <= 4`; values outside
/// that range can be built with [`MapParams::new_unchecked`] and are tagged
/// as out of domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams {
    a: f64,
    in_domain: bool,
}

impl MapParams {
    pub fn new(a: f64) -> Result<Self> {
        if (0.0..=4.0).contains(&a) {
            Ok(Self { a, in_domain: true })
        } else {
            Err(invalid(format!("growth parameter a = {a} outside [0, 4]")))
        }
    }

    /// Builds parameters without the `[0, 4]` check. Used to study escape
    /// for `a > 4`.
    pub fn new_unchecked(a: f64) -> Self {
        Self {
            a,
            in_domain: (0.0..=4.0).contains(&a),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn in_domain(&self) -> bool {
        self.in_domain
    }

    /// Height of the parabola at the critical point, `a / 4`.
    pub fn peak(&self) -> f64 {
        step(*self, CRITICAL_POINT)
    }
}

/// The raw quadratic recurrence `x_{n+1} = x_n (a - b x_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawQuadraticParams {
    pub a: f64,
    pub b: f64,
}

/// Result of [`normalize_quadratic`]: the normalised map and the factor
/// `b / a` with `y = scale * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalization {
    pub params: MapParams,
    pub scale: f64,
}

impl Normalization {
    /// Maps a state of the raw recurrence to the normalised one.
    pub fn to_normalized(&self, x: f64) -> f64 {
        self.scale * x
    }
}

/// One application of the map.
#[inline]
pub fn step(params: MapParams, x: f64) -> f64 {
    params.a * x * (1.0 - x)
}

/// One application of the raw recurrence `x (a - b x)`.
#[inline]
pub fn step_raw(raw: RawQuadraticParams, x: f64) -> f64 {
    x * (raw.a - raw.b * x)
}

/// Rescales `x (a - b x)` to `a y (1 - y)` through `y = (b / a) x`.
pub fn normalize_quadratic(raw: RawQuadraticParams) -> Result<Normalization> {
    if raw.a == 0.0 || !raw.a.is_finite() {
        return Err(Error::DegenerateParameter(format!(
            "a = {} makes the substitution y = (b/a) x undefined",
            raw.a
        )));
    }
    if !(raw.b > 0.0) || !raw.b.is_finite() {
        return Err(Error::DegenerateParameter(format!(
            "b = {} must be positive",
            raw.b
        )));
    }
    Ok(Normalization {
        params: MapParams::new_unchecked(raw.a),
        scale: raw.b / raw.a,
    })
}

/// `d/dx [a x (1 - x)] = a (1 - 2x)`.
#[inline]
pub fn derivative(params: MapParams, x: f64) -> f64 {
    params.a * (1.0 - 2.0 * x)
}

/// A finite trajectory of the map.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub params: MapParams,
    pub x0: f64,
    /// Steps iterated and discarded before `states[0]`.
    pub transient: usize,
    /// Recorded states; `states[k]` is the state after `transient + k` steps.
    pub states: Vec<f64>,
    /// Iteration stopped because a state left `[-ESCAPE_RADIUS, ESCAPE_RADIUS]`.
    pub escaped: bool,
    /// First step (counted from `x0`, which is step 0) whose state lies
    /// outside `[0, 1]`, i.e. the population went negative or above one.
    pub exit_step: Option<usize>,
}

impl Orbit {
    pub fn last(&self) -> Option<f64> {
        self.states.last().copied()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Iterates `transient` steps from `x0`, then records `n` states.
pub fn orbit(params: MapParams, x0: f64, n: usize, transient: usize) -> Result<Orbit> {
    if n == 0 {
        return Err(invalid("orbit length n must be at least 1"));
    }
    let mut states = Vec::with_capacity(n);
    let mut exit_step = None;
    let mut escaped = false;
    let mut x = x0;
    let total = transient + n;
    for k in 0..total {
        if exit_step.is_none() && !(0.0..=1.0).contains(&x) {
            exit_step = Some(k);
        }
        if !(x.abs() <= ESCAPE_RADIUS) {
            escaped = true;
            break;
        }
        if k >= transient {
            states.push(x);
        }
        if k + 1 < total {
            x = step(params, x);
        }
    }
    Ok(Orbit {
        params,
        x0,
        transient,
        states,
        escaped,
        exit_step,
    })
}

/// Fixed points of the map that lie in `[0, 1]`: `0`, plus `(a - 1) / a`
/// once `a > 1`.
pub fn fixed_points(params: MapParams) -> Vec<f64> {
    let a = params.a;
    if a > 1.0 {
        vec![0.0, (a - 1.0) / a]
    } else {
        vec![0.0]
    }
}

/// Which fixed point attracts, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixedPointClass {
    /// `a < 1`: the origin attracts and populations die out.
    ExtinctionStable,
    /// `1 < a < 3`: `(a - 1) / a` attracts.
    InteriorStable,
    /// `a = 1` or `a = 3`: the relevant multiplier has modulus one.
    Marginal,
    /// `a > 3`: both fixed points repel.
    Unstable,
}

impl FixedPointClass {
    pub fn name(&self) -> &'static str {
        match self {
            FixedPointClass::ExtinctionStable => "ExtinctionStable",
            FixedPointClass::InteriorStable => "InteriorStable",
            FixedPointClass::Marginal => "Marginal",
            FixedPointClass::Unstable => "Unstable",
        }
    }
}

pub fn classify_fixed_point(params: MapParams) -> FixedPointClass {
    let a = params.a;
    if a < 1.0 {
        FixedPointClass::ExtinctionStable
    } else if a == 1.0 || a == 3.0 {
        FixedPointClass::Marginal
    } else if a < 3.0 {
        FixedPointClass::InteriorStable
    } else {
        FixedPointClass::Unstable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn p(a: f64) -> MapParams {
        MapParams::new(a).unwrap()
    }

    #[test]
    fn step_examples() {
        assert_eq!(step(p(3.2), 0.0), 0.0);
        assert_eq!(step(p(4.0), 0.5), 1.0);
        assert_eq!(step(p(2.0), 0.5), 0.5);
    }

    #[test]
    fn params_domain() {
        assert!(MapParams::new(4.5).is_err());
        assert!(MapParams::new(-0.1).is_err());
        assert!(MapParams::new(f64::NAN).is_err());
        let wild = MapParams::new_unchecked(4.5);
        assert!(!wild.in_domain());
        assert!(p(4.0).in_domain());
        assert_eq!(p(3.0).peak(), 0.75);
    }

    #[test]
    fn normalize_unit_scale() {
        let n = normalize_quadratic(RawQuadraticParams { a: 3.2, b: 3.2 }).unwrap();
        assert_eq!(n.params.a(), 3.2);
        assert_eq!(n.scale, 1.0);
    }

    #[test]
    fn normalize_scale_two_brute_force() {
        let raw = RawQuadraticParams { a: 2.0, b: 4.0 };
        let n = normalize_quadratic(raw).unwrap();
        assert_eq!(n.params.a(), 2.0);
        assert_eq!(n.scale, 2.0);
        // y_n = 2 x_n must follow the normalised map when x_n follows the raw one.
        let mut x = 0.1;
        for _ in 0..50 {
            let y = n.to_normalized(x);
            let x_next = step_raw(raw, x);
            assert_abs_diff_eq!(n.to_normalized(x_next), step(n.params, y), epsilon = 1e-14);
            x = x_next;
        }
    }

    #[test]
    fn normalize_rejects_degenerate() {
        for raw in [
            RawQuadraticParams { a: 0.0, b: 1.0 },
            RawQuadraticParams { a: 2.0, b: 0.0 },
            RawQuadraticParams { a: 2.0, b: -1.0 },
        ] {
            let err = normalize_quadratic(raw).unwrap_err();
            assert_eq!(err.name(), "DegenerateParameter");
        }
    }

    #[test]
    fn orbit_extinction_below_one() {
        let o = orbit(p(0.95), 0.6, 200, 0).unwrap();
        assert!(o.last().unwrap() < 1e-3);
        assert!(o.states.windows(2).all(|w| w[1] < w[0]));
        assert!(!o.escaped);
        assert_eq!(o.exit_step, None);
    }

    #[test]
    fn orbit_escape_above_four() {
        let o = orbit(MapParams::new_unchecked(4.5), 0.5, 10, 0).unwrap();
        assert!(o.escaped);
        // 0.5 -> 1.125 -> negative: above one at step 1, extinct at step 2
        assert_eq!(o.exit_step, Some(1));
        assert!(o.states[1] > 1.0);
        assert!(o.states[2] < 0.0);
        assert!(o.states.iter().all(|x| x.abs() <= ESCAPE_RADIUS));
    }

    #[test]
    fn orbit_converges_to_interior_fixed_point() {
        let o = orbit(p(2.5), 0.3, 500, 0).unwrap();
        // brute-force oracle: plain loop
        let mut x = 0.3;
        for _ in 0..499 {
            x = 2.5 * x * (1.0 - x);
        }
        assert_eq!(o.last().unwrap(), x);
        assert_abs_diff_eq!(x, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn orbit_transient_bookkeeping() {
        let full = orbit(p(3.7), 0.2, 30, 0).unwrap();
        let tail = orbit(p(3.7), 0.2, 10, 20).unwrap();
        assert_eq!(&full.states[20..], &tail.states[..]);
        assert_eq!(tail.transient, 20);
        assert!(orbit(p(3.7), 0.2, 0, 5).is_err());
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(fixed_points(p(2.0)), vec![0.0, 0.5]);
        assert_eq!(fixed_points(p(0.95)), vec![0.0]);
        let fp = fixed_points(p(3.2));
        assert_abs_diff_eq!(fp[1], 0.6875, epsilon = 1e-15);
        assert!((step(p(3.2), fp[1]) - fp[1]).abs() < 1e-12);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative(p(3.2), 0.5), 0.0);
        assert_abs_diff_eq!(derivative(p(2.5), 0.6), -0.5, epsilon = 1e-15);
        assert_eq!(derivative(p(4.0), 0.0), 4.0);
        // finite-difference oracle at the fixed point
        let h = 1e-6;
        let fd = (step(p(2.5), 0.6 + h) - step(p(2.5), 0.6 - h)) / (2.0 * h);
        assert_abs_diff_eq!(fd, -0.5, epsilon = 1e-8);
    }

    #[test]
    fn classification() {
        assert_eq!(
            classify_fixed_point(p(0.95)),
            FixedPointClass::ExtinctionStable
        );
        assert_eq!(
            classify_fixed_point(p(2.5)),
            FixedPointClass::InteriorStable
        );
        assert_eq!(classify_fixed_point(p(3.2)), FixedPointClass::Unstable);
        assert_eq!(classify_fixed_point(p(1.0)), FixedPointClass::Marginal);
        assert_eq!(classify_fixed_point(p(3.0)), FixedPointClass::Marginal);
    }

    proptest! {
        #[test]
        fn intercepts_vanish(a in 0.0f64..=4.0) {
            prop_assert_eq!(step(p(a), 0.0), 0.0);
            prop_assert_eq!(step(p(a), 1.0), 0.0);
        }

        #[test]
        fn maximum_is_quarter_a_at_half(a in 0.01f64..=4.0) {
            let params = p(a);
            let n = 20_000;
            let (mut best_x, mut best) = (0.0, f64::NEG_INFINITY);
            for i in 0..=n {
                let x = i as f64 / n as f64;
                let y = step(params, x);
                if y > best {
                    best = y;
                    best_x = x;
                }
            }
            prop_assert!((best - a / 4.0).abs() < 1e-9);
            prop_assert!((best_x - 0.5).abs() < 1e-9);
        }

        #[test]
        fn orbits_stay_in_unit_interval(a in 0.0f64..=4.0, x0 in 0.0f64..=1.0) {
            let o = orbit(p(a), x0, 500, 0).unwrap();
            prop_assert!(!o.escaped);
            prop_assert!(o.states.iter().all(|x| (0.0..=1.0).contains(x)));
            for w in o.states.windows(2) {
                prop_assert_eq!(w[1], step(p(a), w[0]));
            }
        }

        #[test]
        fn fixed_point_residuals(a in 0.0f64..=4.0) {
            for x in fixed_points(p(a)) {
                prop_assert!((step(p(a), x) - x).abs() < 1e-12);
            }
        }

        #[test]
        fn derivative_matches_central_difference(a in 0.1f64..=4.0, x in 0.0f64..=1.0) {
            let h = 1e-5;
            let fd = (step(p(a), x + h) - step(p(a), x - h)) / (2.0 * h);
            let exact = derivative(p(a), x);
            prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0));
        }

        #[test]
        fn normalization_round_trip(a in 0.5f64..=3.5, b in 0.1f64..10.0, y0 in 0.0f64..=1.0) {
            let raw = RawQuadraticParams { a, b };
            let n = normalize_quadratic(raw).unwrap();
            let mut x = y0 / n.scale;
            let mut y = y0;
            for _ in 0..100 {
                x = step_raw(raw, x);
                y = step(n.params, y);
                prop_assert!((n.to_normalized(x) - y).abs() < 1e-12);
            }
        }
    }
}
