//! Cross-module checks through the public API.

use logistic_core::cycles::{detect_cycle, refine_cycle, superstable_ladder};
use logistic_core::ergodic::{attractor_cardinality, bifurcation_scan, lyapunov, ScanSettings};
use logistic_core::map::orbit;
use logistic_core::picard::scalar_bridge;
use logistic_core::{BridgeClass, InitialState, MapParams};

// At each superstable rung the attractor has exactly that period, in
// the diagram, in cycle detection and in the bridge alike.
#[test]
fn periods_agree_across_modules() {
    let seq = superstable_ladder(16).unwrap();
    for &(period, a) in seq.entries() {
        let params = MapParams::new(a).unwrap();
        let o = orbit(params, 0.5, 4096, 20_000).unwrap();
        let cycle = detect_cycle(&o, 1e-8, 64)
            .unwrap()
            .expect("cycle at a superstable parameter");
        assert_eq!(cycle.period, period, "a = {a}");
        let refined = refine_cycle(params, cycle.points[0], period).unwrap();
        assert!(
            refined.multiplier.abs() < 1e-6,
            "a = {a}: multiplier {}",
            refined.multiplier
        );

        let tail = &o.states[o.states.len() - 256..];
        assert_eq!(attractor_cardinality(tail, 1e-6), period);

        let lam = lyapunov(params, 0.3, 10_000, 10_000)
            .unwrap()
            .exponent
            .value();
        assert!(lam < -0.5, "a = {a}: exponent {lam}");

        let bridge = scalar_bridge(a, 0.3, 20_000, 1e-10).unwrap();
        match bridge.classification {
            BridgeClass::Converged { .. } => assert_eq!(period, 1),
            BridgeClass::Cycle { period: p } => assert_eq!(p, period),
            BridgeClass::NonConvergent => panic!("a = {a}: bridge did not settle"),
        }
    }
}

#[test]
fn diagram_columns_match_detected_cycles() {
    let settings = ScanSettings {
        initial: InitialState::Critical,
        ..ScanSettings::new(2.9, 3.5, 13)
    };
    let data = bifurcation_scan(&settings).unwrap();
    assert_eq!(data.len(), 13);
    for (a, samples) in data.a_values.iter().zip(&data.samples) {
        let params = MapParams::new(*a).unwrap();
        let o = orbit(params, 0.5, 4096, 10_000).unwrap();
        let expected = detect_cycle(&o, 1e-6, 64).unwrap().map_or(0, |c| c.period);
        assert_eq!(attractor_cardinality(samples, 1e-6), expected, "a = {a}");
    }
}

#[test]
fn chaos_has_positive_exponent_and_no_cycle() {
    for a in [3.7, 3.9, 4.0] {
        let params = MapParams::new(a).unwrap();
        let lam = lyapunov(params, 0.3, 100_000, 10_000)
            .unwrap()
            .exponent
            .value();
        assert!(lam > 0.3, "a = {a}: exponent {lam}");
        let o = orbit(params, 0.3, 4096, 10_000).unwrap();
        assert!(detect_cycle(&o, 1e-8, 64).unwrap().is_none());
        let bridge = scalar_bridge(a, 0.3, 10_000, 1e-10).unwrap();
        assert_eq!(bridge.classification, BridgeClass::NonConvergent);
    }
}
