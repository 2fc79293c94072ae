use timeleak::binning::BinningScheme;
use timeleak::compensation::{
    build_correlogram, closed_loop, coincidence_correlograms, compensate, estimate_offset,
};
use timeleak::response::{GaussianParams, ResponseModel};
use timeleak::sim::{bootstrap_mi, simulate_coincidences, CoincidenceConfig, CoincidenceStreams};

const STEP: f64 = 10.0;
const WINDOW: f64 = 10_000.0;

fn streams(fwhm: f64, delta: f64, n: usize, seed: u64) -> CoincidenceStreams {
    let model = ResponseModel::gaussian(GaussianParams::new(0.0, fwhm).unwrap()).unwrap();
    simulate_coincidences(&CoincidenceConfig::with_alice_delay(model, delta, n, seed)).unwrap()
}

#[test]
fn offset_estimate_recovers_the_delay() {
    let s = streams(1000.0, 350.0, 100_000, 21);
    let (plus, minus) = coincidence_correlograms(&s, WINDOW, STEP).unwrap();
    let est = estimate_offset(&plus, &minus).unwrap();
    let tol = STEP.max(3.0 * est.confidence_width);
    assert!((est.delta + 350.0).abs() <= tol, "{est:?}");
}

#[test]
fn identical_correlograms_have_zero_offset() {
    let s = streams(1000.0, 350.0, 20_000, 22);
    let (plus, _) = coincidence_correlograms(&s, WINDOW, STEP).unwrap();
    assert!(estimate_offset(&plus, &plus).unwrap().delta.abs() <= STEP);
}

#[test]
fn closed_loop_removes_the_offset() {
    for (k, delta) in [100.0, 350.0, 800.0].into_iter().enumerate() {
        let run = closed_loop(&streams(1000.0, delta, 100_000, 30 + k as u64), WINDOW, STEP).unwrap();
        assert!(run.after.delta.abs() <= STEP, "delay {delta}: residual {}", run.after.delta);
        assert!((run.before.delta + delta).abs() <= STEP.max(3.0 * run.before.confidence_width));
    }
}

#[test]
fn compensation_removes_the_leakage() {
    let s = streams(500.0, 350.0, 1_000_000, 40);
    let run = closed_loop(&s, WINDOW, STEP).unwrap();
    let scheme = BinningScheme::new(STEP, 0.0, -20_000.0, 20_000.0).unwrap();
    let before = bootstrap_mi(&s.delay_events(&scheme).unwrap(), 20, 1);
    let after = bootstrap_mi(&run.compensated.delay_events(&scheme).unwrap(), 20, 1);
    assert!(before.mi_bits >= 0.1, "{before:?}");
    assert!(after.mi_bits <= 0.02, "{after:?}");
}

#[test]
fn shifting_one_side_shifts_the_peak() {
    let s = streams(1000.0, 350.0, 50_000, 50);
    let alice = s.alice_times();
    let bob = s.bob_times(1);
    let base = build_correlogram(&alice, &bob, WINDOW, STEP).unwrap();
    for c in [-1234.0, 40.0, 2500.0] {
        let moved = build_correlogram(&alice, &compensate(&bob, -c), WINDOW, STEP).unwrap();
        let shift = estimate_offset(&moved, &base).unwrap().delta;
        assert!((shift - c).abs() <= STEP, "c = {c}: {shift}");
    }
}

#[test]
fn compensation_is_an_involution() {
    let t = vec![-3.5, 0.0, 12.25, 1e6];
    assert_eq!(compensate(&compensate(&t, 350.0), -350.0), t);
    assert_eq!(compensate(&t, 0.0), t);
}
