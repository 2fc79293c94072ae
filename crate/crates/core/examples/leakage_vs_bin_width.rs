//! Leakage against public bin width for the reference detector pair.
//!
//! Widening the bins does not reduce the mutual information monotonically;
//! the local minima and maxima of the curve are listed at the end.
//!
//! Run: cargo run --release --example leakage_vs_bin_width [delta_t0_ps]

use timeleak::response::ResponseModel;
use timeleak::sweep::{find_extrema, run_sweep, Axis, Scenario, SweepParam, SweepSpec};

fn main() -> timeleak::Result<()> {
    let delta: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(350.0);
    let base = Scenario::new(ResponseModel::reference_emg(), delta, 500.0);
    println!("delta_t0 = {delta} ps, no-binning reference = {:.5} bits", base.continuous_mi()?);

    let widths: Vec<f64> = std::iter::once(1.0).chain((1..=400).map(|k| 10.0 * k as f64)).collect();
    let result = run_sweep(&SweepSpec::single(base, Axis::new(SweepParam::BinWidth, widths)?))?;

    println!("{:>10} {:>10}", "width_ps", "mi_bits");
    for row in result.rows.iter().step_by(20) {
        println!("{:>10} {:>10.5}", row.x1, row.mi_bits);
    }
    let extrema = find_extrema(&result)?;
    println!("\n{} interior extrema:", extrema.len());
    for e in extrema.iter().take(20) {
        println!("  {:?} at {} ps: {:.5} bits", e.kind, e.value, e.mi_bits);
    }
    Ok(())
}
