//! Leakage against the start time (phase) of binning.
//!
//! For each bin width the curve repeats with a period of one bin width.
//!
//! Run: cargo run --release --example binning_phase

use std::f64::consts::PI;

use timeleak::figures::phase_scan;
use timeleak::response::{GaussianParams, ResponseModel};

fn main() -> timeleak::Result<()> {
    let reference = ResponseModel::gaussian(GaussianParams::new(0.0, 1000.0)?)?;
    let points = 20;
    let table = phase_scan(reference, 350.0, &[500.0, 1000.0, 2000.0], points, 1.0)?;

    for chunk in table.rows.chunks(2 * points + 1) {
        let width = chunk[0][0];
        let mi: Vec<f64> = chunk.iter().map(|r| r[3]).collect();
        let (lo, hi) = mi.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let periodic = (0..points).all(|j| mi[j] == mi[j + points]);
        println!("width {width:>6} ps: MI in [{lo:.5}, {hi:.5}] bits, period = width: {periodic}");
        for r in chunk.iter().step_by(5) {
            println!("    phase {:>5.2} pi  {:.5}", r[2] / PI, r[3]);
        }
    }
    Ok(())
}
