//! Simulated detections seen through public bins: plug-in leakage estimate
//! against the analytic value, and the eavesdropper's MAP guessing rate.
//!
//! Run: cargo run --release --example eavesdropper

use timeleak::info::mutual_information_binned;
use timeleak::response::{GaussianParams, ResponseModel};
use timeleak::sim::{bootstrap_mi, guessing_success, simulate_stream, SimConfig};
use timeleak::sweep::Scenario;

fn main() -> timeleak::Result<()> {
    for (fwhm, delta, width) in [(1000.0, 350.0, 500.0), (1000.0, 0.0, 500.0), (20.0, 100.0, 1.0)] {
        let reference = ResponseModel::gaussian(GaussianParams::new(0.0, fwhm)?)?;
        let scenario = Scenario::new(reference, delta, width);
        let (model0, model1) = scenario.models();
        let cfg = SimConfig {
            model0,
            model1,
            prior: scenario.prior,
            scheme: scenario.scheme()?,
            n_events: 1_000_000,
            seed: 2024,
            dt: scenario.dt,
        };
        let events = simulate_stream(&cfg)?;
        let channel = scenario.channel()?;
        let est = bootstrap_mi(&events, 100, 1);
        println!("FWHM {fwhm} ps, delay {delta} ps, bins {width} ps");
        println!("  analytic MI  {:.5} bits", mutual_information_binned(&channel));
        println!("  plug-in MI   {:.5} +/- {:.5} bits", est.mi_bits, est.std_error);
        println!("  MAP success  {:.4}", guessing_success(&events, &channel));
    }
    Ok(())
}
