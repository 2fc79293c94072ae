//! Reference detector response: mode, FWHM and binned staircases.
//!
//! Run: cargo run --example detector_response

use timeleak::binning::{bin_density, BinningScheme};
use timeleak::response::{default_domain, discretize, measure_fwhm, ResponseModel};

fn main() -> timeleak::Result<()> {
    let emg = ResponseModel::reference_emg();
    let p = emg.emg_params().expect("EMG model");
    println!("EMG detector: tau_e={} ps, tau_g={} ps, t0={} ps", p.tau_e, p.tau_g, p.t0);
    println!("  peak density {:.4e} /ps at {} ps", emg.eval_density(p.t0), emg.peak_time());
    println!("  FWHM {:.3} ps", measure_fwhm(&emg));

    let (a, b) = default_domain(&emg, &emg, 1.0);
    let fine = discretize(&emg, a, b, 1.0)?;
    println!("  fine grid: {} cells on [{a}, {b}) ps", fine.len());

    for width in [500.0, 1000.0] {
        let binned = bin_density(&fine, &BinningScheme::new(width, 0.0, a, b)?)?;
        let edges = binned.scheme().edges();
        println!("\n{width} ps bins (showing bins with p > 1e-3):");
        for (k, &prob) in binned.probs().iter().enumerate() {
            if prob > 1e-3 {
                println!("  [{:>7.1}, {:>7.1})  {:.4}", edges[k], edges[k + 1], prob);
            }
        }
        println!("  total mass {:.12}", binned.probs().iter().sum::<f64>());
    }
    Ok(())
}
