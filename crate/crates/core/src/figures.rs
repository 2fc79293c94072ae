//! Data tables behind the standard leakage plots.

use std::f64::consts::TAU;

use crate::binning::{bin_density, staircase, BinningScheme};
use crate::error::Result;
use crate::io::{sweep_table, Table};
use crate::response::{default_domain, discretize, GaussianParams, ResponseModel};
use crate::sweep::{run_sweep, Axis, Scenario, SweepParam, SweepSpec};

/// A detector response on a fine grid next to its binned staircases, one per
/// width in `widths`. Columns: `t_ps`, `density_per_ps`, `binned_<w>ps`...
pub fn response_staircases(model: &ResponseModel, widths: &[f64], dt: f64) -> Result<Table> {
    let (a, b) = default_domain(model, model, dt);
    let fine = discretize(model, a, b, dt)?;
    let mut header = vec!["t_ps".to_string(), "density_per_ps".to_string()];
    let mut stairs = Vec::with_capacity(widths.len());
    for &w in widths {
        header.push(format!("binned_{w}ps"));
        let binned = bin_density(&fine, &BinningScheme::new(w, 0.0, a, b)?)?;
        stairs.push(staircase(&binned, &fine));
    }
    let mut table = Table::new(header);
    for (i, &v) in fine.values().iter().enumerate() {
        let mut row = vec![fine.center(i), v];
        row.extend(stairs.iter().map(|s| s[i]));
        table.rows.push(row);
    }
    Ok(table)
}

/// MI over a delay axis crossed with a bin-width axis.
pub fn width_scan(reference: ResponseModel, deltas: &[f64], widths: &[f64], phase: f64, dt: f64) -> Result<Table> {
    let mut base = Scenario::new(reference, 0.0, widths[0]).with_phase(phase);
    base.dt = dt;
    let spec = SweepSpec {
        base,
        axis1: Axis::new(SweepParam::DeltaT0, deltas.to_vec())?,
        axis2: Some(Axis::new(SweepParam::BinWidth, widths.to_vec())?),
    };
    Ok(sweep_table(&run_sweep(&spec)?))
}

/// MI versus binning phase over two full periods for each width. Phases are
/// `j * w / points_per_period`, so the second period repeats the first
/// partition exactly. Columns: `bin_width_ps`, `phase_ps`, `phase_rad`,
/// `mi_bits`.
pub fn phase_scan(
    reference: ResponseModel,
    delta_t0: f64,
    widths: &[f64],
    points_per_period: usize,
    dt: f64,
) -> Result<Table> {
    let mut table = Table::new(
        ["bin_width_ps", "phase_ps", "phase_rad", "mi_bits"]
            .map(String::from)
            .to_vec(),
    );
    for &w in widths {
        let mut base = Scenario::new(reference, delta_t0, w);
        base.dt = dt;
        let js: Vec<usize> = (0..=2 * points_per_period).collect();
        let phases: Vec<f64> = js.iter().map(|&j| w * j as f64 / points_per_period as f64).collect();
        let result = run_sweep(&SweepSpec::single(base, Axis::new(SweepParam::Phase, phases)?))?;
        for (j, row) in js.iter().zip(&result.rows) {
            let angle = TAU * *j as f64 / points_per_period as f64;
            table.rows.push(vec![w, row.x1, angle, row.mi_bits]);
        }
    }
    Ok(table)
}

/// Two Gaussian responses `delta_t0` apart and their equal-weight mixture.
/// Columns: `t_ps`, `detector0_per_ps`, `detector1_per_ps`, `half_sum_per_ps`.
pub fn overlap_profiles(mu: f64, fwhm: f64, delta_t0: f64, dt: f64) -> Result<Table> {
    let m0 = ResponseModel::gaussian(GaussianParams::new(mu, fwhm)?)?;
    let m1 = m0.shift_model(delta_t0);
    let (a, b) = default_domain(&m0, &m1, dt);
    let d0 = discretize(&m0, a, b, dt)?;
    let d1 = discretize(&m1, a, b, dt)?;
    let mut table = Table::new(
        ["t_ps", "detector0_per_ps", "detector1_per_ps", "half_sum_per_ps"]
            .map(String::from)
            .to_vec(),
    );
    for (i, (x, y)) in d0.values().iter().zip(d1.values()).enumerate() {
        table.rows.push(vec![d0.center(i), *x, *y, 0.5 * (x + y)]);
    }
    Ok(table)
}

/// MI over a Gaussian FWHM axis crossed with a bin-width axis.
pub fn fwhm_scan(mu: f64, delta_t0: f64, fwhms: &[f64], widths: &[f64], phase: f64, dt: f64) -> Result<Table> {
    let reference = ResponseModel::gaussian(GaussianParams::new(mu, fwhms[0])?)?;
    let mut base = Scenario::new(reference, delta_t0, widths[0]).with_phase(phase);
    base.dt = dt;
    let spec = SweepSpec {
        base,
        axis1: Axis::new(SweepParam::Fwhm, fwhms.to_vec())?,
        axis2: Some(Axis::new(SweepParam::BinWidth, widths.to_vec())?),
    };
    Ok(sweep_table(&run_sweep(&spec)?))
}
