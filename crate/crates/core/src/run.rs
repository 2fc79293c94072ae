//! Dispatch a [`RunConfig`] and write its CSV outputs plus a manifest.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::binning::BinningScheme;
use crate::compensation::{closed_loop, ClosedLoop};
use crate::config::{FigureName, RunConfig, Subcommand};
use crate::error::{Error, Result};
use crate::figures;
use crate::info::mutual_information_binned;
use crate::io::{sweep_table, write_correlogram, write_events, write_manifest, Table};
use crate::response::ResponseModel;
use crate::sim::{
    bootstrap_mi, guessing_success, simulate_coincidences, simulate_stream, CoincidenceConfig,
    DetectorPair, SimConfig,
};
use crate::sweep::{run_sweep, PhaseSetting, Scenario, SweepSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Execute `cfg`, writing into `out_dir` (created if needed). Returns the
/// written files, manifest last.
pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = match cfg.subcommand {
        Subcommand::Sweep => run_sweep_cmd(cfg, out_dir)?,
        Subcommand::Simulate => run_simulate(cfg, out_dir)?,
        Subcommand::Compensate => run_compensate(cfg, out_dir)?,
        Subcommand::Figure => run_figure(cfg, out_dir)?,
    };
    let manifest = out_dir.join("manifest.csv");
    let entries = std::iter::once(("tool_version", TOOL_VERSION))
        .chain(cfg.resolved.iter().map(|(k, v)| (k.as_str(), v.as_str())));
    write_manifest(entries, BufWriter::new(File::create(&manifest)?))?;
    written.push(manifest);
    Ok(written)
}

fn base_scenario(cfg: &RunConfig) -> Scenario {
    Scenario {
        reference: cfg.reference,
        delta_t0: cfg.delta_t0,
        prior: cfg.prior,
        bin_width: cfg.bin_width,
        phase: PhaseSetting::Ps(cfg.phase),
        dt: cfg.dt,
    }
}

fn save(table: &Table, out_dir: &Path, name: &str) -> Result<PathBuf> {
    let path = out_dir.join(name);
    table.write(BufWriter::new(File::create(&path)?))?;
    Ok(path)
}

fn save_summary(entries: &[(&str, String)], out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir.join("summary.csv");
    write_manifest(
        entries.iter().map(|(k, v)| (*k, v.as_str())),
        BufWriter::new(File::create(&path)?),
    )?;
    Ok(path)
}

fn run_sweep_cmd(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = SweepSpec {
        base: base_scenario(cfg),
        axis1: cfg.axis1.clone(),
        axis2: cfg.axis2.clone(),
    };
    let result = run_sweep(&spec)?;
    Ok(vec![save(&sweep_table(&result), out_dir, "sweep.csv")?])
}

fn run_simulate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let scenario = base_scenario(cfg);
    let (model0, model1) = scenario.models();
    let scheme = scenario.scheme()?;
    let sim = SimConfig {
        model0,
        model1,
        prior: cfg.prior,
        scheme,
        n_events: cfg.n_events,
        seed: cfg.seed,
        dt: cfg.dt,
    };
    let events = simulate_stream(&sim)?;
    let events_path = out_dir.join("events.csv");
    write_events(&events, BufWriter::new(File::create(&events_path)?))?;

    let channel = scenario.channel()?;
    let est = bootstrap_mi(&events, cfg.bootstrap, cfg.seed);
    let summary = [
        ("n_events", events.len().to_string()),
        ("n_bins", scheme.n_bins().to_string()),
        ("analytic_mi_bits", mutual_information_binned(&channel).to_string()),
        ("empirical_mi_bits", est.mi_bits.to_string()),
        ("bootstrap_se_bits", est.std_error.to_string()),
        ("guessing_success", guessing_success(&events, &channel).to_string()),
    ];
    Ok(vec![events_path, save_summary(&summary, out_dir)?])
}

fn run_compensate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let sim = CoincidenceConfig {
        alice: DetectorPair::with_delay(cfg.reference, cfg.delta_t0),
        bob: DetectorPair::matched(cfg.reference),
        prior: cfg.prior,
        n_pairs: cfg.n_coincidences,
        mean_spacing: cfg.mean_spacing,
        seed: cfg.seed,
        dt: cfg.dt,
    };
    let streams = simulate_coincidences(&sim)?;
    let ClosedLoop {
        before,
        after,
        plus_before,
        minus,
        plus_after,
        compensated,
    } = closed_loop(&streams, cfg.lag_window, cfg.lag_step)?;

    let mut written = Vec::new();
    for (name, corr) in [
        ("correlogram_plus_before.csv", &plus_before),
        ("correlogram_minus.csv", &minus),
        ("correlogram_plus_after.csv", &plus_after),
    ] {
        let path = out_dir.join(name);
        write_correlogram(corr, BufWriter::new(File::create(&path)?))?;
        written.push(path);
    }

    // Leakage in the coincidence delays an eavesdropper can reconstruct.
    let span = cfg.lag_window + cfg.reference.support().1 - cfg.reference.support().0 + cfg.delta_t0.abs();
    let scheme = BinningScheme::new(cfg.bin_width, cfg.phase, -span, span)?;
    let leak_before = bootstrap_mi(&streams.delay_events(&scheme)?, cfg.bootstrap, cfg.seed);
    let leak_after = bootstrap_mi(&compensated.delay_events(&scheme)?, cfg.bootstrap, cfg.seed);
    let summary = [
        ("n_coincidences", streams.pairs.len().to_string()),
        ("delta_before_ps", before.delta.to_string()),
        ("confidence_before_ps", before.confidence_width.to_string()),
        ("delta_after_ps", after.delta.to_string()),
        ("confidence_after_ps", after.confidence_width.to_string()),
        ("mi_before_bits", leak_before.mi_bits.to_string()),
        ("mi_before_se_bits", leak_before.std_error.to_string()),
        ("mi_after_bits", leak_after.mi_bits.to_string()),
        ("mi_after_se_bits", leak_after.std_error.to_string()),
    ];
    written.push(save_summary(&summary, out_dir)?);
    Ok(written)
}

fn run_figure(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let fig = cfg
        .figure
        .ok_or_else(|| Error::config("figure", "missing"))?;
    let first = cfg.axis1.values();
    let second = cfg.axis2.as_ref().map(|a| a.values()).unwrap_or(&[]);
    let name = format!("{fig}.csv");
    let path = match fig {
        FigureName::Fig1 => save(
            &figures::response_staircases(&cfg.reference, first, cfg.dt)?,
            out_dir,
            &name,
        )?,
        FigureName::Fig3 => save(
            &figures::width_scan(cfg.reference, first, second, cfg.phase, cfg.dt)?,
            out_dir,
            &name,
        )?,
        FigureName::Fig4 => save(
            &figures::phase_scan(
                cfg.reference,
                cfg.delta_t0,
                first,
                cfg.phase_points_per_period,
                cfg.dt,
            )?,
            out_dir,
            &name,
        )?,
        FigureName::Fig5 => {
            let mu = gaussian_mu(&cfg.reference);
            let mut paths = Vec::new();
            for &fwhm in first {
                let table = figures::overlap_profiles(mu, fwhm, cfg.delta_t0, cfg.dt)?;
                paths.push(save(&table, out_dir, &format!("fig5_fwhm{fwhm}ps.csv"))?);
            }
            return Ok(paths);
        }
        FigureName::Fig6 => save(
            &figures::fwhm_scan(
                gaussian_mu(&cfg.reference),
                cfg.delta_t0,
                first,
                second,
                cfg.phase,
                cfg.dt,
            )?,
            out_dir,
            &name,
        )?,
    };
    Ok(vec![path])
}

fn gaussian_mu(model: &ResponseModel) -> f64 {
    model.gaussian_params().map_or(0.0, |g| g.mu)
}
