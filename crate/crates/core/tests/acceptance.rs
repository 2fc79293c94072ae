//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timeleak::binning::BinningScheme;
use timeleak::compensation::closed_loop;
use timeleak::info::{mutual_information_binned, mutual_information_continuous, BitPrior};
use timeleak::io::Table;
use timeleak::response::{EmgParams, GaussianParams, ResponseModel};
use timeleak::sim::{bootstrap_mi, simulate_coincidences, simulate_stream, CoincidenceConfig, SimConfig};
use timeleak::sweep::{run_sweep, Axis, Scenario, SweepParam, SweepSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian(fwhm: f64) -> ResponseModel {
    ResponseModel::gaussian(GaussianParams::new(0.0, fwhm).unwrap()).unwrap()
}

fn random_model(rng: &mut ChaCha8Rng) -> ResponseModel {
    if rng.random_bool(0.5) {
        let p = EmgParams::new(
            rng.random_range(50.0..800.0),
            rng.random_range(30.0..500.0),
            rng.random_range(-2000.0..2000.0),
        )
        .unwrap();
        ResponseModel::emg(p).unwrap()
    } else {
        let p = GaussianParams::new(rng.random_range(-2000.0..2000.0), rng.random_range(40.0..2000.0)).unwrap();
        ResponseModel::gaussian(p).unwrap()
    }
}

fn random_scenario(rng: &mut ChaCha8Rng, delta_t0: f64) -> Scenario {
    let width = rng.random_range(1.0..4000.0);
    Scenario::new(random_model(rng), delta_t0, width).with_phase(rng.random_range(0.0..width))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for model in [ResponseModel::reference_emg(), gaussian(1000.0)] {
        for _ in 0..50 {
            let width = rng.random_range(1.0..4000.0);
            let s = Scenario::new(model, 0.0, width).with_phase(rng.random_range(0.0..width));
            worst = worst.max(s.binned_mi().map_err(|e| e.to_string())?.abs());
        }
        let cont = mutual_information_continuous(BitPrior::uniform(), &model, &model, 1.0).map_err(|e| e.to_string())?;
        worst = worst.max(cont.abs());
    }
    check(worst <= 1e-9, format!("max |MI| = {worst:.3e} bits over 100 schemes"))
}

fn criterion_2() -> Outcome {
    let mi = Scenario::new(gaussian(20.0), 350.0, 1.0).binned_mi().map_err(|e| e.to_string())?;
    check(mi >= 0.99, format!("MI = {mi:.9} bits"))
}

fn widths_1_to_4000() -> Vec<f64> {
    std::iter::once(1.0).chain((1..=400).map(|k| 10.0 * k as f64)).collect()
}

/// Some w1 < w2 with MI(w1) < MI(w2) - 1e-4, w1 past the first point.
fn rise_after_dip(mi: &[f64]) -> Option<(usize, usize)> {
    let mut best_min = (1, mi[1]);
    for (j, &v) in mi.iter().enumerate().skip(2) {
        if v > best_min.1 + 1e-4 {
            return Some((best_min.0, j));
        }
        if v < best_min.1 {
            best_min = (j, v);
        }
    }
    None
}

fn criterion_3() -> Outcome {
    let base = Scenario::new(ResponseModel::reference_emg(), 350.0, 500.0);
    let axis = Axis::new(SweepParam::BinWidth, widths_1_to_4000()).map_err(|e| e.to_string())?;
    let result = run_sweep(&SweepSpec::single(base, axis)).map_err(|e| e.to_string())?;
    let mi = result.mi();
    match rise_after_dip(&mi) {
        Some((i, j)) => Ok(format!(
            "MI({} ps) = {:.5} < MI({} ps) = {:.5}",
            result.rows[i].x1, mi[i], result.rows[j].x1, mi[j]
        )),
        None => Err("MI is monotone non-increasing in bin width".into()),
    }
}

fn criterion_4() -> Outcome {
    let mut spread: f64 = 0.0;
    for w in [250.0, 500.0, 1000.0] {
        let base = Scenario::new(gaussian(1000.0), 350.0, w);
        let points = 40;
        let phases: Vec<f64> = (0..=2 * points).map(|j| w * j as f64 / points as f64).collect();
        let axis = Axis::new(SweepParam::Phase, phases).map_err(|e| e.to_string())?;
        let mi = run_sweep(&SweepSpec::single(base, axis)).map_err(|e| e.to_string())?.mi();
        for j in 0..points {
            if mi[j] != mi[j + points] {
                return Err(format!("width {w}: MI({j}/{points} w) differs after one period"));
            }
        }
        let (lo, hi) = mi.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        spread = spread.max(hi - lo);
    }
    check(spread > 1e-3, format!("periodic at 250/500/1000 ps, max spread {spread:.5} bits"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::MIN;
    for _ in 0..200 {
        let delta = rng.random_range(-1500.0..1500.0);
        let s = random_scenario(&mut rng, delta);
        let binned = s.binned_mi().map_err(|e| e.to_string())?;
        let cont = s.continuous_mi().map_err(|e| e.to_string())?;
        worst = worst.max(binned - cont);
    }
    check(worst <= 1e-9, format!("max(binned - continuous) = {worst:.3e} bits over 200 instances"))
}

fn criterion_6() -> Outcome {
    let cases = [(0.0, 500.0), (100.0, 500.0), (100.0, 2000.0), (350.0, 500.0), (350.0, 1000.0)];
    let mut lines = Vec::new();
    let mut ok = true;
    for (k, &(delta, width)) in cases.iter().enumerate() {
        let s = Scenario::new(gaussian(1000.0), delta, width);
        let (model0, model1) = s.models();
        let cfg = SimConfig {
            model0,
            model1,
            prior: s.prior,
            scheme: s.scheme().map_err(|e| e.to_string())?,
            n_events: 1_000_000,
            seed: 600 + k as u64,
            dt: s.dt,
        };
        let events = simulate_stream(&cfg).map_err(|e| e.to_string())?;
        let analytic = mutual_information_binned(&s.channel().map_err(|e| e.to_string())?);
        let est = bootstrap_mi(&events, 100, k as u64);
        let z = (est.mi_bits - analytic).abs() / est.std_error;
        ok &= z <= 3.0;
        lines.push(format!("({delta},{width}) z={z:.2}"));
    }
    check(ok, lines.join(", "))
}

fn criterion_7() -> Outcome {
    let lag_step = 10.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for (fwhm, n) in [(1000.0, 100_000), (500.0, 1_000_000)] {
        let cfg = CoincidenceConfig::with_alice_delay(gaussian(fwhm), 350.0, n, 7);
        let streams = simulate_coincidences(&cfg).map_err(|e| e.to_string())?;
        let run = closed_loop(&streams, 10_000.0, lag_step).map_err(|e| e.to_string())?;
        let residual = run.after.delta.abs();
        ok &= residual <= lag_step;
        lines.push(format!("FWHM {fwhm}: delta {:.2}, residual {residual:.2} ps", run.before.delta));
        if fwhm == 500.0 {
            let scheme = BinningScheme::new(lag_step, 0.0, -20_000.0, 20_000.0).map_err(|e| e.to_string())?;
            let before = bootstrap_mi(&streams.delay_events(&scheme).map_err(|e| e.to_string())?, 20, 1);
            let after = bootstrap_mi(&run.compensated.delay_events(&scheme).map_err(|e| e.to_string())?, 20, 1);
            ok &= before.mi_bits >= 0.1 && after.mi_bits <= 0.02;
            lines.push(format!("MI {:.4} -> {:.4} bits", before.mi_bits, after.mi_bits));
        }
    }
    check(ok, lines.join("; "))
}

fn run_figure(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_timeleak"))
        .arg("figure")
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn read(dir: &Path, name: &str) -> Result<Table, String> {
    let t = Table::read(&dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
    if t.rows.is_empty() || t.rows.iter().any(|r| r.len() != t.header.len() || r.iter().any(|v| !v.is_finite())) {
        return Err(format!("{name}: malformed table"));
    }
    Ok(t)
}

fn col(t: &Table, name: &str) -> Result<Vec<f64>, String> {
    t.column(name).ok_or_else(|| format!("missing column {name}"))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();

    run_figure(d, &["--figure", "fig1"])?;
    let fig1 = read(d, "fig1.csv")?;
    let t = col(&fig1, "t_ps")?;
    let dt = t[1] - t[0];
    let mut mass_err: f64 = 0.0;
    for name in fig1.header.iter().filter(|h| h.starts_with("binned_")) {
        let mass: f64 = col(&fig1, name)?.iter().sum::<f64>() * dt;
        mass_err = mass_err.max((mass - 1.0).abs());
    }

    run_figure(d, &["--figure", "fig3"])?;
    let fig3 = read(d, "fig3.csv")?;
    let (deltas, mi3) = (col(&fig3, "delta_t0_ps")?, col(&fig3, "mi_bits")?);
    let curve: Vec<f64> = deltas.iter().zip(&mi3).filter(|(d, _)| **d == 350.0).map(|(_, m)| *m).collect();
    let rise = rise_after_dip(&curve).is_some();

    run_figure(d, &["--figure", "fig4", "--axis1_values", "250,500,1000", "--fwhm_ps", "1000"])?;
    let fig4 = read(d, "fig4.csv")?;
    let (w4, mi4) = (col(&fig4, "bin_width_ps")?, col(&fig4, "mi_bits")?);
    let mut periodic = true;
    let mut spread: f64 = 0.0;
    for w in [250.0, 500.0, 1000.0] {
        let m: Vec<f64> = w4.iter().zip(&mi4).filter(|(x, _)| **x == w).map(|(_, m)| *m).collect();
        let half = m.len() / 2;
        periodic &= half > 0 && (0..half).all(|j| m[j] == m[j + half]);
        let (lo, hi) = m.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        spread = spread.max(hi - lo);
    }

    run_figure(d, &["--figure", "fig6"])?;
    let fig6 = read(d, "fig6.csv")?;
    let (f6, w6, mi6) = (col(&fig6, "fwhm_ps")?, col(&fig6, "bin_width_ps")?, col(&fig6, "mi_bits")?);
    let ceiling = (0..mi6.len())
        .find(|&i| f6[i] == 20.0 && w6[i] == 1.0)
        .map(|i| mi6[i])
        .ok_or("fig6 lacks the FWHM 20 ps, width 1 ps point")?;

    check(
        mass_err <= 1e-9 && rise && periodic && spread > 1e-3 && ceiling >= 0.99,
        format!(
            "fig1 mass err {mass_err:.2e}, fig3 rise {rise}, fig4 periodic {periodic} spread {spread:.4}, fig6 ceiling {ceiling:.6}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("zero-leakage baseline", criterion_1, Duration::from_secs(10)),
        ("MI ceiling", criterion_2, Duration::from_secs(10)),
        ("non-monotone in bin width", criterion_3, Duration::from_secs(120)),
        ("phase periodicity", criterion_4, Duration::from_secs(60)),
        ("data-processing inequality", criterion_5, Duration::from_secs(120)),
        ("simulation matches analytic MI", criterion_6, Duration::from_secs(300)),
        ("compensation closed loop", criterion_7, Duration::from_secs(120)),
        ("figure outputs", criterion_8, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {took:.1?}, budget {budget:?}")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] criterion {}: {name} ({took:.1?}) - {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
