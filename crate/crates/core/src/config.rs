//! Run configuration: `key = value` text plus command-line overrides.
//!
//! Resolution order is built-in defaults, then the configuration file, then
//! flags. Defaults depend on the subcommand and, for `figure`, on the figure
//! being reproduced. All times are plain numbers of picoseconds.
//!
//! ```text
//! # leakage versus bin width for the reference detector
//! subcommand = sweep
//! model = emg
//! delta_t0_ps = 350
//! axis1 = bin_width
//! axis1_values = 1, 10:4000:10
//! ```
//!
//! Value lists are comma separated; an item `start:stop:step` expands to an
//! inclusive arithmetic range.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::info::BitPrior;
use crate::response::{EmgParams, GaussianParams, ModelKind, ResponseModel};
use crate::sweep::{Axis, SweepParam};

const KEYS: &[&str] = &[
    "subcommand",
    "figure",
    "model",
    "tau_e_ps",
    "tau_g_ps",
    "t0_ps",
    "mu_ps",
    "fwhm_ps",
    "delta_t0_ps",
    "p0",
    "bin_width_ps",
    "phase_ps",
    "dt_ps",
    "axis1",
    "axis1_values",
    "axis2",
    "axis2_values",
    "phase_points_per_period",
    "n_events",
    "seed",
    "bootstrap",
    "n_coincidences",
    "mean_spacing_ps",
    "lag_window_ps",
    "lag_step_ps",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Sweep,
    Simulate,
    Compensate,
    Figure,
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sweep" => Ok(Subcommand::Sweep),
            "simulate" => Ok(Subcommand::Simulate),
            "compensate" => Ok(Subcommand::Compensate),
            "figure" => Ok(Subcommand::Figure),
            other => Err(format!(
                "unknown subcommand `{other}` (expected sweep, simulate, compensate or figure)"
            )),
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcommand::Sweep => "sweep",
            Subcommand::Simulate => "simulate",
            Subcommand::Compensate => "compensate",
            Subcommand::Figure => "figure",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureName {
    /// Reference response and its 500 ps / 1000 ps binned staircases.
    Fig1,
    /// MI versus bin width for several delays.
    Fig3,
    /// MI versus binning phase.
    Fig4,
    /// Narrow versus wide responses at a 100 ps delay.
    Fig5,
    /// MI versus FWHM and bin width.
    Fig6,
}

impl FromStr for FigureName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "fig1" => Ok(FigureName::Fig1),
            "fig3" => Ok(FigureName::Fig3),
            "fig4" => Ok(FigureName::Fig4),
            "fig5" => Ok(FigureName::Fig5),
            "fig6" => Ok(FigureName::Fig6),
            other => Err(format!(
                "unknown figure `{other}` (expected fig1, fig3, fig4, fig5 or fig6)"
            )),
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureName::Fig1 => "fig1",
            FigureName::Fig3 => "fig3",
            FigureName::Fig4 => "fig4",
            FigureName::Fig5 => "fig5",
            FigureName::Fig6 => "fig6",
        })
    }
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub figure: Option<FigureName>,
    /// Bit-0 detector; the bit-1 detector is this one delayed by `delta_t0`.
    pub reference: ResponseModel,
    pub delta_t0: f64,
    pub prior: BitPrior,
    pub bin_width: f64,
    pub phase: f64,
    pub dt: f64,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub phase_points_per_period: usize,
    pub n_events: usize,
    pub seed: u64,
    pub bootstrap: usize,
    pub n_coincidences: usize,
    pub mean_spacing: f64,
    pub lag_window: f64,
    pub lag_step: f64,
    /// Every key with its resolved value, for the run manifest.
    pub resolved: BTreeMap<String, String>,
}

/// Parse `key = value` lines. Blank lines and `#` comments are ignored.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                return None;
            }
            Some(match line.split_once('=') {
                Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
                _ => Err(Error::config(
                    format!("line {}", i + 1),
                    format!("expected `key = value`, got `{line}`"),
                )),
            })
        })
        .collect()
}

fn defaults(sub: Subcommand, fig: Option<FigureName>) -> BTreeMap<&'static str, &'static str> {
    let mut d: BTreeMap<&str, &str> = [
        ("model", "emg"),
        ("tau_e_ps", "400"),
        ("tau_g_ps", "290"),
        ("t0_ps", "1000"),
        ("mu_ps", "0"),
        ("fwhm_ps", "1000"),
        ("delta_t0_ps", "350"),
        ("p0", "0.5"),
        ("bin_width_ps", "500"),
        ("phase_ps", "0"),
        ("dt_ps", "1"),
        ("axis1", "bin_width"),
        ("axis1_values", "1,10:4000:10"),
        ("axis2", ""),
        ("axis2_values", ""),
        ("phase_points_per_period", "40"),
        ("n_events", "100000"),
        ("seed", "1"),
        ("bootstrap", "100"),
        ("n_coincidences", "100000"),
        ("mean_spacing_ps", "1000000"),
        ("lag_window_ps", "10000"),
        ("lag_step_ps", "10"),
    ]
    .into_iter()
    .collect();
    let overrides: &[(&str, &str)] = match (sub, fig) {
        (Subcommand::Compensate, _) => &[("model", "gaussian"), ("bin_width_ps", "10")],
        (Subcommand::Figure, Some(FigureName::Fig1)) => &[
            ("model", "emg"),
            ("axis1", "bin_width"),
            ("axis1_values", "500,1000"),
        ],
        (Subcommand::Figure, Some(FigureName::Fig3)) => &[
            ("axis1", "delta_t0"),
            ("axis1_values", "100,200,350,500,800"),
            ("axis2", "bin_width"),
            ("axis2_values", "1,10:4000:10"),
        ],
        (Subcommand::Figure, Some(FigureName::Fig4)) => &[
            ("model", "gaussian"),
            ("axis1", "bin_width"),
            ("axis1_values", "500:4000:500"),
        ],
        (Subcommand::Figure, Some(FigureName::Fig5)) => &[
            ("model", "gaussian"),
            ("delta_t0_ps", "100"),
            ("axis1", "fwhm"),
            ("axis1_values", "20,500"),
        ],
        (Subcommand::Figure, Some(FigureName::Fig6)) => &[
            ("model", "gaussian"),
            ("axis1", "fwhm"),
            ("axis1_values", "20,50,100,200,350,500,750,1000,1500,2000"),
            ("axis2", "bin_width"),
            ("axis2_values", "1,100,250,500,1000,2000,4000"),
        ],
        _ => &[],
    };
    d.extend(overrides.iter().copied());
    d
}

/// Resolve configuration text and flag overrides into a validated
/// [`RunConfig`].
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut given: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in parse_pairs(text)?.into_iter().chain(overrides.iter().cloned()) {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::config(k, "unknown key"));
        }
        given.insert(k, v);
    }

    let subcommand: Subcommand = match given.get("subcommand") {
        Some(v) => v.parse().map_err(|e| Error::config("subcommand", e))?,
        None => return Err(Error::config("subcommand", "missing")),
    };
    let figure = match (subcommand, given.get("figure")) {
        (Subcommand::Figure, None) => return Err(Error::config("figure", "missing")),
        (_, Some(v)) => Some(v.parse::<FigureName>().map_err(|e| Error::config("figure", e))?),
        (_, None) => None,
    };

    let mut resolved: BTreeMap<String, String> = defaults(subcommand, figure)
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    resolved.extend(given);

    let r = Resolver { values: &resolved };
    let dt = r.positive("dt_ps")?;
    let reference = match r.str("model") {
        "emg" => {
            let p = EmgParams {
                tau_e: r.positive("tau_e_ps")?,
                tau_g: r.positive("tau_g_ps")?,
                t0: r.num("t0_ps")?,
            };
            ResponseModel::emg(p).map_err(|e| Error::config("model", e.to_string()))?
        }
        "gaussian" => {
            let p = GaussianParams {
                mu: r.num("mu_ps")?,
                fwhm: r.positive("fwhm_ps")?,
            };
            ResponseModel::gaussian(p).map_err(|e| Error::config("model", e.to_string()))?
        }
        other => return Err(Error::config("model", format!("expected emg or gaussian, got `{other}`"))),
    };
    let p0 = r.num("p0")?;
    let prior = BitPrior::new(p0).map_err(|e| Error::config("p0", e.to_string()))?;
    let bin_width = r.positive("bin_width_ps")?;
    if bin_width < dt {
        return Err(Error::config("bin_width_ps", format!("must be at least dt_ps = {dt}")));
    }
    let phase = r.num("phase_ps")?;

    let axis1 = r
        .axis("axis1", "axis1_values", reference.kind(), dt)?
        .ok_or_else(|| Error::config("axis1", "missing"))?;
    let axis2 = r.axis("axis2", "axis2_values", reference.kind(), dt)?;
    if axis2.as_ref().is_some_and(|a| a.param() == axis1.param()) {
        return Err(Error::config("axis2", "must differ from axis1"));
    }

    if let Some(fig) = figure {
        let (want1, want2) = figure_axes(fig);
        if axis1.param() != want1 {
            return Err(Error::config("axis1", format!("{fig} sweeps `{want1}`")));
        }
        if axis2.as_ref().map(Axis::param) != want2 {
            return Err(Error::config(
                "axis2",
                match want2 {
                    Some(p) => format!("{fig} sweeps `{p}`"),
                    None => format!("{fig} takes no second axis"),
                },
            ));
        }
    }

    let lag_window = r.positive("lag_window_ps")?;
    let lag_step = r.positive("lag_step_ps")?;
    let cfg = RunConfig {
        subcommand,
        figure,
        reference,
        delta_t0: r.num("delta_t0_ps")?,
        prior,
        bin_width,
        phase,
        dt,
        axis1,
        axis2,
        phase_points_per_period: r.count("phase_points_per_period", 1)?,
        n_events: r.count("n_events", 1)?,
        seed: r.parse("seed")?,
        bootstrap: r.count("bootstrap", 2)?,
        n_coincidences: r.count("n_coincidences", 1)?,
        mean_spacing: r.positive("mean_spacing_ps")?,
        lag_window,
        lag_step,
        resolved: resolved.clone(),
    };
    Ok(cfg)
}

/// Axes a figure is built from: the first lists the curves (or staircase
/// widths), the second is the horizontal axis where there is one.
pub fn figure_axes(fig: FigureName) -> (SweepParam, Option<SweepParam>) {
    match fig {
        FigureName::Fig1 => (SweepParam::BinWidth, None),
        FigureName::Fig3 => (SweepParam::DeltaT0, Some(SweepParam::BinWidth)),
        FigureName::Fig4 => (SweepParam::BinWidth, None),
        FigureName::Fig5 => (SweepParam::Fwhm, None),
        FigureName::Fig6 => (SweepParam::Fwhm, Some(SweepParam::BinWidth)),
    }
}

struct Resolver<'a> {
    values: &'a BTreeMap<String, String>,
}

impl Resolver<'_> {
    fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.str(key)
            .parse()
            .map_err(|e: T::Err| Error::config(key, format!("cannot parse `{}`: {e}", self.str(key))))
    }

    fn num(&self, key: &str) -> Result<f64> {
        let v: f64 = self.parse(key)?;
        if !v.is_finite() {
            return Err(Error::config(key, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.num(key)?;
        if v <= 0.0 {
            return Err(Error::config(key, format!("must be positive, got {v}")));
        }
        Ok(v)
    }

    fn count(&self, key: &str, min: usize) -> Result<usize> {
        let v: usize = self.parse(key)?;
        if v < min {
            return Err(Error::config(key, format!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    fn axis(&self, name_key: &str, values_key: &str, kind: ModelKind, dt: f64) -> Result<Option<Axis>> {
        let name = self.str(name_key);
        if name.is_empty() {
            return Ok(None);
        }
        let param: SweepParam = name.parse().map_err(|e| Error::config(name_key, e))?;
        let values = parse_value_list(self.str(values_key)).map_err(|e| Error::config(values_key, e))?;
        match param {
            SweepParam::BinWidth if values.iter().any(|&w| w < dt) => {
                return Err(Error::config(values_key, format!("bin widths must be at least dt_ps = {dt}")));
            }
            SweepParam::Fwhm if kind != ModelKind::Gaussian => {
                return Err(Error::config(name_key, "a fwhm axis needs model = gaussian"));
            }
            SweepParam::Fwhm if values.iter().any(|&f| f <= 0.0) => {
                return Err(Error::config(values_key, "FWHM values must be positive"));
            }
            _ => {}
        }
        Axis::new(param, values)
            .map(Some)
            .map_err(|e| Error::config(values_key, e.to_string()))
    }
}

/// Parse `1, 2.5, 10:100:10` into numbers; ranges include their end point.
pub fn parse_value_list(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || b < a {
                    return Err(format!("bad range `{item}`"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| a + i as f64 * step));
            }
            _ => return Err(format!("bad list item `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("empty value list".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file() {
        let text = "subcommand = simulate\nbin_width_ps = 500\n";
        let cfg = parse_config(text, &flags(&[("bin_width_ps", "1000")])).unwrap();
        assert_eq!(cfg.bin_width, 1000.0);
        assert_eq!(cfg.resolved["bin_width_ps"], "1000");
    }

    #[test]
    fn negative_tau_names_the_key() {
        let err = parse_config("subcommand=sweep\ntau_e_ps=-1", &[]).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "tau_e_ps"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fig4_defaults() {
        let cfg = parse_config("subcommand=figure\nfigure=fig4", &[]).unwrap();
        assert_eq!(cfg.figure, Some(FigureName::Fig4));
        assert_eq!(cfg.delta_t0, 350.0);
        let g = cfg.reference.gaussian_params().unwrap();
        assert_eq!(g.fwhm, 1000.0);
    }

    #[test]
    fn unknown_keys_and_bad_syntax() {
        assert!(matches!(
            parse_config("subcommand=sweep\nbin_widht_ps=3", &[]),
            Err(Error::Config { key, .. }) if key == "bin_widht_ps"
        ));
        assert!(matches!(
            parse_config("subcommand=sweep\njust words", &[]),
            Err(Error::Config { key, .. }) if key == "line 2"
        ));
        assert!(matches!(
            parse_config("subcommand=sweep\nseed=abc", &[]),
            Err(Error::Config { key, .. }) if key == "seed"
        ));
        assert!(matches!(
            parse_config("bin_width_ps=3", &[]),
            Err(Error::Config { key, .. }) if key == "subcommand"
        ));
    }

    #[test]
    fn constraint_violations() {
        let cases = [
            ("p0=1.5", "p0"),
            ("bin_width_ps=0.5", "bin_width_ps"),
            ("axis1_values=0.5,10", "axis1_values"),
            ("axis1_values=10,5", "axis1_values"),
            ("axis1=fwhm", "axis1"),
            ("n_events=0", "n_events"),
            ("lag_step_ps=0", "lag_step_ps"),
            ("model=lorentz", "model"),
        ];
        for (line, key) in cases {
            let text = format!("subcommand=sweep\n{line}");
            match parse_config(&text, &[]) {
                Err(Error::Config { key: k, .. }) => assert_eq!(k, key, "{line}"),
                other => panic!("{line}: {other:?}"),
            }
        }
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_value_list("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_value_list("0:30:10").unwrap(), vec![0.0, 10.0, 20.0, 30.0]);
        assert_eq!(parse_value_list("1,10:4000:10").unwrap().len(), 401);
        assert!(parse_value_list("").is_err());
        assert!(parse_value_list("5:1:1").is_err());
    }
}
