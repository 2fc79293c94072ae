//! One- and two-parameter sweeps of the binned mutual information.
//!
//! A sweep varies up to two of bin width, binning phase, detector FWHM and
//! inter-detector delay around a base [`Scenario`]. Rows are independent and
//! are evaluated in parallel; the fine-grid discretisation is shared between
//! rows that use the same detector pair.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::binning::{bin_density, BinningScheme};
use crate::error::{Error, Result};
use crate::info::{mutual_information_binned, mutual_information_continuous, BitPrior, ChannelSpec};
use crate::response::{default_domain, discretize, GaussianParams, ResponseModel, SampledDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParam {
    BinWidth,
    /// Binning phase in ps.
    Phase,
    /// Binning phase as an angle, `2π` per bin width.
    PhaseRad,
    Fwhm,
    DeltaT0,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::BinWidth => "bin_width",
            SweepParam::Phase => "phase",
            SweepParam::PhaseRad => "phase_rad",
            SweepParam::Fwhm => "fwhm",
            SweepParam::DeltaT0 => "delta_t0",
        }
    }

    /// CSV column name with the unit attached.
    pub fn column(&self) -> &'static str {
        match self {
            SweepParam::BinWidth => "bin_width_ps",
            SweepParam::Phase => "phase_ps",
            SweepParam::PhaseRad => "phase_rad",
            SweepParam::Fwhm => "fwhm_ps",
            SweepParam::DeltaT0 => "delta_t0_ps",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "bin_width" => SweepParam::BinWidth,
            "phase" => SweepParam::Phase,
            "phase_rad" => SweepParam::PhaseRad,
            "fwhm" => SweepParam::Fwhm,
            "delta_t0" => SweepParam::DeltaT0,
            other => {
                return Err(format!(
                    "unknown axis `{other}` (expected bin_width, phase, phase_rad, fwhm or delta_t0)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    param: SweepParam,
    values: Vec<f64>,
}

impl Axis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("axis", format!("`{param}` has no values")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("axis", format!("`{param}` has non-finite values")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "axis",
                format!("`{param}` values must be strictly increasing"),
            ));
        }
        Ok(Axis { param, values })
    }

    pub fn param(&self) -> SweepParam {
        self.param
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSetting {
    Ps(f64),
    Radians(f64),
}

/// A detector pair and a public binning: the bit-0 detector is `reference`,
/// the bit-1 detector is `reference` delayed by `delta_t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub reference: ResponseModel,
    pub delta_t0: f64,
    pub prior: BitPrior,
    pub bin_width: f64,
    pub phase: PhaseSetting,
    /// Fine-grid step (ps).
    pub dt: f64,
}

impl Scenario {
    pub fn new(reference: ResponseModel, delta_t0: f64, bin_width: f64) -> Self {
        Scenario {
            reference,
            delta_t0,
            prior: BitPrior::uniform(),
            bin_width,
            phase: PhaseSetting::Ps(0.0),
            dt: 1.0,
        }
    }

    pub fn with_phase(mut self, phase_ps: f64) -> Self {
        self.phase = PhaseSetting::Ps(phase_ps);
        self
    }

    pub fn models(&self) -> (ResponseModel, ResponseModel) {
        (self.reference, self.reference.shift_model(self.delta_t0))
    }

    pub fn domain(&self) -> (f64, f64) {
        let (m0, m1) = self.models();
        default_domain(&m0, &m1, self.dt)
    }

    pub fn phase_ps(&self) -> f64 {
        match self.phase {
            PhaseSetting::Ps(p) => p,
            PhaseSetting::Radians(r) => self.bin_width * r / TAU,
        }
    }

    pub fn scheme(&self) -> Result<BinningScheme> {
        let (a, b) = self.domain();
        BinningScheme::new(self.bin_width, self.phase_ps(), a, b)
    }

    /// Both detector densities on the shared fine grid.
    pub fn discretized(&self) -> Result<(SampledDensity, SampledDensity)> {
        let (m0, m1) = self.models();
        let (a, b) = self.domain();
        Ok((discretize(&m0, a, b, self.dt)?, discretize(&m1, a, b, self.dt)?))
    }

    pub fn channel(&self) -> Result<ChannelSpec> {
        let (d0, d1) = self.discretized()?;
        self.channel_on(&d0, &d1)
    }

    fn channel_on(&self, d0: &SampledDensity, d1: &SampledDensity) -> Result<ChannelSpec> {
        let scheme = self.scheme()?;
        ChannelSpec::new(self.prior, bin_density(d0, &scheme)?, bin_density(d1, &scheme)?)
    }

    pub fn binned_mi(&self) -> Result<f64> {
        Ok(mutual_information_binned(&self.channel()?))
    }

    /// No-binning reference on the same fine grid.
    pub fn continuous_mi(&self) -> Result<f64> {
        let (m0, m1) = self.models();
        mutual_information_continuous(self.prior, &m0, &m1, self.dt)
    }

    fn set(&mut self, param: SweepParam, value: f64) -> Result<()> {
        match param {
            SweepParam::BinWidth => self.bin_width = value,
            SweepParam::Phase => self.phase = PhaseSetting::Ps(value),
            SweepParam::PhaseRad => self.phase = PhaseSetting::Radians(value),
            SweepParam::DeltaT0 => self.delta_t0 = value,
            SweepParam::Fwhm => {
                let g = self.reference.gaussian_params().ok_or_else(|| {
                    Error::param("fwhm", "a FWHM axis needs the Gaussian detector model")
                })?;
                self.reference = ResponseModel::gaussian(GaussianParams::new(g.mu, value)?)?;
            }
        }
        Ok(())
    }

    fn model_key(&self) -> (u64, u64) {
        let fwhm = self.reference.gaussian_params().map_or(0.0, |g| g.fwhm);
        (self.delta_t0.to_bits(), fwhm.to_bits())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis1: Axis,
    pub axis2: Option<Axis>,
}

impl SweepSpec {
    pub fn single(base: Scenario, axis: Axis) -> Self {
        SweepSpec {
            base,
            axis1: axis,
            axis2: None,
        }
    }

    /// Grid points in row order (axis 1 outer, axis 2 inner).
    pub fn points(&self) -> Vec<(f64, Option<f64>)> {
        match &self.axis2 {
            None => self.axis1.values.iter().map(|&x| (x, None)).collect(),
            Some(ax2) => self
                .axis1
                .values
                .iter()
                .flat_map(|&x| ax2.values.iter().map(move |&y| (x, Some(y))))
                .collect(),
        }
    }

    pub fn scenario_at(&self, x1: f64, x2: Option<f64>) -> Result<Scenario> {
        let mut s = self.base;
        s.set(self.axis1.param, x1)?;
        if let (Some(ax2), Some(y)) = (&self.axis2, x2) {
            s.set(ax2.param, y)?;
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub x1: f64,
    pub x2: Option<f64>,
    /// Bin width in effect for this row (ps).
    pub bin_width: f64,
    /// Binning phase in effect for this row (ps, before wrapping).
    pub phase_ps: f64,
    pub mi_bits: f64,
}

impl SweepRow {
    pub fn phase_rad(&self) -> f64 {
        TAU * self.phase_ps / self.bin_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn mi(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mi_bits).collect()
    }
}

type GridPair = Arc<(SampledDensity, SampledDensity)>;

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let points = spec.points();
    let scenarios = points
        .iter()
        .enumerate()
        .map(|(row, &(x1, x2))| {
            spec.scenario_at(x1, x2).map_err(|e| Error::Sweep {
                row,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut first_row: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, s) in scenarios.iter().enumerate() {
        first_row.entry(s.model_key()).or_insert(i);
    }
    let grids: HashMap<(u64, u64), GridPair> = first_row
        .into_par_iter()
        .map(|(key, row)| {
            scenarios[row]
                .discretized()
                .map(|pair| (key, Arc::new(pair)))
                .map_err(|e| Error::Sweep {
                    row,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let rows = scenarios
        .par_iter()
        .zip(points.par_iter())
        .enumerate()
        .map(|(row, (s, &(x1, x2)))| {
            let pair = &grids[&s.model_key()];
            let mi = s
                .channel_on(&pair.0, &pair.1)
                .map(|c| mutual_information_binned(&c))
                .map_err(|e| Error::Sweep {
                    row,
                    source: Box::new(e),
                })?;
            Ok(SweepRow {
                x1,
                x2,
                bin_width: s.bin_width,
                phase_ps: s.phase_ps(),
                mi_bits: mi,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub value: f64,
    pub mi_bits: f64,
    pub kind: ExtremumKind,
}

/// Interior rows whose MI is strictly below or above both neighbours.
pub fn find_extrema(result: &SweepResult) -> Result<Vec<Extremum>> {
    if result.spec.axis2.is_some() {
        return Err(Error::Shape("extrema need a single-axis sweep".into()));
    }
    if result.rows.len() < 3 {
        return Err(Error::Size {
            needed: 3,
            got: result.rows.len(),
        });
    }
    Ok(extrema_of(&result.rows.iter().map(|r| (r.x1, r.mi_bits)).collect::<Vec<_>>()))
}

pub(crate) fn extrema_of(points: &[(f64, f64)]) -> Vec<Extremum> {
    points
        .windows(3)
        .enumerate()
        .filter_map(|(i, w)| {
            let (prev, (x, y), next) = (w[0].1, w[1], w[2].1);
            let kind = if y < prev && y < next {
                ExtremumKind::Min
            } else if y > prev && y > next {
                ExtremumKind::Max
            } else {
                return None;
            };
            Some(Extremum {
                index: i + 1,
                value: x,
                mi_bits: y,
                kind,
            })
        })
        .collect()
}
