//! Uniform time binning with a configurable start phase.
//!
//! Bin edges sit at `t_start + phase + k * width`. The cells cut off at the two
//! ends of the domain are kept as (narrower) bins of their own, so cell 0 is
//! `[t_start, t_start + phase)` whenever `phase > 0`. Intervals are half-open.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::response::SampledDensity;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinningScheme {
    width: f64,
    phase: f64,
    t_start: f64,
    t_end: f64,
}

impl BinningScheme {
    /// Any finite `phase` is accepted and wrapped into `[0, width)`.
    pub fn new(width: f64, phase: f64, t_start: f64, t_end: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::param("bin_width", format!("must be positive, got {width}")));
        }
        if !phase.is_finite() {
            return Err(Error::param("phase", "must be finite"));
        }
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::param(
                "domain",
                format!("need t_start < t_end, got [{t_start}, {t_end}]"),
            ));
        }
        Ok(BinningScheme {
            width,
            phase: wrap_phase(phase, width),
            t_start,
            t_end,
        })
    }

    /// Scheme whose phase is given as an angle, one full turn per bin width.
    pub fn with_phase_angle(width: f64, radians: f64, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(width, width * radians / TAU, t_start, t_end)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn phase_angle(&self) -> f64 {
        TAU * self.phase / self.width
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    fn first_offset(&self) -> i64 {
        i64::from(self.phase > 0.0)
    }

    pub fn n_bins(&self) -> usize {
        let interior = ((self.t_end - self.t_start - self.phase) / self.width).ceil() as i64;
        (interior.max(0) + self.first_offset()).max(1) as usize
    }

    fn raw_index(&self, t: f64) -> usize {
        let k = ((t - self.t_start - self.phase) / self.width).floor() as i64 + self.first_offset();
        k.clamp(0, self.n_bins() as i64 - 1) as usize
    }

    /// Index of the bin holding `t`.
    pub fn bin_index(&self, t: f64) -> Result<usize> {
        if !(t >= self.t_start && t < self.t_end) {
            return Err(Error::Range {
                t,
                start: self.t_start,
                end: self.t_end,
            });
        }
        Ok(self.raw_index(t))
    }

    /// All `n_bins + 1` boundaries, including both domain ends.
    pub fn edges(&self) -> Vec<f64> {
        let n = self.n_bins();
        let mut edges = Vec::with_capacity(n + 1);
        edges.push(self.t_start);
        let first = self.t_start + self.phase;
        let mut k = if self.phase > 0.0 { 0 } else { 1 };
        while edges.len() < n {
            edges.push(first + k as f64 * self.width);
            k += 1;
        }
        edges.push(self.t_end);
        edges
    }
}

fn wrap_phase(phase: f64, width: f64) -> f64 {
    let r = phase.rem_euclid(width);
    if r >= width {
        0.0
    } else {
        r
    }
}

/// Probability of each bin of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BinProbabilities {
    scheme: BinningScheme,
    probs: Vec<f64>,
}

impl BinProbabilities {
    pub fn new(scheme: BinningScheme, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != scheme.n_bins() {
            return Err(Error::Shape(format!(
                "{} probabilities for {} bins",
                probs.len(),
                scheme.n_bins()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::param("probs", "entries must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param("probs", format!("entries sum to {total}, not 1")));
        }
        Ok(BinProbabilities { scheme, probs })
    }

    pub fn scheme(&self) -> &BinningScheme {
        &self.scheme
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub(crate) fn from_parts_unchecked(scheme: BinningScheme, probs: Vec<f64>) -> Self {
        BinProbabilities { scheme, probs }
    }
}

/// Aggregate the mass of each fine-grid cell into the bin containing the cell
/// centre.
pub fn bin_density(density: &SampledDensity, scheme: &BinningScheme) -> Result<BinProbabilities> {
    if scheme.width() < density.dt() {
        return Err(Error::Resolution {
            width: scheme.width(),
            dt: density.dt(),
        });
    }
    let slack = 1e-9 * density.dt();
    if density.t_start() < scheme.t_start() - slack || density.t_end() > scheme.t_end() + slack {
        return Err(Error::Range {
            t: if density.t_start() < scheme.t_start() {
                density.t_start()
            } else {
                density.t_end()
            },
            start: scheme.t_start(),
            end: scheme.t_end(),
        });
    }
    let mut probs = vec![0.0; scheme.n_bins()];
    for (i, mass) in density.cell_masses().enumerate() {
        probs[scheme.raw_index(density.center(i))] += mass;
    }
    BinProbabilities::new(*scheme, probs)
}

/// Piecewise-constant density implied by binned probabilities, evaluated at
/// each cell centre of `grid` (probability of the bin over its actual width).
pub fn staircase(binned: &BinProbabilities, grid: &SampledDensity) -> Vec<f64> {
    let edges = binned.scheme().edges();
    (0..grid.len())
        .map(|i| {
            let k = binned.scheme().raw_index(grid.center(i));
            binned.probs()[k] / (edges[k + 1] - edges[k])
        })
        .collect()
}
