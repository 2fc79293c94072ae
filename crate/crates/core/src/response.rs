//! Detector timing-response densities.
//!
//! Two parametric families are supported: the exponentially modified Gaussian
//! (a Gaussian of width `tau_g` convolved with a one-sided exponential of decay
//! `tau_e`), translated so that its mode sits at `t0`, and a plain Gaussian
//! parameterised by its mean and full width at half maximum. All times are in
//! picoseconds and densities in 1/ps.

use std::f64::consts::{PI, SQRT_2};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Ratio between the full width at half maximum and the standard deviation of a
/// Gaussian, `2·sqrt(2·ln 2)`.
pub fn fwhm_per_sigma() -> f64 {
    (8.0 * std::f64::consts::LN_2).sqrt()
}

/// A probability density over time with a cumulative distribution.
///
/// Anything implementing this can be put on a grid with [`discretize`].
pub trait TimingDensity {
    fn pdf(&self, t: f64) -> f64;
    fn cdf(&self, t: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmgParams {
    /// Exponential tail constant (ps).
    pub tau_e: f64,
    /// Gaussian width constant (ps), used as the Gaussian standard deviation.
    pub tau_g: f64,
    /// Location of the density maximum (ps).
    pub t0: f64,
}

impl EmgParams {
    pub fn new(tau_e: f64, tau_g: f64, t0: f64) -> Result<Self> {
        let p = EmgParams { tau_e, tau_g, t0 };
        p.validate()?;
        Ok(p)
    }

    /// Reference single-photon detector: `tau_e = 400 ps`, `tau_g = 290 ps`,
    /// `t0 = 1000 ps`.
    pub fn reference() -> Self {
        EmgParams {
            tau_e: 400.0,
            tau_g: 290.0,
            t0: 1000.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tau_e.is_finite() && self.tau_e > 0.0) {
            return Err(Error::param("tau_e", format!("must be positive, got {}", self.tau_e)));
        }
        if !(self.tau_g.is_finite() && self.tau_g > 0.0) {
            return Err(Error::param("tau_g", format!("must be positive, got {}", self.tau_g)));
        }
        if !self.t0.is_finite() {
            return Err(Error::param("t0", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    /// Mean and peak location (ps).
    pub mu: f64,
    /// Full width at half maximum (ps).
    pub fwhm: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, fwhm: f64) -> Result<Self> {
        let p = GaussianParams { mu, fwhm };
        p.validate()?;
        Ok(p)
    }

    pub fn sigma(&self) -> f64 {
        self.fwhm / fwhm_per_sigma()
    }

    fn validate(&self) -> Result<()> {
        if !(self.fwhm.is_finite() && self.fwhm > 0.0) {
            return Err(Error::param("fwhm", format!("must be positive, got {}", self.fwhm)));
        }
        if !self.mu.is_finite() {
            return Err(Error::param("mu", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Emg,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Emg {
        params: EmgParams,
        /// Mode of the unshifted EMG (location parameter 0).
        mode_offset: f64,
    },
    Gaussian(GaussianParams),
}

/// A validated detector response density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseModel {
    shape: Shape,
}

impl ResponseModel {
    pub fn emg(params: EmgParams) -> Result<Self> {
        params.validate()?;
        let mode_offset = emg_mode(params.tau_e, params.tau_g);
        Ok(ResponseModel {
            shape: Shape::Emg {
                params,
                mode_offset,
            },
        })
    }

    pub fn gaussian(params: GaussianParams) -> Result<Self> {
        params.validate()?;
        Ok(ResponseModel {
            shape: Shape::Gaussian(params),
        })
    }

    pub fn reference_emg() -> Self {
        Self::emg(EmgParams::reference()).expect("reference parameters are valid")
    }

    pub fn kind(&self) -> ModelKind {
        match self.shape {
            Shape::Emg { .. } => ModelKind::Emg,
            Shape::Gaussian(_) => ModelKind::Gaussian,
        }
    }

    pub fn emg_params(&self) -> Option<EmgParams> {
        match self.shape {
            Shape::Emg { params, .. } => Some(params),
            Shape::Gaussian(_) => None,
        }
    }

    pub fn gaussian_params(&self) -> Option<GaussianParams> {
        match self.shape {
            Shape::Gaussian(p) => Some(p),
            Shape::Emg { .. } => None,
        }
    }

    /// Time of the density maximum.
    pub fn peak_time(&self) -> f64 {
        match self.shape {
            Shape::Emg { params, .. } => params.t0,
            Shape::Gaussian(p) => p.mu,
        }
    }

    /// Evaluate the density at `t`.
    pub fn eval_density(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Emg {
                params,
                mode_offset,
            } => emg_pdf0(t - params.t0 + mode_offset, params.tau_e, params.tau_g),
            Shape::Gaussian(p) => {
                let s = p.sigma();
                let u = (t - p.mu) / s;
                (-0.5 * u * u).exp() / (s * (2.0 * PI).sqrt())
            }
        }
    }

    /// The same response delayed by `delta`: `shifted.eval_density(t) ==
    /// self.eval_density(t - delta)`.
    pub fn shift_model(&self, delta: f64) -> ResponseModel {
        let shape = match self.shape {
            Shape::Emg {
                mut params,
                mode_offset,
            } => {
                params.t0 += delta;
                Shape::Emg {
                    params,
                    mode_offset,
                }
            }
            Shape::Gaussian(mut p) => {
                p.mu += delta;
                Shape::Gaussian(p)
            }
        };
        ResponseModel { shape }
    }

    /// Interval around the peak holding all but a negligible (< 1e-9) part of
    /// the mass.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            Shape::Emg { params, .. } => {
                let span = params.tau_e + params.tau_g;
                (params.t0 - 10.0 * span, params.t0 + 20.0 * span)
            }
            Shape::Gaussian(p) => {
                let s = p.sigma();
                (p.mu - 8.0 * s, p.mu + 8.0 * s)
            }
        }
    }

    /// Characteristic width used to step outwards when searching for
    /// half-maximum crossings.
    fn width_scale(&self) -> f64 {
        match self.shape {
            Shape::Emg { params, .. } => params.tau_g.min(params.tau_e),
            Shape::Gaussian(p) => p.sigma(),
        }
    }
}

impl TimingDensity for ResponseModel {
    fn pdf(&self, t: f64) -> f64 {
        self.eval_density(t)
    }

    fn cdf(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Emg {
                params,
                mode_offset,
            } => {
                let x = t - params.t0 + mode_offset;
                let v = std_normal_cdf(x / params.tau_g)
                    - params.tau_e * emg_pdf0(x, params.tau_e, params.tau_g);
                v.clamp(0.0, 1.0)
            }
            Shape::Gaussian(p) => std_normal_cdf((t - p.mu) / p.sigma()),
        }
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Exponentially modified Gaussian with location 0, Gaussian standard deviation
/// `sigma` and exponential decay constant `tau`.
fn emg_pdf0(x: f64, tau: f64, sigma: f64) -> f64 {
    let a = sigma / tau;
    let z = (a - x / sigma) / SQRT_2;
    let c = erfc(z);
    if c <= 0.0 {
        return 0.0;
    }
    // Evaluated in log space: the exponential factor alone overflows far left.
    ((0.5 / tau).ln() + 0.5 * a * a - x / tau + c.ln()).exp()
}

/// Mode of the location-0 EMG, found by golden-section search on the
/// log-density (the EMG is log-concave, hence unimodal).
fn emg_mode(tau: f64, sigma: f64) -> f64 {
    let f = |x: f64| {
        let v = emg_pdf0(x, tau, sigma);
        if v > 0.0 {
            v.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = -5.0 * sigma;
    let mut hi = tau + 5.0 * sigma;
    let tol = 1e-12 * (tau + sigma);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// A density sampled at the centres of a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledDensity {
    t_start: f64,
    dt: f64,
    values: Vec<f64>,
}

impl SampledDensity {
    pub fn new(t_start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("values", "densities must be finite and non-negative"));
        }
        let mass: f64 = values.iter().sum::<f64>() * dt;
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::param("values", format!("total mass {mass} is not 1")));
        }
        Ok(SampledDensity {
            t_start,
            dt,
            values,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.values.len() as f64 * self.dt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Centre of grid cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        self.t_start + (i as f64 + 0.5) * self.dt
    }

    /// Probability mass of each cell, `value * dt`.
    pub fn cell_masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(move |v| v * self.dt)
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
            .0
    }

    /// Full width at half maximum, with crossings linearly interpolated
    /// between cell centres. Fails if more than one disjoint region exceeds
    /// half the maximum.
    pub fn fwhm(&self) -> Result<f64> {
        let peak = self.argmax();
        let half = 0.5 * self.values[peak];
        let mut regions = 0;
        let mut above = false;
        for &v in &self.values {
            if v >= half && !above {
                regions += 1;
            }
            above = v >= half;
        }
        if regions != 1 {
            return Err(Error::Ambiguous { modes: regions });
        }
        let mut lo = peak;
        while lo > 0 && self.values[lo - 1] >= half {
            lo -= 1;
        }
        let mut hi = peak;
        while hi + 1 < self.values.len() && self.values[hi + 1] >= half {
            hi += 1;
        }
        let left = if lo == 0 {
            self.center(0)
        } else {
            let (a, b) = (self.values[lo - 1], self.values[lo]);
            self.center(lo - 1) + (half - a) / (b - a) * self.dt
        };
        let right = if hi + 1 == self.values.len() {
            self.center(hi)
        } else {
            let (a, b) = (self.values[hi], self.values[hi + 1]);
            self.center(hi) + (a - half) / (a - b) * self.dt
        };
        Ok(right - left)
    }
}

/// Number of `dt` cells needed to cover `[t_start, t_end]`, tolerant of
/// rounding when the span is an exact multiple of `dt`.
pub fn grid_cells(t_start: f64, t_end: f64, dt: f64) -> usize {
    let r = (t_end - t_start) / dt;
    let nearest = r.round();
    if (r - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        r.ceil() as usize
    }
}

/// Sample `density` at the cell centres of a `dt` grid starting at `t_start`
/// and renormalise to unit mass. The grid end is rounded up to a whole number
/// of cells.
pub fn discretize<D: TimingDensity + ?Sized>(
    density: &D,
    t_start: f64,
    t_end: f64,
    dt: f64,
) -> Result<SampledDensity> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
        return Err(Error::param(
            "domain",
            format!("need t_start < t_end, got [{t_start}, {t_end}]"),
        ));
    }
    let n = grid_cells(t_start, t_end, dt);
    let end = t_start + n as f64 * dt;
    let covered = density.cdf(end) - density.cdf(t_start);
    if covered < 1.0 - 1e-6 {
        return Err(Error::Truncation { covered });
    }
    let mut values: Vec<f64> = (0..n)
        .map(|i| density.pdf(t_start + (i as f64 + 0.5) * dt))
        .collect();
    let mass = values.iter().sum::<f64>() * dt;
    if !(mass > 0.0) {
        return Err(Error::Truncation { covered: 0.0 });
    }
    values.iter_mut().for_each(|v| *v /= mass);
    SampledDensity::new(t_start, dt, values)
}

/// Default analysis domain for a pair of detector responses: the union of
/// both supports, extended to a whole number of `dt` cells.
pub fn default_domain(m0: &ResponseModel, m1: &ResponseModel, dt: f64) -> (f64, f64) {
    let (a0, b0) = m0.support();
    let (a1, b1) = m1.support();
    let start = a0.min(a1);
    let end = b0.max(b1);
    let n = grid_cells(start, end, dt);
    (start, start + n as f64 * dt)
}

/// Full width at half maximum of a response model, located by bisection on
/// either side of the peak to well below 1e-3 ps.
pub fn measure_fwhm(model: &ResponseModel) -> f64 {
    let peak = model.peak_time();
    let half = 0.5 * model.eval_density(peak);
    let step = model.width_scale();
    let excess = |t: f64| model.eval_density(t) - half;
    let right = half_crossing(&excess, peak, step);
    let left = half_crossing(&excess, peak, -step);
    right - left
}

fn half_crossing(excess: &impl Fn(f64) -> f64, from: f64, step: f64) -> f64 {
    let mut inner = from;
    let mut outer = from + step;
    while excess(outer) > 0.0 {
        inner = outer;
        outer += step;
    }
    while (outer - inner).abs() > 1e-7 {
        let mid = 0.5 * (inner + outer);
        if excess(mid) > 0.0 {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    0.5 * (inner + outer)
}
