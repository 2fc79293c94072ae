//! Mutual information between a binary key bit and a detection time.
//!
//! Everything is reported in bits. The binned and fine-grid variants share one
//! kernel, [`mutual_information_bits`], which sums
//! `p(x) c_x[k] log2(c_x[k] / m[k])` over bins, with `m` the prior-weighted
//! mixture of the two conditionals and `0 log 0 = 0`.

use std::f64::consts::LN_2;

use crate::binning::BinProbabilities;
use crate::error::{Error, Result};
use crate::response::{default_domain, discretize, measure_fwhm, ResponseModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitPrior {
    p0: f64,
    p1: f64,
}

impl BitPrior {
    pub fn new(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::param("p0", format!("must lie in [0, 1], got {p0}")));
        }
        Ok(BitPrior { p0, p1: 1.0 - p0 })
    }

    pub fn uniform() -> Self {
        BitPrior { p0: 0.5, p1: 0.5 }
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn get(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.p0
        } else {
            self.p1
        }
    }

    pub fn swapped(&self) -> Self {
        BitPrior {
            p0: self.p1,
            p1: self.p0,
        }
    }
}

impl Default for BitPrior {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Binary channel from key bit to time bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    prior: BitPrior,
    cond0: BinProbabilities,
    cond1: BinProbabilities,
}

impl ChannelSpec {
    pub fn new(prior: BitPrior, cond0: BinProbabilities, cond1: BinProbabilities) -> Result<Self> {
        if cond0.scheme() != cond1.scheme() || cond0.len() != cond1.len() {
            return Err(Error::Shape(
                "conditionals are defined on different partitions".into(),
            ));
        }
        Ok(ChannelSpec {
            prior,
            cond0,
            cond1,
        })
    }

    pub fn prior(&self) -> BitPrior {
        self.prior
    }

    pub fn cond0(&self) -> &BinProbabilities {
        &self.cond0
    }

    pub fn cond1(&self) -> &BinProbabilities {
        &self.cond1
    }

    pub fn cond(&self, bit: u8) -> &BinProbabilities {
        if bit == 0 {
            &self.cond0
        } else {
            &self.cond1
        }
    }

    /// Relabel the bits: bit 0 becomes bit 1 and vice versa.
    pub fn swapped(&self) -> Self {
        ChannelSpec {
            prior: self.prior.swapped(),
            cond0: self.cond1.clone(),
            cond1: self.cond0.clone(),
        }
    }
}

/// Detection-time distribution over the ensemble of both detectors.
pub fn mixture(spec: &ChannelSpec) -> BinProbabilities {
    let (p0, p1) = (spec.prior.p0, spec.prior.p1);
    let probs = spec
        .cond0
        .probs()
        .iter()
        .zip(spec.cond1.probs())
        .map(|(a, b)| p0 * a + p1 * b)
        .collect();
    BinProbabilities::from_parts_unchecked(*spec.cond0.scheme(), probs)
}

pub fn mutual_information_binned(spec: &ChannelSpec) -> f64 {
    mutual_information_bits(spec.prior, spec.cond0.probs(), spec.cond1.probs())
}

/// Mutual information in bits of a binary input with conditional output
/// distributions `c0` and `c1` over the same cells.
pub fn mutual_information_bits(prior: BitPrior, c0: &[f64], c1: &[f64]) -> f64 {
    debug_assert_eq!(c0.len(), c1.len());
    let (p0, p1) = (prior.p0, prior.p1);
    let term = |p: f64, c: f64, ln_m: f64| {
        if p > 0.0 && c > 0.0 {
            p * c * (c.ln() - ln_m) / LN_2
        } else {
            0.0
        }
    };
    let total: f64 = c0
        .iter()
        .zip(c1)
        .map(|(&a, &b)| {
            let m = p0 * a + p1 * b;
            let ln_m = if m >= f64::MIN_POSITIVE {
                m.ln()
            } else {
                // Subnormal cell masses: p * c may round to zero.
                let (x, y) = (p0.ln() + a.ln(), p1.ln() + b.ln());
                let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
                if lo == f64::NEG_INFINITY {
                    hi
                } else {
                    hi + (lo - hi).exp().ln_1p()
                }
            };
            term(p0, a, ln_m) + term(p1, b, ln_m)
        })
        .sum();
    total.max(0.0)
}

/// Fine-grid reference mutual information without any public binning.
///
/// Both densities are discretised with step `dt` on their default analysis
/// domain; every grid cell is treated as its own bin. `dt` must not exceed a
/// twentieth of the narrower response's FWHM.
pub fn mutual_information_continuous(
    prior: BitPrior,
    m0: &ResponseModel,
    m1: &ResponseModel,
    dt: f64,
) -> Result<f64> {
    let min_fwhm = measure_fwhm(m0).min(measure_fwhm(m1));
    if !(dt > 0.0 && dt <= min_fwhm / 20.0) {
        return Err(Error::param(
            "dt",
            format!("must be in (0, {}] for FWHM {min_fwhm} ps, got {dt}", min_fwhm / 20.0),
        ));
    }
    let (a, b) = default_domain(m0, m1, dt);
    let d0 = discretize(m0, a, b, dt)?;
    let d1 = discretize(m1, a, b, dt)?;
    let c0: Vec<f64> = d0.cell_masses().collect();
    let c1: Vec<f64> = d1.cell_masses().collect();
    Ok(mutual_information_bits(prior, &c0, &c1))
}

/// Shannon entropy of the key bit.
pub fn entropy(prior: BitPrior) -> f64 {
    [prior.p0, prior.p1]
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}
