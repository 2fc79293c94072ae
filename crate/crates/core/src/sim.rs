//! Monte Carlo detection events and what an eavesdropper can extract from
//! their publicly shared, binned timestamps.
//!
//! Streams are generated in fixed-size chunks. Chunk `c` draws from a ChaCha8
//! generator seeded with the configured seed on stream `c`, so the output is
//! identical however many threads produce it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::binning::BinningScheme;
use crate::error::{Error, Result};
use crate::info::{mutual_information_bits, BitPrior, ChannelSpec};
use crate::response::{discretize, ResponseModel, SampledDensity};

const CHUNK: usize = 1 << 16;

/// One detection as seen after public binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub true_bit: u8,
    /// Detection time (ps).
    pub timestamp: f64,
    /// Public bin index of `timestamp`.
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model0: ResponseModel,
    pub model1: ResponseModel,
    pub prior: BitPrior,
    pub scheme: BinningScheme,
    pub n_events: usize,
    pub seed: u64,
    /// Fine-grid step used for inverse-CDF sampling (ps).
    pub dt: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_events == 0 {
            return Err(Error::param("n_events", "must be at least 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over a fine grid with uniform jitter inside the chosen
/// cell.
#[derive(Debug, Clone)]
pub struct GridSampler {
    t_start: f64,
    dt: f64,
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn new(density: &SampledDensity) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = density
            .cell_masses()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        let total = acc;
        cdf.iter_mut().for_each(|c| *c /= total);
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        GridSampler {
            t_start: density.t_start(),
            dt: density.dt(),
            cdf,
        }
    }

    /// Map two uniforms in `[0, 1)` to a time: `u` picks the cell, `jitter`
    /// the position inside it.
    pub fn sample(&self, u: f64, jitter: f64) -> f64 {
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let t = self.t_start + (idx as f64 + jitter) * self.dt;
        t.min((self.t_start + self.cdf.len() as f64 * self.dt).next_down())
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>();
        let jitter = rng.random::<f64>();
        self.sample(u, jitter)
    }
}

fn whole_cells(t_start: f64, t_end: f64, dt: f64) -> usize {
    let r = (t_end - t_start) / dt;
    let nearest = r.round();
    if (r - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        r.floor() as usize
    }
}

fn sampler_on(model: &ResponseModel, t_start: f64, t_end: f64, dt: f64) -> Result<GridSampler> {
    let n = whole_cells(t_start, t_end, dt).max(1);
    Ok(GridSampler::new(&discretize(model, t_start, t_start + n as f64 * dt, dt)?))
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn draw_bit<R: Rng>(rng: &mut R, prior: BitPrior) -> u8 {
    u8::from(rng.random::<f64>() < prior.p1())
}

/// Draw `n_events` detections: a bit from the prior, a timestamp from that
/// bit's detector response, and its public bin.
pub fn simulate_stream(cfg: &SimConfig) -> Result<Vec<EventRecord>> {
    cfg.validate()?;
    let s = &cfg.scheme;
    let samplers = [
        sampler_on(&cfg.model0, s.t_start(), s.t_end(), cfg.dt)?,
        sampler_on(&cfg.model1, s.t_start(), s.t_end(), cfg.dt)?,
    ];
    let n_chunks = cfg.n_events.div_ceil(CHUNK);
    let chunks = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let len = CHUNK.min(cfg.n_events - c * CHUNK);
            (0..len)
                .map(|_| {
                    let bit = draw_bit(&mut rng, cfg.prior);
                    let t = samplers[bit as usize].draw(&mut rng);
                    Ok(EventRecord {
                        true_bit: bit,
                        timestamp: t,
                        bin: s.bin_index(t)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Eavesdropper's maximum-a-posteriori guess of the bit behind a bin; ties go
/// to bit 0.
pub fn map_guess(bin: usize, spec: &ChannelSpec) -> u8 {
    let score = |bit: u8| spec.prior().get(bit) * spec.cond(bit).probs().get(bin).copied().unwrap_or(0.0);
    u8::from(score(1) > score(0))
}

/// Fraction of events whose bit the MAP rule guesses correctly.
pub fn guessing_success(events: &[EventRecord], spec: &ChannelSpec) -> f64 {
    if events.is_empty() {
        return 0.0;
    }
    let hits = events
        .iter()
        .filter(|e| map_guess(e.bin, spec) == e.true_bit)
        .count();
    hits as f64 / events.len() as f64
}

/// Joint (bit, bin) counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCounts {
    pub bit0: Vec<u64>,
    pub bit1: Vec<u64>,
}

impl JointCounts {
    pub fn from_events(events: &[EventRecord]) -> Self {
        let n_bins = events.iter().map(|e| e.bin + 1).max().unwrap_or(0);
        let mut bit0 = vec![0u64; n_bins];
        let mut bit1 = vec![0u64; n_bins];
        for e in events {
            if e.true_bit == 0 {
                bit0[e.bin] += 1;
            } else {
                bit1[e.bin] += 1;
            }
        }
        JointCounts { bit0, bit1 }
    }

    pub fn total(&self) -> u64 {
        self.bit0.iter().chain(&self.bit1).sum()
    }

    /// Plug-in mutual information of the empirical joint table, in bits.
    pub fn plugin_mi(&self) -> f64 {
        let n0: u64 = self.bit0.iter().sum();
        let n1: u64 = self.bit1.iter().sum();
        let n = n0 + n1;
        if n == 0 || n0 == 0 || n1 == 0 {
            return 0.0;
        }
        let prior = BitPrior::new(n0 as f64 / n as f64).expect("ratio lies in [0, 1]");
        let c0: Vec<f64> = self.bit0.iter().map(|&c| c as f64 / n0 as f64).collect();
        let c1: Vec<f64> = self.bit1.iter().map(|&c| c as f64 / n1 as f64).collect();
        mutual_information_bits(prior, &c0, &c1)
    }
}

/// Plug-in MI of the empirical (bit, bin) table, without bias correction.
pub fn empirical_mi(events: &[EventRecord]) -> f64 {
    JointCounts::from_events(events).plugin_mi()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageEstimate {
    pub mi_bits: f64,
    /// Bootstrap standard error of `mi_bits`.
    pub std_error: f64,
    pub n_events: u64,
}

/// Plug-in MI with a bootstrap standard error from `n_boot` resamples.
///
/// Resampling `n` events with replacement is equivalent to a multinomial draw
/// over the joint table, done here cell by cell with conditional binomials.
pub fn bootstrap_mi(events: &[EventRecord], n_boot: usize, seed: u64) -> LeakageEstimate {
    let table = JointCounts::from_events(events);
    let n = table.total();
    let mi = table.plugin_mi();
    if n == 0 || n_boot < 2 {
        return LeakageEstimate {
            mi_bits: mi,
            std_error: 0.0,
            n_events: n,
        };
    }
    let cells: Vec<u64> = table.bit0.iter().chain(&table.bit1).copied().collect();
    let n_bins = table.bit0.len();
    let replicates: Vec<f64> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = chunk_rng(seed, b);
            let mut left = n;
            let mut mass_left = n as f64;
            let mut draw = Vec::with_capacity(cells.len());
            for &c in &cells {
                let k = if left == 0 || c == 0 {
                    0
                } else {
                    let p = (c as f64 / mass_left).min(1.0);
                    Binomial::new(left, p).expect("valid binomial").sample(&mut rng)
                };
                draw.push(k);
                left -= k;
                mass_left -= c as f64;
            }
            let (bit0, bit1) = draw.split_at(n_bins);
            JointCounts {
                bit0: bit0.to_vec(),
                bit1: bit1.to_vec(),
            }
            .plugin_mi()
        })
        .collect();
    let mean = replicates.iter().sum::<f64>() / n_boot as f64;
    let var = replicates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n_boot - 1) as f64;
    LeakageEstimate {
        mi_bits: mi,
        std_error: var.sqrt(),
        n_events: n,
    }
}

/// Response models of the two detectors (bit 0, bit 1) of one party.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPair {
    pub bit0: ResponseModel,
    pub bit1: ResponseModel,
}

impl DetectorPair {
    pub fn matched(model: ResponseModel) -> Self {
        DetectorPair {
            bit0: model,
            bit1: model,
        }
    }

    /// The bit-1 detector sits behind an extra delay `delta`.
    pub fn with_delay(model: ResponseModel, delta: f64) -> Self {
        DetectorPair {
            bit0: model,
            bit1: model.shift_model(delta),
        }
    }

    fn get(&self, bit: u8) -> &ResponseModel {
        if bit == 0 {
            &self.bit0
        } else {
            &self.bit1
        }
    }
}

/// Entangled-pair source feeding two detection modules.
///
/// Pair `i` is emitted at `(i + U) * mean_spacing` with `U` uniform in
/// `[0, 1)`; both parties measure the same bit and add their detector's
/// response delay.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceConfig {
    pub alice: DetectorPair,
    pub bob: DetectorPair,
    pub prior: BitPrior,
    pub n_pairs: usize,
    /// Mean time between emitted pairs (ps).
    pub mean_spacing: f64,
    pub seed: u64,
    pub dt: f64,
}

impl CoincidenceConfig {
    /// Matched detectors at Bob, and an extra `delta_t0` in Alice's bit-1 arm.
    pub fn with_alice_delay(model: ResponseModel, delta_t0: f64, n_pairs: usize, seed: u64) -> Self {
        CoincidenceConfig {
            alice: DetectorPair::with_delay(model, delta_t0),
            bob: DetectorPair::matched(model),
            prior: BitPrior::uniform(),
            n_pairs,
            mean_spacing: 1e6,
            seed,
            dt: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coincidence {
    pub bit: u8,
    /// Alice's detection time (ps).
    pub alice: f64,
    /// Bob's detection time (ps).
    pub bob: f64,
}

impl Coincidence {
    pub fn delay(&self) -> f64 {
        self.bob - self.alice
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceStreams {
    pub pairs: Vec<Coincidence>,
}

impl CoincidenceStreams {
    /// All of Alice's detection times, sorted.
    pub fn alice_times(&self) -> Vec<f64> {
        sorted(self.pairs.iter().map(|p| p.alice))
    }

    /// Bob's detection times from the detector registering `bit`, sorted.
    pub fn bob_times(&self, bit: u8) -> Vec<f64> {
        sorted(self.pairs.iter().filter(|p| p.bit == bit).map(|p| p.bob))
    }

    /// Coincidence delays `bob - alice` binned with `scheme`, as the
    /// eavesdropper reconstructs them from both public timestamp lists.
    pub fn delay_events(&self, scheme: &BinningScheme) -> Result<Vec<EventRecord>> {
        self.pairs
            .iter()
            .map(|p| {
                let d = p.delay();
                Ok(EventRecord {
                    true_bit: p.bit,
                    timestamp: d,
                    bin: scheme.bin_index(d)?,
                })
            })
            .collect()
    }
}

fn sorted(it: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = it.collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn simulate_coincidences(cfg: &CoincidenceConfig) -> Result<CoincidenceStreams> {
    if cfg.n_pairs == 0 {
        return Err(Error::param("n_pairs", "must be at least 1"));
    }
    if !(cfg.mean_spacing.is_finite() && cfg.mean_spacing > 0.0) {
        return Err(Error::param("mean_spacing", "must be positive"));
    }
    let sampler = |m: &ResponseModel| {
        let (a, b) = m.support();
        sampler_on(m, a, b, cfg.dt)
    };
    let alice = [sampler(cfg.alice.get(0))?, sampler(cfg.alice.get(1))?];
    let bob = [sampler(cfg.bob.get(0))?, sampler(cfg.bob.get(1))?];
    let n_chunks = cfg.n_pairs.div_ceil(CHUNK);
    let pairs = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let first = c * CHUNK;
            let len = CHUNK.min(cfg.n_pairs - first);
            (first..first + len)
                .map(|i| {
                    let emitted = (i as f64 + rng.random::<f64>()) * cfg.mean_spacing;
                    let bit = draw_bit(&mut rng, cfg.prior);
                    let a = emitted + alice[bit as usize].draw(&mut rng);
                    let b = emitted + bob[bit as usize].draw(&mut rng);
                    Coincidence {
                        bit,
                        alice: a,
                        bob: b,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(CoincidenceStreams { pairs })
}
