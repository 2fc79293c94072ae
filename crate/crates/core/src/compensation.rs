//! Cross-correlograms of coincidence events and the one-sided delay
//! compensation that removes the relative offset between the `+` and `-`
//! coincidence peaks before any timestamps are published.

use crate::error::{Error, Result};
use crate::sim::{Coincidence, CoincidenceStreams};

/// Default maximum |lag| considered (ps).
pub const DEFAULT_LAG_WINDOW: f64 = 10_000.0;
/// Default correlogram resolution (ps).
pub const DEFAULT_LAG_STEP: f64 = 10.0;
/// Box-smoothing radius (cells) used when locating a peak's half-max run.
const PEAK_SMOOTHING: usize = 5;

/// Histogram of `b - a` over pairs of detections. Cell `k` is centred on
/// `lag_start + k * lag_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlogram {
    lag_start: f64,
    lag_step: f64,
    counts: Vec<u64>,
}

impl Correlogram {
    pub fn new(lag_start: f64, lag_step: f64, counts: Vec<u64>) -> Result<Self> {
        if !(lag_step.is_finite() && lag_step > 0.0) {
            return Err(Error::param("lag_step", format!("must be positive, got {lag_step}")));
        }
        Ok(Correlogram {
            lag_start,
            lag_step,
            counts,
        })
    }

    pub fn lag_start(&self) -> f64 {
        self.lag_start
    }

    pub fn lag_step(&self) -> f64 {
        self.lag_step
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn lag(&self, k: usize) -> f64 {
        self.lag_start + k as f64 * self.lag_step
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Lag of the fullest cell (first one on ties).
    pub fn argmax_lag(&self) -> f64 {
        let (k, _) = self
            .counts
            .iter()
            .enumerate()
            .fold((0, 0), |best, (k, &c)| if c > best.1 { (k, c) } else { best });
        self.lag(k)
    }

    /// Cell-wise sum of two correlograms on the same lag grid.
    pub fn merge(&self, other: &Correlogram) -> Result<Correlogram> {
        if self.lag_start != other.lag_start
            || self.lag_step != other.lag_step
            || self.counts.len() != other.counts.len()
        {
            return Err(Error::Shape("correlograms use different lag grids".into()));
        }
        Ok(Correlogram {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    /// Peak location, RMS width and counts of the peak window.
    ///
    /// The contiguous above-half-maximum run is found on a box-smoothed copy
    /// (11 cells) and its raw-count centroid seeds a self-consistent centroid
    /// over a symmetric window three times the run's width, with fractional
    /// weights for partially covered cells.
    fn peak(&self) -> Result<(f64, f64, f64)> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max < 10 {
            return Err(Error::NoSignal(format!("highest cell holds {max} counts")));
        }
        if self.counts.iter().all(|&c| c == max) {
            return Err(Error::NoSignal("correlogram is flat".into()));
        }
        let smooth = self.smoothed(PEAK_SMOOTHING);
        let top = (0..smooth.len())
            .fold(0, |best, k| if smooth[k] > smooth[best] { k } else { best });
        let half = smooth[top] / 2.0;
        let mut lo = top;
        while lo > 0 && smooth[lo - 1] >= half {
            lo -= 1;
        }
        let mut hi = top;
        while hi + 1 < smooth.len() && smooth[hi + 1] >= half {
            hi += 1;
        }
        let run: u64 = self.counts[lo..=hi].iter().sum();
        let mut centre = (lo..=hi).map(|k| self.lag(k) * self.counts[k] as f64).sum::<f64>() / run as f64;

        let half_width = 1.5 * (hi - lo + 1) as f64 * self.lag_step;
        let mut moments = self.window_moments(centre, half_width);
        for _ in 0..100 {
            let next = moments.1 / moments.0;
            let done = (next - centre).abs() <= 1e-9 * self.lag_step;
            centre = next;
            moments = self.window_moments(centre, half_width);
            if done {
                break;
            }
        }
        let (w, s1, s2) = moments;
        let var = (s2 / w - (s1 / w).powi(2)).max(0.0);
        Ok((centre, var.sqrt(), w))
    }

    fn smoothed(&self, radius: usize) -> Vec<f64> {
        let n = self.counts.len();
        let mut prefix = vec![0u64; n + 1];
        for (k, &c) in self.counts.iter().enumerate() {
            prefix[k + 1] = prefix[k] + c;
        }
        (0..n)
            .map(|k| {
                let a = k.saturating_sub(radius);
                let b = (k + radius + 1).min(n);
                (prefix[b] - prefix[a]) as f64 / (b - a) as f64
            })
            .collect()
    }

    /// Weight, first and second moments of the counts inside
    /// `[centre - half_width, centre + half_width]`, each cell taken as a
    /// uniform spread over its width.
    fn window_moments(&self, centre: f64, half_width: f64) -> (f64, f64, f64) {
        let (lo, hi) = (centre - half_width, centre + half_width);
        let mut m = (0.0, 0.0, 0.0);
        for (k, &c) in self.counts.iter().enumerate() {
            let mid = self.lag(k);
            let a = (mid - 0.5 * self.lag_step).max(lo);
            let b = (mid + 0.5 * self.lag_step).min(hi);
            if c == 0 || b <= a {
                continue;
            }
            let w = c as f64 * (b - a) / self.lag_step;
            let x = 0.5 * (a + b);
            m.0 += w;
            m.1 += w * x;
            m.2 += w * (x * x + (b - a).powi(2) / 12.0);
        }
        m
    }
}

fn check_sorted(times: &[f64]) -> Result<()> {
    match times.windows(2).position(|w| !(w[0] <= w[1])) {
        Some(i) => Err(Error::Ordering { index: i + 1 }),
        None => Ok(()),
    }
}

/// Count pairs `(a, b)` with `|b - a| <= lag_window` into lag cells of width
/// `lag_step`, sweeping both sorted lists with a sliding window.
pub fn build_correlogram(
    times_a: &[f64],
    times_b: &[f64],
    lag_window: f64,
    lag_step: f64,
) -> Result<Correlogram> {
    if !(lag_step.is_finite() && lag_step > 0.0) {
        return Err(Error::param("lag_step", format!("must be positive, got {lag_step}")));
    }
    if !(lag_window.is_finite() && lag_window >= 0.0) {
        return Err(Error::param("lag_window", format!("must be non-negative, got {lag_window}")));
    }
    if times_a.is_empty() || times_b.is_empty() {
        return Err(Error::param("times", "both timestamp lists must be non-empty"));
    }
    check_sorted(times_a)?;
    check_sorted(times_b)?;

    let half = (lag_window / lag_step).ceil() as usize;
    let lag_start = -(half as f64) * lag_step;
    let mut counts = vec![0u64; 2 * half + 1];
    let mut lo = 0;
    for &a in times_a {
        while lo < times_b.len() && times_b[lo] - a < -lag_window {
            lo += 1;
        }
        for &b in &times_b[lo..] {
            let d = b - a;
            if d > lag_window {
                break;
            }
            let k = ((d - lag_start) / lag_step + 0.5).floor();
            if k >= 0.0 && (k as usize) < counts.len() {
                counts[k as usize] += 1;
            }
        }
    }
    Correlogram::new(lag_start, lag_step, counts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetEstimate {
    /// Peak lag of the `+` correlogram minus that of the `-` correlogram (ps).
    pub delta: f64,
    /// Half-width of the uncertainty on `delta` (ps).
    pub confidence_width: f64,
}

/// Relative delay between the `+` and `-` coincidence peaks. Each peak is
/// located by a count-weighted centroid seeded from its above-half-maximum
/// region.
pub fn estimate_offset(corr_plus: &Correlogram, corr_minus: &Correlogram) -> Result<OffsetEstimate> {
    let (cp, wp, np) = corr_plus.peak()?;
    let (cm, wm, nm) = corr_minus.peak()?;
    let ep = wp / np.sqrt();
    let em = wm / nm.sqrt();
    Ok(OffsetEstimate {
        delta: cp - cm,
        confidence_width: ep.hypot(em),
    })
}

/// Shift every timestamp by `-delta`.
pub fn compensate(times: &[f64], delta: f64) -> Vec<f64> {
    times.iter().map(|t| t - delta).collect()
}

/// The `+` (Bob's bit-1 detector) and `-` (bit-0 detector) correlograms
/// against all of Alice's detections in the basis.
pub fn coincidence_correlograms(
    streams: &CoincidenceStreams,
    lag_window: f64,
    lag_step: f64,
) -> Result<(Correlogram, Correlogram)> {
    let alice = streams.alice_times();
    let plus = build_correlogram(&alice, &streams.bob_times(1), lag_window, lag_step)?;
    let minus = build_correlogram(&alice, &streams.bob_times(0), lag_window, lag_step)?;
    Ok((plus, minus))
}

/// Bob's streams after compensating his bit-1 detector by `delta`.
pub fn compensate_bob(streams: &CoincidenceStreams, delta: f64) -> CoincidenceStreams {
    let pairs = streams
        .pairs
        .iter()
        .map(|p| {
            if p.bit == 1 {
                Coincidence {
                    bob: p.bob - delta,
                    ..*p
                }
            } else {
                *p
            }
        })
        .collect();
    CoincidenceStreams { pairs }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub before: OffsetEstimate,
    pub after: OffsetEstimate,
    pub plus_before: Correlogram,
    pub minus: Correlogram,
    pub plus_after: Correlogram,
    pub compensated: CoincidenceStreams,
}

/// Estimate the offset, compensate Bob's bit-1 detector, and re-estimate.
pub fn closed_loop(streams: &CoincidenceStreams, lag_window: f64, lag_step: f64) -> Result<ClosedLoop> {
    let (plus_before, minus) = coincidence_correlograms(streams, lag_window, lag_step)?;
    let before = estimate_offset(&plus_before, &minus)?;
    let compensated = compensate_bob(streams, before.delta);
    let (plus_after, minus_after) = coincidence_correlograms(&compensated, lag_window, lag_step)?;
    let after = estimate_offset(&plus_after, &minus_after)?;
    Ok(ClosedLoop {
        before,
        after,
        plus_before,
        minus,
        plus_after,
        compensated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 * 100_000.0).collect()
    }

    #[test]
    fn shifted_copy_gives_single_cell() {
        let a = ramp(50);
        let b: Vec<f64> = a.iter().map(|t| t + 350.0).collect();
        let c = build_correlogram(&a, &b, 10_000.0, 1.0).unwrap();
        let nonzero: Vec<usize> = (0..c.counts().len()).filter(|&k| c.counts()[k] > 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(c.lag(nonzero[0]), 350.0);
        assert_eq!(c.counts()[nonzero[0]], 50);
    }

    #[test]
    fn identical_lists_peak_at_zero() {
        let a = ramp(20);
        let c = build_correlogram(&a, &a, 1000.0, 10.0).unwrap();
        assert_eq!(c.argmax_lag(), 0.0);
    }

    #[test]
    fn no_pairs_in_window() {
        let a = vec![0.0, 1e6];
        let b = vec![5e5];
        let c = build_correlogram(&a, &b, 1000.0, 10.0).unwrap();
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let a = vec![0.0, 10.0, 5.0];
        assert!(matches!(
            build_correlogram(&a, &[1.0], 100.0, 1.0),
            Err(Error::Ordering { index: 2 })
        ));
    }

    #[test]
    fn matches_all_pairs_scan() {
        let a = vec![0.0, 3.0, 3.5, 20.0, 41.0];
        let b = vec![-2.0, 1.0, 4.0, 19.0, 22.0, 60.0];
        let c = build_correlogram(&a, &b, 5.0, 1.0).unwrap();
        let mut brute = vec![0u64; c.counts().len()];
        for x in &a {
            for y in &b {
                let d: f64 = y - x;
                if d.abs() <= 5.0 {
                    brute[((d + 5.0) + 0.5).floor() as usize] += 1;
                }
            }
        }
        assert_eq!(c.counts(), &brute[..]);
    }

    fn synthetic_peak(center: f64, step: f64) -> Correlogram {
        let counts = (0..201)
            .map(|k| {
                let lag = -1000.0 + k as f64 * step;
                (1000.0 * (-((lag - center) / 60.0).powi(2) / 2.0).exp()).round() as u64
            })
            .collect();
        Correlogram::new(-1000.0, step, counts).unwrap()
    }

    #[test]
    fn offset_between_synthetic_peaks() {
        let step = 10.0;
        let plus = synthetic_peak(0.0, step);
        let minus = synthetic_peak(350.0, step);
        // Noise-free symmetric peaks sit exactly at their centres.
        let est = estimate_offset(&plus, &minus).unwrap();
        assert!((est.delta + 350.0).abs() < 1e-9, "{}", est.delta);
        assert!(est.confidence_width > 0.0);

        let off_grid = estimate_offset(&synthetic_peak(123.4, step), &minus).unwrap();
        assert!((off_grid.delta - (123.4 - 350.0)).abs() < 0.5, "{}", off_grid.delta);

        let same = estimate_offset(&plus, &plus).unwrap();
        assert_eq!(same.delta, 0.0);
    }

    #[test]
    fn flat_or_empty_correlograms_have_no_signal() {
        let flat = Correlogram::new(0.0, 1.0, vec![50; 10]).unwrap();
        let weak = Correlogram::new(0.0, 1.0, vec![0, 3, 9, 2]).unwrap();
        let good = synthetic_peak(0.0, 10.0);
        assert!(matches!(estimate_offset(&flat, &good), Err(Error::NoSignal(_))));
        assert!(matches!(estimate_offset(&good, &weak), Err(Error::NoSignal(_))));
    }

    #[test]
    fn compensate_round_trip() {
        let t = vec![0.0, 125.5, 1e9, 3.25e10];
        assert_eq!(compensate(&t, 0.0), t);
        assert_eq!(compensate(&compensate(&t, 350.0), -350.0), t);
        assert_eq!(compensate(&t, 100.0)[1], 25.5);
    }

    #[test]
    fn merge_adds_counts() {
        let a = Correlogram::new(-1.0, 1.0, vec![1, 2, 3]).unwrap();
        let b = Correlogram::new(-1.0, 1.0, vec![4, 0, 1]).unwrap();
        assert_eq!(a.merge(&b).unwrap().counts(), &[5, 2, 4]);
        let c = Correlogram::new(-2.0, 1.0, vec![4, 0, 1]).unwrap();
        assert!(a.merge(&c).is_err());
    }
}
