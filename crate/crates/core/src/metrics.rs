//! Reductions of a [`RunResult`] to throughput, loss and delay statistics.
//!
//! Only packets that arrived inside the measurement window count. Delay
//! statistics are taken over decoded packets only; losses are reported
//! separately.

use serde::Serialize;

use crate::engine::{packet_delay, RunResult};

pub const DEFAULT_QUANTILES: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

/// Decoded packets per slot of the measurement window.
pub fn throughput(r: &RunResult) -> f64 {
    let decoded = r.measured().filter(|p| p.is_decoded()).count();
    decoded as f64 / r.window_slots() as f64
}

/// Lost packets over arrived packets in the measurement window; 0 when
/// nothing arrived.
pub fn loss_rate(r: &RunResult) -> f64 {
    let (arrived, lost) = r
        .measured()
        .fold((0u64, 0u64), |(a, l), p| (a + 1, l + p.lost as u64));
    if arrived == 0 {
        0.0
    } else {
        lost as f64 / arrived as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBin {
    /// Lower edge of the bin; the bin covers `[delay_ms, delay_ms + width)`.
    pub delay_ms: f64,
    pub count: u64,
    pub pdf: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayDistribution {
    pub bin_width_ms: f64,
    pub bins: Vec<DelayBin>,
    /// NaN when empty.
    pub mean_ms: f64,
    pub quantiles: Vec<(f64, f64)>,
    #[serde(skip)]
    sorted: Vec<f64>,
}

impl DelayDistribution {
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    /// Lower edge of the most populated bin (the earliest one on ties).
    pub fn mode_ms(&self) -> Option<f64> {
        self.bins
            .iter()
            .fold(None::<&DelayBin>, |best, b| match best {
                Some(x) if x.count >= b.count => Some(x),
                _ => Some(b),
            })
            .map(|b| b.delay_ms)
    }

    pub fn quantile(&self, q: f64) -> Option<f64> {
        quantile_sorted(&self.sorted, q)
    }

    pub fn min_ms(&self) -> Option<f64> {
        self.sorted.first().copied()
    }

    pub fn max_ms(&self) -> Option<f64> {
        self.sorted.last().copied()
    }
}

/// Histogram, pdf, cdf, mean and default quantiles of decoded packets'
/// delays. An empty distribution is returned when nothing was decoded.
pub fn delay_distribution(r: &RunResult, bin_width_ms: f64) -> DelayDistribution {
    let delays = r.measured().filter_map(|p| packet_delay(p, &r.time)).collect();
    distribution_from_delays(delays, bin_width_ms)
}

pub fn distribution_from_delays(mut delays: Vec<f64>, bin_width_ms: f64) -> DelayDistribution {
    assert!(bin_width_ms > 0.0, "bin width must be positive");
    delays.sort_by(f64::total_cmp);
    let n = delays.len();
    if n == 0 {
        return DelayDistribution {
            bin_width_ms,
            bins: Vec::new(),
            mean_ms: f64::NAN,
            quantiles: DEFAULT_QUANTILES.iter().map(|&q| (q, f64::NAN)).collect(),
            sorted: delays,
        };
    }
    let bin_of = |d: f64| (d / bin_width_ms + 1e-9).floor() as i64;
    let first = bin_of(delays[0]);
    let last = bin_of(delays[n - 1]);
    let mut counts = vec![0u64; (last - first + 1) as usize];
    for &d in &delays {
        counts[(bin_of(d) - first) as usize] += 1;
    }
    let mut acc = 0u64;
    let bins = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            acc += count;
            DelayBin {
                delay_ms: (first + i as i64) as f64 * bin_width_ms,
                count,
                pdf: count as f64 / n as f64,
                cdf: acc as f64 / n as f64,
            }
        })
        .collect();
    let mean_ms = delays.iter().sum::<f64>() / n as f64;
    let quantiles = DEFAULT_QUANTILES
        .iter()
        .map(|&q| (q, quantile_sorted(&delays, q).unwrap()))
        .collect();
    DelayDistribution {
        bin_width_ms,
        bins,
        mean_ms,
        quantiles,
        sorted: delays,
    }
}

/// Fraction of decoded packets delivered within `timeout_ms`.
pub fn cdf_at(d: &DelayDistribution, timeout_ms: f64) -> f64 {
    if d.sorted.is_empty() {
        return 0.0;
    }
    let within = d.sorted.partition_point(|&x| x <= timeout_ms);
    within as f64 / d.sorted.len() as f64
}

// nearest-rank
fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Per-run numbers that go into a sweep summary row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSummary {
    pub throughput: f64,
    pub loss_rate: f64,
    pub arrived: u64,
    pub decoded: u64,
    pub delay_mean_ms: f64,
    pub delay_p50_ms: f64,
    pub delay_p95_ms: f64,
    pub delay_p99_ms: f64,
}

impl RunSummary {
    pub fn of(r: &RunResult) -> Self {
        let d = delay_distribution(r, 1.0);
        let arrived = r.measured().count() as u64;
        let decoded = r.measured().filter(|p| p.is_decoded()).count() as u64;
        let q = |p| d.quantile(p).unwrap_or(f64::NAN);
        RunSummary {
            throughput: throughput(r),
            loss_rate: loss_rate(r),
            arrived,
            decoded,
            delay_mean_ms: d.mean_ms,
            delay_p50_ms: q(0.5),
            delay_p95_ms: q(0.95),
            delay_p99_ms: q(0.99),
        }
    }
}
