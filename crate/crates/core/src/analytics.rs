//! Closed-form results and a brute-force peeling oracle.
//!
//! The per-slot placement probability is evaluated term by term from the
//! sequential placement model: the `i`-th replica of a packet lands in a
//! given slot, among `N` candidates, with probability `1/(N - i + 1)`
//! provided none of the previous `i - 1` replicas took it, which happens
//! with probability `(N - i + 1)/N`.

use std::collections::{BTreeMap, BTreeSet};

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::model::{AccessMode, DegreeDistribution, SchemeConfig, SlotIndex, TimeConfig};

/// Probability that the `i`-th replica lands in a given slot out of `n`
/// free candidates, given the slot is not yet taken: `1/(n - i + 1)`.
pub fn p_i(i: u64, n: u64) -> f64 {
    debug_assert!(i >= 1 && i <= n);
    1.0 / (n - i + 1) as f64
}

/// Probability that none of `j` replicas placed over `n` slots landed in a
/// given slot: `(n - j)/n`.
pub fn p_not(j: u64, n: u64) -> f64 {
    debug_assert!(j <= n);
    (n - j) as f64 / n as f64
}

/// Probability that a packet's first replica went out at most `n_sw - 1`
/// slots before a given slot, out of an averaging horizon of `n` slots:
/// `(n_sw - 1)/n`.
pub fn p_first(n_sw: u64, n: u64) -> f64 {
    debug_assert!(n_sw <= n + 1);
    (n_sw - 1) as f64 / n as f64
}

/// Probability that a degree-`l` packet sends a replica in a given slot of
/// its frame of `n_f` slots.
pub fn p_uins_fr(l: u64, n_f: u64) -> f64 {
    assert!(l >= 1 && l <= n_f, "need 1 <= l <= N_f");
    (1..=l).map(|i| p_not(i - 1, n_f) * p_i(i, n_f)).sum()
}

/// Sliding-window counterpart of [`p_uins_fr`]: the first replica sits in
/// the slot with probability `1/n_f`; otherwise, if the slot falls in the
/// packet's window, one of the remaining `l - 1` replicas placed over
/// `n_sw - 1` slots may land there.
pub fn p_uins_sw(l: u64, n_f: u64, n_sw: u64) -> f64 {
    assert!(l >= 1 && l <= n_sw && n_sw <= n_f, "need 1 <= l <= N_sw <= N_f");
    let first = p_i(1, n_f);
    if l == 1 {
        return first;
    }
    let m = n_sw - 1;
    let others: f64 = (1..l).map(|k| p_not(k - 1, m) * p_i(k, m)).sum();
    first + p_first(n_sw, n_f) * others
}

/// Instances-per-slot distribution for mean degree `mean_degree(d)` at load
/// `g`. With `users = Some(n)` the number of instances in a slot is
/// Binomial(n, Λ'(1)·g/n); with `None` the limit Poisson(Λ'(1)·g).
///
/// The Poisson variant is truncated once the remaining tail mass drops
/// below 1e-15.
pub fn slot_degree_pmf(d: &DegreeDistribution, g: f64, users: Option<u64>) -> Vec<f64> {
    let mean = d.mean_degree() * g;
    match users {
        Some(n) => binomial_pmf(n, mean / n as f64),
        None => poisson_pmf(mean, 1e-15),
    }
}

pub fn poisson_pmf(mean: f64, tail: f64) -> Vec<f64> {
    if mean <= 0.0 {
        return vec![1.0];
    }
    let mut pmf = Vec::new();
    let mut term = (-mean).exp();
    let mut cum = 0.0;
    let mut k = 0u64;
    loop {
        pmf.push(term);
        cum += term;
        if k as f64 > mean && 1.0 - cum < tail {
            break;
        }
        k += 1;
        term *= mean / k as f64;
    }
    pmf
}

pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut v = vec![0.0; n as usize + 1];
        v[0] = 1.0;
        return v;
    }
    if p >= 1.0 {
        let mut v = vec![0.0; n as usize + 1];
        v[n as usize] = 1.0;
        return v;
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let mut ln_choose = 0.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            (ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q).exp()
        })
        .collect()
}

/// Total variation distance between two mass functions on 0, 1, 2, ...
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    0.5 * (0..n)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayBounds {
    pub min_ms: f64,
    pub max_ms: f64,
    /// FR excludes the lower bound, SW attains it.
    pub min_inclusive: bool,
}

impl DelayBounds {
    pub fn contains(&self, delay_ms: f64) -> bool {
        let lower = if self.min_inclusive {
            delay_ms >= self.min_ms
        } else {
            delay_ms > self.min_ms
        };
        lower && delay_ms <= self.max_ms
    }
}

/// Support of the packet delivery delay: `(T_p + T_slot, T_p + 2·T_f]` for
/// framed access, `[T_p + T_slot, T_p + N_rx·T_slot]` for sliding windows.
pub fn delay_bounds(scheme: &SchemeConfig, time: &TimeConfig) -> DelayBounds {
    let t_p = time.propagation_delay_ms;
    let t_slot = time.slot_duration_ms;
    match scheme.mode {
        AccessMode::Framed => DelayBounds {
            min_ms: t_p + t_slot,
            max_ms: t_p + 2.0 * scheme.window_slots as f64 * t_slot,
            min_inclusive: false,
        },
        AccessMode::SlidingWindow => DelayBounds {
            min_ms: t_p + t_slot,
            max_ms: t_p + scheme.receiver_memory_slots as f64 * t_slot,
            min_inclusive: true,
        },
    }
}

/// Throughput of plain slotted ALOHA at load `g`: `g·e^{-g}`.
pub fn sa_throughput(g: f64) -> f64 {
    g * (-g).exp()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    /// Indices into the input placement list.
    pub decoded: BTreeSet<usize>,
    pub residual: BTreeSet<usize>,
    /// Slots still holding residual instances.
    pub residual_slots: BTreeSet<SlotIndex>,
}

impl OracleOutcome {
    /// True if every residual slot holds at least two residual instances,
    /// i.e. the residual packets form a stopping set (or nothing is left).
    pub fn residual_is_stopping_set(&self, placements: &[Vec<SlotIndex>]) -> bool {
        let mut load: BTreeMap<SlotIndex, usize> = BTreeMap::new();
        for &p in &self.residual {
            for &s in &placements[p] {
                *load.entry(s).or_default() += 1;
            }
        }
        self.residual_slots
            .iter()
            .all(|s| load.get(s).copied().unwrap_or(0) >= 2)
    }
}

/// Decodes a placement set with no memory bound and no ordering: every pass
/// rescans all slots from scratch and decodes all packets alone in some
/// slot, until a pass changes nothing.
///
/// Peeling only ever removes instances, so the result is the unique maximal
/// decodable set.
pub fn oracle_decode(placements: &[Vec<SlotIndex>]) -> OracleOutcome {
    let mut by_slot: BTreeMap<SlotIndex, Vec<usize>> = BTreeMap::new();
    for (p, slots) in placements.iter().enumerate() {
        for &s in slots {
            by_slot.entry(s).or_default().push(p);
        }
    }
    let mut decoded = vec![false; placements.len()];
    loop {
        let fresh: BTreeSet<usize> = by_slot
            .values()
            .filter_map(|members| {
                let mut present = members.iter().filter(|&&p| !decoded[p]);
                match (present.next(), present.next()) {
                    (Some(&p), None) => Some(p),
                    _ => None,
                }
            })
            .collect();
        if fresh.is_empty() {
            break;
        }
        for p in fresh {
            decoded[p] = true;
        }
    }
    let (decoded, residual): (BTreeSet<usize>, BTreeSet<usize>) =
        (0..placements.len()).partition(|&p| decoded[p]);
    let residual_slots = residual
        .iter()
        .flat_map(|&p| placements[p].iter().copied())
        .collect();
    OracleOutcome {
        decoded,
        residual,
        residual_slots,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed counts (index = category) against a
/// mass function. Categories are pooled from the top down until each
/// expected count reaches `min_expected`; the last pooled category absorbs
/// the whole upper tail of `pmf`.
pub fn chi_square_gof(observed: &[u64], pmf: &[f64], min_expected: f64) -> ChiSquareFit {
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    let len = observed.len().max(pmf.len());
    let obs = |k: usize| observed.get(k).copied().unwrap_or(0) as f64;
    let exp = |k: usize| pmf.get(k).copied().unwrap_or(0.0) * n;

    // find the first category from which the upper tail is pooled
    let mut cut = len;
    let mut tail = 0.0;
    while cut > 1 {
        tail += exp(cut - 1);
        if tail >= min_expected {
            cut -= 1;
            break;
        }
        cut -= 1;
    }
    let mut cells: Vec<(f64, f64)> = (0..cut).map(|k| (obs(k), exp(k))).collect();
    let tail_obs: f64 = (cut..len).map(obs).sum();
    let tail_exp = n - cells.iter().map(|c| c.1).sum::<f64>();
    cells.push((tail_obs, tail_exp.max(0.0)));
    // merge small leading cells into their neighbour
    while cells.len() > 2 && cells[0].1 < min_expected {
        let first = cells.remove(0);
        cells[0].0 += first.0;
        cells[0].1 += first.1;
    }
    let statistic = cells
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else { 0.0 })
        .sum();
    let df = cells.len().saturating_sub(1).max(1);
    let p_value = 1.0 - ChiSquared::new(df as f64).expect("df > 0").cdf(statistic);
    ChiSquareFit {
        statistic,
        degrees_of_freedom: df,
        p_value,
    }
}
