//! Poisson packet arrivals, one independent draw per slot.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::Result;
use crate::model::TrafficConfig;

/// Number of packets becoming ready at the start of each slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalSchedule {
    pub per_slot_counts: Vec<u32>,
}

impl ArrivalSchedule {
    pub fn len(&self) -> usize {
        self.per_slot_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_slot_counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.per_slot_counts.iter().map(|&c| c as u64).sum()
    }

    /// Sums of consecutive, non-overlapping groups of `width` slots (a
    /// trailing partial group is dropped).
    pub fn window_totals(&self, width: usize) -> Vec<u64> {
        self.per_slot_counts
            .chunks_exact(width)
            .map(|c| c.iter().map(|&x| x as u64).sum())
            .collect()
    }
}

/// Draws `cfg.total_slots` independent Poisson(λ̄) counts from `rng`.
pub fn generate_arrivals<R: Rng + ?Sized>(cfg: &TrafficConfig, rng: &mut R) -> Result<ArrivalSchedule> {
    cfg.validate()?;
    let n = cfg.total_slots as usize;
    if cfg.mean_arrival_rate == 0.0 {
        return Ok(ArrivalSchedule {
            per_slot_counts: vec![0; n],
        });
    }
    let poisson = Poisson::new(cfg.mean_arrival_rate)
        .map_err(|e| crate::Error::Config(format!("poisson rate: {e}")))?;
    let per_slot_counts = (0..n).map(|_| poisson.sample(rng) as u32).collect();
    Ok(ArrivalSchedule { per_slot_counts })
}
