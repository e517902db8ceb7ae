//! Replica placement for framed and sliding-window access.
//!
//! Framed access: a packet waits for the next frame and spreads its `l`
//! replicas uniformly without replacement over the `N_f` slots of that
//! frame. Sliding-window access: the first replica goes out in the slot the
//! packet becomes ready, the other `l - 1` are spread uniformly without
//! replacement over the following `N_sw - 1` slots.

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{AccessMode, SchemeConfig, SlotIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGrid {
    pub frame_length: u32,
    pub origin: SlotIndex,
}

impl FrameGrid {
    pub fn new(frame_length: u32) -> Self {
        assert!(frame_length > 0, "frame length must be positive");
        FrameGrid {
            frame_length,
            origin: 0,
        }
    }

    /// Index of the frame containing `slot`. Slots before the origin belong
    /// to no frame.
    pub fn frame_of(&self, slot: SlotIndex) -> Option<u64> {
        slot.checked_sub(self.origin)
            .map(|d| d / self.frame_length as u64)
    }

    pub fn frame_start(&self, frame: u64) -> SlotIndex {
        self.origin + frame * self.frame_length as u64
    }

    /// True if `slot` is the last slot of its frame.
    pub fn is_frame_end(&self, slot: SlotIndex) -> bool {
        slot >= self.origin && (slot - self.origin + 1) % self.frame_length as u64 == 0
    }

    /// Start of the frame a packet ready at `arrival_slot` transmits in: the
    /// first frame starting strictly after the arrival slot.
    pub fn transmit_frame_start(&self, arrival_slot: SlotIndex) -> SlotIndex {
        match self.frame_of(arrival_slot) {
            Some(frame) => self.frame_start(frame + 1),
            None => self.origin,
        }
    }
}

/// Places `degree` replicas in the frame following `arrival_slot`.
pub fn place_fr<R: Rng + ?Sized>(
    arrival_slot: SlotIndex,
    degree: u32,
    grid: &FrameGrid,
    rng: &mut R,
) -> Result<Vec<SlotIndex>> {
    check_degree(degree, grid.frame_length)?;
    let start = grid.transmit_frame_start(arrival_slot);
    let mut slots: Vec<SlotIndex> = index::sample(rng, grid.frame_length as usize, degree as usize)
        .into_iter()
        .map(|offset| start + offset as u64)
        .collect();
    slots.sort_unstable();
    Ok(slots)
}

/// Places `degree` replicas in the sliding window opened at `arrival_slot`.
pub fn place_sw<R: Rng + ?Sized>(
    arrival_slot: SlotIndex,
    degree: u32,
    window: u32,
    rng: &mut R,
) -> Result<Vec<SlotIndex>> {
    check_degree(degree, window)?;
    let mut slots = Vec::with_capacity(degree as usize);
    slots.push(arrival_slot);
    slots.extend(
        index::sample(rng, window as usize - 1, degree as usize - 1)
            .into_iter()
            .map(|offset| arrival_slot + 1 + offset as u64),
    );
    slots.sort_unstable();
    Ok(slots)
}

/// Dispatches on the scheme's access mode.
pub fn place<R: Rng + ?Sized>(
    scheme: &SchemeConfig,
    arrival_slot: SlotIndex,
    degree: u32,
    rng: &mut R,
) -> Result<Vec<SlotIndex>> {
    match scheme.mode {
        AccessMode::Framed => place_fr(arrival_slot, degree, &FrameGrid::new(scheme.window_slots), rng),
        AccessMode::SlidingWindow => place_sw(arrival_slot, degree, scheme.window_slots, rng),
    }
}

/// Number of slots two sliding windows of length `window` have in common
/// when their packets became ready `arrival_gap_slots` apart.
pub fn shared_window_slots(arrival_gap_slots: u64, window: u32) -> u64 {
    (window as u64).saturating_sub(arrival_gap_slots)
}

fn check_degree(degree: u32, window: u32) -> Result<()> {
    if degree == 0 || degree > window {
        return Err(Error::DegreeExceedsWindow { degree, window });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng_stream;

    #[test]
    fn fr_waits_for_next_frame() {
        let grid = FrameGrid::new(100);
        let mut rng = rng_stream(1, 0);
        for _ in 0..1000 {
            let slots = place_fr(5, 2, &grid, &mut rng).unwrap();
            assert_eq!(slots.len(), 2);
            assert!(slots[0] < slots[1]);
            assert!(slots.iter().all(|s| (100..200).contains(s)));
        }
    }

    #[test]
    fn fr_arrival_on_frame_start_takes_the_following_frame() {
        let grid = FrameGrid::new(100);
        let mut rng = rng_stream(1, 0);
        let slots = place_fr(100, 100, &grid, &mut rng).unwrap();
        assert_eq!(slots, (200..300).collect::<Vec<_>>());
        let slots = place_fr(99, 100, &grid, &mut rng).unwrap();
        assert_eq!(slots, (100..200).collect::<Vec<_>>());
    }

    #[test]
    fn fr_with_origin() {
        let grid = FrameGrid {
            frame_length: 10,
            origin: 3,
        };
        assert_eq!(grid.frame_of(2), None);
        assert_eq!(grid.frame_of(3), Some(0));
        assert_eq!(grid.frame_of(13), Some(1));
        assert_eq!(grid.transmit_frame_start(0), 3);
        assert_eq!(grid.transmit_frame_start(3), 13);
        assert_eq!(grid.transmit_frame_start(12), 13);
        assert!(grid.is_frame_end(12));
        assert!(!grid.is_frame_end(13));
    }

    #[test]
    fn sw_degree_one_and_saturated_window() {
        let mut rng = rng_stream(2, 0);
        assert_eq!(place_sw(7, 1, 100, &mut rng).unwrap(), vec![7]);
        assert_eq!(place_sw(7, 4, 4, &mut rng).unwrap(), vec![7, 8, 9, 10]);
    }

    #[test]
    fn sw_replicas_stay_in_window() {
        let mut rng = rng_stream(3, 0);
        for arrival in 0..500 {
            let slots = place_sw(arrival, 8, 20, &mut rng).unwrap();
            assert_eq!(slots[0], arrival);
            assert!(*slots.last().unwrap() <= arrival + 19);
            assert!(slots.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn degree_larger_than_window_rejected() {
        let mut rng = rng_stream(4, 0);
        assert!(place_sw(0, 5, 4, &mut rng).is_err());
        assert!(place_fr(0, 101, &FrameGrid::new(100), &mut rng).is_err());
        assert!(place_sw(0, 0, 4, &mut rng).is_err());
    }

    #[test]
    fn shared_slots() {
        assert_eq!(shared_window_slots(0, 100), 100);
        assert_eq!(shared_window_slots(100, 100), 0);
        assert_eq!(shared_window_slots(250, 100), 0);
        // count the overlap of [0, 99] and [37, 136] directly
        let overlap = (0u64..100).filter(|s| (37..137).contains(s)).count() as u64;
        assert_eq!(shared_window_slots(37, 100), overlap);
        assert_eq!(overlap, 63);
    }

    #[test]
    fn fr_per_slot_frequency_is_l_over_nf() {
        let grid = FrameGrid::new(100);
        let mut rng = rng_stream(5, 0);
        let n = 1_000_000;
        let mut hits = vec![0u64; 100];
        for _ in 0..n {
            for s in place_fr(0, 2, &grid, &mut rng).unwrap() {
                hits[(s - 100) as usize] += 1;
            }
        }
        let p = 0.02;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        // 4 sigma so that the max over 100 slots stays comfortably inside
        for (slot, &h) in hits.iter().enumerate() {
            let f = h as f64 / n as f64;
            assert!((f - p).abs() <= 4.0 * sigma, "slot {slot}: {f}");
        }
    }

    #[test]
    fn sw_offsets_are_uniform() {
        let mut rng = rng_stream(6, 0);
        let n = 1_000_000;
        let mut hits = vec![0u64; 100];
        for _ in 0..n {
            let slots = place_sw(0, 2, 100, &mut rng).unwrap();
            hits[slots[1] as usize] += 1;
        }
        assert_eq!(hits[0], 0);
        let p = 1.0 / 99.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        for (offset, &h) in hits.iter().enumerate().skip(1) {
            let f = h as f64 / n as f64;
            assert!((f - p).abs() <= 4.0 * sigma, "offset {offset}: {f}");
        }
    }
}
