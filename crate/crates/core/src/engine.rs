//! Slot loop: arrivals, degree sampling, placement, ingestion, peeling and
//! bookkeeping for one run.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::analytics::delay_bounds;
use crate::decoder::{DecoderStats, LossEvent, ReceiverMemory, TraceEvent};
use crate::error::{Error, Result};
use crate::model::{
    AccessMode, Instance, PacketId, PacketRecord, SchemeConfig, SlotIndex, SlotState, TimeConfig,
    TrafficConfig,
};
use crate::placement::{self, FrameGrid};
use crate::traffic::generate_arrivals;
use crate::rng_stream;

const ARRIVAL_STREAM: u64 = 0;
const PLACEMENT_STREAM: u64 = 1;

/// Everything one run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    /// Every packet generated, in arrival order; `packets[i].id == PacketId(i)`.
    pub packets: Vec<PacketRecord>,
    /// Arrival slots plus the drain phase.
    pub slots_simulated: u64,
    pub warmup_slots: u64,
    pub scheme: SchemeConfig,
    pub traffic: TrafficConfig,
    pub time: TimeConfig,
    pub rng_seed: u64,
    /// `occupancy[k]` = number of measurement-window slots that carried `k`
    /// transmitted instances.
    pub occupancy: Vec<u64>,
    #[serde(skip)]
    pub decoder_stats: DecoderStats,
}

impl RunResult {
    /// Measurement window `[warmup, total_slots)`.
    pub fn window(&self) -> std::ops::Range<SlotIndex> {
        self.warmup_slots..self.traffic.total_slots
    }

    pub fn window_slots(&self) -> u64 {
        self.traffic.total_slots - self.warmup_slots
    }

    pub fn in_window(&self, p: &PacketRecord) -> bool {
        self.window().contains(&p.arrival_slot)
    }

    pub fn measured(&self) -> impl Iterator<Item = &PacketRecord> {
        self.packets.iter().filter(move |p| self.in_window(p))
    }
}

/// Delivery delay in milliseconds, counted from the start of the slot the
/// packet became ready to the end of the slot it was decoded in, plus the
/// propagation delay. `None` for lost packets.
pub fn packet_delay(p: &PacketRecord, time: &TimeConfig) -> Option<f64> {
    p.decode_slot.map(|d| {
        time.propagation_delay_ms + (d - p.arrival_slot + 1) as f64 * time.slot_duration_ms
    })
}

pub fn run_simulation(
    scheme: &SchemeConfig,
    traffic: &TrafficConfig,
    time: &TimeConfig,
) -> Result<RunResult> {
    run_simulation_traced(scheme, traffic, time, |_| {})
}

/// [`run_simulation`], reporting every decode and loss to `trace` as it
/// happens.
pub fn run_simulation_traced<F: FnMut(&TraceEvent)>(
    scheme: &SchemeConfig,
    traffic: &TrafficConfig,
    time: &TimeConfig,
    mut trace: F,
) -> Result<RunResult> {
    scheme.validate()?;
    traffic.validate()?;
    time.validate()?;

    let arrivals = generate_arrivals(traffic, &mut rng_stream(traffic.rng_seed, ARRIVAL_STREAM))?;
    let mut rng = rng_stream(traffic.rng_seed, PLACEMENT_STREAM);

    let window = scheme.window_slots as u64;
    let total = traffic.total_slots;
    let (mut memory, end_slot, horizon) = match scheme.mode {
        AccessMode::Framed => {
            // the last arrival waits up to one frame, then needs a whole frame
            let grid = FrameGrid::new(scheme.window_slots);
            let end = grid.transmit_frame_start(total - 1) + window;
            (ReceiverMemory::framed(window as usize), end, 2 * window)
        }
        AccessMode::SlidingWindow => {
            let n_rx = scheme.receiver_memory_slots as u64;
            (ReceiverMemory::sliding(n_rx as usize), total + n_rx, window)
        }
    };
    let grid = FrameGrid::new(scheme.window_slots);

    let mut packets: Vec<PacketRecord> = Vec::with_capacity(
        (traffic.mean_arrival_rate * total as f64 * 1.01) as usize + 16,
    );
    // future[k] collects the instances to be sent in slot `s + k`
    let mut future: VecDeque<Vec<Instance>> = (0..=horizon).map(|_| Vec::new()).collect();
    let mut occupancy = vec![0u64; 1];

    let on_loss = |losses: Vec<LossEvent>, packets: &mut Vec<PacketRecord>, trace: &mut F| {
        for loss in losses {
            let p = &mut packets[loss.packet_id.0 as usize];
            debug_assert!(p.decode_slot.is_none());
            p.lost = true;
            trace(&TraceEvent::Lost(loss));
        }
    };

    for slot in 0..end_slot {
        if slot < total {
            for _ in 0..arrivals.per_slot_counts[slot as usize] {
                let id = PacketId(packets.len() as u64);
                let degree = scheme.degree_distribution.sample(&mut rng);
                let replicas = match scheme.mode {
                    AccessMode::Framed => placement::place_fr(slot, degree, &grid, &mut rng)?,
                    AccessMode::SlidingWindow => {
                        placement::place_sw(slot, degree, scheme.window_slots, &mut rng)?
                    }
                };
                let pointers: Arc<[SlotIndex]> = Arc::from(replicas.as_slice());
                for &r in replicas.iter() {
                    future[(r - slot) as usize].push(Instance::new(id, pointers.clone()));
                }
                packets.push(PacketRecord {
                    id,
                    arrival_slot: slot,
                    degree,
                    replica_slots: replicas,
                    decode_slot: None,
                    lost: false,
                });
            }
        }

        let instances = future.pop_front().unwrap_or_default();
        future.push_back(Vec::new());
        if (traffic.warmup_slots..total).contains(&slot) {
            let k = instances.len();
            if occupancy.len() <= k {
                occupancy.resize(k + 1, 0);
            }
            occupancy[k] += 1;
        }

        let losses = memory.ingest_slot(SlotState::new(slot, instances))?;
        on_loss(losses, &mut packets, &mut trace);

        for event in memory.peel(scheme.max_ic_iterations) {
            let p = &mut packets[event.packet_id.0 as usize];
            debug_assert!(!p.lost && p.decode_slot.is_none());
            p.decode_slot = Some(event.decode_slot);
            trace(&TraceEvent::Decoded(event));
        }

        if scheme.mode == AccessMode::Framed && grid.is_frame_end(slot) {
            let losses = memory.frame_reset()?;
            on_loss(losses, &mut packets, &mut trace);
        }
    }
    let losses = memory.finish();
    on_loss(losses, &mut packets, &mut trace);

    let result = RunResult {
        packets,
        slots_simulated: end_slot,
        warmup_slots: traffic.warmup_slots,
        scheme: scheme.clone(),
        traffic: traffic.clone(),
        time: *time,
        rng_seed: traffic.rng_seed,
        occupancy,
        decoder_stats: memory.stats(),
    };
    check_postconditions(&result)?;
    Ok(result)
}

/// Every packet is decoded xor lost, and every decoded packet's delay lies
/// in the scheme's delay support.
fn check_postconditions(r: &RunResult) -> Result<()> {
    let bounds = delay_bounds(&r.scheme, &r.time);
    for p in &r.packets {
        if p.lost == p.decode_slot.is_some() {
            return Err(Error::Unfinalized(p.id));
        }
        if let Some(delay_ms) = packet_delay(p, &r.time) {
            if !bounds.contains(delay_ms) {
                return Err(Error::DelayBound {
                    packet: p.id,
                    delay_ms,
                    min_ms: bounds.min_ms,
                    max_ms: bounds.max_ms,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DegreeDistribution;

    fn sw(n: u32, n_rx: u32) -> SchemeConfig {
        SchemeConfig::sliding(n, n_rx, DegreeDistribution::regular(2).unwrap())
    }

    #[test]
    fn silent_channel() {
        let r = run_simulation(&sw(100, 200), &TrafficConfig::new(0.0, 5000, 1000, 1), &TimeConfig::default())
            .unwrap();
        assert!(r.packets.is_empty());
        assert_eq!(r.occupancy, vec![4000]);
        assert_eq!(r.slots_simulated, 5200);
    }

    #[test]
    fn every_packet_finalized_with_bounded_delay() {
        for scheme in [sw(50, 150), SchemeConfig::framed(50, DegreeDistribution::irsa4())] {
            let r = run_simulation(&scheme, &TrafficConfig::new(0.7, 20_000, 500, 3), &TimeConfig::default())
                .unwrap();
            assert!(!r.packets.is_empty());
            assert!(r.packets.iter().all(|p| p.lost ^ p.decode_slot.is_some()));
            assert!(r
                .packets
                .iter()
                .all(|p| p.decode_slot.map_or(true, |d| d >= p.first_replica())));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let scheme = SchemeConfig::sliding(40, 120, DegreeDistribution::irsa8());
        let traffic = TrafficConfig::new(0.6, 10_000, 400, 77);
        let a = run_simulation(&scheme, &traffic, &TimeConfig::default()).unwrap();
        let b = run_simulation(&scheme, &traffic, &TimeConfig::default()).unwrap();
        assert_eq!(a.packets, b.packets);
        assert_eq!(a.occupancy, b.occupancy);
    }

    #[test]
    fn framed_drain_covers_last_arrivals() {
        // the last arrival may wait a full frame before it transmits
        let scheme = SchemeConfig::framed(10, DegreeDistribution::regular(2).unwrap());
        let r = run_simulation(&scheme, &TrafficConfig::new(0.3, 100, 0, 5), &TimeConfig::default())
            .unwrap();
        assert_eq!(r.slots_simulated, 110);
        let r = run_simulation(&scheme, &TrafficConfig::new(0.3, 95, 0, 5), &TimeConfig::default())
            .unwrap();
        assert_eq!(r.slots_simulated, 110);
    }

    #[test]
    fn delay_formula() {
        let t = TimeConfig::default();
        let mut p = PacketRecord {
            id: PacketId(0),
            arrival_slot: 10,
            degree: 2,
            replica_slots: vec![10, 20],
            decode_slot: Some(10),
            lost: false,
        };
        assert_eq!(packet_delay(&p, &t), Some(251.0));
        p.decode_slot = Some(20);
        assert_eq!(packet_delay(&p, &t), Some(261.0));
        p.decode_slot = None;
        p.lost = true;
        assert_eq!(packet_delay(&p, &t), None);
    }

    #[test]
    fn traced_events_match_records() {
        let scheme = sw(30, 60);
        let traffic = TrafficConfig::new(0.8, 3000, 0, 8);
        let mut events = Vec::new();
        let r = run_simulation_traced(&scheme, &traffic, &TimeConfig::default(), |e| events.push(*e))
            .unwrap();
        assert_eq!(events.len(), r.packets.len());
        for e in events {
            let p = &r.packets[e.packet_id().0 as usize];
            match e {
                TraceEvent::Decoded(d) => assert_eq!(p.decode_slot, Some(d.decode_slot)),
                TraceEvent::Lost(_) => assert!(p.lost),
            }
        }
    }
}
