//! Receiver: a bounded memory of recent slots and the iterative
//! interference cancellation (peeling) process run at the end of each slot.
//!
//! A slot holding exactly one undecoded instance is clean; its packet is
//! decoded and, thanks to the replica pointers, every other replica of that
//! packet still in memory is cancelled. Cancellation can leave further slots
//! clean, and the process repeats until no clean slot remains or the
//! iteration cap is hit.
//!
//! Memory comes in two flavours:
//!
//! * sliding: the most recent `N_rx` slots, evicted strictly FIFO. A packet
//!   must be delivered while its first replica is still held; once that slot
//!   is evicted the packet is reported lost. Its remaining replicas stay in
//!   memory and may still be resolved for cancellation purposes, which never
//!   turns the loss into a delivery.
//! * framed: the slots of the current frame, cleared by
//!   [`ReceiverMemory::frame_reset`] when the frame closes.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Instance, PacketId, SlotIndex, SlotState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeCause {
    /// The packet's slot was a singleton without any cancellation.
    Clean,
    /// The slot became a singleton after other replicas were cancelled.
    Ic,
}

impl fmt::Display for DecodeCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeCause::Clean => "clean",
            DecodeCause::Ic => "ic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEvent {
    pub packet_id: PacketId,
    /// Slot at whose end the resolving peel ran.
    pub decode_slot: SlotIndex,
    pub cause: DecodeCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossCause {
    /// First replica evicted from sliding memory before delivery.
    Expired,
    /// Frame closed with the packet unresolved.
    FrameEnd,
    /// Still unresolved when the receiver was shut down.
    Drain,
}

impl fmt::Display for LossCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossCause::Expired => "expired",
            LossCause::FrameEnd => "frame_end",
            LossCause::Drain => "drain",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LossEvent {
    pub packet_id: PacketId,
    pub slot: SlotIndex,
    pub cause: LossCause,
}

/// Scan direction of one peeling iteration. The decoded set and the decode
/// slots do not depend on it; it exists for testing that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    #[default]
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryKind {
    Sliding,
    Framed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecoderStats {
    /// Peel invocations that stopped on the iteration cap with clean slots left.
    pub cap_hits: u64,
    /// Largest number of iterations used by a single peel.
    pub max_iterations: u32,
    /// Packets resolved after their delivery deadline had passed.
    pub late_resolutions: u64,
}

#[derive(Debug)]
struct LiveSlot {
    index: SlotIndex,
    instances: Vec<PacketId>,
    // some interference was removed from this slot
    cancelled: bool,
}

#[derive(Debug)]
struct PendingPacket {
    first_slot: SlotIndex,
    last_slot: SlotIndex,
    live: Vec<SlotIndex>,
    expired: bool,
}

#[derive(Debug)]
pub struct ReceiverMemory {
    kind: MemoryKind,
    capacity: usize,
    slots: VecDeque<LiveSlot>,
    next_slot: Option<SlotIndex>,
    pending: HashMap<PacketId, PendingPacket>,
    // decoded packets whose later replicas have not been received yet,
    // mapped to their last replica slot
    resolved_ahead: HashMap<PacketId, SlotIndex>,
    singletons: BTreeSet<SlotIndex>,
    stats: DecoderStats,
}

impl ReceiverMemory {
    /// Sliding memory of the `capacity` most recent slots.
    pub fn sliding(capacity: usize) -> Self {
        Self::with_kind(MemoryKind::Sliding, capacity)
    }

    /// Frame-scoped memory for frames of `frame_length` slots.
    pub fn framed(frame_length: usize) -> Self {
        Self::with_kind(MemoryKind::Framed, frame_length)
    }

    fn with_kind(kind: MemoryKind, capacity: usize) -> Self {
        assert!(capacity > 0, "receiver memory needs at least one slot");
        ReceiverMemory {
            kind,
            capacity,
            slots: VecDeque::with_capacity(capacity),
            next_slot: None,
            pending: HashMap::new(),
            resolved_ahead: HashMap::new(),
            singletons: BTreeSet::new(),
            stats: DecoderStats::default(),
        }
    }

    pub fn kind(&self) -> MemoryKind {
        self.kind
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn stats(&self) -> DecoderStats {
        self.stats
    }

    /// Most recently ingested slot.
    pub fn current_slot(&self) -> Option<SlotIndex> {
        self.next_slot.map(|s| s - 1)
    }

    /// Indices of the slots currently held, oldest first.
    pub fn window(&self) -> Vec<SlotIndex> {
        self.slots.iter().map(|s| s.index).collect()
    }

    /// Undecoded instances currently held in `slot`, or `None` if the slot
    /// is not in memory.
    pub fn instances_in(&self, slot: SlotIndex) -> Option<&[PacketId]> {
        self.position(slot).map(|p| self.slots[p].instances.as_slice())
    }

    /// Packets with at least one replica in memory that are still unresolved.
    pub fn unresolved(&self) -> Vec<PacketId> {
        let mut ids: Vec<_> = self
            .pending
            .iter()
            .filter(|(_, p)| !p.live.is_empty())
            .map(|(&id, _)| id)
            .collect();
        ids.sort_unstable();
        ids
    }

    fn position(&self, slot: SlotIndex) -> Option<usize> {
        let base = self.slots.front()?.index;
        let pos = slot.checked_sub(base)? as usize;
        (pos < self.slots.len()).then_some(pos)
    }

    /// Appends the next slot. In sliding memory the oldest slot is evicted
    /// when full; packets whose first replica leaves memory unresolved are
    /// returned as losses.
    pub fn ingest_slot(&mut self, slot: SlotState) -> Result<Vec<LossEvent>> {
        let index = slot.slot_index;
        if let Some(expected) = self.next_slot {
            if index != expected {
                return Err(Error::OutOfOrder { expected, got: index });
            }
        }
        for (i, inst) in slot.instances.iter().enumerate() {
            if slot.instances[..i].iter().any(|o| o.packet == inst.packet) {
                return Err(Error::DuplicateInstance {
                    packet: inst.packet,
                    slot: index,
                });
            }
            if !inst.replicas.contains(&index) {
                return Err(Error::BadPointer {
                    packet: inst.packet,
                    slot: index,
                });
            }
        }

        let mut losses = Vec::new();
        if self.slots.len() == self.capacity {
            match self.kind {
                MemoryKind::Framed => {
                    return Err(Error::FrameOverflow {
                        capacity: self.capacity,
                    })
                }
                MemoryKind::Sliding => self.evict_oldest(index, &mut losses),
            }
        }

        let mut live = LiveSlot {
            index,
            instances: Vec::with_capacity(slot.instances.len()),
            cancelled: false,
        };
        let base = self.slots.front().map_or(index, |s| s.index);
        for inst in slot.instances {
            if let Some(&last) = self.resolved_ahead.get(&inst.packet) {
                live.cancelled = true;
                if last == index {
                    self.resolved_ahead.remove(&inst.packet);
                }
                continue;
            }
            let entry = self.pending.entry(inst.packet).or_insert_with(|| {
                let first_slot = inst.replicas[0];
                PendingPacket {
                    first_slot,
                    last_slot: *inst.replicas.last().unwrap(),
                    live: Vec::with_capacity(inst.replicas.len()),
                    // joined after its first replica already left memory
                    expired: first_slot < base,
                }
            });
            entry.live.push(index);
            live.instances.push(inst.packet);
        }
        if live.instances.len() == 1 {
            self.singletons.insert(index);
        }
        self.slots.push_back(live);
        self.next_slot = Some(index + 1);
        Ok(losses)
    }

    fn evict_oldest(&mut self, now: SlotIndex, losses: &mut Vec<LossEvent>) {
        let Some(old) = self.slots.pop_front() else {
            return;
        };
        self.singletons.remove(&old.index);
        for id in old.instances {
            let Some(p) = self.pending.get_mut(&id) else {
                continue;
            };
            p.live.retain(|&s| s != old.index);
            if p.first_slot == old.index && !p.expired {
                p.expired = true;
                losses.push(LossEvent {
                    packet_id: id,
                    slot: now,
                    cause: LossCause::Expired,
                });
            }
            if p.live.is_empty() && p.last_slot < now {
                self.pending.remove(&id);
            }
        }
    }

    /// Runs interference cancellation to a fixpoint or until `max_iterations`
    /// full scans of memory. Events come back in resolution order.
    pub fn peel(&mut self, max_iterations: u32) -> Vec<DecodeEvent> {
        self.peel_ordered(max_iterations, ScanOrder::Increasing)
    }

    /// [`peel`](Self::peel) with an explicit scan direction.
    ///
    /// One iteration visits every live slot in order and resolves each clean
    /// slot on the spot, so cancellations affect the remainder of the same
    /// scan. Only clean slots are visited here; skipping the others does not
    /// change the outcome of a scan.
    pub fn peel_ordered(&mut self, max_iterations: u32, order: ScanOrder) -> Vec<DecodeEvent> {
        let mut events = Vec::new();
        let Some(now) = self.current_slot() else {
            return events;
        };
        let mut iterations = 0u32;
        let mut cursor: Option<SlotIndex> = None;
        loop {
            let next = match (order, cursor) {
                (ScanOrder::Increasing, None) => self.singletons.first().copied(),
                (ScanOrder::Increasing, Some(c)) => self.singletons.range(c + 1..).next().copied(),
                (ScanOrder::Decreasing, None) => self.singletons.last().copied(),
                (ScanOrder::Decreasing, Some(c)) => self.singletons.range(..c).next_back().copied(),
            };
            match next {
                Some(slot) => {
                    self.resolve(slot, now, &mut events);
                    cursor = Some(slot);
                }
                None => {
                    iterations += 1;
                    if self.singletons.is_empty() {
                        break;
                    }
                    if iterations >= max_iterations {
                        self.stats.cap_hits += 1;
                        break;
                    }
                    cursor = None;
                }
            }
        }
        self.stats.max_iterations = self.stats.max_iterations.max(iterations);
        events
    }

    fn resolve(&mut self, slot: SlotIndex, now: SlotIndex, events: &mut Vec<DecodeEvent>) {
        let pos = self.position(slot).expect("singleton slot is live");
        debug_assert_eq!(self.slots[pos].instances.len(), 1);
        let id = self.slots[pos].instances[0];
        let cause = if self.slots[pos].cancelled {
            DecodeCause::Ic
        } else {
            DecodeCause::Clean
        };
        let packet = self.pending.remove(&id).expect("live instance has a pending entry");
        for s in &packet.live {
            let p = self.position(*s).expect("pending replica is live");
            let live = &mut self.slots[p];
            if let Some(i) = live.instances.iter().position(|&x| x == id) {
                live.instances.swap_remove(i);
            }
            if *s != slot {
                live.cancelled = true;
            }
            match live.instances.len() {
                1 => {
                    self.singletons.insert(*s);
                }
                _ => {
                    self.singletons.remove(s);
                }
            }
        }
        if packet.last_slot > now {
            self.resolved_ahead.insert(id, packet.last_slot);
        }
        if packet.expired {
            self.stats.late_resolutions += 1;
        } else {
            events.push(DecodeEvent {
                packet_id: id,
                decode_slot: now,
                cause,
            });
        }
    }

    /// Closes the current frame: every unresolved packet is lost and memory
    /// is cleared. Only valid for framed memory.
    pub fn frame_reset(&mut self) -> Result<Vec<LossEvent>> {
        if self.kind != MemoryKind::Framed {
            return Err(Error::NotFramed);
        }
        Ok(self.clear(LossCause::FrameEnd))
    }

    /// Reports every packet still unresolved as lost and clears memory.
    pub fn finish(&mut self) -> Vec<LossEvent> {
        self.clear(LossCause::Drain)
    }

    fn clear(&mut self, cause: LossCause) -> Vec<LossEvent> {
        let slot = self.current_slot().unwrap_or(0);
        let mut losses: Vec<LossEvent> = self
            .pending
            .drain()
            .filter(|(_, p)| !p.expired)
            .map(|(packet_id, _)| LossEvent {
                packet_id,
                slot,
                cause,
            })
            .collect();
        losses.sort_unstable_by_key(|l| l.packet_id);
        self.slots.clear();
        self.singletons.clear();
        self.resolved_ahead.clear();
        losses
    }
}

/// Streams a fixed placement set through a sliding receiver of `capacity`
/// slots, slot by slot from the earliest to the latest replica, peeling at
/// the end of each slot. Packet ids are indices into `placements`, each of
/// which must be sorted and duplicate-free.
pub fn decode_placements(
    placements: &[Vec<SlotIndex>],
    capacity: usize,
    max_iterations: u32,
) -> Result<Vec<DecodeEvent>> {
    let Some(first) = placements.iter().filter_map(|p| p.first()).min().copied() else {
        return Ok(Vec::new());
    };
    let last = placements.iter().filter_map(|p| p.last()).max().copied().unwrap_or(first);
    let mut by_slot: BTreeMap<SlotIndex, Vec<Instance>> = BTreeMap::new();
    for (i, slots) in placements.iter().enumerate() {
        let pointers: Arc<[SlotIndex]> = Arc::from(slots.as_slice());
        for &s in slots {
            by_slot
                .entry(s)
                .or_default()
                .push(Instance::new(PacketId(i as u64), pointers.clone()));
        }
    }
    let mut mem = ReceiverMemory::sliding(capacity);
    let mut events = Vec::new();
    for s in first..=last {
        mem.ingest_slot(SlotState::new(s, by_slot.remove(&s).unwrap_or_default()))?;
        events.extend(mem.peel(max_iterations));
    }
    Ok(events)
}

/// One line of the optional decoder trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Decoded(DecodeEvent),
    Lost(LossEvent),
}

impl TraceEvent {
    pub const CSV_HEADER: &'static str = "slot_index,packet_id,event,cause";

    pub fn packet_id(&self) -> PacketId {
        match self {
            TraceEvent::Decoded(e) => e.packet_id,
            TraceEvent::Lost(e) => e.packet_id,
        }
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        match self {
            TraceEvent::Decoded(e) => {
                writeln!(w, "{},{},decoded,{}", e.decode_slot, e.packet_id, e.cause)
            }
            TraceEvent::Lost(e) => writeln!(w, "{},{},lost,{}", e.slot, e.packet_id, e.cause),
        }
    }

    /// Parses one line written by [`write_csv`](Self::write_csv).
    pub fn parse_csv(line: &str) -> Option<TraceEvent> {
        let mut f = line.trim().split(',');
        let slot = f.next()?.parse().ok()?;
        let packet_id = PacketId(f.next()?.parse().ok()?);
        let event = f.next()?;
        let cause = f.next()?;
        match event {
            "decoded" => Some(TraceEvent::Decoded(DecodeEvent {
                packet_id,
                decode_slot: slot,
                cause: match cause {
                    "clean" => DecodeCause::Clean,
                    "ic" => DecodeCause::Ic,
                    _ => return None,
                },
            })),
            "lost" => Some(TraceEvent::Lost(LossEvent {
                packet_id,
                slot,
                cause: match cause {
                    "expired" => LossCause::Expired,
                    "frame_end" => LossCause::FrameEnd,
                    "drain" => LossCause::Drain,
                    _ => return None,
                },
            })),
            _ => None,
        }
    }
}
