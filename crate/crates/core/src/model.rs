//! Shared vocabulary: time, slots, packets, degree distributions and the
//! scheme/traffic configuration of a run.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slots live on an unbounded timeline starting at 0.
pub type SlotIndex = u64;

/// Normalisation tolerance for degree distributions.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_MAX_IC_ITERATIONS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PacketId(pub u64);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub slot_duration_ms: f64,
    pub propagation_delay_ms: f64,
}

impl Default for TimeConfig {
    /// 1 ms slots over a GEO bent-pipe hop of 250 ms.
    fn default() -> Self {
        TimeConfig {
            slot_duration_ms: 1.0,
            propagation_delay_ms: 250.0,
        }
    }
}

impl TimeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.slot_duration_ms > 0.0) || !self.slot_duration_ms.is_finite() {
            return Err(Error::Config(format!(
                "slot duration must be positive, got {}",
                self.slot_duration_ms
            )));
        }
        if !(self.propagation_delay_ms >= 0.0) || !self.propagation_delay_ms.is_finite() {
            return Err(Error::Config(format!(
                "propagation delay must be non-negative, got {}",
                self.propagation_delay_ms
            )));
        }
        Ok(())
    }
}

/// Probability mass over replica counts, i.e. the node-perspective
/// polynomial `Λ(x) = Σ Λ_l x^l`.
///
/// Entries are kept sorted by degree, together with a cumulative table used
/// for inverse-CDF sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u32, f64)>", into = "Vec<(u32, f64)>")]
pub struct DegreeDistribution {
    entries: Vec<(u32, f64)>,
    cumulative: Vec<f64>,
}

impl DegreeDistribution {
    /// Validates and builds a distribution from `(degree, probability)` pairs.
    pub fn new(entries: impl Into<Vec<(u32, f64)>>) -> Result<Self> {
        let mut entries = entries.into();
        if entries.is_empty() {
            return Err(Error::Distribution("no entries".into()));
        }
        for &(degree, p) in &entries {
            if degree == 0 {
                return Err(Error::Distribution("degree 0 is not allowed".into()));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Distribution(format!(
                    "probability {p} for degree {degree} is outside [0, 1]"
                )));
            }
        }
        entries.sort_by_key(|&(degree, _)| degree);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Distribution(format!("duplicate degree {}", w[0].0)));
        }
        let sum: f64 = entries.iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::Distribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = entries
            .iter()
            .map(|&(_, p)| {
                acc += p;
                acc
            })
            .collect();
        Ok(DegreeDistribution {
            entries,
            cumulative,
        })
    }

    /// Every packet sends exactly `degree` replicas (CRDSA with `degree`
    /// instances; `regular(1)` is plain slotted ALOHA).
    pub fn regular(degree: u32) -> Result<Self> {
        Self::new(vec![(degree, 1.0)])
    }

    /// `0.5102 x^2 + 0.4898 x^4`, the optimised IRSA profile for at most
    /// four replicas.
    pub fn irsa4() -> Self {
        Self::new(vec![(2, 0.5102), (4, 0.4898)]).expect("irsa4 is normalised")
    }

    /// `0.5 x^2 + 0.28 x^3 + 0.22 x^8`, the optimised IRSA profile for at
    /// most eight replicas.
    pub fn irsa8() -> Self {
        Self::new(vec![(2, 0.5), (3, 0.28), (8, 0.22)]).expect("irsa8 is normalised")
    }

    /// Resolves `crdsa<l>`, `irsa4`, `irsa8` or an inline list such as
    /// `2:0.5,3:0.28,8:0.22`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "irsa4" => return Ok(Self::irsa4()),
            "irsa8" => return Ok(Self::irsa8()),
            "sa" => return Self::regular(1),
            _ => {}
        }
        if let Some(l) = name.strip_prefix("crdsa") {
            let degree = l
                .parse::<u32>()
                .map_err(|_| Error::Distribution(format!("unknown distribution `{name}`")))?;
            return Self::regular(degree);
        }
        if name.contains(':') {
            let entries = name
                .split(',')
                .map(|term| {
                    let (l, p) = term.split_once(':').ok_or_else(|| {
                        Error::Distribution(format!("term `{term}` is not degree:probability"))
                    })?;
                    let l = l.trim().parse::<u32>().map_err(|_| {
                        Error::Distribution(format!("bad degree in term `{term}`"))
                    })?;
                    let p = p.trim().parse::<f64>().map_err(|_| {
                        Error::Distribution(format!("bad probability in term `{term}`"))
                    })?;
                    Ok((l, p))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::new(entries);
        }
        Err(Error::Distribution(format!("unknown distribution `{name}`")))
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    /// `Λ'(1) = Σ l·Λ_l`, the mean number of replicas per packet.
    pub fn mean_degree(&self) -> f64 {
        self.entries.iter().map(|&(l, p)| l as f64 * p).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.entries.last().map(|&(l, _)| l).unwrap_or(0)
    }

    pub fn probability(&self, degree: u32) -> f64 {
        self.entries
            .iter()
            .find(|&&(l, _)| l == degree)
            .map_or(0.0, |&(_, p)| p)
    }

    /// Draws a degree by inverting the cumulative table.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.entries.len() == 1 {
            return self.entries[0].0;
        }
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        // u can exceed the last cumulative value by rounding
        self.entries[idx.min(self.entries.len() - 1)].0
    }
}

impl TryFrom<Vec<(u32, f64)>> for DegreeDistribution {
    type Error = Error;

    fn try_from(entries: Vec<(u32, f64)>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<DegreeDistribution> for Vec<(u32, f64)> {
    fn from(d: DegreeDistribution) -> Self {
        d.entries
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, p)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{p}x^{l}")?;
        }
        Ok(())
    }
}

/// Framed access (FR) or sliding-window access (SW).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessMode {
    #[serde(rename = "FR")]
    Framed,
    #[serde(rename = "SW")]
    SlidingWindow,
}

impl fmt::Display for AccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessMode::Framed => "FR",
            AccessMode::SlidingWindow => "SW",
        })
    }
}

impl FromStr for AccessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FR" => Ok(AccessMode::Framed),
            "SW" => Ok(AccessMode::SlidingWindow),
            other => Err(Error::Config(format!("unknown mode `{other}`, expected FR or SW"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub mode: AccessMode,
    /// Frame length for FR, sliding window length for SW.
    pub window_slots: u32,
    /// Receiver memory. Always equal to the frame length for FR.
    pub receiver_memory_slots: u32,
    pub max_ic_iterations: u32,
    pub degree_distribution: DegreeDistribution,
}

impl SchemeConfig {
    pub fn framed(frame_slots: u32, degree_distribution: DegreeDistribution) -> Self {
        SchemeConfig {
            mode: AccessMode::Framed,
            window_slots: frame_slots,
            receiver_memory_slots: frame_slots,
            max_ic_iterations: DEFAULT_MAX_IC_ITERATIONS,
            degree_distribution,
        }
    }

    pub fn sliding(
        window_slots: u32,
        receiver_memory_slots: u32,
        degree_distribution: DegreeDistribution,
    ) -> Self {
        SchemeConfig {
            mode: AccessMode::SlidingWindow,
            window_slots,
            receiver_memory_slots,
            max_ic_iterations: DEFAULT_MAX_IC_ITERATIONS,
            degree_distribution,
        }
    }

    pub fn with_max_ic_iterations(mut self, iterations: u32) -> Self {
        self.max_ic_iterations = iterations;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_slots == 0 {
            return Err(Error::Config("window must be at least one slot".into()));
        }
        if self.max_ic_iterations == 0 {
            return Err(Error::Config("max IC iterations must be positive".into()));
        }
        let max_degree = self.degree_distribution.max_degree();
        if max_degree > self.window_slots {
            return Err(Error::DegreeExceedsWindow {
                degree: max_degree,
                window: self.window_slots,
            });
        }
        match self.mode {
            AccessMode::Framed if self.receiver_memory_slots != self.window_slots => {
                Err(Error::Config(format!(
                    "framed receiver memory must equal the frame length ({} != {})",
                    self.receiver_memory_slots, self.window_slots
                )))
            }
            AccessMode::SlidingWindow if self.receiver_memory_slots < self.window_slots => {
                Err(Error::Config(format!(
                    "receiver memory ({}) is shorter than the sliding window ({})",
                    self.receiver_memory_slots, self.window_slots
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficConfig {
    /// Mean Poisson arrivals per slot. Under this arrival model it is also
    /// the normalised channel load G.
    pub mean_arrival_rate: f64,
    pub total_slots: u64,
    pub warmup_slots: u64,
    pub rng_seed: u64,
}

impl TrafficConfig {
    pub fn new(mean_arrival_rate: f64, total_slots: u64, warmup_slots: u64, rng_seed: u64) -> Self {
        TrafficConfig {
            mean_arrival_rate,
            total_slots,
            warmup_slots,
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_arrival_rate >= 0.0) || !self.mean_arrival_rate.is_finite() {
            return Err(Error::Config(format!(
                "mean arrival rate must be finite and non-negative, got {}",
                self.mean_arrival_rate
            )));
        }
        if self.total_slots == 0 {
            return Err(Error::Config("total_slots must be positive".into()));
        }
        if self.warmup_slots >= self.total_slots {
            return Err(Error::Config(format!(
                "warmup ({}) must be shorter than total_slots ({})",
                self.warmup_slots, self.total_slots
            )));
        }
        Ok(())
    }
}

/// One MAC packet and its fate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub id: PacketId,
    /// Slot at whose start the packet became ready.
    pub arrival_slot: SlotIndex,
    pub degree: u32,
    /// Sorted, distinct.
    pub replica_slots: Vec<SlotIndex>,
    /// Slot at whose end the packet was resolved.
    pub decode_slot: Option<SlotIndex>,
    pub lost: bool,
}

impl PacketRecord {
    pub fn is_decoded(&self) -> bool {
        self.decode_slot.is_some()
    }

    pub fn first_replica(&self) -> SlotIndex {
        self.replica_slots[0]
    }
}

/// A replica as seen by the receiver: the owning packet plus the pointers to
/// every replica of that packet (perfect signalling).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub packet: PacketId,
    pub replicas: Arc<[SlotIndex]>,
}

impl Instance {
    pub fn new(packet: PacketId, replicas: Arc<[SlotIndex]>) -> Self {
        Instance { packet, replicas }
    }
}

/// The instances transmitted in one slot.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SlotState {
    pub slot_index: SlotIndex,
    pub instances: Vec<Instance>,
}

impl SlotState {
    pub fn new(slot_index: SlotIndex, instances: Vec<Instance>) -> Self {
        SlotState {
            slot_index,
            instances,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.instances.is_empty()
    }
}
