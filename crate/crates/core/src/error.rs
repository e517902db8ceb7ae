use crate::model::{PacketId, SlotIndex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid degree distribution: {0}")]
    Distribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degree {degree} exceeds window of {window} slots")]
    DegreeExceedsWindow { degree: u32, window: u32 },

    #[error("slot {got} ingested out of order, expected {expected}")]
    OutOfOrder { expected: SlotIndex, got: SlotIndex },

    #[error("packet {packet} appears twice in slot {slot}")]
    DuplicateInstance { packet: PacketId, slot: SlotIndex },

    #[error("instance of packet {packet} in slot {slot} does not point at that slot")]
    BadPointer { packet: PacketId, slot: SlotIndex },

    #[error("frame memory of {capacity} slots overflowed; frame_reset was not called")]
    FrameOverflow { capacity: usize },

    #[error("frame_reset is only defined for framed receiver memory")]
    NotFramed,

    #[error("packet {packet} decoded with delay {delay_ms} ms outside [{min_ms}, {max_ms}]")]
    DelayBound {
        packet: PacketId,
        delay_ms: f64,
        min_ms: f64,
        max_ms: f64,
    },

    #[error("packet {0} was never finalized")]
    Unfinalized(PacketId),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("run lambda={lambda} seed={seed} failed: {source}")]
    SweepPoint {
        lambda: f64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
