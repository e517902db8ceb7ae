//! Four packets whose replicas all collide except one; cancelling that one
//! frees the rest in a cascade.
//!
//!     cargo run --example waterfall_decoding

use std::sync::Arc;

use swcrdsa::decoder::DecodeCause;
use swcrdsa::{Instance, PacketId, ReceiverMemory, SlotIndex, SlotState};

fn main() -> swcrdsa::Result<()> {
    // user k transmits in the listed slots
    let users: [&[SlotIndex]; 4] = [&[1, 2], &[1, 2, 3], &[3, 4], &[4, 5]];
    let pointers: Vec<Arc<[SlotIndex]>> = users.iter().map(|s| Arc::from(*s)).collect();

    let mut memory = ReceiverMemory::sliding(16);
    for slot in 0..=6 {
        let instances: Vec<Instance> = (0..users.len())
            .filter(|&u| users[u].contains(&slot))
            .map(|u| Instance::new(PacketId(u as u64), pointers[u].clone()))
            .collect();
        let label: Vec<String> = instances.iter().map(|i| format!("U{}", i.packet.0 + 1)).collect();
        memory.ingest_slot(SlotState::new(slot, instances))?;
        let events = memory.peel(50);
        println!("slot {slot}: [{}]", label.join(" "));
        for e in events {
            let how = match e.cause {
                DecodeCause::Clean => "clean slot",
                DecodeCause::Ic => "after cancellation",
            };
            println!("    decoded U{} ({how})", e.packet_id.0 + 1);
        }
    }
    println!("unresolved: {:?}", memory.unresolved());
    Ok(())
}
