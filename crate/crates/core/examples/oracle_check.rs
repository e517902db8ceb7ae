//! Cross-checks the streaming decoder against the brute-force oracle on the
//! placements of a real run.
//!
//!     cargo run --release --example oracle_check

use swcrdsa::analytics::oracle_decode;
use swcrdsa::decoder::decode_placements;
use swcrdsa::{run_simulation, DegreeDistribution, SchemeConfig, SlotIndex, TimeConfig, TrafficConfig};

fn main() -> swcrdsa::Result<()> {
    let scheme = SchemeConfig::sliding(50, 200, DegreeDistribution::irsa4());
    let run = run_simulation(&scheme, &TrafficConfig::new(0.75, 20_000, 0, 3), &TimeConfig::default())?;
    let placements: Vec<Vec<SlotIndex>> = run.packets.iter().map(|p| p.replica_slots.clone()).collect();

    let oracle = oracle_decode(&placements);
    let in_run = run.packets.iter().filter(|p| p.is_decoded()).count();
    let span = run.slots_simulated as usize;
    let unbounded = decode_placements(&placements, span, u32::MAX)?.len();

    println!("packets                     {}", placements.len());
    println!("oracle decodes              {}", oracle.decoded.len());
    println!("decoder, unbounded memory   {unbounded}");
    println!("decoder, N_rx = 200 (run)   {in_run}");
    println!("residual is a stopping set  {}", oracle.residual_is_stopping_set(&placements));
    assert_eq!(unbounded, oracle.decoded.len());
    assert!(in_run <= unbounded);
    Ok(())
}
