//! Where the replicas go: framed access waits for the next frame, sliding
//! window access starts immediately.
//!
//!     cargo run --example placement

use swcrdsa::placement::{place_fr, place_sw, shared_window_slots, FrameGrid};
use swcrdsa::rng_stream;

fn main() -> swcrdsa::Result<()> {
    let n = 10;
    let grid = FrameGrid::new(n);
    let mut rng = rng_stream(7, 1);

    println!("N_f = N_sw = {n}, three replicas per packet\n");
    println!("{:>8}  {:<22} {:<22}", "arrival", "FR replicas", "SW replicas");
    for arrival in [0u64, 3, 9, 10, 17] {
        let fr = place_fr(arrival, 3, &grid, &mut rng)?;
        let sw = place_sw(arrival, 3, n, &mut rng)?;
        println!("{arrival:>8}  {:<22} {:<22}", format!("{fr:?}"), format!("{sw:?}"));
    }

    println!("\nslots shared by two SW packets, by arrival gap:");
    for gap in [0, 1, 4, 9, 10, 15] {
        println!("  gap {gap:>2}: {}", shared_window_slots(gap, n));
    }
    Ok(())
}
