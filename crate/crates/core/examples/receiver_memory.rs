//! How much receiver memory a sliding window needs: peak CRDSA throughput
//! for several N_rx against the framed scheme with the same window.
//!
//!     cargo run --release --example receiver_memory

use swcrdsa::experiment::{parse_config, run_sweep};
use swcrdsa::AccessMode;

fn main() -> swcrdsa::Result<()> {
    let base = "window = 100\ndist = crdsa2\nlambda = 0.50:0.72:0.02\ntotal_slots = 50000\nseed = 1\nseeds = 2\n";
    let fr = run_sweep(&parse_config(&format!("mode = FR\n{base}"))?)?
        .peak_throughput(AccessMode::Framed, "crdsa2")
        .unwrap();
    println!("FR   N_f=100           peak throughput {fr:.4}");
    for n_rx in [100, 150, 200, 300, 500, 1000] {
        let sw = run_sweep(&parse_config(&format!("mode = SW\nn_rx = {n_rx}\n{base}"))?)?
            .peak_throughput(AccessMode::SlidingWindow, "crdsa2")
            .unwrap();
        println!("SW   N_sw=100 N_rx={n_rx:<5} peak throughput {sw:.4}  ({:+.1}% vs FR)", (sw / fr - 1.0) * 100.0);
    }
    Ok(())
}
