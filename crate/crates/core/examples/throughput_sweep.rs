//! Arrival-rate sweep of FR vs SW for the three standard distributions,
//! printed as CSV. Pass a config file to override the built-in one.
//!
//!     cargo run --release --example throughput_sweep [config]

use swcrdsa::experiment::{load_config, parse_config, run_sweep, summary_csv};
use swcrdsa::AccessMode;

const DEFAULT: &str = "
mode = FR,SW
window = 200
n_rx = 500
dist = crdsa2,irsa4,irsa8
lambda = 0.1:1.0:0.1
total_slots = 50000
seed = 1
seeds = 2
";

fn main() -> swcrdsa::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => parse_config(DEFAULT)?,
    };
    let out = run_sweep(&spec)?;
    print!("{}", summary_csv(&out.rows, false));

    eprintln!();
    for d in &spec.dists {
        let fr = out.peak_throughput(AccessMode::Framed, &d.name);
        let sw = out.peak_throughput(AccessMode::SlidingWindow, &d.name);
        if let (Some(fr), Some(sw)) = (fr, sw) {
            eprintln!("{:<8} peak FR {fr:.4}  SW {sw:.4}  gain {:+.1}%", d.name, (sw / fr - 1.0) * 100.0);
        }
    }
    Ok(())
}
