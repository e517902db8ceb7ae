//! Poisson arrivals per slot, and their reproducibility.
//!
//!     cargo run --example traffic

use swcrdsa::traffic::generate_arrivals;
use swcrdsa::{rng_stream, TrafficConfig};

fn main() -> swcrdsa::Result<()> {
    let cfg = TrafficConfig::new(0.6, 100_000, 0, 42);
    let a = generate_arrivals(&cfg, &mut rng_stream(cfg.rng_seed, 0))?;
    let b = generate_arrivals(&cfg, &mut rng_stream(cfg.rng_seed, 0))?;
    assert_eq!(a, b);

    let n = a.len() as f64;
    let mean = a.total() as f64 / n;
    let var = a.per_slot_counts.iter().map(|&k| (k as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    println!("{} arrivals in {} slots: mean {mean:.4}, variance {var:.4}", a.total(), a.len());

    let frames = a.window_totals(100);
    let per_frame = frames.iter().sum::<u64>() as f64 / frames.len() as f64;
    println!("{} frames of 100 slots: {per_frame:.2} arrivals per frame", frames.len());

    let mut hist = [0u32; 6];
    for &k in &a.per_slot_counts {
        hist[(k as usize).min(5)] += 1;
    }
    println!("slots with k arrivals: {hist:?}");
    Ok(())
}
