//! Delay histograms and cdfs for FR and SW at the same load.
//!
//!     cargo run --release --example delay_distribution

use swcrdsa::metrics::{cdf_at, delay_distribution, loss_rate};
use swcrdsa::{run_simulation, DegreeDistribution, SchemeConfig, TimeConfig, TrafficConfig};

fn main() -> swcrdsa::Result<()> {
    let crdsa = DegreeDistribution::regular(2)?;
    let traffic = TrafficConfig::new(0.6, 300_000, 1000, 5);
    let time = TimeConfig::default();
    let fr = run_simulation(&SchemeConfig::framed(100, crdsa.clone()), &traffic, &time)?;
    let sw = run_simulation(&SchemeConfig::sliding(100, 500, crdsa), &traffic, &time)?;

    for (name, run) in [("FR", &fr), ("SW", &sw)] {
        let d = delay_distribution(run, 1.0);
        println!(
            "{name}: {} decoded, loss {:.3}, mean {:.1} ms, mode {} ms, p50 {} p95 {} p99 {} ms",
            d.len(),
            loss_rate(run),
            d.mean_ms,
            d.mode_ms().unwrap(),
            d.quantile(0.5).unwrap(),
            d.quantile(0.95).unwrap(),
            d.quantile(0.99).unwrap(),
        );
    }

    let (f, s) = (delay_distribution(&fr, 1.0), delay_distribution(&sw, 1.0));
    println!("\n{:>8} {:>8} {:>8}", "timeout", "FR cdf", "SW cdf");
    for t in (260..=500).step_by(20) {
        let t = t as f64;
        println!("{t:>8} {:>8.4} {:>8.4}", cdf_at(&f, t), cdf_at(&s, t));
    }

    // coarse histogram of the SW delays
    let coarse = delay_distribution(&sw, 25.0);
    println!("\nSW delay histogram (25 ms bins)");
    for b in coarse.bins.iter().take(12) {
        println!("{:>5} ms {:<50} {:.4}", b.delay_ms, "#".repeat((b.pdf * 50.0).round() as usize), b.pdf);
    }
    Ok(())
}
