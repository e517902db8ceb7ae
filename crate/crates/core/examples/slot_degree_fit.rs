//! Instances per slot in a simulated channel against the Poisson limit.
//!
//!     cargo run --release --example slot_degree_fit

use swcrdsa::analytics::{chi_square_gof, poisson_pmf};
use swcrdsa::{run_simulation, DegreeDistribution, SchemeConfig, TimeConfig, TrafficConfig};

fn main() -> swcrdsa::Result<()> {
    let d = DegreeDistribution::irsa8();
    let lambda = 0.5;
    let pmf = poisson_pmf(d.mean_degree() * lambda, 1e-12);
    for scheme in [SchemeConfig::sliding(200, 500, d.clone()), SchemeConfig::framed(200, d.clone())] {
        let run = run_simulation(&scheme, &TrafficConfig::new(lambda, 500_000, 2000, 9), &TimeConfig::default())?;
        let total: u64 = run.occupancy.iter().sum();
        println!("{} (window {})", scheme.mode, scheme.window_slots);
        for (k, &c) in run.occupancy.iter().enumerate().take(9) {
            println!("  {k}: observed {:.5}  Poisson {:.5}", c as f64 / total as f64, pmf.get(k).copied().unwrap_or(0.0));
        }
        let fit = chi_square_gof(&run.occupancy, &pmf, 5.0);
        println!("  chi2 {:.2}, df {}, p {:.3}\n", fit.statistic, fit.degrees_of_freedom, fit.p_value);
    }
    Ok(())
}
