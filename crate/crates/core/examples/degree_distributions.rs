//! Degree distributions: construction, mean degree, sampling, and the
//! per-slot instance count they induce.
//!
//!     cargo run --example degree_distributions

use swcrdsa::analytics::{binomial_pmf, poisson_pmf, slot_degree_pmf, total_variation};
use swcrdsa::{rng_stream, DegreeDistribution};

fn main() -> swcrdsa::Result<()> {
    let dists = [
        ("crdsa2", DegreeDistribution::regular(2)?),
        ("irsa4", DegreeDistribution::irsa4()),
        ("irsa8", DegreeDistribution::irsa8()),
        ("custom", DegreeDistribution::by_name("2:0.6,3:0.4")?),
    ];

    let mut rng = rng_stream(2024, 0);
    for (name, d) in &dists {
        let n = 200_000;
        let mut counts = vec![0u32; d.max_degree() as usize + 1];
        for _ in 0..n {
            counts[d.sample(&mut rng) as usize] += 1;
        }
        println!("{name:<7} {d}  mean degree {:.4}", d.mean_degree());
        for &(l, p) in d.entries() {
            println!("        l={l}: target {p:.4}  sampled {:.4}", counts[l as usize] as f64 / n as f64);
        }
    }

    // A normalisation error is caught at construction.
    match DegreeDistribution::new(vec![(2, 0.6), (3, 0.6)]) {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // Instances per slot at load G: binomial for a finite user population,
    // Poisson in the limit.
    let irsa8 = DegreeDistribution::irsa8();
    let g = 0.5;
    let limit = poisson_pmf(irsa8.mean_degree() * g, 1e-12);
    println!("\nirsa8 at G={g}: Poisson mean {:.2}", irsa8.mean_degree() * g);
    for users in [10u64, 100, 1000, 10_000] {
        let finite = slot_degree_pmf(&irsa8, g, Some(users));
        println!("  {users:>6} users: total variation to the limit {:.5}", total_variation(&finite, &limit));
    }
    let b = binomial_pmf(4, 0.5);
    println!("  Binomial(4, 0.5) = {b:?}");
    Ok(())
}
