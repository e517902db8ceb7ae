//! The probability that a given slot receives an instance of a given user
//! is l/N under both access rules.
//!
//!     cargo run --example analytic_equality

use swcrdsa::analytics::{p_uins_fr, p_uins_sw};

fn main() {
    println!("{:>2} {:>5} {:>5} {:>16} {:>16} {:>16}", "l", "N_sw", "N_f", "FR", "SW", "l/N_f");
    for &(l, n_sw, n_f) in &[(1, 1, 10), (2, 100, 100), (2, 50, 100), (4, 200, 200), (8, 100, 1000), (8, 8, 8)] {
        println!(
            "{l:>2} {n_sw:>5} {n_f:>5} {:>16.12} {:>16.12} {:>16.12}",
            p_uins_fr(l, n_f),
            p_uins_sw(l, n_f, n_sw),
            l as f64 / n_f as f64
        );
    }
}
