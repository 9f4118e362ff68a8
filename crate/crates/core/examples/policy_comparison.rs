//! Prevention against treatment over a sweep of recovery rates for one
//! infection rate, run in parallel.
//!
//! cargo run --example policy_comparison -- 0.4 7

use epipolicy::cost::{compare, delta_grid};
use epipolicy::{IntegrationOptions, ShootingOptions};

fn main() -> epipolicy::Result<()> {
    let mut args = std::env::args().skip(1);
    let alpha: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.4);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let rho = 0.04;

    let pairs: Vec<(f64, f64)> = delta_grid(alpha, rho, n)?
        .into_iter()
        .map(|d| (alpha, d))
        .collect();
    let rows = compare(
        &pairs,
        rho,
        0.96,
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    );

    println!(
        "{:>7} {:>9} {:>9} {:>9} {:>9}  verdict",
        "delta", "prev tau0", "prev C", "treat tau0", "treat C"
    );
    for row in rows {
        match (row.prevention, row.treatment, row.verdict) {
            (Some(p), Some(t), Some(v)) => println!(
                "{:>7.4} {:>9.4} {:>9.6} {:>9.4} {:>10.6}  {v}",
                row.delta, p.tau0, p.cost, t.tau0, t.cost
            ),
            _ => println!("{:>7.4} failed: {}", row.delta, row.errors.join("; ")),
        }
    }
    Ok(())
}
