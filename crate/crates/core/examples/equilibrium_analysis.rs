//! Equilibria of both policy systems with existence conditions, Jacobians and
//! eigenvalue classification.
//!
//! cargo run --example equilibrium_analysis -- 0.3 0.3

use epipolicy::control::equilibria;
use epipolicy::{ModelParams, Policy};

fn main() -> epipolicy::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let alpha = args.first().copied().unwrap_or(0.3);
    let delta = args.get(1).copied().unwrap_or(0.3);
    let params = ModelParams::controlled(alpha, delta, 0.04)?;

    for policy in Policy::ALL {
        let (e1, e2) = equilibria(policy, &params);
        for e in [e1, e2] {
            print!("{policy} {}: ", e.name);
            if !e.exists.exists() {
                println!("absent ({:?})", e.exists);
                continue;
            }
            let [l1, l2] = e.eigenvalues.unwrap();
            println!(
                "S = {:.4}, tau = {:.4}, eigenvalues {:.4} / {:.4}, {:?}",
                e.coords.s, e.coords_tau.c, l1, l2, e.classification
            );
            if let Some(v) = e.stable_eigenvector {
                println!("    stable direction ({:.4}, {:.4})", v[0], v[1]);
            }
            if let Some(f) = e.tau_feasible {
                println!("    tax within [0, 1]: {f}");
            }
        }
    }
    Ok(())
}
