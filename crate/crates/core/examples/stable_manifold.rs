//! Traces the stable manifold of E1 backward in time and reads off the
//! optimal initial tax, then compares it with the shooting answer.
//!
//! cargo run --example stable_manifold

use epipolicy::shoot::{manifold_tau0, shoot, stable_manifold_backward};
use epipolicy::{IntegrationOptions, ModelParams, Policy, ShootingOptions};

fn main() -> epipolicy::Result<()> {
    let params = ModelParams::controlled(0.4, 0.4, 0.04)?;
    let opts = IntegrationOptions::default();
    let sopts = ShootingOptions::default();
    for policy in Policy::ALL {
        let trace = stable_manifold_backward(&params, policy, 0.3, &opts, &sopts)?;
        let (t, end) = trace.last();
        println!(
            "{policy}: {} points, backward time {t:.2}, ends at S={:.4} c={:.4}",
            trace.len(),
            end.s,
            end.c
        );
        let traced = manifold_tau0(&params, policy, 0.96, &opts, &sopts)?;
        let shot = shoot(policy, &params, 0.96, &opts, &sopts)?.tau0;
        println!("  tau0 traced {traced:.8}, shot {shot:.8}");
    }
    Ok(())
}
