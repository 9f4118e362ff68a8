//! Shoots the optimal recovery-subsidy tax path. The tax starts positive and
//! falls to zero along with the infected share.
//!
//! cargo run --example optimal_treatment

use epipolicy::cost::social_cost_treatment;
use epipolicy::shoot::shoot_treatment;
use epipolicy::{IntegrationOptions, ModelParams};

fn main() -> epipolicy::Result<()> {
    let params = ModelParams::controlled(0.2, 0.2, 0.04)?;
    let r = shoot_treatment(&params, 0.96, &IntegrationOptions::default())?;
    println!("tau0 = {:.4}, phi0 = {:.4}", r.tau0, r.c0);
    println!(
        "social cost = {:.6}",
        social_cost_treatment(&r.trajectory, &params)?
    );

    let tax = r.tax_path();
    for k in (0..r.trajectory.len()).step_by(r.trajectory.len() / 8) {
        let (t, x) = (r.trajectory.times[k], r.trajectory.states[k]);
        println!(
            "t={t:>7.2}  S={:.6}  phi={:.6}  tau={:.6}",
            x.s, x.c, tax[k]
        );
    }
    Ok(())
}
