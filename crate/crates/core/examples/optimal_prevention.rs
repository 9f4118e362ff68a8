//! Shoots the optimal contact-tax path and prints how the tax rises toward
//! its long-run level as the infection dies out.
//!
//! cargo run --example optimal_prevention

use epipolicy::cost::social_cost_prevention;
use epipolicy::shoot::shoot_prevention;
use epipolicy::{IntegrationOptions, ModelParams};

fn main() -> epipolicy::Result<()> {
    let params = ModelParams::controlled(0.3, 0.281, 0.04)?;
    let r = shoot_prevention(&params, 0.96, &IntegrationOptions::default())?;
    println!(
        "tau0 = {:.4}, long-run tax = {:.4}, {} bisection guesses, {} stage(s)",
        r.tau0,
        r.target.coords_tau.c,
        r.classifier_log.len(),
        r.stages
    );
    println!(
        "social cost = {:.6}",
        social_cost_prevention(&r.trajectory, &params)?
    );

    let tax = r.tax_path();
    for k in (0..r.trajectory.len()).step_by(r.trajectory.len() / 10) {
        let (t, x) = (r.trajectory.times[k], r.trajectory.states[k]);
        println!("t={t:>7.2}  S={:.6}  tau={:.6}", x.s, tax[k]);
    }
    Ok(())
}
