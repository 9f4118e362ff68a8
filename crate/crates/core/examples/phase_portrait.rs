//! Writes phase-portrait data (arrows, nullclines, equilibria, manifold) as
//! JSON for plotting elsewhere.
//!
//! cargo run --example phase_portrait -- treatment > portrait.json

use epipolicy::phase::{phase_portrait, PhaseOptions};
use epipolicy::{IntegrationOptions, ModelParams, Policy, ShootingOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let policy = match std::env::args().nth(1).as_deref() {
        Some("treatment") => Policy::Treatment,
        _ => Policy::Prevention,
    };
    let params = ModelParams::controlled(0.3, 0.3, 0.04)?;
    let portrait = phase_portrait(
        policy,
        &params,
        &PhaseOptions::for_policy(policy),
        &IntegrationOptions::default(),
        &ShootingOptions::default(),
    )?;
    eprintln!(
        "{} arrows, {} nullclines, {} equilibria, {} manifold points",
        portrait.arrows.len(),
        portrait.nullclines.len(),
        portrait.equilibria.len(),
        portrait.manifold.len()
    );
    serde_json::to_writer(std::io::stdout().lock(), &portrait)?;
    Ok(())
}
