//! The integrator on its own: a user-supplied planar field, an adaptive step
//! and a located event.
//!
//! cargo run --example custom_integration

use epipolicy::integrate::{integrate, Crossing, Event, SystemKind};
use epipolicy::{IntegrationOptions, Method, PhasePoint};

fn main() -> epipolicy::Result<()> {
    // harmonic oscillator, stopped at the first downward crossing of s = 0
    let field = |x: PhasePoint| Ok([x.c, -x.s]);
    let opts = IntegrationOptions::default()
        .with_method(Method::Rk45)
        .with_tolerances(1e-12, 1e-10)
        .with_event(Event::new("zero", Crossing::Falling, |x: PhasePoint| x.s));

    let traj = integrate(
        &field,
        PhasePoint::new(1.0, 0.0),
        &opts,
        SystemKind::Baseline,
    )?;
    let (t, x) = traj.last();
    println!("{:?} after {} steps", traj.termination, traj.len() - 1);
    println!(
        "t = {t:.12} (pi/2 = {:.12}), state ({:.2e}, {:.6})",
        std::f64::consts::FRAC_PI_2,
        x.s,
        x.c
    );
    Ok(())
}
