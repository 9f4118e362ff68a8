//! Uncontrolled SIS dynamics: reproduction number, long-run outcome and the
//! closed-form infected share against numerical integration.
//!
//! cargo run --example baseline_sis

use epipolicy::epidemic::{
    baseline_equilibria, baseline_planar_field, basic_reproduction_number, classify_long_run,
    closed_form_infected,
};
use epipolicy::integrate::{integrate, SystemKind};
use epipolicy::{IntegrationOptions, ModelParams, PhasePoint};

fn main() -> epipolicy::Result<()> {
    let i0 = 0.04;
    for (alpha, delta, p, v) in [
        (0.4, 0.2, 0.0, 0.0),
        (0.2, 0.26, 0.0, 0.0),
        (0.4, 0.2, 0.3, 0.2),
    ] {
        let params = ModelParams::new(alpha, delta, 0.04, p, v)?;
        let r0 = basic_reproduction_number(&params)?;
        let (_, endemic) = baseline_equilibria(&params)?;
        println!(
            "alpha={alpha} delta={delta} p={p} v={v}: R0 = {r0:.3}, {:?}, endemic level {:?}",
            classify_long_run(&params)?,
            endemic
        );

        let opts = IntegrationOptions::default().with_t_max(100.0);
        let traj = integrate(
            &baseline_planar_field(params),
            PhasePoint::new(1.0 - i0, i0),
            &opts,
            SystemKind::Baseline,
        )?;
        for (t, x) in traj.iter().step_by(2500) {
            println!(
                "  t={t:>5.1}  I={:.6}  closed form {:.6}",
                x.c,
                closed_form_infected(t, i0, &params)?
            );
        }
    }
    Ok(())
}
