//! One trajectory of each family under the default motion budget, all checked
//! for admissibility before printing.

use fluidfield::experiments::realization_rng;
use fluidfield::trajectory::{
    discrete_greedy, linear_sweep, oscillatory, random_admissible, validate, MotionConstraint,
    PortSet, Trajectory,
};

fn show(name: &str, t: &Trajectory, c: &MotionConstraint, ports: Option<&PortSet>) {
    match validate(t, c, ports) {
        Ok(()) => {
            let xs: Vec<String> = t.positions().iter().map(|x| format!("{x:.3}")).collect();
            println!("{name:<22} {}", xs.join(" "));
        }
        Err(v) => println!("{name:<22} INADMISSIBLE: {v}"),
    }
}

fn main() -> fluidfield::Result<()> {
    let c = MotionConstraint::new(0.3, 1.0, 2.0)?;
    let tau_p = 10;
    println!(
        "aperture {} wavelengths, per-symbol step limit {}, {tau_p} symbols",
        c.ell,
        c.max_step()
    );
    println!();

    show("linear sweep", &linear_sweep(&c, tau_p, 0.0)?, &c, None);
    show(
        "oscillatory (a=0.3)",
        &oscillatory(&c, tau_p, 1.0, 0.3)?,
        &c,
        None,
    );
    show(
        "target holding",
        &oscillatory(&c, tau_p, 1.0, 0.0)?,
        &c,
        None,
    );
    let mut rng = realization_rng(7, 0);
    show(
        "random admissible",
        &random_admissible(&c, tau_p, &mut rng)?,
        &c,
        None,
    );

    let ports = PortSet::uniform(8, c.ell)?;
    show(
        "discrete greedy (Q=8)",
        &discrete_greedy(&ports, &c, tau_p, 0)?,
        &c,
        Some(&ports),
    );

    // ports too far apart to hop: the antenna has to dwell
    let sparse = PortSet::uniform(4, c.ell)?;
    show(
        "discrete dwell (Q=4)",
        &discrete_greedy(&sparse, &c, tau_p, 2)?,
        &c,
        Some(&sparse),
    );
    println!();
    println!(
        "Q=4 spacing {:.3} exceeds the step limit, so the antenna stays put.",
        sparse.spacing()
    );
    Ok(())
}
