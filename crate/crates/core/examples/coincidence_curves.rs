//! Coincidence rates against the phase of arm B for two choices of arm A.
//! The curves are steps, not sinusoids, and they do not depend on the phase
//! difference alone.

use std::f64::consts::PI;

use homodyne_bell::commands::{linear_grid, simulate_curves};
use homodyne_bell::config::parse_config;

const CONFIG: &str = r#"
seed = 3
n_trials = 20000

[settings]
selection = "fixed_pair"
fixed_pair = [0, 0]

[settings.a]
theta = "pi/2"
[settings.a_prime]
theta = 0.0
[settings.b]
theta = 0.0
[settings.b_prime]
theta = 0.0
"#;

fn main() -> homodyne_bell::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let grid = linear_grid(-PI + 0.1, PI - 0.1, 12);
    for theta_a in [PI / 2.0, PI / 4.0, -PI / 2.0] {
        let curves = simulate_curves(&cfg, theta_a, &grid)?;
        println!("theta_a = {theta_a:.4}");
        println!("  {:>8} {:>7} {:>7} {:>7} {:>7} {:>7}", "theta_b", "P++", "P+-", "P-+", "P--", "E");
        for p in &curves.points {
            let [pp, pm, mp, mm] = p.rates;
            println!(
                "  {:>8.3} {pp:>7.3} {pm:>7.3} {mp:>7.3} {mm:>7.3} {:>7.3}",
                p.theta_b,
                p.e_fair.unwrap_or(f64::NAN)
            );
        }
        println!("  visibility of P++: {:.3}", curves.visibility[0].unwrap_or(f64::NAN));
    }
    Ok(())
}
