//! With the applied phase randomised every pulse, difference voltages pile up
//! near the extremes: two thirds of them exceed half the maximum.

use homodyne_bell::commands::simulate_hist;
use homodyne_bell::config::parse_config;

const CONFIG: &str = r#"
seed = 7
n_trials = 100000

[source]
amplitude_distribution = "fixed"

[settings.a]
theta = 0
[settings.a_prime]
theta = 0
[settings.b]
theta = 0
[settings.b_prime]
theta = 0
"#;

fn main() -> homodyne_bell::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let report = simulate_hist(&cfg, 25)?;
    let h = &report.histogram;
    let peak = *h.counts.iter().max().unwrap_or(&1) as f64;
    for (bin, &count) in h.counts.iter().enumerate() {
        let (lo, hi) = h.edges(bin);
        let bar = "#".repeat((50.0 * count as f64 / peak).round() as usize);
        println!("[{lo:+.3}, {hi:+.3}) {count:>6} {bar}");
    }
    println!("fraction beyond X_max/2: {:.4}", report.tail_fraction);
    if let Some(fit) = report.arcsine_fit {
        println!("chi2 = {:.1} on {} dof, p = {:.3}", fit.chi_square, fit.dof, fit.p_value);
    }
    Ok(())
}
