//! Load a TOML run description, apply environment overrides and write the
//! tally and summary files, as the `run` subcommand does.
//!
//! ```text
//! cargo run --example config_run -- crates/core/examples/run.toml /tmp/bell
//! ```

use std::path::PathBuf;

use homodyne_bell::commands::{cmd_run, output_files};
use homodyne_bell::config::parse_config;

fn main() -> homodyne_bell::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/run.toml"));
    let text = std::fs::read_to_string(&path)?;
    let mut cfg = parse_config(&text)?;
    cfg.apply_env(|k| std::env::var(k).ok())?;
    cfg.output_dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("homodyne-bell-example"));

    let summary = cmd_run(&cfg)?;
    for f in output_files("run") {
        println!("wrote {}", cfg.output_dir.join(f).display());
    }
    if let Some(post) = summary.post_selected {
        println!("S (post-selected) = {:.4} +/- {:.4}", post.s, post.s_err);
    }
    if let Some(fair) = summary.fair {
        println!("S (fair)          = {:.4} +/- {:.4}", fair.s, fair.s_err);
    }
    println!("\ncanonical configuration:\n{}", cfg.to_toml());
    Ok(())
}
