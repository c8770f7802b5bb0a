#![allow(dead_code)]

use homodyne_bell::config::{parse_config, RunConfig};

/// Builds a run configuration from a TOML head (top-level keys and any
/// `[source]`, `[detector_*]` or `[settings]` tables) plus the four angles.
pub fn run_config(head: &str, [a, a_prime, b, b_prime]: [&str; 4]) -> RunConfig {
    let text = format!(
        "{head}\n\
         [settings.a]\ntheta = {a:?}\n\
         [settings.a_prime]\ntheta = {a_prime:?}\n\
         [settings.b]\ntheta = {b:?}\n\
         [settings.b_prime]\ntheta = {b_prime:?}\n"
    );
    parse_config(&text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub const GENERIC: [&str; 4] = ["pi/2", "pi/4", "pi/2", "-pi/2"];
