//! Event-by-event local-realist model of homodyne-detection Bell tests.
//!
//! Down-converted pulse pairs share a hidden phase relative to the master
//! laser. Each pulse is tapped by an event-ready detector and then mixed with
//! a local oscillator in a balanced homodyne detector whose difference voltage
//! is digitised (or discriminated). CHSH statistics are computed with both
//! the fair (`N_AB`) and the post-selected denominators.
//!
//! | module       | contents                                                   |
//! |--------------|------------------------------------------------------------|
//! | [`optics`]   | beamsplitter intensities, homodyne difference, real-wave oracle |
//! | [`source`]   | pair generation, tap split, event-ready decision           |
//! | [`detector`] | photodiode voltages, sign digitiser, discriminators        |
//! | [`runner`]   | trials, experiments, phase scans                           |
//! | [`stats`]    | closed-form predictions, CHSH estimators, histograms       |
//! | [`config`]   | TOML run configuration                                     |
//! | [`commands`] | `run`, `sweep`, `curves`, `scan`, `hist`                    |
//!
//! See `examples/` for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod detector;
pub mod error;
pub mod optics;
pub mod runner;
pub mod source;
pub mod stats;
pub mod streams;

pub use error::{Error, Result};
