//! Counter-derived random streams.
//!
//! Every trial owns two ChaCha8 streams keyed by the master seed: the
//! physics stream (id `2 * trial`) and the setting-choice stream
//! (id `2 * trial + 1`). Trials therefore replay independently of one another
//! and of the order in which they are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

fn stream(master_seed: u64, id: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(id);
    rng
}

/// Stream consumed by the source, the event-ready detectors and the
/// homodyne detectors of one trial.
pub fn physics_stream(master_seed: u64, trial_id: u64) -> TrialRng {
    stream(master_seed, trial_id.wrapping_mul(2))
}

/// Stream used only to pick the analyzer settings of one trial.
pub fn settings_stream(master_seed: u64, trial_id: u64) -> TrialRng {
    stream(master_seed, trial_id.wrapping_mul(2).wrapping_add(1))
}
