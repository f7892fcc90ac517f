//! Counter-based random substreams.
//!
//! Every independent unit of work (a tree, a simulation run) draws from its own
//! ChaCha stream selected by index, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `index` of the generator keyed by `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
