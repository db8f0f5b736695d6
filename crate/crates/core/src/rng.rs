//! Per-replication random streams.
//!
//! Every replication owns an independent ChaCha8 stream selected by the
//! `(seed, replication)` pair. The stream is a pure function of that pair, so
//! results do not depend on the order in which replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Counter-based stream for replication `index` under the master `seed`.
pub fn replication_stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
