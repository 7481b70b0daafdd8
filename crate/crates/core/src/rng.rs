//! Seed splitting.
//!
//! Stream `k` of master seed `s` is ChaCha8 seeded with `s` and switched to
//! word stream `k`. Streams never overlap, so per-trial results do not depend
//! on how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}
