//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 keystream selected by `(master_seed, stream_id)`
//! and positioned by a block index, so a block's draws depend only on those
//! three numbers and never on which worker consumes them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved per block. A block that consumed more would run into the
/// next one; at two 64-bit draws per interferer this allows ~10⁹ interferers.
const BLOCK_WORDS_LOG2: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: SeedSpec) -> Self {
        Self::for_block(seed, 0)
    }

    /// Stream positioned at the start of block `block` of `seed`.
    pub fn for_block(seed: SeedSpec, block: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
        rng.set_stream(seed.stream_id);
        rng.set_word_pos(u128::from(block) << BLOCK_WORDS_LOG2);
        Self { rng }
    }

    /// Repositions at the start of `block` under the same seed.
    pub fn seek_block(&mut self, block: u64) {
        self.rng.set_word_pos(u128::from(block) << BLOCK_WORDS_LOG2);
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
