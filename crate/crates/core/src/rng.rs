//! Counter-keyed random substreams.
//!
//! Every random draw in a simulation comes from a ChaCha8 stream whose key
//! is derived from `(master seed, purpose tag, drop index, item index)`.
//! Streams never depend on evaluation order, so drops can run on any number
//! of threads and reproduce the same bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a substream is used for. Distinct tags never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Deployment = 1,
    Link = 2,
    Steering = 3,
    Orientation = 4,
    Test = 0xffff,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    finalize(*state)
}

fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Opens the substream for `(seed, purpose, drop, item)`.
pub fn substream(seed: u64, purpose: Purpose, drop: u64, item: u64) -> SimRng {
    let mut h = finalize(seed);
    for input in [purpose as u64, drop, item] {
        h = finalize(h ^ input);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut h).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
