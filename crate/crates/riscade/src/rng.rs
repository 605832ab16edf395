//! Deterministic RNG stream derivation for Monte-Carlo runs.
//!
//! Every (drop, link) pair gets its own ChaCha8 stream whose 256-bit key is
//! the injective little-endian layout
//!
//! ```text
//! bytes  0..8   master seed
//! bytes  8..16  drop index
//! bytes 16..24  stream tag (link id)
//! bytes 24..32  constant domain salt
//! ```
//!
//! so results depend only on (config, master seed, drop, link) — never on
//! worker count or execution order — and distinct streams can never collide.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain salt: fixed for the lifetime of the output format.
const SALT: [u8; 8] = *b"riscade1";

/// Stream tags for the per-link generators.
pub const STREAM_H0: u64 = 0;
pub const STREAM_HA: u64 = 1;
pub const STREAM_HB: u64 = 2;

/// Derive the RNG for one (master seed, drop, stream) triple.
pub fn drop_stream_rng(master_seed: u64, drop_index: u64, stream: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&drop_index.to_le_bytes());
    seed[16..24].copy_from_slice(&stream.to_le_bytes());
    seed[24..32].copy_from_slice(&SALT);
    ChaCha8Rng::from_seed(seed)
}
