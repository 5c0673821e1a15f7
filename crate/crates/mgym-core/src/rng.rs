//! Deterministic randomness.
//!
//! Every stochastic component takes an explicit `u64` seed and derives
//! independent named substreams from it, so that adding or reordering one
//! consumer never perturbs another. A substream is keyed by
//! `(seed, label, index)` hashed through SHA-256; the first 32 bytes of the
//! digest seed a ChaCha8 generator.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// The engine-wide RNG type. ChaCha8 is fast, portable, and identically
/// reproducible across platforms.
pub type EngineRng = ChaCha8Rng;

/// Derive an independent RNG substream from a root seed, a static label,
/// and an index (circuit number, sample number, job counter, ...).
pub fn substream(seed: u64, label: &str, index: u64) -> EngineRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x1f]); // domain separator between fields
    hasher.update(label.as_bytes());
    hasher.update([0x1f]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(key)
}

/// Root stream for a component that needs only one stream.
pub fn root(seed: u64, label: &str) -> EngineRng {
    substream(seed, label, 0)
}

/// Derive a child seed (not a generator) for handing to a sub-component
/// that itself derives substreams.
pub fn child_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0x2f]);
    hasher.update(label.as_bytes());
    hasher.update([0x2f]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 8 bytes"))
}
