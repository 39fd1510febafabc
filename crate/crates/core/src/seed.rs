//! Seed derivation shared by every randomized stage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Deterministic generator used throughout the crate.
pub type WorkbenchRng = ChaCha8Rng;

pub fn rng(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child seed from a base seed and a stable label such as a grid
/// cell name. Independent of platform, thread count and execution order.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
