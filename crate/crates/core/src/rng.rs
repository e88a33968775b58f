//! Keyed, label-addressed random streams.
//!
//! A stream is identified by a master seed and a text label. The pair is
//! hashed with SHA-256 into a 256-bit ChaCha8 key, so any number of streams
//! can be opened independently, in any order, on any thread, and each one
//! always yields the same sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const DOMAIN_TAG: &[u8] = b"transmute/stream/v1";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub label: String,
}

impl RngStream {
    pub fn new(master_seed: u64, label: impl Into<String>) -> Self {
        Self {
            master_seed,
            label: label.into(),
        }
    }

    /// Stream for one side of one identity replicate, `"{identity}/{side}/{replicate}"`.
    pub fn for_replicate(master_seed: u64, identity: &str, side: &str, replicate: u32) -> Self {
        Self::new(master_seed, format!("{identity}/{side}/{replicate}"))
    }

    /// Derives a child stream; the child label is `"{parent}/{suffix}"`.
    pub fn child(&self, suffix: &str) -> Self {
        Self::new(self.master_seed, format!("{}/{}", self.label, suffix))
    }

    pub fn key(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(DOMAIN_TAG);
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update((self.label.len() as u64).to_le_bytes());
        hasher.update(self.label.as_bytes());
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        key
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }
}

impl std::fmt::Display for RngStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#018x}:{}", self.master_seed, self.label)
    }
}
