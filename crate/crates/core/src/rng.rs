//! Deterministic randomness: every random choice in the toolkit comes from a
//! ChaCha20 stream keyed by a hash of a domain label and caller-supplied
//! parts, so runs replay exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

pub fn derive_rng(domain: &str, parts: &[&[u8]]) -> ChaCha20Rng {
    let mut h = Sha256::new();
    h.update(b"tproxy/rng/v1");
    absorb(&mut h, domain.as_bytes());
    for part in parts {
        absorb(&mut h, part);
    }
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha20Rng::from_seed(seed)
}

fn absorb(h: &mut Sha256, bytes: &[u8]) {
    h.update((bytes.len() as u64).to_be_bytes());
    h.update(bytes);
}
