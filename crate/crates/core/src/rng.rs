//! Counter-split random streams.
//!
//! Every trial draws from its own ChaCha8 stream keyed by the master seed, a
//! label naming the consumer, and the trial index, so results do not depend
//! on which thread ran which trial.

use crate::error::{QcError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Independent stream for (`seed`, `label`, `index`).
pub fn stream(seed: u64, label: &str, index: u64) -> Rng {
    let mut state = seed ^ fnv1a(label).rotate_left(17);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Draws an index with probability proportional to non-negative `weights`.
pub fn categorical<R: rand::Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(QcError::UnreachableBranch("empty outcome distribution".into()));
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Ok(i);
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .ok_or_else(|| QcError::UnreachableBranch("no outcome with positive weight".into()))
}
