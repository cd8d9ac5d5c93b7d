//! Random streams.
//!
//! Every random quantity in the crate is drawn from ChaCha8 (`rand_chacha`),
//! keyed by a 64-bit seed (expanded with `SeedableRng::seed_from_u64`) and a
//! 64-bit stream id. ChaCha is counter based, so the same `(seed, stream)`
//! pair yields the same bits on every platform. Uniform `f64` draws use the
//! 53-bit multiply method of `rand`'s `StandardUniform`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Well-known stream ids, so that independent parts of an experiment never
/// share bits.
pub mod streams {
    pub const START: u64 = 0;
    pub const REFERENCE: u64 = 1;
    pub const WALK: u64 = 2;
    pub const VALIDATION: u64 = 3;
}

pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Seed of the `index`-th chain fanned out from `seed` (SplitMix64 finalizer).
pub fn chain_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map({
            let mut r = stream(7, 0);
            move |_| r.random()
        })
        .collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = stream(7, 0);
            move |_| r.random()
        })
        .collect();
        let c: Vec<u64> = (0..4).map({
            let mut r = stream(7, 1);
            move |_| r.random()
        })
        .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn chain_seeds_differ() {
        assert_ne!(chain_seed(1, 0), chain_seed(1, 1));
        assert_eq!(chain_seed(1, 3), chain_seed(1, 3));
    }
}
