//! Input vector generation.
//!
//! Random streams use SplitMix64 (Steele, Lea and Flood's 64-bit mixer, the
//! seeding generator of the xoshiro family):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Each vector consumes three draws in order: `a = draw & mask`,
//! `b = draw & mask`, `cin = draw >> 63`, where `mask` keeps the low `width`
//! bits. Any implementation following this recipe reproduces the same
//! streams.

use crate::sim::InputVector;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

pub fn width_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Endless stream of random adder input vectors.
#[derive(Debug, Clone)]
pub struct VectorStream {
    rng: SplitMix64,
    mask: u64,
}

impl VectorStream {
    pub fn new(width: usize, seed: u64) -> Self {
        VectorStream {
            rng: SplitMix64::new(seed),
            mask: width_mask(width),
        }
    }
}

impl Iterator for VectorStream {
    type Item = InputVector;

    fn next(&mut self) -> Option<InputVector> {
        let a = self.rng.next_u64() & self.mask;
        let b = self.rng.next_u64() & self.mask;
        let cin = self.rng.next_u64() >> 63 == 1;
        Some(InputVector { a, b, cin })
    }
}

pub fn random_vectors(width: usize, n: usize, seed: u64) -> Vec<InputVector> {
    VectorStream::new(width, seed).take(n).collect()
}

/// All `2^(2w+1)` input combinations: `a` in the low bits of the counter,
/// then `b`, then `cin`.
pub fn exhaustive_vectors(width: usize) -> impl Iterator<Item = InputVector> {
    assert!(
        width <= 20,
        "exhaustive enumeration is limited to 20-bit operands"
    );
    let mask = width_mask(width);
    (0u64..1 << (2 * width + 1)).map(move |i| InputVector {
        a: i & mask,
        b: (i >> width) & mask,
        cin: (i >> (2 * width)) & 1 == 1,
    })
}
