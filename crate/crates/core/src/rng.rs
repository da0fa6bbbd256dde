//! Deterministic pseudo-randomness for every randomized routine in the crate.
//!
//! The generator is xoshiro256++ (a 64-bit shift/rotate generator) seeded by
//! splitmix64 expansion. It is implemented here by its published recurrence
//! rather than pulled from a library so that the exact bit stream every
//! experiment consumes is pinned by this crate alone and can be reproduced in
//! any language from the description below:
//!
//! * state: four u64 words, filled from the seed by four successive
//!   splitmix64 outputs;
//! * output: `rotl(s0 + s3, 23) + s0`, followed by the xoshiro256 state
//!   transition with shift 17 and rotation 45;
//! * uniform `[0,1)` doubles use the top 53 bits: `(x >> 11) * 2^-53`;
//! * `Bernoulli(p)` is `next_f64() < p` (the 53-bit uniform threshold);
//! * `below(n)` maps a draw into `[0,n)` by Lemire's widening-multiply
//!   method with rejection, so it is exactly uniform.
//!
//! Stream splitting: independent substreams are derived, never shared.
//! `Seed::child(tag)` produces the substream seed by one splitmix64 step of
//! `seed XOR tag * 0xA24BAED4963EE407`. Conventions used across the crate:
//!
//! * graph generators consume `Rng64::from_seed(seed)` directly;
//! * retrying algorithms run attempt `i` (counting from 0) on
//!   `seed.child(i)` when `i > 0` and on `seed` itself for attempt 0;
//! * multi-phase algorithms give phase `k` the stream `attempt.child(k)`
//!   with `k` starting at 1;
//! * multi-trial harness runs give trial `i` the stream `base.child(i)`.

use serde::{Deserialize, Serialize};

/// Seed for one deterministic random stream.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Derive the seed of an independent substream. Same rule everywhere:
    /// one splitmix64 step of `self XOR tag * 0xA24BAED4963EE407`.
    pub fn child(self, tag: u64) -> Seed {
        let mut state = self.0 ^ tag.wrapping_mul(0xA24B_AED4_963E_E407);
        Seed(splitmix64(&mut state))
    }

    pub fn rng(self) -> Rng64 {
        Rng64::from_seed(self)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

impl std::fmt::Display for Seed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One splitmix64 step: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256++ stream.
#[derive(Clone, Debug)]
pub struct Rng64 {
    s: [u64; 4],
}

impl Rng64 {
    pub fn from_seed(seed: Seed) -> Self {
        let mut state = seed.0;
        let s = [
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
            splitmix64(&mut state),
        ];
        // splitmix64 is a bijection of a counter sequence, so all four words
        // being zero is unreachable from any seed; the state is never stuck.
        Rng64 { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0,1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / ((1u64 << 53) as f64))
    }

    /// Bernoulli(p) by the 53-bit uniform threshold rule.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Exactly uniform draw from `[0, n)`. `n` must be positive.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0, "below(0) is undefined");
        let n = n as u64;
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as usize
    }
}
