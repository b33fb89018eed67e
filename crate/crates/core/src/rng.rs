//! Counter-based randomness.
//!
//! Every random decision is a pure function of a key
//! `(master_seed, trial_index, stream_tag)` plus the indices it concerns, so
//! results do not depend on scan order or on how trials are spread over
//! threads.

use statrs::function::gamma::ln_gamma;

/// Stream used for the point process.
pub const STREAM_POINTS: u64 = 0;
/// Stream used for Bernoulli edge decisions.
pub const STREAM_EDGES: u64 = 1;
/// Stream used by the torus-to-square edge thinning.
pub const STREAM_BOUNDARY_THINNING: u64 = 2;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(GOLDEN) ^ word)
}

#[inline]
pub fn to_unit(bits: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (bits >> 11) as f64 * SCALE
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    state: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, trial_index: u64, stream_tag: u64) -> Self {
        let mut state = absorb(0x6A09_E667_F3BC_C908, master_seed);
        state = absorb(state, trial_index);
        state = absorb(state, stream_tag);
        Self { state }
    }

    /// Uniform in `[0, 1)` attached to the unordered pair `{i, j}`.
    #[inline]
    pub fn pair_uniform(&self, i: u64, j: u64) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        to_unit(absorb(absorb(self.state, lo), hi))
    }

    pub fn sequence(&self) -> CounterRng {
        CounterRng {
            key: self.state,
            counter: 0,
        }
    }
}

/// Sequential draws `mix(key, 0), mix(key, 1), ...`.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = absorb(self.key, self.counter);
        self.counter += 1;
        out
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }
}

/// Poisson variate: inversion for `lambda < 30`, Hörmann's PTRS
/// transformed rejection otherwise.
pub fn poisson(rng: &mut CounterRng, lambda: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda < 30.0 {
        poisson_inversion(rng, lambda)
    } else {
        poisson_ptrs(rng, lambda)
    }
}

fn poisson_inversion(rng: &mut CounterRng, lambda: f64) -> u64 {
    let u = rng.next_f64();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p == 0.0 && cdf < u {
            // Round-off exhausted the tail.
            break;
        }
    }
    k
}

fn poisson_ptrs(rng: &mut CounterRng, lambda: f64) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.next_f64() - 0.5;
        let v = rng.next_f64();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}
