//! Deterministic random number generation.
//!
//! Every experiment in this crate is seeded, and a seed plus an identical
//! call sequence must reproduce identical output bits. The generator is a
//! self-contained xoshiro256++ seeded through SplitMix64, so streams do not
//! depend on any external crate's stream layout.

/// Seeded generator with an explicit draw counter.
///
/// `derive` produces statistically independent child streams (e.g. one per
/// ensemble member) from a parent seed and a tag; parallel and serial use of
/// the children yield identical results because each child owns its state.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    state: [u64; 4],
    /// Number of raw 64-bit draws made so far.
    position: u64,
    spare_normal: Option<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngState {
    pub fn new(seed: u64) -> RngState {
        let mut sm = seed;
        let state = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        RngState {
            seed,
            state,
            position: 0,
            spare_normal: None,
        }
    }

    /// Child stream for `tag`; deterministic in (seed, tag).
    pub fn derive(&self, tag: u64) -> RngState {
        let mut sm = self.seed ^ 0xa076_1d64_78bd_642f;
        let mixed = splitmix64(&mut sm) ^ {
            let mut t = tag.wrapping_add(0x1234_5678_9abc_def0);
            splitmix64(&mut t)
        };
        RngState::new(mixed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn position(&self) -> u64 {
        self.position
    }

    fn next_u64(&mut self) -> u64 {
        // xoshiro256++
        let s = &mut self.state;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        self.position += 1;
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller; pairs are cached so consecutive draws
    /// cost one transform per two values.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps ln() finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Normal with the given mean and standard deviation (stddev >= 0).
    pub fn normal_with(&mut self, mean: f64, stddev: f64) -> f64 {
        mean + stddev * self.normal()
    }

    pub fn gen_range_usize(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Modulo bias is < 2^-40 for the sizes used here.
        (self.next_u64() % n as u64) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.gen_range_usize(i + 1);
            items.swap(i, j);
        }
    }

    /// True with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
