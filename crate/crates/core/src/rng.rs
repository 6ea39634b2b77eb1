//! Counter-based random streams.
//!
//! Every Monte Carlo sample draws from its own generator keyed by
//! `(seed, stream, index)`, so the value of sample `i` never depends on which
//! worker computed it or in what order.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64 stream started from a hashed `(seed, stream, index)` key.
#[derive(Clone, Debug)]
pub struct SampleRng {
    state: u64,
}

impl SampleRng {
    pub fn new(seed: u64, stream: u64, index: u64) -> Self {
        let k = mix64(seed ^ GOLDEN);
        let k = mix64(k ^ stream.wrapping_mul(0xd1b5_4a32_d192_ed03));
        let k = mix64(k ^ index.wrapping_mul(0xaef1_7502_108e_f2d9));
        Self { state: k }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fills `words` with fair bits; bits at positions `>= nbits` are cleared.
    pub fn fill_bits(&mut self, words: &mut [u64], nbits: usize) {
        for w in words.iter_mut() {
            *w = self.next_u64();
        }
        let full = nbits / 64;
        let rem = nbits % 64;
        if rem != 0 {
            words[full] &= (1u64 << rem) - 1;
        }
        for w in words.iter_mut().skip(full + usize::from(rem != 0)) {
            *w = 0;
        }
    }
}
