//! Base-2 van der Corput sequence used for Glimm sampling.

/// Radical inverse of `n` in base 2: the binary digits of `n` mirrored
/// across the radix point.
///
/// `n = 0` maps to `0`; every `1 ≤ n < 2^53` lands in `(0, 1)`.
pub fn van_der_corput(n: u64) -> f64 {
    // keep 53 bits so the result is exact for n < 2^53 and never rounds up to 1
    (n.reverse_bits() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Position in the sequence. Step `n` of a scheme consumes `a_{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VdcSampler {
    index: u64,
}

impl VdcSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// A sampler whose next draw is `a_{index + 1}`.
    pub fn starting_at(index: u64) -> Self {
        VdcSampler { index }
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_sample(&mut self) -> f64 {
        self.index += 1;
        van_der_corput(self.index)
    }
}

impl Iterator for VdcSampler {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_sample())
    }
}
