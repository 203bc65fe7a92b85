//! Deterministic Halton sampling over joint limits.

use crate::vector::Configuration;

/// Digit-reversed fraction of `index` in `base`, e.g. base 2: 6 = 110b -> 0.011b.
///
/// The fraction is built as an integer ratio and divided once, so the result
/// is the correctly rounded closed form whenever the denominator fits in 53
/// bits (every index below 5 * 10^14 for the first 7 primes).
pub fn radical_inverse(base: u32, mut index: u64) -> f64 {
    debug_assert!(base >= 2);
    let b = base as u128;
    let (mut num, mut den) = (0u128, 1u128);
    while index > 0 {
        num = num * b + (index as u128 % b);
        den *= b;
        index /= base as u64;
    }
    num as f64 / den as f64
}

/// The first `count` primes, ascending.
pub fn first_primes(count: usize) -> Vec<u32> {
    let mut primes: Vec<u32> = Vec::with_capacity(count);
    let mut candidate = 2u32;
    while primes.len() < count {
        if primes
            .iter()
            .take_while(|&&p| p * p <= candidate)
            .all(|&p| candidate % p != 0)
        {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// Halton sequence scaled to per-joint `[lo, hi]`; joint `j` uses the
/// `j`-th prime and the index starts at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HaltonSampler {
    bases: Vec<u32>,
    limits: Vec<[f64; 2]>,
    index: u64,
}

impl HaltonSampler {
    pub fn new(limits: Vec<[f64; 2]>) -> Self {
        Self {
            bases: first_primes(limits.len()),
            limits,
            index: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.limits.len()
    }

    /// Index of the next draw.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    /// Draw `index`, then advance.
    pub fn next_sample(&mut self) -> Configuration {
        let index = self.index;
        self.index += 1;
        let values = self
            .bases
            .iter()
            .zip(&self.limits)
            .map(|(&b, &[lo, hi])| (lo + radical_inverse(b, index) * (hi - lo)) as f32)
            .collect();
        Configuration::new(values).expect("finite limits give finite samples")
    }
}

/// Free-function form of [`HaltonSampler::next_sample`].
pub fn halton_next(sampler: &mut HaltonSampler) -> Configuration {
    sampler.next_sample()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn radical_inverse_cases() {
        assert_eq!(radical_inverse(2, 1), 0.5);
        assert_eq!(radical_inverse(2, 3), 0.75);
        assert_eq!(radical_inverse(2, 6), 0.375);
        assert!((radical_inverse(3, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((radical_inverse(3, 5) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(8), [2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(first_primes(0).is_empty());
    }

    #[test]
    fn first_draws() {
        let mut s = HaltonSampler::new(vec![[0.0, 1.0]; 2]);
        assert_eq!(s.next_sample().values(), &[0.5, (1.0f64 / 3.0) as f32]);
        assert_eq!(s.index(), 2);
        let mut s = HaltonSampler::new(vec![[-1.0, 1.0]]);
        assert_eq!(halton_next(&mut s).values(), &[0.0]);
    }

    #[test]
    fn equal_state_equal_stream() {
        let limits = vec![[-2.9, 2.9], [-1.8, 1.8], [-3.1, 0.0], [0.0, 3.7]];
        let mut a = HaltonSampler::new(limits.clone());
        for _ in 0..17 {
            a.next_sample();
        }
        let mut b = a.clone();
        for _ in 0..10_000 {
            assert!(a.next_sample().bitwise_eq(&b.next_sample()));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn samples_within_limits(
            lims in prop::collection::vec((-5.0f64..5.0, 0.01f64..5.0), 1..8),
            skip in 0u64..5000,
        ) {
            let limits: Vec<[f64; 2]> = lims.iter().map(|&(lo, w)| [lo, lo + w]).collect();
            let mut s = HaltonSampler::new(limits.clone());
            s.index = 1 + skip;
            for _ in 0..50 {
                let q = s.next_sample();
                for (v, [lo, hi]) in q.values().iter().zip(&limits) {
                    prop_assert!((*lo as f32) <= *v && *v <= (*hi as f32));
                }
            }
        }
    }
}
