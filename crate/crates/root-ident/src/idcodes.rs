//! Toy coloring-scheme identification codes over a noiseless concatenation
//! channel.
//!
//! A code is a family of colorings: maps from `M'` inner indices to `M''`
//! colors. Over an identity channel the confusability of two code members
//! is just the fraction of inner indices on which their colors agree, so
//! the whole construction reduces to combinatorics that is fully checkable
//! at desk scale. The number of available distinct colorings is
//! `M''^(M')` — doubly exponential in the inner index bit-width, which is
//! the growth the root-identification problem cannot reach.

use num_bigint::BigUint;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::rng;

/// Family of colorings `{1..m_prime} -> {1..m_double_prime}` (stored
/// 0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringCode {
    m_prime: u32,
    m_double_prime: u32,
    colorings: Vec<Vec<u32>>,
}

impl ColoringCode {
    pub fn m_prime(&self) -> u32 {
        self.m_prime
    }

    pub fn m_double_prime(&self) -> u32 {
        self.m_double_prime
    }

    /// Number of colorings in the family.
    pub fn len(&self) -> usize {
        self.colorings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colorings.is_empty()
    }

    /// Color of inner index `position` under coloring `index` (0-based).
    pub fn color(&self, index: usize, position: usize) -> Option<u32> {
        self.colorings.get(index)?.get(position).copied()
    }

    pub fn colorings(&self) -> &[Vec<u32>] {
        &self.colorings
    }
}

/// Number of distinct colorings available: `m_double_prime ^ m_prime`.
pub fn distinct_code_count(m_prime: u32, m_double_prime: u32) -> BigUint {
    BigUint::from(m_double_prime).pow(m_prime)
}

/// Draws `n_codes` colorings uniformly at random, rejecting duplicates when
/// `distinct` is set. Deterministic in `seed`.
pub fn build_coloring_code(
    m_prime: u32,
    m_double_prime: u32,
    n_codes: u64,
    distinct: bool,
    seed: u64,
) -> Result<ColoringCode> {
    if m_prime == 0 || m_double_prime == 0 {
        return Err(Error::InvalidArgument(
            "m_prime and m_double_prime must be at least 1".into(),
        ));
    }
    if n_codes == 0 {
        return Err(Error::InvalidArgument("n_codes must be at least 1".into()));
    }
    if distinct && BigUint::from(n_codes) > distinct_code_count(m_prime, m_double_prime) {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {n_codes} distinct colorings: only {} exist",
            distinct_code_count(m_prime, m_double_prime)
        )));
    }

    let mut colorings: Vec<Vec<u32>> = Vec::with_capacity(n_codes as usize);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut attempt = 0u64;
    while colorings.len() < n_codes as usize {
        let map: Vec<u32> = (0..m_prime)
            .map(|pos| (rng::draw_u64(seed, attempt, pos as u64) % m_double_prime as u64) as u32)
            .collect();
        attempt += 1;
        if distinct {
            if seen.insert(map.clone()) {
                colorings.push(map);
            }
        } else {
            colorings.push(map);
        }
    }
    Ok(ColoringCode {
        m_prime,
        m_double_prime,
        colorings,
    })
}

/// Fraction of inner indices on which colorings `i` and `j` agree — the
/// type-II confusability of the pair over an identity channel.
pub fn pairwise_overlap(code: &ColoringCode, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::InvalidArgument(
            "overlap of a coloring with itself is not defined".into(),
        ));
    }
    let n = code.len();
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "coloring index out of range: {i}, {j} with {n} colorings"
        )));
    }
    let (ci, cj) = (&code.colorings[i], &code.colorings[j]);
    let agree = ci.iter().zip(cj).filter(|(a, b)| a == b).count();
    Ok(agree as f64 / code.m_prime as f64)
}

/// Worst confusability over all unordered pairs.
pub fn max_pairwise_overlap(code: &ColoringCode) -> Result<f64> {
    let n = code.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 colorings for a pairwise statistic".into(),
        ));
    }
    let mut max = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max = max.max(pairwise_overlap(code, i, j)?);
        }
    }
    Ok(max)
}

/// Histogram of pairwise agreement counts: entry `k` is the number of
/// unordered pairs agreeing on exactly `k` inner indices.
pub fn overlap_histogram(code: &ColoringCode) -> Result<Vec<u64>> {
    let n = code.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "need at least 2 colorings for a pairwise statistic".into(),
        ));
    }
    let mut bins = vec![0u64; code.m_prime as usize + 1];
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (&code.colorings[i], &code.colorings[j]);
            let agree = ci.iter().zip(cj).filter(|(a, b)| a == b).count();
            bins[agree] += 1;
        }
    }
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_binary_triples() {
        // all 8 maps {1,2,3} -> {1,2} exist and are distinct
        let code = build_coloring_code(3, 2, 8, true, 1).unwrap();
        assert_eq!(code.len(), 8);
        let unique: HashSet<_> = code.colorings().iter().cloned().collect();
        assert_eq!(unique.len(), 8);

        // distinct binary triples differ somewhere, so max agreement is 2/3,
        // checked against plain brute force over all 28 pairs
        let mut brute = 0.0f64;
        let mut pairs = 0;
        for i in 0..8 {
            for j in (i + 1)..8 {
                brute = brute.max(pairwise_overlap(&code, i, j).unwrap());
                pairs += 1;
            }
        }
        assert_eq!(pairs, 28);
        assert_eq!(brute, 2.0 / 3.0);
        assert_eq!(max_pairwise_overlap(&code).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn single_map_universe() {
        let code = build_coloring_code(1, 1, 1, true, 9).unwrap();
        assert_eq!(code.len(), 1);
        assert_eq!(code.color(0, 0), Some(0));
        assert!(max_pairwise_overlap(&code).is_err());
    }

    #[test]
    fn distinct_count_is_a_hard_limit() {
        // only 4 maps {1,2} -> {1,2} exist
        assert!(build_coloring_code(2, 2, 5, true, 3).is_err());
        assert!(build_coloring_code(2, 2, 4, true, 3).is_ok());
        // without distinctness, repeats are allowed and overlap 1 is possible
        let code = build_coloring_code(1, 1, 2, false, 3).unwrap();
        assert_eq!(max_pairwise_overlap(&code).unwrap(), 1.0);
    }

    #[test]
    fn invalid_arguments() {
        assert!(build_coloring_code(0, 2, 1, true, 0).is_err());
        assert!(build_coloring_code(2, 0, 1, true, 0).is_err());
        assert!(build_coloring_code(2, 2, 0, true, 0).is_err());
        let code = build_coloring_code(3, 2, 4, true, 0).unwrap();
        assert!(pairwise_overlap(&code, 0, 0).is_err());
        assert!(pairwise_overlap(&code, 0, 7).is_err());
    }

    #[test]
    fn overlap_is_symmetric() {
        let code = build_coloring_code(16, 3, 40, true, 5).unwrap();
        for i in 0..code.len() {
            for j in (i + 1)..code.len() {
                assert_eq!(
                    pairwise_overlap(&code, i, j).unwrap(),
                    pairwise_overlap(&code, j, i).unwrap()
                );
            }
        }
    }

    #[test]
    fn expected_overlap_of_random_colorings_is_one_over_colors() {
        // per-position agreement of two fresh uniform colorings is a
        // Bernoulli(1/m'') event; aggregate counts over 10^4 pairs must sit
        // inside the exact binomial CI of p = 1/m''
        let m_prime = 8u32;
        let m_double = 4u32;
        let pairs = 10_000usize;
        let code = build_coloring_code(m_prime, m_double, 2 * pairs as u64, false, 77).unwrap();
        let mut agreements = 0u64;
        for p in 0..pairs {
            let a = &code.colorings()[2 * p];
            let b = &code.colorings()[2 * p + 1];
            agreements += a.iter().zip(b).filter(|(x, y)| x == y).count() as u64;
        }
        let total = (pairs as u64) * m_prime as u64;
        let est = crate::montecarlo::clopper_pearson(agreements, total, 0.99).unwrap();
        let p = 1.0 / m_double as f64;
        assert!(
            est.ci_lo <= p && p <= est.ci_hi,
            "1/m'' = {p} outside [{}, {}]",
            est.ci_lo,
            est.ci_hi
        );
    }

    #[test]
    fn histogram_counts_every_pair() {
        let code = build_coloring_code(3, 2, 8, true, 1).unwrap();
        let bins = overlap_histogram(&code).unwrap();
        assert_eq!(bins.iter().sum::<u64>(), 28);
        assert_eq!(bins[3], 0); // distinct maps never agree everywhere
    }

    #[test]
    fn code_count_grows_doubly_exponentially() {
        // with m_prime = 2^t and m_double_prime = 2^s the count is
        // 2^(s 2^t), so log2 log2 = t + log2(s) exactly
        for t in 0..=10u32 {
            let m_prime = 1u32 << t;
            for (m_double, s) in [(2u32, 1u32), (4, 2)] {
                let count = distinct_code_count(m_prime, m_double);
                let expected = BigUint::from(1u8) << (s as u64 * (1u64 << t));
                assert_eq!(count, expected);
                // bits() - 1 is the exact log2 for a power of two
                let log2 = count.bits() - 1;
                assert_eq!(log2, s as u64 * (1u64 << t));
                let log2log2 = 63 - log2.leading_zeros() as u64;
                assert_eq!(log2log2, t as u64 + (63 - (s as u64).leading_zeros() as u64));
            }
            // non-power-of-two color count: check the exact bit length
            // against floor(2^t log2 3)
            let count = distinct_code_count(m_prime, 3);
            let bits_minus_one = count.bits() - 1;
            let expected = ((1u64 << t) as f64 * 3f64.log2()).floor() as u64;
            assert_eq!(bits_minus_one, expected);
        }
    }

    #[test]
    fn construction_is_deterministic_in_seed() {
        let a = build_coloring_code(5, 3, 20, true, 123).unwrap();
        let b = build_coloring_code(5, 3, 20, true, 123).unwrap();
        assert_eq!(a, b);
        let c = build_coloring_code(5, 3, 20, true, 124).unwrap();
        assert_ne!(a, c);
    }
}
