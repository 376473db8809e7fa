//! Ground-truth subset-sum counters: exhaustive enumeration and
//! pseudo-polynomial dynamic programming.
//!
//! These are the reference answers every signal-path module is tested
//! against. Both treat G as a multiset: duplicate elements give distinct
//! subsets, matching the machine where two memprocessors at the same
//! frequency both contribute.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::problem::SubsetSumInstance;

/// Enumeration is capped here; 2^25 subsets is already ~3e7 iterations.
pub const BRUTE_FORCE_MAX_N: usize = 25;
/// Above 63 elements the total subset count 2^n no longer fits in u64.
pub const EXACT_COUNT_MAX_N: usize = 63;

/// Counts of non-empty subsets per achievable sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    counts: BTreeMap<i64, u64>,
    n: usize,
}

impl CountTable {
    /// Number of non-empty subsets of G summing to `s`.
    pub fn count(&self, s: i64) -> u64 {
        self.counts.get(&s).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Achievable sums and their counts, in ascending sum order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    /// Sum of all counts; equals 2^n - 1 by construction.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Exhaustive-enumeration table, one 2^n pass. Independent of the DP
    /// recurrence; exists so tests can sweep every sum without re-enumerating
    /// per query.
    pub fn by_enumeration(instance: &SubsetSumInstance) -> Result<Self> {
        let n = instance.n();
        if n > BRUTE_FORCE_MAX_N {
            return Err(Error::BruteForceTooLarge {
                n,
                max: BRUTE_FORCE_MAX_N,
            });
        }
        let elements = instance.elements();
        let mut counts = BTreeMap::new();
        for mask in 1u64..(1u64 << n) {
            let mut sum: i64 = 0;
            let mut bits = mask;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                sum += elements[j];
                bits &= bits - 1;
            }
            *counts.entry(sum).or_insert(0) += 1;
        }
        Ok(Self { counts, n })
    }
}

/// Exact count of non-empty subsets summing to `s` by enumerating all 2^n - 1
/// candidates. Refuses instances with more than [`BRUTE_FORCE_MAX_N`]
/// elements.
pub fn count_subsets_bruteforce(instance: &SubsetSumInstance, s: i64) -> Result<u64> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::BruteForceTooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let elements = instance.elements();
    let mut count = 0;
    for mask in 1u64..(1u64 << n) {
        let mut sum: i64 = 0;
        let mut bits = mask;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            sum += elements[j];
            bits &= bits - 1;
        }
        if sum == s {
            count += 1;
        }
    }
    Ok(count)
}

/// Coefficients of the product `prod_j (1 + x^(a_j))` on the index range
/// `[-neg_extent, pos_extent]`, stored at offset `f + neg_extent`.
///
/// Entry `f` is the number of subsets (including the empty one at f = 0)
/// summing to `f`. O(n*A) time, O(A) space; this is the standard
/// pseudo-polynomial counting recurrence.
pub(crate) fn subset_count_coefficients(instance: &SubsetSumInstance) -> Result<Vec<u64>> {
    let n = instance.n();
    if n > EXACT_COUNT_MAX_N {
        return Err(Error::TooManyElements {
            n,
            max: EXACT_COUNT_MAX_N,
        });
    }
    let mut counts: Vec<u64> = vec![1];
    let mut neg: i64 = 0;
    let mut pos: i64 = 0;
    for &a in instance.elements() {
        let (new_neg, new_pos) = if a < 0 {
            (neg - a, pos)
        } else {
            (neg, pos + a)
        };
        let mut next = vec![0u64; (new_neg + new_pos + 1) as usize];
        for f in -neg..=pos {
            let c = counts[(f + neg) as usize];
            if c != 0 {
                next[(f + new_neg) as usize] += c;
                next[(f + a + new_neg) as usize] += c;
            }
        }
        counts = next;
        neg = new_neg;
        pos = new_pos;
    }
    debug_assert_eq!(neg as u64, instance.neg_extent());
    debug_assert_eq!(pos as u64, instance.pos_extent());
    Ok(counts)
}

/// Count of non-empty subsets summing to `s` via the O(n*A) convolution
/// recurrence. Equals brute force on every input; supports up to
/// [`EXACT_COUNT_MAX_N`] elements.
pub fn count_subsets_dp(instance: &SubsetSumInstance, s: i64) -> Result<u64> {
    let coeffs = subset_count_coefficients(instance)?;
    let neg = instance.neg_extent() as i64;
    let pos = instance.pos_extent() as i64;
    if s < -neg || s > pos {
        return Ok(0);
    }
    let mut c = coeffs[(s + neg) as usize];
    if s == 0 {
        c -= 1; // drop the empty set
    }
    Ok(c)
}

/// Counts for every achievable sum in one DP pass.
pub fn full_count_table(instance: &SubsetSumInstance) -> Result<CountTable> {
    let coeffs = subset_count_coefficients(instance)?;
    let neg = instance.neg_extent() as i64;
    let mut counts = BTreeMap::new();
    for (idx, &c) in coeffs.iter().enumerate() {
        let s = idx as i64 - neg;
        let c = if s == 0 { c - 1 } else { c };
        if c != 0 {
            counts.insert(s, c);
        }
    }
    Ok(CountTable {
        counts,
        n: instance.n(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_set() -> SubsetSumInstance {
        SubsetSumInstance::new(vec![130, -130, -146, -166, -44, 118]).unwrap()
    }

    #[test]
    fn bench_set_zero_sum() {
        assert_eq!(count_subsets_bruteforce(&table_set(), 0).unwrap(), 1);
    }

    #[test]
    fn bench_set_minus_146() {
        assert_eq!(count_subsets_bruteforce(&table_set(), -146).unwrap(), 2);
    }

    #[test]
    fn unreachable_sum_counts_zero() {
        let g = SubsetSumInstance::new(vec![1]).unwrap();
        assert_eq!(count_subsets_bruteforce(&g, 2).unwrap(), 0);
    }

    #[test]
    fn dp_bench_set_248() {
        assert_eq!(count_subsets_dp(&table_set(), 248).unwrap(), 1);
    }

    #[test]
    fn dp_counts_duplicates_separately() {
        let g = SubsetSumInstance::new(vec![2, 2]).unwrap();
        assert_eq!(count_subsets_dp(&g, 2).unwrap(), 2);
        assert_eq!(count_subsets_dp(&g, 4).unwrap(), 1);
    }

    #[test]
    fn table_of_one_two() {
        let g = SubsetSumInstance::new(vec![1, 2]).unwrap();
        let table = full_count_table(&g).unwrap();
        let entries: Vec<_> = table.iter().collect();
        assert_eq!(entries, vec![(1, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn bench_set_matches_all_probed_rows() {
        let table = full_count_table(&table_set()).unwrap();
        let expected = [
            (0i64, 1u64),
            (74, 2),
            (-74, 0),
            (130, 1),
            (-130, 1),
            (146, 0),
            (-146, 2),
            (248, 1),
            (-248, 0),
            (485, 0),
            (-485, 0),
            (486, 0),
            (-486, 1),
        ];
        for (s, c) in expected {
            assert_eq!(table.count(s), c, "sum {s}");
        }
    }

    #[test]
    fn table_total_is_all_nonempty_subsets() {
        let table = full_count_table(&table_set()).unwrap();
        assert_eq!(table.total(), (1 << 6) - 1);
    }

    #[test]
    fn enumeration_table_matches_dp() {
        let g = table_set();
        let dp = full_count_table(&g).unwrap();
        let brute = CountTable::by_enumeration(&g).unwrap();
        assert_eq!(dp, brute);
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let g = SubsetSumInstance::new(vec![1; 26]).unwrap();
        assert!(matches!(
            count_subsets_bruteforce(&g, 1),
            Err(Error::BruteForceTooLarge { n: 26, .. })
        ));
    }

    #[test]
    fn dp_refuses_past_count_overflow_bound() {
        let g = SubsetSumInstance::new(vec![1; 64]).unwrap();
        assert!(matches!(
            count_subsets_dp(&g, 1),
            Err(Error::TooManyElements { n: 64, .. })
        ));
    }

    proptest! {
        #[test]
        fn dp_equals_brute_force(elements in prop::collection::vec(
            (1i64..=200).prop_flat_map(|m| prop_oneof![Just(m), Just(-m)]), 1..=12)
        ) {
            let g = SubsetSumInstance::new(elements).unwrap();
            let brute = CountTable::by_enumeration(&g).unwrap();
            let dp = full_count_table(&g).unwrap();
            prop_assert_eq!(&dp, &brute);
            // spot-check the per-query forms too
            let probe = [-3i64, 0, 1, 7, 50];
            for s in probe {
                prop_assert_eq!(
                    count_subsets_dp(&g, s).unwrap(),
                    count_subsets_bruteforce(&g, s).unwrap()
                );
            }
        }

        #[test]
        fn sign_symmetry(elements in prop::collection::vec(
            (1i64..=100).prop_flat_map(|m| prop_oneof![Just(m), Just(-m)]), 1..=10)
        ) {
            let g = SubsetSumInstance::new(elements.clone()).unwrap();
            let neg = SubsetSumInstance::new(elements.iter().map(|&a| -a).collect()).unwrap();
            let table = full_count_table(&g).unwrap();
            for (s, c) in table.iter() {
                prop_assert_eq!(count_subsets_dp(&neg, -s).unwrap(), c);
            }
        }

        #[test]
        fn table_sum_rule(elements in prop::collection::vec(
            (1i64..=50).prop_flat_map(|m| prop_oneof![Just(m), Just(-m)]), 1..=10)
        ) {
            let g = SubsetSumInstance::new(elements).unwrap();
            let table = full_count_table(&g).unwrap();
            prop_assert_eq!(table.total(), (1u64 << g.n()) - 1);
        }
    }
}
