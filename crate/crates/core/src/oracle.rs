//! Trial-division ground truth.

use serde::{Deserialize, Serialize};

use crate::divisor::ComponentTriple;

/// Sorted divisors of `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorList {
    pub s: u64,
    pub divisors: Vec<u64>,
}

/// Exact `⌊√n⌋`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

pub fn is_perfect_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

pub fn divisors(s: u64) -> DivisorList {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= s {
        if s.is_multiple_of(d) {
            small.push(d);
            if d * d != s {
                large.push(s / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    DivisorList { s, divisors: small }
}

pub fn sigma0(s: u64) -> u64 {
    divisors(s).divisors.len() as u64
}

pub fn is_prime_trial(s: u64) -> bool {
    sigma0(s) == 2
}

/// Zero counts the contours should report: simple zeros at divisors below
/// `√s` for `L−`, the double zero at `√s` for `Lc`.
pub fn predicted_components(s: u64) -> ComponentTriple {
    let tau_minus = divisors(s).divisors.iter().filter(|&&d| d * d < s).count() as u64;
    let tau_center = if is_perfect_square(s) { 2 } else { 0 };
    ComponentTriple {
        tau_minus,
        tau_center,
        tau_plus: tau_minus + tau_center,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(divisors(12).divisors, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1).divisors, vec![1]);
        assert_eq!(divisors(97).divisors, vec![1, 97]);
        assert_eq!(sigma0(12), 6);
        assert_eq!(sigma0(16), 5);
        assert_eq!(sigma0(2), 2);
        assert!(is_prime_trial(7));
        assert!(!is_prime_trial(9));
        assert!(!is_prime_trial(1));
    }

    #[test]
    fn components() {
        let t = |m, c, p| ComponentTriple {
            tau_minus: m,
            tau_center: c,
            tau_plus: p,
        };
        assert_eq!(predicted_components(36), t(4, 2, 6));
        assert_eq!(predicted_components(7), t(1, 0, 1));
        assert_eq!(predicted_components(1), t(0, 2, 2));
        assert_eq!(predicted_components(100), t(4, 2, 6));
    }

    #[test]
    fn isqrt_edges() {
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
        assert!(is_perfect_square(10_000));
        assert!(!is_perfect_square(9_999));
    }

    proptest! {
        #[test]
        fn divisor_list_invariants(s in 1u64..200_000) {
            let list = divisors(s).divisors;
            prop_assert_eq!(list[0], 1);
            prop_assert_eq!(*list.last().unwrap(), s);
            prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
            for &d in &list {
                prop_assert_eq!(d * (s / d), s);
            }
            let brute = (1..=s.min(5_000)).filter(|d| s % d == 0).count();
            if s <= 5_000 {
                prop_assert_eq!(list.len(), brute);
            }
        }

        #[test]
        fn symmetry_of_components(s in 1u64..200_000) {
            let t = predicted_components(s);
            prop_assert_eq!(2 * t.tau_minus + t.tau_center / 2, sigma0(s));
            prop_assert_eq!(t.tau_plus, t.tau_minus + t.tau_center);
        }
    }
}
