use std::cmp::Ordering;

use betagrowth::expansions::{branch_tree, count_prefixes, prefix_counts, simulate_k_beta};
use betagrowth::numberfield::parse_rational;
use betagrowth::{parse_beta, BetaSystem, Exec, FieldElement};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

/// Counts words of length n with 0 ≤ x − Sₙ ≤ Rβ⁻ⁿ by full enumeration.
fn brute_count(sys: &BetaSystem, x: &FieldElement, n: usize) -> u64 {
    let f = sys.field();
    let tol = f.mul(sys.right_end(), &f.beta_pow(-(n as i64)));
    let m = sys.m() as u64;
    let mut total = 0;
    for code in 0..m.pow(n as u32) {
        let mut c = code;
        let mut s = f.zero();
        for k in 1..=n {
            let d = (c % m) as i64;
            c /= m;
            s = &s + &f.beta_pow(-(k as i64)).scale_int(d);
        }
        let gap = x - &s;
        if sys.sign(&gap) != Ordering::Less && sys.cmp(&gap, &tol) != Ordering::Greater {
            total += 1;
        }
    }
    total
}

fn point(sys: &BetaSystem, num: u64, den: u64) -> FieldElement {
    let z = BigRational::new(BigInt::from(num), BigInt::from(den));
    sys.field().mul(&sys.rational(z), sys.right_end())
}

#[test]
fn dp_matches_enumeration_on_fixed_cases() {
    for (spec, m) in [("golden", 2), ("multinacci:3", 2), ("3/2", 2), ("poly:-1,-1,0,1", 2), ("golden", 3)] {
        let sys = parse_beta(spec, m).unwrap();
        for (a, b) in [(1, 3), (2, 7), (5, 9)] {
            let x = point(&sys, a, b);
            let counts = prefix_counts(&sys, &x, 9, Exec::Sequential).unwrap();
            for (n, c) in counts.iter().enumerate() {
                assert_eq!(*c, BigUint::from(brute_count(&sys, &x, n)), "{spec} m={m} x={a}/{b} n={n}");
            }
        }
    }
}

#[test]
fn golden_example_counts() {
    let sys = parse_beta("golden", 2).unwrap();
    let one = sys.rational(parse_rational("1").unwrap());
    assert_eq!(count_prefixes(&sys, &one, 2).unwrap(), BigUint::from(3u32));
    let zero = sys.field().zero();
    assert_eq!(count_prefixes(&sys, &zero, 12).unwrap(), BigUint::from(1u32));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_are_monotone(num in 1u64..1000, spec in prop::sample::select(vec!["golden", "13/10", "multinacci:3"])) {
        let sys = parse_beta(spec, 2).unwrap();
        let x = point(&sys, num, 1000);
        let c = prefix_counts(&sys, &x, 14, Exec::Sequential).unwrap();
        prop_assert!(c.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn tree_leaves_equal_dp(num in 0u64..=500, depth in 0usize..10) {
        let sys = parse_beta("golden", 2).unwrap();
        let x = point(&sys, num, 500);
        let t = branch_tree(&sys, &x, depth, 1 << 16).unwrap();
        let dp = count_prefixes(&sys, &x, depth).unwrap();
        prop_assert_eq!(BigUint::from(t.nodes_at_depth(depth)), dp);
        for leaf in t.leaves() {
            prop_assert_eq!(t.word(leaf).len(), depth);
        }
    }

    #[test]
    fn parallel_and_sequential_agree(num in 1u64..100) {
        let sys = parse_beta("7/5", 2).unwrap();
        let x = point(&sys, num, 100);
        let a = prefix_counts(&sys, &x, 16, Exec::Sequential).unwrap();
        let b = prefix_counts(&sys, &x, 16, Exec::Parallel).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn simulated_digits_expand_x(num in 1u64..200, seed in any::<u64>()) {
        let sys = parse_beta("golden", 2).unwrap();
        let x = point(&sys, num, 200);
        let s = simulate_k_beta(&sys, &x, 30, seed).unwrap();
        prop_assert!(s.residual <= s.tolerance * (1.0 + 1e-9));
        prop_assert!(s.digits.iter().all(|&d| d < 2));
    }
}
