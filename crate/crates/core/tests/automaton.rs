use betagrowth::expansions::count_prefixes;
use betagrowth::lyapunov::{estimate_gamma_mc, parry_chain};
use betagrowth::netautomaton::{multiplicity_direct, net_intervals, Automaton, DEFAULT_STATE_CAP};
use betagrowth::{parse_beta, Error, Exec};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

#[test]
fn level_counts_match_direct_multiplicities() {
    for spec in ["golden", "multinacci:3"] {
        let sys = parse_beta(spec, 2).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        for n in 0..=6 {
            let nets = net_intervals(&sys, n).unwrap();
            let counts = a.level_counts(n, Exec::Sequential);
            assert_eq!(nets.len(), counts.len(), "{spec} n={n}");
            for (d, c) in nets.iter().zip(&counts) {
                assert_eq!(BigUint::from(multiplicity_direct(&sys, d).unwrap()), *c, "{spec} n={n}");
            }
        }
    }
}

#[test]
fn rebuild_is_identical() {
    let sys = parse_beta("multinacci:4", 2).unwrap();
    let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
    let b = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
    assert_eq!(format!("{:?}", a.to_json()), format!("{:?}", b.to_json()));
    assert_eq!(a.to_dot(), b.to_dot());
}

#[test]
fn parry_rows_are_stochastic() {
    for n in 2..=6 {
        let sys = parse_beta(&format!("multinacci:{n}"), 2).unwrap();
        let chain = parry_chain(&Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap()).unwrap();
        assert!(chain.row_sum_error() < 1e-14, "n={n}");
        assert!(chain.stationarity_error() < 1e-12, "n={n}");
        assert!(chain.p.iter().all(|&p| p > 0.0));
    }
}

#[test]
fn mc_is_reproducible_across_executors() {
    let sys = parse_beta("golden", 2).unwrap();
    let chain = parry_chain(&Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap()).unwrap();
    let a = estimate_gamma_mc(&chain, 5000, 6, 9, Exec::Sequential).unwrap();
    let b = estimate_gamma_mc(&chain, 5000, 6, 9, Exec::Parallel).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrices_equal_prefix_counts(num in 1u64..(1 << 20), spec in prop::sample::select(vec!["golden", "multinacci:3"])) {
        let sys = parse_beta(spec, 2).unwrap();
        let a = Automaton::build(&sys, DEFAULT_STATE_CAP).unwrap();
        let z = sys.rational(BigRational::new(BigInt::from(num), BigInt::from(1u64 << 20)));
        let word = match a.coding_of_point(&z, 9) {
            Ok(w) => w,
            Err(Error::PartitionPoint(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let x = sys.field().mul(&z, sys.right_end());
        for n in 0..=9 {
            prop_assert_eq!(a.count_via_matrices(&word[..=n]).unwrap(), count_prefixes(&sys, &x, n).unwrap());
        }
    }
}
