//! Cross-module invariants, mostly property-based.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;

use permsum_core::dist::{
    exact_distribution_dp, exact_distribution_enum, exact_variance, ExactDistribution,
};
use permsum_core::energy::{kappa_bruteforce, kappa_convolution, CoefficientTuple, EnergyBudget};
use permsum_core::multiset::{decompose, staircase, WeightedMultiset};
use permsum_core::rational::{rational_from_i64, rational_from_u64, Rational};

fn ms_from_i64(vals: &[i64]) -> WeightedMultiset {
    let v: Vec<Rational> = vals.iter().map(|&x| rational_from_i64(x)).collect();
    WeightedMultiset::from_values(&v).unwrap()
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn arb_pair(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = (WeightedMultiset, WeightedMultiset)> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            prop::collection::vec(lo..=hi, n),
            prop::collection::vec(lo..=hi, n),
        )
            .prop_map(|(a, b)| (ms_from_i64(&a), ms_from_i64(&b)))
    })
}

fn arb_partition() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=6, 1..=6).prop_map(|mut parts| {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_parts_sum_to_n((a, _b) in arb_pair(9, -9, 9)) {
        let p = a.multiplicity_profile();
        prop_assert_eq!(p.parts().iter().sum::<u64>(), a.size());
        prop_assert_eq!(p.diversity().is_zero(), a.distinct_count() == 1);
    }

    #[test]
    fn staircase_profile_is_identity(lambda in arb_partition()) {
        let s = staircase(&lambda).unwrap();
        let profile = s.multiplicity_profile();
        prop_assert_eq!(profile.parts(), lambda.as_slice());
    }

    #[test]
    fn engines_agree_atom_for_atom((a, b) in arb_pair(6, -6, 6)) {
        let e = exact_distribution_enum(&a, &b, 11).unwrap();
        let d = exact_distribution_dp(&a, &b, 16, 1 << 22).unwrap();
        prop_assert_eq!(&e, &d);
        // total is n! and Q sits between 1/n! and 1, and above 1/support
        let n = a.size();
        prop_assert_eq!(e.total(), &factorial(n));
        let q = e.max_point_mass();
        let n_fact = Rational::new(BigInt::one(), BigInt::from(factorial(n)));
        prop_assert!(q.q >= n_fact);
        prop_assert!(q.q <= Rational::one());
        prop_assert!(q.q >= Rational::new(BigInt::one(), BigInt::from(e.support_size())));
    }

    #[test]
    fn roles_of_a_and_b_are_exchangeable((a, b) in arb_pair(6, -6, 6)) {
        let ab = exact_distribution_dp(&a, &b, 16, 1 << 22).unwrap();
        let ba = exact_distribution_dp(&b, &a, 16, 1 << 22).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn law_is_affine_covariant(
        (a, b) in arb_pair(5, -5, 5),
        s in prop::sample::select(vec![2i64, -1, 3]),
        t in -3i64..=3,
    ) {
        // the law of sum (s*a_i + t) b_{pi(i)} is the pushforward of the law
        // under v -> s*v + t*sum(B); Q is invariant
        let sr = rational_from_i64(s);
        let tr = rational_from_i64(t);
        let transformed = WeightedMultiset::from_values(
            &a.expanded().iter().map(|v| v * &sr + &tr).collect::<Vec<_>>(),
        )
        .unwrap();
        let base = exact_distribution_enum(&a, &b, 11).unwrap();
        let moved = exact_distribution_enum(&transformed, &b, 11).unwrap();
        let shift = &tr * b.sum();
        let pushed = base.map_values(|v| v * &sr + &shift).unwrap();
        prop_assert_eq!(&moved, &pushed);
        prop_assert_eq!(moved.max_point_mass().q, base.max_point_mass().q);
    }

    #[test]
    fn variance_identity_matches_enumeration((a, b) in arb_pair(6, -6, 6)) {
        prop_assume!(a.size() >= 2);
        let d = exact_distribution_enum(&a, &b, 11).unwrap();
        prop_assert_eq!(d.variance(), exact_variance(&a, &b).unwrap());
    }

    #[test]
    fn decompose_certificate_is_valid(vals in prop::collection::vec(-50i64..=50, 3..=60)) {
        let a = ms_from_i64(&vals);
        prop_assume!(a.distinct_count() >= 2);
        let d = decompose(&a).unwrap();
        prop_assert!(d.r >= 2);
        prop_assert_eq!(d.witness.len(), d.r as usize);
        prop_assert_eq!(d.chosen_index, d.r);
        // witness values are distinct entries of A with multiplicity >= m
        for w in &d.witness {
            let mult = a.entries().iter().find(|(v, _)| v == w).map(|(_, m)| *m);
            prop_assert!(mult.is_some_and(|m| m >= d.m));
        }
        // m * r^3 * ln n >= M, decided exactly
        let factor = Rational::from_integer(BigInt::from(d.m) * BigInt::from(d.r).pow(3));
        let m_stat = Rational::from_integer(BigInt::from(a.diversity()));
        prop_assert!(permsum_core::rational::ln_product_at_least(&factor, a.size(), &m_stat, 25));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kappa_orderings_hold(
        (a, b) in arb_pair(5, -4, 4),
        c_entries in prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -2]), 2..=3),
    ) {
        prop_assume!(a.size() >= 2 && b.size() >= 2);
        let budget = EnergyBudget::default();
        let c = CoefficientTuple::new(c_entries).unwrap();
        let base = CoefficientTuple::new(vec![1, -1]).unwrap();
        let k_c = kappa_convolution(&a, &b, &c, &budget).unwrap();
        let k_base = kappa_convolution(&a, &b, &base, &budget).unwrap();
        prop_assert!(k_c.kappa <= k_base.kappa);
    }

    #[test]
    fn convolution_matches_bruteforce(
        (a, b) in arb_pair(4, -3, 3),
        c_entries in prop::collection::vec(prop::sample::select(vec![1i64, -1, 2, -2]), 2..=3),
    ) {
        let budget = EnergyBudget {
            max_brute_iterations: 100_000_000,
            max_convolution_atoms: 10_000_000,
        };
        let c = CoefficientTuple::new(c_entries).unwrap();
        let conv = kappa_convolution(&a, &b, &c, &budget).unwrap();
        let brute = kappa_bruteforce(&a, &b, &c, false, &budget).unwrap();
        prop_assert_eq!(conv.kappa, brute.kappa);
        prop_assert_eq!(conv.raw_count, brute.raw_count);
    }
}

#[test]
fn grid8_engines_agree_exactly() {
    let g = permsum_core::multiset::uniform_grid(8).unwrap();
    let e = exact_distribution_enum(&g, &g, 11).unwrap();
    let d = exact_distribution_dp(&g, &g, 16, 1 << 24).unwrap();
    assert_eq!(e, d);
    assert_eq!(e.total(), &factorial(8));
}

#[test]
fn generic_large_values_are_injective() {
    // pseudo-random 40-bit values carry no additive structure: all n! sums
    // come out distinct, so Q = 1/n!
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    for n in [5u64, 6] {
        let a_vals: Vec<i64> = (0..n).map(|k| (mix(k + 1) & ((1 << 40) - 1)) as i64).collect();
        let b_vals: Vec<i64> = (0..n).map(|k| (mix(k + 99) & ((1 << 40) - 1)) as i64).collect();
        let a = ms_from_i64(&a_vals);
        let b = ms_from_i64(&b_vals);
        let d = exact_distribution_enum(&a, &b, 11).unwrap();
        assert_eq!(BigUint::from(d.support_size()), factorial(n));
        assert_eq!(
            d.max_point_mass().q,
            Rational::new(BigInt::one(), BigInt::from(factorial(n)))
        );
    }
}

#[test]
fn tightness_direction_across_staircase_sweep() {
    // Q >= (1/4) sqrt(n) / sqrt(M(A)M(B)) for every staircase pair lambda=mu
    // with repeats allowed, checked as Q^2 >= n/(16 M^2) in exact arithmetic.
    let sixteenth = Rational::new(BigInt::one(), BigInt::from(16));
    for n in 6u64..=12 {
        for lambda in partitions_of(n) {
            if lambda.len() < 2 {
                continue;
            }
            let s = staircase(&lambda).unwrap();
            let q = exact_distribution_dp(&s, &s, 16, 1 << 26)
                .unwrap()
                .max_point_mass()
                .q;
            let m = Rational::from_integer(BigInt::from(s.diversity()));
            let rhs = &sixteenth * rational_from_u64(n) / (&m * &m);
            assert!(
                &q * &q >= rhs,
                "tightness fails at n={n} lambda={lambda:?}: q={q}"
            );
        }
    }
}

#[test]
fn distribution_json_reparses_for_sampled_laws() {
    let a = ms_from_i64(&[1, 2, 3, 4]);
    let cfg = permsum_core::sampler::SampleConfig {
        seed: 1,
        samples: 5_000,
        workers: 2,
    };
    let d = permsum_core::sampler::sample_distribution(&a, &a, &cfg).unwrap();
    let text = d.to_json();
    assert_eq!(ExactDistribution::from_json(&text).unwrap(), d);
}

fn partitions_of(n: u64) -> Vec<Vec<u64>> {
    fn rec(n: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            cur.push(part);
            rec(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
