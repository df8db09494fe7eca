use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqsieve::characters::CharacterTable;
use sqsieve::expsum::{exp_sum, weyl_bound, Interval, PolynomialPhase};
use sqsieve::rationals::{enumerate_set, torus_distance, FractionSet, Rational01, Threshold, TorusPoint};
use sqsieve::sieve::{cohen_selberg_ceiling, gram_lambda_max, PowerOptions, SieveInstance, Side};
use sqsieve::spacing::{neighbor_counts_bruteforce, neighbor_counts_sorted, spacing_count_bruteforce, spacing_count_fast, SpacingQuery};

fn point_set(raw: Vec<(u64, u64)>) -> Vec<Rational01> {
    let mut pts: Vec<Rational01> = raw.into_iter().map(|(a, d)| Rational01::new(a % d, d).unwrap()).collect();
    pts.sort_by(|x, y| (x.numer() as u128 * y.denom() as u128).cmp(&(y.numer() as u128 * x.denom() as u128)));
    pts.dedup();
    pts
}

fn sorted(mut pts: Vec<Rational01>) -> Vec<Rational01> {
    pts.sort_by(|x, y| (x.numer() as u128 * y.denom() as u128).cmp(&(y.numer() as u128 * x.denom() as u128)));
    pts
}

fn small_points() -> impl Strategy<Value = Vec<Rational01>> {
    prop::collection::vec((0u64..400, 1u64..400), 1..40).prop_map(point_set)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_a_metric(a in 0u64..1000, b in 1u64..1000, c in 0u64..1000, d in 1u64..1000, e in 0u64..1000, f in 1u64..1000) {
        let x = Rational01::new(a % b, b).unwrap();
        let y = Rational01::new(c % d, d).unwrap();
        let z = Rational01::new(e % f, f).unwrap();
        let xy = torus_distance(&x, &y);
        prop_assert_eq!(xy, torus_distance(&y, &x));
        prop_assert!(xy.to_f64() <= 0.5);
        prop_assert_eq!(xy.is_zero(), x == y);
        let lhs = xy.to_f64();
        let rhs = torus_distance(&x, &z).to_f64() + torus_distance(&z, &y).to_f64();
        prop_assert!(lhs <= rhs + 1e-15);
    }

    #[test]
    fn sorted_window_matches_brute_force(pts in small_points(), n in 1u64..200) {
        let t = Threshold::half_over(n);
        prop_assert_eq!(neighbor_counts_sorted(&pts, t), neighbor_counts_bruteforce(&pts, t));
    }

    #[test]
    fn half_turn_keeps_counts(pts in small_points(), n in 1u64..200) {
        let t = Threshold::half_over(n);
        let base = neighbor_counts_sorted(&pts, t);
        let half = Rational01::new(1, 2).unwrap();
        let turned = sorted(pts.iter().map(|x| x.rotate(&half).unwrap()).collect());
        let mut a = base.clone();
        let mut b = neighbor_counts_sorted(&turned, t);
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn spacing_monotone_in_n(q in 1u64..6, k in 2u32..4, n1 in 1u64..500, step in 0u64..500) {
        let small = spacing_count_fast(&SpacingQuery::new(q, k, n1).unwrap()).unwrap().count;
        let large = spacing_count_fast(&SpacingQuery::new(q, k, n1 + step).unwrap()).unwrap().count;
        prop_assert!(small >= large);
    }

    #[test]
    fn fast_equals_oracle_on_sets(q in 1u64..7, k in 2u32..4, n in 1u64..3000) {
        let query = SpacingQuery::new(q, k, n).unwrap();
        let fast = spacing_count_fast(&query).unwrap();
        let slow = spacing_count_bruteforce(&query).unwrap();
        prop_assert_eq!(fast.count, slow.count);
        prop_assert_eq!(fast.witness, slow.witness);
    }

    #[test]
    fn cache_round_trip(q in 1u64..8, k in 2u32..4) {
        let set = enumerate_set(q, k).unwrap();
        let mut buf = Vec::new();
        set.write_cache(&mut buf).unwrap();
        prop_assert_eq!(FractionSet::read_cache(buf.as_slice()).unwrap(), set);
    }

    #[test]
    fn weyl_bound_dominates(p in -60i64..60, den in 1i64..60, k in 2u32..4, start in -20i64..20, len in 1u64..40) {
        prop_assume!(p != 0);
        let phase = PolynomialPhase::monomial(Ratio::new(p, den), k).unwrap();
        let interval = Interval::new(start, len).unwrap();
        let s = exp_sum(&phase, interval).norm();
        let kappa = 1i32 << (k - 1);
        prop_assert!(s.powi(kappa) <= weyl_bound(&phase, interval).unwrap() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lambda_between_trivial_and_ceiling(pts in small_points(), n in 1u64..40, offset in -50i64..50) {
        let inst = SieveInstance::new(pts.clone(), offset, n).unwrap();
        let s = gram_lambda_max(&inst, Side::Points, PowerOptions::default()).unwrap();
        let trivial = (pts.len() as f64).max(n as f64);
        prop_assert!(s.lambda_max >= trivial * (1.0 - 1e-9));
        prop_assert!(s.lambda_max <= cohen_selberg_ceiling(&inst).unwrap() + 1e-6);
        prop_assert!(s.lambda_max <= (pts.len() as f64) * (n as f64) * (1.0 + 1e-9));
    }

    #[test]
    fn extra_point_never_lowers_lambda(pts in small_points(), extra in (0u64..500, 1u64..500), n in 1u64..30) {
        let x = Rational01::new(extra.0 % extra.1, extra.1).unwrap();
        prop_assume!(!pts.contains(&x));
        let opts = PowerOptions::default();
        let before = gram_lambda_max(&SieveInstance::new(pts.clone(), 0, n).unwrap(), Side::Frequencies, opts).unwrap();
        let mut more = pts;
        more.push(x);
        let after = gram_lambda_max(&SieveInstance::new(more, 0, n).unwrap(), Side::Frequencies, opts).unwrap();
        prop_assert!(after.lambda_max >= before.lambda_max * (1.0 - 1e-8));
    }
}

#[test]
fn characters_multiply_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (q, k) in [(3, 2), (4, 2), (5, 2), (6, 2), (7, 2), (2, 5), (3, 3), (10, 2)] {
        let table = CharacterTable::new(q, k).unwrap();
        let m = table.modulus();
        let mut pairs = 0;
        while pairs < 1000 {
            let a = rng.gen_range(1..m);
            let b = rng.gen_range(1..m);
            if num_integer::gcd(a, m) != 1 || num_integer::gcd(b, m) != 1 {
                continue;
            }
            pairs += 1;
            let chi = rng.gen_range(0..table.len());
            let lhs: Complex64 = table.value(chi, a * b % m);
            assert!((lhs - table.value(chi, a) * table.value(chi, b)).norm() < 1e-12);
        }
    }
}
