use pclab_core::arith::{
    gcd, is_prime, jacobi_symbol, mod_inverse, pow_mod, primes_up_to, squarefree_part, Symbol,
};
use pclab_core::ptable::{build_table, oracle_partitions, parse_table, table_to_bytes};
use pclab_core::qseries::{apply_u, apply_v, first_mismatch};
use pclab_core::EtaSeries;
use proptest::prelude::*;
use proptest::sample::{select, subsequence};

const ELLS: [u64; 8] = [5, 7, 11, 13, 17, 19, 23, 31];
const QS: [u64; 8] = [5, 7, 11, 13, 25, 35, 49, 121];

prop_compose! {
    fn series()(
        ell in select(&ELLS[..]),
        n_max in 1u64..3000,
        support in subsequence((0u8..24).collect::<Vec<_>>(), 1..6),
        seed in any::<u64>(),
    ) -> EtaSeries {
        EtaSeries::from_fn(ell, n_max, &support, |n| {
            let x = seed ^ n.wrapping_mul(0x9e37_79b9_7f4a_7c15);
            (x >> 17) ^ (x >> 41)
        })
        .unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn u_undoes_v(f in series(), q in select(&QS[..])) {
        let v = apply_v(&f, q).unwrap();
        let back = apply_u(&v, q).unwrap();
        prop_assert_eq!(back.n_max(), f.n_max());
        prop_assert_eq!(back.support(), f.support());
        prop_assert_eq!(first_mismatch(&back, &f, f.n_max()).unwrap(), None);
        prop_assert_eq!(back.weight_lambda(), f.weight_lambda());
    }

    #[test]
    fn operators_keep_support_discipline(f in series(), q in select(&QS[..])) {
        prop_assert!(f.support_discipline_holds());
        let u = apply_u(&f, q).unwrap();
        let v = apply_v(&f, q).unwrap();
        prop_assert!(u.support_discipline_holds());
        prop_assert!(v.support_discipline_holds());
        for (n, c) in v.iter_nonzero() {
            prop_assert_eq!(n % q, 0);
            prop_assert_eq!(c, f.get(n / q));
        }
        for (n, c) in u.iter_nonzero() {
            prop_assert_eq!(c, f.get(q * n));
        }
        let mut u_support: Vec<u8> = f.support().iter().map(|&r| ((r as u64 * q) % 24) as u8).collect();
        u_support.sort_unstable();
        u_support.dedup();
        prop_assert_eq!(u.support(), u_support.clone());
        prop_assert_eq!(v.support(), u_support);
    }

    #[test]
    fn u_operators_compose(f in series(), q in select(&QS[..4]), r in select(&QS[..4])) {
        let a = apply_u(&apply_u(&f, q).unwrap(), r).unwrap();
        let b = apply_u(&f, q * r).unwrap();
        prop_assert_eq!(a.n_max(), b.n_max());
        prop_assert_eq!(first_mismatch(&a, &b, a.n_max()).unwrap(), None);
    }

    #[test]
    fn jacobi_is_multiplicative(a in -100_000i64..100_000, b in -100_000i64..100_000, k in 0u64..50_000) {
        let n = 2 * k + 1;
        let ab = jacobi_symbol(a * b, n).unwrap();
        prop_assert_eq!(ab, jacobi_symbol(a, n).unwrap() * jacobi_symbol(b, n).unwrap());
    }

    #[test]
    fn jacobi_is_multiplicative_in_the_modulus(a in -100_000i64..100_000, j in 0u64..3000, k in 0u64..3000) {
        let (m, n) = (2 * j + 1, 2 * k + 1);
        prop_assert_eq!(
            jacobi_symbol(a, m * n).unwrap(),
            jacobi_symbol(a, m).unwrap() * jacobi_symbol(a, n).unwrap()
        );
    }

    #[test]
    fn inverse_round_trip(a in -1_000_000i64..1_000_000, m in 2u64..1_000_000) {
        match mod_inverse(a, m) {
            Ok(x) => {
                prop_assert!(x < m);
                prop_assert_eq!((a.rem_euclid(m as i64) as u128 * x as u128 % m as u128) as u64, 1);
            }
            Err(_) => prop_assert_ne!(gcd(a.unsigned_abs(), m), 1),
        }
    }

    #[test]
    fn squarefree_part_recovers(n in 1u64..10_000_000) {
        let (t, m) = squarefree_part(n).unwrap();
        prop_assert_eq!(t * m * m, n);
        for p in primes_up_to(3000) {
            if p * p > t { break; }
            prop_assert_ne!(t % (p * p), 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn euler_criterion(idx in 0usize..1227, a in any::<i64>()) {
        let primes: Vec<u64> = primes_up_to(10_000).into_iter().filter(|&p| p > 2).collect();
        let p = primes[idx % primes.len()];
        let r = a.rem_euclid(p as i64) as u64;
        let expected = match pow_mod(r, (p - 1) / 2, p) {
            0 => Symbol::Zero,
            1 => Symbol::PlusOne,
            _ => Symbol::MinusOne,
        };
        prop_assert_eq!(jacobi_symbol(a, p).unwrap(), expected);
    }

    #[test]
    fn tables_match_oracle_and_round_trip(ell in select(&[5u64, 7, 11, 13, 17, 257, 65521][..]), n_max in 0u64..600) {
        let t = build_table(ell, n_max).unwrap();
        let oracle = oracle_partitions(n_max).unwrap();
        for (n, p) in oracle.iter().enumerate() {
            let expected = (p % ell).to_u64_digits().first().copied().unwrap_or(0);
            prop_assert_eq!(t.get(n as u64).unwrap() as u64, expected);
        }
        let back = parse_table(&table_to_bytes(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn corrupted_payload_is_rejected(n_max in 200u64..2000, pos in any::<prop::sample::Index>(), flip in 1u8..=255) {
        let t = build_table(13, n_max).unwrap();
        let mut bytes = table_to_bytes(&t);
        let payload = 25..bytes.len() - 8;
        let i = payload.start + pos.index(payload.len());
        bytes[i] ^= flip;
        prop_assert!(parse_table(&bytes).is_err());
    }
}

#[test]
fn prime_list_sanity() {
    assert!(primes_up_to(10_000).iter().all(|&p| is_prime(p)));
}
