use super::{EtaSeries, SeriesError};
use crate::arith::{gcd, jacobi_odd, Symbol};
use crate::ptable::PartitionTable;
use crate::Delta;

/// Largest index a `V_Q` image keeps unless a cap is given explicitly.
pub const DEFAULT_V_CAP: u64 = 10_000_000;

/// `f_{ell,delta} = sum_{(-n/ell) = delta} p((n+1)/24) q^(n/24)  (mod ell)`.
///
/// Only `n = 23 (mod 24)` can carry a coefficient. The result records the
/// half-integral weight `lambda + 1/2` of the form as `lambda` and its
/// multiplier exponent `r = -1`.
pub fn build_f_series(
    table: &PartitionTable,
    delta: Delta,
    n_max: u64,
) -> Result<EtaSeries, SeriesError> {
    let ell = table.ell();
    let needed = (n_max + 1) / 24;
    if table.n_max() < needed {
        return Err(SeriesError::TableTooShort {
            needed,
            have: table.n_max(),
        });
    }
    // (-n / ell) depends only on n mod ell.
    let symbol_of_neg: Vec<Symbol> = (0..ell).map(|n| jacobi_odd((ell - n) % ell, ell)).collect();
    let want = delta.symbol();
    let mut f = EtaSeries::from_fn(ell, n_max, &[23], |n| {
        if symbol_of_neg[(n % ell) as usize] == want {
            table.get((n + 1) / 24).unwrap() as u64
        } else {
            0
        }
    })?;
    let lambda = match delta {
        Delta::Zero => (ell * ell - 2 * ell - 1) / 2,
        Delta::MinusOne => (ell * ell - 3) / 2,
    };
    f.set_metadata(Some(lambda), Some(-1));
    f.set_delta(Some(delta));
    Ok(f)
}

fn check_q(q: u64) -> Result<(), SeriesError> {
    if q == 0 || gcd(q, 6) != 1 {
        return Err(SeriesError::BadQ(q));
    }
    Ok(())
}

/// Residue classes hit by `r -> r * q (mod 24)`. Since `q^2 = 1 (mod 24)` for
/// `q` coprime to 6, this is also the image under `r -> r * q^{-1}`.
fn transport(support: &[u8], q: u64) -> Vec<u8> {
    support
        .iter()
        .map(|&r| ((r as u64 * q) % 24) as u8)
        .collect()
}

fn transport_r(r: Option<i64>, q: u64) -> Option<i64> {
    r.map(|r| (r * (q % 24) as i64).rem_euclid(24))
}

/// `f | U_Q = sum a(Q n) q^(n/24)`.
pub fn apply_u(f: &EtaSeries, q: u64) -> Result<EtaSeries, SeriesError> {
    check_q(q)?;
    let mut out = EtaSeries::from_fn(f.ell(), f.n_max() / q, &transport(&f.support(), q), |n| {
        f.get(q * n) as u64
    })?;
    out.set_metadata(f.weight_lambda(), transport_r(f.multiplier_r(), q));
    Ok(out)
}

/// `f | V_Q = sum a(n) q^(Q n/24)`, keeping indices up to [`DEFAULT_V_CAP`].
pub fn apply_v(f: &EtaSeries, q: u64) -> Result<EtaSeries, SeriesError> {
    apply_v_capped(f, q, DEFAULT_V_CAP)
}

pub fn apply_v_capped(f: &EtaSeries, q: u64, cap: u64) -> Result<EtaSeries, SeriesError> {
    check_q(q)?;
    let full = f.n_max().saturating_mul(q);
    let n_max = full.min(cap);
    let mut out = EtaSeries::zero(f.ell(), n_max, &transport(&f.support(), q))?;
    for (n, c) in f.iter_nonzero() {
        let m = n * q;
        if m > n_max {
            break;
        }
        out.set(m, c as u64)?;
    }
    out.set_metadata(f.weight_lambda(), transport_r(f.multiplier_r(), q));
    out.set_capped(full > cap);
    Ok(out)
}

/// Smallest `n <= bound` where `f` and `g` differ, or `None`.
pub fn first_mismatch(
    f: &EtaSeries,
    g: &EtaSeries,
    bound: u64,
) -> Result<Option<u64>, SeriesError> {
    if f.ell() != g.ell() {
        return Err(SeriesError::ModulusMismatch(f.ell(), g.ell()));
    }
    let n_max = f.n_max().min(g.n_max());
    if bound > n_max {
        return Err(SeriesError::BoundTooLarge { bound, n_max });
    }
    let mut classes = f.support();
    classes.extend(g.support());
    classes.sort_unstable();
    classes.dedup();

    let mut best: Option<u64> = None;
    for r in classes {
        let start = if r == 0 { 24 } else { r as u64 };
        let limit = best.map_or(bound, |b| b.min(bound));
        let mut n = start;
        while n <= limit {
            if f.get(n) != g.get(n) {
                best = Some(n);
                break;
            }
            n += 24;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::jacobi_symbol;
    use crate::ptable::build_table;

    #[test]
    fn f_series_examples() {
        let table = build_table(13, 10_000).unwrap();
        let f = build_f_series(&table, Delta::MinusOne, 1000).unwrap();
        assert_eq!(f.get(23), 0);
        assert_eq!(f.get(47), 2);
        assert_eq!(f.support(), vec![23]);
        assert_eq!(f.weight_lambda(), Some(83));
        assert_eq!(f.multiplier_r(), Some(-1));
        let g = build_f_series(&table, Delta::Zero, 1000).unwrap();
        assert_eq!(g.get(143), 11);
        assert_eq!(g.weight_lambda(), Some((169 - 26 - 1) / 2));
        assert_eq!(g.first_nonzero(), Some(143));
    }

    #[test]
    fn f_series_matches_definition() {
        let table = build_table(17, 500).unwrap();
        for delta in Delta::ALL {
            let f = build_f_series(&table, delta, 12_000).unwrap();
            for n in 1..=12_000u64 {
                let expected =
                    if n % 24 == 23 && jacobi_symbol(-(n as i64), 17).unwrap() == delta.symbol() {
                        table.get((n + 1) / 24).unwrap()
                    } else {
                        0
                    };
                assert_eq!(f.get(n), expected, "n={n}");
            }
        }
    }

    #[test]
    fn f_series_needs_enough_table() {
        let table = build_table(13, 10).unwrap();
        assert!(matches!(
            build_f_series(&table, Delta::Zero, 1000),
            Err(SeriesError::TableTooShort { .. })
        ));
    }

    #[test]
    fn u_and_v_transport_indices() {
        let mut f = EtaSeries::zero(13, 100, &[23]).unwrap();
        f.set(47, 3).unwrap();
        let u = apply_u(&f, 47).unwrap();
        assert_eq!(u.n_max(), 2);
        assert_eq!(u.get(1), 3);
        assert_eq!(u.support(), vec![1]);

        let mut g = EtaSeries::zero(13, 10, &[1]).unwrap();
        g.set(1, 4).unwrap();
        let v = apply_v(&g, 5).unwrap();
        assert_eq!(v.n_max(), 50);
        assert_eq!(v.get(5), 4);
        assert_eq!(v.iter_nonzero().count(), 1);
        assert!(v.iter_nonzero().all(|(m, _)| m % 5 == 0));
        assert_eq!(v.support(), vec![5]);
        assert!(!v.capped());

        assert!(matches!(apply_u(&f, 9), Err(SeriesError::BadQ(9))));
        assert!(matches!(apply_v(&f, 4), Err(SeriesError::BadQ(4))));
    }

    #[test]
    fn v_cap_is_recorded() {
        let f = EtaSeries::from_fn(13, 1000, &[23], |_| 1).unwrap();
        let v = apply_v_capped(&f, 7, 2000).unwrap();
        assert_eq!(v.n_max(), 2000);
        assert!(v.capped());
        assert_eq!(v.get(7 * 23), 1);
    }

    #[test]
    fn u_of_f_reads_the_table() {
        let table = build_table(13, 2000).unwrap();
        let f = build_f_series(&table, Delta::MinusOne, 40_000).unwrap();
        let u = apply_u(&f, 5).unwrap();
        assert_eq!(u.n_max(), 8000);
        assert_eq!(u.support(), vec![19]);
        // (-215/13) = (6/13) = -1, so the coefficient is p(9) = 30 = 4.
        assert_eq!(u.get(43), 4);
        for n in 1..=8000 {
            assert_eq!(u.get(n), f.get(5 * n));
        }
    }

    #[test]
    fn mismatch_basics() {
        let f = EtaSeries::from_fn(11, 500, &[1, 23], |n| n * n).unwrap();
        assert_eq!(first_mismatch(&f, &f, 500).unwrap(), None);
        let mut g = f.clone();
        g.set(263, f.get(263) as u64 + 1).unwrap();
        assert_eq!(first_mismatch(&f, &g, 500).unwrap(), Some(263));
        assert_eq!(first_mismatch(&g, &f, 500).unwrap(), Some(263));
        assert_eq!(first_mismatch(&f, &g, 262).unwrap(), None);
        let h = EtaSeries::zero(13, 500, &[1]).unwrap();
        assert!(matches!(
            first_mismatch(&f, &h, 10),
            Err(SeriesError::ModulusMismatch(..))
        ));
        assert!(matches!(
            first_mismatch(&f, &f, 501),
            Err(SeriesError::BoundTooLarge { .. })
        ));
        // Different supports: f vs the zero series on another class.
        let z = EtaSeries::zero(11, 500, &[5]).unwrap();
        assert_eq!(first_mismatch(&f, &z, 500).unwrap(), Some(1));
    }
}
