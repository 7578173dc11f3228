//! Character sums `S_k(X) = sum_{5 <= Q <= X} prod_j (1 + epsilon (-t_j/Q))`
//! over primes, and survivor curves from exclusion scans.
//!
//! If every `t_j` has a coefficient `a(t_j m^2) != 0` with `Q` not dividing
//! `m`, each surviving `Q` contributes `2^k`, so `S_k(X) >= 2^k * survivors(X)`.

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{jacobi_symbol, PrimeRange};
use crate::exclusion::ExclusionScan;
use crate::qseries::TSequence;
use crate::Epsilon;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("t-sequence is empty")]
    EmptySequence,
    #[error("no report for Q = {q}, epsilon = {epsilon}")]
    CoverageGap { q: u64, epsilon: Epsilon },
    #[error("bad X grid: {0}")]
    BadGrid(String),
}

/// `prod_j (1 + epsilon (-t_j/Q))` for one prime `Q >= 5`.
pub fn sk_term(ts: &[u64], epsilon: Epsilon, q: u64) -> u64 {
    ts.iter()
        .map(|&t| {
            let s = jacobi_symbol(-(t as i64), q).expect("Q is odd").value();
            (1 + epsilon.value() * s) as u64
        })
        .product()
}

/// Prime `Q` and its term, for every prime in `[5, x]`, ascending.
fn terms(ts: &[u64], epsilon: Epsilon, x: u64) -> Vec<(u64, u64)> {
    let range = PrimeRange::new(5, x);
    if range.is_empty() {
        return Vec::new();
    }
    range
        .segments()
        .into_par_iter()
        .flat_map_iter(|(lo, hi)| {
            range
                .primes_in_segment(lo, hi)
                .into_iter()
                .map(|q| (q, sk_term(ts, epsilon, q)))
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn sk_sum(ts: &TSequence, epsilon: Epsilon, x: u64) -> Result<u64, DensityError> {
    if ts.is_empty() {
        return Err(DensityError::EmptySequence);
    }
    let range = PrimeRange::new(5, x);
    if range.is_empty() {
        return Ok(0);
    }
    Ok(range
        .segments()
        .into_par_iter()
        .map(|(lo, hi)| {
            range
                .primes_in_segment(lo, hi)
                .into_iter()
                .map(|q| sk_term(ts.entries(), epsilon, q))
                .sum::<u64>()
        })
        .sum())
}

/// Prime counts and `S_k` at each grid point, from one pass over primes.
pub fn sk_values(
    ts: &TSequence,
    epsilon: Epsilon,
    x_grid: &[u64],
) -> Result<(Vec<u64>, Vec<u64>), DensityError> {
    if ts.is_empty() {
        return Err(DensityError::EmptySequence);
    }
    check_grid(x_grid)?;
    let all = terms(ts.entries(), epsilon, *x_grid.last().unwrap());
    let mut counts = Vec::with_capacity(x_grid.len());
    let mut sums = Vec::with_capacity(x_grid.len());
    let (mut i, mut count, mut sum) = (0usize, 0u64, 0u64);
    for &x in x_grid {
        while i < all.len() && all[i].0 <= x {
            count += 1;
            sum += all[i].1;
            i += 1;
        }
        counts.push(count);
        sums.push(sum);
    }
    Ok((counts, sums))
}

fn check_grid(x_grid: &[u64]) -> Result<(), DensityError> {
    if x_grid.is_empty() {
        return Err(DensityError::BadGrid("empty".into()));
    }
    if x_grid[0] == 0 {
        return Err(DensityError::BadGrid("X must be positive".into()));
    }
    if x_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::BadGrid("X values must increase".into()));
    }
    Ok(())
}

/// Powers of ten below `x_max`, then `x_max` itself.
pub fn decade_grid(x_max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = std::iter::successors(Some(10u64), |x| x.checked_mul(10))
        .take_while(|&x| x < x_max)
        .collect();
    grid.push(x_max.max(1));
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub x_grid: Vec<u64>,
    pub prime_counts: Vec<u64>,
    pub sk_values: Vec<u64>,
    pub survivor_counts: Vec<u64>,
    pub k: usize,
    /// `S_k(X) / prime_count`, 0 when there are no primes yet.
    pub ratio: Vec<f64>,
    pub x_over_log_x: Vec<f64>,
    /// `S_k(X) / 2^k`, an upper bound for the survivor count.
    pub bounds: Vec<f64>,
}

impl DensityCurve {
    pub const CSV_HEADER: &'static str = "X,prime_count,S_k,ratio,survivors,bound_2_pow_minus_k";

    pub fn bound_holds(&self) -> bool {
        self.sk_values
            .iter()
            .zip(&self.survivor_counts)
            .all(|(&s, &c)| s >= (c << self.k))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for i in 0..self.x_grid.len() {
            writeln!(
                out,
                "{},{},{},{:.6},{},{:.6}",
                self.x_grid[i],
                self.prime_counts[i],
                self.sk_values[i],
                self.ratio[i],
                self.survivor_counts[i],
                self.bounds[i]
            )?;
        }
        out.flush()
    }
}

/// Survivor counts of `scan` for one sign of `epsilon` at each grid point,
/// alongside `S_k` for `ts`. Rows that are not EXCLUDED count as survivors.
/// The scan must have a row for every prime in `[5, max X]` other than `ell`.
pub fn survivor_density(
    scan: &ExclusionScan,
    x_grid: &[u64],
    ts: &TSequence,
    epsilon: Epsilon,
) -> Result<DensityCurve, DensityError> {
    let (prime_counts, sk_values) = sk_values(ts, epsilon, x_grid)?;
    let x_max = *x_grid.last().unwrap();

    let rows: Vec<_> = scan
        .rows
        .iter()
        .filter(|r| r.epsilon == epsilon && r.q <= x_max)
        .collect();
    let mut next = rows.iter().peekable();
    for q in PrimeRange::new(5, x_max).collect() {
        if q == scan.ell {
            continue;
        }
        match next.next() {
            Some(r) if r.q == q => {}
            _ => return Err(DensityError::CoverageGap { q, epsilon }),
        }
    }

    let mut survivors = rows
        .iter()
        .filter(|r| !r.is_excluded())
        .map(|r| r.q)
        .peekable();
    let mut survivor_counts = Vec::with_capacity(x_grid.len());
    let mut count = 0u64;
    for &x in x_grid {
        while survivors.next_if(|&q| q <= x).is_some() {
            count += 1;
        }
        survivor_counts.push(count);
    }

    let k = ts.len();
    let ratio = sk_values
        .iter()
        .zip(&prime_counts)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();
    let x_over_log_x = x_grid
        .iter()
        .map(|&x| {
            if x < 2 {
                0.0
            } else {
                x as f64 / (x as f64).ln()
            }
        })
        .collect();
    let bounds = sk_values
        .iter()
        .map(|&s| s as f64 / (1u64 << k) as f64)
        .collect();
    Ok(DensityCurve {
        x_grid: x_grid.to_vec(),
        prime_counts,
        sk_values,
        survivor_counts,
        k,
        ratio,
        x_over_log_x,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::count_primes_from_five;
    use crate::exclusion::{ExclusionReport, Outcome, TestKind};
    use crate::Delta;

    #[test]
    fn small_sum() {
        let ts = TSequence::from_entries(&[3]).unwrap();
        assert_eq!(sk_sum(&ts, Epsilon::Plus, 10).unwrap(), 2);
        assert_eq!(sk_sum(&ts, Epsilon::Minus, 10).unwrap(), 2);
        assert_eq!(sk_sum(&ts, Epsilon::Plus, 4).unwrap(), 0);
    }

    #[test]
    fn factor_bound_and_grid_agreement() {
        let ts = TSequence::from_entries(&[7, 11, 13]).unwrap();
        let grid = [10, 100, 1000, 5000];
        let (counts, sums) = sk_values(&ts, Epsilon::Minus, &grid).unwrap();
        for ((&x, &c), &s) in grid.iter().zip(&counts).zip(&sums) {
            assert_eq!(c, count_primes_from_five(x));
            assert_eq!(s, sk_sum(&ts, Epsilon::Minus, x).unwrap());
            assert!(s <= 8 * c);
        }
    }

    #[test]
    fn saturation() {
        let ts = TSequence::from_entries(&[2]).unwrap();
        // (-2/Q) = +1 for Q = 1, 3 mod 8.
        for q in [11u64, 17, 19, 41, 43] {
            assert_eq!(sk_term(ts.entries(), Epsilon::Plus, q), 2);
            assert_eq!(sk_term(ts.entries(), Epsilon::Minus, q), 0);
        }
    }

    #[test]
    fn grids() {
        assert_eq!(decade_grid(1000), vec![10, 100, 1000]);
        assert_eq!(decade_grid(2500), vec![10, 100, 1000, 2500]);
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[10, 10]).is_err());
        assert!(check_grid(&[0, 10]).is_err());
        let empty = TSequence::from_entries(&[]).unwrap();
        assert_eq!(
            sk_sum(&empty, Epsilon::Plus, 10),
            Err(DensityError::EmptySequence)
        );
    }

    fn scan_with(qs: &[u64], survivors: &[u64]) -> ExclusionScan {
        let rows = qs
            .iter()
            .flat_map(|&q| {
                Epsilon::ALL.map(|epsilon| ExclusionReport {
                    ell: 13,
                    delta: Delta::MinusOne,
                    epsilon,
                    q,
                    outcome: if survivors.contains(&q) {
                        Outcome::Survivor
                    } else {
                        Outcome::Excluded {
                            test: TestKind::SquareClass,
                            witness: 47,
                        }
                    },
                    coeff_bound: 1000,
                })
            })
            .collect();
        ExclusionScan {
            ell: 13,
            delta: Delta::MinusOne,
            q_min: 5,
            q_max: 50,
            coeff_bound: 1000,
            rows,
            skipped: vec![],
        }
    }

    #[test]
    fn survivor_curve() {
        let qs = [5, 7, 11, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        let ts = TSequence::from_entries(&[47]).unwrap();
        let curve = survivor_density(&scan_with(&qs, &[]), &[20, 50], &ts, Epsilon::Plus).unwrap();
        assert_eq!(curve.survivor_counts, vec![0, 0]);
        assert_eq!(curve.prime_counts, vec![6, 13]);
        let curve =
            survivor_density(&scan_with(&qs, &[7, 41]), &[20, 50], &ts, Epsilon::Plus).unwrap();
        assert_eq!(curve.survivor_counts, vec![1, 2]);
        let mut csv = Vec::new();
        curve.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with(DensityCurve::CSV_HEADER));

        let gap = survivor_density(&scan_with(&qs[1..], &[]), &[50], &ts, Epsilon::Plus);
        assert_eq!(
            gap,
            Err(DensityError::CoverageGap {
                q: 5,
                epsilon: Epsilon::Plus
            })
        );
        let gap = survivor_density(&scan_with(&qs, &[]), &[60], &ts, Epsilon::Plus);
        assert_eq!(
            gap,
            Err(DensityError::CoverageGap {
                q: 53,
                epsilon: Epsilon::Plus
            })
        );
    }
}
