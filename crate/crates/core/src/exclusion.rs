//! Per-prime tests that rule out `p(ell Q n + beta) = 0 (mod ell)`.
//!
//! A congruence at `Q` with `((1-24 beta)/ell) = delta` and
//! `((1-24 beta)/Q) = epsilon` forces two properties of `f = f_{ell,delta}`:
//!
//! - square classes: `a(n) != 0` implies `(-n/Q) = epsilon` or `Q^2 | n`;
//! - the `U_Q`/`V_Q` relation `f|U_Q = -epsilon (12/Q) Q^{-1} f|V_Q (mod ell)`.
//!
//! A single index violating either property excludes `(Q, epsilon)`. The
//! square-class test is run first because one list of nonzero coefficients
//! serves every `Q`. Each witness can be re-derived from the raw partition
//! table by [`recheck_witness`], which shares no code with the scan.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{chi12, gcd, is_prime, jacobi_symbol, mod_inverse, mul_mod, PrimeRange, Symbol};
use crate::congruence::RAMANUJAN_PRIMES;
use crate::ptable::PartitionTable;
use crate::qseries::{build_f_series, EtaSeries, SeriesError};
use crate::{Delta, Epsilon};

#[derive(Debug, Error)]
pub enum ExclusionError {
    #[error("Q = {0} must be a prime >= 5 different from ell")]
    BadQ(u64),
    #[error("bound {bound} needs series indices up to {needed}, series stops at {n_max}")]
    BoundTooLarge {
        bound: u64,
        needed: u128,
        n_max: u64,
    },
    #[error("table covers n <= {have}, witness needs n <= {needed}")]
    TableTooShort { needed: u64, have: u64 },
    #[error("report does not carry a witness")]
    NotExcluded,
    #[error("empty or inverted Q range [{0}, {1}]")]
    BadRange(u64, u64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestKind {
    UvRelation,
    SquareClass,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::UvRelation => "UV_RELATION",
            TestKind::SquareClass => "SQUARE_CLASS",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VacuousReason {
    /// `f_{ell,0} = 0` for `ell in {5, 7, 11}`; every `Q` carries a congruence.
    ExceptionalRamanujan,
}

impl fmt::Display for VacuousReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EXCEPTIONAL_RAMANUJAN")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Excluded {
        test: TestKind,
        witness: u64,
    },
    /// No witness up to the coefficient bound. Never evidence of a congruence.
    Survivor,
    Vacuous(VacuousReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExclusionReport {
    pub ell: u64,
    pub delta: Delta,
    pub epsilon: Epsilon,
    pub q: u64,
    pub outcome: Outcome,
    pub coeff_bound: u64,
}

impl ExclusionReport {
    pub const CSV_HEADER: &'static str = "ell,delta,epsilon,Q,outcome,test,witness,bound";

    pub fn is_excluded(&self) -> bool {
        matches!(self.outcome, Outcome::Excluded { .. })
    }

    pub fn csv_row(&self) -> String {
        let (outcome, test, witness) = match self.outcome {
            Outcome::Excluded { test, witness } => {
                ("EXCLUDED", test.to_string(), witness.to_string())
            }
            Outcome::Survivor => ("SURVIVOR", String::new(), String::new()),
            Outcome::Vacuous(reason) => ("VACUOUS", reason.to_string(), String::new()),
        };
        format!(
            "{},{},{},{},{outcome},{test},{witness},{}",
            self.ell, self.delta, self.epsilon, self.q, self.coeff_bound
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UvOutcome {
    /// First `m` where the coefficients of `q^(m/24)` on the two sides differ.
    Witness(u64),
    Consistent(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareClassOutcome {
    Witness(u64),
    Survivor(u64),
}

fn check_q(ell: u64, q: u64) -> Result<(), ExclusionError> {
    if q < 5 || q == ell || gcd(q, 6) != 1 || !is_prime(q) {
        return Err(ExclusionError::BadQ(q));
    }
    Ok(())
}

/// `-epsilon (12/Q) Q^{-1} mod ell`.
fn uv_factor(ell: u64, q: u64, epsilon: Epsilon) -> u64 {
    let sign = -(epsilon.value() as i64) * chi12(q).value() as i64;
    let inv = mod_inverse(q as i64, ell).expect("Q is a prime different from ell");
    mul_mod(sign.rem_euclid(ell as i64) as u64, inv, ell)
}

fn uv_scan(f: &EtaSeries, q: u64, epsilon: Epsilon, bound: u64) -> UvOutcome {
    let ell = f.ell();
    let factor = uv_factor(ell, q, epsilon);
    for m in 1..=bound {
        let lhs = f.get(q * m) as u64;
        let rhs = if m % q == 0 {
            mul_mod(factor, f.get(m / q) as u64, ell)
        } else {
            0
        };
        if lhs != rhs {
            return UvOutcome::Witness(m);
        }
    }
    UvOutcome::Consistent(bound)
}

/// Compares `f|U_Q` with `-epsilon (12/Q) Q^{-1} f|V_Q` at every `q^(m/24)`,
/// `m <= bound`.
pub fn test_uv_relation(
    f: &EtaSeries,
    q: u64,
    epsilon: Epsilon,
    bound: u64,
) -> Result<UvOutcome, ExclusionError> {
    check_q(f.ell(), q)?;
    let needed = q as u128 * bound as u128;
    if needed > f.n_max() as u128 {
        return Err(ExclusionError::BoundTooLarge {
            bound,
            needed,
            n_max: f.n_max(),
        });
    }
    Ok(uv_scan(f, q, epsilon, bound))
}

/// Smallest `n <= bound` with `a(n) != 0`, `Q^2` not dividing `n`, and
/// `(-n/Q) != epsilon`.
pub fn test_square_class(
    f: &EtaSeries,
    q: u64,
    epsilon: Epsilon,
    bound: u64,
) -> Result<SquareClassOutcome, ExclusionError> {
    check_q(f.ell(), q)?;
    if bound > f.n_max() {
        return Err(ExclusionError::BoundTooLarge {
            bound,
            needed: bound as u128,
            n_max: f.n_max(),
        });
    }
    let q_sq = q as u128 * q as u128;
    let witness = f
        .iter_nonzero()
        .take_while(|&(n, _)| n <= bound)
        .find(|&(n, _)| {
            !(n as u128).is_multiple_of(q_sq)
                && jacobi_symbol(-(n as i64), q).expect("Q is odd") != epsilon.symbol()
        });
    Ok(match witness {
        Some((n, _)) => SquareClassOutcome::Witness(n),
        None => SquareClassOutcome::Survivor(bound),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    EqualsEll,
    BelowFive,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::EqualsEll => "Q_EQUALS_ELL",
            SkipReason::BelowFive => "Q_BELOW_FIVE",
        })
    }
}

/// All reports of one scan, sorted by `(Q, epsilon)`, plus the primes in the
/// requested range that are outside the scan domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionScan {
    pub ell: u64,
    pub delta: Delta,
    pub q_min: u64,
    pub q_max: u64,
    pub coeff_bound: u64,
    pub rows: Vec<ExclusionReport>,
    pub skipped: Vec<(u64, SkipReason)>,
}

impl ExclusionScan {
    pub fn survivors(&self, epsilon: Epsilon) -> impl Iterator<Item = &ExclusionReport> + '_ {
        self.rows
            .iter()
            .filter(move |r| r.epsilon == epsilon && !r.is_excluded())
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", ExclusionReport::CSV_HEADER)?;
        for row in &self.rows {
            writeln!(out, "{}", row.csv_row())?;
        }
        for (q, reason) in &self.skipped {
            writeln!(out, "# skipped Q={q} reason={reason}")?;
        }
        out.flush()
    }
}

/// First indices in `nonzero` that exclude `epsilon = -1` and `+1`.
fn square_class_witnesses(nonzero: &[u64], q: u64) -> [Option<u64>; 2] {
    let q_sq = q as u128 * q as u128;
    let mut found = [None, None];
    for &n in nonzero {
        if (n as u128).is_multiple_of(q_sq) {
            continue;
        }
        let s = jacobi_symbol(-(n as i64), q).expect("Q is odd");
        // A symbol of 0 (Q || n) rules out both signs at once.
        if s != Symbol::MinusOne && found[0].is_none() {
            found[0] = Some(n);
        }
        if s != Symbol::PlusOne && found[1].is_none() {
            found[1] = Some(n);
        }
        if found[0].is_some() && found[1].is_some() {
            break;
        }
    }
    found
}

/// Runs both tests for every prime `Q` in `[q_min, q_max]` and both signs of
/// `epsilon`, on `f_{ell,delta}` truncated at `bound`. Work is spread over
/// the current rayon pool; the output order does not depend on it.
pub fn exclude_range(
    table: &PartitionTable,
    delta: Delta,
    q_min: u64,
    q_max: u64,
    bound: u64,
) -> Result<ExclusionScan, ExclusionError> {
    if q_min > q_max {
        return Err(ExclusionError::BadRange(q_min, q_max));
    }
    let ell = table.ell();
    let f = build_f_series(table, delta, bound)?;
    let mut skipped: Vec<(u64, SkipReason)> = [2u64, 3]
        .into_iter()
        .filter(|q| (q_min..=q_max).contains(q))
        .map(|q| (q, SkipReason::BelowFive))
        .collect();
    if (q_min..=q_max).contains(&ell) {
        skipped.push((ell, SkipReason::EqualsEll));
    }

    let range = PrimeRange::new(q_min.max(5), q_max);
    let primes: Vec<u64> = if range.is_empty() {
        Vec::new()
    } else {
        range.collect().into_iter().filter(|&q| q != ell).collect()
    };

    let vacuous = RAMANUJAN_PRIMES.contains(&ell) && delta == Delta::Zero;
    let nonzero: Vec<u64> = f.iter_nonzero().map(|(n, _)| n).collect();
    let report = |q: u64, epsilon: Epsilon, outcome: Outcome| ExclusionReport {
        ell,
        delta,
        epsilon,
        q,
        outcome,
        coeff_bound: bound,
    };

    let rows: Vec<ExclusionReport> = primes
        .par_iter()
        .flat_map_iter(|&q| {
            if vacuous {
                let v = Outcome::Vacuous(VacuousReason::ExceptionalRamanujan);
                return Epsilon::ALL.map(|eps| report(q, eps, v));
            }
            let witnesses = square_class_witnesses(&nonzero, q);
            let uv_bound = bound / q;
            Epsilon::ALL
                .into_iter()
                .zip(witnesses)
                .map(|(eps, sq)| {
                    let outcome = match sq {
                        Some(witness) => Outcome::Excluded {
                            test: TestKind::SquareClass,
                            witness,
                        },
                        None => match uv_scan(&f, q, eps, uv_bound) {
                            UvOutcome::Witness(witness) => Outcome::Excluded {
                                test: TestKind::UvRelation,
                                witness,
                            },
                            UvOutcome::Consistent(_) => Outcome::Survivor,
                        },
                    };
                    report(q, eps, outcome)
                })
                .collect::<Vec<_>>()
                .try_into()
                .unwrap()
        })
        .collect();

    Ok(ExclusionScan {
        ell,
        delta,
        q_min,
        q_max,
        coeff_bound: bound,
        rows,
        skipped,
    })
}

mod audit {
    //! Witness re-derivation straight from `p(n) mod ell`, using Euler's
    //! criterion for every quadratic symbol.

    use super::*;
    use crate::arith::pow_mod;

    /// Legendre symbol of `a` modulo an odd prime `p` as -1, 0 or 1.
    fn euler(a: i128, p: u64) -> i64 {
        let r = a.rem_euclid(p as i128) as u64;
        match pow_mod(r, (p - 1) / 2, p) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    pub(super) struct Raw<'a> {
        pub table: &'a PartitionTable,
        pub delta: i64,
    }

    impl Raw<'_> {
        /// Coefficient of `q^(n/24)` in `f_{ell,delta}`.
        pub fn coeff(&self, n: u64) -> Result<u64, ExclusionError> {
            if n % 24 != 23 {
                return Ok(0);
            }
            let ell = self.table.ell();
            if euler(-(n as i128), ell) != self.delta {
                return Ok(0);
            }
            let idx = (n + 1) / 24;
            self.table
                .get(idx)
                .map(u64::from)
                .ok_or(ExclusionError::TableTooShort {
                    needed: idx,
                    have: self.table.n_max(),
                })
        }

        fn sq_violation(&self, n: u64, q: u64, eps: i64) -> Result<bool, ExclusionError> {
            Ok(self.coeff(n)? != 0
                && !(n as u128).is_multiple_of(q as u128 * q as u128)
                && euler(-(n as i128), q) != eps)
        }

        fn uv_violation(&self, m: u64, q: u64, eps: i64) -> Result<bool, ExclusionError> {
            let ell = self.table.ell();
            // (12/Q) = (3/Q) for odd primes Q, by Euler's criterion.
            let twelve = euler(12, q);
            // Q^{-1} = Q^{ell-2} (mod ell).
            let inv = pow_mod(q % ell, ell - 2, ell);
            let factor = ((-eps * twelve).rem_euclid(ell as i64) as u64 * inv) % ell;
            let lhs = self.coeff(q * m)? % ell;
            let rhs = if m.is_multiple_of(q) {
                (factor * self.coeff(m / q)?) % ell
            } else {
                0
            };
            Ok(lhs != rhs)
        }

        /// The witness violates its condition and no smaller index does.
        pub fn square_class_witness(
            &self,
            n: u64,
            q: u64,
            eps: i64,
        ) -> Result<bool, ExclusionError> {
            if !self.sq_violation(n, q, eps)? {
                return Ok(false);
            }
            for smaller in (23..n).step_by(24) {
                if self.sq_violation(smaller, q, eps)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }

        pub fn uv_witness(&self, m: u64, q: u64, eps: i64) -> Result<bool, ExclusionError> {
            if m == 0 || !self.uv_violation(m, q, eps)? {
                return Ok(false);
            }
            for smaller in 1..m {
                if self.uv_violation(smaller, q, eps)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Re-derives an EXCLUDED report's witness from the raw table: the witness must
/// lie within the report's bound, violate the tested property, and be the
/// smallest index that does.
pub fn recheck_witness(
    report: &ExclusionReport,
    table: &PartitionTable,
) -> Result<bool, ExclusionError> {
    let Outcome::Excluded { test, witness } = report.outcome else {
        return Err(ExclusionError::NotExcluded);
    };
    if table.ell() != report.ell {
        return Ok(false);
    }
    let raw = audit::Raw {
        table,
        delta: report.delta.value() as i64,
    };
    let eps = report.epsilon.value() as i64;
    match test {
        TestKind::SquareClass => Ok(
            witness <= report.coeff_bound && raw.square_class_witness(witness, report.q, eps)?
        ),
        TestKind::UvRelation => Ok((witness as u128) * (report.q as u128)
            <= report.coeff_bound as u128
            && raw.uv_witness(witness, report.q, eps)?),
    }
}
