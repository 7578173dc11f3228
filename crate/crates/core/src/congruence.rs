//! Direct checks of `p(m n + beta) = 0 (mod ell)` on a table, the square-class
//! sets along which such congruences propagate, and the classification of a
//! residue `beta mod ell*Q` into excluded and candidate cases.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::arith::{gcd, is_prime, jacobi_symbol, mul_mod, ArithError, Symbol};
use crate::ptable::PartitionTable;
use crate::Delta;

/// Primes for which `p(ell n + beta) = 0 (mod ell)` with `24 beta = 1`.
pub const RAMANUJAN_PRIMES: [u64; 3] = [5, 7, 11];

#[derive(Debug, Error)]
pub enum CongruenceError {
    #[error("table covers n <= {have}, progression needs n <= {needed}")]
    TableTooShort { needed: u128, have: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("ell = {ell} and Q = {q} must be distinct primes >= 5")]
    BadPrimes { ell: u64, q: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `p(m n + beta) = 0` for every `n` in `0..=n_checked`. Finite evidence only.
    HoldsUpTo(u64),
    /// `p(m n + beta) != 0` at this `n`.
    Fails(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceStatus {
    pub ell: u64,
    pub m: u64,
    pub beta: u64,
    pub verdict: Verdict,
}

impl CongruenceStatus {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::HoldsUpTo(_))
    }

    pub const CSV_HEADER: &'static str = "m,beta,verdict,witness_or_bound";

    /// `m,beta,verdict,witness-or-bound`
    pub fn csv_row(&self) -> String {
        match self.verdict {
            Verdict::HoldsUpTo(n) => format!("{},{},HOLDS_UP_TO,{n}", self.m, self.beta),
            Verdict::Fails(n) => format!("{},{},FAILS,{n}", self.m, self.beta),
        }
    }
}

/// Scans `n = 0..=n_limit` for the first `n` with `p(m n + beta) != 0 (mod ell)`.
pub fn check_progression(
    table: &PartitionTable,
    m: u64,
    beta: u64,
    n_limit: u64,
) -> Result<CongruenceStatus, CongruenceError> {
    if m == 0 {
        return Err(CongruenceError::ZeroModulus);
    }
    let last = m as u128 * n_limit as u128 + beta as u128;
    if last > table.n_max() as u128 {
        return Err(CongruenceError::TableTooShort {
            needed: last,
            have: table.n_max(),
        });
    }
    let verdict = (0..=n_limit)
        .find(|&n| table.get(m * n + beta) != Some(0))
        .map_or(Verdict::HoldsUpTo(n_limit), Verdict::Fails);
    Ok(CongruenceStatus {
        ell: table.ell(),
        m,
        beta,
        verdict,
    })
}

/// `{beta' mod m : 24 beta' - 1 = a^2 (24 beta - 1) (mod m), (a, 6m) = 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareClassSet {
    pub m: u64,
    pub beta: u64,
    pub members: BTreeSet<u64>,
}

impl fmt::Display for SquareClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.members.iter().map(|b| b.to_string()).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// All `x mod m` with `24 x = c (mod m)`.
fn solve_24x(c: u64, m: u64) -> impl Iterator<Item = u64> {
    let g = gcd(24, m);
    let step = m / g;
    let base = if !c.is_multiple_of(g) {
        None
    } else {
        // 24/g is invertible modulo m/g.
        let inv = if step == 1 {
            0
        } else {
            crate::arith::mod_inverse((24 / g) as i64, step).expect("coprime after dividing gcd")
        };
        Some(mul_mod((c / g) % step.max(1), inv, step.max(1)))
    };
    base.into_iter()
        .flat_map(move |x0| (0..g).map(move |k| x0 + k * step))
}

/// Enumerates the square-class set of `beta` modulo `m` over every
/// `a in [1, 6m]` coprime to `6m`. When `gcd(24, m) > 1` the linear congruence
/// for `beta'` is solved directly and may have several or no solutions per `a`.
pub fn square_class_set(m: u64, beta: u64) -> Result<SquareClassSet, CongruenceError> {
    if m == 0 {
        return Err(CongruenceError::ZeroModulus);
    }
    let beta = beta % m;
    let base = (24 * beta as u128 + m as u128 - 1) as u64 % m; // 24 beta - 1 mod m
    let mut squares = BTreeSet::new();
    let six_m = 6 * m;
    for a in 1..=six_m {
        if gcd(a, six_m) == 1 {
            squares.insert(mul_mod(a % m, a % m, m));
        }
    }
    let mut members = BTreeSet::new();
    for sq in squares {
        let target = (mul_mod(sq, base, m) + 1) % m;
        members.extend(solve_24x(target, m));
    }
    Ok(SquareClassSet { m, beta, members })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassFlag {
    /// `((1 - 24 beta)/ell) = +1`: no congruence can exist.
    RuledOutRadu,
    /// `((1 - 24 beta)/Q) = 0`: no congruence can exist.
    RuledOutEpsilonZero,
    /// `ell in {5, 7, 11}` and `24 beta = 1 (mod ell)`: the Ramanujan congruences.
    ExceptionalRamanujan,
    Candidate,
}

impl fmt::Display for ClassFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassFlag::RuledOutRadu => "RULED_OUT_RADU",
            ClassFlag::RuledOutEpsilonZero => "RULED_OUT_EPSILON_ZERO",
            ClassFlag::ExceptionalRamanujan => "EXCEPTIONAL_RAMANUJAN",
            ClassFlag::Candidate => "CANDIDATE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaClass {
    /// `((1 - 24 beta)/ell)`
    pub delta: Symbol,
    /// `((1 - 24 beta)/Q)`
    pub epsilon: Symbol,
    pub flags: BTreeSet<ClassFlag>,
}

impl BetaClass {
    /// The `delta` of a candidate class in the form used by the series code.
    pub fn delta(&self) -> Option<Delta> {
        match self.delta {
            Symbol::Zero => Some(Delta::Zero),
            Symbol::MinusOne => Some(Delta::MinusOne),
            Symbol::PlusOne => None,
        }
    }
}

/// Symbols and taxonomy flags of `beta mod ell*Q`.
pub fn classify_beta(ell: u64, q: u64, beta: u64) -> Result<BetaClass, CongruenceError> {
    if ell == q || ell < 5 || q < 5 || !is_prime(ell) || !is_prime(q) {
        return Err(CongruenceError::BadPrimes { ell, q });
    }
    let modulus = ell as u128 * q as u128;
    let beta = (beta as u128 % modulus) as i128;
    let one_minus = 1 - 24 * beta;
    let symbol = |p: u64| -> Result<Symbol, CongruenceError> {
        let a = one_minus.rem_euclid(p as i128) as i64;
        Ok(jacobi_symbol(a, p)?)
    };
    let delta = symbol(ell)?;
    let epsilon = symbol(q)?;
    let mut flags = BTreeSet::new();
    if delta == Symbol::PlusOne {
        flags.insert(ClassFlag::RuledOutRadu);
    }
    if epsilon == Symbol::Zero {
        flags.insert(ClassFlag::RuledOutEpsilonZero);
    }
    if RAMANUJAN_PRIMES.contains(&ell) && delta == Symbol::Zero {
        flags.insert(ClassFlag::ExceptionalRamanujan);
    }
    if flags.is_empty() {
        flags.insert(ClassFlag::Candidate);
    }
    Ok(BetaClass {
        delta,
        epsilon,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationReport {
    pub base: CongruenceStatus,
    pub members: Vec<CongruenceStatus>,
}

impl PropagationReport {
    /// When the base progression holds, every member must hold as well.
    pub fn consistent(&self) -> bool {
        !self.base.holds() || self.members.iter().all(CongruenceStatus::holds)
    }
}

/// Checks every progression in the square class of `beta` modulo `m`.
pub fn verify_propagation(
    table: &PartitionTable,
    m: u64,
    beta: u64,
    n_limit: u64,
) -> Result<PropagationReport, CongruenceError> {
    let class = square_class_set(m, beta)?;
    let base = check_progression(table, m, class.beta, n_limit)?;
    let members = class
        .members
        .iter()
        .map(|&b| check_progression(table, m, b, n_limit))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PropagationReport { base, members })
}
