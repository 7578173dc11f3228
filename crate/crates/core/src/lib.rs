//! Search engine for partition congruences `p(ell*Q*n + beta) = 0 (mod ell)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: modular inverses, Jacobi symbols, prime sieves, squarefree parts.
//! - [`ptable`]: `p(n) mod ell` tables and their binary file format.
//! - [`qseries`]: truncated q-expansions in powers of `q^(1/24)`, the forms
//!   `f_{ell,delta}`, the `U_Q`/`V_Q` operators, theta series and the
//!   theta-pattern matcher.
//! - [`congruence`]: direct progression checks and square-class sets.
//! - [`exclusion`]: per-prime necessary-condition tests with auditable witnesses.
//! - [`density`]: character sums over primes and survivor density curves.

use std::fmt;

pub mod arith;
pub mod congruence;
pub mod density;
pub mod exclusion;
pub mod ptable;
pub mod qseries;

pub use arith::Symbol;
pub use ptable::PartitionTable;
pub use qseries::EtaSeries;

/// The value of `((1 - 24 beta) / ell)` selecting which square class mod `ell`
/// a form collects. Only 0 and -1 can carry a congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Delta {
    Zero,
    MinusOne,
}

impl Delta {
    pub const ALL: [Delta; 2] = [Delta::Zero, Delta::MinusOne];

    pub fn from_i64(v: i64) -> Option<Delta> {
        match v {
            0 => Some(Delta::Zero),
            -1 => Some(Delta::MinusOne),
            _ => None,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Delta::Zero => 0,
            Delta::MinusOne => -1,
        }
    }

    pub fn symbol(self) -> Symbol {
        match self {
            Delta::Zero => Symbol::Zero,
            Delta::MinusOne => Symbol::MinusOne,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The value of `((1 - 24 beta) / Q)`, which must be a unit for a congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Epsilon {
    Minus,
    Plus,
}

impl Epsilon {
    /// Sorted order used by reports.
    pub const ALL: [Epsilon; 2] = [Epsilon::Minus, Epsilon::Plus];

    pub fn from_i64(v: i64) -> Option<Epsilon> {
        match v {
            1 => Some(Epsilon::Plus),
            -1 => Some(Epsilon::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }

    pub fn symbol(self) -> Symbol {
        match self {
            Epsilon::Plus => Symbol::PlusOne,
            Epsilon::Minus => Symbol::MinusOne,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}
