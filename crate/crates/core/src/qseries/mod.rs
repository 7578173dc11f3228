//! Truncated q-expansions `sum a(n) q^(n/24)` with coefficients mod `ell`.
//!
//! A series only stores the residue classes mod 24 it is declared to be
//! supported on, one dense vector per class. Everything the congruence tests
//! need is expressed through index bookkeeping on these vectors: `U_Q` and
//! `V_Q` move coefficients between indices, theta series place characters on
//! square indices, and [`match_dicks`] compares a series against the three
//! theta patterns that a form supported on finitely many square classes must
//! follow.

mod ops;
mod series;
mod support;
mod theta;

use thiserror::Error;

pub use ops::{apply_u, apply_v, apply_v_capped, build_f_series, first_mismatch, DEFAULT_V_CAP};
pub use series::EtaSeries;
pub use support::{select_t_sequence, squarefree_support, SquarefreeSupport, TSequence};
pub use theta::{
    match_dicks, theta_series, DicksCase, DicksObstruction, DicksVerdict, PatternObstruction,
    SideCondition, SideViolation, ThetaKind,
};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("partition table covers n <= {have}, need n <= {needed}")]
    TableTooShort { needed: u64, have: u64 },
    #[error("delta must be 0 or -1, got {0}")]
    BadDelta(i64),
    #[error("Q = {0} must be coprime to 6")]
    BadQ(u64),
    #[error("series are reduced modulo different primes ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("bound {bound} exceeds the series length {n_max}")]
    BoundTooLarge { bound: u64, n_max: u64 },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("series has no weight/multiplier metadata")]
    MissingMetadata,
    #[error("only {found} of the {wanted} requested square classes are usable")]
    InsufficientSupport { wanted: usize, found: usize },
    #[error("coefficient at n = {0} lies outside the declared support")]
    SupportViolation(u64),
    #[error(transparent)]
    Arith(#[from] crate::arith::ArithError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
