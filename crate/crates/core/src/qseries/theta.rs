use std::fmt;

use super::{first_mismatch, EtaSeries, SeriesError};
use crate::arith::{chi12, is_prime, isqrt, mod_inverse, mul_mod, pow_mod, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    /// `sum (12/n) n^lambda q^(n^2/24)`
    Plain,
    /// `sum (12/n) q^(ell n^2/24)`
    EllScaled,
}

/// Theta series with the character `(12/n)`, reduced mod `ell`.
///
/// `Plain` carries `(12/n) n^lambda` at index `n^2` and gets metadata
/// `(lambda, r = 1)`; `EllScaled` carries `(12/n)` at index `ell n^2` and gets
/// `(lambda, r = ell mod 24)`.
pub fn theta_series(
    kind: ThetaKind,
    ell: u64,
    lambda: u64,
    n_max: u64,
) -> Result<EtaSeries, SeriesError> {
    if ell < 5 || !is_prime(ell) {
        return Err(SeriesError::BadParams(format!(
            "ell = {ell} must be a prime >= 5"
        )));
    }
    if n_max == 0 {
        return Err(SeriesError::BadParams("n_max must be positive".into()));
    }
    let (scale, support, r) = match kind {
        ThetaKind::Plain => (1, 1u8, 1i64),
        ThetaKind::EllScaled => (ell, (ell % 24) as u8, (ell % 24) as i64),
    };
    let mut out = EtaSeries::zero(ell, n_max, &[support])?;
    let mut n = 1u64;
    while scale * n * n <= n_max {
        let c = match kind {
            ThetaKind::Plain => mul_mod(chi12(n).to_residue(ell), pow_mod(n, lambda, ell), ell),
            ThetaKind::EllScaled => chi12(n).to_residue(ell),
        };
        out.set(scale * n * n, c)?;
        n += 1;
    }
    out.set_metadata(Some(lambda), Some(r));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DicksCase {
    One,
    Two,
    Three,
}

impl fmt::Display for DicksCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            DicksCase::One => 1,
            DicksCase::Two => 2,
            DicksCase::Three => 3,
        };
        write!(f, "CASE{n}")
    }
}

/// Constraints on `(r, lambda, ell)` attached to each theta pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideCondition {
    /// `r = 1 (mod 24)`
    MultiplierIsOne,
    /// `lambda` even
    LambdaEven,
    /// `r = ell (mod 24)`
    MultiplierIsEll,
    /// `lambda = (ell - 1)/2 (mod ell - 1)`
    LambdaHalfEll,
    /// `ell = 1 (mod 24)`
    EllIsOne,
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SideCondition::MultiplierIsOne => "r=1(mod 24)",
            SideCondition::LambdaEven => "lambda even",
            SideCondition::MultiplierIsEll => "r=ell(mod 24)",
            SideCondition::LambdaHalfEll => "lambda=(ell-1)/2(mod ell-1)",
            SideCondition::EllIsOne => "ell=1(mod 24)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideViolation {
    pub case: DicksCase,
    pub condition: SideCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternObstruction {
    /// Every coefficient up to the bound vanishes.
    ZeroSeries,
    /// A nonzero coefficient at an index that is neither `n^2` nor `ell n^2`
    /// with `(12/n) != 0`.
    OffGrid { index: u64 },
    /// The best-fitting theta combination disagrees at `index`.
    Mismatch { case: Option<DicksCase>, index: u64 },
}

impl PatternObstruction {
    pub fn index(&self) -> Option<u64> {
        match *self {
            PatternObstruction::ZeroSeries => None,
            PatternObstruction::OffGrid { index } | PatternObstruction::Mismatch { index, .. } => {
                Some(index)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DicksObstruction {
    pub pattern: Option<PatternObstruction>,
    pub side_violations: Vec<SideViolation>,
}

impl DicksObstruction {
    pub fn violates(&self, case: DicksCase, condition: SideCondition) -> bool {
        self.side_violations
            .iter()
            .any(|v| v.case == case && v.condition == condition)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DicksVerdict {
    Case1 { a1: u32 },
    Case2 { a_ell: u32 },
    Case3 { a1: u32, a_ell: u32 },
    None(DicksObstruction),
}

impl fmt::Display for DicksVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DicksVerdict::Case1 { a1 } => write!(f, "CASE1 a1={a1}"),
            DicksVerdict::Case2 { a_ell } => write!(f, "CASE2 a_ell={a_ell}"),
            DicksVerdict::Case3 { a1, a_ell } => write!(f, "CASE3 a1={a1} a_ell={a_ell}"),
            DicksVerdict::None(ob) => {
                f.write_str("NONE")?;
                match ob.pattern {
                    Some(PatternObstruction::ZeroSeries) => f.write_str(" pattern=ZERO_SERIES")?,
                    Some(PatternObstruction::OffGrid { index }) => {
                        write!(f, " pattern=OFF_GRID@{index}")?
                    }
                    Some(PatternObstruction::Mismatch { case, index }) => match case {
                        Some(c) => write!(f, " pattern=MISMATCH({c})@{index}")?,
                        None => write!(f, " pattern=MISMATCH@{index}")?,
                    },
                    None => {}
                }
                for v in &ob.side_violations {
                    write!(f, " violated[{}: {}]", v.case, v.condition)?;
                }
                Ok(())
            }
        }
    }
}

fn side_violations(ell: u64, lambda: u64, r: i64) -> Vec<SideViolation> {
    let r24 = r.rem_euclid(24) as u64;
    let half = lambda % (ell - 1) == (ell - 1) / 2;
    let checks = [
        (DicksCase::One, SideCondition::MultiplierIsOne, r24 == 1),
        (DicksCase::One, SideCondition::LambdaEven, lambda.is_multiple_of(2)),
        (
            DicksCase::Two,
            SideCondition::MultiplierIsEll,
            r24 == ell % 24,
        ),
        (DicksCase::Two, SideCondition::LambdaHalfEll, half),
        (DicksCase::Three, SideCondition::MultiplierIsOne, r24 == 1),
        (DicksCase::Three, SideCondition::EllIsOne, ell % 24 == 1),
        (DicksCase::Three, SideCondition::LambdaHalfEll, half),
    ];
    checks
        .into_iter()
        .filter(|&(_, _, ok)| !ok)
        .map(|(case, condition, _)| SideViolation { case, condition })
        .collect()
}

/// Whether index `n` is `k^2` or `ell k^2` with `(12/k) != 0`.
fn on_theta_grid(n: u64, ell: u64) -> bool {
    let root_ok = |m: u64| {
        let k = isqrt(m);
        k * k == m && chi12(k) != Symbol::Zero
    };
    root_ok(n) || (n.is_multiple_of(ell) && root_ok(n / ell))
}

/// Decides which theta pattern, if any, `f` follows up to `bound`.
///
/// `a(1)` is solved from the first nonzero coefficient at a square index where
/// the plain theta series is a unit, `a(ell)` is read at index `ell`, and the
/// resulting combination is compared with `f` on the whole range. Side
/// conditions on the metadata `(r, lambda)` are evaluated independently; the
/// obstruction lists every violated condition together with the first pattern
/// failure.
pub fn match_dicks(f: &EtaSeries, bound: u64) -> Result<DicksVerdict, SeriesError> {
    let (Some(lambda), Some(r)) = (f.weight_lambda(), f.multiplier_r()) else {
        return Err(SeriesError::MissingMetadata);
    };
    if bound > f.n_max() {
        return Err(SeriesError::BoundTooLarge {
            bound,
            n_max: f.n_max(),
        });
    }
    if bound == 0 {
        return Err(SeriesError::BadParams("bound must be positive".into()));
    }
    let ell = f.ell();
    let side = side_violations(ell, lambda, r);
    if f.is_zero_up_to(bound) {
        return Ok(DicksVerdict::None(DicksObstruction {
            pattern: Some(PatternObstruction::ZeroSeries),
            side_violations: side,
        }));
    }

    let mut a1 = 0u64;
    let mut k = 1u64;
    while k * k <= bound {
        let c = f.get(k * k) as u64;
        let weight = mul_mod(chi12(k).to_residue(ell), pow_mod(k, lambda, ell), ell);
        if c != 0 && weight != 0 {
            a1 = mul_mod(c, mod_inverse(weight as i64, ell)?, ell);
            break;
        }
        k += 1;
    }
    let a_ell = if ell <= bound { f.get(ell) as u64 } else { 0 };

    let case = match (a1 != 0, a_ell != 0) {
        (true, false) => Some(DicksCase::One),
        (false, true) => Some(DicksCase::Two),
        (true, true) => Some(DicksCase::Three),
        (false, false) => None,
    };
    let candidate = theta_series(ThetaKind::Plain, ell, lambda, bound)?
        .scaled(a1)
        .add(&theta_series(ThetaKind::EllScaled, ell, lambda, bound)?.scaled(a_ell))?;
    let target = f.truncated(bound);

    match first_mismatch(&target, &candidate, bound)? {
        Some(index) => {
            let pattern = if on_theta_grid(index, ell) {
                PatternObstruction::Mismatch { case, index }
            } else {
                PatternObstruction::OffGrid { index }
            };
            Ok(DicksVerdict::None(DicksObstruction {
                pattern: Some(pattern),
                side_violations: side,
            }))
        }
        None => {
            let case = case.expect("a nonzero series matching a theta combination has a case");
            if side.iter().any(|v| v.case == case) {
                return Ok(DicksVerdict::None(DicksObstruction {
                    pattern: None,
                    side_violations: side,
                }));
            }
            let (a1, a_ell) = (a1 as u32, a_ell as u32);
            Ok(match case {
                DicksCase::One => DicksVerdict::Case1 { a1 },
                DicksCase::Two => DicksVerdict::Case2 { a_ell },
                DicksCase::Three => DicksVerdict::Case3 { a1, a_ell },
            })
        }
    }
}
