//! Exact modular arithmetic on machine words: inverses, quadratic symbols,
//! prime generation and squarefree decomposition.
//!
//! Everything here is a pure function of its inputs. Intermediate products are
//! widened to `u128`/`i128` so no operation silently overflows for 64-bit
//! arguments.

use std::fmt;

use thiserror::Error;

/// Largest trial divisor used by [`squarefree_part`].
pub const DEFAULT_TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Segment length (in integers) of the segmented prime sieve.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not invertible modulo {m}")]
    NonInvertible { a: i64, m: u64 },
    #[error("modulus {0} is smaller than 2")]
    BadModulus(u64),
    #[error("Jacobi symbol needs an odd positive bottom argument, got {0}")]
    EvenModulus(u64),
    #[error("{0} is outside the supported range")]
    OutOfRange(u64),
}

/// Value of a Legendre, Jacobi or Kronecker symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Symbol {
    MinusOne = -1,
    Zero = 0,
    PlusOne = 1,
}

impl Symbol {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn from_i8(v: i8) -> Option<Symbol> {
        match v {
            -1 => Some(Symbol::MinusOne),
            0 => Some(Symbol::Zero),
            1 => Some(Symbol::PlusOne),
            _ => None,
        }
    }

    /// The symbol as a residue modulo `m`, mapping -1 to `m - 1`.
    pub fn to_residue(self, m: u64) -> u64 {
        match self {
            Symbol::MinusOne => m - 1,
            Symbol::Zero => 0,
            Symbol::PlusOne => 1 % m,
        }
    }
}

impl std::ops::Mul for Symbol {
    type Output = Symbol;

    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol::from_i8(self.value() * rhs.value()).expect("product of symbols is a symbol")
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `a mod m` in `[0, m)` for a signed `a`.
pub fn reduce(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, in `[1, m - 1]`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64, ArithError> {
    if m < 2 {
        return Err(ArithError::BadModulus(m));
    }
    let (mut old_r, mut r) = (reduce(a, m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(ArithError::NonInvertible { a, m });
    }
    Ok(old_s.rem_euclid(m as i128) as u64)
}

/// Jacobi symbol `(a / n)` for odd `n >= 1`. Agrees with the Legendre symbol
/// when `n` is prime and equals 1 when `n = 1`.
pub fn jacobi_symbol(a: i64, n: u64) -> Result<Symbol, ArithError> {
    if n.is_multiple_of(2) {
        return Err(ArithError::EvenModulus(n));
    }
    Ok(jacobi_odd(reduce(a, n), n))
}

/// Binary Jacobi algorithm; `n` must be odd.
pub(crate) fn jacobi_odd(mut a: u64, mut n: u64) -> Symbol {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        Symbol::from_i8(sign).unwrap()
    } else {
        Symbol::Zero
    }
}

/// The character `(12 / n)`: +1 for n = ±1 (mod 12), -1 for n = ±5 (mod 12),
/// 0 when `gcd(n, 12) > 1`.
pub fn chi12(n: u64) -> Symbol {
    match n % 12 {
        1 | 11 => Symbol::PlusOne,
        5 | 7 => Symbol::MinusOne,
        _ => Symbol::Zero,
    }
}

/// Deterministic primality by trial division over 6k ± 1.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Distinct prime factors of `n`, ascending, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut push_div = |n: &mut u64, p: u64| {
        if (*n).is_multiple_of(p) {
            out.push(p);
            while (*n).is_multiple_of(p) {
                *n /= p;
            }
        }
    };
    push_div(&mut n, 2);
    push_div(&mut n, 3);
    let mut d = 5u64;
    while d * d <= n {
        push_div(&mut n, d);
        push_div(&mut n, d + 2);
        d += 6;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// Splits `n >= 1` as `t * m^2` with `t` squarefree, using the default
/// trial-division bound.
pub fn squarefree_part(n: u64) -> Result<(u64, u64), ArithError> {
    squarefree_part_bounded(n, DEFAULT_TRIAL_DIVISION_BOUND)
}

/// As [`squarefree_part`], rejecting `n > bound^2`.
pub fn squarefree_part_bounded(n: u64, bound: u64) -> Result<(u64, u64), ArithError> {
    if n == 0 || (n as u128) > (bound as u128) * (bound as u128) {
        return Err(ArithError::OutOfRange(n));
    }
    let mut rest = n;
    let (mut t, mut m) = (1u64, 1u64);
    let mut strip = |rest: &mut u64, p: u64| {
        let mut e = 0u32;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e % 2 == 1 {
            t *= p;
        }
        m *= p.pow(e / 2);
    };
    strip(&mut rest, 2);
    strip(&mut rest, 3);
    let mut d = 5u64;
    while d * d <= rest {
        strip(&mut rest, d);
        strip(&mut rest, d + 2);
        d += 6;
    }
    if rest > 1 {
        t *= rest;
    }
    Ok((t, m))
}

fn small_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Primes in an inclusive range `[lo, hi]`, sieved segment by segment so that
/// memory stays proportional to the segment length plus `sqrt(hi)`.
#[derive(Debug, Clone)]
pub struct PrimeRange {
    lo: u64,
    hi: u64,
    base: Vec<u64>,
    segment_len: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self::with_segment_len(lo, hi, DEFAULT_SEGMENT_LEN)
    }

    pub fn with_segment_len(lo: u64, hi: u64, segment_len: u64) -> Self {
        let lo = lo.max(2);
        let base = if hi >= 2 {
            small_sieve(isqrt(hi))
        } else {
            Vec::new()
        };
        PrimeRange {
            lo,
            hi,
            base,
            segment_len: segment_len.max(64),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// Inclusive sub-ranges of at most `segment_len` integers covering the range.
    pub fn segments(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        let mut start = self.lo;
        while start <= self.hi {
            let end = start.saturating_add(self.segment_len - 1).min(self.hi);
            out.push((start, end));
            if end == u64::MAX {
                break;
            }
            start = end + 1;
        }
        out
    }

    /// Primes in `[lo, hi]`, which must lie inside this range.
    pub fn primes_in_segment(&self, lo: u64, hi: u64) -> Vec<u64> {
        debug_assert!(lo >= self.lo && hi <= self.hi);
        if lo > hi {
            return Vec::new();
        }
        let len = (hi - lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &self.base {
            if p * p > hi {
                break;
            }
            let mut start = (lo.div_ceil(p) * p).max(p * p);
            while start <= hi {
                composite[(start - lo) as usize] = true;
                start += p;
            }
        }
        composite
            .iter()
            .enumerate()
            .filter(|&(i, &c)| !c && lo + i as u64 >= 2)
            .map(|(i, _)| lo + i as u64)
            .collect()
    }

    pub fn for_each_segment<F: FnMut(&[u64])>(&self, mut f: F) {
        for (a, b) in self.segments() {
            f(&self.primes_in_segment(a, b));
        }
    }

    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each_segment(|seg| out.extend_from_slice(seg));
        out
    }
}

/// All primes `<= x`, ascending. Empty for `x < 2`.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    if x <= DEFAULT_SEGMENT_LEN {
        small_sieve(x)
    } else {
        PrimeRange::new(2, x).collect()
    }
}

/// Primes `Q` with `5 <= Q <= x`.
pub fn count_primes_from_five(x: u64) -> u64 {
    if x < 5 {
        return 0;
    }
    let range = PrimeRange::new(5, x);
    let mut count = 0u64;
    range.for_each_segment(|seg| count += seg.len() as u64);
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_criterion(a: i64, p: u64) -> u64 {
        pow_mod(reduce(a, p), (p - 1) / 2, p)
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 13), Ok(1));
        assert_eq!(mod_inverse(24, 5), Ok(4));
        assert_eq!(mod_inverse(24, 7), Ok(5));
        assert_eq!(mod_inverse(-1, 7), Ok(6));
        assert_eq!(
            mod_inverse(6, 9),
            Err(ArithError::NonInvertible { a: 6, m: 9 })
        );
        assert_eq!(mod_inverse(3, 1), Err(ArithError::BadModulus(1)));
        assert_eq!(mod_inverse(3, 0), Err(ArithError::BadModulus(0)));
    }

    #[test]
    fn inverse_exhaustive_small_moduli() {
        for m in 2..=1000u64 {
            for a in 0..m {
                match mod_inverse(a as i64, m) {
                    Ok(x) => assert_eq!(mul_mod(a, x, m), 1, "a={a} m={m}"),
                    Err(_) => assert_ne!(gcd(a, m), 1),
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_symbol(12, 1), Ok(Symbol::PlusOne));
        assert_eq!(jacobi_symbol(12, 5), Ok(Symbol::MinusOne));
        assert_eq!(jacobi_symbol(-23, 13), Ok(Symbol::PlusOne));
        assert_eq!(jacobi_symbol(-143, 13), Ok(Symbol::Zero));
        assert_eq!(jacobi_symbol(3, 8), Err(ArithError::EvenModulus(8)));
        assert_eq!(
            jacobi_symbol(i64::MIN, 3),
            Ok(jacobi_odd(reduce(i64::MIN, 3), 3))
        );
    }

    #[test]
    fn jacobi_is_multiplicative() {
        for n in (1..=301u64).step_by(2) {
            for a in -60i64..=60 {
                for b in [-37i64, -8, -1, 2, 3, 17, 40] {
                    let lhs = jacobi_symbol(a * b, n).unwrap();
                    let rhs = jacobi_symbol(a, n).unwrap() * jacobi_symbol(b, n).unwrap();
                    assert_eq!(lhs, rhs, "a={a} b={b} n={n}");
                }
            }
        }
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for p in primes_up_to(2000).into_iter().filter(|&p| p > 2) {
            for a in -(p as i64)..(2 * p as i64) {
                let sym = jacobi_symbol(a, p).unwrap();
                assert_eq!(sym.to_residue(p), euler_criterion(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn chi12_agrees_with_jacobi() {
        for n in 1..=10_000u64 {
            if gcd(n, 12) != 1 {
                assert_eq!(chi12(n), Symbol::Zero);
                continue;
            }
            assert_eq!(chi12(n), jacobi_symbol(12, n).unwrap(), "n={n}");
            let expected = if n % 12 == 1 || n % 12 == 11 { 1 } else { -1 };
            assert_eq!(chi12(n).value(), expected);
        }
    }

    #[test]
    fn primes_small_cases() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(2), vec![2]);
        assert!(primes_up_to(1).is_empty());
        assert!(primes_up_to(0).is_empty());
    }

    #[test]
    fn segmented_sieve_matches_trial_division() {
        let range = PrimeRange::with_segment_len(2, 20_000, 97);
        let expected: Vec<u64> = (2..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(range.collect(), expected);
        let inner = PrimeRange::with_segment_len(9_000, 9_200, 64).collect();
        let expected: Vec<u64> = (9_000..=9_200).filter(|&n| is_prime(n)).collect();
        assert_eq!(inner, expected);
    }

    #[test]
    fn prime_count_to_one_million() {
        let primes = primes_up_to(1_000_000);
        assert_eq!(primes.len(), 78_498);
        assert_eq!(count_primes_from_five(1_000_000), 78_496);
        assert!(primes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(1), Ok((1, 1)));
        assert_eq!(squarefree_part(12), Ok((3, 2)));
        assert_eq!(squarefree_part(23), Ok((23, 1)));
        assert_eq!(squarefree_part(0), Err(ArithError::OutOfRange(0)));
        assert_eq!(
            squarefree_part_bounded(101, 10),
            Err(ArithError::OutOfRange(101))
        );
        assert_eq!(squarefree_part_bounded(100, 10), Ok((1, 10)));
    }

    #[test]
    fn squarefree_recovers_decomposition() {
        let squarefree: Vec<u64> = (1..=200u64)
            .filter(|&t| (2..=14u64).all(|p| t % (p * p) != 0))
            .collect();
        for &t in &squarefree {
            for m in 1..=50u64 {
                assert_eq!(squarefree_part(t * m * m), Ok((t, m)), "t={t} m={m}");
            }
        }
    }

    #[test]
    fn factors_and_isqrt() {
        assert_eq!(prime_factors(1), Vec::<u64>::new());
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(1_000_003), vec![1_000_003]);
        for n in 0..5000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}
