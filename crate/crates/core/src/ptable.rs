//! Tables of `p(n) mod ell` built with Euler's pentagonal recurrence, their
//! binary file format, and an independent big-integer oracle.
//!
//! File layout (all integers little-endian):
//!
//! | field    | size            |
//! |----------|-----------------|
//! | magic    | `b"PTAB"`       |
//! | version  | u32, always 1   |
//! | ell      | u64             |
//! | n_max    | u64             |
//! | width    | u8, 1 or 2      |
//! | payload  | (n_max+1)*width |
//! | checksum | u64             |
//!
//! The checksum is the wrapping sum of the payload bytes.

use std::io::{self, Read, Write};

use num_bigint::BigUint;
use thiserror::Error;

use crate::arith::is_prime;

pub const MAGIC: [u8; 4] = *b"PTAB";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 1;

/// Default cap on in-memory table storage (bytes).
pub const DEFAULT_MEMORY_BUDGET: u64 = 64 << 20;

/// Largest `n` accepted by [`oracle_partition`].
pub const ORACLE_LIMIT: u64 = 10_000;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("ell = {0} must be a prime >= 5 below 65536")]
    BadPrime(u64),
    #[error("n_max = {n_max} needs {needed} bytes, over the {budget}-byte budget")]
    Overflow {
        n_max: u64,
        needed: u128,
        budget: u64,
    },
    #[error("stream does not start with PTAB")]
    BadMagic,
    #[error("unsupported table version {0}")]
    BadVersion(u32),
    #[error("stream ended before the table was complete")]
    Truncated,
    #[error("checksum mismatch: header says {stored}, payload sums to {computed}")]
    ChecksumMismatch { stored: u64, computed: u64 },
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("table entry {index} is inconsistent with the partition generating function")]
    Corrupt { index: u64 },
    #[error("oracle input {0} exceeds {ORACLE_LIMIT}")]
    OutOfRange(u64),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Residues {
    Narrow(Vec<u8>),
    Wide(Vec<u16>),
}

/// `p(0), ..., p(n_max)` reduced modulo a prime `ell >= 5`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionTable {
    ell: u64,
    values: Residues,
}

impl PartitionTable {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn n_max(&self) -> u64 {
        self.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        match &self.values {
            Residues::Narrow(v) => v.len(),
            Residues::Wide(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bytes per stored entry.
    pub fn width(&self) -> u8 {
        match self.values {
            Residues::Narrow(_) => 1,
            Residues::Wide(_) => 2,
        }
    }

    /// `p(n) mod ell`, or `None` past the end of the table.
    #[inline]
    pub fn get(&self, n: u64) -> Option<u32> {
        let i = usize::try_from(n).ok()?;
        match &self.values {
            Residues::Narrow(v) => v.get(i).map(|&x| x as u32),
            Residues::Wide(v) => v.get(i).map(|&x| x as u32),
        }
    }

    pub fn values(&self) -> Vec<u32> {
        (0..=self.n_max()).map(|n| self.get(n).unwrap()).collect()
    }

    /// Checks that `prod_k (1 - q^k) * sum p(n) q^n` has coefficient 0 (mod ell)
    /// at every degree in `[lo, hi]` (coefficient 1 at degree 0). Returns the
    /// first failing degree.
    pub fn verify_generating_function(&self, lo: u64, hi: u64) -> Result<(), u64> {
        let hi = hi.min(self.n_max());
        let pent = signed_pentagonals(hi);
        for n in lo..=hi {
            let mut acc = self.get(n).unwrap() as i64;
            for &(g, sign) in pent.iter().take_while(|&&(g, _)| g <= n) {
                acc += sign as i64 * self.get(n - g).unwrap() as i64;
            }
            let expected = i64::from(n == 0);
            if (acc - expected).rem_euclid(self.ell as i64) != 0 {
                return Err(n);
            }
        }
        Ok(())
    }
}

/// Generalized pentagonal numbers `k(3k-1)/2, k(3k+1)/2` (k >= 1) up to
/// `limit`, paired with the sign `(-1)^k` they carry in `prod (1 - q^k)`.
fn signed_pentagonals(limit: u64) -> Vec<(u64, i8)> {
    let mut out = Vec::new();
    for k in 1u64.. {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > limit {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        out.push((g1, sign));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= limit {
            out.push((g2, sign));
        }
    }
    out
}

trait Cell: Copy + Default {
    fn load(self) -> u64;
    fn store(v: u64) -> Self;
}

impl Cell for u8 {
    #[inline]
    fn load(self) -> u64 {
        self as u64
    }
    #[inline]
    fn store(v: u64) -> Self {
        v as u8
    }
}

impl Cell for u16 {
    #[inline]
    fn load(self) -> u64 {
        self as u64
    }
    #[inline]
    fn store(v: u64) -> Self {
        v as u16
    }
}

fn pentagonal_recurrence<T: Cell>(ell: u64, n_max: usize) -> Vec<T> {
    // Offsets 1, 2, 5, 7, 12, 15, ... with signs + + - - + + - - ...
    let offsets: Vec<usize> = signed_pentagonals(n_max as u64)
        .into_iter()
        .map(|(g, _)| g as usize)
        .collect();
    let mut v = vec![T::default(); n_max + 1];
    v[0] = T::store(1);
    let mut active = 0usize;
    for n in 1..=n_max {
        while active < offsets.len() && offsets[active] <= n {
            active += 1;
        }
        let (mut plus, mut minus) = (0u64, 0u64);
        let mut quads = offsets[..active].chunks_exact(4);
        for q in &mut quads {
            plus += v[n - q[0]].load() + v[n - q[1]].load();
            minus += v[n - q[2]].load() + v[n - q[3]].load();
        }
        let rem = quads.remainder();
        for (i, &g) in rem.iter().enumerate() {
            if i < 2 {
                plus += v[n - g].load();
            } else {
                minus += v[n - g].load();
            }
        }
        v[n] = T::store((plus % ell + ell - minus % ell) % ell);
    }
    v
}

fn check_ell(ell: u64) -> Result<(), TableError> {
    if ell < 5 || ell > u16::MAX as u64 || !is_prime(ell) {
        return Err(TableError::BadPrime(ell));
    }
    Ok(())
}

fn width_for(ell: u64) -> u8 {
    if ell <= 251 {
        1
    } else {
        2
    }
}

/// Builds `p(n) mod ell` for `0 <= n <= n_max` under the default memory budget.
pub fn build_table(ell: u64, n_max: u64) -> Result<PartitionTable, TableError> {
    build_table_with_budget(ell, n_max, DEFAULT_MEMORY_BUDGET)
}

pub fn build_table_with_budget(
    ell: u64,
    n_max: u64,
    budget_bytes: u64,
) -> Result<PartitionTable, TableError> {
    check_ell(ell)?;
    let width = width_for(ell);
    let needed = (n_max as u128 + 1) * width as u128;
    if needed > budget_bytes as u128 {
        return Err(TableError::Overflow {
            n_max,
            needed,
            budget: budget_bytes,
        });
    }
    let n = n_max as usize;
    let values = match width {
        1 => Residues::Narrow(pentagonal_recurrence::<u8>(ell, n)),
        _ => Residues::Wide(pentagonal_recurrence::<u16>(ell, n)),
    };
    Ok(PartitionTable { ell, values })
}

fn payload_bytes(t: &PartitionTable) -> Vec<u8> {
    match &t.values {
        Residues::Narrow(v) => v.clone(),
        Residues::Wide(v) => v.iter().flat_map(|x| x.to_le_bytes()).collect(),
    }
}

fn byte_sum(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0u64, |acc, &b| acc.wrapping_add(b as u64))
}

pub fn store_table<W: Write>(t: &PartitionTable, mut out: W) -> Result<(), TableError> {
    let payload = payload_bytes(t);
    out.write_all(&MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&t.ell.to_le_bytes())?;
    out.write_all(&t.n_max().to_le_bytes())?;
    out.write_all(&[t.width()])?;
    out.write_all(&payload)?;
    out.write_all(&byte_sum(&payload).to_le_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn table_to_bytes(t: &PartitionTable) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + t.len() * t.width() as usize + 8);
    store_table(t, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().unwrap())
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Reads a table and re-checks the generating-function identity on a
/// pseudo-random window covering about 1% of the entries.
pub fn load_table<R: Read>(mut input: R) -> Result<PartitionTable, TableError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    parse_table(&bytes)
}

pub fn parse_table(bytes: &[u8]) -> Result<PartitionTable, TableError> {
    let magic_seen = &bytes[..bytes.len().min(4)];
    if magic_seen != &MAGIC[..magic_seen.len()] {
        return Err(TableError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(TableError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(TableError::BadVersion(version));
    }
    if bytes.len() < HEADER_LEN {
        return Err(TableError::Truncated);
    }
    let ell = le_u64(&bytes[8..16]);
    let n_max = le_u64(&bytes[16..24]);
    let width = bytes[24];
    if check_ell(ell).is_err() {
        return Err(TableError::BadHeader(format!(
            "ell = {ell} is not a supported prime"
        )));
    }
    if width != width_for(ell) {
        return Err(TableError::BadHeader(format!(
            "width {width} does not match ell = {ell}"
        )));
    }
    let payload_len = (n_max as u128 + 1) * width as u128;
    let available = (bytes.len() - HEADER_LEN) as u128;
    if available < payload_len + 8 {
        return Err(TableError::Truncated);
    }
    if available > payload_len + 8 {
        return Err(TableError::BadHeader(
            "trailing bytes after checksum".into(),
        ));
    }
    let payload_end = HEADER_LEN + payload_len as usize;
    let payload = &bytes[HEADER_LEN..payload_end];
    let stored = le_u64(&bytes[payload_end..payload_end + 8]);
    let computed = byte_sum(payload);
    if stored != computed {
        return Err(TableError::ChecksumMismatch { stored, computed });
    }

    let values = if width == 1 {
        Residues::Narrow(payload.to_vec())
    } else {
        Residues::Wide(
            payload
                .chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        )
    };
    let table = PartitionTable { ell, values };
    if let Some(index) = (0..=n_max).find(|&n| table.get(n).unwrap() as u64 >= ell) {
        return Err(TableError::Corrupt { index });
    }
    if table.get(0) != Some(1) {
        return Err(TableError::Corrupt { index: 0 });
    }

    let entries = n_max + 1;
    let window = entries.div_ceil(100).max(64).min(entries);
    let start = splitmix64(stored ^ n_max) % (entries - window + 1);
    table
        .verify_generating_function(start, start + window - 1)
        .map_err(|index| TableError::Corrupt { index })?;
    Ok(table)
}

/// Exact `p(0), ..., p(n)` by counting partitions with parts bounded by `k`
/// for `k = 1, ..., n` over big integers.
pub fn oracle_partitions(n: u64) -> Result<Vec<BigUint>, TableError> {
    if n > ORACLE_LIMIT {
        return Err(TableError::OutOfRange(n));
    }
    let n = n as usize;
    let mut ways = vec![BigUint::from(0u32); n + 1];
    ways[0] = BigUint::from(1u32);
    for part in 1..=n {
        for total in part..=n {
            let (head, tail) = ways.split_at_mut(total);
            tail[0] += &head[total - part];
        }
    }
    Ok(ways)
}

/// Exact `p(n)` for `n <= 10^4`.
pub fn oracle_partition(n: u64) -> Result<BigUint, TableError> {
    Ok(oracle_partitions(n)?.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residues(t: &PartitionTable) -> Vec<u32> {
        t.values()
    }

    #[test]
    fn small_tables() {
        assert_eq!(residues(&build_table(5, 4).unwrap()), vec![1, 1, 2, 3, 0]);
        assert_eq!(residues(&build_table(7, 0).unwrap()), vec![1]);
        assert_eq!(build_table(11, 6).unwrap().get(6), Some(0));
    }

    #[test]
    fn rejects_bad_primes() {
        for ell in [0, 1, 2, 3, 4, 9, 25, 65_537] {
            assert!(
                matches!(build_table(ell, 10), Err(TableError::BadPrime(_))),
                "{ell}"
            );
        }
        assert!(matches!(
            build_table_with_budget(13, 1000, 100),
            Err(TableError::Overflow { .. })
        ));
    }

    #[test]
    fn wide_tables_use_two_bytes() {
        let t = build_table(257, 500).unwrap();
        assert_eq!(t.width(), 2);
        let oracle = oracle_partitions(500).unwrap();
        for (n, p) in oracle.iter().enumerate() {
            assert_eq!(BigUint::from(t.get(n as u64).unwrap()), p % 257u32);
        }
        assert_eq!(build_table(251, 3).unwrap().width(), 1);
    }

    #[test]
    fn oracle_values() {
        assert_eq!(oracle_partition(0).unwrap(), BigUint::from(1u32));
        assert_eq!(oracle_partition(4).unwrap(), BigUint::from(5u32));
        assert_eq!(
            oracle_partition(100).unwrap(),
            BigUint::from(190_569_292u64)
        );
        assert!(matches!(
            oracle_partition(10_001),
            Err(TableError::OutOfRange(10_001))
        ));
    }

    #[test]
    fn generating_function_holds_everywhere() {
        let t = build_table(13, 5000).unwrap();
        assert_eq!(t.verify_generating_function(0, 5000), Ok(()));
    }

    #[test]
    fn round_trip_and_negative_streams() {
        let t = build_table(5, 4).unwrap();
        let bytes = table_to_bytes(&t);
        assert_eq!(bytes.len(), HEADER_LEN + 5 + 8);
        assert_eq!(load_table(&bytes[..]).unwrap(), t);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(parse_table(&bad), Err(TableError::BadMagic)));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(parse_table(&bad), Err(TableError::BadVersion(2))));

        assert!(matches!(
            parse_table(&bytes[..HEADER_LEN + 2]),
            Err(TableError::Truncated)
        ));
        assert!(matches!(
            parse_table(&bytes[..2]),
            Err(TableError::Truncated)
        ));
        assert!(matches!(parse_table(&[]), Err(TableError::Truncated)));

        let mut bad = bytes.clone();
        bad[HEADER_LEN + 1] ^= 1;
        assert!(matches!(
            parse_table(&bad),
            Err(TableError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn load_detects_consistent_checksum_corruption() {
        let t = build_table(13, 60).unwrap();
        let mut bytes = table_to_bytes(&t);
        // Swap two entries so the byte sum is unchanged.
        let (i, j) = (HEADER_LEN + 10, HEADER_LEN + 11);
        assert_ne!(bytes[i], bytes[j]);
        bytes.swap(i, j);
        assert!(matches!(
            parse_table(&bytes),
            Err(TableError::Corrupt { .. })
        ));
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = table_to_bytes(&build_table(17, 3000).unwrap());
        let b = table_to_bytes(&build_table(17, 3000).unwrap());
        assert_eq!(a, b);
    }
}
