use std::io::Write;

use super::SeriesError;
use crate::arith::is_prime;
use crate::Delta;

const NO_CLASS: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
struct ResidueClass {
    residue: u8,
    // coeffs[j] is the coefficient of q^((residue + 24 j)/24).
    coeffs: Vec<u32>,
}

/// A q-series `sum_{1 <= n <= n_max} a(n) q^(n/24)` with `a(n)` reduced mod `ell`.
///
/// Coefficients can only be nonzero on the declared support classes mod 24;
/// everything else reads as zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaSeries {
    ell: u64,
    n_max: u64,
    classes: Vec<ResidueClass>,
    slot: [u8; 24],
    weight_lambda: Option<u64>,
    multiplier_r: Option<i64>,
    delta: Option<Delta>,
    capped: bool,
}

fn class_len(residue: u8, n_max: u64) -> usize {
    let r = residue as u64;
    if r > n_max {
        0
    } else {
        ((n_max - r) / 24 + 1) as usize
    }
}

impl EtaSeries {
    /// The zero series on the given support classes.
    pub fn zero(ell: u64, n_max: u64, support: &[u8]) -> Result<EtaSeries, SeriesError> {
        if ell < 2 || !is_prime(ell) || ell > u32::MAX as u64 {
            return Err(SeriesError::BadParams(format!(
                "ell = {ell} is not a prime"
            )));
        }
        let mut residues: Vec<u8> = support.to_vec();
        if let Some(&r) = residues.iter().find(|&&r| r >= 24) {
            return Err(SeriesError::BadParams(format!(
                "support residue {r} is not mod 24"
            )));
        }
        residues.sort_unstable();
        residues.dedup();
        let mut slot = [NO_CLASS; 24];
        let classes = residues
            .iter()
            .enumerate()
            .map(|(i, &residue)| {
                slot[residue as usize] = i as u8;
                ResidueClass {
                    residue,
                    coeffs: vec![0; class_len(residue, n_max)],
                }
            })
            .collect();
        Ok(EtaSeries {
            ell,
            n_max,
            classes,
            slot,
            weight_lambda: None,
            multiplier_r: None,
            delta: None,
            capped: false,
        })
    }

    /// Builds a series from a coefficient function evaluated on the support
    /// classes only. Values are reduced mod `ell`.
    pub fn from_fn<F: FnMut(u64) -> u64>(
        ell: u64,
        n_max: u64,
        support: &[u8],
        mut coeff: F,
    ) -> Result<EtaSeries, SeriesError> {
        let mut s = EtaSeries::zero(ell, n_max, support)?;
        for class in &mut s.classes {
            let r = class.residue as u64;
            for (j, c) in class.coeffs.iter_mut().enumerate() {
                let n = r + 24 * j as u64;
                if n > 0 {
                    *c = (coeff(n) % ell) as u32;
                }
            }
        }
        Ok(s)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn support(&self) -> Vec<u8> {
        self.classes.iter().map(|c| c.residue).collect()
    }

    pub fn weight_lambda(&self) -> Option<u64> {
        self.weight_lambda
    }

    pub fn multiplier_r(&self) -> Option<i64> {
        self.multiplier_r
    }

    pub fn delta(&self) -> Option<Delta> {
        self.delta
    }

    /// True when an operation had to cut the index range short.
    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn with_metadata(mut self, weight_lambda: u64, multiplier_r: i64) -> EtaSeries {
        self.weight_lambda = Some(weight_lambda);
        self.multiplier_r = Some(multiplier_r);
        self
    }

    pub(crate) fn set_metadata(&mut self, lambda: Option<u64>, r: Option<i64>) {
        self.weight_lambda = lambda;
        self.multiplier_r = r;
    }

    pub(crate) fn set_delta(&mut self, delta: Option<Delta>) {
        self.delta = delta;
    }

    pub(crate) fn set_capped(&mut self, capped: bool) {
        self.capped = capped;
    }

    /// Coefficient of `q^(n/24)`; zero outside `1..=n_max` or the support.
    #[inline]
    pub fn get(&self, n: u64) -> u32 {
        if n == 0 || n > self.n_max {
            return 0;
        }
        let slot = self.slot[(n % 24) as usize];
        if slot == NO_CLASS {
            return 0;
        }
        self.classes[slot as usize].coeffs[(n / 24) as usize]
    }

    /// Sets the coefficient of `q^(n/24)` to `c mod ell`.
    pub fn set(&mut self, n: u64, c: u64) -> Result<(), SeriesError> {
        let c = (c % self.ell) as u32;
        if n == 0 || n > self.n_max {
            return Err(SeriesError::BadParams(format!(
                "index {n} outside 1..={}",
                self.n_max
            )));
        }
        let slot = self.slot[(n % 24) as usize];
        if slot == NO_CLASS {
            return if c == 0 {
                Ok(())
            } else {
                Err(SeriesError::SupportViolation(n))
            };
        }
        self.classes[slot as usize].coeffs[(n / 24) as usize] = c;
        Ok(())
    }

    /// Nonzero coefficients `(n, a(n))` in increasing order of `n`.
    pub fn iter_nonzero(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        let rows = self
            .classes
            .iter()
            .map(|c| c.coeffs.len())
            .max()
            .unwrap_or(0);
        (0..rows).flat_map(move |j| {
            self.classes.iter().filter_map(move |class| {
                let c = *class.coeffs.get(j)?;
                let n = class.residue as u64 + 24 * j as u64;
                (c != 0 && n > 0).then_some((n, c))
            })
        })
    }

    pub fn first_nonzero(&self) -> Option<u64> {
        self.iter_nonzero().next().map(|(n, _)| n)
    }

    pub fn count_nonzero(&self) -> usize {
        self.classes
            .iter()
            .map(|c| c.coeffs.iter().filter(|&&x| x != 0).count())
            .sum()
    }

    /// Whether every coefficient with index `<= bound` vanishes.
    pub fn is_zero_up_to(&self, bound: u64) -> bool {
        self.iter_nonzero().next().is_none_or(|(n, _)| n > bound)
    }

    /// Checks that nonzero coefficients sit only in declared classes. The
    /// storage layout makes this hold by construction; callers use it as an
    /// output audit.
    pub fn support_discipline_holds(&self) -> bool {
        let support = self.support();
        self.iter_nonzero()
            .all(|(n, c)| support.contains(&((n % 24) as u8)) && (c as u64) < self.ell)
    }

    /// `c * self`, with metadata preserved.
    pub fn scaled(&self, c: u64) -> EtaSeries {
        let c = c % self.ell;
        let mut out = self.clone();
        for class in &mut out.classes {
            for x in &mut class.coeffs {
                *x = ((*x as u64 * c) % self.ell) as u32;
            }
        }
        out
    }

    /// Coefficientwise sum on the union of supports, truncated to the shorter
    /// of the two ranges. Metadata is dropped.
    pub fn add(&self, other: &EtaSeries) -> Result<EtaSeries, SeriesError> {
        if self.ell != other.ell {
            return Err(SeriesError::ModulusMismatch(self.ell, other.ell));
        }
        let mut support = self.support();
        support.extend(other.support());
        let n_max = self.n_max.min(other.n_max);
        EtaSeries::from_fn(self.ell, n_max, &support, |n| {
            self.get(n) as u64 + other.get(n) as u64
        })
    }

    /// The same series cut off at `n_max` (which may not exceed the current length).
    pub fn truncated(&self, n_max: u64) -> EtaSeries {
        let n_max = n_max.min(self.n_max);
        let mut out = self.clone();
        out.n_max = n_max;
        for class in &mut out.classes {
            class.coeffs.truncate(class_len(class.residue, n_max));
        }
        out
    }

    /// Plain-text dump: a header line, then `n<TAB>c` per nonzero coefficient.
    pub fn dump<W: Write>(&self, mut out: W) -> Result<(), SeriesError> {
        let delta = self
            .delta
            .map_or_else(|| "none".to_string(), |d| d.to_string());
        let support: Vec<String> = self.support().iter().map(|r| r.to_string()).collect();
        writeln!(
            out,
            "# ell={} delta={} n_max={} support={}",
            self.ell,
            delta,
            self.n_max,
            support.join(",")
        )?;
        for (n, c) in self.iter_nonzero() {
            writeln!(out, "{n}\t{c}")?;
        }
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_reads_and_writes() {
        let mut s = EtaSeries::zero(13, 100, &[23, 1, 23]).unwrap();
        assert_eq!(s.support(), vec![1, 23]);
        s.set(47, 2).unwrap();
        s.set(25, 27).unwrap();
        assert_eq!(s.get(47), 2);
        assert_eq!(s.get(25), 1);
        assert_eq!(s.get(0), 0);
        assert_eq!(s.get(48), 0);
        assert_eq!(s.get(1000), 0);
        assert!(matches!(s.set(2, 1), Err(SeriesError::SupportViolation(2))));
        s.set(2, 0).unwrap();
        assert!(s.set(101, 1).is_err());
        assert_eq!(s.iter_nonzero().collect::<Vec<_>>(), vec![(25, 1), (47, 2)]);
        assert!(s.support_discipline_holds());
    }

    #[test]
    fn iteration_is_ascending_across_classes() {
        let s = EtaSeries::from_fn(7, 200, &[0, 5, 13], |n| n).unwrap();
        let idx: Vec<u64> = s.iter_nonzero().map(|(n, _)| n).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(idx.iter().all(|n| n % 7 != 0));
        assert!(idx.contains(&24) && idx.contains(&197));
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(EtaSeries::zero(12, 10, &[1]).is_err());
        assert!(EtaSeries::zero(13, 10, &[24]).is_err());
    }

    #[test]
    fn dump_format() {
        let mut s = EtaSeries::zero(13, 50, &[23]).unwrap();
        s.set(47, 2).unwrap();
        let mut buf = Vec::new();
        s.dump(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# ell=13 delta=none n_max=50 support=23\n47\t2\n"
        );
    }

    #[test]
    fn truncation_and_sum() {
        let a = EtaSeries::from_fn(5, 100, &[1], |_| 1).unwrap();
        let b = EtaSeries::from_fn(5, 60, &[1, 2], |n| n).unwrap();
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.n_max(), 60);
        assert_eq!(sum.get(25), (1 + 25) % 5);
        assert_eq!(sum.get(26), 1);
        let t = a.truncated(30);
        assert_eq!(t.get(25), 1);
        assert_eq!(t.get(49), 0);
        assert!(a.scaled(5).is_zero_up_to(100));
    }
}
