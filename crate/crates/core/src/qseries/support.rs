use std::collections::{BTreeMap, BTreeSet};

use super::{EtaSeries, SeriesError};
use crate::arith::{prime_factors, squarefree_part};

/// Squarefree classes `t` hit by the nonzero coefficients of a series: for
/// each `t`, every `m` with `a(t m^2) != 0` up to the scan bound, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeSupport {
    pub bound: u64,
    pub classes: BTreeMap<u64, Vec<u64>>,
}

impl SquarefreeSupport {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, t: u64) -> bool {
        self.classes.contains_key(&t)
    }

    /// Smallest `m` with `a(t m^2) != 0`.
    pub fn smallest_witness(&self, t: u64) -> Option<u64> {
        self.classes.get(&t).and_then(|w| w.first().copied())
    }

    pub fn from_classes<I: IntoIterator<Item = (u64, Vec<u64>)>>(bound: u64, it: I) -> Self {
        SquarefreeSupport {
            bound,
            classes: it.into_iter().collect(),
        }
    }
}

/// Scans every nonzero coefficient with index `<= bound` and groups the
/// indices by squarefree part.
pub fn squarefree_support(f: &EtaSeries, bound: u64) -> Result<SquarefreeSupport, SeriesError> {
    if bound > f.n_max() {
        return Err(SeriesError::BoundTooLarge {
            bound,
            n_max: f.n_max(),
        });
    }
    let mut classes: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for (n, _) in f.iter_nonzero().take_while(|&(n, _)| n <= bound) {
        let (t, m) = squarefree_part(n)?;
        classes.entry(t).or_default().push(m);
    }
    for witnesses in classes.values_mut() {
        witnesses.sort_unstable();
    }
    Ok(SquarefreeSupport { bound, classes })
}

/// Ascending squarefree integers where each entry has a prime factor that
/// divides no earlier entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSequence {
    entries: Vec<u64>,
    fresh_primes: Vec<u64>,
    witnesses: Vec<u64>,
}

impl TSequence {
    /// Validates hand-picked entries, choosing for each the largest prime
    /// factor that is new. Witnesses are recorded as 1.
    pub fn from_entries(entries: &[u64]) -> Result<TSequence, SeriesError> {
        let mut seq = TSequence {
            entries: Vec::new(),
            fresh_primes: Vec::new(),
            witnesses: Vec::new(),
        };
        for &t in entries {
            let Some(p) = seq.fresh_prime_for(t) else {
                return Err(SeriesError::BadParams(format!(
                    "{t} has no prime factor missing from earlier entries"
                )));
            };
            if seq.entries.last().is_some_and(|&last| last >= t) {
                return Err(SeriesError::BadParams("entries must increase".into()));
            }
            if squarefree_part(t)? != (t, 1) {
                return Err(SeriesError::BadParams(format!("{t} is not squarefree")));
            }
            seq.push(t, p, 1);
        }
        Ok(seq)
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn fresh_primes(&self) -> &[u64] {
        &self.fresh_primes
    }

    /// The `m` used to certify each entry: `a(t m^2) != 0`.
    pub fn witnesses(&self) -> &[u64] {
        &self.witnesses
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn fresh_prime_for(&self, t: u64) -> Option<u64> {
        prime_factors(t)
            .into_iter()
            .rev()
            .find(|&p| self.entries.iter().all(|&e| e % p != 0))
    }

    fn push(&mut self, t: u64, p: u64, witness: u64) {
        self.entries.push(t);
        self.fresh_primes.push(p);
        self.witnesses.push(witness);
    }

    /// Re-checks the ascending, squarefree and fresh-prime conditions by
    /// direct divisibility.
    pub fn is_valid(&self) -> bool {
        let increasing = self.entries.windows(2).all(|w| w[0] < w[1]);
        let squarefree = self
            .entries
            .iter()
            .all(|&t| (2..).take_while(|d| d * d <= t).all(|d| t % (d * d) != 0));
        let fresh = self
            .entries
            .iter()
            .zip(&self.fresh_primes)
            .enumerate()
            .all(|(k, (&t, &p))| {
                p > 1 && t % p == 0 && self.entries[..k].iter().all(|&e| e % p != 0)
            });
        increasing && squarefree && fresh && self.fresh_primes.len() == self.entries.len()
    }
}

/// Greedy ascending choice of `k` squarefree classes, each contributing a
/// prime that divides none of the earlier choices. A class only counts if it
/// has a witness `m` free of every prime in `forbidden_primes`. Ties go to the
/// smallest `t`; the fresh prime is the largest new prime factor of `t`.
pub fn select_t_sequence(
    support: &SquarefreeSupport,
    k: usize,
    forbidden_primes: &BTreeSet<u64>,
) -> Result<TSequence, SeriesError> {
    let mut seq = TSequence {
        entries: Vec::new(),
        fresh_primes: Vec::new(),
        witnesses: Vec::new(),
    };
    for (&t, witnesses) in &support.classes {
        if seq.len() == k {
            break;
        }
        let Some(&m) = witnesses
            .iter()
            .find(|&&m| forbidden_primes.iter().all(|&q| m % q != 0))
        else {
            continue;
        };
        if let Some(p) = seq.fresh_prime_for(t) {
            seq.push(t, p, m);
        }
    }
    if seq.len() < k {
        return Err(SeriesError::InsufficientSupport {
            wanted: k,
            found: seq.len(),
        });
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{theta_series, ThetaKind};

    fn hypothetical(ts: &[u64]) -> SquarefreeSupport {
        SquarefreeSupport::from_classes(100, ts.iter().map(|&t| (t, vec![1])))
    }

    #[test]
    fn distinct_primes_are_all_fresh() {
        let seq = select_t_sequence(&hypothetical(&[1, 2, 3, 5]), 3, &BTreeSet::new()).unwrap();
        assert_eq!(seq.entries(), &[2, 3, 5]);
        assert_eq!(seq.fresh_primes(), &[2, 3, 5]);
        assert!(seq.is_valid());
    }

    #[test]
    fn unit_class_is_insufficient() {
        let err = select_t_sequence(&hypothetical(&[1]), 1, &BTreeSet::new()).unwrap_err();
        assert!(matches!(
            err,
            SeriesError::InsufficientSupport {
                wanted: 1,
                found: 0
            }
        ));
    }

    #[test]
    fn stale_classes_are_skipped() {
        // 6 = 2*3 brings nothing new after 2 and 3; 15 brings 5.
        let seq = select_t_sequence(&hypothetical(&[2, 3, 6, 15]), 3, &BTreeSet::new()).unwrap();
        assert_eq!(seq.entries(), &[2, 3, 15]);
        assert_eq!(seq.fresh_primes(), &[2, 3, 5]);
        let seq = select_t_sequence(&hypothetical(&[10, 15]), 2, &BTreeSet::new()).unwrap();
        assert_eq!(seq.fresh_primes(), &[5, 3]);
    }

    #[test]
    fn forbidden_witnesses_are_removed() {
        let support =
            SquarefreeSupport::from_classes(1000, [(2, vec![7]), (3, vec![7, 11]), (5, vec![1])]);
        let forbidden: BTreeSet<u64> = [7].into_iter().collect();
        let seq = select_t_sequence(&support, 2, &forbidden).unwrap();
        assert_eq!(seq.entries(), &[3, 5]);
        assert_eq!(seq.witnesses(), &[11, 1]);
    }

    #[test]
    fn theta_lives_on_squares() {
        let t = theta_series(ThetaKind::Plain, 13, 0, 10_000).unwrap();
        let s = squarefree_support(&t, 10_000).unwrap();
        assert_eq!(s.classes.keys().copied().collect::<Vec<_>>(), vec![1]);
        assert_eq!(s.smallest_witness(1), Some(1));
        let z = EtaSeries::zero(13, 100, &[23]).unwrap();
        assert!(squarefree_support(&z, 100).unwrap().is_empty());
        assert!(squarefree_support(&z, 101).is_err());
    }

    #[test]
    fn explicit_sequences() {
        let s = TSequence::from_entries(&[3]).unwrap();
        assert_eq!(s.fresh_primes(), &[3]);
        assert!(TSequence::from_entries(&[2, 4]).is_err());
        assert!(TSequence::from_entries(&[6, 3]).is_err());
        assert!(TSequence::from_entries(&[1]).is_err());
    }
}
