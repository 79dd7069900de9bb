use std::fmt;

use super::partition::Partition;
use crate::error::{Error, Result};

/// Largest ground set accepted by the pairing enumerators.
pub const MAX_PAIRING_K: usize = 16;

/// A partition of `{1, ..., k}` into blocks of size two.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition(Partition);

impl TryFrom<Partition> for PairPartition {
    type Error = Error;

    fn try_from(p: Partition) -> Result<Self> {
        if p.is_pair_partition() {
            Ok(Self(p))
        } else {
            Err(Error::Domain(format!("{p} is not a pair partition")))
        }
    }
}

impl PairPartition {
    /// From 1-based pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let k = 2 * pairs.len();
        let blocks: Vec<Vec<usize>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        Partition::from_blocks(k, &blocks)?.try_into()
    }

    pub fn partition(&self) -> &Partition {
        &self.0
    }

    pub fn into_partition(self) -> Partition {
        self.0
    }

    pub fn k(&self) -> usize {
        self.0.k()
    }

    /// Pairs `(a, b)`, `a < b`, ordered by `a`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.blocks().into_iter().map(|b| (b[0], b[1])).collect()
    }

    pub fn is_crossing(&self) -> bool {
        is_crossing(self)
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// True iff some `i < j < l < m` has `i ~ l` and `j ~ m`.
pub fn is_crossing(pp: &PairPartition) -> bool {
    let pairs = pp.pairs();
    for (x, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[x + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return true;
            }
        }
    }
    false
}

fn check_even(k: usize) -> Result<()> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::Domain(format!("pair partitions need an even positive k, got {k}")));
    }
    if k > MAX_PAIRING_K {
        return Err(Error::Guard(format!("k = {k} exceeds the k <= {MAX_PAIRING_K} guard")));
    }
    Ok(())
}

/// All perfect matchings of `{1, ..., k}`; there are `(k - 1)!!`.
///
/// A matching is encoded by mixed-radix digits `c_d < k - 2d - 1`: at depth
/// `d` the smallest unmatched element is paired with the `c_d`-th remaining one.
#[derive(Clone, Debug)]
pub struct PairPartitions {
    k: usize,
    digits: Vec<usize>,
    done: bool,
}

impl PairPartitions {
    fn decode(&self) -> PairPartition {
        let mut free: Vec<usize> = (0..self.k).collect();
        let mut labels = vec![0; self.k];
        for (d, &c) in self.digits.iter().enumerate() {
            let first = free.remove(0);
            let other = free.remove(c);
            labels[first] = d;
            labels[other] = d;
        }
        PairPartition(Partition::from_rgs_unchecked(labels, self.k / 2))
    }
}

impl Iterator for PairPartitions {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        if self.done {
            return None;
        }
        let item = self.decode();
        let mut d = self.digits.len();
        loop {
            if d == 0 {
                self.done = true;
                break;
            }
            d -= 1;
            let radix = self.k - 2 * d - 1;
            if self.digits[d] + 1 < radix {
                self.digits[d] += 1;
                break;
            }
            self.digits[d] = 0;
        }
        Some(item)
    }
}

pub fn enumerate_pair_partitions(k: usize) -> Result<PairPartitions> {
    check_even(k)?;
    Ok(PairPartitions {
        k,
        digits: vec![0; k / 2],
        done: false,
    })
}

/// Non-crossing pairings of the sorted slice: its first element pairs with an
/// element at odd offset, enclosing a non-crossing pairing of what lies between.
fn noncrossing(elems: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if elems.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in (1..elems.len()).step_by(2) {
        let inside = noncrossing(&elems[1..j]);
        let outside = noncrossing(&elems[j + 1..]);
        for a in &inside {
            for b in &outside {
                let mut m = Vec::with_capacity(elems.len() / 2);
                m.push((elems[0], elems[j]));
                m.extend_from_slice(a);
                m.extend_from_slice(b);
                out.push(m);
            }
        }
    }
    out
}

/// The non-crossing pair partitions of `{1, ..., k}`, generated directly.
pub fn enumerate_ncpp(k: usize) -> Result<std::vec::IntoIter<PairPartition>> {
    check_even(k)?;
    let elems: Vec<usize> = (1..=k).collect();
    let all: Vec<PairPartition> = noncrossing(&elems)
        .into_iter()
        .map(|m| PairPartition::from_pairs(&m).expect("valid matching"))
        .collect();
    Ok(all.into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(k: u64) -> u64 {
        (1..=k).rev().step_by(2).product()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_pair_partitions(2).unwrap().count(), 1);
        assert_eq!(enumerate_pair_partitions(4).unwrap().count(), 3);
        assert_eq!(enumerate_pair_partitions(6).unwrap().count(), 15);
        for k in (2..=12).step_by(2) {
            assert_eq!(enumerate_pair_partitions(k).unwrap().count() as u64, double_factorial(k as u64 - 1));
        }
        assert_eq!(enumerate_ncpp(2).unwrap().count(), 1);
        assert_eq!(enumerate_ncpp(4).unwrap().count(), 2);
        assert_eq!(enumerate_ncpp(8).unwrap().count(), 14);
    }

    #[test]
    fn crossing_examples() {
        assert!(PairPartition::from_pairs(&[(1, 3), (2, 4)]).unwrap().is_crossing());
        assert!(!PairPartition::from_pairs(&[(1, 2), (3, 4)]).unwrap().is_crossing());
        assert!(!PairPartition::from_pairs(&[(1, 4), (2, 3)]).unwrap().is_crossing());
        assert!(PairPartition::from_pairs(&[(1, 5), (2, 3), (4, 6)]).unwrap().is_crossing());
    }

    #[test]
    fn domain_and_guard() {
        assert!(matches!(enumerate_pair_partitions(5), Err(Error::Domain(_))));
        assert!(matches!(enumerate_ncpp(0), Err(Error::Domain(_))));
        assert!(matches!(enumerate_ncpp(18), Err(Error::Guard(_))));
        let p = Partition::from_blocks(3, &[vec![1, 2], vec![3]]).unwrap();
        assert!(PairPartition::try_from(p).is_err());
    }

    #[test]
    fn filter_consistency() {
        for k in (2..=10).step_by(2) {
            let mut filtered: Vec<PairPartition> =
                enumerate_pair_partitions(k).unwrap().filter(|p| !p.is_crossing()).collect();
            let mut direct: Vec<PairPartition> = enumerate_ncpp(k).unwrap().collect();
            filtered.sort();
            direct.sort();
            assert_eq!(filtered, direct);
        }
    }

    #[test]
    fn matchings_are_distinct_pair_partitions() {
        let all: Vec<PairPartition> = enumerate_pair_partitions(8).unwrap().collect();
        let mut s = all.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), all.len());
        assert!(all.iter().all(|p| p.partition().is_pair_partition()));
    }
}
