use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};

/// Largest `n^k` accepted by the tuple enumerators.
pub const MAX_TUPLES: u64 = 10_000_000;

/// A `k`-tuple of index pairs `P_j = (p_j, q_j)` with `q_j = p_{j+1}`
/// cyclically. Determined by `p_1, ..., p_k` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConsistentTuple {
    starts: Vec<usize>,
}

impl ConsistentTuple {
    pub fn from_starts(starts: Vec<usize>) -> Result<Self> {
        if starts.is_empty() || starts.contains(&0) {
            return Err(Error::Domain("tuple entries must be 1-based and nonempty".into()));
        }
        Ok(Self { starts })
    }

    /// From explicit pairs, checking `q_j = p_{j+1}` with `k + 1 ≡ 1`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let k = pairs.len();
        for j in 0..k {
            if pairs[j].1 != pairs[(j + 1) % k].0 {
                return Err(Error::Domain(format!(
                    "pairs are not consistent at position {}",
                    j + 1
                )));
            }
        }
        Self::from_starts(pairs.iter().map(|p| p.0).collect())
    }

    pub fn k(&self) -> usize {
        self.starts.len()
    }

    /// `(p_j, q_j)`, 1-based `j`.
    pub fn pair(&self, j: usize) -> (usize, usize) {
        let k = self.k();
        (self.starts[j - 1], self.starts[j % k])
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.k()).map(|j| self.pair(j)).collect()
    }

    /// `q_j - p_j`.
    pub fn signed_gap(&self, j: usize) -> i64 {
        let (p, q) = self.pair(j);
        q as i64 - p as i64
    }

    /// `|p_j - q_j|`: the diagonal holding `a(P_j)`.
    pub fn abs_gap(&self, j: usize) -> usize {
        let (p, q) = self.pair(j);
        p.abs_diff(q)
    }

    pub fn max_index(&self) -> usize {
        *self.starts.iter().max().unwrap()
    }
}

/// The unique `π` with `|p_i - q_i| = |p_j - q_j| ⟺ i ~ j`.
pub fn induced_partition(tuple: &ConsistentTuple) -> Partition {
    let gaps: Vec<usize> = (1..=tuple.k()).map(|j| tuple.abs_gap(j)).collect();
    Partition::from_labels(&gaps)
}

/// Whether the tuple lies in `S_n*(π)`: `q_i - p_i = p_j - q_j` whenever `i ~ j`, `i != j`.
/// The caller is responsible for the tuple being `π`-consistent.
pub fn satisfies_star(tuple: &ConsistentTuple, pi: &Partition) -> bool {
    star_condition(&signed_gaps(&tuple.starts), pi.labels())
}

fn signed_gaps(starts: &[usize]) -> Vec<i64> {
    let k = starts.len();
    (0..k).map(|j| starts[(j + 1) % k] as i64 - starts[j] as i64).collect()
}

pub(crate) fn star_condition(gaps: &[i64], labels: &[usize]) -> bool {
    for i in 0..gaps.len() {
        for j in i + 1..gaps.len() {
            if labels[i] == labels[j] && gaps[i] != -gaps[j] {
                return false;
            }
        }
    }
    true
}

pub(crate) fn check_guard(n: usize, k: usize) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("n and k must be positive".into()));
    }
    let total = (n as u64)
        .checked_pow(k as u32)
        .filter(|&t| t <= MAX_TUPLES && k <= u32::MAX as usize)
        .ok_or_else(|| Error::Guard(format!("n^k = {n}^{k} exceeds {MAX_TUPLES}")))?;
    Ok(total)
}

/// Odometer over `p ∈ {1..n}^k`, last coordinate fastest.
#[derive(Clone, Debug)]
pub struct ConsistentTuples {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl ConsistentTuples {
    /// Advances in place, exposing the starts without allocating.
    pub(crate) fn next_starts(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        Some(self.current.as_slice())
    }
}

impl Iterator for ConsistentTuples {
    type Item = ConsistentTuple;

    fn next(&mut self) -> Option<ConsistentTuple> {
        if self.done {
            return None;
        }
        let item = ConsistentTuple {
            starts: self.current.clone(),
        };
        self.advance();
        Some(item)
    }
}

impl ConsistentTuples {
    fn advance(&mut self) {
        let mut j = self.current.len();
        loop {
            if j == 0 {
                self.done = true;
                return;
            }
            j -= 1;
            if self.current[j] < self.n {
                self.current[j] += 1;
                return;
            }
            self.current[j] = 1;
        }
    }
}

/// All `n^k` consistent `k`-tuples over `{1..n}`.
pub fn enumerate_consistent_tuples(n: usize, k: usize) -> Result<ConsistentTuples> {
    check_guard(n, k)?;
    Ok(ConsistentTuples {
        n,
        current: vec![1; k],
        done: false,
    })
}

/// Calls `visit(starts, signed_gaps)` for every tuple in `{1..n}^k`.
pub(crate) fn for_each_tuple<F: FnMut(&[usize], &[i64])>(n: usize, k: usize, mut visit: F) -> Result<()> {
    let mut it = enumerate_consistent_tuples(n, k)?;
    let mut gaps = vec![0i64; k];
    while !it.done {
        {
            let s = it.next_starts().unwrap();
            for j in 0..k {
                gaps[j] = s[(j + 1) % k] as i64 - s[j] as i64;
            }
            visit(s, &gaps);
        }
        it.advance();
    }
    Ok(())
}

/// Labels of the partition induced by `|gaps|`, written into `out`.
pub(crate) fn induced_labels(gaps: &[i64], out: &mut Vec<usize>) {
    out.clear();
    let mut seen: [u64; 32] = [0; 32];
    let mut nseen = 0;
    for &g in gaps {
        let a = g.unsigned_abs();
        match seen[..nseen].iter().position(|&s| s == a) {
            Some(i) => out.push(i),
            None => {
                if nseen < seen.len() {
                    seen[nseen] = a;
                }
                nseen += 1;
                out.push(nseen - 1);
            }
        }
    }
}

/// `#S_n(π)`: tuples whose induced partition is exactly `π`.
pub fn count_s_n(pi: &Partition, n: usize) -> Result<u64> {
    Ok(count_both(pi, n)?.0)
}

/// `#S_n*(π)`.
pub fn count_s_n_star(pi: &Partition, n: usize) -> Result<u64> {
    Ok(count_both(pi, n)?.1)
}

fn count_both(pi: &Partition, n: usize) -> Result<(u64, u64)> {
    let k = pi.k();
    let mut labels = Vec::with_capacity(k);
    let (mut s, mut star) = (0u64, 0u64);
    for_each_tuple(n, k, |_, gaps| {
        induced_labels(gaps, &mut labels);
        if labels == pi.labels() {
            s += 1;
            if star_condition(gaps, &labels) {
                star += 1;
            }
        }
    })?;
    Ok((s, star))
}

/// `#S_n(π)` and `#S_n*(π)` for one partition class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub partition: Partition,
    pub s_n: u64,
    pub s_n_star: u64,
}

/// One pass over `T_n(k)` tallying every induced partition that occurs.
/// Partitions with no tuples are absent. Sorted by partition.
pub fn tally_classes(n: usize, k: usize) -> Result<Vec<ClassCount>> {
    let mut map: HashMap<Vec<usize>, (u64, u64)> = HashMap::new();
    let mut labels = Vec::with_capacity(k);
    for_each_tuple(n, k, |_, gaps| {
        induced_labels(gaps, &mut labels);
        let star = star_condition(gaps, &labels);
        let e = match map.get_mut(labels.as_slice()) {
            Some(e) => e,
            None => map.entry(labels.clone()).or_default(),
        };
        e.0 += 1;
        if star {
            e.1 += 1;
        }
    })?;
    let mut out: Vec<ClassCount> = map
        .into_iter()
        .map(|(labels, (s_n, s_n_star))| {
            let blocks = labels.iter().max().map_or(0, |m| m + 1);
            ClassCount {
                partition: Partition::from_rgs_unchecked(labels, blocks),
                s_n,
                s_n_star,
            }
        })
        .collect();
    out.sort_by(|a, b| a.partition.cmp(&b.partition));
    Ok(out)
}
