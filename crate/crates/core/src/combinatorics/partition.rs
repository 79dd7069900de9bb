use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set accepted by [`enumerate_partitions`].
pub const MAX_PARTITION_K: usize = 12;

/// A set partition of `{1, ..., k}`.
///
/// Stored as a restricted growth string: `labels[i]` is the block of element
/// `i + 1`, and blocks are numbered in order of their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Partition {
    labels: Vec<usize>,
    num_blocks: usize,
}

impl Partition {
    /// Canonicalizes an arbitrary labeling (equal labels = same block).
    pub fn from_labels<T: PartialEq + Copy>(raw: &[T]) -> Self {
        let mut seen: Vec<T> = Vec::new();
        let labels = raw
            .iter()
            .map(|x| match seen.iter().position(|s| s == x) {
                Some(i) => i,
                None => {
                    seen.push(*x);
                    seen.len() - 1
                }
            })
            .collect();
        Self {
            labels,
            num_blocks: seen.len(),
        }
    }

    /// From 1-based blocks that must cover `{1, ..., k}` exactly once.
    pub fn from_blocks(k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; k];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Domain("partition blocks must be nonempty".into()));
            }
            for &x in block {
                if x == 0 || x > k || raw[x - 1] != usize::MAX {
                    return Err(Error::Domain(format!("element {x} is out of range or repeated")));
                }
                raw[x - 1] = b;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::Domain("blocks do not cover the ground set".into()));
        }
        Ok(Self::from_labels(&raw))
    }

    pub(crate) fn from_rgs_unchecked(labels: Vec<usize>, num_blocks: usize) -> Self {
        Self { labels, num_blocks }
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Number of blocks.
    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    /// Block labels per element, in restricted-growth form.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Whether 1-based elements `i` and `j` share a block.
    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.labels[i - 1] == self.labels[j - 1]
    }

    /// Blocks as ascending 1-based element lists, ordered by minimum.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks];
        for (i, &b) in self.labels.iter().enumerate() {
            out[b].push(i + 1);
        }
        out
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_blocks];
        for &b in &self.labels {
            sizes[b] += 1;
        }
        sizes
    }

    pub fn is_pair_partition(&self) -> bool {
        self.block_sizes().iter().all(|&s| s == 2)
    }
}

/// `{1,3}{2,4}`: blocks by minimum element, elements ascending.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            f.write_str("{")?;
            for (i, x) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed partition string {s:?}"));
        let s = s.trim();
        let inner = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')).ok_or_else(bad)?;
        let mut blocks = Vec::new();
        for part in inner.split("}{") {
            let block = part
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let k = blocks.iter().map(Vec::len).sum();
        Self::from_blocks(k, &blocks)
    }
}

impl From<Partition> for String {
    fn from(p: Partition) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Partition {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Restricted-growth-string iterator over all partitions of `{1, ..., k}`.
#[derive(Clone, Debug)]
pub struct Partitions {
    rgs: Vec<usize>,
    // prefix_max[i] = max(rgs[0..=i])
    prefix_max: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let k = self.rgs.len();
        let item = Partition::from_rgs_unchecked(self.rgs.clone(), self.prefix_max[k - 1] + 1);
        // advance: rightmost position that may still grow
        let mut i = k;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..k {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                break;
            }
        }
        Some(item)
    }
}

/// Every partition of `{1, ..., k}` exactly once, `1 <= k <= 12`.
pub fn enumerate_partitions(k: usize) -> Result<Partitions> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if k > MAX_PARTITION_K {
        return Err(Error::Guard(format!(
            "partitions of {{1..{k}}} exceed the k <= {MAX_PARTITION_K} guard"
        )));
    }
    Ok(Partitions {
        rgs: vec![0; k],
        prefix_max: vec![0; k],
        done: false,
    })
}
