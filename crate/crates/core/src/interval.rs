use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A decomposition of ω into consecutive intervals
/// `I_n = [cuts(n), cuts(n+1) − 1]`; the last listed cut opens an unbounded
/// final interval.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct IntervalPartition {
    cuts: Vec<u64>,
}

impl IntervalPartition {
    pub fn new(cuts: Vec<u64>) -> Result<Self, Error> {
        if cuts.first() != Some(&0) {
            return Err(Error::Domain("interval partition cuts must start at 0".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!("cuts are not strictly increasing: {cuts:?}")));
        }
        Ok(IntervalPartition { cuts })
    }

    pub fn cuts(&self) -> &[u64] {
        &self.cuts
    }

    /// Number of intervals, counting the unbounded last one.
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The unique `n` with `k ∈ I_n`.
    pub fn interval_index(&self, k: u64) -> usize {
        self.cuts.partition_point(|&c| c <= k) - 1
    }

    /// `(min I_n, max I_n)`, with `None` for the unbounded last interval.
    pub fn interval(&self, n: usize) -> (u64, Option<u64>) {
        (self.cuts[n], self.cuts.get(n + 1).map(|c| c - 1))
    }
}

impl TryFrom<Vec<u64>> for IntervalPartition {
    type Error = Error;

    fn try_from(cuts: Vec<u64>) -> Result<Self, Error> {
        IntervalPartition::new(cuts)
    }
}

impl From<IntervalPartition> for Vec<u64> {
    fn from(p: IntervalPartition) -> Vec<u64> {
        p.cuts
    }
}

impl fmt::Display for IntervalPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cuts.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for IntervalPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cuts({self})")
    }
}

impl FromStr for IntervalPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let cuts = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad cut {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        IntervalPartition::new(cuts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices() {
        let p: IntervalPartition = "0,3,7".parse().unwrap();
        let idx: Vec<usize> = (0..10).map(|k| p.interval_index(k)).collect();
        assert_eq!(idx, [0, 0, 0, 1, 1, 1, 1, 2, 2, 2]);
        assert_eq!(p.interval(1), (3, Some(6)));
        assert_eq!(p.interval(2), (7, None));
    }

    #[test]
    fn validation() {
        assert!(IntervalPartition::new(vec![1, 2]).is_err());
        assert!(IntervalPartition::new(vec![0, 2, 2]).is_err());
        assert!(IntervalPartition::new(vec![]).is_err());
        assert!(serde_json::from_str::<IntervalPartition>("[0,5,3]").is_err());
    }
}
