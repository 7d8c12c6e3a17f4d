use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A subset of ω that agrees with a union of residue classes beyond a
/// threshold. Always stored in canonical form: the period and then the
/// threshold are minimal for the denoted set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventuallyPeriodicSet {
    threshold: u64,
    /// Members below `threshold`.
    exceptions: BTreeSet<u64>,
    period: u64,
    /// `residues[r]` iff `r` mod `period` is a member class.
    residues: Vec<bool>,
}

impl EventuallyPeriodicSet {
    pub fn new(
        threshold: u64,
        exceptions: impl IntoIterator<Item = u64>,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self, Error> {
        if period == 0 {
            return Err(Error::Domain("period must be positive".into()));
        }
        let exceptions: BTreeSet<u64> = exceptions.into_iter().collect();
        if let Some(&e) = exceptions.iter().find(|&&e| e >= threshold) {
            return Err(Error::Domain(format!("exception {e} is not below the threshold {threshold}")));
        }
        let mut mask = vec![false; period as usize];
        for r in residues {
            if r >= period {
                return Err(Error::Domain(format!("residue {r} is not below the period {period}")));
            }
            mask[r as usize] = true;
        }
        Ok(Self::canonical(threshold, exceptions, mask))
    }

    /// Build from a membership predicate that is periodic with `period`
    /// from `threshold` on.
    pub fn from_fn(threshold: u64, period: u64, member: impl Fn(u64) -> bool) -> Self {
        assert!(period > 0);
        let exceptions = (0..threshold).filter(|&k| member(k)).collect();
        // residue r is read off at the first k ≥ threshold with k ≡ r
        let mask = (0..period)
            .map(|r| {
                let k = threshold + (r + period - threshold % period) % period;
                member(k)
            })
            .collect();
        Self::canonical(threshold, exceptions, mask)
    }

    fn canonical(mut threshold: u64, mut exceptions: BTreeSet<u64>, mask: Vec<bool>) -> Self {
        let p = mask.len() as u64;
        let d = (1..=p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (0..p).all(|r| mask[r as usize] == mask[(r % d) as usize]))
            .unwrap_or(p);
        let residues: Vec<bool> = mask[..d as usize].to_vec();
        while threshold > 0 {
            let k = threshold - 1;
            if exceptions.contains(&k) != residues[(k % d) as usize] {
                break;
            }
            exceptions.remove(&k);
            threshold = k;
        }
        EventuallyPeriodicSet {
            threshold,
            exceptions,
            period: d,
            residues,
        }
    }

    pub fn all() -> Self {
        Self::from_fn(0, 1, |_| true)
    }

    pub fn none() -> Self {
        Self::from_fn(0, 1, |_| false)
    }

    pub fn evens() -> Self {
        Self::residue_class(2, 0)
    }

    pub fn odds() -> Self {
        Self::residue_class(2, 1)
    }

    /// `{k : k ≡ r (mod p)}`.
    pub fn residue_class(p: u64, r: u64) -> Self {
        Self::from_fn(0, p, move |k| k % p == r % p)
    }

    pub fn finite(members: impl IntoIterator<Item = u64>) -> Self {
        let members: BTreeSet<u64> = members.into_iter().collect();
        let threshold = members.iter().next_back().map_or(0, |m| m + 1);
        Self::canonical(threshold, members, vec![false])
    }

    pub fn cofinite(missing: impl IntoIterator<Item = u64>) -> Self {
        Self::finite(missing).complement()
    }

    /// `{k : k ≥ n}`.
    pub fn at_least(n: u64) -> Self {
        Self::from_fn(n, 1, move |k| k >= n)
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn exceptions(&self) -> impl Iterator<Item = u64> + '_ {
        self.exceptions.iter().copied()
    }

    pub fn residues(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.period).filter(|&r| self.residues[r as usize])
    }

    /// Whether residue class `r` (mod the canonical period) is eventually
    /// contained in the set.
    pub fn has_residue(&self, r: u64) -> bool {
        self.residues[(r % self.period) as usize]
    }

    pub fn contains(&self, k: u64) -> bool {
        if k < self.threshold {
            self.exceptions.contains(&k)
        } else {
            self.has_residue(k)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.residues.iter().all(|&b| !b)
    }

    pub fn is_cofinite(&self) -> bool {
        self.residues.iter().all(|&b| b)
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && self.exceptions.is_empty()
    }

    pub fn complement(&self) -> Self {
        let exceptions = (0..self.threshold).filter(|k| !self.exceptions.contains(k)).collect();
        let mask = self.residues.iter().map(|b| !b).collect();
        Self::canonical(self.threshold, exceptions, mask)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let threshold = self.threshold.max(other.threshold);
        let period = self.period.lcm(&other.period);
        Self::from_fn(threshold, period, |k| op(self.contains(k), other.contains(k)))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// `self ⊆* other`: all but finitely many members of `self` lie in `other`.
    pub fn almost_subset(&self, other: &Self) -> bool {
        self.difference(other).is_finite()
    }

    /// Least member `≥ k`.
    pub fn next_member(&self, k: u64) -> Option<u64> {
        let periodic_from = k.max(self.threshold);
        if let Some(&e) = self.exceptions.range(k..).next() {
            return Some(e);
        }
        (periodic_from..periodic_from + self.period).find(|&j| self.has_residue(j))
    }

    pub fn least(&self) -> Option<u64> {
        self.next_member(0)
    }

    /// Members `k` with `lo ≤ k ≤ hi`.
    pub fn members_in(&self, lo: u64, hi: u64) -> impl Iterator<Item = u64> + '_ {
        (lo..=hi).filter(|&k| self.contains(k))
    }

    /// Number of members `k` with `lo ≤ k ≤ hi`.
    pub fn count_in(&self, lo: u64, hi: u64) -> u64 {
        if lo > hi {
            return 0;
        }
        let mut count = self.exceptions.range(lo..=hi).count() as u64;
        let start = lo.max(self.threshold);
        if start > hi {
            return count;
        }
        let len = hi - start + 1;
        let per_period = self.residues.iter().filter(|&&b| b).count() as u64;
        count += len / self.period * per_period;
        let rest = len % self.period;
        count += (0..rest).filter(|i| self.has_residue(hi - i)).count() as u64;
        count
    }
}

fn list(items: impl Iterator<Item = u64>) -> String {
    items.map(|k| k.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for EventuallyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::all() {
            return f.write_str("all");
        }
        if self.is_empty() {
            return f.write_str("none");
        }
        if self.is_finite() {
            return write!(f, "finite:{}", list(self.exceptions()));
        }
        if self.is_cofinite() {
            return write!(f, "cofinite:{}", list(self.complement().exceptions()));
        }
        if self.threshold == 0 {
            if *self == Self::evens() {
                return f.write_str("evens");
            }
            if *self == Self::odds() {
                return f.write_str("odds");
            }
            return write!(f, "mod{}:{}", self.period, list(self.residues()));
        }
        write!(
            f,
            "ep:{}:{}:{}:{}",
            self.threshold,
            list(self.exceptions()),
            self.period,
            list(self.residues())
        )
    }
}

impl fmt::Debug for EventuallyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("not a natural number: {t:?}")))
        })
        .collect()
}

impl FromStr for EventuallyPeriodicSet {
    type Err = Error;

    /// `all`, `none`, `evens`, `odds`, `mod<p>:<r,..>`, `finite:<k,..>`,
    /// `cofinite:<k,..>`, `ep:<threshold>:<exceptions>:<period>:<residues>`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a set: {s:?}"));
        match s {
            "all" => return Ok(Self::all()),
            "none" => return Ok(Self::none()),
            "evens" => return Ok(Self::evens()),
            "odds" => return Ok(Self::odds()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("finite:") {
            return Ok(Self::finite(parse_list(rest)?));
        }
        if let Some(rest) = s.strip_prefix("cofinite:") {
            return Ok(Self::cofinite(parse_list(rest)?));
        }
        if let Some(rest) = s.strip_prefix("mod") {
            let (p, rs) = rest.split_once(':').ok_or_else(bad)?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            return Self::new(0, [], p, parse_list(rs)?);
        }
        if let Some(rest) = s.strip_prefix("ep:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let [t, ex, p, rs] = parts.as_slice() else {
                return Err(bad());
            };
            let t: u64 = t.trim().parse().map_err(|_| bad())?;
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            return Self::new(t, parse_list(ex)?, p, parse_list(rs)?);
        }
        Err(bad())
    }
}

impl Serialize for EventuallyPeriodicSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventuallyPeriodicSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(s: &str) -> EventuallyPeriodicSet {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_period_and_threshold() {
        let x = EventuallyPeriodicSet::new(5, [0, 2, 4], 4, [0, 2]).unwrap();
        assert_eq!(x, EventuallyPeriodicSet::evens());
        assert_eq!(x.period(), 2);
        assert_eq!(x.threshold(), 0);
        let y = EventuallyPeriodicSet::new(3, [1], 6, [0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(y, EventuallyPeriodicSet::cofinite([0, 2]));
        assert_eq!(y.threshold(), 3);
        assert_eq!(y.period(), 1);
    }

    #[test]
    fn membership_and_counting() {
        let x = set("ep:4:1:3:2");
        assert!(x.contains(1) && !x.contains(2) && x.contains(5) && !x.contains(6));
        for lo in 0..12 {
            for hi in 0..20 {
                assert_eq!(x.count_in(lo, hi), x.members_in(lo, hi).count() as u64);
            }
        }
        assert_eq!(x.next_member(2), Some(5));
        assert_eq!(set("finite:3,9").next_member(10), None);
    }

    #[test]
    fn text_round_trip() {
        for s in ["all", "none", "evens", "odds", "mod3:0", "mod5:1,4", "finite:0,7", "cofinite:2", "ep:3:1:3:2"] {
            assert_eq!(set(s).to_string(), s);
        }
        assert!("mod0:".parse::<EventuallyPeriodicSet>().is_err());
        assert!("ep:2:5:3:1".parse::<EventuallyPeriodicSet>().is_err());
        assert!("mod3:3".parse::<EventuallyPeriodicSet>().is_err());
    }

    fn arb_set() -> impl Strategy<Value = EventuallyPeriodicSet> {
        (0u64..6, 1u64..7, any::<u64>(), any::<u64>()).prop_map(|(t, p, ex, rs)| {
            let ex: Vec<u64> = (0..t).filter(|k| ex >> k & 1 == 1).collect();
            let rs: Vec<u64> = (0..p).filter(|r| rs >> r & 1 == 1).collect();
            EventuallyPeriodicSet::new(t, ex, p, rs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn boolean_ops_are_pointwise(a in arb_set(), b in arb_set()) {
            let i = a.intersect(&b);
            let u = a.union(&b);
            let c = a.complement();
            for k in 0..100 {
                prop_assert_eq!(i.contains(k), a.contains(k) && b.contains(k));
                prop_assert_eq!(u.contains(k), a.contains(k) || b.contains(k));
                prop_assert_eq!(c.contains(k), !a.contains(k));
            }
        }

        #[test]
        fn representation_is_canonical(a in arb_set(), extra in 0u64..8, mult in 1u64..4) {
            // re-encode with a larger threshold and a multiple of the period
            let t = a.threshold() + extra;
            let p = a.period() * mult;
            let b = EventuallyPeriodicSet::from_fn(t, p, |k| a.contains(k));
            prop_assert_eq!(&b, &a);
            prop_assert_eq!(b.to_string().parse::<EventuallyPeriodicSet>().unwrap(), a);
        }
    }
}
