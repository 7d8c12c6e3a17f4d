use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite binary string, written as a run of `0`/`1` characters.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Bits {
        Bits(bits)
    }

    pub fn empty() -> Bits {
        Bits(Vec::new())
    }

    /// `1^n`.
    pub fn ones(n: usize) -> Bits {
        Bits(vec![true; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Neither string is a prefix of the other.
    pub fn incompatible(&self, other: &Bits) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    pub fn pushed(&self, b: bool) -> Bits {
        let mut v = self.0.clone();
        v.push(b);
        Bits(v)
    }

    /// All strings of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Bits> {
        (0u64..1 << n).map(move |i| Bits((0..n).map(|j| i >> (n - 1 - j) & 1 == 1).collect()))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Bits, Error> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("not a bitstring: {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_relations() {
        let a: Bits = "10".parse().unwrap();
        let b: Bits = "1".parse().unwrap();
        assert!(b.is_prefix_of(&a));
        assert!(!a.incompatible(&b));
        assert!(a.incompatible(&"11".parse().unwrap()));
        assert!(Bits::empty().is_prefix_of(&a));
    }

    #[test]
    fn lexicographic_enumeration() {
        let all: Vec<String> = Bits::all_of_length(2).map(|b| b.to_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
        assert_eq!(Bits::all_of_length(0).count(), 1);
    }
}
