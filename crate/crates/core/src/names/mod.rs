//! Finitely described names: sequences `k ↦ M(k)` of clopens, built from
//! atoms (a finite prefix followed by a tail rule) and pointwise Boolean
//! operations.

mod bits;
mod order;
mod periodic;
mod syntax;
pub(crate) mod tail;

pub use bits::Bits;
pub use order::{finiteness_certificate, leq_name, Finiteness, InfinitenessEvidence, LeqVerdict, ProofClass};
pub use periodic::EventuallyPeriodicSet;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clopen::{Clopen, Coord};
use crate::error::Error;
use crate::interval::IntervalPartition;
use crate::schedule::Schedule;

/// Coordinates `[0, reserve)` are never used by fresh blocks.
pub const DEFAULT_RESERVE: u64 = 64;

fn default_reserve() -> u64 {
    DEFAULT_RESERVE
}

/// How an atom continues after its prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TailRule {
    Zero,
    One,
    Constant {
        c: Clopen,
    },
    /// `k ↦ cylinder(k, pattern)`.
    SlidingPattern {
        pattern: Bits,
    },
    /// `k ↦ ⋁_{s} cylinder(k, s)` over pairwise incompatible strings.
    SlidingUnion {
        patterns: Vec<Bits>,
    },
    /// `k ↦ 1` on the set and `0` off it.
    Indicator {
        set: EventuallyPeriodicSet,
    },
    /// `k ↦` a clopen of measure `a_k` on its own block of coordinates.
    FreshBlocks {
        schedule: Schedule,
        #[serde(default = "default_reserve")]
        reserve: u64,
    },
    /// `k ↦ pieces[n](k)` for `k ∈ I_n`; the last piece continues past the
    /// listed intervals.
    Spliced {
        cuts: IntervalPartition,
        pieces: Vec<Name>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Name {
    Atom {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        prefix: Vec<Clopen>,
        tail: TailRule,
    },
    Meet {
        left: Arc<Name>,
        right: Arc<Name>,
    },
    Join {
        left: Arc<Name>,
        right: Arc<Name>,
    },
    Complement {
        child: Arc<Name>,
    },
    AndConst {
        child: Arc<Name>,
        q: Clopen,
    },
}

/// The `k`-th block of a fresh independent family: the clopen
/// "the block, read as a binary number, is below `m_k`", where
/// `a_k = m_k / 2^{w_k}`.
pub fn fresh_block(schedule: &Schedule, reserve: u64, k: u64) -> Clopen {
    let a = schedule.value(k);
    let base = reserve + schedule.offset(k);
    let vars: Vec<Coord> = (base..base + a.exponent() as u64).collect();
    Clopen::less_than(&vars, a.numerator())
}

impl TailRule {
    pub fn eval(&self, k: u64) -> Clopen {
        match self {
            TailRule::Zero => Clopen::zero(),
            TailRule::One => Clopen::one(),
            TailRule::Constant { c } => c.clone(),
            TailRule::SlidingPattern { pattern } => Clopen::cylinder(k, pattern.as_slice()),
            TailRule::SlidingUnion { patterns } => patterns
                .iter()
                .fold(Clopen::zero(), |acc, s| acc.join(&Clopen::cylinder(k, s.as_slice()))),
            TailRule::Indicator { set } => {
                if set.contains(k) {
                    Clopen::one()
                } else {
                    Clopen::zero()
                }
            }
            TailRule::FreshBlocks { schedule, reserve } => fresh_block(schedule, *reserve, k),
            TailRule::Spliced { cuts, pieces } => {
                let n = cuts.interval_index(k).min(pieces.len() - 1);
                pieces[n].eval(k)
            }
        }
    }
}

impl Name {
    pub fn atom(prefix: Vec<Clopen>, tail: TailRule) -> Name {
        Name::Atom { prefix, tail }
    }

    fn tail(tail: TailRule) -> Name {
        Name::atom(Vec::new(), tail)
    }

    pub fn zero() -> Name {
        Name::tail(TailRule::Zero)
    }

    pub fn one() -> Name {
        Name::tail(TailRule::One)
    }

    /// `vec(q)`: the constant sequence `q`.
    pub fn vec(q: Clopen) -> Name {
        Name::tail(TailRule::Constant { c: q })
    }

    pub fn sliding(pattern: Bits) -> Name {
        Name::tail(TailRule::SlidingPattern { pattern })
    }

    pub fn sliding_union(patterns: Vec<Bits>) -> Result<Name, Error> {
        let n = Name::tail(TailRule::SlidingUnion { patterns });
        n.validate()?;
        Ok(n)
    }

    /// `X̌`: `k ↦ 1` if `k ∈ X`, else `0`.
    pub fn indicator(set: EventuallyPeriodicSet) -> Name {
        Name::tail(TailRule::Indicator { set })
    }

    pub fn fresh_blocks(schedule: Schedule, reserve: u64) -> Name {
        Name::tail(TailRule::FreshBlocks { schedule, reserve })
    }

    pub fn spliced(cuts: IntervalPartition, pieces: Vec<Name>) -> Result<Name, Error> {
        let n = Name::tail(TailRule::Spliced { cuts, pieces });
        n.validate()?;
        Ok(n)
    }

    pub fn meet(&self, other: &Name) -> Name {
        Name::Meet {
            left: Arc::new(self.clone()),
            right: Arc::new(other.clone()),
        }
    }

    pub fn join(&self, other: &Name) -> Name {
        Name::Join {
            left: Arc::new(self.clone()),
            right: Arc::new(other.clone()),
        }
    }

    pub fn complement(&self) -> Name {
        Name::Complement {
            child: Arc::new(self.clone()),
        }
    }

    /// `M ∧ vec(q)`.
    pub fn and_const(&self, q: &Clopen) -> Name {
        Name::AndConst {
            child: Arc::new(self.clone()),
            q: q.clone(),
        }
    }

    /// `M(k)`.
    pub fn eval(&self, k: u64) -> Clopen {
        match self {
            Name::Atom { prefix, tail } => match prefix.get(k as usize) {
                Some(c) => c.clone(),
                None => tail.eval(k),
            },
            Name::Meet { left, right } => left.eval(k).meet(&right.eval(k)),
            Name::Join { left, right } => left.eval(k).join(&right.eval(k)),
            Name::Complement { child } => child.eval(k).complement(),
            Name::AndConst { child, q } => child.eval(k).meet(q),
        }
    }

    /// The tail rule when this name is a bare atom.
    pub fn as_atom(&self) -> Option<(&[Clopen], &TailRule)> {
        match self {
            Name::Atom { prefix, tail } => Some((prefix, tail)),
            _ => None,
        }
    }

    /// Check the structural invariants that deserialization cannot enforce.
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            Name::Atom { tail, .. } => match tail {
                TailRule::SlidingUnion { patterns } => {
                    for (i, a) in patterns.iter().enumerate() {
                        if let Some(b) = patterns[i + 1..].iter().find(|b| !a.incompatible(b)) {
                            return Err(Error::Domain(format!(
                                "sliding union strings {a} and {b} are not incompatible"
                            )));
                        }
                    }
                    Ok(())
                }
                TailRule::FreshBlocks { schedule, .. } => schedule.validate(),
                TailRule::Spliced { cuts, pieces } => {
                    if pieces.is_empty() || pieces.len() > cuts.len() || pieces.len() + 1 < cuts.len() {
                        return Err(Error::LengthMismatch {
                            intervals: cuts.len(),
                            names: pieces.len(),
                        });
                    }
                    pieces.iter().try_for_each(Name::validate)
                }
                _ => Ok(()),
            },
            Name::Meet { left, right } | Name::Join { left, right } => {
                left.validate()?;
                right.validate()
            }
            Name::Complement { child } | Name::AndConst { child, .. } => child.validate(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("names always serialize")
    }

    pub fn from_json(s: &str) -> Result<Name, Error> {
        let n: Name = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        n.validate()?;
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn eval_atoms() {
        assert_eq!(Name::sliding(b("01")).eval(7), Clopen::cylinder(7, &[false, true]));
        let evens = Name::indicator(EventuallyPeriodicSet::evens());
        assert_eq!(evens.eval(4), Clopen::one());
        assert_eq!(evens.eval(5), Clopen::zero());
        let q: Clopen = "x1 & !x4".parse().unwrap();
        for k in [0, 3, 100] {
            assert_eq!(Name::vec(q.clone()).eval(k), q);
        }
    }

    #[test]
    fn pointwise_ops() {
        let zero = Name::sliding(b("0"));
        let one = Name::sliding(b("1"));
        for k in 0..20 {
            assert!(zero.meet(&one).eval(k).is_zero());
            assert!(zero.join(&one).eval(k).is_one());
            assert!(one.meet(&one.complement()).eval(k).is_zero());
        }
        let r = one.and_const(&Clopen::cylinder(0, &[true]));
        assert_eq!(r.eval(0), Clopen::cylinder(0, &[true]));
        assert_eq!(r.eval(3).measure(), Dyadic::new(1, 2));
    }

    #[test]
    fn fresh_blocks_have_prescribed_measure() {
        let s: Schedule = "explicit(3/8,1,0,5/16;power)".parse().unwrap();
        let m = Name::fresh_blocks(s.clone(), DEFAULT_RESERVE);
        for k in 0..30 {
            let c = m.eval(k);
            assert_eq!(c.measure(), s.value(k));
            assert!(c.min_coord().is_none_or(|v| v >= DEFAULT_RESERVE));
        }
    }

    #[test]
    fn splice_uses_interval_pieces() {
        let a = Name::sliding(b("0"));
        let bb = Name::sliding(b("1"));
        let m = Name::spliced("0,3,7".parse().unwrap(), vec![a.clone(), bb.clone()]).unwrap();
        assert_eq!(m.eval(2), a.eval(2));
        assert_eq!(m.eval(5), bb.eval(5));
        assert_eq!(m.eval(50), bb.eval(50));
        assert!(matches!(
            Name::spliced("0,3,7".parse().unwrap(), vec![a.clone()]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(Name::spliced("0,3".parse().unwrap(), vec![a.clone(), a.clone(), a]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = Name::sliding(b("01"))
            .meet(&Name::indicator("mod3:1".parse().unwrap()))
            .and_const(&"x2 | x5".parse().unwrap())
            .join(&Name::fresh_blocks(Schedule::PowerDecay, 64).complement());
        let json = m.to_json();
        assert_eq!(Name::from_json(&json).unwrap(), m);
        let atom = r#"{"kind":"atom","prefix":["x0"],"tail":{"rule":"sliding_pattern","pattern":"01"}}"#;
        let n = Name::from_json(atom).unwrap();
        assert_eq!(n.eval(0), Clopen::var(0));
        assert!(Name::from_json(r#"{"kind":"atom","tail":{"rule":"sliding_union","patterns":["0","01"]}}"#).is_err());
    }
}
