use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::Error;

/// A rule `k ↦ a_k ∈ [0, 1]` with dyadic values.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Schedule {
    Constant(Dyadic),
    /// `a_k = 2^−⌊log₂(k+1)⌋`.
    PowerDecay,
    /// `a_k = 2^−(k+c)`.
    Geometric(u32),
    /// Listed values for `k < values.len()`, then the tail rule evaluated at
    /// the absolute index `k`. Without a tail the values are zero.
    Explicit {
        values: Vec<Dyadic>,
        tail: Option<Box<Schedule>>,
    },
}

fn floor_log2(n: u64) -> u32 {
    63 - n.leading_zeros()
}

impl Schedule {
    pub fn constant(a: Dyadic) -> Result<Schedule, Error> {
        let s = Schedule::Constant(a);
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(values: Vec<Dyadic>, tail: Option<Schedule>) -> Result<Schedule, Error> {
        let s = Schedule::Explicit {
            values,
            tail: tail.map(Box::new),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            Schedule::Constant(a) if !a.in_unit_interval() => {
                Err(Error::Domain(format!("schedule value {a} is outside [0,1]")))
            }
            Schedule::Explicit { values, tail } => {
                if let Some(a) = values.iter().find(|a| !a.in_unit_interval()) {
                    return Err(Error::Domain(format!("schedule value {a} is outside [0,1]")));
                }
                tail.as_ref().map_or(Ok(()), |t| t.validate())
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, k: u64) -> Dyadic {
        match self {
            Schedule::Constant(a) => a.clone(),
            Schedule::PowerDecay => Dyadic::pow2_neg(floor_log2(k + 1)),
            Schedule::Geometric(c) => Dyadic::pow2_neg(k as u32 + c),
            Schedule::Explicit { values, tail } => match values.get(k as usize) {
                Some(a) => a.clone(),
                None => tail.as_ref().map_or_else(Dyadic::zero, |t| t.value(k)),
            },
        }
    }

    /// Exponent `w_k` of `a_k = m_k / 2^{w_k}` in lowest terms.
    pub fn width(&self, k: u64) -> u32 {
        match self {
            Schedule::Constant(a) => a.exponent(),
            Schedule::PowerDecay => floor_log2(k + 1),
            Schedule::Geometric(c) => k as u32 + c,
            Schedule::Explicit { .. } => self.value(k).exponent(),
        }
    }

    /// `Σ_{j<k} w_j`.
    pub fn offset(&self, k: u64) -> u64 {
        match self {
            Schedule::Constant(a) => k * a.exponent() as u64,
            Schedule::PowerDecay => {
                // Σ_{i=1}^{k} ⌊log₂ i⌋ = (k+1)L − 2^{L+1} + 2 with L = ⌊log₂ k⌋
                if k == 0 {
                    return 0;
                }
                let l = floor_log2(k) as u64;
                (k + 1) * l + 2 - (1u64 << (l + 1))
            }
            Schedule::Geometric(c) => k * k.saturating_sub(1) / 2 + k * *c as u64,
            Schedule::Explicit { values, tail } => {
                let n = values.len() as u64;
                let listed: u64 = values.iter().take(k as usize).map(|a| a.exponent() as u64).sum();
                match tail {
                    Some(t) if k > n => listed + t.offset(k) - t.offset(n),
                    _ => listed,
                }
            }
        }
    }

    /// `Some((s, a))` when `a_k = a` for every `k ≥ s`.
    pub fn eventually_constant(&self) -> Option<(u64, Dyadic)> {
        match self {
            Schedule::Constant(a) => Some((0, a.clone())),
            Schedule::PowerDecay | Schedule::Geometric(_) => None,
            Schedule::Explicit { values, tail } => {
                let n = values.len() as u64;
                match tail {
                    None => Some((n, Dyadic::zero())),
                    Some(t) => t.eventually_constant().map(|(s, a)| (s.max(n), a)),
                }
            }
        }
    }

    pub fn is_zero_one_valued(&self) -> bool {
        matches!(self, Schedule::Constant(a) if a.is_zero() || a.is_one())
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Constant(a) => write!(f, "const({a})"),
            Schedule::PowerDecay => f.write_str("power"),
            Schedule::Geometric(c) => write!(f, "geom({c})"),
            Schedule::Explicit { values, tail } => {
                let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "explicit({}", vs.join(","))?;
                if let Some(t) = tail {
                    write!(f, ";{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// `const(<a>)`, `power`, `geom(<c>)`, `explicit(<a>,..[;<schedule>])`.
    fn from_str(s: &str) -> Result<Schedule, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a schedule: {s:?}"));
        if s == "power" {
            return Ok(Schedule::PowerDecay);
        }
        let (head, body) = s
            .strip_suffix(')')
            .and_then(|t| t.split_once('('))
            .ok_or_else(bad)?;
        match head.trim() {
            "const" => Schedule::constant(body.parse()?),
            "geom" => Ok(Schedule::Geometric(body.trim().parse().map_err(|_| bad())?)),
            "explicit" => {
                let (vals, tail) = match body.split_once(';') {
                    Some((v, t)) => (v, Some(t.parse::<Schedule>()?)),
                    None => (body, None),
                };
                let values = if vals.trim().is_empty() {
                    Vec::new()
                } else {
                    vals.split(',').map(str::parse).collect::<Result<Vec<Dyadic>, _>>()?
                };
                Schedule::explicit(values, tail)
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn values() {
        assert_eq!(Schedule::PowerDecay.value(6), d("1/4"));
        assert_eq!(Schedule::PowerDecay.value(0), d("1"));
        assert_eq!(Schedule::Geometric(2).value(3), d("1/32"));
        let e: Schedule = "explicit(1/2,3/4;geom(0))".parse().unwrap();
        assert_eq!(e.value(1), d("3/4"));
        assert_eq!(e.value(5), d("1/32"));
        let z: Schedule = "explicit(1/2)".parse().unwrap();
        assert_eq!(z.value(9), Dyadic::zero());
    }

    #[test]
    fn offsets_match_running_sums() {
        let schedules: Vec<Schedule> = ["const(3/8)", "power", "geom(1)", "explicit(1/2,3/4,1;power)", "explicit(1/8)"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        for s in &schedules {
            let mut acc = 0u64;
            for k in 0..40 {
                assert_eq!(s.offset(k), acc, "{s} at {k}");
                acc += s.width(k) as u64;
            }
        }
    }

    #[test]
    fn text_round_trip_and_validation() {
        for s in ["const(1/2)", "power", "geom(3)", "explicit(1/2,1;const(1/4))", "explicit()"] {
            assert_eq!(s.parse::<Schedule>().unwrap().to_string(), s);
        }
        assert!("const(3/2)".parse::<Schedule>().is_err());
        assert!("const(1/3)".parse::<Schedule>().is_err());
        assert!("sqrt".parse::<Schedule>().is_err());
    }

    #[test]
    fn eventual_constancy() {
        let e: Schedule = "explicit(1/2,3/4;const(1/4))".parse().unwrap();
        assert_eq!(e.eventually_constant(), Some((2, d("1/4"))));
        assert_eq!(Schedule::PowerDecay.eventually_constant(), None);
    }
}
