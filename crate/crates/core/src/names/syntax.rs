//! Inline name syntax: `zero`, `one`, `vec:<clopen>`, `Ms:<bits>`,
//! `Msu:<bits>,<bits>,..`, `Malpha:<p/q>@<depth>`, `ind:<set>`,
//! `indep:<schedule>`. Anything starting with `{` is read as JSON.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::{Bits, Name, TailRule, DEFAULT_RESERVE};
use crate::error::Error;

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
            if num_traits::Zero::is_zero(&q) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Name {
    type Err = Error;

    fn from_str(s: &str) -> Result<Name, Error> {
        let s = s.trim();
        if s.starts_with('{') {
            return Name::from_json(s);
        }
        match s {
            "zero" => return Ok(Name::zero()),
            "one" => return Ok(Name::one()),
            _ => {}
        }
        let (head, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("not a name: {s:?}")))?;
        match head {
            "vec" => Ok(Name::vec(body.parse()?)),
            "Ms" => Ok(crate::solovay::make_ms(&body.parse()?)),
            "Msu" => {
                let patterns = if body.is_empty() {
                    Vec::new()
                } else {
                    body.split(',').map(str::parse).collect::<Result<Vec<Bits>, _>>()?
                };
                Name::sliding_union(patterns)
            }
            "Malpha" => {
                let (alpha, depth) = body
                    .split_once('@')
                    .ok_or_else(|| Error::Parse(format!("expected Malpha:<p/q>@<depth>, got {s:?}")))?;
                let depth: u32 = depth
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad depth in {s:?}")))?;
                crate::solovay::make_malpha(&parse_rational(alpha)?, depth)
            }
            "ind" => Ok(Name::indicator(body.parse()?)),
            "indep" => crate::filters::fresh_independent(&body.parse()?),
            _ => Err(Error::Parse(format!("unknown name form {head:?}"))),
        }
    }
}

/// Prints the inline form when one exists and compact JSON otherwise.
impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Name::Atom { prefix, tail } = self {
            if prefix.is_empty() {
                match tail {
                    TailRule::Zero => return f.write_str("zero"),
                    TailRule::One => return f.write_str("one"),
                    TailRule::Constant { c } => return write!(f, "vec:{c}"),
                    TailRule::SlidingPattern { pattern } if !pattern.is_empty() => {
                        return write!(f, "Ms:{pattern}")
                    }
                    TailRule::SlidingUnion { patterns } if patterns.iter().all(|p| !p.is_empty()) => {
                        let ps: Vec<String> = patterns.iter().map(|p| p.to_string()).collect();
                        return write!(f, "Msu:{}", ps.join(","));
                    }
                    TailRule::Indicator { set } => return write!(f, "ind:{set}"),
                    TailRule::FreshBlocks { schedule, reserve } if *reserve == DEFAULT_RESERVE => {
                        return write!(f, "indep:{schedule}")
                    }
                    _ => {}
                }
            }
        }
        f.write_str(&self.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::Clopen;

    #[test]
    fn inline_forms() {
        let n: Name = "Ms:01".parse().unwrap();
        assert_eq!(n.eval(3), Clopen::cylinder(3, &[false, true]));
        assert_eq!("Ms:".parse::<Name>().unwrap(), Name::vec(Clopen::one()));
        let a: Name = "Malpha:5/8@8".parse().unwrap();
        assert_eq!(a.to_string(), "Msu:0,100");
        let x: Name = "ind:evens".parse().unwrap();
        assert!(x.eval(2).is_one());
        assert!("Msu:0,01".parse::<Name>().is_err());
        assert!("Malpha:3/2@4".parse::<Name>().is_err());
        assert!("foo:1".parse::<Name>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["zero", "one", "vec:cyl(1,\"10\")", "Ms:110", "Msu:0,10", "ind:mod3:1", "indep:power"] {
            let n: Name = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        let compound = "Ms:1".parse::<Name>().unwrap().meet(&"ind:odds".parse().unwrap());
        assert_eq!(compound.to_string().parse::<Name>().unwrap(), compound);
    }
}
