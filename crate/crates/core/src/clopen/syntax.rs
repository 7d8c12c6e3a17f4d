//! Text syntax: `x<k>`, `!`, `&`, `|`, parentheses, `0`, `1` and
//! `cyl(<k>,"<bits>")`. Precedence is `!` > `&` > `|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{is_terminal, Clopen, Coord, FALSE, TRUE};
use crate::error::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Or,
    And,
    Atom,
}

impl Clopen {
    fn render(&self, r: u32) -> (String, Prec) {
        match r {
            FALSE => return ("0".into(), Prec::Atom),
            TRUE => return ("1".into(), Prec::Atom),
            _ => {}
        }
        if let Some(text) = cube_text(self, r) {
            return text;
        }
        let n = self.node(r);
        let x = format!("x{}", n.var);
        let nx = format!("!x{}", n.var);
        let wrap = |(s, p): (String, Prec), min: Prec| {
            if p < min {
                format!("({s})")
            } else {
                s
            }
        };
        match (n.lo, n.hi) {
            (FALSE, hi) => (
                format!("{x} & {}", wrap(self.render(hi), Prec::And)),
                Prec::And,
            ),
            (lo, FALSE) => (
                format!("{nx} & {}", wrap(self.render(lo), Prec::And)),
                Prec::And,
            ),
            (TRUE, hi) => (
                format!("{nx} | {}", wrap(self.render(hi), Prec::Or)),
                Prec::Or,
            ),
            (lo, TRUE) => (
                format!("{x} | {}", wrap(self.render(lo), Prec::Or)),
                Prec::Or,
            ),
            (lo, hi) => (
                format!(
                    "{x} & {} | {nx} & {}",
                    wrap(self.render(hi), Prec::And),
                    wrap(self.render(lo), Prec::And)
                ),
                Prec::Or,
            ),
        }
    }
}

/// Single conjunctions of literals print as `x3`, `!x3` or `cyl(k,"..")`
/// when the coordinates are contiguous.
fn cube_text(c: &Clopen, mut r: u32) -> Option<(String, Prec)> {
    let mut lits: Vec<(Coord, bool)> = Vec::new();
    while !is_terminal(r) {
        let n = c.node(r);
        if n.lo == FALSE {
            lits.push((n.var, true));
            r = n.hi;
        } else if n.hi == FALSE {
            lits.push((n.var, false));
            r = n.lo;
        } else {
            return None;
        }
    }
    if r != TRUE {
        return None;
    }
    match lits.as_slice() {
        [(v, true)] => Some((format!("x{v}"), Prec::Atom)),
        [(v, false)] => Some((format!("!x{v}"), Prec::Atom)),
        _ => {
            let contiguous = lits.windows(2).all(|w| w[1].0 == w[0].0 + 1);
            if !contiguous {
                return None;
            }
            let bits: String = lits.iter().map(|&(_, b)| if b { '1' } else { '0' }).collect();
            Some((format!("cyl({},\"{}\")", lits[0].0, bits), Prec::Atom))
        }
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.root).0)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at byte {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Coord, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("expected a coordinate"))
    }

    fn expr(&mut self) -> Result<Clopen, Error> {
        let mut acc = self.term()?;
        while self.eat("|") {
            acc = acc.join(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Clopen, Error> {
        let mut acc = self.factor()?;
        while self.eat("&") {
            acc = acc.meet(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Clopen, Error> {
        match self.peek() {
            Some('!') => {
                self.pos += 1;
                Ok(self.factor()?.complement())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(")") {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Clopen::zero())
            }
            Some('1') => {
                self.pos += 1;
                Ok(Clopen::one())
            }
            Some('x') => {
                self.pos += 1;
                Ok(Clopen::var(self.number()?))
            }
            Some('c') => {
                if !self.eat("cyl(") {
                    return Err(self.err("expected 'cyl('"));
                }
                let offset = self.number()?;
                if !self.eat(",") || !self.eat("\"") {
                    return Err(self.err("expected ,\"bits\""));
                }
                let start = self.pos;
                while self.src[self.pos..].starts_with(['0', '1']) {
                    self.pos += 1;
                }
                let pattern: Vec<bool> = self.src[start..self.pos].chars().map(|c| c == '1').collect();
                if !self.eat("\"") || !self.eat(")") {
                    return Err(self.err("unterminated cyl(...)"));
                }
                Ok(Clopen::cylinder(offset, &pattern))
            }
            _ => Err(self.err("unexpected input")),
        }
    }
}

impl FromStr for Clopen {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut p = Parser { src: s, pos: 0 };
        let c = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(c)
    }
}

impl Serialize for Clopen {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Clopen {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(s: &str) -> Clopen {
        s.parse().unwrap()
    }

    #[test]
    fn parses_operators() {
        assert_eq!(c("x0 & !x0"), Clopen::zero());
        assert_eq!(c("x0 | !x0"), Clopen::one());
        assert_eq!(c("cyl(3,\"01\")"), Clopen::cube([(3, false), (4, true)]));
        assert_eq!(c("!(x1 | x2)"), c("!x1 & !x2"));
        assert_eq!(c("x1 | x2 & x3"), c("x1 | (x2 & x3)"));
    }

    #[test]
    fn prints_cylinders() {
        assert_eq!(Clopen::cylinder(3, &[false, true]).to_string(), "cyl(3,\"01\")");
        assert_eq!(Clopen::var(7).to_string(), "x7");
        assert_eq!(Clopen::one().to_string(), "1");
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "x", "x1 &", "cyl(1,\"2\")", "(x1", "x1 x2", "y3"] {
            assert!(s.parse::<Clopen>().is_err(), "{s}");
        }
    }

    fn arb_clopen() -> impl Strategy<Value = Clopen> {
        (prop::collection::vec(0u64..10, 0..5), any::<u64>()).prop_map(|(mut vars, table)| {
            vars.sort();
            vars.dedup();
            Clopen::from_truth_table(&vars, |i| table >> (i % 64) & 1 == 1)
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(x in arb_clopen()) {
            let text = x.to_string();
            prop_assert_eq!(text.parse::<Clopen>().unwrap(), x);
        }
    }
}
