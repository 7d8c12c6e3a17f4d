//! Symbolic tails. For an analyzable name there are `start`, a period `P`
//! and shapes `G_0, …, G_{P−1}` such that `M(k)` is `G_{k mod P}` with every
//! moving variable `(stride, rel)` replaced by the coordinate
//! `stride·k + rel`, for all `k ≥ start`. Coordinates below `MOVING` stand
//! for themselves.

use std::collections::BTreeMap;

use num_integer::Integer;

use super::{Name, TailRule};
use crate::clopen::{BoolOp, Clopen, Coord};

pub(crate) const MOVING: Coord = 1 << 32;
const BIAS: i64 = 1 << 31;

pub(crate) fn moving(stride: u64, rel: i64) -> Coord {
    debug_assert!(stride > 0 && stride < BIAS as u64 && rel > -BIAS && rel < BIAS);
    (stride << 32) | (rel + BIAS) as u64
}

pub(crate) fn decode(v: Coord) -> Option<(u64, i64)> {
    if v < MOVING {
        None
    } else {
        Some((v >> 32, (v & 0xffff_ffff) as i64 - BIAS))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TailForm {
    pub start: u64,
    pub period: u64,
    pub shapes: Vec<Clopen>,
}

impl TailForm {
    pub fn uniform(start: u64, shape: Clopen) -> TailForm {
        TailForm {
            start,
            period: 1,
            shapes: vec![shape],
        }
    }

    pub fn shape(&self, k: u64) -> &Clopen {
        &self.shapes[(k % self.period) as usize]
    }

    #[cfg(test)]
    pub fn materialize(shape: &Clopen, k: u64) -> Clopen {
        shape.rename(|v| match decode(v) {
            None => v,
            Some((s, r)) => (s as i64 * k as i64 + r) as u64,
        })
    }

    /// `M(k)` for `k ≥ start`.
    #[cfg(test)]
    pub fn at(&self, k: u64) -> Clopen {
        debug_assert!(k >= self.start);
        Self::materialize(self.shape(k), k)
    }

    fn zip(&self, other: &TailForm, f: impl Fn(&Clopen, &Clopen) -> Clopen) -> TailForm {
        let period = self.period.lcm(&other.period);
        let shapes = (0..period).map(|r| f(self.shape(r), other.shape(r))).collect();
        TailForm {
            start: self.start.max(other.start),
            period,
            shapes,
        }
        .reduced()
    }

    pub fn apply(&self, op: BoolOp, other: &TailForm) -> TailForm {
        self.zip(other, |a, b| a.apply(op, b))
    }

    pub fn complement(&self) -> TailForm {
        TailForm {
            start: self.start,
            period: self.period,
            shapes: self.shapes.iter().map(Clopen::complement).collect(),
        }
    }

    pub fn with_start(mut self, start: u64) -> TailForm {
        self.start = self.start.max(start);
        self
    }

    /// Shrink to the least period.
    fn reduced(mut self) -> TailForm {
        let p = self.period;
        if let Some(d) = (1..p)
            .filter(|d| p.is_multiple_of(*d))
            .find(|&d| (0..p).all(|r| self.shapes[r as usize] == self.shapes[(r % d) as usize]))
        {
            self.shapes.truncate(d as usize);
            self.period = d;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.shapes.iter().all(Clopen::is_zero)
    }

    pub fn max_fixed(&self) -> Option<Coord> {
        self.shapes
            .iter()
            .flat_map(|s| s.support())
            .filter(|&v| v < MOVING)
            .max()
    }

    /// Per stride, the least and greatest relative offset used.
    pub fn moving_groups(&self) -> BTreeMap<u64, (i64, i64)> {
        moving_groups(self.shapes.iter())
    }

    /// An index `K ≥ start` from which materialization is injective, every
    /// moving coordinate is non-negative and lies above every fixed
    /// coordinate of the shapes and above `extra`, and strides occupy
    /// disjoint, ordered coordinate ranges. All of these persist for larger
    /// `k`.
    pub fn injective_from(&self, extra: Option<Coord>) -> u64 {
        let fixed = self.max_fixed().max(extra);
        let groups: Vec<(u64, (i64, i64))> = self.moving_groups().into_iter().collect();
        let mut k = self.start;
        for &(s, (lo, _)) in &groups {
            let need = match fixed {
                Some(f) => f as i64 + 1 - lo,
                None => -lo,
            };
            k = k.max(ceil_div(need, s as i64));
        }
        for (i, &(sb, (_, hb))) in groups.iter().enumerate() {
            for &(sa, (la, _)) in &groups[i + 1..] {
                k = k.max(ceil_div(hb - la + 1, (sa - sb) as i64));
            }
        }
        k
    }
}

pub(crate) fn moving_groups<'a>(shapes: impl Iterator<Item = &'a Clopen>) -> BTreeMap<u64, (i64, i64)> {
    let mut groups: BTreeMap<u64, (i64, i64)> = BTreeMap::new();
    for v in shapes.flat_map(|s| s.support()) {
        if let Some((s, r)) = decode(v) {
            let e = groups.entry(s).or_insert((r, r));
            e.0 = e.0.min(r);
            e.1 = e.1.max(r);
        }
    }
    groups
}

/// Smallest non-negative `k` with `k·d ≥ n`.
fn ceil_div(n: i64, d: i64) -> u64 {
    if n <= 0 {
        0
    } else {
        ((n + d - 1) / d) as u64
    }
}

fn fixed_ok(c: &Clopen) -> bool {
    c.max_coord().is_none_or(|v| v < MOVING)
}

fn sliding_shape(pattern: &[bool]) -> Clopen {
    Clopen::cube(pattern.iter().enumerate().map(|(i, &b)| (moving(1, i as i64), b)))
}

fn tail_form(prefix_len: u64, tail: &TailRule) -> Option<TailForm> {
    let form = match tail {
        TailRule::Zero => TailForm::uniform(0, Clopen::zero()),
        TailRule::One => TailForm::uniform(0, Clopen::one()),
        TailRule::Constant { c } => {
            if !fixed_ok(c) {
                return None;
            }
            TailForm::uniform(0, c.clone())
        }
        TailRule::SlidingPattern { pattern } => TailForm::uniform(0, sliding_shape(pattern.as_slice())),
        TailRule::SlidingUnion { patterns } => TailForm::uniform(
            0,
            patterns
                .iter()
                .fold(Clopen::zero(), |acc, s| acc.join(&sliding_shape(s.as_slice()))),
        ),
        TailRule::Indicator { set } => TailForm {
            start: set.threshold(),
            period: set.period(),
            shapes: (0..set.period())
                .map(|r| if set.has_residue(r) { Clopen::one() } else { Clopen::zero() })
                .collect(),
        },
        TailRule::FreshBlocks { schedule, reserve } => {
            let (s0, a) = schedule.eventually_constant()?;
            let w = a.exponent() as u64;
            if w == 0 {
                let shape = if num_traits::Zero::is_zero(&a) { Clopen::zero() } else { Clopen::one() };
                TailForm::uniform(s0, shape)
            } else {
                let base = *reserve as i64 + schedule.offset(s0) as i64 - (s0 * w) as i64;
                let vars: Vec<Coord> = (0..w as i64).map(|j| moving(w, base + j)).collect();
                TailForm::uniform(s0, Clopen::less_than(&vars, a.numerator()))
            }
        }
        TailRule::Spliced { cuts, pieces } => {
            let last = pieces.last()?;
            analyze(last)?.with_start(cuts.cuts()[pieces.len() - 1])
        }
    };
    Some(form.with_start(prefix_len))
}

/// The symbolic tail of `m`, when every atom is analyzable.
pub(crate) fn analyze(m: &Name) -> Option<TailForm> {
    match m {
        Name::Atom { prefix, tail } => tail_form(prefix.len() as u64, tail),
        Name::Meet { left, right } => Some(analyze(left)?.apply(BoolOp::Meet, &analyze(right)?)),
        Name::Join { left, right } => Some(analyze(left)?.apply(BoolOp::Join, &analyze(right)?)),
        Name::Complement { child } => Some(analyze(child)?.complement()),
        Name::AndConst { child, q } => {
            if !fixed_ok(q) {
                return None;
            }
            Some(analyze(child)?.apply(BoolOp::Meet, &TailForm::uniform(0, q.clone())))
        }
    }
}

/// Residues `0..values.len()` grouped by value, groups ordered by their
/// least residue.
pub(crate) fn residue_groups<T: PartialEq + Clone>(values: &[T]) -> Vec<(T, Vec<u64>)> {
    let mut groups: Vec<(T, Vec<u64>)> = Vec::new();
    for (r, v) in values.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| g == v) {
            Some((_, rs)) => rs.push(r as u64),
            None => groups.push((v.clone(), vec![r as u64])),
        }
    }
    groups
}

/// Least `k0 ≤ hi` such that `holds(k)` for every `k` in `[k0, hi)`.
pub(crate) fn scan_down(hi: u64, mut holds: impl FnMut(u64) -> bool) -> u64 {
    let mut k = hi;
    while k > 0 && holds(k - 1) {
        k -= 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::EventuallyPeriodicSet;
    use crate::schedule::Schedule;

    fn names() -> Vec<Name> {
        let ms = |s: &str| Name::sliding(s.parse().unwrap());
        let q: Clopen = "x3 | !x1 & x70".parse().unwrap();
        vec![
            ms("01"),
            ms("").join(&ms("11").complement()),
            Name::sliding_union(vec!["0".parse().unwrap(), "100".parse().unwrap()]).unwrap(),
            ms("1").and_const(&q),
            Name::indicator("ep:3:0:3:1,2".parse().unwrap()).meet(&ms("10")),
            Name::fresh_blocks("explicit(1/2,1;const(3/8))".parse().unwrap(), 64).join(&ms("0")),
            Name::fresh_blocks(Schedule::constant("1/4".parse().unwrap()).unwrap(), 5)
                .meet(&Name::indicator(EventuallyPeriodicSet::evens()).complement()),
            Name::spliced("0,2,5".parse().unwrap(), vec![ms("1"), ms("11"), ms("111")]).unwrap(),
            Name::atom(vec![q.clone(), Clopen::zero()], TailRule::Constant { c: q.complement() }),
        ]
    }

    #[test]
    fn form_matches_eval() {
        for m in names() {
            let f = analyze(&m).unwrap();
            for k in f.start..f.start + 40 {
                assert_eq!(f.at(k), m.eval(k), "{m:?} at {k}");
            }
        }
    }

    #[test]
    fn injective_beyond_k() {
        for m in names() {
            let f = analyze(&m).unwrap();
            let k0 = f.injective_from(Some(9));
            for k in k0..k0 + 10 {
                for shape in &f.shapes {
                    let image = TailForm::materialize(shape, k);
                    assert_eq!(image.measure(), shape.measure());
                    let moved: Vec<Coord> = shape.support().into_iter().filter(|&v| v >= MOVING).collect();
                    let mapped: Vec<Coord> = moved
                        .iter()
                        .map(|&v| {
                            let (s, r) = decode(v).unwrap();
                            (s as i64 * k as i64 + r) as u64
                        })
                        .collect();
                    assert!(mapped.windows(2).all(|w| w[0] < w[1]));
                    assert!(mapped.iter().all(|&c| c > 9 && f.max_fixed().is_none_or(|x| c > x)));
                }
            }
        }
    }

    #[test]
    fn unanalyzable() {
        assert!(analyze(&Name::fresh_blocks(Schedule::PowerDecay, 64)).is_none());
        assert!(analyze(&Name::vec(Clopen::var(MOVING))).is_none());
    }

    #[test]
    fn periods_reduce() {
        let evens = Name::indicator(EventuallyPeriodicSet::evens());
        let f = analyze(&evens.join(&evens.complement())).unwrap();
        assert_eq!(f.period, 1);
        assert!(f.shapes[0].is_one());
    }
}
