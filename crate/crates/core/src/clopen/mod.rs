//! Clopen subsets of the Cantor space `2^ω`.
//!
//! A [`Clopen`] is stored as a reduced ordered decision diagram over the
//! coordinates it depends on, variables ordered by coordinate index. Each
//! value owns its node table, numbered by a post-order walk from the root
//! (low branch first), so two clopens denoting the same set are identical
//! records. There is no shared unique table; every operation builds a fresh
//! diagram and renumbers it.

mod enumerate;
mod syntax;

pub use enumerate::{enumerate_clopens, ClopenStream, DEFAULT_ENUMERATION_BOUND};

use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::dyadic::Dyadic;

/// A coordinate of `2^ω`.
pub type Coord = u64;

const FALSE: u32 = 0;
const TRUE: u32 = 1;

#[inline]
fn is_terminal(r: u32) -> bool {
    r < 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Node {
    var: Coord,
    lo: u32,
    hi: u32,
}

/// Binary Boolean operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    Meet,
    Join,
    /// `a ∧ ¬b`
    Diff,
    Xor,
}

impl BoolOp {
    fn eval(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::Meet => a && b,
            BoolOp::Join => a || b,
            BoolOp::Diff => a && !b,
            BoolOp::Xor => a != b,
        }
    }

    /// Result fixed by one terminal operand alone.
    fn shortcut(self, a: u32, b: u32) -> Option<u32> {
        match self {
            BoolOp::Meet if a == FALSE || b == FALSE => Some(FALSE),
            BoolOp::Join if a == TRUE || b == TRUE => Some(TRUE),
            BoolOp::Diff if a == FALSE || b == TRUE => Some(FALSE),
            _ => None,
        }
    }
}

/// A canonical clopen subset of `2^ω`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clopen {
    nodes: Arc<[Node]>,
    root: u32,
}

struct Builder {
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            nodes: Vec::new(),
            unique: HashMap::default(),
        }
    }

    fn mk(&mut self, var: Coord, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&r) = self.unique.get(&node) {
            return r;
        }
        let r = self.nodes.len() as u32 + 2;
        self.nodes.push(node);
        self.unique.insert(node, r);
        r
    }

    /// Renumber the nodes reachable from `root` in post-order.
    fn finish(self, root: u32) -> Clopen {
        if is_terminal(root) {
            return Clopen::constant(root == TRUE);
        }
        let mut map: HashMap<u32, u32> = HashMap::default();
        let mut out: Vec<Node> = Vec::new();
        // (ref, children pushed?)
        let mut stack = vec![(root, false)];
        while let Some((r, expanded)) = stack.pop() {
            if is_terminal(r) || map.contains_key(&r) {
                continue;
            }
            let n = self.nodes[(r - 2) as usize];
            if expanded {
                let lo = remap(&map, n.lo);
                let hi = remap(&map, n.hi);
                out.push(Node { var: n.var, lo, hi });
                map.insert(r, out.len() as u32 + 1);
            } else {
                stack.push((r, true));
                stack.push((n.hi, false));
                stack.push((n.lo, false));
            }
        }
        let root = remap(&map, root);
        Clopen {
            nodes: out.into(),
            root,
        }
    }
}

fn remap(map: &HashMap<u32, u32>, r: u32) -> u32 {
    if is_terminal(r) {
        r
    } else {
        map[&r]
    }
}

impl Clopen {
    fn constant(value: bool) -> Clopen {
        Clopen {
            nodes: Arc::from(Vec::new()),
            root: if value { TRUE } else { FALSE },
        }
    }

    /// The empty set.
    pub fn zero() -> Clopen {
        Clopen::constant(false)
    }

    /// The whole space.
    pub fn one() -> Clopen {
        Clopen::constant(true)
    }

    /// `{x : x(c) = 1}`.
    pub fn var(c: Coord) -> Clopen {
        Clopen::literal(c, true)
    }

    /// `{x : x(c) = value}`.
    pub fn literal(c: Coord, value: bool) -> Clopen {
        let (lo, hi) = if value { (FALSE, TRUE) } else { (TRUE, FALSE) };
        Clopen {
            nodes: Arc::from(vec![Node { var: c, lo, hi }]),
            root: 2,
        }
    }

    /// The cylinder `{x : x(offset + i) = pattern[i] for all i}`.
    pub fn cylinder(offset: Coord, pattern: &[bool]) -> Clopen {
        Clopen::cube(
            pattern
                .iter()
                .enumerate()
                .map(|(i, &b)| (offset + i as Coord, b)),
        )
    }

    /// Conjunction of literals. Later entries for the same coordinate must agree
    /// with earlier ones or the result is empty.
    pub fn cube(literals: impl IntoIterator<Item = (Coord, bool)>) -> Clopen {
        let mut lits: Vec<(Coord, bool)> = literals.into_iter().collect();
        lits.sort();
        for w in lits.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                return Clopen::zero();
            }
        }
        lits.dedup();
        let mut b = Builder::new();
        let mut acc = TRUE;
        for &(c, v) in lits.iter().rev() {
            acc = if v { b.mk(c, FALSE, acc) } else { b.mk(c, acc, FALSE) };
        }
        b.finish(acc)
    }

    /// `{x : the binary number x(vars[0]) x(vars[1]) … (most significant first) < m}`.
    /// `vars` must be strictly increasing.
    pub fn less_than(vars: &[Coord], m: &num_bigint::BigInt) -> Clopen {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        let w = vars.len();
        if m.sign() == num_bigint::Sign::Minus || m.is_zero() {
            return Clopen::zero();
        }
        if m.bits() > w as u64 {
            return Clopen::one();
        }
        let mut b = Builder::new();
        // State after all bits equal: not less.
        let mut acc = FALSE;
        for j in (0..w).rev() {
            let bit_pos = w - 1 - j;
            let bit = m.bit(bit_pos as u64);
            acc = if bit {
                // x_j = 0 → less; x_j = 1 → compare the rest
                b.mk(vars[j], TRUE, acc)
            } else {
                b.mk(vars[j], acc, FALSE)
            };
        }
        b.finish(acc)
    }

    /// Build the clopen with the given truth table over `vars` (strictly
    /// increasing). Bit `j` of an assignment index is the value of `vars[j]`.
    pub fn from_truth_table(vars: &[Coord], table: impl Fn(usize) -> bool) -> Clopen {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        fn rec(
            b: &mut Builder,
            vars: &[Coord],
            depth: usize,
            index: usize,
            table: &dyn Fn(usize) -> bool,
        ) -> u32 {
            if depth == vars.len() {
                return if table(index) { TRUE } else { FALSE };
            }
            let lo = rec(b, vars, depth + 1, index, table);
            let hi = rec(b, vars, depth + 1, index | (1 << depth), table);
            b.mk(vars[depth], lo, hi)
        }
        let mut b = Builder::new();
        let root = rec(&mut b, vars, 0, 0, &table);
        b.finish(root)
    }

    pub fn is_zero(&self) -> bool {
        self.root == FALSE
    }

    pub fn is_one(&self) -> bool {
        self.root == TRUE
    }

    /// Number of decision nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    fn node(&self, r: u32) -> Node {
        self.nodes[(r - 2) as usize]
    }

    /// The sorted essential coordinates.
    pub fn support(&self) -> Vec<Coord> {
        let mut v: Vec<Coord> = self.nodes.iter().map(|n| n.var).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_coord(&self) -> Option<Coord> {
        self.nodes.iter().map(|n| n.var).max()
    }

    pub fn min_coord(&self) -> Option<Coord> {
        self.nodes.iter().map(|n| n.var).min()
    }

    /// Membership of the point `x`.
    pub fn contains(&self, x: impl Fn(Coord) -> bool) -> bool {
        let mut r = self.root;
        while !is_terminal(r) {
            let n = self.node(r);
            r = if x(n.var) { n.hi } else { n.lo };
        }
        r == TRUE
    }

    /// Fair-coin product measure.
    pub fn measure(&self) -> Dyadic {
        match self.root {
            FALSE => return Dyadic::zero(),
            TRUE => return Dyadic::one(),
            _ => {}
        }
        let mut m: Vec<Dyadic> = Vec::with_capacity(self.nodes.len() + 2);
        m.push(Dyadic::zero());
        m.push(Dyadic::one());
        for n in self.nodes.iter() {
            let v = (&m[n.lo as usize] + &m[n.hi as usize]).halve();
            m.push(v);
        }
        m.swap_remove(self.root as usize)
    }

    /// Number of satisfying assignments over the support.
    pub fn count_models(&self) -> num_bigint::BigInt {
        let m = self.measure();
        let support = self.support().len() as u32;
        (m.numerator().clone() << support) >> m.exponent()
    }

    pub fn apply(&self, op: BoolOp, other: &Clopen) -> Clopen {
        let mut b = Builder::new();
        let mut memo: HashMap<(u32, u32), u32> = HashMap::default();
        let root = apply_rec(op, self, other, self.root, other.root, &mut b, &mut memo);
        b.finish(root)
    }

    pub fn meet(&self, other: &Clopen) -> Clopen {
        self.apply(BoolOp::Meet, other)
    }

    pub fn join(&self, other: &Clopen) -> Clopen {
        self.apply(BoolOp::Join, other)
    }

    pub fn diff(&self, other: &Clopen) -> Clopen {
        self.apply(BoolOp::Diff, other)
    }

    pub fn complement(&self) -> Clopen {
        let flip = |r: u32| if is_terminal(r) { 1 - r } else { r };
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| Node {
                var: n.var,
                lo: flip(n.lo),
                hi: flip(n.hi),
            })
            .collect();
        Clopen {
            nodes: nodes.into(),
            root: flip(self.root),
        }
    }

    /// `λ(self op other)` without materializing the result.
    pub fn measure_of(&self, op: BoolOp, other: &Clopen) -> Dyadic {
        let mut memo: HashMap<(u32, u32), Dyadic> = HashMap::default();
        measure_rec(op, self, other, self.root, other.root, &mut memo)
    }

    /// `self ≤ other`, i.e. `self ∧ ¬other = 0`.
    pub fn leq(&self, other: &Clopen) -> bool {
        let mut memo: HashMap<(u32, u32), bool> = HashMap::default();
        !exists_rec(BoolOp::Diff, self, other, self.root, other.root, &mut memo)
    }

    pub fn disjoint(&self, other: &Clopen) -> bool {
        let mut memo: HashMap<(u32, u32), bool> = HashMap::default();
        !exists_rec(BoolOp::Meet, self, other, self.root, other.root, &mut memo)
    }

    /// Substitute coordinates. When `f` is strictly increasing on the support
    /// the node table is reused; otherwise the diagram is rebuilt.
    pub fn rename(&self, f: impl Fn(Coord) -> Coord) -> Clopen {
        let support = self.support();
        let image: Vec<Coord> = support.iter().map(|&c| f(c)).collect();
        if image.windows(2).all(|w| w[0] < w[1]) {
            let nodes: Vec<Node> = self
                .nodes
                .iter()
                .map(|n| Node {
                    var: f(n.var),
                    lo: n.lo,
                    hi: n.hi,
                })
                .collect();
            return Clopen {
                nodes: nodes.into(),
                root: self.root,
            };
        }
        let mut memo: HashMap<u32, Clopen> = HashMap::default();
        memo.insert(FALSE, Clopen::zero());
        memo.insert(TRUE, Clopen::one());
        for (i, n) in self.nodes.iter().enumerate() {
            let v = Clopen::var(f(n.var));
            let hi = v.meet(&memo[&n.hi]);
            let lo = v.complement().meet(&memo[&n.lo]);
            memo.insert(i as u32 + 2, hi.join(&lo));
        }
        memo.remove(&self.root).unwrap()
    }

    /// Decompose by the value reached once every coordinate `< boundary` has
    /// been read: returns `(cell, value)` pairs where `cell` is a clopen over
    /// coordinates `< boundary` and `value` is the conditional measure of the
    /// remaining coordinates on that cell. Cells are pairwise disjoint, cover
    /// the space, have distinct values, and are sorted by value.
    pub fn split_at(&self, boundary: Coord) -> Vec<(Clopen, Dyadic)> {
        let n = self.nodes.len();
        let mut measure: Vec<Dyadic> = Vec::with_capacity(n + 2);
        measure.push(Dyadic::zero());
        measure.push(Dyadic::one());
        for node in self.nodes.iter() {
            let v = (&measure[node.lo as usize] + &measure[node.hi as usize]).halve();
            measure.push(v);
        }
        let below = |r: u32| !is_terminal(r) && self.node(r).var < boundary;
        // Values of frontier refs reachable from the root.
        let mut values: Vec<Dyadic> = Vec::new();
        let mut seen = vec![false; n + 2];
        let mut stack = vec![self.root];
        while let Some(r) = stack.pop() {
            if seen[r as usize] {
                continue;
            }
            seen[r as usize] = true;
            if below(r) {
                let node = self.node(r);
                stack.push(node.lo);
                stack.push(node.hi);
            } else {
                values.push(measure[r as usize].clone());
            }
        }
        values.sort();
        values.dedup();
        values
            .into_iter()
            .map(|v| {
                let mut b = Builder::new();
                let mut memo: HashMap<u32, u32> = HashMap::default();
                let root = cell_rec(self, self.root, boundary, &v, &measure, &mut b, &mut memo);
                (b.finish(root), v)
            })
            .collect()
    }

    /// The literals of this clopen if it is a single conjunction of literals.
    pub fn as_cube(&self) -> Option<Vec<(Coord, bool)>> {
        if self.is_zero() {
            return None;
        }
        let mut out = Vec::new();
        let mut r = self.root;
        while !is_terminal(r) {
            let n = self.node(r);
            if n.lo == FALSE {
                out.push((n.var, true));
                r = n.hi;
            } else if n.hi == FALSE {
                out.push((n.var, false));
                r = n.lo;
            } else {
                return None;
            }
        }
        Some(out)
    }

    /// All satisfying assignments are enumerated for `vars` (which must contain
    /// the support); bit `j` of the returned indices is `vars[j]`.
    pub fn truth_table(&self, vars: &[Coord]) -> Vec<bool> {
        let n = vars.len();
        (0..1usize << n)
            .map(|idx| {
                self.contains(|c| match vars.iter().position(|&v| v == c) {
                    Some(j) => idx >> j & 1 == 1,
                    None => false,
                })
            })
            .collect()
    }
}

fn apply_rec(
    op: BoolOp,
    a: &Clopen,
    b: &Clopen,
    ra: u32,
    rb: u32,
    out: &mut Builder,
    memo: &mut HashMap<(u32, u32), u32>,
) -> u32 {
    if is_terminal(ra) && is_terminal(rb) {
        return op.eval(ra == TRUE, rb == TRUE) as u32;
    }
    if let Some(r) = op.shortcut(ra, rb) {
        return r;
    }
    if let Some(&r) = memo.get(&(ra, rb)) {
        return r;
    }
    let va = if is_terminal(ra) { Coord::MAX } else { a.node(ra).var };
    let vb = if is_terminal(rb) { Coord::MAX } else { b.node(rb).var };
    let var = va.min(vb);
    let (alo, ahi) = if va == var {
        let n = a.node(ra);
        (n.lo, n.hi)
    } else {
        (ra, ra)
    };
    let (blo, bhi) = if vb == var {
        let n = b.node(rb);
        (n.lo, n.hi)
    } else {
        (rb, rb)
    };
    let lo = apply_rec(op, a, b, alo, blo, out, memo);
    let hi = apply_rec(op, a, b, ahi, bhi, out, memo);
    let r = out.mk(var, lo, hi);
    memo.insert((ra, rb), r);
    r
}

fn measure_rec(
    op: BoolOp,
    a: &Clopen,
    b: &Clopen,
    ra: u32,
    rb: u32,
    memo: &mut HashMap<(u32, u32), Dyadic>,
) -> Dyadic {
    if is_terminal(ra) && is_terminal(rb) {
        return if op.eval(ra == TRUE, rb == TRUE) {
            Dyadic::one()
        } else {
            Dyadic::zero()
        };
    }
    if let Some(r) = op.shortcut(ra, rb) {
        return if r == TRUE { Dyadic::one() } else { Dyadic::zero() };
    }
    if let Some(v) = memo.get(&(ra, rb)) {
        return v.clone();
    }
    let va = if is_terminal(ra) { Coord::MAX } else { a.node(ra).var };
    let vb = if is_terminal(rb) { Coord::MAX } else { b.node(rb).var };
    let var = va.min(vb);
    let (alo, ahi) = if va == var {
        let n = a.node(ra);
        (n.lo, n.hi)
    } else {
        (ra, ra)
    };
    let (blo, bhi) = if vb == var {
        let n = b.node(rb);
        (n.lo, n.hi)
    } else {
        (rb, rb)
    };
    let v = (measure_rec(op, a, b, alo, blo, memo) + measure_rec(op, a, b, ahi, bhi, memo)).halve();
    memo.insert((ra, rb), v.clone());
    v
}

fn exists_rec(
    op: BoolOp,
    a: &Clopen,
    b: &Clopen,
    ra: u32,
    rb: u32,
    memo: &mut HashMap<(u32, u32), bool>,
) -> bool {
    if is_terminal(ra) && is_terminal(rb) {
        return op.eval(ra == TRUE, rb == TRUE);
    }
    if let Some(r) = op.shortcut(ra, rb) {
        return r == TRUE;
    }
    if let Some(&v) = memo.get(&(ra, rb)) {
        return v;
    }
    let va = if is_terminal(ra) { Coord::MAX } else { a.node(ra).var };
    let vb = if is_terminal(rb) { Coord::MAX } else { b.node(rb).var };
    let var = va.min(vb);
    let (alo, ahi) = if va == var {
        let n = a.node(ra);
        (n.lo, n.hi)
    } else {
        (ra, ra)
    };
    let (blo, bhi) = if vb == var {
        let n = b.node(rb);
        (n.lo, n.hi)
    } else {
        (rb, rb)
    };
    let v = exists_rec(op, a, b, alo, blo, memo) || exists_rec(op, a, b, ahi, bhi, memo);
    memo.insert((ra, rb), v);
    v
}

fn cell_rec(
    c: &Clopen,
    r: u32,
    boundary: Coord,
    value: &Dyadic,
    measure: &[Dyadic],
    out: &mut Builder,
    memo: &mut HashMap<u32, u32>,
) -> u32 {
    if is_terminal(r) || c.node(r).var >= boundary {
        return (measure[r as usize] == *value) as u32;
    }
    if let Some(&x) = memo.get(&r) {
        return x;
    }
    let n = c.node(r);
    let lo = cell_rec(c, n.lo, boundary, value, measure, out, memo);
    let hi = cell_rec(c, n.hi, boundary, value, measure, out, memo);
    let x = out.mk(n.var, lo, hi);
    memo.insert(r, x);
    x
}

impl fmt::Debug for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clopen({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn contradictory_cylinders_meet_to_zero() {
        let a = Clopen::cylinder(5, &bits("1"));
        let b = Clopen::cylinder(5, &bits("0"));
        assert!(a.meet(&b).is_zero());
    }

    #[test]
    fn complement_of_one() {
        assert_eq!(Clopen::one().complement(), Clopen::zero());
        assert_eq!(Clopen::zero().complement(), Clopen::one());
    }

    #[test]
    fn join_of_two_coordinates() {
        let j = Clopen::var(0).join(&Clopen::var(1));
        assert_eq!(j.support(), vec![0, 1]);
        // brute force over the 4 assignments of {0,1}
        let hits = (0..4)
            .filter(|&i: &usize| j.contains(|c| i >> c & 1 == 1))
            .count();
        assert_eq!(hits, 3);
        assert_eq!(j.count_models(), 3.into());
        assert_eq!(j.measure(), d("3/4"));
    }

    #[test]
    fn cylinder_measures() {
        let c = Clopen::cylinder(3, &bits("01"));
        assert_eq!(c.support(), vec![3, 4]);
        assert_eq!(c.measure(), d("1/4"));
        assert_eq!(Clopen::cylinder(0, &[]), Clopen::one());
        assert_eq!(Clopen::cylinder(2, &bits("110")).measure(), d("1/8"));
    }

    #[test]
    fn order() {
        let c = Clopen::cylinder(7, &bits("0110"));
        assert!(Clopen::zero().leq(&c));
        assert!(Clopen::cylinder(0, &bits("10")).leq(&Clopen::cylinder(0, &bits("1"))));
        // witness x(0)=1, x(1)=0
        assert!(!Clopen::var(0).leq(&Clopen::var(1)));
    }

    #[test]
    fn canonical_under_different_constructions() {
        let a = Clopen::var(2).join(&Clopen::var(1)).meet(&Clopen::var(0));
        let b = Clopen::var(0)
            .meet(&Clopen::var(1))
            .join(&Clopen::var(2).meet(&Clopen::var(0)));
        assert_eq!(a, b);
        // x ∨ ¬x has empty support
        let t = Clopen::var(9).join(&Clopen::var(9).complement());
        assert_eq!(t, Clopen::one());
        assert!(t.support().is_empty());
    }

    #[test]
    fn less_than_comparator() {
        let vars = [10, 11, 12];
        for m in 0..=8i64 {
            let c = Clopen::less_than(&vars, &m.into());
            assert_eq!(c.measure(), Dyadic::new(m.min(8), 3));
        }
    }

    #[test]
    fn rename_non_monotone() {
        let c = Clopen::cylinder(0, &bits("10"));
        let r = c.rename(|v| 5 - v);
        assert_eq!(r, Clopen::cube([(5, true), (4, false)]));
    }

    #[test]
    fn split_by_boundary() {
        // x0 ∧ (x100 ∨ x101): on x0=1 conditional measure 3/4, else 0
        let c = Clopen::var(0).meet(&Clopen::var(100).join(&Clopen::var(101)));
        let cells = c.split_at(50);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0], (Clopen::var(0).complement(), Dyadic::zero()));
        assert_eq!(cells[1], (Clopen::var(0), d("3/4")));
    }

    #[test]
    fn measure_of_matches_materialized() {
        let a = Clopen::cylinder(0, &bits("101")).join(&Clopen::var(4));
        let b = Clopen::cylinder(1, &bits("01"));
        for op in [BoolOp::Meet, BoolOp::Join, BoolOp::Diff, BoolOp::Xor] {
            assert_eq!(a.measure_of(op, &b), a.apply(op, &b).measure());
        }
    }
}
