//! `(U, p)`-fullness of names, the sets `C_n`, and splicing along interval
//! partitions.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::clopen::{BoolOp, Clopen};
use crate::dyadic::Dyadic;
use crate::error::Error;
use crate::filters::{borel_cantelli_verdict, product_upper, search_product, BcVerdict};
use crate::interval::IntervalPartition;
use crate::names::tail::{analyze, moving_groups, scan_down, TailForm};
use crate::names::{EventuallyPeriodicSet, Name, TailRule};
use crate::schedule::Schedule;
use crate::solovay::{Density, DEFAULT_WINDOW};

/// Exact `λ(p ∖ ⋁_{k∈X, k≤N} M(k))` for `N = 0, 1, 2, …`.
struct Residuals<'a> {
    m: &'a Name,
    p: &'a Clopen,
    x: &'a EventuallyPeriodicSet,
    join: Clopen,
    next: u64,
}

impl<'a> Residuals<'a> {
    fn new(m: &'a Name, p: &'a Clopen, x: &'a EventuallyPeriodicSet) -> Self {
        Residuals {
            m,
            p,
            x,
            join: Clopen::zero(),
            next: 0,
        }
    }

    /// Residual after absorbing every index `≤ n`; `n` must not decrease.
    fn at(&mut self, n: u64) -> Dyadic {
        while self.next <= n {
            if self.x.contains(self.next) {
                self.join = self.join.join(&self.m.eval(self.next));
            }
            self.next += 1;
        }
        self.p.measure_of(BoolOp::Diff, &self.join)
    }
}

/// `λ(p ∖ ⋁_{k∈X, k≤N} M(k))`, evaluated directly.
pub fn residual_at(m: &Name, p: &Clopen, x: &EventuallyPeriodicSet, big_n: u64) -> Dyadic {
    Residuals::new(m, p, x).at(big_n)
}

/// Independent draws from one residue class: the greedy sequence of class
/// members whose coordinates lie entirely above those of the previous draw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
struct DrawClass {
    modulus: u64,
    residue: u64,
    first: u64,
    /// Per stride, least and greatest relative offset of the shape.
    groups: Vec<(u64, i64, i64)>,
}

impl DrawClass {
    fn min_coord(&self, k: u64) -> i64 {
        self.groups.iter().map(|&(s, lo, _)| s as i64 * k as i64 + lo).min().unwrap_or(i64::MIN)
    }

    fn max_coord(&self, k: u64) -> i64 {
        self.groups.iter().map(|&(s, _, hi)| s as i64 * k as i64 + hi).max().unwrap_or(i64::MIN)
    }

    fn next_member(&self, from: u64) -> u64 {
        from + (self.residue + self.modulus - from % self.modulus) % self.modulus
    }

    fn draws(&self) -> impl Iterator<Item = u64> + '_ {
        let mut k = self.next_member(self.first);
        std::iter::from_fn(move || {
            let cur = k;
            let top = self.max_coord(cur);
            let mut next = self.next_member(cur + 1);
            while !self.groups.is_empty() && self.min_coord(next) <= top {
                next = self.next_member(next + 1);
            }
            k = next;
            Some(cur)
        })
    }
}

/// `mass · miss^{draws ≤ N}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
struct DrawTerm {
    mass: Dyadic,
    miss: Dyadic,
    class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Bound {
    /// Beyond `from_index`, conditionally independent draws from the
    /// relevant residue classes.
    Draws {
        classes: Vec<DrawClass>,
        terms: Vec<DrawTerm>,
    },
    /// Beyond `from_index` the residual is `base · Π (1 − a_k)`.
    Product { schedule: Schedule, base: Dyadic },
    /// Finitely many indices; residuals are computed directly.
    Finite { last: u64 },
}

/// `ε ↦ N` with `λ(p ∖ ⋁_{k∈X, k≤N} M(k)) < ε`, together with a proof that
/// the residuals tend to 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FullCertificate {
    #[serde(skip)]
    name: Name,
    #[serde(skip)]
    p: Clopen,
    #[serde(skip)]
    set: EventuallyPeriodicSet,
    /// Residuals below this index are computed exactly.
    pub from_index: u64,
    bound: Bound,
}

/// One row of a certificate table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateRow {
    pub epsilon: Dyadic,
    pub n: u64,
    /// The certified upper bound on the residual at `n`.
    pub bound: Dyadic,
    /// The residual at `n`, evaluated directly when `n` is small enough.
    pub residual: Option<Dyadic>,
}

/// Direct evaluation is skipped past this index in certificate tables.
const TABLE_EVAL_LIMIT: u64 = 1 << 10;

impl FullCertificate {
    pub fn kind(&self) -> &'static str {
        match self.bound {
            Bound::Draws { .. } => "independent-draws",
            Bound::Product { .. } => "independent-product",
            Bound::Finite { .. } => "finite-join",
        }
    }

    /// Least `N` whose certified bound is `< ε`.
    pub fn n_for(&self, eps: &Dyadic) -> Result<u64, Error> {
        self.n_for_rational(&eps.to_rational())
    }

    pub fn n_for_rational(&self, eps: &BigRational) -> Result<u64, Error> {
        let below = |d: &Dyadic| d.to_rational() < *eps;
        let mut exact = Residuals::new(&self.name, &self.p, &self.set);
        let early = match self.bound {
            Bound::Finite { last } => last + 1,
            _ => self.from_index,
        };
        for n in 0..early {
            if below(&exact.at(n)) {
                return Ok(n);
            }
        }
        match &self.bound {
            Bound::Finite { .. } => Err(Error::Precondition(format!(
                "the finite join never brings the residual below {eps}"
            ))),
            Bound::Product { schedule, base } => {
                search_product(schedule, &self.set, self.from_index, base.clone(), eps)
            }
            Bound::Draws { classes, terms } => {
                let cap = self.prior(&mut exact);
                let mut counts = vec![0u64; classes.len()];
                let mut iters: Vec<_> = classes.iter().map(|c| c.draws().peekable()).collect();
                loop {
                    // the next draw across all classes
                    let (i, k) = iters
                        .iter_mut()
                        .enumerate()
                        .map(|(i, it)| (i, *it.peek().unwrap()))
                        .min_by_key(|&(_, k)| k)
                        .expect("a full certificate has a relevant class");
                    iters[i].next();
                    counts[i] += 1;
                    let b = draw_bound(terms, &counts).min(cap.clone());
                    if below(&b) {
                        return Ok(k);
                    }
                    if k > 1 << 40 {
                        return Err(Error::BoundExceeded {
                            what: "certificate search index",
                            bound: 1 << 40,
                            got: k as usize,
                        });
                    }
                }
            }
        }
    }

    /// The exact residual just before `from_index`.
    fn prior(&self, exact: &mut Residuals) -> Dyadic {
        if self.from_index == 0 {
            self.p.measure()
        } else {
            exact.at(self.from_index - 1)
        }
    }

    /// The certified upper bound on the residual at `N`.
    pub fn bound_at(&self, big_n: u64) -> Dyadic {
        let mut exact = Residuals::new(&self.name, &self.p, &self.set);
        if big_n < self.from_index {
            return exact.at(big_n);
        }
        match &self.bound {
            Bound::Finite { .. } => exact.at(big_n),
            Bound::Product { schedule, base } => {
                product_upper(schedule, &self.set, self.from_index, big_n, base.clone())
            }
            Bound::Draws { classes, terms } => {
                let counts: Vec<u64> = classes
                    .iter()
                    .map(|c| c.draws().take_while(|&k| k <= big_n).count() as u64)
                    .collect();
                draw_bound(terms, &counts).min(self.prior(&mut exact))
            }
        }
    }

    pub fn table(&self, epsilons: &[Dyadic]) -> Result<Vec<CertificateRow>, Error> {
        epsilons
            .iter()
            .map(|eps| {
                let n = self.n_for(eps)?;
                let residual = (n <= TABLE_EVAL_LIMIT).then(|| residual_at(&self.name, &self.p, &self.set, n));
                Ok(CertificateRow {
                    epsilon: eps.clone(),
                    n,
                    bound: self.bound_at(n),
                    residual,
                })
            })
            .collect()
    }
}

fn draw_bound(terms: &[DrawTerm], counts: &[u64]) -> Dyadic {
    terms
        .iter()
        .map(|t| &t.mass * t.miss.pow(counts[t.class].min(u32::MAX as u64) as u32))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FullnessVerdict {
    Full(FullCertificate),
    /// `λ(p ∖ ⋁_{k∈X} M(k)) = residual > 0`. When `attained`, the prefix
    /// residuals equal it from `stable_beyond` on; otherwise they decrease
    /// to it and the structure is fixed from `stable_beyond`.
    NotFull {
        residual: Dyadic,
        stable_beyond: u64,
        attained: bool,
    },
    Unknown {
        window: u64,
        residual: Dyadic,
    },
}

/// Whether `λ(⋁_{k∈X} M(k) ∧ p) = λ(p)`.
pub fn is_full(m: &Name, p: &Clopen, x: &EventuallyPeriodicSet) -> Result<FullnessVerdict, Error> {
    is_full_window(m, p, x, DEFAULT_WINDOW)
}

pub fn is_full_window(m: &Name, p: &Clopen, x: &EventuallyPeriodicSet, window: u64) -> Result<FullnessVerdict, Error> {
    if p.is_zero() {
        return Err(Error::ZeroCondition);
    }
    let cert = |from_index, bound| FullCertificate {
        name: m.clone(),
        p: p.clone(),
        set: x.clone(),
        from_index,
        bound,
    };
    if x.is_finite() {
        let last = x.threshold().saturating_sub(1);
        let mut exact = Residuals::new(m, p, x);
        let residual = exact.at(last);
        if residual.is_zero() {
            return Ok(FullnessVerdict::Full(cert(0, Bound::Finite { last })));
        }
        let stable = scan_down(last + 1, |n| residual_at(m, p, x, n) == residual);
        return Ok(FullnessVerdict::NotFull {
            residual,
            stable_beyond: stable,
            attained: true,
        });
    }
    if let Some(form) = analyze(m).filter(|_| p.max_coord().is_none_or(|c| c < crate::names::tail::MOVING)) {
        return Ok(full_by_tail(m, p, x, &form, cert));
    }
    if let Some(([], TailRule::FreshBlocks { schedule, reserve })) = m.as_atom() {
        // first block lying entirely above p
        let from = match p.max_coord() {
            None => 0,
            Some(c) => {
                let mut k = 0;
                while reserve + schedule.offset(k) <= c {
                    k += 1;
                }
                k
            }
        };
        let base = if from == 0 {
            p.measure()
        } else {
            residual_at(m, p, x, from - 1)
        };
        if base.is_zero() {
            return Ok(FullnessVerdict::Full(cert(from, Bound::Finite { last: from.saturating_sub(1) })));
        }
        if let Ok(BcVerdict::Divergent(_)) = borel_cantelli_verdict(schedule, x) {
            return Ok(FullnessVerdict::Full(cert(
                from,
                Bound::Product {
                    schedule: schedule.clone(),
                    base,
                },
            )));
        }
    }
    Ok(FullnessVerdict::Unknown {
        window,
        residual: residual_at(m, p, x, window),
    })
}

fn full_by_tail(
    m: &Name,
    p: &Clopen,
    x: &EventuallyPeriodicSet,
    form: &TailForm,
    cert: impl Fn(u64, Bound) -> FullCertificate,
) -> FullnessVerdict {
    let k0 = form.injective_from(p.max_coord()).max(x.threshold());
    let mut exact = Residuals::new(m, p, x);
    let (early, early_join) = if k0 == 0 {
        (p.clone(), Clopen::zero())
    } else {
        exact.at(k0 - 1);
        (p.diff(&exact.join), exact.join.clone())
    };
    let k1 = form.injective_from(p.max_coord().max(early_join.max_coord())).max(k0);
    let modulus = form.period.lcm(&x.period());
    let mut classes = Vec::new();
    let mut terms = Vec::new();
    let mut remaining = early.clone();
    let mut support = Clopen::zero();
    for c in 0..modulus {
        let shape = form.shape(c);
        if !x.has_residue(c) || shape.is_zero() {
            continue;
        }
        let density = Density::of_shape(shape);
        let class = classes.len();
        for (cell, v) in density.cells() {
            if v.is_zero() {
                continue;
            }
            let piece = remaining.meet(cell);
            if !piece.is_zero() {
                terms.push(DrawTerm {
                    mass: piece.measure(),
                    miss: v.complement(),
                    class,
                });
            }
        }
        let s = density.support();
        remaining = remaining.diff(&s);
        support = support.join(&s);
        classes.push(DrawClass {
            modulus,
            residue: c,
            first: k1,
            groups: moving_groups(std::iter::once(shape))
                .into_iter()
                .map(|(s, (lo, hi))| (s, lo, hi))
                .collect(),
        });
    }
    let limit = early.measure_of(BoolOp::Diff, &support);
    if limit.is_zero() {
        if early.is_zero() {
            return FullnessVerdict::Full(cert(0, Bound::Finite { last: k0.saturating_sub(1) }));
        }
        return FullnessVerdict::Full(cert(k1, Bound::Draws { classes, terms }));
    }
    if classes.is_empty() {
        // nothing is added beyond k0
        let stable = scan_down(k0, |n| residual_at(m, p, x, n) == limit);
        return FullnessVerdict::NotFull {
            residual: limit,
            stable_beyond: stable,
            attained: true,
        };
    }
    FullnessVerdict::NotFull {
        residual: limit,
        stable_beyond: k1,
        attained: false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CnVerdict {
    /// `m_N ≤ λ(p) − 1/(n+1)`; sound only up to `up_to`.
    InCnUpTo { up_to: u64, measure: Dyadic },
    /// `m_witness > λ(p) − 1/(n+1)`; the full join only grows.
    NotInCn { witness: u64, measure: Dyadic },
}

/// Test `X ∈ C_n`: whether `λ(⋁_{k∉X, k≤N} E(k) ∧ p) ≤ λ(p) − 1/(n+1)`.
pub fn cn_check(e: &Name, p: &Clopen, n: u64, x: &EventuallyPeriodicSet, big_n: u64) -> Result<CnVerdict, Error> {
    if p.is_zero() {
        return Err(Error::ZeroCondition);
    }
    let limit = p.measure().to_rational() - BigRational::new(1.into(), (n + 1).into());
    let mut join = Clopen::zero();
    let mut measure = Dyadic::zero();
    for k in 0..=big_n {
        if !x.contains(k) {
            join = join.join(&e.eval(k));
            measure = join.measure_of(BoolOp::Meet, p);
        }
        if measure.to_rational() > limit {
            return Ok(CnVerdict::NotInCn { witness: k, measure });
        }
    }
    Ok(CnVerdict::InCnUpTo { up_to: big_n, measure })
}

/// `E(k) = E_n(k)` for `k ∈ I_n`; the last name continues past the listed
/// intervals.
pub fn splice(cuts: &IntervalPartition, es: &[Name]) -> Result<Name, Error> {
    Name::spliced(cuts.clone(), es.to_vec())
}

/// `cuts(0) = 0`, `cuts(n+1) = max(cuts(n) + 1, N_n(1/(n+1)))` where `N_n`
/// is the fullness certificate of `E_n` for `(p, X)`.
pub fn canonical_partition(es: &[Name], p: &Clopen, x: &EventuallyPeriodicSet) -> Result<IntervalPartition, Error> {
    let mut cuts = vec![0u64];
    for (n, e) in es.iter().enumerate().take(es.len().saturating_sub(1)) {
        let FullnessVerdict::Full(cert) = is_full(e, p, x)? else {
            return Err(Error::Precondition(format!("E_{n} is not certified full")));
        };
        let eps = BigRational::new(BigRational::one().numer().clone(), (n as u64 + 1).into());
        let big_n = cert.n_for_rational(&eps)?;
        let prev = *cuts.last().unwrap();
        cuts.push((prev + 1).max(big_n));
    }
    IntervalPartition::new(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::fresh_independent;
    use crate::names::Bits;
    use crate::names::LeqVerdict;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Clopen {
        s.parse().unwrap()
    }

    fn set(s: &str) -> EventuallyPeriodicSet {
        s.parse().unwrap()
    }

    #[test]
    fn vec_one_is_full_at_min_x() {
        for x in ["all", "odds", "ep:5::3:2"] {
            let x = set(x);
            let FullnessVerdict::Full(cert) = is_full(&Name::one(), &c("x2 & x9"), &x).unwrap() else {
                panic!()
            };
            assert_eq!(cert.n_for(&Dyadic::pow2_neg(20)).unwrap(), x.least().unwrap());
        }
    }

    #[test]
    fn fresh_half_blocks() {
        let m = fresh_independent(&"const(1/2)".parse().unwrap()).unwrap();
        let FullnessVerdict::Full(cert) = is_full(&m, &Clopen::one(), &set("all")).unwrap() else {
            panic!()
        };
        assert_eq!(cert.n_for(&Dyadic::pow2_neg(20)).unwrap(), 20);
        for row in cert.table(&[Dyadic::pow2_neg(5), Dyadic::pow2_neg(10), Dyadic::pow2_neg(20)]).unwrap() {
            assert_eq!(row.residual, Some(Dyadic::pow2_neg(row.n as u32 + 1)));
            assert_eq!(Some(row.bound), row.residual);
        }
    }

    #[test]
    fn product_certificates() {
        let m = fresh_independent(&crate::schedule::Schedule::PowerDecay).unwrap();
        let p = c("x1 | x70");
        let FullnessVerdict::Full(cert) = is_full(&m, &p, &set("odds")).unwrap() else {
            panic!()
        };
        assert_eq!(cert.kind(), "independent-product");
        for e in [2, 4, 6] {
            let eps = Dyadic::pow2_neg(e);
            let n = cert.n_for(&eps).unwrap();
            let r = residual_at(&m, &p, &set("odds"), n);
            assert!(r < eps);
            let b = cert.bound_at(n);
            assert!(b >= r && &b - &r < Dyadic::pow2_neg(200));
            assert!(residual_at(&m, &p, &set("odds"), n - 1) >= eps);
        }
        let g = fresh_independent(&crate::schedule::Schedule::Geometric(0)).unwrap();
        assert!(matches!(is_full(&g, &Clopen::one(), &set("all")).unwrap(), FullnessVerdict::Unknown { .. }));
    }

    #[test]
    fn sliding_patterns_are_full_via_draws() {
        let m = Name::sliding("101".parse().unwrap());
        let p = c("x0 & !x3");
        for x in ["all", "mod4:1", "ep:9:2:5:0,3"] {
            let x = set(x);
            let FullnessVerdict::Full(cert) = is_full(&m, &p, &x).unwrap() else {
                panic!()
            };
            for e in [1, 3, 5] {
                let eps = Dyadic::pow2_neg(e);
                let n = cert.n_for(&eps).unwrap();
                let b = cert.bound_at(n);
                assert!(b < eps);
                assert!(residual_at(&m, &p, &x, n) <= b);
            }
        }
    }

    #[test]
    fn zero_tail_is_not_full() {
        let m = Name::atom(vec![c("x0"), c("x1")], TailRule::Zero);
        let v = is_full(&m, &c("!x0"), &set("all")).unwrap();
        assert_eq!(
            v,
            FullnessVerdict::NotFull {
                residual: d("1/4"),
                stable_beyond: 1,
                attained: true
            }
        );
        let beyond = is_full(&m, &c("x5 & x6"), &set("ep:2::1:0")).unwrap();
        assert!(matches!(beyond, FullnessVerdict::NotFull { residual, .. } if residual == d("1/4")));
        assert_eq!(is_full(&m, &Clopen::zero(), &set("all")), Err(Error::ZeroCondition));
    }

    #[test]
    fn conditional_support_limits_fullness() {
        // on X only the evens contribute, and they are confined to x0
        let m = Name::sliding("1".parse().unwrap())
            .and_const(&c("x0"))
            .meet(&Name::indicator(set("evens")));
        let v = is_full(&m, &Clopen::one(), &set("all")).unwrap();
        assert!(matches!(v, FullnessVerdict::NotFull { residual, attained: false, .. } if residual == d("1/2")));
        assert!(matches!(is_full(&m, &c("x0"), &set("all")).unwrap(), FullnessVerdict::Full(_)));
    }

    #[test]
    fn cn_examples() {
        let p = Clopen::one();
        assert!(matches!(cn_check(&Name::one(), &p, 3, &set("all"), 50), Ok(CnVerdict::InCnUpTo { .. })));
        let q = c("x1 & x2");
        assert_eq!(
            cn_check(&Name::vec(q.clone()), &q, 4, &set("cofinite:4"), 10).unwrap(),
            CnVerdict::NotInCn {
                witness: 4,
                measure: d("1/4")
            }
        );
        assert!(matches!(
            cn_check(&Name::vec(q.clone()), &q, 2, &set("all"), 10),
            Ok(CnVerdict::NotInCn { witness: 0, .. })
        ));
        let g = fresh_independent(&"geom(2)".parse().unwrap()).unwrap();
        assert!(matches!(cn_check(&g, &p, 1, &set("evens"), 40), Ok(CnVerdict::InCnUpTo { .. })));
    }

    #[test]
    fn splicing() {
        let a = Name::sliding("0".parse().unwrap());
        let b = Name::sliding("1".parse().unwrap());
        let e = splice(&"0,3,7".parse().unwrap(), &[a.clone(), b.clone()]).unwrap();
        assert_eq!(e.eval(2), a.eval(2));
        assert_eq!(e.eval(5), b.eval(5));
        let chain: Vec<Name> = (0..4).map(|n| crate::solovay::make_ms(&Bits::ones(n))).collect();
        let cuts: IntervalPartition = "0,3,7,15".parse().unwrap();
        let e = splice(&cuts, &chain).unwrap();
        for (n, en) in chain.iter().enumerate() {
            let v = crate::names::leq_name(&e, en, 64);
            assert_eq!(v.threshold(), Some(cuts.cuts()[n]), "{v:?}");
        }
        assert!(matches!(crate::names::leq_name(&e, &chain[3], 64), LeqVerdict::Eventually(15)));
    }

    #[test]
    fn canonical_chain_is_full() {
        let chain: Vec<Name> = (0..4).map(|n| crate::solovay::make_ms(&Bits::ones(n))).collect();
        let p = c("x0 | x1");
        let x = set("all");
        let cuts = canonical_partition(&chain, &p, &x).unwrap();
        assert_eq!(cuts.len(), 4);
        let e = splice(&cuts, &chain).unwrap();
        assert!(matches!(is_full(&e, &p, &x).unwrap(), FullnessVerdict::Full(_)));
    }
}
