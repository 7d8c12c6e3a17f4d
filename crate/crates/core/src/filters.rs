//! Ultrafilter oracles on the eventually periodic sets, independent
//! families with prescribed measures, Borel–Cantelli verdicts and the
//! diagonalization of decreasing sequences of names.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::clopen::Clopen;
use crate::dyadic::Dyadic;
use crate::error::Error;
use crate::names::tail::analyze;
use crate::names::{leq_name, EventuallyPeriodicSet, LeqVerdict, Name, TailRule, DEFAULT_RESERVE};
use crate::schedule::Schedule;
use crate::solovay::{tail_limit_window, MeasureValue, DEFAULT_WINDOW};

/// A point of the profinite completion of ℤ: residues `r_n mod n!` with
/// `r_{n+1} ≡ r_n (mod n!)`. Membership of an eventually periodic set with
/// period `p` is decided by the residue of the thread mod `p`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum ProfiniteThread {
    #[default]
    Zero,
    /// The image of an integer.
    Integer(BigInt),
    /// Factoradic digits `d_1, d_2, …` (`0 ≤ d_i ≤ i`) of `Σ d_i·i!`; missing
    /// digits are zero.
    Digits(Vec<u64>),
}

impl ProfiniteThread {
    pub fn digits(digits: Vec<u64>) -> Result<Self, Error> {
        for (i, &d) in digits.iter().enumerate() {
            if d > i as u64 + 1 {
                return Err(Error::Domain(format!("factoradic digit d_{} = {d} exceeds {}", i + 1, i + 1)));
            }
        }
        Ok(ProfiniteThread::Digits(digits))
    }

    /// From explicit residues `r_1, r_2, …, r_L` (`r_n` taken mod `n!`);
    /// the thread continues as the integer `r_L`.
    pub fn from_residues(residues: &[BigInt]) -> Result<Self, Error> {
        let mut fact = BigInt::one();
        for (i, r) in residues.iter().enumerate() {
            fact *= i + 1;
            if r.is_negative() || *r >= fact {
                return Err(Error::Domain(format!("residue r_{} = {r} is not below {}!", i + 1, i + 1)));
            }
            if i > 0 {
                let prev = &residues[i - 1];
                let prev_fact = &fact / (i + 1);
                if r.mod_floor(&prev_fact) != *prev {
                    return Err(Error::Domain(format!(
                        "residues r_{} = {prev} and r_{} = {r} are not compatible",
                        i,
                        i + 1
                    )));
                }
            }
        }
        Ok(match residues.last() {
            None => ProfiniteThread::Zero,
            Some(r) if r.is_zero() => ProfiniteThread::Zero,
            Some(r) => ProfiniteThread::Integer(r.clone()),
        })
    }

    /// The thread's residue modulo `p`.
    pub fn residue(&self, p: u64) -> u64 {
        match self {
            ProfiniteThread::Zero => 0,
            ProfiniteThread::Integer(m) => m.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
            ProfiniteThread::Digits(ds) => {
                // i! ≡ 0 (mod p) once i ≥ p
                let mut fact = 1u128 % p as u128;
                let mut acc = 0u128;
                for (i, &d) in ds.iter().enumerate().take(p as usize) {
                    fact = fact * (i as u128 + 1) % p as u128;
                    acc = (acc + d as u128 * fact) % p as u128;
                }
                acc as u64
            }
        }
    }

    /// `r_n`, the residue modulo `n!`.
    pub fn residue_mod_factorial(&self, n: u32) -> BigInt {
        let fact: BigInt = (1..=n).map(BigInt::from).product();
        match self {
            ProfiniteThread::Zero => BigInt::zero(),
            ProfiniteThread::Integer(m) => m.mod_floor(&fact),
            ProfiniteThread::Digits(ds) => {
                let mut f = BigInt::one();
                let mut acc = BigInt::zero();
                for (i, &d) in ds.iter().enumerate().take(n.saturating_sub(1) as usize) {
                    f *= i + 1;
                    acc += &f * d;
                }
                acc
            }
        }
    }
}

impl fmt::Display for ProfiniteThread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfiniteThread::Zero => f.write_str("zero"),
            ProfiniteThread::Integer(m) => write!(f, "int:{m}"),
            ProfiniteThread::Digits(ds) => {
                let s: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
                write!(f, "fact:{}", s.join(","))
            }
        }
    }
}

impl FromStr for ProfiniteThread {
    type Err = Error;

    /// `zero`, `int:<m>`, `fact:<d_1>,<d_2>,..`, `res:<r_1>,<r_2>,..`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a thread: {s:?}"));
        if s == "zero" {
            return Ok(ProfiniteThread::Zero);
        }
        let (head, body) = s.split_once(':').ok_or_else(bad)?;
        let nums = || -> Result<Vec<BigInt>, Error> {
            if body.trim().is_empty() {
                return Ok(Vec::new());
            }
            body.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
        };
        match head {
            "int" => {
                let m: BigInt = body.trim().parse().map_err(|_| bad())?;
                Ok(if m.is_zero() { ProfiniteThread::Zero } else { ProfiniteThread::Integer(m) })
            }
            "fact" => ProfiniteThread::digits(
                nums()?
                    .iter()
                    .map(|d| d.to_u64().ok_or_else(bad))
                    .collect::<Result<_, _>>()?,
            ),
            "res" => ProfiniteThread::from_residues(&nums()?),
            _ => Err(bad()),
        }
    }
}

impl Serialize for ProfiniteThread {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Whether the ultrafilter determined by `t` contains `x`.
pub fn oracle_member(t: &ProfiniteThread, x: &EventuallyPeriodicSet) -> bool {
    x.has_residue(t.residue(x.period()))
}

/// A function `ω → Dyadic` with finitely many values, each taken on an
/// eventually periodic set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSequence {
    levels: Vec<(Dyadic, EventuallyPeriodicSet)>,
}

impl StepSequence {
    /// The level sets must partition ω; repeated values are merged.
    pub fn new(levels: Vec<(Dyadic, EventuallyPeriodicSet)>) -> Result<Self, Error> {
        let mut merged: Vec<(Dyadic, EventuallyPeriodicSet)> = Vec::new();
        let mut seen = EventuallyPeriodicSet::none();
        for (v, x) in levels {
            if !seen.intersect(&x).is_empty() {
                return Err(Error::MalformedSequence(format!("level set of {v} overlaps an earlier level")));
            }
            seen = seen.union(&x);
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, y)) => *y = y.union(&x),
                None => merged.push((v, x)),
            }
        }
        if seen != EventuallyPeriodicSet::all() {
            return Err(Error::MalformedSequence(format!("level sets miss {}", seen.complement())));
        }
        merged.retain(|(_, x)| !x.is_empty());
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(StepSequence { levels: merged })
    }

    pub fn constant(c: Dyadic) -> Self {
        StepSequence {
            levels: vec![(c, EventuallyPeriodicSet::all())],
        }
    }

    /// The sequence `f`, which must be periodic with `period` from
    /// `threshold` on.
    pub fn from_fn(threshold: u64, period: u64, f: impl Fn(u64) -> Dyadic) -> Self {
        let mut values: Vec<Dyadic> = (0..threshold + period).map(&f).collect();
        values.sort();
        values.dedup();
        let levels = values
            .into_iter()
            .map(|v| {
                let x = EventuallyPeriodicSet::from_fn(threshold, period, |k| f(k) == v);
                (v, x)
            })
            .collect();
        StepSequence::new(levels).expect("level sets of a function partition ω")
    }

    pub fn levels(&self) -> &[(Dyadic, EventuallyPeriodicSet)] {
        &self.levels
    }

    pub fn value(&self, k: u64) -> Dyadic {
        self.levels
            .iter()
            .find(|(_, x)| x.contains(k))
            .map(|(v, _)| v.clone())
            .expect("level sets cover ω")
    }

    /// `k ↦ f(self(k), other(k))`.
    pub fn combine(&self, other: &StepSequence, f: impl Fn(&Dyadic, &Dyadic) -> Dyadic) -> StepSequence {
        let mut levels = Vec::new();
        for (v, x) in &self.levels {
            for (w, y) in &other.levels {
                let z = x.intersect(y);
                if !z.is_empty() {
                    levels.push((f(v, w), z));
                }
            }
        }
        StepSequence::new(levels).expect("refinement of two partitions")
    }
}

/// `lim_{k→U} v(k)`: the value whose level set belongs to the ultrafilter.
pub fn limit_along(t: &ProfiniteThread, v: &StepSequence) -> Dyadic {
    v.levels
        .iter()
        .find(|(_, x)| oracle_member(t, x))
        .map(|(v, _)| v.clone())
        .expect("exactly one level set of a finite partition is a member")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshConfig {
    pub reserve: u64,
    /// Largest admissible block width `w_k`.
    pub width_bound: u32,
    /// Widths are checked for `k ≤ horizon` (and over the constant tail).
    pub horizon: u64,
}

impl Default for FreshConfig {
    fn default() -> Self {
        FreshConfig {
            reserve: DEFAULT_RESERVE,
            width_bound: 128,
            horizon: 64,
        }
    }
}

pub fn fresh_independent(sch: &Schedule) -> Result<Name, Error> {
    fresh_independent_with(sch, &FreshConfig::default())
}

/// Independent clopens `M(k)` of measure `a_k` on pairwise disjoint blocks.
pub fn fresh_independent_with(sch: &Schedule, config: &FreshConfig) -> Result<Name, Error> {
    sch.validate()?;
    let horizon = match sch.eventually_constant() {
        Some((s0, _)) => config.horizon.max(s0),
        None => config.horizon,
    };
    if let Some(index) = (0..=horizon).find(|&k| sch.width(k) > config.width_bound) {
        return Err(Error::WidthBound {
            index,
            width: sch.width(index),
            bound: config.width_bound,
        });
    }
    Ok(Name::fresh_blocks(sch.clone(), config.reserve))
}

fn fresh_schedule(m: &Name) -> Result<&Schedule, Error> {
    match m.as_atom() {
        Some(([], TailRule::FreshBlocks { schedule, .. })) => Ok(schedule),
        _ => Err(Error::NotIndependent(m.to_string())),
    }
}

/// `Π (1 − a_k)` over `k ∈ X`, `lo ≤ k ≤ hi`.
fn miss_product(sch: &Schedule, x: &EventuallyPeriodicSet, lo: u64, hi: u64) -> Dyadic {
    x.members_in(lo, hi).map(|k| sch.value(k).complement()).product()
}

/// `λ(⋁_{k∈X, n<k≤N} M(k)) = 1 − Π (1 − a_k)` for a fresh independent name.
pub fn prefix_join_measure(m: &Name, x: &EventuallyPeriodicSet, n: u64, big_n: u64) -> Result<Dyadic, Error> {
    let sch = fresh_schedule(m)?;
    if big_n < n {
        return Err(Error::Precondition(format!("N = {big_n} is below n = {n}")));
    }
    Ok(miss_product(sch, x, n + 1, big_n).complement())
}

/// `Σ a_k` over `k ∈ X`, `n < k ≤ N`.
pub fn union_bound(sch: &Schedule, x: &EventuallyPeriodicSet, n: u64, big_n: u64) -> Dyadic {
    x.members_in(n + 1, big_n).map(|k| sch.value(k)).sum()
}

/// Fractional bits kept when products are rounded upward.
const PRODUCT_BITS: u32 = 256;

fn round_product(x: Dyadic) -> Dyadic {
    if x.exponent() > PRODUCT_BITS {
        x.round_up(PRODUCT_BITS)
    } else {
        x
    }
}

/// An upper bound on `b^n` for `0 ≤ b ≤ 1`, exact while small.
fn pow_upper(b: &Dyadic, mut n: u64) -> Dyadic {
    let mut acc = Dyadic::one();
    let mut base = b.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = round_product(&acc * &base);
        }
        n >>= 1;
        if n > 0 {
            base = round_product(&base * &base);
        }
    }
    acc
}

/// The innermost rule of a chain of explicit lists and the index from which
/// it applies.
fn final_rule(sch: &Schedule) -> (Option<&Schedule>, u64) {
    match sch {
        Schedule::Explicit { values, tail } => match tail {
            None => (None, values.len() as u64),
            Some(t) => {
                let (r, from) = final_rule(t);
                (r, from.max(values.len() as u64))
            }
        },
        s => (Some(s), 0),
    }
}

/// Last index of the run of equal values starting at `k`, if finite.
fn run_end(sch: &Schedule, k: u64) -> Option<u64> {
    match sch {
        Schedule::Constant(_) => None,
        Schedule::PowerDecay => {
            let j = 63 - (k + 1).leading_zeros();
            Some((1u64 << (j + 1)) - 2)
        }
        Schedule::Geometric(_) => Some(k),
        Schedule::Explicit { values, tail } => {
            if (k as usize) < values.len() {
                Some(k)
            } else {
                match tail {
                    Some(t) => run_end(t, k),
                    None => None,
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceReason {
    FiniteSet,
    EventuallyZero,
    Geometric,
}

/// `Σ_{k∈X} a_k < ∞`, with an explicit bound on the tails of the sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergentCertificate {
    pub schedule: Schedule,
    pub set: EventuallyPeriodicSet,
    pub reason: ConvergenceReason,
}

impl ConvergentCertificate {
    /// An upper bound on `Σ_{k∈X, k>n} a_k`.
    pub fn tail_bound(&self, n: u64) -> Dyadic {
        let sch = &self.schedule;
        match self.reason {
            ConvergenceReason::FiniteSet => {
                let last = self.set.threshold();
                union_bound(sch, &self.set, n, last)
            }
            ConvergenceReason::EventuallyZero => {
                let (s0, _) = sch.eventually_constant().expect("eventually zero");
                union_bound(sch, &self.set, n, s0)
            }
            ConvergenceReason::Geometric => {
                let (rule, from) = final_rule(sch);
                let Some(Schedule::Geometric(c)) = rule else {
                    unreachable!("geometric certificates carry a geometric tail")
                };
                let start = (n + 1).max(from);
                // Σ_{k≥start} 2^{−k−c} = 2^{1−start−c}
                let listed = if start > n + 1 {
                    union_bound(sch, &self.set, n, start - 1)
                } else {
                    Dyadic::zero()
                };
                listed + Dyadic::pow2_neg((start + *c as u64) as u32).mul_int(2)
            }
        }
    }
}

/// `Σ_{k∈X} a_k = ∞` for independent events, with the index by which the
/// product of misses has fallen below a given `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergentCertificate {
    pub schedule: Schedule,
    pub set: EventuallyPeriodicSet,
}

/// Indices searched before giving up.
const SEARCH_LIMIT: u64 = 1 << 48;

impl DivergentCertificate {
    /// Least `N` with `Π_{k∈X, k≤N} (1 − a_k) < ε`.
    pub fn n_for(&self, eps: &Dyadic) -> Result<u64, Error> {
        self.n_for_rational(&eps.to_rational())
    }

    pub fn n_for_rational(&self, eps: &BigRational) -> Result<u64, Error> {
        search_product(&self.schedule, &self.set, 0, Dyadic::one(), eps)
    }

    /// `Π_{k∈X, k≤N} (1 − a_k)`.
    pub fn residual(&self, big_n: u64) -> Dyadic {
        miss_product(&self.schedule, &self.set, 0, big_n)
    }

    /// An upper bound on `residual(N)`, exact while it fits in 256
    /// fractional bits and cheap for large `N`.
    pub fn bound_at(&self, big_n: u64) -> Dyadic {
        product_upper(&self.schedule, &self.set, 0, big_n, Dyadic::one())
    }
}

/// An upper bound on `start · Π_{k∈X, from≤k≤to} (1 − a_k)`, exact while the
/// product fits in `PRODUCT_BITS` fractional bits.
pub(crate) fn product_upper(sch: &Schedule, x: &EventuallyPeriodicSet, from: u64, to: u64, start: Dyadic) -> Dyadic {
    let mut prod = start;
    let mut k = from;
    while k <= to && !prod.is_zero() {
        let end = run_end(sch, k).map_or(to, |e| e.min(to));
        let miss = sch.value(k).complement();
        prod = round_product(&prod * &pow_upper(&miss, x.count_in(k, end)));
        k = end + 1;
    }
    prod
}

/// Least `N ≥ from` such that `start · Π_{k∈X, from≤k≤N} (1 − a_k) < ε`.
/// Products beyond `PRODUCT_BITS` fractional bits are rounded upward, so the
/// returned index always satisfies the inequality.
pub(crate) fn search_product(
    sch: &Schedule,
    x: &EventuallyPeriodicSet,
    from: u64,
    start: Dyadic,
    eps: &BigRational,
) -> Result<u64, Error> {
    let below = |d: &Dyadic| d.to_rational() < *eps;
    let mut prod = start;
    let mut k = from;
    loop {
        if k > SEARCH_LIMIT {
            return Err(Error::BoundExceeded {
                what: "certificate search index",
                bound: SEARCH_LIMIT as usize,
                got: k as usize,
            });
        }
        let miss = sch.value(k).complement();
        let at = |j: u64| round_product(&prod * &pow_upper(&miss, x.count_in(k, j)));
        let end = match run_end(sch, k) {
            Some(e) => e,
            None => {
                // grow the run until the product falls below ε
                let mut e = k.max(1) * 2;
                while !below(&at(e)) {
                    if miss.is_one() || e > SEARCH_LIMIT {
                        return Err(Error::BoundExceeded {
                            what: "certificate search index",
                            bound: SEARCH_LIMIT as usize,
                            got: e as usize,
                        });
                    }
                    e *= 2;
                }
                e
            }
        };
        if below(&at(end)) {
            let (mut lo, mut hi) = (k, end);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if below(&at(mid)) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return Ok(lo);
        }
        prod = at(end);
        k = end + 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "certificate", rename_all = "snake_case")]
pub enum BcVerdict {
    Convergent(ConvergentCertificate),
    Divergent(DivergentCertificate),
}

/// Whether `Σ_{k∈X} a_k` converges, with a certificate either way.
pub fn borel_cantelli_verdict(sch: &Schedule, x: &EventuallyPeriodicSet) -> Result<BcVerdict, Error> {
    let (rule, _) = final_rule(sch);
    let Some(rule) = rule else {
        return Err(Error::Unclassifiable(format!("{sch} has no tail rule")));
    };
    let convergent = |reason| {
        Ok(BcVerdict::Convergent(ConvergentCertificate {
            schedule: sch.clone(),
            set: x.clone(),
            reason,
        }))
    };
    if x.is_finite() {
        return convergent(ConvergenceReason::FiniteSet);
    }
    match rule {
        Schedule::Constant(a) if a.is_zero() => convergent(ConvergenceReason::EventuallyZero),
        Schedule::Geometric(_) => convergent(ConvergenceReason::Geometric),
        // a positive constant, or 2^{−j} on each block [2^j − 1, 2^{j+1} − 1)
        // where an infinite periodic set has ≥ 2^j / P − 1 members
        _ => Ok(BcVerdict::Divergent(DivergentCertificate {
            schedule: sch.clone(),
            set: x.clone(),
        })),
    }
}

/// `ν(M) = lim_{k→U} λ(M(k))`.
pub fn nu(m: &Name, t: &ProfiniteThread) -> MeasureValue {
    nu_window(m, t, DEFAULT_WINDOW)
}

pub fn nu_window(m: &Name, t: &ProfiniteThread, window: u64) -> MeasureValue {
    let v = tail_limit_window(m, &Clopen::one(), window);
    match &v {
        MeasureValue::Conditional { .. } => v.resolve(&|x| oracle_member(t, x)).unwrap_or(v),
        _ => v,
    }
}

/// `λ(M(k))` for `k ≤ window` along the diagonal name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegmentValue {
    pub k: u64,
    /// `n_k`, absent below `l_0`.
    pub segment: Option<usize>,
    pub measure: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ap1Report {
    /// `l_0 < l_1 < … < l_T`.
    pub cuts: Vec<u64>,
    /// `r_n = ν(M_n)`.
    pub limits: Vec<Dyadic>,
    /// The sets `U_n` and their intersection `U`.
    pub level_sets: Vec<EventuallyPeriodicSet>,
    pub intersection: EventuallyPeriodicSet,
    pub window_values: Vec<SegmentValue>,
    /// `r_T`, the finite-horizon estimate of `lim r_n`.
    pub nu_estimate: Dyadic,
    pub nu: MeasureValue,
    pub notes: Vec<String>,
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Splice a pointwise-decreasing `M_0 ≥ … ≥ M_T` into one name `M` with
/// `M ≤* M_n` for each `n` and `ν(M) = r_T`.
pub fn ap1_diagonalize(ms: &[Name], t: &ProfiniteThread, window: u64) -> Result<(Name, Ap1Report), Error> {
    if ms.is_empty() {
        return Err(Error::Precondition("the sequence of names is empty".into()));
    }
    for (n, pair) in ms.windows(2).enumerate() {
        match leq_name(&pair[1], &pair[0], window) {
            LeqVerdict::Always(_) => {}
            v => {
                return Err(Error::Precondition(format!(
                    "M_{} ≤ M_{n} is not certified ({v:?})",
                    n + 1
                )))
            }
        }
    }
    let mut limits = Vec::new();
    let mut level_sets = Vec::new();
    for (n, m) in ms.iter().enumerate() {
        let r = match nu_window(m, t, window) {
            MeasureValue::Exact { value, .. } => value,
            v => return Err(Error::Precondition(format!("ν(M_{n}) does not resolve exactly: {v:?}"))),
        };
        let form = analyze(m).ok_or_else(|| Error::Precondition(format!("M_{n} has no analyzable tail")))?;
        let r_q = r.to_rational();
        let tol = rational(1, n as i64 + 1);
        let close = |k: u64| (m.eval(k).measure().to_rational() - &r_q).abs() < tol;
        let u_n = EventuallyPeriodicSet::from_fn(form.injective_from(None), form.period, close);
        if !oracle_member(t, &u_n) {
            return Err(Error::Precondition(format!("U_{n} = {u_n} is not in the ultrafilter")));
        }
        limits.push(r);
        level_sets.push(u_n);
    }
    let u = level_sets
        .iter()
        .fold(EventuallyPeriodicSet::all(), |acc, x| acc.intersect(x));
    let mut cuts: Vec<u64> = Vec::with_capacity(ms.len());
    for n in 0..ms.len() {
        let from = cuts.last().map_or(n as u64, |&l| (l + 1).max(n as u64));
        let l = u.next_member(from).expect("members of the ultrafilter are infinite");
        cuts.push(l);
    }
    let (partition, pieces) = if cuts[0] == 0 {
        (cuts.clone(), ms.to_vec())
    } else {
        let mut c = vec![0];
        c.extend(&cuts);
        let mut p = vec![Name::one()];
        p.extend(ms.iter().cloned());
        (c, p)
    };
    let m = Name::spliced(partition.try_into()?, pieces)?;
    let window_values = (0..=window)
        .map(|k| SegmentValue {
            k,
            segment: cuts.iter().rposition(|&l| l <= k),
            measure: m.eval(k).measure(),
        })
        .collect();
    let nu_m = nu_window(&m, t, window);
    let report = Ap1Report {
        nu_estimate: limits.last().unwrap().clone(),
        cuts,
        limits,
        level_sets,
        intersection: u,
        window_values,
        nu: nu_m,
        notes: vec![
            "U is the intersection of the finitely many U_n, each an oracle member; it replaces the P-point pseudo-intersection".into(),
            "ν(M) = lim ν(M_n) is checked only up to the horizon T".into(),
            "U_n uses the threshold 1/(n+1)".into(),
        ],
    };
    Ok((m, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn set(s: &str) -> EventuallyPeriodicSet {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_examples() {
        let zero = ProfiniteThread::Zero;
        assert!(oracle_member(&zero, &set("mod3:0")));
        assert!(!oracle_member(&zero, &set("odds")));
        let minus_one: ProfiniteThread = "int:-1".parse().unwrap();
        assert!(oracle_member(&minus_one, &set("odds")));
        assert!(oracle_member(&minus_one, &set("mod7:6")));
        for t in [&zero, &minus_one] {
            assert!(oracle_member(t, &set("cofinite:1,2,3")));
            assert!(!oracle_member(t, &set("finite:0,1,2")));
        }
    }

    #[test]
    fn thread_forms_agree() {
        // 1·1! + 2·2! + 1·3! = 11
        let f: ProfiniteThread = "fact:1,2,1".parse().unwrap();
        let i: ProfiniteThread = "int:11".parse().unwrap();
        for p in 1..30 {
            assert_eq!(f.residue(p), i.residue(p));
        }
        assert_eq!(f.residue_mod_factorial(3), BigInt::from(5));
        let r: ProfiniteThread = "res:0,1,5,11".parse().unwrap();
        assert_eq!(r, i);
        assert!("res:0,1,4".parse::<ProfiniteThread>().is_err());
        assert!("fact:2".parse::<ProfiniteThread>().is_err());
    }

    #[test]
    fn limits_along_threads() {
        assert_eq!(limit_along(&ProfiniteThread::Zero, &StepSequence::constant(d("3/4"))), d("3/4"));
        let v = StepSequence::new(vec![(d("1/2"), set("evens")), (Dyadic::zero(), set("odds"))]).unwrap();
        assert_eq!(limit_along(&ProfiniteThread::Zero, &v), d("1/2"));
        assert!(StepSequence::new(vec![(d("1/2"), set("evens"))]).is_err());
        assert!(StepSequence::new(vec![(d("1/2"), set("evens")), (d("1"), set("all"))]).is_err());
    }

    #[test]
    fn fresh_family() {
        let m = fresh_independent(&"const(1/2)".parse().unwrap()).unwrap();
        assert_eq!(m.eval(3).support().len(), 1);
        let p = fresh_independent(&Schedule::PowerDecay).unwrap();
        assert_eq!(p.eval(6).measure(), d("1/4"));
        assert!(matches!(
            fresh_independent(&Schedule::Geometric(100)),
            Err(Error::WidthBound { index: 29, .. })
        ));
    }

    #[test]
    fn prefix_joins() {
        let m = fresh_independent(&"const(1/2)".parse().unwrap()).unwrap();
        assert_eq!(prefix_join_measure(&m, &set("all"), 0, 3).unwrap(), d("7/8"));
        assert_eq!(prefix_join_measure(&m, &set("all"), 4, 4).unwrap(), Dyadic::zero());
        assert_eq!(
            prefix_join_measure(&m, &set("evens"), 0, 40).unwrap(),
            Dyadic::one() - Dyadic::pow2_neg(20)
        );
        assert!(prefix_join_measure(&Name::one(), &set("all"), 0, 3).is_err());
    }

    #[test]
    fn verdicts() {
        let half: Schedule = "const(1/2)".parse().unwrap();
        let BcVerdict::Divergent(c) = borel_cantelli_verdict(&half, &set("evens")).unwrap() else {
            panic!()
        };
        assert_eq!(c.n_for(&Dyadic::pow2_neg(20)).unwrap(), 40);
        let BcVerdict::Convergent(g) = borel_cantelli_verdict(&Schedule::Geometric(0), &set("all")).unwrap() else {
            panic!()
        };
        assert_eq!(g.tail_bound(3), d("1/8"));
        assert!(matches!(
            borel_cantelli_verdict(&Schedule::PowerDecay, &set("odds")),
            Ok(BcVerdict::Divergent(_))
        ));
        assert!(matches!(
            borel_cantelli_verdict(&"explicit(1/2)".parse().unwrap(), &set("all")),
            Err(Error::Unclassifiable(_))
        ));
        assert!(matches!(
            borel_cantelli_verdict(&half, &set("finite:1,2")),
            Ok(BcVerdict::Convergent(_))
        ));
    }

    #[test]
    fn divergent_search_is_least() {
        let cases = ["const(1/2)", "const(3/8)", "power", "explicit(1/4,0,1/2;const(1/8))"];
        for s in cases {
            let sch: Schedule = s.parse().unwrap();
            for x in ["all", "odds", "mod3:1,2"] {
                let BcVerdict::Divergent(c) = borel_cantelli_verdict(&sch, &set(x)).unwrap() else {
                    panic!()
                };
                for e in [1, 3, 6] {
                    let eps = Dyadic::pow2_neg(e);
                    let n = c.n_for(&eps).unwrap();
                    assert!(c.residual(n) < eps, "{s} {x} {e}");
                    if n > 0 {
                        assert!(c.residual(n - 1) >= eps, "{s} {x} {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn nu_examples() {
        let t = ProfiniteThread::Zero;
        assert_eq!(nu(&"Ms:01".parse().unwrap(), &t).exact_value(), Some(&d("1/4")));
        assert_eq!(nu(&"ind:evens".parse().unwrap(), &t).exact_value(), Some(&d("1")));
        assert_eq!(nu(&Name::zero(), &t).exact_value(), Some(&Dyadic::zero()));
    }

    #[test]
    fn ap1_on_all_ones_chain() {
        let ms: Vec<Name> = (0..=8).map(|n| crate::solovay::make_ms(&crate::names::Bits::ones(n))).collect();
        let (m, report) = ap1_diagonalize(&ms, &ProfiniteThread::Zero, 64).unwrap();
        assert_eq!(report.cuts, (0..=8).collect::<Vec<u64>>());
        for (n, mn) in ms.iter().enumerate() {
            assert_eq!(leq_name(&m, mn, 64).threshold(), Some(report.cuts[n]));
        }
        for sv in &report.window_values {
            let n = sv.segment.unwrap();
            assert_eq!(sv.measure, Dyadic::pow2_neg(n as u32));
        }
        assert_eq!(report.nu.exact_value(), Some(&Dyadic::pow2_neg(8)));
    }

    #[test]
    fn ap1_preconditions() {
        let ms = vec![Name::sliding("1".parse().unwrap()), Name::one()];
        assert!(matches!(
            ap1_diagonalize(&ms, &ProfiniteThread::Zero, 64),
            Err(Error::Precondition(_))
        ));
        let p = vec![Name::fresh_blocks(Schedule::PowerDecay, 64)];
        assert!(ap1_diagonalize(&p, &ProfiniteThread::Zero, 64).is_err());
    }
}
