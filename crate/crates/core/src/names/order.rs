use num_traits::{One, Zero};
use serde::Serialize;

use super::tail::{analyze, moving_groups, scan_down, MOVING};
use super::{Name, TailRule};
use crate::clopen::{BoolOp, Clopen};
use crate::dyadic::Dyadic;

/// Why `M(k) ≤ N(k)` holds for all `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofClass {
    Identical,
    /// Sliding patterns where the larger name's pattern is a prefix of the
    /// smaller's.
    PatternExtension,
    /// The symbolic tails satisfy `G_M ∧ ¬G_N = 0` and the finitely many
    /// earlier indices were checked.
    SymbolicTail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "value", rename_all = "snake_case")]
pub enum LeqVerdict {
    Always(ProofClass),
    /// `M(k) ≤ N(k)` for every `k ≥` the threshold, which is least.
    Eventually(u64),
    /// Least `k` with `M(k) ≰ N(k)`.
    No(u64),
    Unknown,
}

impl LeqVerdict {
    /// The least index from which the inequality is proven.
    pub fn threshold(&self) -> Option<u64> {
        match self {
            LeqVerdict::Always(_) => Some(0),
            LeqVerdict::Eventually(t) => Some(*t),
            _ => None,
        }
    }
}

fn pattern_extension(m: &Name, n: &Name) -> bool {
    match (m.as_atom(), n.as_atom()) {
        (
            Some(([], TailRule::SlidingPattern { pattern: s })),
            Some(([], TailRule::SlidingPattern { pattern: t })),
        ) => t.is_prefix_of(s),
        _ => false,
    }
}

/// Decide `M ≤* N` where the tails can be compared symbolically; otherwise
/// search for a counterexample on `0..=window`.
///
/// `No(k)` always carries the least failing index. When the tails are
/// analyzable and disagree it is found even if it lies beyond `window`.
pub fn leq_name(m: &Name, n: &Name, window: u64) -> LeqVerdict {
    if m == n {
        return LeqVerdict::Always(ProofClass::Identical);
    }
    let fails = |k: u64| !m.eval(k).leq(&n.eval(k));
    if let (Some(fm), Some(fn_)) = (analyze(m), analyze(n)) {
        let d = fm.apply(BoolOp::Diff, &fn_);
        if d.is_zero() {
            let t = scan_down(d.start, |k| !fails(k));
            if t > 0 {
                return LeqVerdict::Eventually(t);
            }
            let class = if pattern_extension(m, n) {
                ProofClass::PatternExtension
            } else {
                ProofClass::SymbolicTail
            };
            return LeqVerdict::Always(class);
        }
        // a nonzero shape stays nonzero once materialization is injective
        let hi = window.max(d.injective_from(None) + d.period);
        if let Some(k) = (0..=hi).find(|&k| fails(k)) {
            return LeqVerdict::No(k);
        }
        unreachable!("a nonzero symbolic difference materializes to a witness");
    }
    match (0..=window).find(|&k| fails(k)) {
        Some(k) => LeqVerdict::No(k),
        None => LeqVerdict::Unknown,
    }
}

/// A proven lower bound on the measure of every windowed tail join.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfinitenessEvidence {
    /// `λ(⋁_{l<k≤l+window} M(k)) ≥ lower_bound` for every `l ≥ from_index`.
    pub lower_bound: Dyadic,
    pub window: u64,
    pub from_index: u64,
    /// Spacing of the coordinate-disjoint indices used in the proof.
    pub spacing: u64,
    /// Exact windowed join measures at a few `l ≥ from_index`.
    pub samples: Vec<(u64, Dyadic)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "value", rename_all = "snake_case")]
pub enum Finiteness {
    /// `M(k) = 0` for every `k ≥` the bound, which is least.
    ForcedFinite(u64),
    ForcedInfinite(InfinitenessEvidence),
    Unknown,
}

/// Measure of `⋁_{l<k≤l+window} M(k)`.
pub fn windowed_join(m: &Name, l: u64, window: u64) -> Dyadic {
    (l + 1..=l + window)
        .fold(Clopen::zero(), |acc, k| acc.join(&m.eval(k)))
        .measure()
}

pub fn finiteness_certificate(m: &Name, window: u64) -> Finiteness {
    let Some(form) = analyze(m) else {
        return Finiteness::Unknown;
    };
    if form.is_zero() {
        return Finiteness::ForcedFinite(scan_down(form.start, |k| m.eval(k).is_zero()));
    }
    let p = form.period;
    let from_index = form.injective_from(None);
    let mut best: Option<(Dyadic, u64)> = None;
    for shape in form.shapes.iter().filter(|s| !s.is_zero()) {
        let groups = moving_groups(std::iter::once(shape));
        let (spacing, draws) = match groups.len() {
            0 => (p, window / p),
            1 => {
                let (&s, &(lo, hi)) = groups.iter().next().unwrap();
                // s·Δ must exceed the span so that chosen indices use disjoint coordinates
                let span = (hi - lo) as u64 + 1;
                let spacing = p * span.div_ceil(s * p);
                (spacing, window / spacing)
            }
            _ => (p, (window >= p) as u64),
        };
        if draws == 0 {
            continue;
        }
        // conditional on the fixed coordinates the drawn indices are independent
        let bound: Dyadic = shape
            .split_at(MOVING)
            .iter()
            .map(|(cell, v)| cell.measure() * (Dyadic::one() - v.complement().pow(draws as u32)))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| bound > *b) {
            best = Some((bound, spacing));
        }
    }
    match best {
        Some((lower_bound, spacing)) if !lower_bound.is_zero() => {
            let samples: Vec<(u64, Dyadic)> = (from_index..from_index + 3)
                .map(|l| (l, windowed_join(m, l, window)))
                .collect();
            debug_assert!(samples.iter().all(|(_, v)| *v >= lower_bound));
            Finiteness::ForcedInfinite(InfinitenessEvidence {
                lower_bound,
                window,
                from_index,
                spacing,
                samples,
            })
        }
        _ => Finiteness::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::{Bits, EventuallyPeriodicSet};
    use crate::schedule::Schedule;

    fn ms(s: &str) -> Name {
        Name::sliding(s.parse().unwrap())
    }

    #[test]
    fn pattern_extension_is_always() {
        assert_eq!(
            leq_name(&ms("10"), &ms("1"), 64),
            LeqVerdict::Always(ProofClass::PatternExtension)
        );
        assert_eq!(leq_name(&ms("1"), &ms("0"), 64), LeqVerdict::No(0));
        assert_eq!(leq_name(&ms("1"), &ms("1"), 64), LeqVerdict::Always(ProofClass::Identical));
    }

    #[test]
    fn eventual_inclusion_has_least_threshold() {
        let m = Name::atom(vec![Clopen::one(), Clopen::one(), Clopen::zero()], TailRule::SlidingPattern {
            pattern: "11".parse().unwrap(),
        });
        assert_eq!(leq_name(&m, &ms("1"), 64), LeqVerdict::Eventually(2));
        let n = Name::spliced("0,3,7".parse().unwrap(), vec![Name::one(), ms("1"), ms("11")]).unwrap();
        assert_eq!(leq_name(&n, &ms("1"), 64), LeqVerdict::Eventually(3));
        assert_eq!(leq_name(&n, &ms("11"), 64), LeqVerdict::Eventually(7));
    }

    #[test]
    fn witnesses_beyond_the_window() {
        let x = Name::indicator("ep:100::1:0".parse().unwrap());
        assert_eq!(leq_name(&x, &Name::zero(), 10), LeqVerdict::No(100));
        // no analysis available and no witness inside the window
        let p = Name::fresh_blocks(Schedule::PowerDecay, 64);
        assert_eq!(leq_name(&p, &p.join(&ms("1")), 8), LeqVerdict::Unknown);
    }

    #[test]
    fn always_implies_zero_difference() {
        let m = Name::sliding_union(vec![Bits::ones(2), "01".parse().unwrap()]).unwrap();
        let n = ms("").join(&ms("1"));
        let v = leq_name(&m, &n, 64);
        assert!(v.threshold().is_some());
        for k in 0..64 {
            assert!(m.meet(&n.complement()).eval(k).is_zero());
        }
    }

    #[test]
    fn finiteness() {
        let m = Name::atom(vec![Clopen::var(1); 5], TailRule::Zero);
        assert_eq!(finiteness_certificate(&m, 64), Finiteness::ForcedFinite(5));
        let fin = Name::indicator(EventuallyPeriodicSet::finite([3, 8])).meet(&ms("1"));
        assert_eq!(finiteness_certificate(&fin, 64), Finiteness::ForcedFinite(9));
        let Finiteness::ForcedInfinite(e) = finiteness_certificate(&ms("1"), 64) else {
            panic!()
        };
        assert_eq!(e.lower_bound, Dyadic::one() - Dyadic::pow2_neg(64));
        let Finiteness::ForcedInfinite(e) = finiteness_certificate(&ms("011"), 30) else {
            panic!()
        };
        assert_eq!(e.spacing, 3);
        assert_eq!(e.lower_bound, Dyadic::one() - Dyadic::new(7, 3).pow(10));
        assert!(e.samples.iter().all(|(_, v)| *v >= e.lower_bound));
        let Finiteness::ForcedInfinite(e) =
            finiteness_certificate(&Name::indicator(EventuallyPeriodicSet::evens()), 8)
        else {
            panic!()
        };
        assert_eq!(e.lower_bound, Dyadic::one());
        assert_eq!(
            finiteness_certificate(&Name::fresh_blocks(Schedule::PowerDecay, 64), 8),
            Finiteness::Unknown
        );
    }
}
