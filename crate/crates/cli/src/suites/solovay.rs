use namebench_core::filters::{oracle_member, ProfiniteThread};
use namebench_core::solovay::{
    density, dyadic_antichain, make_malpha, make_ms, partition_family, tail_limit, Density, DensityOutcome, MeasureValue,
};
use namebench_core::{enumerate_clopens, Bits, Clopen, Dyadic, Name};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::j;
use crate::gen::{analyzable_name, clopen, rng_for};
use crate::report::{CaseRecord, Provenance, Tally};
use crate::settings::Settings;

pub const MS_MAX_LEN: usize = 4;
pub const MS_CLOPEN_CAP: usize = 10_000;
pub const PARTITION_MAX_N: usize = 5;
pub const ADDITIVITY_PAIRS: u64 = 200;

pub fn ms_measure(_settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let support: Vec<u64> = (0..8).collect();
    let clopens: Vec<Clopen> = enumerate_clopens(&support, 8)
        .expect("eight coordinates")
        .take(MS_CLOPEN_CAP)
        .collect();
    let strings: Vec<Bits> = (0..=MS_MAX_LEN).flat_map(Bits::all_of_length).collect();
    let cases = strings
        .par_iter()
        .map(|s| {
            let m = make_ms(s);
            let mut t = Tally::default();
            for b in &clopens {
                let want = b.measure().shr(s.len() as u32);
                let bound = b.max_coord().map_or(0, |c| c + 1);
                match tail_limit(&m, b) {
                    MeasureValue::Exact {
                        value,
                        stabilization_index,
                    } => {
                        t.check(value == want, || format!("B = {b}: value {value}, expected {want}"));
                        t.check(stabilization_index <= bound, || {
                            format!("B = {b}: stabilizes at {stabilization_index} > {bound}")
                        });
                    }
                    v => t.check(false, || format!("B = {b}: not exact: {}", j(&v))),
                }
                // the cylinder at k sits above B, so the meet factors
                let direct = m.eval(bound).meet(b).measure();
                t.check(direct == want, || format!("B = {b}: λ(M_s({bound}) ∧ B) = {direct}"));
            }
            t.into_case(
                format!("s={}", if s.is_empty() { "ε".to_string() } else { s.to_string() }),
                Provenance::Structural,
                json!({ "s": s.to_string(), "clopens": clopens.len(), "support": support }),
                "tail_limit(M_s, B) = Exact(2^-|s| λ(B)) stabilizing by max(supp B) + 1",
            )
        })
        .collect();
    let notes = vec![format!(
        "B ranges over the first {} clopens of the enumeration over coordinates 0..8",
        clopens.len()
    )];
    (cases, notes)
}

pub fn partition(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let window = settings.window;
    let cases = (0..=PARTITION_MAX_N)
        .into_par_iter()
        .map(|n| {
            let family = partition_family(n, 8).expect("within the bound");
            let mut t = Tally::default();
            t.check(family.len() == 1 << n, || format!("{} names", family.len()));
            for k in 0..=window {
                let evals: Vec<Clopen> = family.iter().map(|m| m.eval(k)).collect();
                for (i, a) in evals.iter().enumerate() {
                    for b in &evals[i + 1..] {
                        t.check(a.disjoint(b), || format!("overlap at k = {k}"));
                    }
                }
                let join = evals.iter().fold(Clopen::zero(), |acc, c| acc.join(c));
                t.check(join.is_one(), || format!("join is {join} at k = {k}"));
            }
            let want = Dyadic::pow2_neg(n as u32);
            for m in &family {
                let d = density(m).ok().and_then(|d| d.unconditional().and_then(|d| d.as_constant().cloned()));
                t.check(d.as_ref() == Some(&want), || format!("density of {m} is {d:?}"));
            }
            t.into_case(
                format!("n={n}"),
                Provenance::ClosedForm,
                json!({ "n": n, "window": window }),
                "2^n pairwise disjoint names with join 1 and constant density 2^-n",
            )
        })
        .collect();
    (cases, vec![])
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn constant_density(m: &Name) -> Option<Dyadic> {
    density(m).ok()?.unconditional()?.as_constant().cloned()
}

pub fn gm_reals(_settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let mut cases = Vec::new();
    let five_eighths = rational(5, 8);
    let m = make_malpha(&five_eighths, 8).expect("valid alpha");
    cases.push(CaseRecord::new(
        "alpha=5/8,d=8",
        Provenance::ClosedForm,
        json!({ "alpha": "5/8", "depth": 8 }),
        json!({ "constant": j(Dyadic::new(5, 3)) }),
        json!({ "constant": j(constant_density(&m)) }),
    ));
    let two_thirds = rational(2, 3);
    for depth in [6u32, 10, 14] {
        let m = make_malpha(&two_thirds, depth).expect("valid alpha");
        let c = constant_density(&m);
        let bound = BigRational::new(BigInt::one(), BigInt::one() << depth);
        let err = c.as_ref().map(|c| (c.to_rational() - &two_thirds).abs());
        let pass = err.as_ref().is_some_and(|e| *e <= bound);
        cases.push(CaseRecord::judged(
            format!("alpha=2/3,d={depth:02}"),
            Provenance::ClosedForm,
            json!({ "alpha": "2/3", "depth": depth }),
            json!({ "error_at_most": format!("1/{}", 1u64 << depth) }),
            json!({ "constant": j(&c), "error": err.map(|e| e.to_string()) }),
            pass,
        ));
    }
    // the antichain sums to the truncation of α
    for (alpha, depth) in [(rational(5, 8), 8u32), (rational(2, 3), 10), (rational(1, 1), 4), (rational(0, 1), 4)] {
        let ac = dyadic_antichain(&alpha, depth).expect("valid alpha");
        let sum: Dyadic = ac.iter().map(|s| Dyadic::pow2_neg(s.len() as u32)).sum();
        let incompatible = ac.iter().enumerate().all(|(i, s)| ac[i + 1..].iter().all(|r| s.incompatible(r)));
        let floor = Dyadic::floor_rational(&alpha, depth);
        cases.push(CaseRecord::new(
            format!("antichain-{alpha}@{depth:02}"),
            Provenance::ClosedForm,
            json!({ "alpha": alpha.to_string(), "depth": depth }),
            json!({ "sum": j(&floor), "pairwise_incompatible": true }),
            json!({ "sum": j(&sum), "pairwise_incompatible": incompatible }),
        ));
    }
    (cases, vec![])
}

/// The branch of a conditional density chosen by the thread.
fn resolved(m: &Name, t: &ProfiniteThread) -> Option<Density> {
    match density(m).ok()? {
        DensityOutcome::Density(d) => Some(d),
        DensityOutcome::Conditional(branches) => branches
            .into_iter()
            .find(|b| oracle_member(t, &b.set) == b.member)
            .map(|b| b.density),
    }
}

fn minterms() -> Vec<Clopen> {
    (0..64u32)
        .map(|x| Clopen::cube((0..6).map(|i| (i as u64, x >> i & 1 == 1))))
        .collect()
}

pub fn additivity(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let cells = minterms();
    let thread = &settings.thread;
    let cases = (0..ADDITIVITY_PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 20, i);
            let m = analyzable_name(&mut rng);
            let n = analyzable_name(&mut rng).meet(&m.complement());
            let join = m.join(&n);
            let mut t = Tally::default();
            let (dm, dn, dj) = (resolved(&m, thread), resolved(&n, thread), resolved(&join, thread));
            let (Some(dm), Some(dn), Some(dj)) = (dm, dn, dj) else {
                t.check(false, || "a density failed to resolve".into());
                return t.into_case(
                    format!("pair-{i:03}"),
                    Provenance::Law,
                    json!({ "m": m.to_string(), "n": n.to_string() }),
                    "",
                );
            };
            for d in [&dm, &dn, &dj] {
                t.check(*d.max_value() <= Dyadic::one(), || format!("density value {} above 1", d.max_value()));
            }
            let mut bs = cells.clone();
            bs.extend((0..16).map(|_| {
                let vars = rng.gen_range(1..=6);
                clopen(&mut rng, 6, vars)
            }));
            for b in &bs {
                let (im, in_, ij) = (dm.integral(b), dn.integral(b), dj.integral(b));
                t.check(ij == &im + &in_, || format!("B = {b}: {ij} ≠ {im} + {in_}"));
                let lb = b.measure();
                for v in [&im, &in_, &ij] {
                    t.check(*v <= lb, || format!("B = {b}: integral {v} above λ(B) = {lb}"));
                }
                // the limit of λ(M(k) ∧ B), computed without the density
                let limit = tail_limit(&join, b).resolve(&|x| oracle_member(thread, x));
                let exact = limit.ok().and_then(|v| v.exact_value().cloned());
                t.check(exact.as_ref() == Some(&ij), || format!("B = {b}: tail limit {exact:?} ≠ {ij}"));
            }
            t.into_case(
                format!("pair-{i:03}"),
                Provenance::Law,
                json!({ "m": m.to_string(), "n": n.to_string(), "thread": thread.to_string() }),
                "density of M ∨ N integrates to the sum over all B ⊆ {0..5}, each integral ≤ λ(B)",
            )
        })
        .collect();
    let notes = vec![
        "N is drawn as N' ∧ ¬M so the pair is disjoint".into(),
        "all B with support in {0..5} are covered through the 64 minterms (integrals are additive in B); 16 random B per pair are also checked directly".into(),
    ];
    (cases, notes)
}
