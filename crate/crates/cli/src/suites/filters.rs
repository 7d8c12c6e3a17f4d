use namebench_core::filters::{
    ap1_diagonalize, borel_cantelli_verdict, fresh_independent, limit_along, oracle_member, prefix_join_measure,
    BcVerdict, ProfiniteThread, StepSequence,
};
use namebench_core::names::leq_name;
use namebench_core::solovay::make_ms;
use namebench_core::{Bits, Clopen, Dyadic, Error, EventuallyPeriodicSet, Name, Schedule};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::j;
use crate::gen::{periodic_set, rng_for};
use crate::report::{CaseRecord, Provenance, Tally};
use crate::settings::Settings;

pub const ORACLE_SETS: u64 = 500;

/// A nonzero thread: the configured one, or `fact:1,2,3` (the integer 23).
fn threads(settings: &Settings) -> [ProfiniteThread; 2] {
    let other = match settings.thread {
        ProfiniteThread::Zero => "fact:1,2,3".parse().expect("valid thread"),
        ref t => t.clone(),
    };
    [ProfiniteThread::Zero, other]
}

/// Membership decided by sampling a far point of the thread's residue class.
fn far_member(t: &ProfiniteThread, x: &EventuallyPeriodicSet) -> bool {
    if x.is_finite() {
        return false;
    }
    let p = x.period();
    let r = t.residue_mod_factorial(p.max(1) as u32 + 1).mod_floor(&BigInt::from(p));
    let r: u64 = r.try_into().expect("residue below the period");
    x.contains(r + p * (x.threshold() + 1))
}

pub fn oracle_laws(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let mut cases = Vec::new();
    for t in threads(settings) {
        let name = t.to_string();
        let tallies: Vec<[Tally; 4]> = (0..ORACLE_SETS)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(settings.seed, 30, i);
                let (x, y) = (periodic_set(&mut rng), periodic_set(&mut rng));
                let mut law = [Tally::default(), Tally::default(), Tally::default(), Tally::default()];
                let (inx, inc) = (oracle_member(&t, &x), oracle_member(&t, &x.complement()));
                law[0].check(inx != inc, || format!("X = {x}: X ∈ U is {inx}, X^c ∈ U is {inc}"));
                law[0].check(inx == far_member(&t, &x), || format!("X = {x}: disagrees with the far residue"));
                if inx && oracle_member(&t, &y) {
                    let z = x.intersect(&y);
                    law[1].check(oracle_member(&t, &z), || format!("{x} ∩ {y} = {z} is not a member"));
                }
                let missing: Vec<u64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..40)).collect();
                let co = EventuallyPeriodicSet::cofinite(missing.iter().copied());
                law[2].check(oracle_member(&t, &co), || format!("cofinite {co} is not a member"));
                let fin = EventuallyPeriodicSet::finite(missing);
                law[3].check(!oracle_member(&t, &fin), || format!("finite {fin} is a member"));
                law
            })
            .collect();
        let claims = [
            ("dichotomy", "exactly one of X, X^c is a member"),
            ("intersection", "members are closed under intersection"),
            ("cofinite", "every cofinite set is a member"),
            ("finite", "no finite set is a member"),
        ];
        for (idx, (key, claim)) in claims.iter().enumerate() {
            let t = tallies
                .iter()
                .map(|l| Tally {
                    checked: l[idx].checked,
                    failed: l[idx].failed,
                    failures: l[idx].failures.clone(),
                })
                .fold(Tally::default(), Tally::merge);
            cases.push(t.into_case(
                format!("{name}/{key}"),
                Provenance::Law,
                json!({ "thread": name, "sets": ORACLE_SETS }),
                claim,
            ));
        }
        let linear = (0..100u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(settings.seed, 31, i);
                let seq = |rng: &mut rand_chacha::ChaCha8Rng| {
                    let (th, p) = (rng.gen_range(0..5), rng.gen_range(1..7));
                    let vals: Vec<Dyadic> = (0..th + p).map(|_| Dyadic::new(rng.gen_range(0..9i64), 3)).collect();
                    StepSequence::from_fn(th, p, move |k| {
                        if k < th {
                            vals[k as usize].clone()
                        } else {
                            vals[(th + (k - th) % p) as usize].clone()
                        }
                    })
                };
                let (u, v) = (seq(&mut rng), seq(&mut rng));
                let (a, b) = (rng.gen_range(-3i64..4), rng.gen_range(-3i64..4));
                let w = u.combine(&v, |x, y| x.mul_int(a) + y.mul_int(b));
                let mut tally = Tally::default();
                let lhs = limit_along(&t, &w);
                let rhs = limit_along(&t, &u).mul_int(a) + limit_along(&t, &v).mul_int(b);
                tally.check(lhs == rhs, || format!("{lhs} ≠ {rhs}"));
                // the limit is the value on the level set chosen by the thread
                let chosen = u.levels().iter().find(|(_, s)| far_member(&t, s)).map(|(c, _)| c.clone());
                tally.check(chosen.as_ref() == Some(&limit_along(&t, &u)), || {
                    format!("limit {} is not the chosen level {chosen:?}", limit_along(&t, &u))
                });
                tally
            })
            .reduce(Tally::default, Tally::merge);
        cases.push(linear.into_case(
            format!("{name}/linearity"),
            Provenance::Law,
            json!({ "thread": name, "pairs": 100 }),
            "limits along the thread are linear in the step sequence",
        ));
    }
    (cases, vec![])
}

fn set(s: &str) -> EventuallyPeriodicSet {
    s.parse().expect("valid set")
}

fn schedule(s: &str) -> Schedule {
    s.parse().expect("valid schedule")
}

pub fn borel_cantelli(_settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let mut cases = Vec::new();
    let half = schedule("const(1/2)");
    let eps = Dyadic::pow2_neg(20);
    let n = match borel_cantelli_verdict(&half, &set("evens")) {
        Ok(BcVerdict::Divergent(c)) => c.n_for(&eps).ok(),
        _ => None,
    };
    cases.push(CaseRecord::new(
        "const-half/evens/certificate",
        Provenance::ClosedForm,
        json!({ "schedule": "const(1/2)", "set": "evens", "epsilon": j(&eps) }),
        json!({ "verdict": "divergent", "n": 40 }),
        json!({ "verdict": if n.is_some() { "divergent" } else { "other" }, "n": n }),
    ));
    let m = fresh_independent(&half).expect("narrow blocks");
    let formula = prefix_join_measure(&m, &set("evens"), 0, 40).ok();
    let direct = (1..=40u64)
        .filter(|k| k % 2 == 0)
        .fold(Clopen::zero(), |acc, k| acc.join(&m.eval(k)))
        .measure();
    cases.push(CaseRecord::new(
        "const-half/evens/prefix-join",
        Provenance::ClosedForm,
        json!({ "schedule": "const(1/2)", "set": "evens", "n": 0, "N": 40 }),
        json!({ "formula": j(eps.complement()), "direct": j(eps.complement()) }),
        json!({ "formula": j(&formula), "direct": j(&direct) }),
    ));

    for x in ["all", "evens", "mod5:2"] {
        let mut t = Tally::default();
        match borel_cantelli_verdict(&Schedule::Geometric(0), &set(x)) {
            Ok(BcVerdict::Convergent(c)) => {
                for n in 0..=20u64 {
                    let bound = c.tail_bound(n);
                    // Σ_{k∈X, n<k≤n+200} 2^-k, summed exactly
                    let partial: Dyadic = (n + 1..=n + 200)
                        .filter(|&k| set(x).contains(k))
                        .map(|k| Dyadic::pow2_neg(k as u32))
                        .sum();
                    t.check(partial <= bound, || format!("n = {n}: bound {bound} below the partial sum"));
                    t.check(bound <= Dyadic::pow2_neg(n as u32), || format!("n = {n}: bound {bound} above 2^-{n}"));
                }
            }
            v => t.check(false, || format!("verdict {v:?}")),
        }
        cases.push(t.into_case(
            format!("geometric/{x}/tail"),
            Provenance::ClosedForm,
            json!({ "schedule": "geom(0)", "set": x, "n": "0..=20" }),
            "convergent with Σ_{k>n} a_k ≤ tail(n) ≤ 2^-n",
        ));
    }

    for (sch, x) in [("power", "all"), ("power", "odds"), ("const(3/8)", "mod3:1")] {
        let s = schedule(sch);
        let mut t = Tally::default();
        match borel_cantelli_verdict(&s, &set(x)) {
            Ok(BcVerdict::Divergent(c)) => {
                for e in [1u32, 4, 8, 12] {
                    let eps = Dyadic::pow2_neg(e);
                    let Ok(n) = c.n_for(&eps) else {
                        t.check(false, || format!("no N for 2^-{e}"));
                        continue;
                    };
                    let product = |hi: u64| -> Dyadic {
                        (0..=hi)
                            .filter(|&k| set(x).contains(k))
                            .map(|k| s.value(k).complement())
                            .product()
                    };
                    t.check(product(n) < eps, || format!("2^-{e}: product at {n} is not below"));
                    t.check(n == 0 || product(n - 1) >= eps, || format!("2^-{e}: {n} is not the least"));
                }
            }
            v => t.check(false, || format!("verdict {v:?}")),
        }
        cases.push(t.into_case(
            format!("{sch}/{x}/divergent"),
            Provenance::ClosedForm,
            json!({ "schedule": sch, "set": x, "epsilons": ["2^-1", "2^-4", "2^-8", "2^-12"] }),
            "divergent with N(ε) the least N whose product is below ε",
        ));
    }

    for sch in ["const(1/2)", "const(3/8)", "power", "geom(1)"] {
        let m = fresh_independent(&schedule(sch)).expect("narrow blocks");
        let blocks: Vec<Clopen> = (0..=8).map(|k| m.eval(k)).collect();
        let mut t = Tally::default();
        for (k, b) in blocks.iter().enumerate() {
            t.check(b.measure() == schedule(sch).value(k as u64), || format!("λ(M({k})) = {}", b.measure()));
        }
        for mask in 1u32..1 << blocks.len() {
            let chosen = (0..blocks.len()).filter(|i| mask >> i & 1 == 1);
            let meet = chosen.clone().fold(Clopen::one(), |acc, i| acc.meet(&blocks[i]));
            let product: Dyadic = chosen.map(|i| blocks[i].measure()).product();
            t.check(meet.measure() == product, || format!("subset {mask:09b}"));
        }
        cases.push(t.into_case(
            format!("independence/{sch}"),
            Provenance::Enumeration,
            json!({ "schedule": sch, "indices": "0..=8" }),
            "every meet of blocks has the product measure",
        ));
    }

    let mut t = Tally::default();
    let m = fresh_independent(&schedule("power")).expect("narrow blocks");
    let (x, y) = (set("mod4:1"), set("odds"));
    let mut last = Dyadic::from_int(0);
    for n in 0..=24 {
        let v = prefix_join_measure(&m, &y, 0, n).expect("independent name");
        t.check(v >= last, || format!("not monotone in N at {n}"));
        let sub = prefix_join_measure(&m, &x, 0, n).expect("independent name");
        t.check(sub <= v, || format!("not monotone in X at {n}"));
        let product: Dyadic = (1..=n).filter(|&k| y.contains(k)).map(|k| m.eval(k).complement().measure()).product();
        t.check(v.complement() == product, || format!("complement at {n} is not the product"));
        last = v;
    }
    cases.push(t.into_case(
        "prefix-join/monotone",
        Provenance::Law,
        json!({ "schedule": "power", "sets": ["mod4:1", "odds"], "N": "0..=24" }),
        "prefix joins grow with N and X and complement the product of misses",
    ));

    let explicit = schedule("explicit(1/2,1/4)");
    let v = borel_cantelli_verdict(&explicit, &set("all"));
    cases.push(CaseRecord::new(
        "explicit-without-tail",
        Provenance::Structural,
        json!({ "schedule": "explicit(1/2,1/4)", "set": "all" }),
        json!({ "error": "unclassifiable" }),
        json!({ "error": if matches!(v, Err(Error::Unclassifiable(_))) { "unclassifiable" } else { "other" } }),
    ));
    (cases, vec![])
}

fn chain_ones(t: u32) -> Vec<Name> {
    (0..=t as usize).map(|n| make_ms(&Bits::ones(n))).collect()
}

pub fn ap1(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let (window, depth, thread) = (settings.window, settings.depth, &settings.thread);
    let mut cases = Vec::new();

    let chain = chain_ones(depth);
    let mut t = Tally::default();
    match ap1_diagonalize(&chain, thread, window) {
        Ok((m, report)) => {
            for (n, mn) in chain.iter().enumerate() {
                let v = leq_name(&m, mn, window);
                t.check(v.threshold() == Some(report.cuts[n]), || {
                    format!("n = {n}: {v:?}, expected Eventually({})", report.cuts[n])
                });
            }
            for row in &report.window_values {
                if let Some(seg) = row.segment {
                    let want = Dyadic::pow2_neg(seg as u32);
                    t.check(row.measure == want, || format!("k = {}: {} ≠ {want}", row.k, row.measure));
                    let r_t = Dyadic::pow2_neg(depth);
                    t.check(r_t <= row.measure, || format!("k = {}: below r_T", row.k));
                }
            }
            for w in report.cuts.windows(2) {
                t.check(w[0] < w[1], || format!("cuts {:?} not increasing", report.cuts));
            }
            for (n, l) in report.cuts.iter().enumerate() {
                t.check(*l >= n as u64, || format!("l_{n} = {l} < {n}"));
            }
        }
        Err(e) => t.check(false, || e.to_string()),
    }
    cases.push(t.into_case(
        "ones-chain",
        Provenance::ClosedForm,
        json!({ "names": "M_{1^n}", "T": depth, "thread": thread.to_string(), "window": window }),
        "M ≤* M_n from l_n on, and λ(M(k)) = 2^-n_k on each segment",
    ));

    let chain: Vec<Name> = (0..=depth as usize)
        .map(|n| format!("Msu:0,{}", Bits::ones(n + 1)).parse().expect("valid name"))
        .collect();
    let r = ap1_diagonalize(&chain, thread, window);
    let tol = Dyadic::pow2_neg(depth + 1);
    let last = r.as_ref().ok().and_then(|(_, rep)| rep.window_values.last().map(|v| v.measure.clone()));
    let within = last.as_ref().is_some_and(|v| (v - Dyadic::half()).abs() <= tol);
    cases.push(CaseRecord::judged(
        "half-chain",
        Provenance::ClosedForm,
        json!({ "names": "M_n(k) = cyl(k,0) ∨ cyl(k,1^{n+1})", "T": depth, "window": window }),
        json!({ "final_window_value_within": j(&tol), "of": j(Dyadic::half()) }),
        json!({ "final_window_value": j(&last), "cuts": r.as_ref().ok().map(|(_, rep)| rep.cuts.clone()) }),
        within,
    ));

    let m: Name = "Ms:01".parse().expect("valid name");
    let r = ap1_diagonalize(&[m.clone(), m.clone(), m.clone()], thread, window);
    let mut t = Tally::default();
    match &r {
        Ok((out, rep)) => {
            for k in rep.cuts[0]..=window {
                t.check(out.eval(k) == m.eval(k), || format!("differs at k = {k}"));
            }
        }
        Err(e) => t.check(false, || e.to_string()),
    }
    cases.push(t.into_case(
        "constant-list",
        Provenance::ClosedForm,
        json!({ "names": ["Ms:01", "Ms:01", "Ms:01"], "window": window }),
        "the diagonal equals M beyond l_0",
    ));

    let r = ap1_diagonalize(&[make_ms(&Bits::ones(2)), make_ms(&Bits::ones(1))], thread, window);
    cases.push(CaseRecord::new(
        "increasing-input",
        Provenance::Structural,
        json!({ "names": ["Ms:11", "Ms:1"] }),
        json!({ "error": "precondition" }),
        json!({ "error": if matches!(r, Err(Error::Precondition(_))) { "precondition" } else { "other" } }),
    ));
    let notes = vec![
        "U is the finite intersection of the oracle members U_n; it stands in for the P-point pseudo-intersection".into(),
        "ν(M) = lim ν(M_n) is checked only up to the horizon T".into(),
    ];
    (cases, notes)
}
