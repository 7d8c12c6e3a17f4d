use namebench_core::canjar::{canonical_partition, cn_check, is_full, residual_at, splice as splice_names, CnVerdict, FullnessVerdict};
use namebench_core::names::leq_name;
use namebench_core::solovay::make_ms;
use namebench_core::{Bits, Clopen, Dyadic, Error, EventuallyPeriodicSet, IntervalPartition, Name, TailRule};
use serde_json::json;

use super::j;
use crate::report::{CaseRecord, Provenance, Tally};
use crate::settings::Settings;

fn set(s: &str) -> EventuallyPeriodicSet {
    s.parse().expect("valid set")
}

fn clopen(s: &str) -> Clopen {
    s.parse().expect("valid clopen")
}

fn name(s: &str) -> Name {
    s.parse().expect("valid name")
}

fn verdict_kind(v: &Result<FullnessVerdict, Error>) -> &'static str {
    match v {
        Ok(FullnessVerdict::Full(_)) => "full",
        Ok(FullnessVerdict::NotFull { .. }) => "not-full",
        Ok(FullnessVerdict::Unknown { .. }) => "unknown",
        Err(_) => "error",
    }
}

pub fn fullness(_settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let mut cases = Vec::new();
    let all = EventuallyPeriodicSet::all();

    let m = name("indep:const(1/2)");
    let epsilons: Vec<Dyadic> = [5, 10, 20].iter().map(|&e| Dyadic::pow2_neg(e)).collect();
    let table = match is_full(&m, &Clopen::one(), &all) {
        Ok(FullnessVerdict::Full(cert)) => cert.table(&epsilons).ok(),
        _ => None,
    };
    let expected: Vec<_> = [5u64, 10, 20]
        .iter()
        .map(|&n| json!({ "n": n, "residual": j(Dyadic::pow2_neg(n as u32 + 1)) }))
        .collect();
    let actual: Vec<_> = table
        .iter()
        .flatten()
        .map(|row| {
            // the residual is also recomputed from scratch
            let direct = residual_at(&m, &Clopen::one(), &all, row.n);
            let agree = row.residual.as_ref() == Some(&direct) && row.bound == direct;
            json!({ "n": row.n, "residual": j(if agree { Some(&direct) } else { None }) })
        })
        .collect();
    cases.push(CaseRecord::new(
        "indep-half/all",
        Provenance::ClosedForm,
        json!({ "name": "indep:const(1/2)", "p": "1", "set": "all", "epsilons": j(&epsilons) }),
        json!(expected),
        json!(actual),
    ));

    for x in ["all", "odds", "ep:5::3:2", "mod7:4"] {
        let xs = set(x);
        let n = match is_full(&Name::one(), &clopen("x2 & x9"), &xs) {
            Ok(FullnessVerdict::Full(c)) => c.n_for(&Dyadic::pow2_neg(20)).ok(),
            _ => None,
        };
        cases.push(CaseRecord::new(
            format!("vec-one/{x}"),
            Provenance::ClosedForm,
            json!({ "name": "one", "p": "x2 & x9", "set": x, "epsilon": "2^-20" }),
            json!({ "n": xs.least() }),
            json!({ "n": n }),
        ));
    }

    let zero_tail = Name::atom(vec![clopen("x0"), clopen("x1")], TailRule::Zero);
    for (p, x) in [("!x0", "all"), ("x5 & x6 & !x0", "ep:2::1:0"), ("!x0 & !x1", "evens")] {
        let v = is_full(&zero_tail, &clopen(p), &set(x));
        let got = match &v {
            Ok(FullnessVerdict::NotFull { residual, .. }) => Some(residual.clone()),
            _ => None,
        };
        // only the prefix entries indexed by X contribute
        let join = [clopen("x0"), clopen("x1")]
            .iter()
            .enumerate()
            .filter(|(k, _)| set(x).contains(*k as u64))
            .fold(Clopen::zero(), |acc, (_, c)| acc.join(c));
        let expected_residual = clopen(p).diff(&join).measure();
        cases.push(CaseRecord::new(
            format!("zero-tail/{p}/{x}"),
            Provenance::ClosedForm,
            json!({ "name": zero_tail.to_string(), "p": p, "set": x }),
            json!({ "verdict": "not-full", "residual": j(&expected_residual) }),
            json!({ "verdict": verdict_kind(&v), "residual": j(&got) }),
        ));
    }

    for (nm, p, x) in [
        ("Ms:101", "x0 & !x3", "all"),
        ("Ms:101", "x0 & !x3", "mod4:1"),
        ("Msu:00,11", "x1 | x2", "ep:9:2:5:0,3"),
        ("indep:power", "x1 | x70", "odds"),
        ("indep:const(3/8)", "x3", "mod3:2"),
    ] {
        let (m, pc, xs) = (name(nm), clopen(p), set(x));
        let mut t = Tally::default();
        match is_full(&m, &pc, &xs) {
            Ok(FullnessVerdict::Full(cert)) => {
                let mut last = u64::MAX;
                for e in [1u32, 3, 6, 9] {
                    let eps = Dyadic::pow2_neg(e);
                    let Ok(n) = cert.n_for(&eps) else {
                        t.check(false, || format!("no N for 2^-{e}"));
                        continue;
                    };
                    let r = residual_at(&m, &pc, &xs, n);
                    t.check(r < eps, || format!("2^-{e}: residual {r} at N = {n}"));
                    t.check(r <= cert.bound_at(n), || format!("2^-{e}: bound below the residual"));
                    t.check(last == u64::MAX || n >= last, || format!("2^-{e}: N = {n} smaller than for a larger ε"));
                    last = n;
                }
            }
            v => t.check(false, || format!("verdict {v:?}")),
        }
        cases.push(t.into_case(
            format!("certified/{nm}/{x}"),
            Provenance::Structural,
            json!({ "name": nm, "p": p, "set": x, "epsilons": ["2^-1", "2^-3", "2^-6", "2^-9"] }),
            "Full, and the residual at N(ε) is below ε and below the certified bound",
        ));
    }

    let v = is_full(&Name::one(), &Clopen::zero(), &all);
    cases.push(CaseRecord::new(
        "zero-condition",
        Provenance::Structural,
        json!({ "name": "one", "p": "0", "set": "all" }),
        json!({ "error": "zero-condition" }),
        json!({ "error": if matches!(v, Err(Error::ZeroCondition)) { "zero-condition" } else { "other" } }),
    ));

    let cn = |e: &Name, p: &Clopen, n: u64, x: &str, big_n: u64| match cn_check(e, p, n, &set(x), big_n) {
        Ok(CnVerdict::InCnUpTo { up_to, .. }) => json!({ "verdict": "in-cn-up-to", "n": up_to }),
        Ok(CnVerdict::NotInCn { witness, .. }) => json!({ "verdict": "not-in-cn", "witness": witness }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let q = clopen("x1 & x2");
    for big_n in [0u64, 10, 50] {
        cases.push(CaseRecord::new(
            format!("cn/omega/N={big_n:02}"),
            Provenance::ClosedForm,
            json!({ "e": "Ms:1", "p": "1", "n": 3, "set": "all", "N": big_n }),
            json!({ "verdict": "in-cn-up-to", "n": big_n }),
            cn(&name("Ms:1"), &Clopen::one(), 3, "all", big_n),
        ));
    }
    cases.push(CaseRecord::new(
        "cn/vec-missing-one",
        Provenance::ClosedForm,
        json!({ "e": "vec:x1 & x2", "p": "x1 & x2", "n": 4, "set": "cofinite:4", "N": 10 }),
        json!({ "verdict": "not-in-cn", "witness": 4 }),
        cn(&Name::vec(q.clone()), &q, 4, "cofinite:4", 10),
    ));
    cases.push(CaseRecord::new(
        "cn/geometric-evens",
        Provenance::ClosedForm,
        json!({ "e": "indep:geom(2)", "p": "1", "n": 1, "set": "evens", "N": 40 }),
        json!({ "verdict": "in-cn-up-to", "n": 40 }),
        cn(&name("indep:geom(2)"), &Clopen::one(), 1, "evens", 40),
    ));
    cases.push(CaseRecord::new(
        "cn/geometric-evens-n0",
        Provenance::ClosedForm,
        json!({ "e": "indep:geom(2)", "p": "1", "n": 0, "set": "evens", "N": 40 }),
        json!({ "verdict": "not-in-cn", "witness": 1 }),
        cn(&name("indep:geom(2)"), &Clopen::one(), 0, "evens", 40),
    ));
    let notes = vec![
        "InCnUpTo is sound only up to N; NotInCn is final since the join only grows".into(),
        "only the supplied witnesses X are checked, not every member of the ultrafilter".into(),
    ];
    (cases, notes)
}

pub fn splice(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let window = settings.window;
    let mut cases = Vec::new();

    let (a, b) = (name("Ms:0"), name("Ms:1"));
    let e = splice_names(&"0,3,7".parse().expect("valid cuts"), &[a.clone(), b.clone()]);
    let got = e.as_ref().ok().map(|e| json!({ "at_2": e.eval(2).to_string(), "at_5": e.eval(5).to_string() }));
    cases.push(CaseRecord::new(
        "two-names",
        Provenance::ClosedForm,
        json!({ "cuts": "0,3,7", "names": ["Ms:0", "Ms:1"] }),
        json!({ "at_2": a.eval(2).to_string(), "at_5": b.eval(5).to_string() }),
        json!(got),
    ));

    let chain: Vec<Name> = (0..4).map(|n| make_ms(&Bits::ones(n))).collect();
    let cuts: IntervalPartition = "0,3,7,15".parse().expect("valid cuts");
    let mut t = Tally::default();
    match splice_names(&cuts, &chain) {
        Ok(e) => {
            for k in 0..=window {
                let n = cuts.interval_index(k);
                t.check(e.eval(k) == chain[n].eval(k), || format!("k = {k} in I_{n}"));
                t.check(e.eval(k).measure() == Dyadic::pow2_neg(n as u32), || format!("measure at k = {k}"));
            }
            for (n, en) in chain.iter().enumerate() {
                let v = leq_name(&e, en, window);
                t.check(v.threshold() == Some(cuts.cuts()[n]), || {
                    format!("n = {n}: {v:?}, expected Eventually({})", cuts.cuts()[n])
                });
            }
        }
        Err(err) => t.check(false, || err.to_string()),
    }
    cases.push(t.into_case(
        "ones-chain/0,3,7,15",
        Provenance::ClosedForm,
        json!({ "cuts": "0,3,7,15", "names": "M_{1^n}, n ≤ 3", "window": window }),
        "E(k) = E_n(k) with measure 2^-n on I_n, and E ≤* E_n from cuts(n) on",
    ));

    let m = name("Msu:01,10");
    let same = splice_names(&"0,2,9".parse().expect("valid cuts"), &[m.clone(), m.clone(), m.clone()]);
    let equal = same.as_ref().is_ok_and(|e| (0..=window).all(|k| e.eval(k) == m.eval(k)));
    cases.push(CaseRecord::new(
        "equal-names",
        Provenance::ClosedForm,
        json!({ "cuts": "0,2,9", "names": ["Msu:01,10", "Msu:01,10", "Msu:01,10"], "window": window }),
        json!({ "pointwise_equal": true }),
        json!({ "pointwise_equal": equal }),
    ));

    for (p, x) in [("x0 | x1", "all"), ("x0", "odds"), ("!x2", "mod3:1")] {
        let depth = settings.depth.min(5) as usize;
        let chain: Vec<Name> = (0..=depth).map(|n| make_ms(&Bits::ones(n))).collect();
        let (pc, xs) = (clopen(p), set(x));
        let mut t = Tally::default();
        match canonical_partition(&chain, &pc, &xs) {
            Ok(part) => {
                t.check(part.len() == chain.len(), || format!("partition {part} has the wrong length"));
                match splice_names(&part, &chain) {
                    Ok(e) => {
                        let v = is_full(&e, &pc, &xs);
                        t.check(matches!(v, Ok(FullnessVerdict::Full(_))), || format!("splice verdict {v:?}"));
                    }
                    Err(err) => t.check(false, || err.to_string()),
                }
            }
            Err(err) => t.check(false, || err.to_string()),
        }
        cases.push(t.into_case(
            format!("canonical/{p}/{x}"),
            Provenance::Structural,
            json!({ "names": "M_{1^n}", "T": depth, "p": p, "set": x }),
            "the splice along cuts(n+1) = max(cuts(n)+1, N_n(1/(n+1))) is Full",
        ));
    }

    let bad = splice_names(&"0,3,7".parse().expect("valid cuts"), &[a]);
    cases.push(CaseRecord::new(
        "length-mismatch",
        Provenance::Structural,
        json!({ "cuts": "0,3,7", "names": ["Ms:0"] }),
        json!({ "error": "length-mismatch" }),
        json!({ "error": if matches!(bad, Err(Error::LengthMismatch { .. })) { "length-mismatch" } else { "other" } }),
    ));
    let notes = vec!["the last name continues past the last cut".into()];
    (cases, notes)
}
