use namebench_core::names::{leq_name, LeqVerdict};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::j;
use crate::gen::{analyzable_name, clopen, rng_for};
use crate::report::{CaseRecord, Provenance, Tally};
use crate::settings::Settings;

const PAIRS: u64 = 100;

pub fn homodot(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let window = settings.window;
    let mut cases: Vec<CaseRecord> = (0..PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 10, i);
            let (m, n) = (analyzable_name(&mut rng), analyzable_name(&mut rng));
            let mut t = Tally::default();
            let (meet, join, comp) = (m.meet(&n), m.join(&n), m.complement());
            for k in 0..=window {
                let (a, b) = (m.eval(k), n.eval(k));
                t.check(meet.eval(k) == a.meet(&b), || format!("meet at k = {k}"));
                t.check(join.eval(k) == a.join(&b), || format!("join at k = {k}"));
                t.check(comp.eval(k) == a.complement(), || format!("complement at k = {k}"));
            }
            t.into_case(
                format!("pointwise-{i:03}"),
                Provenance::Law,
                json!({ "m": m.to_string(), "n": n.to_string(), "window": window }),
                "pointwise operations commute with evaluation",
            )
        })
        .collect();

    // M ≤ N certified: M ∧ ¬N vanishes on the window
    let ordered: Vec<CaseRecord> = (0..PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 11, i);
            let n = analyzable_name(&mut rng);
            let m = n.meet(&analyzable_name(&mut rng));
            let verdict = leq_name(&m, &n, window);
            let gap = m.meet(&n.complement());
            let zero = (0..=window).all(|k| gap.eval(k).is_zero());
            let certified = matches!(verdict, LeqVerdict::Always(_));
            CaseRecord::judged(
                format!("order-{i:03}"),
                Provenance::Structural,
                json!({ "m": m.to_string(), "n": n.to_string(), "window": window }),
                json!({ "verdict": "always", "gap_zero_on_window": true }),
                json!({ "verdict": j(&verdict), "gap_zero_on_window": zero }),
                certified && zero,
            )
        })
        .collect();
    cases.extend(ordered);
    (cases, vec![])
}

pub fn restr_incl(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let window = settings.window;
    let cases = (0..PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 12, i);
            let m = analyzable_name(&mut rng);
            let vars = rng.gen_range(1..=3);
            let q = clopen(&mut rng, 6, vars);
            // N ≥ M ∧ q by construction
            let n = m.and_const(&q).join(&analyzable_name(&mut rng));
            let mut t = Tally::default();
            for k in 0..=window {
                t.check(m.eval(k).meet(&q).leq(&n.eval(k)), || format!("hypothesis fails at k = {k}"));
            }
            let hypothesis = leq_name(&m.and_const(&q), &n, window);
            t.check(matches!(hypothesis, LeqVerdict::Always(_)), || {
                format!("hypothesis not certified on the tail: {hypothesis:?}")
            });
            let (mq, nq) = (m.and_const(&q), n.and_const(&q));
            for k in 0..=window {
                t.check(mq.eval(k).leq(&nq.eval(k)), || format!("M' ≤ N' fails at k = {k}"));
            }
            let conclusion = leq_name(&mq, &nq, window);
            t.check(matches!(conclusion, LeqVerdict::Always(_)), || {
                format!("conclusion not certified on the tail: {conclusion:?}")
            });
            t.into_case(
                format!("restrict-{i:03}"),
                Provenance::Structural,
                json!({ "m": m.to_string(), "n": n.to_string(), "q": q.to_string(), "window": window }),
                "M ∧ q ≤ N implies (M ∧ q) ≤ (N ∧ q), on the window and on the tail",
            )
        })
        .collect();
    (cases, vec![])
}

