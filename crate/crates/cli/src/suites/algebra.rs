use namebench_core::{enumerate_clopens, Clopen, Coord, Dyadic};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::gen::{clopen, rng_for};
use crate::report::{CaseRecord, Provenance, Tally};
use crate::settings::Settings;

const RANDOM_CASES: u64 = 1000;
const DYADIC_PAIRS: u64 = 10_000;
const THIRD_SAMPLE: usize = 16;

fn truth(c: &Clopen, vars: &[Coord], x: usize) -> bool {
    c.contains(|v| vars.iter().position(|&w| w == v).is_some_and(|i| x >> i & 1 == 1))
}

fn pair_laws(t: &mut Tally, a: &Clopen, b: &Clopen) {
    let at = || format!("{a} / {b}");
    t.check(a.meet(b) == b.meet(a) && a.join(b) == b.join(a), || format!("commutativity at {}", at()));
    t.check(a.meet(b).complement() == a.complement().join(&b.complement()), || {
        format!("De Morgan (meet) at {}", at())
    });
    t.check(a.join(b).complement() == a.complement().meet(&b.complement()), || {
        format!("De Morgan (join) at {}", at())
    });
    t.check(a.join(&a.meet(b)) == *a && a.meet(&a.join(b)) == *a, || format!("absorption at {}", at()));
    t.check(a.complement().complement() == *a, || format!("double complement at {a}"));
    t.check(
        a.join(b).measure() + a.meet(b).measure() == a.measure() + b.measure(),
        || format!("modularity at {}", at()),
    );
    t.check(a.complement().measure() == a.measure().complement(), || format!("complement measure at {a}"));
    t.check(a.leq(b) == (a.meet(b) == *a), || format!("order at {}", at()));
    if a.leq(b) {
        t.check(a.measure() <= b.measure(), || format!("monotonicity at {}", at()));
    }
    if a.disjoint(b) {
        t.check(a.join(b).measure() == a.measure() + b.measure(), || format!("additivity at {}", at()));
    }
}

fn triple_laws(t: &mut Tally, a: &Clopen, b: &Clopen, c: &Clopen) {
    let at = || format!("{a} / {b} / {c}");
    t.check(a.meet(&b.join(c)) == a.meet(b).join(&a.meet(c)), || format!("distributivity (meet) at {}", at()));
    t.check(a.join(&b.meet(c)) == a.join(b).meet(&a.join(c)), || format!("distributivity (join) at {}", at()));
    t.check(a.meet(b).meet(c) == a.meet(&b.meet(c)) && a.join(b).join(c) == a.join(&b.join(c)), || {
        format!("associativity at {}", at())
    });
}

/// Equal records iff equal truth tables on the joint support.
fn canonicity(t: &mut Tally, a: &Clopen, b: &Clopen) {
    let mut vars = a.support();
    vars.extend(b.support());
    vars.sort_unstable();
    vars.dedup();
    let same = (0..1usize << vars.len()).all(|x| truth(a, &vars, x) == truth(b, &vars, x));
    t.check((a == b) == same, || format!("canonical equality at {a} / {b}"));
}

/// Reduced fraction over `i128`, the reference for dyadic arithmetic.
#[derive(Debug, PartialEq, Eq, Clone, Copy)]
struct Frac(i128, i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl Frac {
    fn new(n: i128, d: i128) -> Frac {
        let g = gcd(n, d).max(1);
        Frac(n / g, d / g)
    }
}

fn as_frac(d: &Dyadic) -> Option<Frac> {
    let n: i128 = d.numerator().try_into().ok()?;
    Some(Frac::new(n, 1i128.checked_shl(d.exponent())?))
}

pub fn algebra_laws(settings: &Settings) -> (Vec<CaseRecord>, Vec<String>) {
    let small: Vec<Clopen> = enumerate_clopens(&[0, 1, 2], 8).expect("three coordinates").collect();
    let mut cases = Vec::new();

    let pairs = small
        .par_iter()
        .map(|a| {
            let mut t = Tally::default();
            for b in &small {
                pair_laws(&mut t, a, b);
                canonicity(&mut t, a, b);
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    cases.push(pairs.into_case(
        "exhaustive-pairs",
        Provenance::Enumeration,
        json!({ "support": [0, 1, 2], "clopens": small.len() }),
        "binary laws and canonical equality for all pairs",
    ));

    let mut rng = rng_for(settings.seed, 1, 0);
    let thirds: Vec<&Clopen> = sample(&mut rng, small.len(), THIRD_SAMPLE)
        .into_iter()
        .map(|i| &small[i])
        .collect();
    // b ∨ c and b ∧ c for every b and sampled c
    let with_thirds: Vec<Vec<(Clopen, Clopen)>> = small
        .par_iter()
        .map(|b| thirds.iter().map(|c| (b.join(c), b.meet(c))).collect())
        .collect();
    let triples = small
        .par_iter()
        .map(|a| {
            let mut t = Tally::default();
            let a_thirds: Vec<(Clopen, Clopen)> = thirds.iter().map(|c| (a.join(c), a.meet(c))).collect();
            for (b, bc) in small.iter().zip(&with_thirds) {
                let (ajb, amb) = (a.join(b), a.meet(b));
                for ((c, (bjc, bmc)), (ajc, amc)) in thirds.iter().zip(bc).zip(&a_thirds) {
                    let at = || format!("{a} / {b} / {c}");
                    t.check(a.meet(bjc) == amb.join(amc), || format!("distributivity (meet) at {}", at()));
                    t.check(a.join(bmc) == ajb.meet(ajc), || format!("distributivity (join) at {}", at()));
                    t.check(amb.meet(c) == a.meet(bmc) && ajb.join(c) == a.join(bjc), || {
                        format!("associativity at {}", at())
                    });
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    cases.push(triples.into_case(
        "exhaustive-triples",
        Provenance::Enumeration,
        json!({ "support": [0, 1, 2], "third_operands": thirds.iter().map(|c| c.to_string()).collect::<Vec<_>>() }),
        "ternary laws for all pairs against a seeded sample of third operands",
    ));

    let random = (0..RANDOM_CASES)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 2, i);
            let mut gen = || {
                let vars = rng.gen_range(1..=8);
                clopen(&mut rng, 24, vars)
            };
            let (a, b, c) = (gen(), gen(), gen());
            let mut t = Tally::default();
            pair_laws(&mut t, &a, &b);
            triple_laws(&mut t, &a, &b, &c);
            canonicity(&mut t, &a, &b);
            canonicity(&mut t, &a.join(&b).meet(&c), &a.meet(&c).join(&b.meet(&c)));
            let vars = a.support();
            let models = (0..1usize << vars.len()).filter(|&x| truth(&a, &vars, x)).count();
            t.check(a.measure() == Dyadic::new(models as i64, vars.len() as u32), || {
                format!("measure by model count at {a}")
            });
            t
        })
        .reduce(Tally::default, Tally::merge);
    cases.push(random.into_case(
        "random-larger",
        Provenance::Law,
        json!({ "cases": RANDOM_CASES, "coordinates": 24, "max_support": 8 }),
        "laws, canonicity and model-count measure on random clopens",
    ));

    let dyadic = (0..DYADIC_PAIRS)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(settings.seed, 3, i);
            let mut draw = || (rng.gen_range(-(1i64 << 20)..1i64 << 20), rng.gen_range(0u32..40));
            let ((an, ae), (bn, be)) = (draw(), draw());
            let (a, b) = (Dyadic::new(an, ae), Dyadic::new(bn, be));
            let (fa, fb) = (Frac::new(an as i128, 1 << ae), Frac::new(bn as i128, 1 << be));
            let mut t = Tally::default();
            let at = || format!("{a} and {b}");
            t.check(
                as_frac(&(&a + &b)) == Some(Frac::new(fa.0 * fb.1 + fb.0 * fa.1, fa.1 * fb.1)),
                || format!("sum of {}", at()),
            );
            t.check(
                as_frac(&(&a - &b)) == Some(Frac::new(fa.0 * fb.1 - fb.0 * fa.1, fa.1 * fb.1)),
                || format!("difference of {}", at()),
            );
            t.check(as_frac(&(&a * &b)) == Some(Frac::new(fa.0 * fb.0, fa.1 * fb.1)), || {
                format!("product of {}", at())
            });
            t.check(a.cmp(&b) == (fa.0 * fb.1).cmp(&(fb.0 * fa.1)), || format!("order of {}", at()));
            t
        })
        .reduce(Tally::default, Tally::merge);
    cases.push(dyadic.into_case(
        "dyadic-oracle",
        Provenance::ClosedForm,
        json!({ "pairs": DYADIC_PAIRS, "numerators": "|n| < 2^20", "exponents": "< 40" }),
        "sum, difference, product and order agree with reduced integer fractions",
    ));

    let notes = vec![
        "ternary laws over the 256 clopens on {0,1,2} use all pairs (a, b) and a seeded sample of 16 third operands".into(),
    ];
    (cases, notes)
}
