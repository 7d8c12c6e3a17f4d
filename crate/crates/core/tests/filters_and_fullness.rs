use namebench_core::canjar::{canonical_partition, is_full, residual_at, splice, FullnessVerdict};
use namebench_core::filters::{
    ap1_diagonalize, borel_cantelli_verdict, fresh_independent, limit_along, oracle_member, prefix_join_measure,
    BcVerdict, ProfiniteThread, StepSequence,
};
use namebench_core::names::leq_name;
use namebench_core::solovay::make_ms;
use namebench_core::{Bits, Clopen, Dyadic, EventuallyPeriodicSet, IntervalPartition, Name, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(s: &str) -> EventuallyPeriodicSet {
    s.parse().unwrap()
}

fn random_set(rng: &mut ChaCha8Rng) -> EventuallyPeriodicSet {
    let period = rng.gen_range(1..9);
    let threshold = rng.gen_range(0..6);
    let exc: Vec<bool> = (0..threshold).map(|_| rng.gen()).collect();
    let res: Vec<bool> = (0..period).map(|_| rng.gen()).collect();
    EventuallyPeriodicSet::from_fn(threshold, period, |k| {
        if k < threshold {
            exc[k as usize]
        } else {
            res[(k % period) as usize]
        }
    })
}

#[test]
fn ultrafilter_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in [ProfiniteThread::Zero, "int:7".parse().unwrap()] {
        for _ in 0..200 {
            let (x, y) = (random_set(&mut rng), random_set(&mut rng));
            assert_ne!(oracle_member(&t, &x), oracle_member(&t, &x.complement()));
            if oracle_member(&t, &x) && oracle_member(&t, &y) {
                assert!(oracle_member(&t, &x.intersect(&y)));
            }
        }
        assert!(oracle_member(&t, &set("cofinite:0,3,9")));
        assert!(!oracle_member(&t, &set("finite:0,3,9")));
    }
}

#[test]
fn limits_along_the_thread_are_linear() {
    let t: ProfiniteThread = "int:5".parse().unwrap();
    let u = StepSequence::from_fn(2, 4, |k| Dyadic::new((k % 4) as i64, 2));
    let v = StepSequence::from_fn(0, 3, |k| Dyadic::new((k % 3) as i64, 3));
    let w = u.combine(&v, |a, b| a.mul_int(3) + b);
    assert_eq!(limit_along(&t, &w), limit_along(&t, &u).mul_int(3) + limit_along(&t, &v));
    assert_eq!(limit_along(&t, &u), Dyadic::new(1, 2));
}

#[test]
fn half_blocks_on_evens() {
    let sch: Schedule = "const(1/2)".parse().unwrap();
    let BcVerdict::Divergent(cert) = borel_cantelli_verdict(&sch, &set("evens")).unwrap() else {
        panic!()
    };
    assert_eq!(cert.n_for(&Dyadic::pow2_neg(20)).unwrap(), 40);
    let m = fresh_independent(&sch).unwrap();
    assert_eq!(
        prefix_join_measure(&m, &set("evens"), 0, 40).unwrap(),
        Dyadic::pow2_neg(20).complement()
    );
    // the join measured directly
    let join = (1..=40)
        .filter(|k| k % 2 == 0)
        .fold(Clopen::zero(), |acc, k| acc.join(&m.eval(k)));
    assert_eq!(join.measure(), Dyadic::pow2_neg(20).complement());
}

#[test]
fn geometric_tails_against_exact_sums() {
    let sch = Schedule::Geometric(0);
    let BcVerdict::Convergent(cert) = borel_cantelli_verdict(&sch, &EventuallyPeriodicSet::all()).unwrap() else {
        panic!()
    };
    for n in 0..=20u64 {
        let bound = cert.tail_bound(n);
        let partial: Dyadic = (n + 1..n + 60).map(|k| Dyadic::pow2_neg(k as u32)).sum();
        assert!(partial <= bound);
        assert!(bound <= Dyadic::pow2_neg(n as u32));
    }
}

#[test]
fn fresh_blocks_are_jointly_independent() {
    for sch in ["const(3/8)", "power", "geom(1)"] {
        let m = fresh_independent(&sch.parse().unwrap()).unwrap();
        let blocks: Vec<Clopen> = (0..=8).map(|k| m.eval(k)).collect();
        for mask in 1u32..1 << blocks.len() {
            let chosen = (0..blocks.len()).filter(|i| mask >> i & 1 == 1);
            let meet = chosen.clone().fold(Clopen::one(), |acc, i| acc.meet(&blocks[i]));
            let product: Dyadic = chosen.map(|i| blocks[i].measure()).product();
            assert_eq!(meet.measure(), product, "{sch} {mask:b}");
        }
    }
}

#[test]
fn ap1_on_the_ones_chain() {
    let chain: Vec<Name> = (0..=8).map(|n| make_ms(&Bits::ones(n))).collect();
    let (m, report) = ap1_diagonalize(&chain, &ProfiniteThread::Zero, 64).unwrap();
    for (n, mn) in chain.iter().enumerate() {
        assert_eq!(leq_name(&m, mn, 64).threshold(), Some(report.cuts[n]));
    }
    for row in &report.window_values {
        if let Some(seg) = row.segment {
            assert_eq!(row.measure, Dyadic::pow2_neg(seg as u32));
        }
    }
}

#[test]
fn ap1_toward_one_half() {
    let chain: Vec<Name> = (0..=8)
        .map(|n| format!("Msu:0,{}", Bits::ones(n + 1)).parse().unwrap())
        .collect();
    let (_, report) = ap1_diagonalize(&chain, &ProfiniteThread::Zero, 64).unwrap();
    let last = &report.window_values.last().unwrap().measure;
    assert!((last - Dyadic::half()).abs() <= Dyadic::pow2_neg(9));
}

#[test]
fn fullness_residuals_follow_the_certificate() {
    let m = fresh_independent(&"const(1/2)".parse().unwrap()).unwrap();
    let FullnessVerdict::Full(cert) = is_full(&m, &Clopen::one(), &EventuallyPeriodicSet::all()).unwrap() else {
        panic!()
    };
    for e in [5, 10, 20] {
        let n = cert.n_for(&Dyadic::pow2_neg(e)).unwrap();
        assert_eq!(n, e as u64);
        let r = residual_at(&m, &Clopen::one(), &EventuallyPeriodicSet::all(), n);
        assert_eq!(r, Dyadic::pow2_neg(n as u32 + 1));
    }
}

#[test]
fn splice_of_a_decreasing_chain() {
    let chain: Vec<Name> = (0..4).map(|n| make_ms(&Bits::ones(n))).collect();
    let cuts: IntervalPartition = "0,3,7,15".parse().unwrap();
    let e = splice(&cuts, &chain).unwrap();
    for k in 0..=64 {
        assert_eq!(e.eval(k), chain[cuts.interval_index(k)].eval(k));
    }
    for (n, en) in chain.iter().enumerate() {
        assert_eq!(leq_name(&e, en, 64).threshold(), Some(cuts.cuts()[n]));
    }
    let p: Clopen = "x0".parse().unwrap();
    let canonical = canonical_partition(&chain, &p, &set("odds")).unwrap();
    let e = splice(&canonical, &chain).unwrap();
    assert!(matches!(is_full(&e, &p, &set("odds")).unwrap(), FullnessVerdict::Full(_)));
}
