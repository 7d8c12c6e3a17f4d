use namebench_core::names::{leq_name, LeqVerdict};
use namebench_core::solovay::{density, make_malpha, make_ms, partition_family, tail_limit, MeasureValue};
use namebench_core::{enumerate_clopens, Bits, Clopen, Dyadic, EventuallyPeriodicSet, Name};
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(s: &str) -> Clopen {
    s.parse().unwrap()
}

fn random_clopen(rng: &mut ChaCha8Rng, coords: u64) -> Clopen {
    let vars: Vec<u64> = (0..3).map(|_| rng.gen_range(0..coords)).collect();
    let mut vars = vars;
    vars.sort();
    vars.dedup();
    let table: Vec<bool> = (0..1 << vars.len()).map(|_| rng.gen()).collect();
    Clopen::from_truth_table(&vars, |i| table[i])
}

fn random_name(rng: &mut ChaCha8Rng) -> Name {
    match rng.gen_range(0..5) {
        0 => Name::vec(random_clopen(rng, 6)),
        1 => {
            let len = rng.gen_range(1..4);
            make_ms(&Bits::new((0..len).map(|_| rng.gen()).collect()))
        }
        2 => Name::indicator(EventuallyPeriodicSet::residue_class(3, rng.gen_range(0..3))),
        3 => Name::atom(vec![random_clopen(rng, 4), random_clopen(rng, 4)], namebench_core::TailRule::One),
        _ => make_ms(&Bits::new(vec![rng.gen()])).and_const(&random_clopen(rng, 5)),
    }
}

#[test]
fn pointwise_operations_commute_with_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let (m, n) = (random_name(&mut rng), random_name(&mut rng));
        for k in 0..=64 {
            let (a, b) = (m.eval(k), n.eval(k));
            assert_eq!(m.meet(&n).eval(k), a.meet(&b));
            assert_eq!(m.join(&n).eval(k), a.join(&b));
            assert_eq!(m.complement().eval(k), a.complement());
        }
    }
}

#[test]
fn restriction_preserves_inclusion() {
    // M ∧ q ≤ N for every k, so M ∧ q ≤ N ∧ q
    let q = c("x0 & !x2");
    let n = make_ms(&"1".parse().unwrap()).join(&Name::vec(q.clone()));
    let m = make_ms(&"11".parse().unwrap());
    for k in 0..=64 {
        assert!(m.eval(k).meet(&q).leq(&n.eval(k)));
    }
    let (mq, nq) = (m.and_const(&q), n.and_const(&q));
    assert!(matches!(leq_name(&mq, &nq, 64), LeqVerdict::Always(_)));
    for k in 0..=64 {
        assert!(mq.eval(k).leq(&nq.eval(k)));
    }
}

#[test]
fn certified_order_leaves_nothing_outside() {
    let m = make_ms(&"101".parse().unwrap());
    let n = make_ms(&"10".parse().unwrap());
    assert!(matches!(leq_name(&m, &n, 64), LeqVerdict::Always(_)));
    let gap = m.meet(&n.complement());
    assert!((0..=64).all(|k| gap.eval(k).is_zero()));
}

#[test]
fn ms_measure_on_small_supports() {
    for len in 0..=3 {
        for s in Bits::all_of_length(len) {
            let m = make_ms(&s);
            for b in enumerate_clopens(&[0, 1, 2, 3], 8).unwrap().step_by(97) {
                let want = b.measure().shr(len as u32);
                match tail_limit(&m, &b) {
                    MeasureValue::Exact { value, stabilization_index } => {
                        assert_eq!(value, want, "{s} {b}");
                        assert!(stabilization_index <= b.max_coord().map_or(0, |v| v + 1));
                        // the value is attained from the stabilization index on
                        let k = stabilization_index.max(1);
                        assert_eq!(m.eval(k).meet(&b).measure(), want);
                    }
                    v => panic!("{s} {b}: {v:?}"),
                }
            }
        }
    }
}

#[test]
fn siblings_split_their_parent() {
    for s in ["", "0", "10", "011"] {
        let s: Bits = s.parse().unwrap();
        let (m0, m1, m) = (make_ms(&s.pushed(false)), make_ms(&s.pushed(true)), make_ms(&s));
        for k in 0..=40 {
            assert_eq!(m0.eval(k).join(&m1.eval(k)), m.eval(k));
            assert!(m0.eval(k).disjoint(&m1.eval(k)));
        }
    }
}

#[test]
fn partitions_of_unity() {
    for n in 0..=3 {
        let fam = partition_family(n, 8).unwrap();
        assert_eq!(fam.len(), 1 << n);
        for k in 0..=64 {
            let join = fam.iter().fold(Clopen::zero(), |acc, m| {
                let e = m.eval(k);
                assert!(acc.disjoint(&e));
                acc.join(&e)
            });
            assert!(join.is_one());
        }
        for m in &fam {
            let d = density(m).unwrap();
            assert_eq!(d.unconditional().unwrap().as_constant(), Some(&Dyadic::pow2_neg(n as u32)));
        }
    }
}

#[test]
fn antichain_densities_approximate_alpha() {
    let five_eighths = make_malpha(&BigRational::new(5.into(), 8.into()), 8).unwrap();
    let d = density(&five_eighths).unwrap();
    assert_eq!(d.unconditional().unwrap().as_constant(), Some(&"5/8".parse().unwrap()));
    let two_thirds = BigRational::new(2.into(), 3.into());
    for depth in [6, 10, 14] {
        let d = density(&make_malpha(&two_thirds, depth).unwrap()).unwrap();
        let v = d.unconditional().unwrap().as_constant().unwrap().to_rational();
        let err = (v - &two_thirds).abs();
        assert!(err <= BigRational::new(1.into(), (1u64 << depth).into()));
    }
}
