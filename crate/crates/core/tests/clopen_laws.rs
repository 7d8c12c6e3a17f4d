use namebench_core::{enumerate_clopens, BoolOp, Clopen, Dyadic};
use proptest::prelude::*;

/// Boolean expression over coordinates `0..VARS`, evaluated directly.
#[derive(Clone, Debug)]
enum Expr {
    Var(u64),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

const VARS: u64 = 7;

impl Expr {
    fn holds(&self, x: u32) -> bool {
        match self {
            Expr::Var(v) => x >> v & 1 == 1,
            Expr::Not(e) => !e.holds(x),
            Expr::And(a, b) => a.holds(x) && b.holds(x),
            Expr::Or(a, b) => a.holds(x) || b.holds(x),
        }
    }

    fn build(&self) -> Clopen {
        match self {
            Expr::Var(v) => Clopen::var(*v),
            Expr::Not(e) => e.build().complement(),
            Expr::And(a, b) => a.build().meet(&b.build()),
            Expr::Or(a, b) => a.build().join(&b.build()),
        }
    }

    /// Models over all `2^VARS` assignments.
    fn models(&self) -> u64 {
        (0..1u32 << VARS).filter(|&x| self.holds(x)).count() as u64
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    (0..VARS).prop_map(Expr::Var).prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
        ]
    })
}

fn holds(c: &Clopen, x: u32) -> bool {
    c.contains(|v| x >> v & 1 == 1)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn construction_agrees_with_the_expression(e in expr()) {
        let c = e.build();
        for x in 0..1u32 << VARS {
            prop_assert_eq!(holds(&c, x), e.holds(x));
        }
        prop_assert_eq!(c.measure(), Dyadic::new(e.models(), VARS as u32));
    }

    #[test]
    fn equal_functions_are_equal_records(a in expr(), b in expr()) {
        let same = (0..1u32 << VARS).all(|x| a.holds(x) == b.holds(x));
        prop_assert_eq!(a.build() == b.build(), same);
    }

    #[test]
    fn boolean_algebra_laws(a in expr(), b in expr(), c in expr()) {
        let (a, b, c) = (a.build(), b.build(), c.build());
        prop_assert_eq!(a.meet(&b.join(&c)), a.meet(&b).join(&a.meet(&c)));
        prop_assert_eq!(a.join(&b.meet(&c)), a.join(&b).meet(&a.join(&c)));
        prop_assert_eq!(a.meet(&b).complement(), a.complement().join(&b.complement()));
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.meet(&b).meet(&c), a.meet(&b.meet(&c)));
        prop_assert_eq!(a.join(&b), b.join(&a));
    }

    #[test]
    fn measure_laws(a in expr(), b in expr()) {
        let (a, b) = (a.build(), b.build());
        prop_assert_eq!(a.join(&b).measure() + a.meet(&b).measure(), a.measure() + b.measure());
        prop_assert_eq!(a.complement().measure(), a.measure().complement());
        if a.leq(&b) {
            prop_assert!(a.measure() <= b.measure());
        }
        for op in [BoolOp::Meet, BoolOp::Join, BoolOp::Diff] {
            prop_assert_eq!(a.measure_of(op, &b), a.apply(op, &b).measure());
        }
    }
}

#[test]
fn exhaustive_three_coordinates() {
    let all: Vec<Clopen> = enumerate_clopens(&[0, 1, 2], 8).unwrap().collect();
    assert_eq!(all.len(), 256);
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            assert_ne!(a, b);
        }
        let models = (0..8u32).filter(|&x| holds(a, x)).count() as u64;
        assert_eq!(a.measure(), Dyadic::new(models, 3));
    }
}

#[test]
fn text_round_trip_over_enumeration() {
    for c in enumerate_clopens(&[1, 4, 6], 8).unwrap() {
        let back: Clopen = c.to_string().parse().unwrap();
        assert_eq!(back, c);
    }
}
