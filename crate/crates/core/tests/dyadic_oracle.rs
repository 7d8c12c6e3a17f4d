use namebench_core::Dyadic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reduced fraction over plain integers.
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
    fn add(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn sub(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.1 - o.0 * self.1, self.1 * o.1)
    }
    fn mul(self, o: Frac) -> Frac {
        Frac::new(self.0 * o.0, self.1 * o.1)
    }
}

fn as_frac(d: &Dyadic) -> Frac {
    let n: i128 = d.numerator().try_into().unwrap();
    Frac::new(n, 1i128 << d.exponent())
}

#[test]
fn arithmetic_matches_integer_fractions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let (an, ae) = (rng.gen_range(-1000i64..1000), rng.gen_range(0u32..24));
        let (bn, be) = (rng.gen_range(-1000i64..1000), rng.gen_range(0u32..24));
        let (a, b) = (Dyadic::new(an, ae), Dyadic::new(bn, be));
        let (fa, fb) = (Frac::new(an as i128, 1 << ae), Frac::new(bn as i128, 1 << be));
        assert_eq!(as_frac(&a), fa);
        assert_eq!(as_frac(&(&a + &b)), fa.add(fb));
        assert_eq!(as_frac(&(&a - &b)), fa.sub(fb));
        assert_eq!(as_frac(&(&a * &b)), fa.mul(fb));
        assert_eq!(a.cmp(&b), (fa.0 * fb.1).cmp(&(fb.0 * fa.1)));
    }
}

#[test]
fn text_forms() {
    for s in ["0", "1", "-3/8", "5/1024"] {
        let d: Dyadic = s.parse().unwrap();
        assert_eq!(d.to_string(), s);
    }
    assert_eq!("6/16".parse::<Dyadic>().unwrap().to_string(), "3/8");
    assert!("1/3".parse::<Dyadic>().is_err());
    let json = serde_json::to_string(&Dyadic::new(3, 4)).unwrap();
    assert_eq!(json, r#"{"num":3,"exp":4}"#);
}
