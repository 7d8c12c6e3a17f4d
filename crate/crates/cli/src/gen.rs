//! Seeded generators for randomized cases.

use namebench_core::solovay::make_ms;
use namebench_core::{Bits, Clopen, Coord, EventuallyPeriodicSet, Name, TailRule};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream for case `index` of a suite run with `seed`.
pub fn rng_for(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) << 20);
    rng
}

/// A clopen with a random truth table on `vars` random coordinates below `coords`.
pub fn clopen(rng: &mut ChaCha8Rng, coords: u64, vars: usize) -> Clopen {
    let mut support: Vec<Coord> = sample(rng, coords as usize, vars.min(coords as usize))
        .into_iter()
        .map(|c| c as Coord)
        .collect();
    support.sort_unstable();
    let table: Vec<bool> = (0..1usize << support.len()).map(|_| rng.gen()).collect();
    Clopen::from_truth_table(&support, |i| table[i])
}

pub fn bits(rng: &mut ChaCha8Rng, max_len: usize) -> Bits {
    let len = rng.gen_range(0..=max_len);
    Bits::new((0..len).map(|_| rng.gen()).collect())
}

pub fn periodic_set(rng: &mut ChaCha8Rng) -> EventuallyPeriodicSet {
    let period = rng.gen_range(1..=12);
    let threshold = rng.gen_range(0..=8);
    let below: Vec<bool> = (0..threshold).map(|_| rng.gen()).collect();
    let residues: Vec<bool> = (0..period).map(|_| rng.gen()).collect();
    EventuallyPeriodicSet::from_fn(threshold, period, |k| {
        if k < threshold {
            below[k as usize]
        } else {
            residues[(k % period) as usize]
        }
    })
}

/// A name with an analyzable tail whose fixed coordinates lie in `{0..5}`.
pub fn analyzable_name(rng: &mut ChaCha8Rng) -> Name {
    let q = |rng: &mut ChaCha8Rng| {
        let vars = rng.gen_range(1..=3);
        clopen(rng, 6, vars)
    };
    match rng.gen_range(0..7) {
        0 => Name::vec(q(rng)),
        1 => make_ms(&bits(rng, 3)),
        2 => {
            let s = bits(rng, 3);
            make_ms(&s).and_const(&q(rng))
        }
        3 => {
            let r = rng.gen_range(0..3);
            Name::indicator(EventuallyPeriodicSet::residue_class(3, r)).meet(&make_ms(&bits(rng, 2)))
        }
        4 => {
            let len = rng.gen_range(0..4);
            let prefix = (0..len).map(|_| q(rng)).collect();
            Name::atom(prefix, TailRule::Constant { c: q(rng) })
        }
        5 => {
            let s = bits(rng, 2);
            make_ms(&s.pushed(false)).join(&Name::vec(q(rng)).meet(&make_ms(&s.pushed(true))))
        }
        _ => make_ms(&bits(rng, 2)).complement().and_const(&q(rng)),
    }
}
