use super::{Clopen, Coord};
use crate::error::Error;

pub const DEFAULT_ENUMERATION_BOUND: usize = 8;

/// Lazily yields every clopen whose support is contained in a finite set of
/// coordinates, in truth-table counting order.
#[derive(Clone, Debug)]
pub struct ClopenStream {
    vars: Vec<Coord>,
    /// Truth table of the next clopen, `2^|vars|` bits packed little-endian.
    table: Option<Vec<u64>>,
}

impl ClopenStream {
    fn bits(&self) -> usize {
        1 << self.vars.len()
    }
}

impl Iterator for ClopenStream {
    type Item = Clopen;

    fn next(&mut self) -> Option<Clopen> {
        let table = self.table.as_ref()?;
        let clopen = Clopen::from_truth_table(&self.vars, |i| table[i / 64] >> (i % 64) & 1 == 1);
        let bits = self.bits();
        let mut next = table.clone();
        let mut carry = true;
        for w in next.iter_mut() {
            if !carry {
                break;
            }
            let (v, c) = w.overflowing_add(1);
            *w = v;
            carry = c;
        }
        if bits < 64 && next[0] >> bits != 0 {
            carry = true;
        }
        self.table = if carry { None } else { Some(next) };
        Some(clopen)
    }
}

/// All `2^(2^n)` clopens with support inside `support`, each exactly once.
pub fn enumerate_clopens(support: &[Coord], bound: usize) -> Result<ClopenStream, Error> {
    let mut vars = support.to_vec();
    vars.sort_unstable();
    vars.dedup();
    if vars.len() > bound {
        return Err(Error::BoundExceeded {
            what: "enumeration support size",
            bound,
            got: vars.len(),
        });
    }
    let words = (1usize << vars.len()).div_ceil(64);
    Ok(ClopenStream {
        vars,
        table: Some(vec![0; words]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn empty_support_gives_zero_and_one() {
        let all: Vec<Clopen> = enumerate_clopens(&[], 8).unwrap().collect();
        assert_eq!(all, vec![Clopen::zero(), Clopen::one()]);
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_clopens(&[5], 8).unwrap().count(), 4);
        // all Boolean functions of two variables
        let two: HashSet<Clopen> = enumerate_clopens(&[0, 1], 8).unwrap().collect();
        assert_eq!(two.len(), 16);
        let three: HashSet<Clopen> = enumerate_clopens(&[0, 1, 2], 8).unwrap().collect();
        assert_eq!(three.len(), 256);
        assert!(three.iter().all(|c| c.support().iter().all(|v| *v <= 2)));
    }

    #[test]
    fn bound_is_enforced() {
        let vars: Vec<Coord> = (0..9).collect();
        assert!(matches!(
            enumerate_clopens(&vars, DEFAULT_ENUMERATION_BOUND),
            Err(Error::BoundExceeded { .. })
        ));
        // 2^256 clopens; consumed lazily
        let eight: Vec<Coord> = (0..8).collect();
        assert_eq!(enumerate_clopens(&eight, 8).unwrap().take(1000).count(), 1000);
    }
}
