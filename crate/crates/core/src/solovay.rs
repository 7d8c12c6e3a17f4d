//! Limits `lim_k λ(M(k) ∧ B)`, their piecewise-constant densities, and the
//! sliding families `M_s` and `M_α`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::clopen::{BoolOp, Clopen};
use crate::dyadic::Dyadic;
use crate::error::Error;
use crate::names::tail::{analyze, residue_groups, scan_down, MOVING};
use crate::names::{Bits, EventuallyPeriodicSet, Name};

pub const DEFAULT_WINDOW: u64 = 64;
pub const DEFAULT_PARTITION_BOUND: usize = 8;
pub const MAX_BRANCH_DEPTH: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureValue {
    /// The sequence equals `value` for every `k ≥ stabilization_index`.
    Exact { value: Dyadic, stabilization_index: u64 },
    /// Bounds of the values sampled on `0..=window`.
    Interval { lo: Dyadic, hi: Dyadic, window: u64 },
    /// The limit depends on which sets the ultrafilter contains.
    Conditional { branches: Vec<Branch> },
}

/// Applies when `set` is (or, with `member = false`, is not) in the
/// ultrafilter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub set: EventuallyPeriodicSet,
    pub member: bool,
    pub value: MeasureValue,
}

impl MeasureValue {
    pub fn exact(value: Dyadic, stabilization_index: u64) -> MeasureValue {
        MeasureValue::Exact {
            value,
            stabilization_index,
        }
    }

    pub fn exact_value(&self) -> Option<&Dyadic> {
        match self {
            MeasureValue::Exact { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            MeasureValue::Conditional { branches } => {
                1 + branches.iter().map(|b| b.value.depth()).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Follow the branches selected by `member`.
    pub fn resolve(&self, member: &dyn Fn(&EventuallyPeriodicSet) -> bool) -> Result<MeasureValue, Error> {
        let depth = self.depth();
        if depth > MAX_BRANCH_DEPTH {
            return Err(Error::BranchDepth(depth));
        }
        match self {
            MeasureValue::Conditional { branches } => {
                let b = branches
                    .iter()
                    .find(|b| member(&b.set) == b.member)
                    .ok_or_else(|| Error::MalformedSequence("no branch applies".into()))?;
                b.value.resolve(member)
            }
            v => Ok(v.clone()),
        }
    }
}

/// Sample `value_at` on `0..=window`.
pub(crate) fn interval(window: u64, value_at: impl Fn(u64) -> Dyadic) -> MeasureValue {
    let values: Vec<Dyadic> = (0..=window).map(value_at).collect();
    MeasureValue::Interval {
        lo: values.iter().min().unwrap().clone(),
        hi: values.iter().max().unwrap().clone(),
        window,
    }
}

/// The limit of a sequence that equals `values[k mod P]` for `k ≥ from`,
/// with least stabilization indices found by evaluating below `from`.
pub(crate) fn periodic_limit(values: &[Dyadic], from: u64, value_at: impl Fn(u64) -> Dyadic) -> MeasureValue {
    let period = values.len() as u64;
    let groups = residue_groups(values);
    if groups.len() == 1 {
        let v = groups[0].0.clone();
        let k0 = scan_down(from, |k| value_at(k) == v);
        return MeasureValue::exact(v, k0);
    }
    let sets: Vec<EventuallyPeriodicSet> = groups
        .iter()
        .map(|(_, rs)| EventuallyPeriodicSet::new(0, [], period, rs.iter().copied()).unwrap())
        .collect();
    let branch_value = |i: usize| {
        let (v, _) = &groups[i];
        let k0 = scan_down(from, |k| !sets[i].contains(k) || value_at(k) == *v);
        MeasureValue::exact(v.clone(), k0)
    };
    let branches = if groups.len() == 2 {
        vec![
            Branch {
                set: sets[0].clone(),
                member: true,
                value: branch_value(0),
            },
            Branch {
                set: sets[0].clone(),
                member: false,
                value: branch_value(1),
            },
        ]
    } else {
        (0..groups.len())
            .map(|i| Branch {
                set: sets[i].clone(),
                member: true,
                value: branch_value(i),
            })
            .collect()
    };
    MeasureValue::Conditional { branches }
}

/// `lim_k λ(M(k) ∧ B)`.
pub fn tail_limit(m: &Name, b: &Clopen) -> MeasureValue {
    tail_limit_window(m, b, DEFAULT_WINDOW)
}

pub fn tail_limit_window(m: &Name, b: &Clopen, window: u64) -> MeasureValue {
    let value_at = |k: u64| m.eval(k).measure_of(BoolOp::Meet, b);
    let form = match b.max_coord() {
        Some(c) if c >= MOVING => None,
        _ => analyze(m),
    };
    let Some(form) = form else {
        return interval(window, value_at);
    };
    let values: Vec<Dyadic> = form.shapes.iter().map(|g| g.measure_of(BoolOp::Meet, b)).collect();
    periodic_limit(&values, form.injective_from(b.max_coord()), value_at)
}

/// A piecewise-constant function on `2^ω`: disjoint clopen cells covering
/// the space, each with a value. Stored with distinct values in increasing
/// order and no empty cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Density {
    cells: Vec<(Clopen, Dyadic)>,
}

#[derive(Serialize)]
struct CellRecord<'a> {
    cell: &'a Clopen,
    value: &'a Dyadic,
}

impl Serialize for Density {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.cells.iter().map(|(cell, value)| CellRecord { cell, value }))
    }
}

impl Density {
    /// Cells must be pairwise disjoint and cover the space.
    pub fn from_cells(cells: impl IntoIterator<Item = (Clopen, Dyadic)>) -> Result<Density, Error> {
        let cells: Vec<(Clopen, Dyadic)> = cells.into_iter().collect();
        let mut cover = Clopen::zero();
        for (c, _) in &cells {
            if !cover.disjoint(c) {
                return Err(Error::Domain("density cells overlap".into()));
            }
            cover = cover.join(c);
        }
        if !cover.is_one() {
            return Err(Error::Domain("density cells do not cover the space".into()));
        }
        Ok(Self::normalized(cells))
    }

    fn normalized(cells: Vec<(Clopen, Dyadic)>) -> Density {
        let mut merged: Vec<(Clopen, Dyadic)> = Vec::new();
        for (c, v) in cells {
            if c.is_zero() {
                continue;
            }
            match merged.iter_mut().find(|(_, w)| *w == v) {
                Some((d, _)) => *d = d.join(&c),
                None => merged.push((c, v)),
            }
        }
        merged.sort_by(|a, b| a.1.cmp(&b.1));
        Density { cells: merged }
    }

    pub fn constant(v: Dyadic) -> Density {
        Density {
            cells: vec![(Clopen::one(), v)],
        }
    }

    /// Value 1 on `q` and 0 off it.
    pub fn indicator(q: &Clopen) -> Density {
        Self::normalized(vec![(q.complement(), Dyadic::zero()), (q.clone(), Dyadic::one())])
    }

    /// The conditional measure of the moving part of a symbolic shape.
    pub(crate) fn of_shape(shape: &Clopen) -> Density {
        Self::normalized(shape.split_at(MOVING))
    }

    pub fn cells(&self) -> &[(Clopen, Dyadic)] {
        &self.cells
    }

    pub fn as_constant(&self) -> Option<&Dyadic> {
        match self.cells.as_slice() {
            [(c, v)] if c.is_one() => Some(v),
            _ => None,
        }
    }

    /// `∫_B f dλ`.
    pub fn integral(&self, b: &Clopen) -> Dyadic {
        self.cells
            .iter()
            .map(|(c, v)| v * c.measure_of(BoolOp::Meet, b))
            .sum()
    }

    /// Non-empty cells of the common refinement with both values.
    pub fn refine(&self, other: &Density) -> Vec<(Clopen, Dyadic, Dyadic)> {
        let mut out = Vec::new();
        for (c, v) in &self.cells {
            for (d, w) in &other.cells {
                let cell = c.meet(d);
                if !cell.is_zero() {
                    out.push((cell, v.clone(), w.clone()));
                }
            }
        }
        out
    }

    /// Cell-wise sum on the common refinement.
    pub fn add(&self, other: &Density) -> Density {
        Self::normalized(self.refine(other).into_iter().map(|(c, v, w)| (c, v + w)).collect())
    }

    pub fn max_value(&self) -> &Dyadic {
        &self.cells.last().unwrap().1
    }

    pub fn min_value(&self) -> &Dyadic {
        &self.cells[0].1
    }

    /// The set where the density is positive.
    pub fn support(&self) -> Clopen {
        self.cells
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .fold(Clopen::zero(), |acc, (c, _)| acc.join(c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityBranch {
    pub set: EventuallyPeriodicSet,
    pub member: bool,
    pub density: Density,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DensityOutcome {
    Density(Density),
    Conditional(Vec<DensityBranch>),
}

impl DensityOutcome {
    pub fn unconditional(&self) -> Option<&Density> {
        match self {
            DensityOutcome::Density(d) => Some(d),
            _ => None,
        }
    }
}

/// The Radon–Nikodym density of `B ↦ lim_k λ(M(k) ∧ B)`.
pub fn density(m: &Name) -> Result<DensityOutcome, Error> {
    let form = analyze(m).ok_or_else(|| Error::UnsupportedName(m.to_string()))?;
    let densities: Vec<Density> = form.shapes.iter().map(Density::of_shape).collect();
    let groups = residue_groups(&densities);
    if groups.len() == 1 {
        return Ok(DensityOutcome::Density(groups.into_iter().next().unwrap().0));
    }
    let period = form.period;
    let sets: Vec<EventuallyPeriodicSet> = groups
        .iter()
        .map(|(_, rs)| EventuallyPeriodicSet::new(0, [], period, rs.iter().copied()).unwrap())
        .collect();
    let branches = if groups.len() == 2 {
        vec![
            DensityBranch {
                set: sets[0].clone(),
                member: true,
                density: groups[0].0.clone(),
            },
            DensityBranch {
                set: sets[0].clone(),
                member: false,
                density: groups[1].0.clone(),
            },
        ]
    } else {
        groups
            .into_iter()
            .zip(sets)
            .map(|((density, _), set)| DensityBranch {
                set,
                member: true,
                density,
            })
            .collect()
    };
    Ok(DensityOutcome::Conditional(branches))
}

/// `f_1 ≤ f_2` almost everywhere.
pub fn density_leq(d1: &Density, d2: &Density) -> bool {
    d1.refine(d2).iter().all(|(_, v, w)| v <= w)
}

/// `M_s`: `k ↦ cylinder(k, s)`, with `M_ε = vec(1)`.
pub fn make_ms(s: &Bits) -> Name {
    if s.is_empty() {
        Name::vec(Clopen::one())
    } else {
        Name::sliding(s.clone())
    }
}

/// The dyadic intervals making up `[0, α)`, truncated at `depth`: for each
/// 1-bit `b_i` (`i ≤ depth`) of the binary expansion of `α`, the string
/// `b_1 … b_{i−1} 0`.
pub fn dyadic_antichain(alpha: &BigRational, depth: u32) -> Result<Vec<Bits>, Error> {
    if alpha.is_negative() || *alpha > BigRational::one() {
        return Err(Error::Domain(format!("α = {alpha} is outside [0,1]")));
    }
    if alpha.is_one() {
        return Ok(vec![Bits::empty()]);
    }
    let mut x = alpha.clone();
    let mut prefix = Bits::empty();
    let mut out = Vec::new();
    let two = BigRational::from_integer(2.into());
    for _ in 0..depth {
        x *= &two;
        let bit = x >= BigRational::one();
        if bit {
            x -= BigRational::one();
            out.push(prefix.pushed(false));
        }
        prefix = prefix.pushed(bit);
    }
    Ok(out)
}

/// `M_α = ⋁_{s ∈ I_α} M_s`; `M_0` is the zero name.
pub fn make_malpha(alpha: &BigRational, depth: u32) -> Result<Name, Error> {
    let antichain = dyadic_antichain(alpha, depth)?;
    if alpha.is_zero() {
        return Ok(Name::zero());
    }
    Name::sliding_union(antichain)
}

/// `{M_s : s ∈ 2^n}` in lexicographic order.
pub fn partition_family(n: usize, bound: usize) -> Result<Vec<Name>, Error> {
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "partition length",
            bound,
            got: n,
        });
    }
    Ok(Bits::all_of_length(n).map(|s| make_ms(&s)).collect())
}
