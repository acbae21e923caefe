//! Point-to-set distances and the perimeters they induce.
//!
//! `dist_r(C, v)` sums the `|C| - r` largest distances from `v` to `C` (zero
//! when `|C| <= r`). `dist_f(C, v)` applies level `f_i` to the `i`-th smallest
//! distance and sums. A perimeter adds weights to the accumulated distances
//! along an ordering of the set.

use crate::error::{Error, Result};
use crate::point::{Point, PointSet};
use crate::rat::Rat;
use crate::triple::{MonotoneTable, UltraTriple};

/// Distances from a point to the members of a set, sorted non-decreasing.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DistanceProfile(Vec<Rat>);

impl DistanceProfile {
    /// Wraps `values` after sorting them.
    pub fn new(mut values: Vec<Rat>) -> Self {
        values.sort();
        DistanceProfile(values)
    }

    pub fn values(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the `len - r` largest entries, or zero when `len <= r`.
    pub fn top_sum(&self, r: usize) -> Rat {
        if self.0.len() <= r {
            return Rat::zero();
        }
        self.0[r..].iter().sum()
    }

    pub(crate) fn insert(&mut self, v: Rat) {
        let at = self.0.partition_point(|x| *x <= v);
        self.0.insert(at, v);
    }
}

pub fn profile(t: &UltraTriple, c: PointSet, v: Point) -> Result<DistanceProfile> {
    t.check_set(c)?;
    t.check_point(v)?;
    if c.contains(v) {
        return Err(Error::PointInSet(t.label(v).to_string()));
    }
    Ok(DistanceProfile::new(
        c.iter().map(|x| t.d(x, v).clone()).collect(),
    ))
}

/// The r-removed distance from `v` to `c`.
pub fn dist_r(t: &UltraTriple, c: PointSet, v: Point, r: usize) -> Result<Rat> {
    Ok(profile(t, c, v)?.top_sum(r))
}

fn check_sequence(t: &UltraTriple, seq: &[Point]) -> Result<()> {
    let mut seen = PointSet::empty();
    for &p in seq {
        t.check_point(p)?;
        if seen.contains(p) {
            return Err(Error::DuplicateInSequence(t.label(p).to_string()));
        }
        seen.insert(p);
    }
    Ok(())
}

/// Perimeter of an ordered set under a point-to-set distance `dist`.
fn ordered_perimeter(
    t: &UltraTriple,
    seq: &[Point],
    mut dist: impl FnMut(PointSet, Point) -> Result<Rat>,
) -> Result<Rat> {
    check_sequence(t, seq)?;
    let mut prefix = PointSet::empty();
    let mut total = Rat::zero();
    for &p in seq {
        total += t.weight(p);
        total += dist(prefix, p)?;
        prefix.insert(p);
    }
    Ok(total)
}

/// r-removed perimeter of the ordered set `seq`.
pub fn per_r_ordered(t: &UltraTriple, seq: &[Point], r: usize) -> Result<Rat> {
    ordered_perimeter(t, seq, |c, v| dist_r(t, c, v, r))
}

/// r-removed perimeter of a set, evaluated on its canonical (index) order.
/// Every ordering gives the same value.
pub fn per_r_set(t: &UltraTriple, a: PointSet, r: usize) -> Result<Rat> {
    t.check_set(a)?;
    per_r_ordered(t, &a.to_vec(), r)
}

/// A sequence `f_1, ..., f_depth` of functions on distance values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneFamily {
    tables: Vec<MonotoneTable>,
}

impl MonotoneFamily {
    /// Requires every table to be non-decreasing.
    pub fn new(tables: Vec<MonotoneTable>) -> Result<Self> {
        for t in &tables {
            t.check_monotone()?;
        }
        Ok(MonotoneFamily { tables })
    }

    /// Accepts decreasing tables too; used to build negative examples.
    pub fn new_unchecked(tables: Vec<MonotoneTable>) -> Self {
        MonotoneFamily { tables }
    }

    /// `f_j = 0` for `j <= r` and `f_j = g` above, up to `depth`.
    pub fn step(g: &MonotoneTable, r: usize, depth: usize) -> Result<Self> {
        let zero = MonotoneTable::constant_on(g.domain(), &Rat::zero());
        Self::new(
            (1..=depth)
                .map(|j| if j <= r { zero.clone() } else { g.clone() })
                .collect(),
        )
    }

    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[MonotoneTable] {
        &self.tables
    }

    /// `f_j` with 1-based `j`.
    pub fn level(&self, j: usize) -> &MonotoneTable {
        &self.tables[j - 1]
    }

    pub fn is_monotone(&self) -> bool {
        self.tables.iter().all(MonotoneTable::is_monotone)
    }

    /// `sum_i f_i(d_i)` over a sorted profile.
    pub fn apply(&self, profile: &DistanceProfile) -> Result<Rat> {
        if profile.len() > self.depth() {
            return Err(Error::DepthExceeded {
                size: profile.len(),
                depth: self.depth(),
            });
        }
        profile
            .values()
            .iter()
            .zip(&self.tables)
            .map(|(d, f)| f.eval(d))
            .sum()
    }
}

pub fn dist_f(t: &UltraTriple, c: PointSet, v: Point, f: &MonotoneFamily) -> Result<Rat> {
    f.apply(&profile(t, c, v)?)
}

pub fn per_f_ordered(t: &UltraTriple, seq: &[Point], f: &MonotoneFamily) -> Result<Rat> {
    ordered_perimeter(t, seq, |c, v| dist_f(t, c, v, f))
}
