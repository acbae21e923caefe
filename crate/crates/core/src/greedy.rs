//! Projections, greedy r-removed orderings and the exchange construction.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::perimeter::{dist_r, DistanceProfile};
use crate::point::{Point, PointSet};
use crate::rat::Rat;
use crate::triple::UltraTriple;

/// A greedy ordering and the per-step gains `w(c_i) + dist_r(prefix, c_i)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct GreedyTrace {
    pub perm: Vec<Point>,
    pub increments: Vec<Rat>,
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Perimeter of the first `k` points.
    pub fn prefix_perimeter(&self, k: usize) -> Rat {
        self.increments[..k].iter().sum()
    }

    pub fn prefix_set(&self, k: usize) -> PointSet {
        self.perm[..k].iter().collect()
    }
}

/// How to resolve ties between equally good candidates.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum TiePolicy {
    /// Lowest point index.
    #[default]
    First,
    /// Every choice, enumerated.
    All,
}

/// Points of `a` nearest to `c`, or `{c}` when `c` is in `a`.
pub fn proj_point(t: &UltraTriple, a: PointSet, c: Point) -> Result<PointSet> {
    t.check_set(a)?;
    t.check_point(c)?;
    if a.is_empty() {
        return Err(Error::SizeMismatch("projection onto an empty set".into()));
    }
    if a.contains(c) {
        return Ok(PointSet::singleton(c));
    }
    let best = a.iter().map(|x| t.d(c, x)).min().expect("non-empty");
    Ok(a.iter().filter(|&x| t.d(c, x) == best).collect())
}

fn check_distinct(t: &UltraTriple, seq: &[Point]) -> Result<PointSet> {
    let mut seen = PointSet::empty();
    for &p in seq {
        t.check_point(p)?;
        if seen.contains(p) {
            return Err(Error::DuplicateInSequence(t.label(p).to_string()));
        }
        seen.insert(p);
    }
    Ok(seen)
}

/// Sequential projection of the ordered `c` onto `a` without replacement.
///
/// With [`TiePolicy::First`] the result holds exactly one sequence; with
/// [`TiePolicy::All`] it holds every sequence reachable by some choice of
/// nearest points, sorted.
pub fn proj_seq(
    t: &UltraTriple,
    c: &[Point],
    a: PointSet,
    policy: TiePolicy,
) -> Result<Vec<Vec<Point>>> {
    check_distinct(t, c)?;
    t.check_set(a)?;
    if a.len() < c.len() {
        return Err(Error::SizeMismatch(format!(
            "cannot project {} points into a set of {}",
            c.len(),
            a.len()
        )));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(c.len());
    proj_rec(t, c, a, policy, &mut current, &mut out)?;
    out.sort();
    Ok(out)
}

fn proj_rec(
    t: &UltraTriple,
    c: &[Point],
    remaining: PointSet,
    policy: TiePolicy,
    current: &mut Vec<Point>,
    out: &mut Vec<Vec<Point>>,
) -> Result<()> {
    let Some((&head, rest)) = c.split_first() else {
        out.push(current.clone());
        return Ok(());
    };
    let choices = proj_point(t, remaining, head)?;
    let choices: Vec<Point> = match policy {
        TiePolicy::First => choices.first().into_iter().collect(),
        TiePolicy::All => choices.to_vec(),
    };
    for v in choices {
        current.push(v);
        proj_rec(t, rest, remaining.without(v), policy, current, out)?;
        current.pop();
    }
    Ok(())
}

/// `proj(c -> a)` with lowest-index tie-breaking.
pub fn proj_seq_first(t: &UltraTriple, c: &[Point], a: PointSet) -> Result<Vec<Point>> {
    Ok(proj_seq(t, c, a, TiePolicy::First)?.remove(0))
}

/// Incremental state of a greedy run: for every candidate, its sorted profile
/// against the chosen prefix.
struct GreedyState<'t> {
    t: &'t UltraTriple,
    r: usize,
    remaining: PointSet,
    profiles: Vec<DistanceProfile>,
    trace: GreedyTrace,
}

impl<'t> GreedyState<'t> {
    fn new(t: &'t UltraTriple, pool: PointSet, r: usize) -> Self {
        GreedyState {
            t,
            r,
            remaining: pool,
            profiles: vec![DistanceProfile::default(); t.len()],
            trace: GreedyTrace::default(),
        }
    }

    fn gain(&self, x: Point) -> Rat {
        self.t.weight(x) + self.profiles[x.0].top_sum(self.r)
    }

    /// Candidates achieving the best gain, with that gain.
    fn best(&self) -> (Vec<Point>, Rat) {
        let mut best: Option<Rat> = None;
        let mut arg = Vec::new();
        for x in self.remaining {
            let g = self.gain(x);
            match &best {
                Some(b) if g < *b => {}
                Some(b) if g == *b => arg.push(x),
                _ => {
                    best = Some(g);
                    arg = vec![x];
                }
            }
        }
        (arg, best.unwrap_or_else(Rat::zero))
    }

    fn push(&mut self, x: Point) {
        let gain = self.gain(x);
        self.remaining.remove(x);
        for y in self.remaining {
            self.profiles[y.0].insert(self.t.d(x, y).clone());
        }
        self.trace.perm.push(x);
        self.trace.increments.push(gain);
    }
}

fn check_pool(t: &UltraTriple, pool: PointSet, m: usize) -> Result<()> {
    t.check_set(pool)?;
    if m > pool.len() {
        return Err(Error::SizeMismatch(format!(
            "m = {m} exceeds the pool size {}",
            pool.len()
        )));
    }
    Ok(())
}

/// A greedy r-removed `m`-permutation of `pool`, breaking ties by lowest index.
pub fn greedy_order(t: &UltraTriple, pool: PointSet, m: usize, r: usize) -> Result<GreedyTrace> {
    greedy_extend(t, pool, &[], m, r)
}

/// Continues the given `prefix` greedily until it has `m` points.
///
/// The prefix itself is taken as is; its increments are recorded but it is
/// not checked for greediness.
pub fn greedy_extend(
    t: &UltraTriple,
    pool: PointSet,
    prefix: &[Point],
    m: usize,
    r: usize,
) -> Result<GreedyTrace> {
    check_pool(t, pool, m)?;
    let chosen = check_distinct(t, prefix)?;
    if !chosen.is_subset(pool) || prefix.len() > m {
        return Err(Error::SizeMismatch(
            "prefix must be a subset of the pool no longer than m".into(),
        ));
    }
    let mut state = GreedyState::new(t, pool, r);
    for &p in prefix {
        state.push(p);
    }
    while state.trace.len() < m {
        let (arg, _) = state.best();
        state.push(arg[0]);
    }
    Ok(state.trace)
}

/// Hard limit on the pool for [`all_greedy_orders`].
pub const ALL_ORDERS_CAP: usize = 10;

/// Every greedy r-removed `m`-permutation of `pool`, sorted.
pub fn all_greedy_orders(
    t: &UltraTriple,
    pool: PointSet,
    m: usize,
    r: usize,
) -> Result<Vec<GreedyTrace>> {
    check_pool(t, pool, m)?;
    if pool.len() > ALL_ORDERS_CAP {
        return Err(Error::SizeCap {
            n: pool.len(),
            cap: ALL_ORDERS_CAP,
        });
    }
    let mut out = Vec::new();
    let mut state = GreedyState::new(t, pool, r);
    enumerate(&mut state, m, &mut out);
    out.sort();
    Ok(out)
}

fn enumerate(state: &mut GreedyState<'_>, m: usize, out: &mut Vec<GreedyTrace>) {
    if state.trace.len() == m {
        out.push(state.trace.clone());
        return;
    }
    let (arg, _) = state.best();
    for x in arg {
        let saved_profiles = state.profiles.clone();
        let saved_remaining = state.remaining;
        state.push(x);
        enumerate(state, m, out);
        state.trace.perm.pop();
        state.trace.increments.pop();
        state.profiles = saved_profiles;
        state.remaining = saved_remaining;
    }
}

/// All greedy orders under `policy`: one for `First`, every one for `All`.
pub fn greedy_orders(
    t: &UltraTriple,
    pool: PointSet,
    m: usize,
    r: usize,
    policy: TiePolicy,
) -> Result<Vec<GreedyTrace>> {
    match policy {
        TiePolicy::First => Ok(vec![greedy_order(t, pool, m, r)?]),
        TiePolicy::All => all_greedy_orders(t, pool, m, r),
    }
}

/// The gains of a greedy run, which do not depend on how ties are broken.
pub fn increment_signature(
    t: &UltraTriple,
    pool: PointSet,
    m: usize,
    r: usize,
) -> Result<Vec<Rat>> {
    Ok(greedy_order(t, pool, m, r)?.increments)
}

/// Exchange element for `|a| = |b| + 1`: projects `b`, in index order, into
/// `a` and returns the one member of `a` left over. It lies outside `b` and
/// satisfies `per_r(a - u) + per_r(b + u) >= per_r(a) + per_r(b)` for the
/// given `r`; the construction itself does not depend on `r`.
pub fn exchange_element(t: &UltraTriple, a: PointSet, b: PointSet, _r: usize) -> Result<Point> {
    exchange_element_ordered(t, a, &b.to_vec())
}

/// [`exchange_element`] with an explicit ordering of `b`.
pub fn exchange_element_ordered(t: &UltraTriple, a: PointSet, b: &[Point]) -> Result<Point> {
    t.check_set(a)?;
    if a.len() != b.len() + 1 {
        return Err(Error::SizeMismatch(format!(
            "need |A| = |B| + 1, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let image: PointSet = proj_seq_first(t, b, a)?.into_iter().collect();
    let rest = a.difference(image);
    debug_assert_eq!(rest.len(), 1);
    Ok(rest.first().expect("one point left"))
}

/// The set of distinct increment lists across `traces`.
pub fn distinct_signatures(traces: &[GreedyTrace]) -> BTreeSet<Vec<Rat>> {
    traces.iter().map(|tr| tr.increments.clone()).collect()
}

/// `w(x) + dist_r(prefix, x)` computed from scratch.
pub fn step_gain(t: &UltraTriple, prefix: PointSet, x: Point, r: usize) -> Result<Rat> {
    Ok(t.weight(x) + dist_r(t, prefix, x, r)?)
}
