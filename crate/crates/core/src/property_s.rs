//! Exchange (S1) and domination (S2) checks for point-to-set distances, and
//! recovery of the level functions `f_m` of a profile-only distance on the
//! integers with the `-nu_p` metric.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::padic::{padic_triple, realize_profile, PadicSpec};
use crate::perimeter::{dist_f, dist_r, MonotoneFamily};
use crate::point::{Point, PointSet};
use crate::rat::Rat;
use crate::triple::{MonotoneTable, UltraTriple};

/// A distance from a point to a finite set.
pub trait DistFunctional {
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat>;

    /// Whether the value is claimed to depend only on the sorted distances
    /// from `v` to `c`.
    fn profile_only(&self) -> bool {
        false
    }
}

/// `dist_r`.
#[derive(Clone, Copy, Debug)]
pub struct RRemoved(pub usize);

impl DistFunctional for RRemoved {
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat> {
        dist_r(t, c, v, self.0)
    }

    fn profile_only(&self) -> bool {
        true
    }
}

/// `dist_f` for a family of level functions.
#[derive(Clone, Debug)]
pub struct FamilyDist(pub MonotoneFamily);

impl DistFunctional for FamilyDist {
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat> {
        dist_f(t, c, v, &self.0)
    }

    fn profile_only(&self) -> bool {
        true
    }
}

/// Distance to the nearest member of `c`, zero for the empty set.
#[derive(Clone, Copy, Debug)]
pub struct Nearest;

impl DistFunctional for Nearest {
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat> {
        if c.contains(v) {
            return Err(Error::PointInSet(t.label(v).to_string()));
        }
        Ok(c.iter()
            .map(|x| t.d(x, v).clone())
            .min()
            .unwrap_or_else(Rat::zero))
    }

    fn profile_only(&self) -> bool {
        true
    }
}

/// Distance to the farthest member of `c`, zero for the empty set.
#[derive(Clone, Copy, Debug)]
pub struct Farthest;

impl DistFunctional for Farthest {
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat> {
        if c.contains(v) {
            return Err(Error::PointInSet(t.label(v).to_string()));
        }
        Ok(c.iter()
            .map(|x| t.d(x, v).clone())
            .max()
            .unwrap_or_else(Rat::zero))
    }

    fn profile_only(&self) -> bool {
        true
    }
}

/// Wraps a closure as a functional.
pub struct FnDist<F> {
    pub f: F,
    pub profile_only: bool,
}

impl<F> DistFunctional for FnDist<F>
where
    F: Fn(&UltraTriple, PointSet, Point) -> Result<Rat>,
{
    fn eval(&self, t: &UltraTriple, c: PointSet, v: Point) -> Result<Rat> {
        (self.f)(t, c, v)
    }

    fn profile_only(&self) -> bool {
        self.profile_only
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SCounterexample {
    pub c: PointSet,
    pub x: Point,
    pub y: Point,
    pub lhs: Rat,
    pub rhs: Rat,
}

fn sets_up_to(ground: PointSet, size_cap: usize) -> impl Iterator<Item = PointSet> {
    (0..=size_cap.min(ground.len())).flat_map(move |k| ground.subsets_of_size(k))
}

/// Every `(C, x, y)` with `|C| <= size_cap`, `x < y` outside `C`, where
/// `dist(C, x) + dist(C + x, y) != dist(C, y) + dist(C + y, x)`.
pub fn check_s1(
    t: &UltraTriple,
    dist: &dyn DistFunctional,
    size_cap: usize,
) -> Result<Vec<SCounterexample>> {
    let ground = t.ground();
    let mut out = Vec::new();
    for c in sets_up_to(ground, size_cap) {
        let outside = ground.difference(c).to_vec();
        for (i, &x) in outside.iter().enumerate() {
            for &y in &outside[i + 1..] {
                let lhs = dist.eval(t, c, x)? + dist.eval(t, c.with(x), y)?;
                let rhs = dist.eval(t, c, y)? + dist.eval(t, c.with(y), x)?;
                if lhs != rhs {
                    out.push(SCounterexample { c, x, y, lhs, rhs });
                }
            }
        }
    }
    Ok(out)
}

/// Every `(C, x, y)` with `|C| <= size_cap` and `d(c, x) <= d(c, y)` for all
/// `c` in `C`, where `dist(C, x) > dist(C, y)`. Here `lhs = dist(C, x)`.
pub fn check_s2(
    t: &UltraTriple,
    dist: &dyn DistFunctional,
    size_cap: usize,
) -> Result<Vec<SCounterexample>> {
    let ground = t.ground();
    let mut out = Vec::new();
    for c in sets_up_to(ground, size_cap) {
        let outside = ground.difference(c).to_vec();
        for &x in &outside {
            for &y in &outside {
                if x == y || !c.iter().all(|m| t.d(m, x) <= t.d(m, y)) {
                    continue;
                }
                let lhs = dist.eval(t, c, x)?;
                let rhs = dist.eval(t, c, y)?;
                if lhs > rhs {
                    out.push(SCounterexample { c, x, y, lhs, rhs });
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates `g` on an integer configuration realizing `profile`, twice:
/// once as constructed and once mirrored through `z -> 1 - z`, which keeps
/// every distance. Disagreement means `g` is not profile-only.
pub fn eval_on_profile(g: &dyn DistFunctional, p: u64, profile: &[i64]) -> Result<Rat> {
    let real = realize_profile(p, profile)?;
    let mut elements = vec![real.x];
    elements.extend(&real.points);
    let value = eval_config(g, p, &elements)?;
    let mirrored: Vec<i64> = elements.iter().map(|z| 1 - z).collect();
    let again = eval_config(g, p, &mirrored)?;
    if value != again {
        return Err(Error::NotProfileOnly(format!(
            "profile {profile:?} gives {value} and {again} on two realizations"
        )));
    }
    Ok(value)
}

/// `g(C, x)` where `elements[0]` is `x` and the rest form `C`.
fn eval_config(g: &dyn DistFunctional, p: u64, elements: &[i64]) -> Result<Rat> {
    let t = padic_triple(&PadicSpec::new(p, 0, elements.to_vec()))?;
    let c: PointSet = (1..elements.len()).map(Point).collect();
    g.eval(&t, c, Point(0))
}

/// Level functions recovered from a profile-only distance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReconstructedFamily {
    pub domain: Vec<i64>,
    /// `tables[m - 1][d] = f_m(d)`.
    pub tables: Vec<BTreeMap<i64, Rat>>,
    pub monotone: bool,
    /// First `(m, lo, hi)` with `lo < hi` and `f_m(lo) > f_m(hi)`.
    pub first_decrease: Option<(usize, i64, i64)>,
}

impl ReconstructedFamily {
    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    fn rat_tables(&self) -> Vec<MonotoneTable> {
        self.tables
            .iter()
            .map(|t| {
                MonotoneTable::new_unchecked(t.iter().map(|(d, v)| (Rat::from_int(*d), v.clone())))
            })
            .collect()
    }

    /// The family as a [`MonotoneFamily`]; fails if some level decreases.
    pub fn to_family(&self) -> Result<MonotoneFamily> {
        MonotoneFamily::new(self.rat_tables())
    }

    pub fn to_family_unchecked(&self) -> MonotoneFamily {
        MonotoneFamily::new_unchecked(self.rat_tables())
    }
}

fn check_domain(domain: &[i64]) -> Result<Vec<i64>> {
    if let Some(d) = domain.iter().find(|d| **d > 0) {
        return Err(Error::InvalidProfile(format!(
            "domain value {d} is positive"
        )));
    }
    let mut d = domain.to_vec();
    d.sort();
    d.dedup();
    Ok(d)
}

/// Recovers `f_1 = g_1` and `f_m(d) = g_m(d, ..., d) - g_{m-1}(d, ..., d)`
/// on `domain`, evaluating `g` only on realized integer configurations.
pub fn reconstruct_f(
    g: &dyn DistFunctional,
    p: u64,
    m_max: usize,
    domain: &[i64],
) -> Result<ReconstructedFamily> {
    if !g.profile_only() {
        return Err(Error::NotProfileOnly(
            "functional does not claim profile dependence".into(),
        ));
    }
    let domain = check_domain(domain)?;
    let mut tables = Vec::with_capacity(m_max);
    let mut previous: BTreeMap<i64, Rat> = domain.iter().map(|&d| (d, Rat::zero())).collect();
    for m in 1..=m_max {
        let mut table = BTreeMap::new();
        let mut current = BTreeMap::new();
        for &d in &domain {
            let gm = eval_on_profile(g, p, &vec![d; m])?;
            table.insert(d, &gm - &previous[&d]);
            current.insert(d, gm);
        }
        tables.push(table);
        previous = current;
    }
    let first_decrease = tables.iter().enumerate().find_map(|(i, t)| {
        let entries: Vec<_> = t.iter().collect();
        entries
            .windows(2)
            .find(|w| w[0].1 > w[1].1)
            .map(|w| (i + 1, *w[0].0, *w[1].0))
    });
    Ok(ReconstructedFamily {
        domain,
        tables,
        monotone: first_decrease.is_none(),
        first_decrease,
    })
}

/// A sorted profile on which `g` and the family disagree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReconstructionMismatch {
    pub profile: Vec<i64>,
    pub functional: Rat,
    pub family: Rat,
}

/// Every non-decreasing tuple over `domain` of length `1..=n_max`.
pub fn sorted_tuples(domain: &[i64], n_max: usize) -> Vec<Vec<i64>> {
    fn rec(domain: &[i64], start: usize, len: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..domain.len() {
            cur.push(domain[i]);
            rec(domain, i, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for len in 1..=n_max {
        rec(domain, 0, len, &mut Vec::with_capacity(len), &mut out);
    }
    out
}

/// Checks `g(d_1..d_n) = sum_j f_j(d_j)` on every sorted tuple over `domain`
/// of length at most `n_max`, returning the first mismatch.
pub fn verify_reconstruction(
    g: &dyn DistFunctional,
    fam: &ReconstructedFamily,
    p: u64,
    n_max: usize,
    domain: &[i64],
) -> Result<Option<ReconstructionMismatch>> {
    if n_max > fam.depth() {
        return Err(Error::DepthExceeded {
            size: n_max,
            depth: fam.depth(),
        });
    }
    let domain = check_domain(domain)?;
    for profile in sorted_tuples(&domain, n_max) {
        let functional = eval_on_profile(g, p, &profile)?;
        let mut family = Rat::zero();
        for (j, d) in profile.iter().enumerate() {
            family += fam.tables[j]
                .get(d)
                .ok_or_else(|| Error::Undefined(format!("f_{}({d})", j + 1)))?;
        }
        if functional != family {
            return Ok(Some(ReconstructionMismatch {
                profile,
                functional,
                family,
            }));
        }
    }
    Ok(None)
}
