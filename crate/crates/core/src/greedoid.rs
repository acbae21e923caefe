//! Maximum-perimeter set families and the greedoid axioms.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::greedy::{greedy_extend, greedy_order, proj_seq_first, GreedyTrace};
use crate::perimeter::{dist_r, per_r_set};
use crate::point::{Point, PointSet};
use crate::rat::Rat;
use crate::triple::UltraTriple;

/// Default ceiling on the ground set for exhaustive family enumeration.
pub const FAMILY_CAP: usize = 16;

/// Subsets of a ground set, grouped by size, up to `k_max`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetFamily {
    pub ground: PointSet,
    pub by_size: Vec<BTreeSet<PointSet>>,
}

impl SetFamily {
    /// Groups `members` by size; `k_max` is the largest member size.
    pub fn from_members(ground: PointSet, members: impl IntoIterator<Item = PointSet>) -> Self {
        let mut by_size: Vec<BTreeSet<PointSet>> = vec![BTreeSet::new()];
        for m in members {
            if by_size.len() <= m.len() {
                by_size.resize(m.len() + 1, BTreeSet::new());
            }
            by_size[m.len()].insert(m);
        }
        SetFamily { ground, by_size }
    }

    pub fn k_max(&self) -> usize {
        self.by_size.len() - 1
    }

    pub fn contains(&self, s: PointSet) -> bool {
        self.by_size.get(s.len()).is_some_and(|b| b.contains(&s))
    }

    pub fn members(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.by_size.iter().flat_map(|b| b.iter().copied())
    }
}

/// For each size `k <= k_max`, every `k`-subset of maximum r-removed perimeter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaxPerFamily {
    pub family: SetFamily,
    pub max_value: Vec<Rat>,
}

/// Enumerates every subset of size at most `k_max` and keeps the maximizers.
/// Refuses ground sets above `cap` points.
pub fn max_perimeter_sets(
    t: &UltraTriple,
    r: usize,
    k_max: usize,
    cap: usize,
) -> Result<MaxPerFamily> {
    if t.len() > cap {
        return Err(Error::SizeCap { n: t.len(), cap });
    }
    if k_max > t.len() {
        return Err(Error::SizeMismatch(format!(
            "k_max = {k_max} exceeds {} points",
            t.len()
        )));
    }
    let ground = t.ground();
    let mut by_size = Vec::with_capacity(k_max + 1);
    let mut max_value = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut best: Option<Rat> = None;
        let mut members = BTreeSet::new();
        for s in ground.subsets_of_size(k) {
            let per = per_r_set(t, s, r)?;
            match &best {
                Some(b) if per < *b => {}
                Some(b) if per == *b => {
                    members.insert(s);
                }
                _ => {
                    best = Some(per);
                    members = BTreeSet::from([s]);
                }
            }
        }
        by_size.push(members);
        max_value.push(best.expect("k <= n"));
    }
    Ok(MaxPerFamily {
        family: SetFamily { ground, by_size },
        max_value,
    })
}

/// A failed axiom instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomFailure {
    pub axiom: &'static str,
    pub a: PointSet,
    pub b: Option<PointSet>,
    pub details: String,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomReport {
    pub axiom_i: bool,
    pub axiom_ii: bool,
    pub axiom_iii: bool,
    pub axiom_iv: bool,
    pub counterexample: Option<AxiomFailure>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.axiom_i && self.axiom_ii && self.axiom_iii && self.axiom_iv
    }
}

/// Checks the four (strong) greedoid axioms on `fam` restricted to sizes up
/// to its `k_max`. Each axiom is checked on its own; (ii) is not inferred
/// from (iv).
pub fn check_greedoid_axioms(fam: &SetFamily) -> AxiomReport {
    let mut failures: Vec<AxiomFailure> = Vec::new();

    let axiom_i = fam.contains(PointSet::empty());
    if !axiom_i {
        failures.push(AxiomFailure {
            axiom: "i",
            a: PointSet::empty(),
            b: None,
            details: "empty set missing".into(),
        });
    }

    let mut axiom_ii = true;
    for a in fam.members().filter(|a| !a.is_empty()) {
        if !a.iter().any(|x| fam.contains(a.without(x))) {
            axiom_ii = false;
            failures.push(AxiomFailure {
                axiom: "ii",
                a,
                b: None,
                details: "no element can be removed while staying in the family".into(),
            });
            break;
        }
    }

    let mut axiom_iii = true;
    let mut axiom_iv = true;
    'pairs: for k in 0..fam.k_max() {
        for &b in &fam.by_size[k] {
            for &a in &fam.by_size[k + 1] {
                let candidates: Vec<Point> = a.difference(b).to_vec();
                if axiom_iii && !candidates.iter().any(|&x| fam.contains(b.with(x))) {
                    axiom_iii = false;
                    failures.push(AxiomFailure {
                        axiom: "iii",
                        a,
                        b: Some(b),
                        details: "no a in A\\B with B+a in the family".into(),
                    });
                }
                if axiom_iv
                    && !candidates
                        .iter()
                        .any(|&x| fam.contains(b.with(x)) && fam.contains(a.without(x)))
                {
                    axiom_iv = false;
                    failures.push(AxiomFailure {
                        axiom: "iv",
                        a,
                        b: Some(b),
                        details: "no a in A\\B with both B+a and A-a in the family".into(),
                    });
                }
                if !axiom_iii && !axiom_iv {
                    break 'pairs;
                }
            }
        }
    }

    AxiomReport {
        axiom_i,
        axiom_ii,
        axiom_iii,
        axiom_iv,
        counterexample: failures.into_iter().next(),
    }
}

/// Builds a greedy r-removed ordering of `pool` that starts with the points
/// of `a`, following the projection construction: take any greedy order,
/// project its first `|a|` points into `a`, confirm every projected point is
/// a greedy choice, then continue greedily.
///
/// `a` must have maximum perimeter among `|a|`-subsets of `pool`; otherwise
/// the result is [`Error::NotMaximal`]. Any other failure means a step of
/// the construction broke and is reported as [`Error::Falsified`].
pub fn check_prefix_theorem(
    t: &UltraTriple,
    pool: PointSet,
    a: PointSet,
    r: usize,
) -> Result<GreedyTrace> {
    t.check_set(pool)?;
    t.check_set(a)?;
    if !a.is_subset(pool) {
        return Err(Error::SizeMismatch("A must be a subset of the pool".into()));
    }
    let k = a.len();
    let per_a = per_r_set(t, a, r)?;
    for s in pool.subsets_of_size(k) {
        let per = per_r_set(t, s, r)?;
        if per > per_a {
            return Err(Error::NotMaximal(format!(
                "a {k}-subset has perimeter {per} > {per_a}"
            )));
        }
    }

    let greedy = greedy_order(t, pool, pool.len(), r)?;
    let prefix = &greedy.perm[..k];
    if greedy.prefix_perimeter(k) != per_a {
        return Err(Error::Falsified(format!(
            "greedy {k}-prefix has perimeter {} but the maximum is {per_a}",
            greedy.prefix_perimeter(k)
        )));
    }
    let v = proj_seq_first(t, prefix, a)?;
    let mut chosen = PointSet::empty();
    for (step, &vp) in v.iter().enumerate() {
        let gain = t.weight(vp) + dist_r(t, chosen, vp, r)?;
        for x in pool.difference(chosen) {
            let other = t.weight(x) + dist_r(t, chosen, x, r)?;
            if other > gain {
                return Err(Error::Falsified(format!(
                    "projected point {} at step {} is beaten by {} ({other} > {gain})",
                    t.label(vp),
                    step + 1,
                    t.label(x)
                )));
            }
        }
        chosen.insert(vp);
    }
    greedy_extend(t, pool, &v, pool.len(), r)
}
