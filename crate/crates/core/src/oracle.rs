//! Brute-force reference computations.
//!
//! Nothing here calls into the perimeter, greedy or greedoid modules: every
//! quantity is recomputed from the raw weights and the distance accessor by
//! plain enumeration of subsets and permutations. When all weights and
//! distances share a denominator that keeps the scaled values small, the
//! enumeration runs on scaled `i128` integers, which is still exact.

use std::collections::BTreeSet;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::point::{Point, PointSet};
use crate::rat::Rat;
use crate::triple::UltraTriple;

/// Best value of a brute-force scan and every object attaining it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OracleResult {
    pub value: Rat,
    /// Each witness is a list of points in increasing index order.
    pub witnesses: Vec<Vec<Point>>,
}

pub const DIST_CAP: usize = 20;
pub const SUBSET_CAP: usize = 16;
pub const PERMUTATION_CAP: usize = 8;

trait Scalar: Clone + Ord + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
}

/// Weights and distances of a triple copied into a plain matrix.
struct Space<S> {
    n: usize,
    w: Vec<S>,
    d: Vec<Vec<S>>,
}

impl<S: Scalar> Space<S> {
    fn build(t: &UltraTriple, conv: impl Fn(&Rat) -> S) -> Self {
        let n = t.len();
        let mut d = vec![vec![S::zero(); n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j {
                    *cell = conv(t.d(Point(i), Point(j)));
                }
            }
        }
        Space {
            n,
            w: t.points().map(|p| conv(t.weight(p))).collect(),
            d,
        }
    }
}

/// Common denominator `L` such that every value times `L` is an integer of
/// at most 2^80 in magnitude, if one exists.
fn integer_scale(t: &UltraTriple) -> Option<BigInt> {
    let mut l = BigInt::one();
    let mut values: Vec<&Rat> = t.weights().iter().collect();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            values.push(t.d(Point(i), Point(j)));
        }
    }
    for v in &values {
        l = l.lcm(v.denom());
    }
    let bound = BigInt::one() << 80;
    values
        .iter()
        .all(|v| {
            let scaled = v.numer() * (&l / v.denom());
            scaled < bound && scaled > -&bound
        })
        .then_some(l)
}

fn scaled(v: &Rat, l: &BigInt) -> i128 {
    (v.numer() * (l / v.denom())).to_i128().expect("bounded")
}

fn unscale(v: i128, l: &BigInt) -> Rat {
    Rat::from_bigints(BigInt::from(v), l.clone()).expect("positive scale")
}

/// Runs `f` on the cheapest exact representation of `t` and converts the
/// resulting scalars back to rationals.
macro_rules! dispatch {
    ($t:expr, |$space:ident| $body:expr, |$res:ident, $conv:ident| $back:expr) => {{
        match integer_scale($t) {
            Some(l) => {
                let $space = Space::<i128>::build($t, |v| scaled(v, &l));
                let $res = $body;
                let $conv = |v: i128| unscale(v, &l);
                $back
            }
            None => {
                let $space = Space::<Rat>::build($t, |v| v.clone());
                let $res = $body;
                let $conv = |v: Rat| v;
                $back
            }
        }
    }};
}

/// Calls `visit` on every `k`-subset of `items`, as a sorted list.
fn for_each_combination(items: &[usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if i >= items.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, visit);
            cur.pop();
        }
    }
    if k > items.len() {
        return;
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), visit);
}

/// Max over `(|c| - r)`-subsets of `c` of the summed distances to `v`.
fn dist_by_subsets<S: Scalar>(
    s: &Space<S>,
    c: &[usize],
    v: usize,
    r: usize,
) -> (S, Vec<Vec<usize>>) {
    if c.len() <= r {
        return (S::zero(), vec![vec![]]);
    }
    let mut best: Option<S> = None;
    let mut arg: Vec<Vec<usize>> = Vec::new();
    for_each_combination(c, c.len() - r, &mut |sub| {
        let mut total = S::zero();
        for &x in sub {
            total = total + s.d[v][x].clone();
        }
        match &best {
            Some(b) if total < *b => {}
            Some(b) if total == *b => arg.push(sub.to_vec()),
            _ => {
                best = Some(total);
                arg = vec![sub.to_vec()];
            }
        }
    });
    (best.expect("at least one subset"), arg)
}

/// Max over the `r`-subsets removed from `c`: total minus the smallest
/// removable sum. Same value as [`dist_by_subsets`], reached from the other
/// side, and cheaper when `r` is small.
fn dist_by_removal<S: Scalar>(s: &Space<S>, c: &[usize], v: usize, r: usize) -> S {
    if c.len() <= r {
        return S::zero();
    }
    let mut total = S::zero();
    for &x in c {
        total = total + s.d[v][x].clone();
    }
    let mut least: Option<S> = None;
    for_each_combination(c, r, &mut |removed| {
        let mut sum = S::zero();
        for &x in removed {
            sum = sum + s.d[v][x].clone();
        }
        if least.as_ref().is_none_or(|l| sum < *l) {
            least = Some(sum);
        }
    });
    total - least.expect("at least one removal")
}

/// Perimeter of `seq` in the given order, distances by subset enumeration.
fn perimeter_of<S: Scalar>(s: &Space<S>, seq: &[usize], r: usize) -> S {
    let mut total = S::zero();
    for i in 0..seq.len() {
        total = total + s.w[seq[i]].clone();
        total = total + dist_by_subsets(s, &seq[..i], seq[i], r).0;
    }
    total
}

fn indices(c: PointSet) -> Vec<usize> {
    c.iter().map(Point::index).collect()
}

fn to_points(xs: &[usize]) -> Vec<Point> {
    xs.iter().copied().map(Point).collect()
}

/// r-removed distance by enumerating all `(|C| - r)`-subsets.
pub fn brute_dist_r(t: &UltraTriple, c: PointSet, v: Point, r: usize) -> Result<OracleResult> {
    if c.len() > DIST_CAP {
        return Err(Error::SizeCap {
            n: c.len(),
            cap: DIST_CAP,
        });
    }
    if c.contains(v) {
        return Err(Error::PointInSet(t.label(v).to_string()));
    }
    let items = indices(c);
    dispatch!(
        t,
        |space| dist_by_subsets(&space, &items, v.0, r),
        |res, conv| {
            Ok(OracleResult {
                value: conv(res.0),
                witnesses: res.1.iter().map(|w| to_points(w)).collect(),
            })
        }
    )
}

/// Maximum r-removed perimeter over all `k`-subsets of the ground set.
pub fn brute_max_perimeter(t: &UltraTriple, k: usize, r: usize) -> Result<OracleResult> {
    if t.len() > SUBSET_CAP {
        return Err(Error::SizeCap {
            n: t.len(),
            cap: SUBSET_CAP,
        });
    }
    if k > t.len() {
        return Err(Error::SizeMismatch(format!(
            "k = {k} exceeds {} points",
            t.len()
        )));
    }
    let all: Vec<usize> = (0..t.len()).collect();
    dispatch!(
        t,
        |space| {
            let mut best = None;
            let mut arg: Vec<Vec<usize>> = Vec::new();
            for_each_combination(&all, k, &mut |sub| {
                let per = perimeter_of(&space, sub, r);
                match &best {
                    Some(b) if per < *b => {}
                    Some(b) if per == *b => arg.push(sub.to_vec()),
                    _ => {
                        best = Some(per);
                        arg = vec![sub.to_vec()];
                    }
                }
            });
            (best.expect("k <= n"), arg)
        },
        |res, conv| Ok(OracleResult {
            value: conv(res.0),
            witnesses: res.1.iter().map(|w| to_points(w)).collect(),
        })
    )
}

/// Maximum r-removed perimeter for every size `0..=n`, from one depth-first
/// walk over all subsets of the ground set.
///
/// A subset's perimeter is its parent's (the subset without its largest
/// index) plus the new point's weight and its r-removed distance to the
/// parent, computed by removal enumeration. `cap` bounds the ground set.
pub fn brute_max_perimeters(t: &UltraTriple, r: usize, cap: usize) -> Result<Vec<OracleResult>> {
    if t.len() > cap {
        return Err(Error::SizeCap { n: t.len(), cap });
    }
    dispatch!(
        t,
        |space| {
            let n = space.n;
            let mut best: Vec<Option<_>> = vec![None; n + 1];
            let mut arg: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
            let mut stack = Vec::with_capacity(n);
            walk(
                &space,
                r,
                0,
                &mut stack,
                Scalar::zero(),
                &mut best,
                &mut arg,
            );
            (best, arg)
        },
        |res, conv| {
            Ok(res
                .0
                .into_iter()
                .zip(res.1)
                .map(|(b, a)| OracleResult {
                    value: conv(b.expect("every size reached")),
                    witnesses: a.iter().map(|w| to_points(w)).collect(),
                })
                .collect())
        }
    )
}

fn walk<S: Scalar>(
    s: &Space<S>,
    r: usize,
    start: usize,
    stack: &mut Vec<usize>,
    per: S,
    best: &mut [Option<S>],
    arg: &mut [Vec<Vec<usize>>],
) {
    let k = stack.len();
    match &best[k] {
        Some(b) if per < *b => {}
        Some(b) if per == *b => arg[k].push(stack.clone()),
        _ => {
            best[k] = Some(per.clone());
            arg[k] = vec![stack.clone()];
        }
    }
    for x in start..s.n {
        let next = per.clone() + s.w[x].clone() + dist_by_removal(s, stack, x, r);
        stack.push(x);
        walk(s, r, x + 1, stack, next, best, arg);
        stack.pop();
    }
}

/// Distinct r-removed perimeters over all orderings of `a`.
pub fn brute_all_permutation_perimeters(
    t: &UltraTriple,
    a: PointSet,
    r: usize,
) -> Result<BTreeSet<Rat>> {
    if a.len() > PERMUTATION_CAP {
        return Err(Error::SizeCap {
            n: a.len(),
            cap: PERMUTATION_CAP,
        });
    }
    let items = indices(a);
    dispatch!(
        t,
        |space| {
            let mut seen = BTreeSet::new();
            let mut perm = items.clone();
            heap_permutations(&mut perm, &mut |p| {
                seen.insert(perimeter_of(&space, p, r));
            });
            seen
        },
        |res, conv| Ok(res.into_iter().map(conv).collect())
    )
}

/// Heap's algorithm.
fn heap_permutations(items: &mut [usize], visit: &mut impl FnMut(&[usize])) {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{padic_triple, PadicSpec};
    use crate::triple::DistanceTable;

    fn neg_nu2(elements: &[i64]) -> UltraTriple {
        padic_triple(&PadicSpec::new(2, 0, elements.to_vec())).unwrap()
    }

    #[test]
    fn brute_dist_example() {
        let t = neg_nu2(&[0, 1, 2, 3, 4]);
        let c = t.set_of(&["0", "1", "2"]).unwrap();
        let v = t.point("4").unwrap();
        let res = brute_dist_r(&t, c, v, 1).unwrap();
        assert_eq!(res.value, Rat::from_int(-1));
        assert_eq!(res.witnesses, vec![t.seq_of(&["1", "2"]).unwrap()]);
        let res = brute_dist_r(&t, c, v, 3).unwrap();
        assert_eq!(res.value, Rat::zero());
        let res = brute_dist_r(&t, c, v, 0).unwrap();
        assert_eq!(res.witnesses, vec![c.to_vec()]);
    }

    #[test]
    fn brute_max_perimeter_examples() {
        let t = neg_nu2(&[0, 1, 2, 3, 4]);
        let res = brute_max_perimeter(&t, 0, 0).unwrap();
        assert_eq!((res.value, res.witnesses), (Rat::zero(), vec![vec![]]));
        let res = brute_max_perimeter(&t, 5, 0).unwrap();
        assert_eq!(res.value, Rat::from_int(-5));
        assert_eq!(res.witnesses.len(), 1);
        let res = brute_max_perimeter(&t, 2, 0).unwrap();
        assert_eq!(res.value, Rat::zero());
        assert_eq!(res.witnesses.len(), 6);
    }

    #[test]
    fn single_walk_matches_per_size_scan() {
        let t = neg_nu2(&[0, 1, 2, 3, 4, 5, 6]);
        for r in 0..3 {
            let all = brute_max_perimeters(&t, r, SUBSET_CAP).unwrap();
            for (k, res) in all.iter().enumerate() {
                let one = brute_max_perimeter(&t, k, r).unwrap();
                assert_eq!(res.value, one.value, "k={k} r={r}");
                let mut a = res.witnesses.clone();
                let mut b = one.witnesses.clone();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn permutation_perimeters() {
        let t = neg_nu2(&[0, 1, 2, 3, 4]);
        let a = t.set_of(&["0", "1", "2", "4"]).unwrap();
        let vals = brute_all_permutation_perimeters(&t, a, 1).unwrap();
        assert_eq!(
            vals.into_iter().collect::<Vec<_>>(),
            vec![Rat::from_int(-1)]
        );
        let mut w = vec![Rat::zero(); 5];
        w[2] = Rat::new(7, 3);
        let t = t.with_weights(w).unwrap();
        let single =
            brute_all_permutation_perimeters(&t, PointSet::singleton(Point(2)), 0).unwrap();
        assert_eq!(single.into_iter().collect::<Vec<_>>(), vec![Rat::new(7, 3)]);
    }

    #[test]
    fn corrupted_table_can_break_invariance() {
        // 0-1 far apart while both are close to 2: not ultrametric
        let table = DistanceTable::from_fn(3, |a, b| match (a.0, b.0) {
            (0, 1) => Rat::from_int(5),
            _ => Rat::zero(),
        });
        let t = UltraTriple::from_parts_unchecked(
            vec!["a".into(), "b".into(), "c".into()],
            vec![Rat::zero(); 3],
            table,
        )
        .unwrap();
        let vals = brute_all_permutation_perimeters(&t, t.ground(), 1).unwrap();
        assert!(vals.len() > 1);
    }

    #[test]
    fn rational_fallback_path() {
        let huge = Rat::from_bigints(BigInt::one(), BigInt::one() << 90).unwrap();
        let t = neg_nu2(&[0, 1, 2]);
        let w = vec![huge.clone(), Rat::zero(), Rat::zero()];
        let t = t.with_weights(w).unwrap();
        assert!(integer_scale(&t).is_none());
        let res = brute_max_perimeter(&t, 1, 0).unwrap();
        assert_eq!(res.value, huge);
    }

    #[test]
    fn caps_are_errors() {
        let t = neg_nu2(&(0..17).collect::<Vec<_>>());
        assert!(matches!(
            brute_max_perimeter(&t, 2, 0),
            Err(Error::SizeCap { .. })
        ));
        let nine = PointSet::full(9);
        assert!(matches!(
            brute_all_permutation_perimeters(&t, nine, 0),
            Err(Error::SizeCap { .. })
        ));
    }
}
