//! Ultra triples: a finite ground set with weights and an ultrametric,
//! possibly negative, distance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::point::{Point, PointSet, MAX_POINTS};
use crate::rat::Rat;

/// Symmetric distance table over `n` points, diagonal excluded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistanceTable {
    n: usize,
    // dense n*n, entries (i, i) hold zero and are never read
    values: Vec<Rat>,
}

impl DistanceTable {
    /// Builds a table from a function on unordered pairs `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(Point, Point) -> Rat) -> Self {
        let mut values = vec![Rat::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(Point(i), Point(j));
                values[i * n + j] = v.clone();
                values[j * n + i] = v;
            }
        }
        DistanceTable { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Distance between distinct points. The diagonal is not part of the
    /// domain; asking for it is a logic error.
    pub fn get(&self, a: Point, b: Point) -> &Rat {
        debug_assert!(a != b, "diagonal distance requested");
        &self.values[a.0 * self.n + b.0]
    }

    /// Every distinct value occurring off the diagonal.
    pub fn occurring_values(&self) -> BTreeSet<Rat> {
        let mut out = BTreeSet::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.insert(self.values[i * self.n + j].clone());
            }
        }
        out
    }
}

/// One failed instance of `d(a,b) <= max(d(a,c), d(b,c))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d({a},{b}) = {} > {} = max(d({a},{c}), d({b},{c}))",
            self.lhs,
            self.rhs,
            a = self.a,
            b = self.b,
            c = self.c
        )
    }
}

/// Lists every unordered triple violating the ultrametric inequality.
///
/// A triple fails exactly when its largest side is strictly larger than the
/// other two; the violation is reported in the orientation whose left-hand
/// side is that largest side.
pub fn check_ultrametric(table: &DistanceTable) -> Vec<Violation> {
    let n = table.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (pi, pj, pk) = (Point(i), Point(j), Point(k));
                let sides = [
                    (pi, pj, pk, table.get(pi, pj)),
                    (pi, pk, pj, table.get(pi, pk)),
                    (pj, pk, pi, table.get(pj, pk)),
                ];
                for (idx, &(a, b, c, lhs)) in sides.iter().enumerate() {
                    let others = sides
                        .iter()
                        .enumerate()
                        .filter(|(o, _)| *o != idx)
                        .map(|(_, s)| s.3);
                    let rhs = others.max().unwrap();
                    if lhs > rhs {
                        out.push(Violation {
                            a,
                            b,
                            c,
                            lhs: lhs.clone(),
                            rhs: rhs.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// A finite ultra triple `(E, w, d)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UltraTriple {
    labels: Vec<String>,
    index: BTreeMap<String, Point>,
    weights: Vec<Rat>,
    distances: DistanceTable,
}

/// Validates and assembles an ultra triple.
///
/// `points` fixes the canonical point order. Each unordered off-diagonal pair
/// needs exactly one entry in `distance_entries`, in either orientation.
pub fn build_triple(
    points: &[String],
    weights: &BTreeMap<String, Rat>,
    distance_entries: &[(String, String, Rat)],
) -> Result<UltraTriple> {
    let t = assemble(points, weights, distance_entries)?;
    let violations = check_ultrametric(&t.distances);
    if !violations.is_empty() {
        return Err(Error::NotUltrametric(violations));
    }
    Ok(t)
}

fn assemble(
    points: &[String],
    weights: &BTreeMap<String, Rat>,
    distance_entries: &[(String, String, Rat)],
) -> Result<UltraTriple> {
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints {
            n: points.len(),
            max: MAX_POINTS,
        });
    }
    let mut index = BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        if index.insert(p.clone(), Point(i)).is_some() {
            return Err(Error::DuplicatePoint(p.clone()));
        }
    }
    for key in weights.keys() {
        if !index.contains_key(key) {
            return Err(Error::UnknownPoint(key.clone()));
        }
    }
    let weights = points
        .iter()
        .map(|p| {
            weights
                .get(p)
                .cloned()
                .ok_or_else(|| Error::MissingWeight(p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = points.len();
    let mut slots: Vec<Option<Rat>> = vec![None; n * n];
    for (a, b, v) in distance_entries {
        let pa = *index.get(a).ok_or_else(|| Error::UnknownPoint(a.clone()))?;
        let pb = *index.get(b).ok_or_else(|| Error::UnknownPoint(b.clone()))?;
        if pa == pb {
            return Err(Error::Diagonal(a.clone()));
        }
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        let slot = &mut slots[lo.0 * n + hi.0];
        if slot.is_some() {
            return Err(Error::DuplicatePair(a.clone(), b.clone()));
        }
        *slot = Some(v.clone());
    }
    for i in 0..n {
        for j in i + 1..n {
            if slots[i * n + j].is_none() {
                return Err(Error::MissingPair(points[i].clone(), points[j].clone()));
            }
        }
    }
    let distances = DistanceTable::from_fn(n, |a, b| {
        slots[a.0 * n + b.0].take().expect("checked above")
    });
    Ok(UltraTriple {
        labels: points.to_vec(),
        index,
        weights,
        distances,
    })
}

impl UltraTriple {
    /// Assembles a triple from already-indexed parts, checking the
    /// ultrametric inequality.
    pub fn from_parts(
        labels: Vec<String>,
        weights: Vec<Rat>,
        distances: DistanceTable,
    ) -> Result<Self> {
        let t = Self::from_parts_unchecked(labels, weights, distances)?;
        let violations = check_ultrametric(&t.distances);
        if violations.is_empty() {
            Ok(t)
        } else {
            Err(Error::NotUltrametric(violations))
        }
    }

    /// Like [`UltraTriple::from_parts`] but skips the ultrametric check. Only
    /// useful for exercising checkers on deliberately broken tables.
    pub fn from_parts_unchecked(
        labels: Vec<String>,
        weights: Vec<Rat>,
        distances: DistanceTable,
    ) -> Result<Self> {
        let n = labels.len();
        if n > MAX_POINTS {
            return Err(Error::TooManyPoints { n, max: MAX_POINTS });
        }
        if weights.len() != n || distances.len() != n {
            return Err(Error::SizeMismatch(format!(
                "{n} labels, {} weights, {} table rows",
                weights.len(),
                distances.len()
            )));
        }
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), Point(i)).is_some() {
                return Err(Error::DuplicatePoint(l.clone()));
            }
        }
        Ok(UltraTriple {
            labels,
            index,
            weights,
            distances,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = Point> {
        (0..self.labels.len()).map(Point)
    }

    pub fn ground(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: Point) -> &str {
        &self.labels[p.0]
    }

    pub fn point(&self, label: &str) -> Result<Point> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    /// Resolves a list of labels to a set, rejecting unknown labels.
    pub fn set_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<PointSet> {
        labels.iter().map(|l| self.point(l.as_ref())).collect()
    }

    pub fn seq_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<Point>> {
        labels.iter().map(|l| self.point(l.as_ref())).collect()
    }

    pub fn weight(&self, p: Point) -> &Rat {
        &self.weights[p.0]
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    /// `d(a, b)` for distinct points; panics in debug builds on the diagonal.
    pub fn d(&self, a: Point, b: Point) -> &Rat {
        self.distances.get(a, b)
    }

    pub fn table(&self) -> &DistanceTable {
        &self.distances
    }

    pub(crate) fn check_point(&self, p: Point) -> Result<()> {
        if p.0 < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownPoint(p.to_string()))
        }
    }

    pub(crate) fn check_set(&self, s: PointSet) -> Result<()> {
        match s.difference(self.ground()).first() {
            None => Ok(()),
            Some(p) => Err(Error::UnknownPoint(p.to_string())),
        }
    }

    /// Checked distance lookup by label.
    pub fn distance(&self, a: &str, b: &str) -> Result<Rat> {
        let pa = self.point(a)?;
        let pb = self.point(b)?;
        if pa == pb {
            return Err(Error::Diagonal(a.to_string()));
        }
        Ok(self.d(pa, pb).clone())
    }

    /// Same triple with every distance replaced by `g(d)`.
    pub fn transform_distance(&self, g: &MonotoneTable) -> Result<UltraTriple> {
        let occurring = self.distances.occurring_values();
        let mut images = Vec::with_capacity(occurring.len());
        for v in &occurring {
            images.push((v, g.eval(v)?));
        }
        for w in images.windows(2) {
            if w[1].1 < w[0].1 {
                return Err(Error::NotMonotone {
                    lo: w[0].0.to_string(),
                    hi: w[1].0.to_string(),
                });
            }
        }
        let table = DistanceTable::from_fn(self.len(), |a, b| {
            g.eval(self.d(a, b)).expect("defined on occurring values")
        });
        UltraTriple::from_parts(self.labels.clone(), self.weights.clone(), table)
    }

    /// Same points and distances, new weights.
    pub fn with_weights(&self, weights: Vec<Rat>) -> Result<UltraTriple> {
        UltraTriple::from_parts_unchecked(self.labels.clone(), weights, self.distances.clone())
    }
}

/// A function on finitely many rationals, given by its value table.
///
/// Used both for distance transforms and as one level `f_j` of a
/// [`MonotoneFamily`](crate::MonotoneFamily). Construction through
/// [`MonotoneTable::new`] rejects tables that decrease anywhere.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MonotoneTable(BTreeMap<Rat, Rat>);

impl MonotoneTable {
    pub fn new(entries: impl IntoIterator<Item = (Rat, Rat)>) -> Result<Self> {
        let t = Self::new_unchecked(entries);
        t.check_monotone()?;
        Ok(t)
    }

    /// Skips the monotonicity check; needed to build counterexamples.
    pub fn new_unchecked(entries: impl IntoIterator<Item = (Rat, Rat)>) -> Self {
        MonotoneTable(entries.into_iter().collect())
    }

    pub fn identity_on<'a>(domain: impl IntoIterator<Item = &'a Rat>) -> Self {
        MonotoneTable(domain.into_iter().map(|d| (d.clone(), d.clone())).collect())
    }

    pub fn constant_on<'a>(domain: impl IntoIterator<Item = &'a Rat>, c: &Rat) -> Self {
        MonotoneTable(domain.into_iter().map(|d| (d.clone(), c.clone())).collect())
    }

    pub fn check_monotone(&self) -> Result<()> {
        let entries: Vec<_> = self.0.iter().collect();
        for w in entries.windows(2) {
            if w[1].1 < w[0].1 {
                return Err(Error::NotMonotone {
                    lo: w[0].0.to_string(),
                    hi: w[1].0.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_monotone(&self) -> bool {
        self.check_monotone().is_ok()
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat> {
        self.0
            .get(x)
            .cloned()
            .ok_or_else(|| Error::Undefined(x.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Rat> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn zero_weights(xs: &[&str]) -> BTreeMap<String, Rat> {
        xs.iter().map(|s| (s.to_string(), Rat::zero())).collect()
    }

    fn entries(es: &[(&str, &str, i64)]) -> Vec<(String, String, Rat)> {
        es.iter()
            .map(|(a, b, v)| (a.to_string(), b.to_string(), Rat::from_int(*v)))
            .collect()
    }

    #[test]
    fn constant_distance_is_valid() {
        let pts = ["a", "b", "c"];
        let t = build_triple(
            &labels(&pts),
            &zero_weights(&pts),
            &entries(&[("a", "b", 0), ("a", "c", 0), ("b", "c", 0)]),
        )
        .unwrap();
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn neg_nu2_on_three_points_is_valid() {
        let pts = ["0", "1", "2"];
        let t = build_triple(
            &labels(&pts),
            &zero_weights(&pts),
            &entries(&[("0", "1", 0), ("0", "2", -1), ("1", "2", 0)]),
        )
        .unwrap();
        assert_eq!(t.distance("2", "0").unwrap(), Rat::from_int(-1));
    }

    #[test]
    fn violation_is_reported_in_its_failing_orientation() {
        let pts = ["a", "b", "c"];
        let err = build_triple(
            &labels(&pts),
            &zero_weights(&pts),
            &entries(&[("a", "b", 1), ("a", "c", 0), ("b", "c", 0)]),
        )
        .unwrap_err();
        match err {
            Error::NotUltrametric(vs) => {
                assert_eq!(vs.len(), 1);
                let v = &vs[0];
                assert_eq!((v.a, v.b, v.c), (Point(0), Point(1), Point(2)));
                assert_eq!(v.lhs, Rat::from_int(1));
                assert_eq!(v.rhs, Rat::zero());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_entries() {
        let pts = ["a", "b", "c"];
        let w = zero_weights(&pts);
        let missing = build_triple(&labels(&pts), &w, &entries(&[("a", "b", 0), ("a", "c", 0)]));
        assert!(matches!(missing, Err(Error::MissingPair(..))));
        let dup = build_triple(
            &labels(&pts),
            &w,
            &entries(&[("a", "b", 0), ("b", "a", 0), ("a", "c", 0), ("b", "c", 0)]),
        );
        assert!(matches!(dup, Err(Error::DuplicatePair(..))));
        let unknown = build_triple(
            &labels(&pts),
            &w,
            &entries(&[("a", "b", 0), ("a", "z", 0), ("b", "c", 0)]),
        );
        assert!(matches!(unknown, Err(Error::UnknownPoint(_))));
        let diag = build_triple(
            &labels(&["a"]),
            &zero_weights(&["a"]),
            &entries(&[("a", "a", 0)]),
        );
        assert!(matches!(diag, Err(Error::Diagonal(_))));
        let no_weight = build_triple(&labels(&["a"]), &BTreeMap::new(), &[]);
        assert!(matches!(no_weight, Err(Error::MissingWeight(_))));
    }

    #[test]
    fn two_points_never_violate() {
        let table = DistanceTable::from_fn(2, |_, _| Rat::from_int(7));
        assert!(check_ultrametric(&table).is_empty());
    }

    #[test]
    fn diagonal_lookup_errors() {
        let pts = ["a", "b"];
        let t = build_triple(
            &labels(&pts),
            &zero_weights(&pts),
            &entries(&[("a", "b", 3)]),
        )
        .unwrap();
        assert!(matches!(t.distance("a", "a"), Err(Error::Diagonal(_))));
        assert!(matches!(t.distance("a", "q"), Err(Error::UnknownPoint(_))));
        assert_eq!(t.distance("a", "b").unwrap(), t.distance("b", "a").unwrap());
    }

    #[test]
    fn transform_rejects_gaps_and_decreases() {
        let pts = ["a", "b", "c"];
        let t = build_triple(
            &labels(&pts),
            &zero_weights(&pts),
            &entries(&[("a", "b", -1), ("a", "c", 0), ("b", "c", 0)]),
        )
        .unwrap();
        let partial = MonotoneTable::new([(Rat::zero(), Rat::zero())]).unwrap();
        assert!(matches!(
            t.transform_distance(&partial),
            Err(Error::Undefined(_))
        ));
        let decreasing = MonotoneTable::new_unchecked([
            (Rat::from_int(-1), Rat::one()),
            (Rat::zero(), Rat::zero()),
        ]);
        assert!(matches!(
            t.transform_distance(&decreasing),
            Err(Error::NotMonotone { .. })
        ));
        assert!(
            MonotoneTable::new([(Rat::from_int(-1), Rat::one()), (Rat::zero(), Rat::zero())])
                .is_err()
        );
    }
}
