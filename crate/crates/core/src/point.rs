use std::fmt;

/// Index of a point within its [`UltraTriple`](crate::UltraTriple).
///
/// Points are ordered by their position in the triple's point list; that
/// order is the canonical one used for tie-breaking and canonical orderings.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Point(pub usize);

impl Point {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Largest ground set a [`PointSet`] can address.
pub const MAX_POINTS: usize = 64;

/// A subset of a ground set of at most 64 points, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const fn empty() -> Self {
        PointSet(0)
    }

    /// `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_POINTS);
        if n == MAX_POINTS {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub const fn from_bits(bits: u64) -> Self {
        PointSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(p: Point) -> Self {
        PointSet(1u64 << p.0)
    }

    pub fn contains(self, p: Point) -> bool {
        p.0 < MAX_POINTS && self.0 & (1u64 << p.0) != 0
    }

    pub fn insert(&mut self, p: Point) {
        self.0 |= 1u64 << p.0;
    }

    pub fn remove(&mut self, p: Point) {
        self.0 &= !(1u64 << p.0);
    }

    pub fn with(self, p: Point) -> Self {
        PointSet(self.0 | (1u64 << p.0))
    }

    pub fn without(self, p: Point) -> Self {
        PointSet(self.0 & !(1u64 << p.0))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<Point> {
        (self.0 != 0).then(|| Point(self.0.trailing_zeros() as usize))
    }

    /// Members in increasing index order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    pub fn to_vec(self) -> Vec<Point> {
        self.iter().collect()
    }

    /// All `k`-subsets of `self`, in increasing order of their bitmask.
    pub fn subsets_of_size(self, k: usize) -> SubsetsOfSize {
        SubsetsOfSize::new(self, k)
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|p| p.0)).finish()
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        let mut s = PointSet::empty();
        for p in iter {
            s.insert(p);
        }
        s
    }
}

impl<'a> FromIterator<&'a Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = &'a Point>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl IntoIterator for PointSet {
    type Item = Point;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(Point(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Enumerates the `k`-subsets of a base set by walking `k`-subsets of
/// `{0..|base|}` in colexicographic order (Gosper's hack) and scattering the
/// bits onto the base set's members.
pub struct SubsetsOfSize {
    members: Vec<Point>,
    current: Option<u128>,
    limit: u128,
}

impl SubsetsOfSize {
    fn new(base: PointSet, k: usize) -> Self {
        let members = base.to_vec();
        let n = members.len();
        let current = if k > n { None } else { Some((1u128 << k) - 1) };
        SubsetsOfSize {
            members,
            current,
            limit: 1u128 << n,
        }
    }
}

impl Iterator for SubsetsOfSize {
    type Item = PointSet;

    fn next(&mut self) -> Option<PointSet> {
        let c = self.current?;
        if c >= self.limit && c != 0 {
            self.current = None;
            return None;
        }
        let mut out = PointSet::empty();
        let mut bits = c;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out.insert(self.members[i]);
            bits &= bits - 1;
        }
        self.current = if c == 0 {
            None
        } else {
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            let next = (((ripple ^ c) >> 2) / low) | ripple;
            Some(next)
        };
        Some(out)
    }
}
