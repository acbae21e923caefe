//! Integer point sets with p-adic distances.
//!
//! The distance used throughout is `d(a, b) = -max(h, nu_p(a - b))`. With
//! `h = 0` this is plain `-nu_p`, the space on which the witness-point and
//! profile-realization constructions below operate.
//!
//! Note that truncation by `max` makes all distances at most `-h`, i.e. it
//! caps how *far* points can be; the classical truncated valuation
//! `min(h, nu_p)` would instead cap how *close* they can be. Both are
//! ultrametric, and this module implements the `max` form.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::triple::{DistanceTable, UltraTriple};

/// Deterministic trial-division primality test; inputs are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exponent of the largest power of `p` dividing `n`.
pub fn nu_p(n: i128, p: u64) -> Result<u32> {
    require_prime(p)?;
    if n == 0 {
        return Err(Error::ZeroValuation);
    }
    let p = p as i128;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// `nu_p(k!)` by Legendre's formula, `sum_{i >= 1} floor(k / p^i)`.
pub fn legendre_nu_factorial(k: u64, p: u64) -> u64 {
    assert!(p >= 2);
    let mut total = 0;
    let mut q = k / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// A finite set of integers with weights, a prime and a truncation level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PadicSpec {
    pub p: u64,
    pub h: u32,
    pub elements: Vec<i64>,
    /// Missing elements weigh zero.
    pub weights: BTreeMap<i64, Rat>,
}

impl PadicSpec {
    pub fn new(p: u64, h: u32, elements: Vec<i64>) -> Self {
        PadicSpec {
            p,
            h,
            elements,
            weights: BTreeMap::new(),
        }
    }

    pub fn with_weights(mut self, weights: BTreeMap<i64, Rat>) -> Self {
        self.weights = weights;
        self
    }
}

/// `-max(h, nu_p(a - b))` for `a != b`.
pub fn padic_distance(p: u64, h: u32, a: i64, b: i64) -> Result<Rat> {
    let nu = nu_p(a as i128 - b as i128, p)?;
    Ok(Rat::from_int(-(nu.max(h) as i64)))
}

/// The ultra triple on `spec.elements`, labelled by their decimal form and
/// ordered as listed.
pub fn padic_triple(spec: &PadicSpec) -> Result<UltraTriple> {
    require_prime(spec.p)?;
    let mut seen = std::collections::BTreeSet::new();
    for &e in &spec.elements {
        if !seen.insert(e) {
            return Err(Error::DuplicatePoint(e.to_string()));
        }
    }
    if let Some(e) = spec.weights.keys().find(|e| !seen.contains(e)) {
        return Err(Error::UnknownPoint(e.to_string()));
    }
    let labels: Vec<String> = spec.elements.iter().map(|e| e.to_string()).collect();
    let weights = spec
        .elements
        .iter()
        .map(|e| spec.weights.get(e).cloned().unwrap_or_else(Rat::zero))
        .collect();
    let els = &spec.elements;
    let table = DistanceTable::from_fn(els.len(), |a, b| {
        padic_distance(spec.p, spec.h, els[a.0], els[b.0]).expect("distinct elements, prime p")
    });
    UltraTriple::from_parts(labels, weights, table)
}

fn pow(p: u64, k: u32) -> Result<i128> {
    (p as i128)
        .checked_pow(k)
        .filter(|v| *v <= i64::MAX as i128)
        .ok_or_else(|| Error::NoWitness(format!("{p}^{k} overflows")))
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::NoWitness(format!("{v} does not fit in i64")))
}

/// A point `c` with `d(a, c) = ell` and `d(b, c) = d(a, b)` under `-nu_p`.
///
/// Requires `ell <= d(a, b)`. When `ell` is strictly smaller, `c = a + p^-ell`.
/// When they are equal, `c = a + s * p^-ell` where `s` is the least positive
/// residue that is neither `0` nor the unit part of `b - a` modulo `p`; this
/// needs `p >= 3`.
pub fn witness_point(p: u64, a: i64, b: i64, ell: i64) -> Result<i64> {
    require_prime(p)?;
    if a == b {
        return Err(Error::NoWitness("a and b coincide".into()));
    }
    let diff = b as i128 - a as i128;
    let nu = nu_p(diff, p)? as i64;
    if ell > -nu {
        return Err(Error::NoWitness(format!(
            "ell = {ell} exceeds d(a, b) = {}",
            -nu
        )));
    }
    let k = u32::try_from(-ell).map_err(|_| Error::NoWitness(format!("ell = {ell} too small")))?;
    let scale = pow(p, k)?;
    let s: i128 = if (k as i64) > nu {
        1
    } else {
        if p == 2 {
            return Err(Error::NoWitness(
                "p = 2 leaves no residue besides 0 and the unit of b - a".into(),
            ));
        }
        let unit = (diff / scale).rem_euclid(p as i128);
        if unit == 1 {
            2
        } else {
            1
        }
    };
    to_i64(a as i128 + s * scale)
}

/// Integer configuration realizing a distance profile from `x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Realization {
    pub x: i64,
    /// `points[j]` sits at distance `profile[j]` from `x`. The last point is
    /// the anchor `y` with `d(x, y) = d_n`, and every other point is at
    /// distance exactly `d_n` from `y`.
    pub points: Vec<i64>,
}

impl Realization {
    pub fn anchor(&self) -> i64 {
        *self.points.last().expect("non-empty")
    }
}

/// Realizes a sorted profile of non-positive integers under `-nu_p`, `p > 2`.
///
/// `x = 0` and the anchor is `y = p^-d_n`. A value `d_j < d_n` gets
/// `u * p^-d_j` with `u` running over units `1, 2, ...` (skipping multiples of
/// `p`); a repeat of `d_n` gets `s * p^-d_n` with `s` running over `2, 3, ...`
/// avoiding residues 0 and 1, so it stays at distance `d_n` from `y`.
pub fn realize_profile(p: u64, profile: &[i64]) -> Result<Realization> {
    require_prime(p)?;
    if p == 2 {
        return Err(Error::NoWitness("profile realization needs p > 2".into()));
    }
    let Some(&top) = profile.last() else {
        return Err(Error::InvalidProfile("empty profile".into()));
    };
    if let Some(v) = profile.iter().find(|v| **v > 0) {
        return Err(Error::InvalidProfile(format!("positive value {v}")));
    }
    if profile.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidProfile("values not sorted".into()));
    }
    let pi = p as i128;
    let mut next_unit: BTreeMap<i64, i128> = BTreeMap::new();
    let mut next_top_mult: i128 = 2;
    let mut points = Vec::with_capacity(profile.len());
    for &d in &profile[..profile.len() - 1] {
        let scale = pow(p, (-d) as u32)?;
        let mult = if d < top {
            let u = next_unit.entry(d).or_insert(1);
            while *u % pi == 0 {
                *u += 1;
            }
            let m = *u;
            *u += 1;
            m
        } else {
            while matches!(next_top_mult.rem_euclid(pi), 0 | 1) {
                next_top_mult += 1;
            }
            let m = next_top_mult;
            next_top_mult += 1;
            m
        };
        points
            .push(to_i64(mult.checked_mul(scale).ok_or_else(|| {
                Error::NoWitness("multiplier overflows".into())
            })?)?);
    }
    points.push(to_i64(pow(p, (-top) as u32)?)?);
    Ok(Realization { x: 0, points })
}
