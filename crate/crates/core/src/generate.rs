//! Random instances for property testing and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::perimeter::MonotoneFamily;
use crate::rat::Rat;
use crate::triple::{DistanceTable, MonotoneTable, UltraTriple};

/// Knobs for [`random_triple`].
#[derive(Clone, Debug)]
pub struct TripleParams {
    pub n: usize,
    /// Merge heights are drawn as `numerator / denominator` with the
    /// numerator in this range.
    pub height_range: (i64, i64),
    pub denominator: i64,
    /// Chance, in percent, that a merge reuses the previous height.
    pub tie_percent: u32,
    pub weight_range: (i64, i64),
}

impl Default for TripleParams {
    fn default() -> Self {
        TripleParams {
            n: 6,
            height_range: (-6, 6),
            denominator: 2,
            tie_percent: 30,
            weight_range: (-2, 2),
        }
    }
}

/// Draws a random ultra triple from a random dendrogram: clusters are merged
/// in random order at non-decreasing heights, and two points are at the
/// height of the merge that first joins them.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R, params: &TripleParams) -> UltraTriple {
    let n = params.n;
    let (lo, hi) = params.height_range;
    let mut heights: Vec<i64> = (1..n).map(|_| rng.gen_range(lo..=hi)).collect();
    heights.sort_unstable();
    for i in 1..heights.len() {
        if rng.gen_ratio(params.tie_percent.min(100), 100) {
            heights[i] = heights[i - 1];
        }
    }

    let mut cluster: Vec<usize> = (0..n).collect();
    let mut level = vec![vec![0i64; n]; n];
    for &h in &heights {
        let mut ids: Vec<usize> = cluster.clone();
        ids.sort_unstable();
        ids.dedup();
        let pair: Vec<&usize> = ids.choose_multiple(rng, 2).collect();
        let (keep, gone) = (*pair[0], *pair[1]);
        for a in 0..n {
            for b in 0..n {
                if cluster[a] == keep && cluster[b] == gone {
                    level[a][b] = h;
                    level[b][a] = h;
                }
            }
        }
        for c in cluster.iter_mut() {
            if *c == gone {
                *c = keep;
            }
        }
    }

    let den = params.denominator.max(1);
    let table = DistanceTable::from_fn(n, |i, j| Rat::new(level[i.0][j.0], den));
    let (wlo, whi) = params.weight_range;
    let weights = (0..n)
        .map(|_| Rat::from_int(rng.gen_range(wlo..=whi)))
        .collect();
    let labels = (0..n).map(|i| format!("x{i}")).collect();
    UltraTriple::from_parts(labels, weights, table).expect("dendrogram distances are ultrametric")
}

/// A random non-decreasing table on `domain`, with integer steps in `0..=max_step`.
pub fn random_monotone_table<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &[Rat],
    max_step: i64,
) -> MonotoneTable {
    let mut keys = domain.to_vec();
    keys.sort();
    keys.dedup();
    let mut v = Rat::from_int(rng.gen_range(-max_step..=max_step));
    let entries: Vec<(Rat, Rat)> = keys
        .into_iter()
        .map(|d| {
            v += Rat::from_int(rng.gen_range(0..=max_step));
            (d, v.clone())
        })
        .collect();
    MonotoneTable::new_unchecked(entries)
}

/// A random monotone family of the given depth on the occurring distances of `t`.
pub fn random_family<R: Rng + ?Sized>(
    rng: &mut R,
    t: &UltraTriple,
    depth: usize,
    max_step: i64,
) -> Result<MonotoneFamily> {
    let domain: Vec<Rat> = t.table().occurring_values().into_iter().collect();
    let tables = (0..depth)
        .map(|_| random_monotone_table(rng, &domain, max_step))
        .collect();
    MonotoneFamily::new(tables)
}
