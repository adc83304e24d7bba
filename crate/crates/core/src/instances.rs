//! Deterministic random instance generation.
//!
//! All randomness flows from one explicit seed through a local SplitMix64;
//! identical seeds give byte-identical instances regardless of platform or
//! dependency versions.

use crate::dag::Dag;
use crate::error::{Error, Result};

/// SplitMix64 PRNG.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n`. The modulo bias is irrelevant at our scales.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Bernoulli draw with probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        (self.next_u64() >> 11) as f64 / ((1u64 << 53) as f64) < p
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Random one-level bipartite DAG with exactly `edges` edges. Sources are
/// named `x{j}`, sinks `y{i}`; nodes without edges are not emitted.
pub fn random_bipartite(
    rng: &mut SplitMix64,
    sources: usize,
    sinks: usize,
    edges: usize,
) -> Result<Dag> {
    if sources == 0 || sinks == 0 {
        return Err(Error::BadParameters {
            reason: "need at least one source and one sink".into(),
        });
    }
    if edges == 0 || edges > sources * sinks {
        return Err(Error::BadParameters {
            reason: format!("edge count {edges} outside 1..={}", sources * sinks),
        });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(sources * sinks);
    for j in 0..sources {
        for i in 0..sinks {
            pairs.push((j, i));
        }
    }
    rng.shuffle(&mut pairs);
    let named: Vec<(String, String)> = pairs[..edges]
        .iter()
        .map(|&(j, i)| (format!("x{j}"), format!("y{i}")))
        .collect();
    Dag::from_pairs(&named)
}

/// Random one-level bipartite DAG including each possible edge independently
/// with probability `density`.
pub fn random_bipartite_density(
    rng: &mut SplitMix64,
    sources: usize,
    sinks: usize,
    density: f64,
) -> Result<Dag> {
    if sources == 0 || sinks == 0 {
        return Err(Error::BadParameters {
            reason: "need at least one source and one sink".into(),
        });
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::BadParameters {
            reason: format!("density {density} outside [0, 1]"),
        });
    }
    let mut named: Vec<(String, String)> = Vec::new();
    for j in 0..sources {
        for i in 0..sinks {
            if rng.chance(density) {
                named.push((format!("x{j}"), format!("y{i}")));
            }
        }
    }
    Dag::from_pairs(&named)
}

/// Random leveled DAG with the given level-set sizes. Every node beyond the
/// first set draws at least one parent from the previous set, so the longest
/// path places each node exactly on its designed level; `edges_per_level[i]`
/// is the target edge count between sets `i` and `i + 1` (clamped to what is
/// forced and what fits).
pub fn random_leveled(
    rng: &mut SplitMix64,
    level_sizes: &[usize],
    edges_per_level: &[usize],
) -> Result<Dag> {
    if level_sizes.len() < 2 {
        return Err(Error::BadParameters {
            reason: "need at least two level sets".into(),
        });
    }
    if level_sizes.contains(&0) {
        return Err(Error::BadParameters {
            reason: "level sets must be nonempty".into(),
        });
    }
    if edges_per_level.len() != level_sizes.len() - 1 {
        return Err(Error::BadParameters {
            reason: format!(
                "{} edge targets for {} levels",
                edges_per_level.len(),
                level_sizes.len() - 1
            ),
        });
    }
    let name = |level: usize, idx: usize| format!("n{level}_{idx}");
    let mut named: Vec<(String, String)> = Vec::new();
    for level in 1..level_sizes.len() {
        let above = level_sizes[level - 1];
        let here = level_sizes[level];
        let mut present: Vec<(usize, usize)> = Vec::new();
        for idx in 0..here {
            let parent = rng.below(above as u64) as usize;
            present.push((parent, idx));
        }
        let target = edges_per_level[level - 1].clamp(present.len(), above * here);
        let mut extras: Vec<(usize, usize)> = Vec::new();
        for p in 0..above {
            for c in 0..here {
                if !present.contains(&(p, c)) {
                    extras.push((p, c));
                }
            }
        }
        rng.shuffle(&mut extras);
        present.extend(extras.into_iter().take(target - present.len()));
        for (p, c) in present {
            named.push((name(level - 1, p), name(level, c)));
        }
    }
    Dag::from_pairs(&named)
}
