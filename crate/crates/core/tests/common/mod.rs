//! Shared fixtures for the integration suites.

// Each test binary compiles this module and uses its own subset.
#![allow(dead_code)]

use redblue::*;

/// Fan-in-`n` star: sources `s0..s{n-1}`, one sink `t`.
pub fn star(n: usize) -> Dag {
    let pairs: Vec<(String, String)> = (0..n).map(|i| (format!("s{i}"), "t".to_owned())).collect();
    Dag::from_pairs(&pairs).unwrap()
}

/// Two fan-in-`n` gadgets whose input sets overlap in exactly one source.
pub fn two_gadgets_sharing_source(n: usize) -> Dag {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for i in 0..n - 1 {
        pairs.push((format!("a{i}"), "t1".into()));
    }
    pairs.push(("shared".into(), "t1".into()));
    pairs.push(("shared".into(), "t2".into()));
    for i in 0..n - 1 {
        pairs.push((format!("b{i}"), "t2".into()));
    }
    Dag::from_pairs(&pairs).unwrap()
}

/// The running 2x4 sparse matrix-vector example.
pub fn matrix_example() -> Dag {
    Dag::from_pairs(&[
        ("x1", "y1"),
        ("x2", "y1"),
        ("x3", "y1"),
        ("x3", "y2"),
        ("x4", "y2"),
    ])
    .unwrap()
}

/// Random one-level instance with at most `max_edges` edges and few enough
/// nodes for the state-space solver.
pub fn random_one_level(rng: &mut SplitMix64, max_edges: usize) -> Dag {
    let sources = 1 + rng.below(4) as usize;
    let sinks = 1 + rng.below(4) as usize;
    let cap = (sources * sinks).min(max_edges);
    let edges = 1 + rng.below(cap as u64) as usize;
    instances::random_bipartite(rng, sources, sinks, edges).unwrap()
}

/// Random Hamiltonian path over a conflict graph.
pub fn random_path(rng: &mut SplitMix64, cg: &ConflictGraph) -> HamPath {
    let mut order: Vec<EdgeId> = cg.vertices().collect();
    let mut raw: Vec<u32> = order.iter().map(|e| e.0).collect();
    rng.shuffle(&mut raw);
    order = raw.into_iter().map(EdgeId).collect();
    HamPath::new(cg, order).unwrap()
}

/// All non-isomorphic simple graphs on `n` vertices, by canonicalizing every
/// labeled edge mask under vertex permutation.
pub fn non_isomorphic_graphs(n: usize) -> Vec<SimpleGraph> {
    let pair_count = n * (n - 1) / 2;
    let pairs: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                v.push((a, b));
            }
        }
        v
    };
    let pair_bit = |a: usize, b: usize| -> usize {
        pairs
            .iter()
            .position(|&p| p == (a.min(b), a.max(b)))
            .unwrap()
    };
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    heap_permutations(&mut idx, n, &mut perms);

    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pair_count) {
        let mut canon = u64::MAX;
        for perm in &perms {
            let mut image = 0u64;
            for (bit, &(a, b)) in pairs.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    image |= 1 << pair_bit(perm[a], perm[b]);
                }
            }
            canon = canon.min(image);
        }
        if seen.insert(canon) {
            out.push(SimpleGraph::from_edge_mask(n, canon));
        }
    }
    out
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
