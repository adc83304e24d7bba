//! Computational DAGs, memory layouts, the cache-line transform, and level
//! decomposition.
//!
//! A [`Dag`] models one algorithm: sources are the inputs, sinks are the
//! outputs, and every edge `(v, w)` says that `w` depends on `v`. Nodes are
//! interned to dense indices so the rest of the crate can use flat vectors
//! and bitmasks.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

/// Dense node index, unique within one [`Dag`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Role of a node, derived from its degrees.
///
/// Nodes without any incident edge are tagged `Source`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Internal,
    Sink,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::Source => "source",
            NodeRole::Internal => "internal",
            NodeRole::Sink => "sink",
        }
    }
}

/// A validated computational DAG: no self-loops, no duplicate edges, acyclic.
#[derive(Debug, Clone)]
pub struct Dag {
    names: Vec<String>,
    roles: Vec<NodeRole>,
    edges: Vec<(NodeId, NodeId)>,
    in_degree: Vec<u32>,
    out_degree: Vec<u32>,
    by_name: HashMap<String, NodeId>,
}

impl Dag {
    /// Builds a DAG from node names and edges given as node indices.
    pub fn new(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Dag> {
        let n = names.len();
        let mut by_name = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), NodeId(i as u32)).is_some() {
                return Err(Error::DuplicateNode { name: name.clone() });
            }
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut in_degree = vec![0u32; n];
        let mut out_degree = vec![0u32; n];
        let mut typed = Vec::with_capacity(edges.len());
        for &(src, dst) in &edges {
            if src >= n || dst >= n {
                return Err(Error::BadParameters {
                    reason: format!("edge ({src}, {dst}) references a node outside 0..{n}"),
                });
            }
            if src == dst {
                return Err(Error::SelfLoop {
                    node: names[src].clone(),
                });
            }
            if !seen.insert((src, dst)) {
                return Err(Error::DuplicateEdge {
                    src: names[src].clone(),
                    dst: names[dst].clone(),
                });
            }
            out_degree[src] += 1;
            in_degree[dst] += 1;
            typed.push((NodeId(src as u32), NodeId(dst as u32)));
        }

        let dag = Dag {
            roles: derive_roles(&in_degree, &out_degree),
            names,
            edges: typed,
            in_degree,
            out_degree,
            by_name,
        };
        dag.check_acyclic()?;
        Ok(dag)
    }

    /// Builds a DAG from named edge pairs, interning names in first-appearance
    /// order. This is the shape produced by the edge-list text format.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Dag> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str| -> usize {
            if let Some(&i) = index.get(name) {
                return i;
            }
            let i = names.len();
            names.push(name.to_owned());
            index.insert(name.to_owned(), i);
            i
        };
        let mut edges = Vec::with_capacity(pairs.len());
        for (src, dst) in pairs {
            let s = intern(src.as_ref());
            let d = intern(dst.as_ref());
            edges.push((s, d));
        }
        Dag::new(names, edges)
    }

    fn check_acyclic(&self) -> Result<()> {
        // Kahn's algorithm; any node left unprocessed sits on a cycle.
        let n = self.node_count();
        let mut indeg = self.in_degree.clone();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            succ[u.index()].push(v.index());
        }
        let mut done = 0;
        while let Some(v) = queue.pop() {
            done += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        if done != n {
            let witness = (0..n).find(|&v| indeg[v] > 0).expect("cycle witness");
            return Err(Error::Cycle {
                node: self.names[witness].clone(),
            });
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len()).map(|i| NodeId(i as u32))
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.index()]
    }

    pub fn role(&self, v: NodeId) -> NodeRole {
        self.roles[v.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (NodeId, NodeId) {
        self.edges[index]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_degree[v.index()] as usize
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_degree[v.index()] as usize
    }

    pub fn sources(&self) -> Vec<NodeId> {
        self.node_ids()
            .filter(|&v| self.role(v) == NodeRole::Source)
            .collect()
    }

    pub fn sinks(&self) -> Vec<NodeId> {
        self.node_ids()
            .filter(|&v| self.role(v) == NodeRole::Sink)
            .collect()
    }

    /// True when every edge runs from an in-degree-0 node to an out-degree-0
    /// node, i.e. the DAG is a single bipartite level.
    pub fn is_one_level(&self) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| self.in_degree(u) == 0 && self.out_degree(v) == 0)
    }

    /// JSON export: `{"nodes":[{"id","name","role"}],"edges":[[src,dst]]}`.
    pub fn to_json(&self) -> String {
        let nodes: Vec<serde_json::Value> = self
            .node_ids()
            .map(|v| {
                serde_json::json!({
                    "id": v.0,
                    "name": self.name(v),
                    "role": self.role(v).as_str(),
                })
            })
            .collect();
        let edges: Vec<[u32; 2]> = self.edges.iter().map(|&(u, v)| [u.0, v.0]).collect();
        serde_json::json!({ "nodes": nodes, "edges": edges }).to_string()
    }

    /// DOT export for visualization; sinks are drawn with a double border.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dag {\n  rankdir=TB;\n");
        for v in self.node_ids() {
            let shape = match self.role(v) {
                NodeRole::Source => "ellipse",
                NodeRole::Internal => "box",
                NodeRole::Sink => "doublecircle",
            };
            out.push_str(&format!(
                "  n{} [label=\"{}\", shape={}];\n",
                v.0,
                self.name(v),
                shape
            ));
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  n{} -> n{};\n", u.0, v.0));
        }
        out.push_str("}\n");
        out
    }
}

fn derive_roles(in_degree: &[u32], out_degree: &[u32]) -> Vec<NodeRole> {
    in_degree
        .iter()
        .zip(out_degree)
        .map(|(&i, &o)| {
            // Nodes without edges count as unused inputs.
            if i == 0 {
                NodeRole::Source
            } else if o == 0 {
                NodeRole::Sink
            } else {
                NodeRole::Internal
            }
        })
        .collect()
}

/// A fixed word address for every node plus the cache-line size `B`.
///
/// Inputs occupy one consecutive address range, outputs another, and both
/// ranges start at a multiple of `B`.
#[derive(Debug, Clone)]
pub struct MemoryLayout {
    addresses: Vec<u64>,
    line_size: u64,
}

impl MemoryLayout {
    pub fn new(dag: &Dag, addresses: Vec<u64>, line_size: u64) -> Result<MemoryLayout> {
        if line_size == 0 {
            return Err(Error::Layout {
                reason: "line size must be positive".into(),
            });
        }
        if addresses.len() != dag.node_count() {
            return Err(Error::Layout {
                reason: format!(
                    "{} addresses for {} nodes",
                    addresses.len(),
                    dag.node_count()
                ),
            });
        }
        let distinct: HashSet<u64> = addresses.iter().copied().collect();
        if distinct.len() != addresses.len() {
            return Err(Error::Layout {
                reason: "addresses are not injective".into(),
            });
        }
        for (role, label) in [(NodeRole::Source, "inputs"), (NodeRole::Sink, "outputs")] {
            let range: Vec<u64> = dag
                .node_ids()
                .filter(|&v| dag.role(v) == role)
                .map(|v| addresses[v.index()])
                .collect();
            if range.is_empty() {
                continue;
            }
            let lo = *range.iter().min().expect("nonempty");
            let hi = *range.iter().max().expect("nonempty");
            if hi - lo + 1 != range.len() as u64 {
                return Err(Error::Layout {
                    reason: format!("{label} do not occupy consecutive addresses"),
                });
            }
            if !lo.is_multiple_of(line_size) {
                return Err(Error::Layout {
                    reason: format!("{label} start at {lo}, not aligned to {line_size}"),
                });
            }
        }
        Ok(MemoryLayout {
            addresses,
            line_size,
        })
    }

    /// Packs sources, then internal nodes, then sinks, padding only as needed
    /// to keep the source and sink ranges aligned to `B`.
    pub fn packed(dag: &Dag, line_size: u64) -> Result<MemoryLayout> {
        if line_size == 0 {
            return Err(Error::Layout {
                reason: "line size must be positive".into(),
            });
        }
        let mut addresses = vec![0u64; dag.node_count()];
        let mut next = 0u64;
        for role in [NodeRole::Source, NodeRole::Internal, NodeRole::Sink] {
            if role == NodeRole::Sink {
                next = next.div_ceil(line_size) * line_size;
            }
            for v in dag.node_ids().filter(|&v| dag.role(v) == role) {
                addresses[v.index()] = next;
                next += 1;
            }
        }
        MemoryLayout::new(dag, addresses, line_size)
    }

    pub fn line_size(&self) -> u64 {
        self.line_size
    }

    pub fn address(&self, v: NodeId) -> u64 {
        self.addresses[v.index()]
    }

    /// Index of the cache line holding `v`.
    pub fn line_of(&self, v: NodeId) -> u64 {
        self.addresses[v.index()] / self.line_size
    }

    /// Number of distinct cache lines occupied by at least one node.
    pub fn occupied_lines(&self) -> usize {
        let lines: HashSet<u64> = self.addresses.iter().map(|a| a / self.line_size).collect();
        lines.len()
    }
}

/// Rewrites a word-granular DAG into its cache-line DAG: one node per occupied
/// line, one edge per induced dependency, duplicates merged.
///
/// A layout that puts both endpoints of an edge into the same line is
/// rejected: the game cannot express an edge whose endpoints share a pebble.
pub fn transform_cache_lines(dag: &Dag, layout: &MemoryLayout) -> Result<Dag> {
    let mut lines: BTreeSet<u64> = BTreeSet::new();
    for v in dag.node_ids() {
        lines.insert(layout.line_of(v));
    }
    let line_index: BTreeMap<u64, usize> = lines.iter().enumerate().map(|(i, &l)| (l, i)).collect();

    let mut induced: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(u, v) in dag.edges() {
        let lu = layout.line_of(u);
        let lv = layout.line_of(v);
        if lu == lv {
            return Err(Error::EdgeWithinLine {
                src: dag.name(u).to_owned(),
                dst: dag.name(v).to_owned(),
                line: lu,
            });
        }
        induced.insert((line_index[&lu], line_index[&lv]));
    }

    let names: Vec<String> = lines.iter().map(|l| format!("L{l}")).collect();
    Dag::new(names, induced.into_iter().collect())
}

/// One bipartite level of a [`LeveledDag`], with a map back to base node ids.
#[derive(Debug, Clone)]
pub struct Level {
    dag: Dag,
    to_base: Vec<NodeId>,
}

impl Level {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// Base-DAG id of a local node.
    pub fn to_base(&self, local: NodeId) -> NodeId {
        self.to_base[local.index()]
    }
}

/// A DAG split into bipartite levels: level(v) is the longest path from any
/// source, and every edge spans exactly one level.
#[derive(Debug, Clone)]
pub struct LeveledDag {
    base: Dag,
    node_level: Vec<usize>,
    levels: Vec<Level>,
    k: usize,
}

impl LeveledDag {
    pub fn base(&self) -> &Dag {
        &self.base
    }

    pub fn level_of(&self, v: NodeId) -> usize {
        self.node_level[v.index()]
    }

    /// Number of level sets `k`; there are `k - 1` bipartite levels.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }
}

/// Computes the level decomposition, rejecting DAGs where some edge spans two
/// or more levels.
pub fn compute_levels(dag: &Dag) -> Result<LeveledDag> {
    let n = dag.node_count();
    let mut level = vec![0usize; n];

    // Longest path from a source, by propagating along a topological order.
    let mut indeg: Vec<u32> = (0..n)
        .map(|v| dag.in_degree(NodeId(v as u32)) as u32)
        .collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in dag.edges() {
        succ[u.index()].push(v.index());
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = queue.pop() {
        for &w in &succ[v] {
            level[w] = level[w].max(level[v] + 1);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }

    for &(u, v) in dag.edges() {
        let span = level[v.index()] - level[u.index()];
        if span != 1 {
            return Err(Error::NotLeveled {
                src: dag.name(u).to_owned(),
                dst: dag.name(v).to_owned(),
                span,
            });
        }
    }

    let k = if n == 0 {
        0
    } else {
        level.iter().max().copied().unwrap_or(0) + 1
    };
    let mut levels = Vec::new();
    for li in 0..k.saturating_sub(1) {
        let mut local_names: Vec<String> = Vec::new();
        let mut to_base: Vec<NodeId> = Vec::new();
        let mut local_of: HashMap<NodeId, usize> = HashMap::new();
        let mut local_edges: Vec<(usize, usize)> = Vec::new();
        for &(u, v) in dag.edges() {
            if level[u.index()] != li {
                continue;
            }
            let mut intern = |node: NodeId| -> usize {
                if let Some(&i) = local_of.get(&node) {
                    return i;
                }
                let i = local_names.len();
                local_names.push(dag.name(node).to_owned());
                to_base.push(node);
                local_of.insert(node, i);
                i
            };
            let lu = intern(u);
            let lv = intern(v);
            local_edges.push((lu, lv));
        }
        levels.push(Level {
            dag: Dag::new(local_names, local_edges)?,
            to_base,
        });
    }

    Ok(LeveledDag {
        base: dag.clone(),
        node_level: level,
        levels,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(pairs: &[(&str, &str)]) -> Dag {
        Dag::from_pairs(pairs).expect("valid dag")
    }

    #[test]
    fn fan_in_two() {
        let g = dag(&[("a", "c"), ("b", "c")]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        let sources: Vec<&str> = g.sources().into_iter().map(|v| g.name(v)).collect();
        assert_eq!(sources, ["a", "b"]);
        let sinks: Vec<&str> = g.sinks().into_iter().map(|v| g.name(v)).collect();
        assert_eq!(sinks, ["c"]);
    }

    #[test]
    fn rejects_two_cycle() {
        let err = Dag::from_pairs(&[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::Cycle { .. }));
    }

    #[test]
    fn rejects_self_loop_and_duplicate() {
        assert!(matches!(
            Dag::from_pairs(&[("a", "a")]).unwrap_err(),
            Error::SelfLoop { .. }
        ));
        assert!(matches!(
            Dag::from_pairs(&[("a", "b"), ("a", "b")]).unwrap_err(),
            Error::DuplicateEdge { .. }
        ));
    }

    #[test]
    fn empty_dag() {
        let g = Dag::new(Vec::new(), Vec::new()).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn packed_layout_line_count() {
        // |V| = 4, B = 2, packed: two lines.
        let g = dag(&[("x1", "y1"), ("x2", "y1"), ("x2", "y2")]);
        assert_eq!(g.node_count(), 4);
        let layout = MemoryLayout::packed(&g, 2).unwrap();
        assert_eq!(layout.occupied_lines(), 2);
        let lined = transform_cache_lines(&g, &layout).unwrap();
        assert_eq!(lined.node_count(), 2);
    }

    #[test]
    fn b1_transform_is_isomorphic() {
        let g = dag(&[("a", "c"), ("b", "c"), ("b", "d")]);
        let layout = MemoryLayout::packed(&g, 1).unwrap();
        let t = transform_cache_lines(&g, &layout).unwrap();
        assert_eq!(t.node_count(), g.node_count());
        assert_eq!(t.edge_count(), g.edge_count());
        // The layout itself is the isomorphism.
        let mapped: BTreeSet<(u64, u64)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (layout.line_of(u), layout.line_of(v)))
            .collect();
        let got: BTreeSet<(u64, u64)> = t
            .edges()
            .iter()
            .map(|&(u, v)| {
                let lu: u64 = t.name(u)[1..].parse().unwrap();
                let lv: u64 = t.name(v)[1..].parse().unwrap();
                (lu, lv)
            })
            .collect();
        assert_eq!(mapped, got);
    }

    #[test]
    fn matrix_example_line_merge() {
        // Rows {y1:{x1,x2,x3}, y2:{x3,x4}}, lines {x1,x2},{x3,x4},{y1,y2}.
        let g = dag(&[
            ("x1", "y1"),
            ("x2", "y1"),
            ("x3", "y1"),
            ("x3", "y2"),
            ("x4", "y2"),
        ]);
        let addr = |name: &str| match name {
            "x1" => 0,
            "x2" => 1,
            "x3" => 2,
            "x4" => 3,
            "y1" => 4,
            "y2" => 5,
            _ => unreachable!(),
        };
        let addresses: Vec<u64> = g.node_ids().map(|v| addr(g.name(v))).collect();
        let layout = MemoryLayout::new(&g, addresses, 2).unwrap();
        let t = transform_cache_lines(&g, &layout).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.edge_count(), 2);
    }

    #[test]
    fn misaligned_layouts_rejected() {
        let g = dag(&[("a", "b"), ("a", "c")]);
        // Outputs b,c at 1,2: consecutive but not aligned to 2.
        assert!(MemoryLayout::new(&g, vec![0, 1, 2], 2).is_err());
        // Inputs at 1: not aligned.
        assert!(MemoryLayout::new(&g, vec![1, 2, 3], 2).is_err());
        // Outputs at 2,4: aligned but not consecutive.
        assert!(MemoryLayout::new(&g, vec![0, 2, 4], 2).is_err());
        assert!(MemoryLayout::new(&g, vec![0, 2, 3], 2).is_ok());
    }

    #[test]
    fn same_line_edge_rejected() {
        // Chain a -> b -> c: b is internal and may land anywhere, so a layout
        // can push it into c's cache line.
        let g = dag(&[("a", "b"), ("b", "c")]);
        let addresses = vec![0, 3, 2]; // a=0, b=3, c=2; line 1 holds both b and c
        let layout = MemoryLayout::new(&g, addresses, 2).unwrap();
        let err = transform_cache_lines(&g, &layout).unwrap_err();
        match err {
            Error::EdgeWithinLine { src, dst, line } => {
                assert_eq!((src.as_str(), dst.as_str(), line), ("b", "c", 1));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn levels_of_chain_and_bipartite() {
        let bip = dag(&[("a", "c"), ("b", "c")]);
        let ld = compute_levels(&bip).unwrap();
        assert_eq!(ld.k(), 2);
        assert_eq!(ld.levels().len(), 1);
        assert_eq!(ld.levels()[0].dag().edge_count(), 2);

        let chain = dag(&[("a", "b"), ("b", "c")]);
        let ld = compute_levels(&chain).unwrap();
        assert_eq!(ld.k(), 3);
        assert_eq!(ld.levels().len(), 2);
        for level in ld.levels() {
            assert_eq!(level.dag().edge_count(), 1);
        }
    }

    #[test]
    fn non_leveled_rejected() {
        let tri = dag(&[("a", "b"), ("a", "c"), ("b", "c")]);
        let err = compute_levels(&tri).unwrap_err();
        match err {
            Error::NotLeveled { src, dst, span } => {
                assert_eq!((src.as_str(), dst.as_str(), span), ("a", "c", 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn level_edges_partition_base_edges() {
        let g = dag(&[
            ("a", "b"),
            ("c", "b"),
            ("b", "d"),
            ("c2", "e"),
            ("e", "d2"),
            ("b", "d2"),
        ]);
        match compute_levels(&g) {
            Ok(ld) => {
                let mut collected: Vec<(String, String)> = Vec::new();
                for level in ld.levels() {
                    for &(u, v) in level.dag().edges() {
                        collected.push((
                            level.dag().name(u).to_owned(),
                            level.dag().name(v).to_owned(),
                        ));
                    }
                }
                collected.sort();
                let mut base: Vec<(String, String)> = g
                    .edges()
                    .iter()
                    .map(|&(u, v)| (g.name(u).to_owned(), g.name(v).to_owned()))
                    .collect();
                base.sort();
                assert_eq!(collected, base);
            }
            Err(Error::NotLeveled { .. }) => {}
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn json_and_dot_exports() {
        let g = dag(&[("a", "b")]);
        let json = g.to_json();
        assert!(json.contains("\"name\":\"a\""));
        assert!(json.contains("\"role\":\"source\""));
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("n0 -> n1"));
    }
}
