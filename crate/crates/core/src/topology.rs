//! Hardware connectivity graphs and deterministic subgraph embedding.
//!
//! The built-in topologies are small sub-graphs of real device couplings:
//! a 3-qubit line (LNN), the 5-qubit T and P shapes, the 6-qubit A shape,
//! the 7-qubit H shape, and all-to-all cliques.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An undirected connectivity graph over physical qubits `0..nodes.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub name: String,
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn new(name: &str, nodes: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Topology> {
        let topo = Topology {
            name: name.to_string(),
            nodes,
            edges,
        };
        topo.validate()?;
        Ok(topo)
    }

    /// 3-qubit linear nearest neighbor: 0-1-2.
    pub fn lnn() -> Topology {
        Topology {
            name: "LNN".into(),
            nodes: (0..3).collect(),
            edges: vec![(0, 1), (1, 2)],
        }
    }

    /// 5-qubit T shape.
    pub fn five_t() -> Topology {
        Topology {
            name: "5T".into(),
            nodes: (0..5).collect(),
            edges: vec![(0, 1), (1, 4), (1, 2), (2, 3)],
        }
    }

    /// 5-qubit P shape: a 4-cycle with one pendant.
    pub fn five_p() -> Topology {
        Topology {
            name: "5P".into(),
            nodes: (0..5).collect(),
            edges: vec![(0, 1), (0, 3), (1, 2), (2, 3), (1, 4)],
        }
    }

    /// 6-qubit A shape: a 4-cycle with two pendants.
    pub fn six_a() -> Topology {
        Topology {
            name: "6A".into(),
            nodes: (0..6).collect(),
            edges: vec![(0, 1), (0, 3), (1, 2), (2, 3), (1, 4), (2, 5)],
        }
    }

    /// 7-qubit H shape: a 3-path with pendants on both ends.
    pub fn seven_h() -> Topology {
        Topology {
            name: "7H".into(),
            nodes: (0..7).collect(),
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (3, 6)],
        }
    }

    /// Full connectivity on `n` qubits.
    pub fn clique(n: usize) -> Topology {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Topology {
            name: format!("Clique{n}"),
            nodes: (0..n).collect(),
            edges,
        }
    }

    /// Look up a built-in topology by name (case-insensitive). `clique`
    /// requires a size, either inline (`clique6`) or via `clique_size`.
    pub fn builtin(name: &str, clique_size: Option<usize>) -> Result<Topology> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "lnn" => Ok(Self::lnn()),
            "5t" => Ok(Self::five_t()),
            "5p" => Ok(Self::five_p()),
            "6a" => Ok(Self::six_a()),
            "7h" => Ok(Self::seven_h()),
            _ => {
                if let Some(rest) = lower.strip_prefix("clique") {
                    let n = if rest.is_empty() {
                        clique_size.ok_or(Error::Invalid {
                            what: "topology",
                            reason: "clique needs a size, e.g. `clique6`".into(),
                        })?
                    } else {
                        rest.parse().map_err(|_| Error::Invalid {
                            what: "topology",
                            reason: format!("bad clique size in {name:?}"),
                        })?
                    };
                    Ok(Self::clique(n))
                } else {
                    Err(Error::Invalid {
                        what: "topology",
                        reason: format!(
                            "unknown topology {name:?} (lnn, 5t, 5p, 6a, 7h, clique<n>)"
                        ),
                    })
                }
            }
        }
    }

    /// Names of all built-in shapes.
    pub fn builtin_names() -> [&'static str; 6] {
        ["LNN", "5T", "5P", "6A", "7H", "Clique"]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges
            .iter()
            .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
    }

    /// Neighbors of a node, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    /// Shortest path between two nodes by BFS with ascending neighbor order,
    /// endpoints included. Deterministic.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![usize::MAX; self.nodes.len()];
        let mut queue = VecDeque::new();
        queue.push_back(from);
        prev[from] = from;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    if w == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while cur != from {
                            cur = prev[cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: String| Error::Invalid {
            what: "topology",
            reason,
        };
        if self.nodes.is_empty() {
            return Err(invalid("topology has no nodes".into()));
        }
        // Node ids must be exactly 0..len so they can serve as wire indices.
        let expected: Vec<usize> = (0..self.nodes.len()).collect();
        let mut sorted = self.nodes.clone();
        sorted.sort_unstable();
        if sorted != expected {
            return Err(invalid("node ids must be exactly 0..n-1".into()));
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            if a >= self.nodes.len() || b >= self.nodes.len() {
                return Err(invalid(format!("edge ({a},{b}) references unknown node")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid(format!("duplicate edge ({a},{b})")));
            }
        }
        // Connectivity.
        if self.nodes.len() > 1 {
            let mut reached = vec![false; self.nodes.len()];
            let mut queue = VecDeque::from([0usize]);
            reached[0] = true;
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if !reached[w] {
                        reached[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            if reached.iter().any(|&r| !r) {
                return Err(invalid("graph is not connected".into()));
            }
        }
        Ok(())
    }

    /// Parse the JSON interchange format
    /// `{"name": str, "nodes": [ids], "edges": [[a,b],...]}`.
    pub fn from_json(text: &str) -> Result<Topology> {
        let topo: Topology = serde_json::from_str(text)?;
        topo.validate()?;
        Ok(topo)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("topology serializes")
    }
}

/// Find a subgraph monomorphism placing `n_logical` qubits onto topology
/// nodes so that every interaction edge lands on a topology edge.
///
/// Returns `layout[logical] = physical`, or `None` when no embedding exists.
/// Deterministic for a fixed seed: the seed only permutes candidate order.
pub fn embed_layout(
    interaction: &[(usize, usize)],
    n_logical: usize,
    topo: &Topology,
    seed: u64,
) -> Option<Vec<usize>> {
    if n_logical > topo.len() {
        return None;
    }
    let mut adj = vec![BTreeSet::new(); n_logical];
    for &(a, b) in interaction {
        if a >= n_logical || b >= n_logical || a == b {
            return None;
        }
        adj[a].insert(b);
        adj[b].insert(a);
    }
    // Assign high-degree logical qubits first.
    let mut order: Vec<usize> = (0..n_logical).collect();
    order.sort_by_key(|&v| (usize::MAX - adj[v].len(), v));

    let mut candidates: Vec<usize> = (0..topo.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);

    let mut assignment = vec![usize::MAX; n_logical];
    let mut used = vec![false; topo.len()];
    fn assign(
        depth: usize,
        order: &[usize],
        adj: &[BTreeSet<usize>],
        topo: &Topology,
        candidates: &[usize],
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for &p in candidates {
            if used[p] {
                continue;
            }
            // Every already-assigned neighbor must sit on an adjacent node.
            let ok = adj[v]
                .iter()
                .filter(|&&w| assignment[w] != usize::MAX)
                .all(|&w| topo.has_edge(p, assignment[w]));
            if !ok {
                continue;
            }
            assignment[v] = p;
            used[p] = true;
            if assign(depth + 1, order, adj, topo, candidates, assignment, used) {
                return true;
            }
            assignment[v] = usize::MAX;
            used[p] = false;
        }
        false
    }
    if assign(
        0,
        &order,
        &adj,
        topo,
        &candidates,
        &mut assignment,
        &mut used,
    ) {
        Some(assignment)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        for (name, nodes, edges) in [
            ("lnn", 3, 2),
            ("5t", 5, 4),
            ("5p", 5, 5),
            ("6a", 6, 6),
            ("7h", 7, 6),
        ] {
            let t = Topology::builtin(name, None).unwrap();
            assert_eq!(t.len(), nodes, "{name}");
            assert_eq!(t.edges.len(), edges, "{name}");
            t.validate().unwrap();
        }
        let c = Topology::builtin("clique6", None).unwrap();
        assert_eq!(c.edges.len(), 15);
        assert!(Topology::builtin("bogus", None).is_err());
    }

    #[test]
    fn shortest_path_lnn() {
        let t = Topology::lnn();
        assert_eq!(t.shortest_path(0, 2), Some(vec![0, 1, 2]));
        assert_eq!(t.shortest_path(1, 1), Some(vec![1]));
    }

    #[test]
    fn embed_path_into_lnn() {
        let layout = embed_layout(&[(0, 1), (1, 2)], 3, &Topology::lnn(), 0).unwrap();
        // Middle of the path must sit on the middle node.
        assert_eq!(layout[1], 1);
    }

    #[test]
    fn embed_four_clique_into_six_a_fails() {
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert!(embed_layout(&k4, 4, &Topology::six_a(), 0).is_none());
        assert!(embed_layout(&k4, 4, &Topology::clique(4), 0).is_some());
    }

    #[test]
    fn embed_into_clique_always_works() {
        let edges = [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)];
        let layout = embed_layout(&edges, 4, &Topology::clique(5), 7).unwrap();
        let set: BTreeSet<usize> = layout.iter().copied().collect();
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn embed_deterministic_per_seed() {
        let edges = [(0, 1), (1, 2)];
        let a = embed_layout(&edges, 3, &Topology::five_t(), 3);
        let b = embed_layout(&edges, 3, &Topology::five_t(), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = Topology::six_a();
        let back = Topology::from_json(&t.to_json()).unwrap();
        assert_eq!(t, back);

        let disconnected = r#"{"name":"bad","nodes":[0,1,2],"edges":[[0,1]]}"#;
        assert!(Topology::from_json(disconnected).is_err());
        let dup = r#"{"name":"bad","nodes":[0,1],"edges":[[0,1],[1,0]]}"#;
        assert!(Topology::from_json(dup).is_err());
    }
}
