use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::ExtractionError;

/// Directed multigraph structure of a request; node indices are positions in `node_names`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub node_names: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Topology {
    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.node_names.iter().position(|n| n == name)
    }

    /// Undirected adjacency as `(neighbor, edge)` pairs, sorted by neighbor then edge.
    pub fn undirected_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn is_weakly_connected(&self) -> bool {
        let n = self.num_nodes();
        if n == 0 {
            return true;
        }
        let adj = self.undirected_adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for &(b, _) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Maximum undirected degree, counting parallel edges.
    pub fn max_degree(&self) -> usize {
        self.undirected_adjacency().iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_loops(&self) -> Result<(), ExtractionError> {
        match self.edges.iter().find(|(a, b)| a == b) {
            Some(&(a, _)) => Err(ExtractionError::SelfLoop(a)),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub tail: usize,
    pub head: usize,
    /// Index of the request edge this one reorients.
    pub original: usize,
    pub reversed: bool,
}

/// Rooted DAG obtained by reorienting request edges; `edges[e]` reorients request edge `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionOrder {
    pub root: usize,
    pub num_nodes: usize,
    pub edges: Vec<OrientedEdge>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl ExtractionOrder {
    /// Reorients `topo` by flipping edge `e` whenever `reversed[e]` holds.
    pub fn from_orientation(
        topo: &Topology,
        root: usize,
        reversed: &[bool],
    ) -> Result<Self, ExtractionError> {
        let n = topo.num_nodes();
        if root >= n {
            return Err(ExtractionError::InvalidRoot(root));
        }
        topo.check_loops()?;
        if reversed.len() != topo.num_edges() {
            return Err(ExtractionError::OrientationLength {
                expected: topo.num_edges(),
                got: reversed.len(),
            });
        }
        let edges: Vec<OrientedEdge> = topo
            .edges
            .iter()
            .zip(reversed)
            .enumerate()
            .map(|(k, (&(a, b), &rev))| OrientedEdge {
                tail: if rev { b } else { a },
                head: if rev { a } else { b },
                original: k,
                reversed: rev,
            })
            .collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            out[e.tail].push(k);
            inc[e.head].push(k);
        }
        if !inc[root].is_empty() {
            return Err(ExtractionError::RootHasIncoming);
        }
        // Kahn's algorithm, smallest ready node first.
        let mut indeg: Vec<usize> = inc.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &k in &out[v] {
                let h = edges[k].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if order.len() != n {
            return Err(ExtractionError::Cyclic);
        }
        let x = ExtractionOrder {
            root,
            num_nodes: n,
            edges,
            out,
            inc,
            topo: order,
        };
        let reach = x.reachable_from(root);
        if let Some(v) = reach.iter().position(|r| !r) {
            return Err(ExtractionError::Unreachable(v));
        }
        Ok(x)
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    /// Topological order with ties broken by smallest index.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn reachable_from(&self, v: usize) -> Vec<bool> {
        self.reach(v, None, true)
    }

    /// Nodes that can reach `v`.
    pub fn reaching(&self, v: usize) -> Vec<bool> {
        self.reach(v, None, false)
    }

    /// Reachability from `v` with node `skip` deleted.
    pub fn reachable_avoiding(&self, v: usize, skip: usize) -> Vec<bool> {
        self.reach(v, Some(skip), true)
    }

    fn reach(&self, v: usize, skip: Option<usize>, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes];
        seen[v] = true;
        let mut stack = vec![v];
        while let Some(a) = stack.pop() {
            let list = if forward { &self.out[a] } else { &self.inc[a] };
            for &k in list {
                let e = self.edges[k];
                let b = if forward { e.head } else { e.tail };
                if Some(b) != skip && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }
}

/// BFS from `root` over the undirected graph; every edge points from the earlier to the later
/// discovered endpoint. Neighbors are visited in ascending index order.
pub fn build_extraction_order(
    topo: &Topology,
    root: usize,
) -> Result<ExtractionOrder, ExtractionError> {
    let n = topo.num_nodes();
    if root >= n {
        return Err(ExtractionError::InvalidRoot(root));
    }
    topo.check_loops()?;
    let adj = topo.undirected_adjacency();
    let mut rank = vec![usize::MAX; n];
    rank[root] = 0;
    let mut next = 1;
    let mut queue = VecDeque::from([root]);
    while let Some(a) = queue.pop_front() {
        for &(b, _) in &adj[a] {
            if rank[b] == usize::MAX {
                rank[b] = next;
                next += 1;
                queue.push_back(b);
            }
        }
    }
    if next != n {
        return Err(ExtractionError::Disconnected);
    }
    let reversed: Vec<bool> = topo.edges.iter().map(|&(a, b)| rank[a] > rank[b]).collect();
    ExtractionOrder::from_orientation(topo, root, &reversed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(n: usize, edges: &[(usize, usize)]) -> Topology {
        Topology {
            node_names: (0..n).map(|k| format!("n{k}")).collect(),
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn path_rooted_at_start_keeps_orientation() {
        let x = build_extraction_order(&topo(3, &[(0, 1), (1, 2)]), 0).unwrap();
        assert!(x.edges.iter().all(|e| !e.reversed));
    }

    #[test]
    fn path_rooted_at_end_reverses_everything() {
        let x = build_extraction_order(&topo(3, &[(0, 1), (1, 2)]), 2).unwrap();
        assert!(x.edges.iter().all(|e| e.reversed));
        assert_eq!((x.edges[0].tail, x.edges[0].head), (1, 0));
    }

    #[test]
    fn triangle_reverses_closing_edge() {
        // i=0, j=1, k=2 with i->j, j->k, k->i
        let x = build_extraction_order(&topo(3, &[(0, 1), (1, 2), (2, 0)]), 0).unwrap();
        let flags: Vec<bool> = x.edges.iter().map(|e| e.reversed).collect();
        assert_eq!(flags, [false, false, true]);
        assert_eq!((x.edges[2].tail, x.edges[2].head), (0, 2));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let err = build_extraction_order(&topo(3, &[(0, 1)]), 0).unwrap_err();
        assert_eq!(err, ExtractionError::Disconnected);
    }

    #[test]
    fn cyclic_orientation_is_rejected() {
        let t = topo(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]);
        let err = ExtractionOrder::from_orientation(&t, 0, &[false; 4]).unwrap_err();
        assert_eq!(err, ExtractionError::Cyclic);
    }

    #[test]
    fn unreachable_node_is_rejected() {
        let t = topo(3, &[(0, 1), (2, 1)]);
        let err = ExtractionOrder::from_orientation(&t, 0, &[false, false]).unwrap_err();
        assert_eq!(err, ExtractionError::Unreachable(2));
    }
}
