use super::order::{ExtractionOrder, Topology};
use super::ExtractionError;

/// Name of outer half-wheel node `k` (1-based).
fn wheel_name(k: usize) -> String {
    format!("w{k:02}")
}

/// Center `wc` with spokes `wc -> wk` and the outer path `wk -> wk+1`, `k = 1..n`.
///
/// Node indices: outer node `k` is index `k - 1`, the center is index `n`.
pub fn generate_half_wheel(n: usize) -> Topology {
    assert!(n >= 3, "half wheel needs at least 3 outer nodes");
    let mut node_names: Vec<String> = (1..=n).map(wheel_name).collect();
    node_names.push("wc".to_string());
    let mut edges: Vec<(usize, usize)> = (0..n).map(|k| (n, k)).collect();
    edges.extend((0..n - 1).map(|k| (k, k + 1)));
    Topology { node_names, edges }
}

/// Order rooted at outer node `n/2`: outer edges point away from it, spokes point to the center.
pub fn half_wheel_center_order(n: usize) -> ExtractionOrder {
    let topo = generate_half_wheel(n);
    let root = n / 2 - 1;
    let reversed: Vec<bool> = topo
        .edges
        .iter()
        .map(|&(a, _)| {
            if a == n {
                true
            } else {
                // outer edge a -> a+1 points away from root iff a >= root
                a < root
            }
        })
        .collect();
    ExtractionOrder::from_orientation(&topo, root, &reversed).expect("valid half wheel order")
}

/// Outer nodes with an incoming outer edge under `x`.
pub fn half_wheel_vertex_cover(n: usize, x: &ExtractionOrder) -> Vec<usize> {
    let mut vc: Vec<usize> = x
        .edges
        .iter()
        .filter(|e| e.tail != n && e.head != n)
        .map(|e| e.head)
        .collect();
    vc.sort_unstable();
    vc.dedup();
    vc
}

/// Directed gadget of an undirected graph on `n` nodes: each edge points from the lower to the
/// higher index and an extra node `r` (index `n`) points to every node.
pub fn generate_vc_gadget(n: usize, edges: &[(usize, usize)]) -> Result<Topology, ExtractionError> {
    let base = Topology {
        node_names: (0..n).map(|k| format!("v{k:02}")).collect(),
        edges: edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
    };
    if let Some(&(a, _)) = base.edges.iter().find(|(a, b)| a == b) {
        return Err(ExtractionError::SelfLoop(a));
    }
    if n == 0 || !base.is_weakly_connected() {
        return Err(ExtractionError::Disconnected);
    }
    let mut topo = base;
    topo.node_names.push("r".to_string());
    topo.edges.extend((0..n).map(|k| (n, k)));
    Ok(topo)
}

/// True iff every biconnected block of the undirected multigraph is a single edge or a cycle.
pub fn is_cactus(topo: &Topology) -> bool {
    let n = topo.num_nodes();
    let adj = topo.undirected_adjacency();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut ok = true;

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        v: usize,
        parent_edge: Option<usize>,
        topo: &Topology,
        adj: &[Vec<(usize, usize)>],
        disc: &mut [usize],
        low: &mut [usize],
        timer: &mut usize,
        stack: &mut Vec<usize>,
        ok: &mut bool,
    ) {
        disc[v] = *timer;
        low[v] = *timer;
        *timer += 1;
        for &(w, e) in &adj[v] {
            if Some(e) == parent_edge {
                continue;
            }
            if disc[w] == usize::MAX {
                stack.push(e);
                dfs(w, Some(e), topo, adj, disc, low, timer, stack, ok);
                low[v] = low[v].min(low[w]);
                if low[w] >= disc[v] {
                    let mut block_edges = 0;
                    let mut block_nodes = Vec::new();
                    while let Some(f) = stack.pop() {
                        block_edges += 1;
                        let (a, b) = topo.edges[f];
                        block_nodes.push(a);
                        block_nodes.push(b);
                        if f == e {
                            break;
                        }
                    }
                    block_nodes.sort_unstable();
                    block_nodes.dedup();
                    if block_edges > 1 && block_edges != block_nodes.len() {
                        *ok = false;
                    }
                }
            } else if disc[w] < disc[v] {
                stack.push(e);
                low[v] = low[v].min(disc[w]);
            }
        }
    }

    for v in 0..n {
        if disc[v] == usize::MAX {
            dfs(
                v,
                None,
                topo,
                &adj,
                &mut disc,
                &mut low,
                &mut timer,
                &mut edge_stack,
                &mut ok,
            );
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    use super::super::labels::label_order;
    use super::*;

    fn topo(n: usize, edges: &[(usize, usize)]) -> Topology {
        Topology {
            node_names: (0..n).map(|k| format!("n{k}")).collect(),
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn half_wheel_of_three() {
        let t = generate_half_wheel(3);
        assert_eq!(t.num_nodes(), 4);
        assert_eq!(t.num_edges(), 5);
    }

    #[test]
    fn half_wheel_center_order_has_width_two() {
        for n in [4, 6, 7, 10] {
            assert_eq!(label_order(half_wheel_center_order(n)).width, 2, "n = {n}");
        }
    }

    #[test]
    fn vc_gadget_of_single_edge() {
        let t = generate_vc_gadget(2, &[(1, 0)]).unwrap();
        assert_eq!(t.num_nodes(), 3);
        assert_eq!(t.edges, vec![(0, 1), (2, 0), (2, 1)]);
    }

    #[test]
    fn vc_gadget_rejects_disconnected_graph() {
        assert_eq!(
            generate_vc_gadget(3, &[(0, 1)]).unwrap_err(),
            ExtractionError::Disconnected
        );
    }

    #[test]
    fn cactus_recognition() {
        assert!(is_cactus(&topo(4, &[(0, 1), (1, 2), (1, 3)])));
        // two triangles sharing node 2
        assert!(is_cactus(&topo(
            5,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]
        )));
        let k4: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert!(!is_cactus(&topo(4, &k4)));
        // antiparallel pair is a 2-cycle; a third parallel edge is not
        assert!(is_cactus(&topo(2, &[(0, 1), (1, 0)])));
        assert!(!is_cactus(&topo(2, &[(0, 1), (1, 0), (0, 1)])));
    }
}
