//! Plain packing of edge-disjoint spanning trees by matroid partition.
//!
//! Edges are inserted one at a time. An edge that closes a cycle in every
//! forest may still fit after a chain of exchanges; the chain is found by a
//! breadth-first search over edges, which keeps every forest acyclic when
//! the exchanges are applied along a shortest chain.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{tree_path, TreePacking};
use crate::error::{Error, Result};
use crate::multigraph::{EdgeId, Multigraph, VertexId};

/// Result of packing as many edges as possible into `k` forests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestPacking {
    pub forests: Vec<BTreeSet<EdgeId>>,
    /// When the forests are not all spanning: a vertex partition crossed by
    /// fewer than `k * (parts - 1)` edges, if one was found and checked.
    pub obstruction: Option<Vec<BTreeSet<VertexId>>>,
}

impl ForestPacking {
    pub fn all_spanning(&self, n: usize) -> bool {
        self.forests.iter().all(|f| f.len() + 1 == n.max(1))
    }
}

/// `k` forests of `g` of maximum total size.
pub fn max_forest_packing(g: &Multigraph, k: usize) -> ForestPacking {
    let n = g.vertex_count();
    let target = n.saturating_sub(1);
    let mut forests: Vec<BTreeSet<EdgeId>> = vec![BTreeSet::new(); k];
    let mut owner: HashMap<EdgeId, usize> = HashMap::new();
    let mut last_failure: Option<BTreeSet<EdgeId>> = None;
    for (e, _, _) in g.edges() {
        if k == 0 || forests.iter().all(|f| f.len() == target) {
            break;
        }
        if let Err(labeled) = insert(g, &mut forests, &mut owner, e) {
            last_failure = Some(labeled);
        }
    }
    let complete = forests.iter().all(|f| f.len() == target);
    let obstruction = if complete || k == 0 {
        None
    } else {
        last_failure.and_then(|labeled| checked_partition(g, k, &labeled))
    };
    ForestPacking { forests, obstruction }
}

/// `k` edge-disjoint spanning trees, or an infeasibility error.
pub fn pack_spanning_trees(g: &Multigraph, k: usize) -> Result<TreePacking> {
    let fp = max_forest_packing(g, k);
    if fp.all_spanning(g.vertex_count()) {
        return Ok(TreePacking::new(fp.forests));
    }
    let detail = match &fp.obstruction {
        Some(parts) => {
            let crossing = crossing_count(g, parts);
            format!(
                "partition into {} parts is crossed by {crossing} edges, fewer than {}",
                parts.len(),
                k * (parts.len() - 1)
            )
        }
        None => "the forests could not be completed".to_string(),
    };
    Err(Error::Infeasible(format!("no {k} edge-disjoint spanning trees: {detail}")))
}

fn insert(
    g: &Multigraph,
    forests: &mut [BTreeSet<EdgeId>],
    owner: &mut HashMap<EdgeId, usize>,
    e: EdgeId,
) -> std::result::Result<(), BTreeSet<EdgeId>> {
    let k = forests.len();
    // label[y] = (x, i): x moves into forest i and pushes y out of it.
    let mut label: HashMap<EdgeId, (EdgeId, usize)> = HashMap::new();
    let mut visited: BTreeSet<EdgeId> = BTreeSet::from([e]);
    let mut queue = VecDeque::from([e]);
    while let Some(x) = queue.pop_front() {
        let (a, b) = g.endpoints(x).expect("edges come from the graph");
        let current = owner.get(&x).copied();
        for i in 0..k {
            if Some(i) == current {
                continue;
            }
            match tree_path(g, &forests[i], a, b) {
                None => {
                    augment(forests, owner, &label, x, i);
                    return Ok(());
                }
                Some(cycle) => {
                    for y in cycle {
                        if visited.insert(y) {
                            label.insert(y, (x, i));
                            queue.push_back(y);
                        }
                    }
                }
            }
        }
    }
    Err(visited)
}

fn augment(
    forests: &mut [BTreeSet<EdgeId>],
    owner: &mut HashMap<EdgeId, usize>,
    label: &HashMap<EdgeId, (EdgeId, usize)>,
    mut x: EdgeId,
    mut into: usize,
) {
    loop {
        if let Some(p) = owner.insert(x, into) {
            forests[p].remove(&x);
        }
        forests[into].insert(x);
        match label.get(&x) {
            None => break,
            Some(&(px, pi)) => {
                x = px;
                into = pi;
            }
        }
    }
}

fn crossing_count(g: &Multigraph, parts: &[BTreeSet<VertexId>]) -> usize {
    let mut part_of = HashMap::new();
    for (i, p) in parts.iter().enumerate() {
        for &x in p {
            part_of.insert(x, i);
        }
    }
    g.edges().filter(|(_, a, b)| part_of[a] != part_of[b]).count()
}

/// Components of the labeled edges form a candidate partition; keep it only
/// if it really violates the tree packing bound.
fn checked_partition(g: &Multigraph, k: usize, labeled: &BTreeSet<EdgeId>) -> Option<Vec<BTreeSet<VertexId>>> {
    let parts = g.edge_subgraph(labeled).components();
    if parts.len() < 2 {
        return None;
    }
    (crossing_count(g, &parts) < k * (parts.len() - 1)).then_some(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::verify_packing;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn complete(n: u32, copies: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for _ in 0..copies {
            for a in 0..n {
                for b in a + 1..n {
                    g.add_edge(v(a), v(b)).unwrap();
                }
            }
        }
        g
    }

    /// Brute force: can the edges be split into `k` disjoint spanning trees?
    fn brute_has_packing(g: &Multigraph, k: usize) -> bool {
        let edges: Vec<EdgeId> = g.edge_ids().into_iter().collect();
        let n = g.vertex_count();
        fn rec(g: &Multigraph, edges: &[EdgeId], i: usize, forests: &mut Vec<BTreeSet<EdgeId>>, n: usize) -> bool {
            if forests.iter().all(|f| f.len() + 1 == n) {
                return true;
            }
            if i == edges.len() {
                return false;
            }
            let e = edges[i];
            let (a, b) = g.endpoints(e).unwrap();
            for j in 0..forests.len() {
                if forests[j].len() + 1 < n && tree_path(g, &forests[j], a, b).is_none() {
                    forests[j].insert(e);
                    if rec(g, edges, i + 1, forests, n) {
                        return true;
                    }
                    forests[j].remove(&e);
                }
            }
            rec(g, edges, i + 1, forests, n)
        }
        rec(g, &edges, 0, &mut vec![BTreeSet::new(); k], n)
    }

    #[test]
    fn doubled_cycle_two_trees() {
        let mut g = Multigraph::with_vertices(6);
        for _ in 0..2 {
            for i in 0..6 {
                g.add_edge(v(i), v((i + 1) % 6)).unwrap();
            }
        }
        let p = pack_spanning_trees(&g, 2).unwrap();
        assert!(verify_packing(&g, &p, None).ok);
    }

    #[test]
    fn k4_has_two_trees() {
        let g = complete(4, 1);
        assert!(brute_has_packing(&g, 2));
        let p = pack_spanning_trees(&g, 2).unwrap();
        assert!(verify_packing(&g, &p, None).ok);
    }

    #[test]
    fn single_vertex_gives_empty_trees() {
        let g = Multigraph::with_vertices(1);
        let p = pack_spanning_trees(&g, 3).unwrap();
        assert_eq!(p.trees, vec![BTreeSet::new(); 3]);
    }

    #[test]
    fn infeasible_reports_partition() {
        let g = complete(4, 1);
        let err = pack_spanning_trees(&g, 3).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let fp = max_forest_packing(&g, 3);
        if let Some(parts) = fp.obstruction {
            assert!(crossing_count(&g, &parts) < 3 * (parts.len() - 1));
        }
    }

    #[test]
    fn agrees_with_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..150 {
            let n = rng.gen_range(2..6u32);
            let m = rng.gen_range(1..10usize);
            let mut g = Multigraph::with_vertices(n);
            while g.edge_count() < m {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a != b {
                    g.add_edge(v(a), v(b)).unwrap();
                }
            }
            for k in 1..3 {
                let expected = brute_has_packing(&g, k);
                let got = pack_spanning_trees(&g, k);
                assert_eq!(got.is_ok(), expected, "graph {:?} k {k}", g.edges().collect::<Vec<_>>());
                if let Ok(p) = got {
                    assert!(verify_packing(&g, &p, None).ok);
                }
            }
        }
    }
}
