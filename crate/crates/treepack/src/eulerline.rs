//! From two disjoint spanning trees to a Hamiltonian cycle of the line graph.
//!
//! The symmetric difference of the fundamental cycles of one tree's edges
//! with respect to the other tree is a spanning, connected, even subgraph.
//! An Euler tour of it is a closed trail touching every vertex, hence every
//! edge, and such a dominating trail turns into a Hamiltonian cycle of
//! `L(G)` by inserting each remaining edge next to a trail vertex it touches.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::connectivity::edge_connectivity;
use crate::error::{invariant, precondition, Result};
use crate::multigraph::{EdgeId, Multigraph, VertexId};
use crate::packing::{check_spanning_tree, pack_spanning_trees};

/// A closed trail: `edges[i]` leaves `vertices[i]` and enters
/// `vertices[(i + 1) % len]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedTrail {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl ClosedTrail {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Every edge joins consecutive vertices, no edge repeats, and the trail
    /// closes up.
    pub fn check(&self, g: &Multigraph) -> std::result::Result<(), String> {
        let m = self.edges.len();
        if self.vertices.len() != m {
            return Err(format!("{} vertices for {m} edges", self.vertices.len()));
        }
        let mut seen = BTreeSet::new();
        for i in 0..m {
            let e = self.edges[i];
            if !seen.insert(e) {
                return Err(format!("{e} repeats"));
            }
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % m]);
            if g.other_end(e, a) != Some(b) {
                return Err(format!("{e} does not join {a} and {b}"));
            }
        }
        Ok(())
    }
}

/// A cyclic order of all edges of `G` in which consecutive edges share an
/// endpoint: a Hamiltonian cycle of the line graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonCycleCert {
    pub cycle: Vec<EdgeId>,
}

impl HamiltonCycleCert {
    pub fn verify(&self, g: &Multigraph) -> std::result::Result<(), String> {
        let listed: BTreeSet<EdgeId> = self.cycle.iter().copied().collect();
        if listed.len() != self.cycle.len() {
            return Err("an edge is listed twice".into());
        }
        if listed != g.edge_ids() {
            return Err(format!("lists {} edges, the graph has {}", listed.len(), g.edge_count()));
        }
        let m = self.cycle.len();
        for i in 0..m {
            let (e, f) = (self.cycle[i], self.cycle[(i + 1) % m]);
            let (a, b) = g.endpoints(e).expect("checked above");
            if !g.is_incident(f, a) && !g.is_incident(f, b) {
                return Err(format!("{e} and {f} are consecutive but share no endpoint"));
            }
        }
        Ok(())
    }
}

/// Which tree supplies the chords whose fundamental cycles are summed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityRole {
    /// Chords from the second tree, cycles closed in the first. The result
    /// contains the second tree.
    #[default]
    SecondTreeChords,
    /// Chords from the first tree, cycles closed in the second. The result
    /// contains the first tree.
    FirstTreeChords,
}

/// A spanning tree rooted at its lowest vertex, for path queries.
struct RootedTree {
    parent: HashMap<VertexId, (EdgeId, VertexId)>,
    depth: HashMap<VertexId, usize>,
}

impl RootedTree {
    fn new(g: &Multigraph, tree: &BTreeSet<EdgeId>) -> Result<RootedTree> {
        check_spanning_tree(g, tree).map_err(|m| precondition!("not a spanning tree: {m}"))?;
        let mut adj: HashMap<VertexId, Vec<(EdgeId, VertexId)>> = HashMap::new();
        for &e in tree {
            let (a, b) = g.endpoints(e).expect("tree edges are graph edges");
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
        let mut parent = HashMap::new();
        let mut depth = HashMap::new();
        if let Some(root) = g.vertices().next() {
            depth.insert(root, 0);
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(e, y) in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                    if !depth.contains_key(&y) {
                        depth.insert(y, depth[&x] + 1);
                        parent.insert(y, (e, x));
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(RootedTree { parent, depth })
    }

    /// Edges of the tree path between `a` and `b`.
    fn path(&self, mut a: VertexId, mut b: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        while a != b {
            if self.depth[&a] >= self.depth[&b] {
                let (e, p) = self.parent[&a];
                out.push(e);
                a = p;
            } else {
                let (e, p) = self.parent[&b];
                out.push(e);
                b = p;
            }
        }
        out
    }
}

/// The chord `e` together with the tree path between its endpoints.
pub fn fundamental_cycle(g: &Multigraph, tree: &BTreeSet<EdgeId>, e: EdgeId) -> Result<BTreeSet<EdgeId>> {
    if tree.contains(&e) {
        return Err(precondition!("{e} belongs to the tree"));
    }
    let (a, b) = g.endpoints(e).ok_or_else(|| precondition!("{e} is not an edge"))?;
    let rooted = RootedTree::new(g, tree)?;
    let mut cycle: BTreeSet<EdgeId> = rooted.path(a, b).into_iter().collect();
    cycle.insert(e);
    Ok(cycle)
}

/// For every edge, the number of fundamental cycles of `chords` that
/// contain it.
pub fn fundamental_cycle_membership_counts(
    g: &Multigraph,
    tree: &BTreeSet<EdgeId>,
    chords: &BTreeSet<EdgeId>,
) -> Result<BTreeMap<EdgeId, usize>> {
    let rooted = RootedTree::new(g, tree)?;
    let mut counts = BTreeMap::new();
    for &c in chords {
        if tree.contains(&c) {
            return Err(precondition!("{c} belongs to the tree"));
        }
        let (a, b) = g.endpoints(c).ok_or_else(|| precondition!("{c} is not an edge"))?;
        *counts.entry(c).or_insert(0) += 1;
        for e in rooted.path(a, b) {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Spanning connected even subgraph containing `second`, built from the
/// fundamental cycles of `second`'s edges with respect to `first`.
pub fn parity_eulerian_subgraph(
    g: &Multigraph,
    first: &BTreeSet<EdgeId>,
    second: &BTreeSet<EdgeId>,
) -> Result<BTreeSet<EdgeId>> {
    parity_eulerian_subgraph_with(g, first, second, ParityRole::SecondTreeChords)
}

pub fn parity_eulerian_subgraph_with(
    g: &Multigraph,
    first: &BTreeSet<EdgeId>,
    second: &BTreeSet<EdgeId>,
    role: ParityRole,
) -> Result<BTreeSet<EdgeId>> {
    if let Some(e) = first.intersection(second).next() {
        return Err(precondition!("the trees share {e}"));
    }
    let (base, chords) = match role {
        ParityRole::SecondTreeChords => (first, second),
        ParityRole::FirstTreeChords => (second, first),
    };
    check_spanning_tree(g, chords).map_err(|m| precondition!("chord tree is not spanning: {m}"))?;
    let counts = fundamental_cycle_membership_counts(g, base, chords)?;
    let h: BTreeSet<EdgeId> = counts.into_iter().filter(|&(_, c)| c % 2 == 1).map(|(e, _)| e).collect();
    if !chords.is_subset(&h) {
        return Err(invariant!("parity subgraph lost a chord"));
    }
    let sub = g.edge_subgraph(&h);
    if let Some(x) = g.vertices().find(|&x| sub.degree(x) % 2 == 1) {
        return Err(invariant!("parity subgraph has odd degree at {x}"));
    }
    if sub.components().len() > 1 {
        return Err(invariant!("parity subgraph is not connected and spanning"));
    }
    Ok(h)
}

/// Closed trail through every edge of `h`. Built greedily from the lowest
/// vertex, then repeatedly extended at the first tour vertex that still has
/// unused edges.
pub fn euler_tour(g: &Multigraph, h: &BTreeSet<EdgeId>) -> Result<ClosedTrail> {
    if let Some(e) = h.iter().find(|e| !g.has_edge(**e)) {
        return Err(precondition!("{e} is not an edge"));
    }
    let sub = g.edge_subgraph(h);
    if let Some(x) = sub.vertices().find(|&x| sub.degree(x) % 2 == 1) {
        return Err(precondition!("{x} has odd degree {}", sub.degree(x)));
    }
    let Some(start) = sub.vertices().find(|&x| sub.degree(x) > 0) else {
        return Ok(ClosedTrail::default());
    };
    let adj: HashMap<VertexId, Vec<EdgeId>> = sub.vertices().map(|x| (x, sub.incident(x).collect())).collect();
    let mut cursor: HashMap<VertexId, usize> = HashMap::new();
    let mut used: BTreeSet<EdgeId> = BTreeSet::new();
    let mut next_unused = |x: VertexId, used: &BTreeSet<EdgeId>| -> Option<EdgeId> {
        let list = &adj[&x];
        let c = cursor.entry(x).or_insert(0);
        while *c < list.len() && used.contains(&list[*c]) {
            *c += 1;
        }
        list.get(*c).copied()
    };

    // Linked list of (vertex, outgoing edge).
    let mut node_vertex: Vec<VertexId> = Vec::new();
    let mut node_edge: Vec<EdgeId> = Vec::new();
    let mut node_next: Vec<Option<usize>> = Vec::new();

    // Greedy closed walk from `x`; returns the node indices in order.
    let mut walk_from = |x: VertexId,
                         used: &mut BTreeSet<EdgeId>,
                         node_vertex: &mut Vec<VertexId>,
                         node_edge: &mut Vec<EdgeId>,
                         node_next: &mut Vec<Option<usize>>|
     -> Result<Vec<usize>> {
        let mut ids = Vec::new();
        let mut cur = x;
        while let Some(e) = next_unused(cur, used) {
            used.insert(e);
            let id = node_vertex.len();
            node_vertex.push(cur);
            node_edge.push(e);
            node_next.push(None);
            if let Some(&prev) = ids.last() {
                node_next[prev] = Some(id);
            }
            ids.push(id);
            cur = sub.other_end(e, cur).expect("incident edge");
        }
        if cur != x {
            return Err(invariant!("greedy walk from {x} got stuck at {cur}"));
        }
        Ok(ids)
    };

    let first = walk_from(start, &mut used, &mut node_vertex, &mut node_edge, &mut node_next)?;
    let head = first[0];
    let mut pos = Some(head);
    while let Some(i) = pos {
        let x = node_vertex[i];
        let sub_ids = walk_from(x, &mut used, &mut node_vertex, &mut node_edge, &mut node_next)?;
        if let (Some(&s0), Some(&sl)) = (sub_ids.first(), sub_ids.last()) {
            // Node i keeps vertex x but now leaves along the detour; a copy
            // of the old node resumes the original tour after it.
            let copy = node_vertex.len();
            node_vertex.push(x);
            node_edge.push(node_edge[i]);
            node_next.push(node_next[i]);
            let detour_edge = node_edge[s0];
            let detour_next = node_next[s0];
            node_edge[i] = detour_edge;
            node_next[i] = if s0 == sl { Some(copy) } else { detour_next };
            node_next[sl] = Some(copy);
            if s0 != sl {
                // s0 is now represented by node i.
                node_next[s0] = None;
            }
        }
        pos = node_next[i];
    }
    if used.len() != h.len() {
        return Err(precondition!("edges of the subgraph are not all reachable from {start}"));
    }
    let mut trail = ClosedTrail::default();
    let mut pos = Some(head);
    while let Some(i) = pos {
        trail.vertices.push(node_vertex[i]);
        trail.edges.push(node_edge[i]);
        pos = node_next[i];
    }
    trail.check(g).map_err(|m| invariant!("Euler tour malformed: {m}"))?;
    Ok(trail)
}

/// Whether every edge of `g` has an endpoint on the trail.
pub fn is_dominating(g: &Multigraph, trail: &ClosedTrail) -> bool {
    let on: BTreeSet<VertexId> = trail.vertices.iter().copied().collect();
    g.edges().all(|(_, a, b)| on.contains(&a) || on.contains(&b))
}

/// Hamiltonian cycle of `L(G)` from a dominating closed trail: at each
/// trail vertex, the untouched non-trail edges there are listed (lowest id
/// first) before the trail moves on.
pub fn hamilton_from_trail(g: &Multigraph, trail: &ClosedTrail) -> Result<HamiltonCycleCert> {
    trail.check(g).map_err(|m| precondition!("not a closed trail: {m}"))?;
    if trail.is_empty() {
        if g.edge_count() == 0 {
            return Ok(HamiltonCycleCert::default());
        }
        return Err(precondition!("an empty trail dominates no edge"));
    }
    if !is_dominating(g, trail) {
        return Err(precondition!("trail misses both endpoints of some edge"));
    }
    let on_trail: BTreeSet<EdgeId> = trail.edges.iter().copied().collect();
    let mut emitted: BTreeSet<EdgeId> = BTreeSet::new();
    let mut cycle = Vec::with_capacity(g.edge_count());
    for (i, &x) in trail.vertices.iter().enumerate() {
        for e in g.incident(x) {
            if !on_trail.contains(&e) && emitted.insert(e) {
                cycle.push(e);
            }
        }
        cycle.push(trail.edges[i]);
    }
    let cert = HamiltonCycleCert { cycle };
    cert.verify(g).map_err(|m| invariant!("line graph cycle failed verification: {m}"))?;
    Ok(cert)
}

/// Two disjoint spanning trees, their parity subgraph, its Euler tour, and
/// the resulting Hamiltonian cycle of `L(G)`.
pub fn line_hamilton_pipeline(g: &Multigraph) -> Result<HamiltonCycleCert> {
    let kappa = edge_connectivity(g);
    if g.vertex_count() < 2 || kappa < 4 {
        return Err(precondition!("needs a 4-edge-connected graph, edge connectivity is {kappa}"));
    }
    let trees = pack_spanning_trees(g, 2).map_err(|e| invariant!("4-edge-connected graph without two trees: {e}"))?;
    let h = parity_eulerian_subgraph(g, &trees.trees[0], &trees.trees[1])?;
    let trail = euler_tour(g, &h)?;
    if !is_dominating(g, &trail) {
        return Err(invariant!("tour of a spanning subgraph is not dominating"));
    }
    hamilton_from_trail(g, &trail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn graph(n: u32, edges: &[(u32, u32)]) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for &(a, b) in edges {
            g.add_edge(v(a), v(b)).unwrap();
        }
        g
    }

    fn ids(xs: &[u32]) -> BTreeSet<EdgeId> {
        xs.iter().map(|&i| EdgeId(i)).collect()
    }

    fn doubled_cycle(n: u32) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for _ in 0..2 {
            for i in 0..n {
                g.add_edge(v(i), v((i + 1) % n)).unwrap();
            }
        }
        g
    }

    #[test]
    fn fundamental_cycles_of_small_graphs() {
        let tri = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(fundamental_cycle(&tri, &ids(&[0, 1]), EdgeId(2)).unwrap(), ids(&[0, 1, 2]));
        assert!(fundamental_cycle(&tri, &ids(&[0, 1]), EdgeId(0)).is_err());
        let star = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]);
        assert_eq!(fundamental_cycle(&star, &ids(&[0, 1, 2]), EdgeId(3)).unwrap(), ids(&[0, 1, 3]));
        let counts = fundamental_cycle_membership_counts(&tri, &ids(&[0, 1]), &ids(&[2])).unwrap();
        assert_eq!(counts[&EdgeId(0)], 1);
        assert_eq!(counts[&EdgeId(1)], 1);
    }

    #[test]
    fn doubled_path_parity_subgraph_is_everything() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 1), (1, 2)]);
        let h = parity_eulerian_subgraph(&g, &ids(&[0, 1]), &ids(&[2, 3])).unwrap();
        assert_eq!(h, g.edge_ids());
        let counts = fundamental_cycle_membership_counts(&g, &ids(&[0, 1]), &ids(&[2, 3])).unwrap();
        assert_eq!(counts[&EdgeId(0)], 1);
        assert_eq!(counts[&EdgeId(1)], 1);
    }

    #[test]
    fn both_roles_give_even_connected_subgraphs() {
        let g = doubled_cycle(4);
        let t1 = ids(&[0, 1, 2]);
        let t2 = ids(&[4, 5, 6]);
        for role in [ParityRole::SecondTreeChords, ParityRole::FirstTreeChords] {
            let h = parity_eulerian_subgraph_with(&g, &t1, &t2, role).unwrap();
            let sub = g.edge_subgraph(&h);
            assert!(g.vertices().all(|x| sub.degree(x).is_multiple_of(2)));
            let keep = if role == ParityRole::SecondTreeChords { &t2 } else { &t1 };
            assert!(keep.is_subset(&h));
        }
        assert!(parity_eulerian_subgraph(&g, &t1, &t1).is_err());
    }

    #[test]
    fn euler_tours() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let t = euler_tour(&c4, &c4.edge_ids()).unwrap();
        assert_eq!(t.edges.len(), 4);
        let bowtie = graph(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]);
        let t = euler_tour(&bowtie, &bowtie.edge_ids()).unwrap();
        assert_eq!(t.edges.len(), 6);
        t.check(&bowtie).unwrap();
        let path = graph(3, &[(0, 1), (1, 2)]);
        assert!(euler_tour(&path, &path.edge_ids()).is_err());
        let two = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert!(euler_tour(&two, &two.edge_ids()).is_err());
    }

    #[test]
    fn domination() {
        let k4 = graph(4, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]);
        let tri = euler_tour(&k4, &ids(&[0, 1, 2])).unwrap();
        assert!(is_dominating(&k4, &tri));
        let cert = hamilton_from_trail(&k4, &tri).unwrap();
        assert_eq!(cert.cycle.len(), 6);
        let long = graph(5, &[(0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (3, 4), (3, 4)]);
        let short = euler_tour(&long, &ids(&[0, 1])).unwrap();
        assert!(!is_dominating(&long, &short));
        assert!(hamilton_from_trail(&long, &short).is_err());
    }

    #[test]
    fn line_graph_cycles() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let t = euler_tour(&c4, &c4.edge_ids()).unwrap();
        assert_eq!(hamilton_from_trail(&c4, &t).unwrap().cycle, t.edges);
        let dt = graph(3, &[(0, 1), (1, 2), (2, 0), (0, 1), (1, 2), (2, 0)]);
        let t = euler_tour(&dt, &dt.edge_ids()).unwrap();
        hamilton_from_trail(&dt, &t).unwrap().verify(&dt).unwrap();
    }

    #[test]
    fn pipeline() {
        let g = doubled_cycle(5);
        let cert = line_hamilton_pipeline(&g).unwrap();
        assert_eq!(cert.cycle.len(), 10);
        let mut k4 = graph(4, &[]);
        for _ in 0..2 {
            for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
                k4.add_edge(v(a), v(b)).unwrap();
            }
        }
        line_hamilton_pipeline(&k4).unwrap().verify(&k4).unwrap();
        let k4_single = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(matches!(line_hamilton_pipeline(&k4_single), Err(crate::Error::Precondition(_))));
    }

    fn random_even_graph(n: u32, cycles: &[Vec<u32>]) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for c in cycles {
            let c: Vec<u32> = c.iter().map(|x| x % n).collect();
            for i in 0..c.len() {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                if a != b {
                    g.add_edge(v(a), v(b)).unwrap();
                }
            }
        }
        g
    }

    proptest! {
        #[test]
        fn tour_uses_each_edge_once(n in 3u32..8, cycles in proptest::collection::vec(proptest::collection::vec(0u32..8, 2..6), 1..5)) {
            let g = random_even_graph(n, &cycles);
            let sub = g.edge_subgraph(&g.edge_ids());
            prop_assume!(g.vertices().all(|x| g.degree(x).is_multiple_of(2)));
            prop_assume!(sub.components().len() == 1 && g.edge_count() > 0);
            let t = euler_tour(&g, &g.edge_ids()).unwrap();
            let listed: BTreeSet<EdgeId> = t.edges.iter().copied().collect();
            prop_assert_eq!(listed.len(), t.edges.len());
            prop_assert_eq!(listed, g.edge_ids());
        }

        #[test]
        fn parity_subgraph_meets_every_cut_evenly(n in 4u32..9, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut g = Multigraph::with_vertices(n);
            for _ in 0..2 {
                let mut o: Vec<u32> = (0..n).collect();
                o.shuffle(&mut rng);
                for i in 0..n as usize {
                    g.add_edge(v(o[i]), v(o[(i + 1) % n as usize])).unwrap();
                }
            }
            let p = pack_spanning_trees(&g, 2).unwrap();
            let h = parity_eulerian_subgraph(&g, &p.trees[0], &p.trees[1]).unwrap();
            for mask in 1u32..(1 << (n - 1)) {
                let side: BTreeSet<VertexId> = (0..n - 1).filter(|i| mask & (1 << i) != 0).map(v).collect();
                let crossing = crate::connectivity::crossing_edges(&g, &side);
                prop_assert_eq!(crossing.intersection(&h).count() % 2, 0);
            }
            let counts = fundamental_cycle_membership_counts(&g, &p.trees[0], &p.trees[1]).unwrap();
            for e in &p.trees[0] {
                prop_assert_eq!(counts.get(e).copied().unwrap_or(0) % 2 == 1, h.contains(e));
            }
        }
    }
}
