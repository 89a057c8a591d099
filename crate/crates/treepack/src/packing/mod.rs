//! Spanning tree packings, bypass certificates and their verification.
//!
//! A packing is a list of pairwise edge-disjoint spanning trees of one host
//! graph. A bypass certificate names two trees of the packing and a walk
//! inside their union that joins two points while avoiding a forbidden
//! vertex.

mod baseline;
mod bypass;
mod corollaries;
mod lift;

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::multigraph::{EdgeId, Multigraph, Point, VertexId};

pub use baseline::{max_forest_packing, pack_spanning_trees, ForestPacking};
pub use bypass::bypass_packing;
pub(crate) use corollaries::UnionFind;
pub use corollaries::{catlin_check, glue_packings, one_edge_per_cut_packing, one_tree_bypass_packing, packing_minus_u};
pub use lift::{lift_packing_through_pinch, PinchLedger, PinchedEdge};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePacking {
    pub trees: Vec<BTreeSet<EdgeId>>,
}

impl TreePacking {
    pub fn new(trees: Vec<BTreeSet<EdgeId>>) -> Self {
        TreePacking { trees }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Index of the tree containing `e`.
    pub fn tree_of(&self, e: EdgeId) -> Option<usize> {
        self.trees.iter().position(|t| t.contains(&e))
    }

    /// Union of the trees with the given indices.
    pub fn union_of(&self, indices: &[usize]) -> BTreeSet<EdgeId> {
        indices.iter().flat_map(|&i| self.trees[i].iter().copied()).collect()
    }
}

/// One step of a walk: a vertex, or an edge traversed between the
/// neighbouring vertex steps. An edge step at either end of the walk is only
/// partially traversed, from the endpoint vertex to a point inside the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkStep {
    Vertex(VertexId),
    Edge(EdgeId),
}

/// Evidence that `trees[pair.0] ∪ trees[pair.1]` contains an `a`-`b` path
/// avoiding `forbidden`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BypassCertificate {
    pub pair: (usize, usize),
    pub a: Point,
    pub b: Point,
    pub walk: Vec<WalkStep>,
    pub forbidden: VertexId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Check a packing, and optionally a certificate, against `host` without
/// trusting whoever produced them.
pub fn verify_packing(host: &Multigraph, packing: &TreePacking, cert: Option<&BypassCertificate>) -> PackingReport {
    let mut violations = Vec::new();
    let mut owner: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, tree) in packing.trees.iter().enumerate() {
        for &e in tree {
            if let Some(j) = owner.insert(e, i) {
                violations.push(format!("edge {e} is shared by trees {j} and {i}"));
            }
        }
        if let Err(msg) = check_spanning_tree(host, tree) {
            violations.push(format!("tree {i}: {msg}"));
        }
    }
    if let Some(c) = cert {
        let (i, j) = c.pair;
        if i >= packing.len() || j >= packing.len() {
            violations.push(format!("certificate names trees {i} and {j} but the packing has {}", packing.len()));
        } else {
            let allowed = packing.union_of(&[i, j]);
            if let Err(msg) = check_walk(host, &allowed, c.forbidden, c.a, c.b, &c.walk) {
                violations.push(format!("certificate walk: {msg}"));
            }
        }
    }
    PackingReport { ok: violations.is_empty(), violations }
}

/// `Ok` when `tree` is the edge set of a spanning tree of `g`.
pub fn check_spanning_tree(g: &Multigraph, tree: &BTreeSet<EdgeId>) -> Result<(), String> {
    if let Some(e) = tree.iter().find(|e| !g.has_edge(**e)) {
        return Err(format!("{e} is not an edge of the host"));
    }
    let n = g.vertex_count();
    if n == 0 {
        return if tree.is_empty() { Ok(()) } else { Err("nonempty tree on an empty graph".into()) };
    }
    if tree.len() != n - 1 {
        return Err(format!("has {} edges, a spanning tree needs {}", tree.len(), n - 1));
    }
    let comps = g.edge_subgraph(tree).components();
    if comps.len() != 1 {
        return Err(format!("leaves {} components", comps.len()));
    }
    Ok(())
}

/// Endpoints of `e` other than `forbidden`, the places where a walk can
/// leave the point `p`.
fn anchors(g: &Multigraph, p: Point, forbidden: VertexId) -> Vec<VertexId> {
    match p {
        Point::Vertex(x) if x != forbidden && g.has_vertex(x) => vec![x],
        Point::Vertex(_) => Vec::new(),
        Point::EdgeInterior(e) => match g.endpoints(e) {
            Some((x, y)) => [x, y].into_iter().filter(|&z| z != forbidden).collect(),
            None => Vec::new(),
        },
    }
}

/// A shortest `a`-`b` walk in `allowed` that avoids `forbidden`. The edges
/// carrying `a` or `b` are never traversed in full, so the walk is an arc.
/// A point joined to itself needs no edges.
pub fn find_bypass(
    g: &Multigraph,
    allowed: &BTreeSet<EdgeId>,
    forbidden: VertexId,
    a: Point,
    b: Point,
) -> Option<Vec<WalkStep>> {
    let point_ok = |p: Point| match p {
        Point::Vertex(x) => x != forbidden && g.has_vertex(x),
        Point::EdgeInterior(e) => allowed.contains(&e) && g.has_edge(e),
    };
    if a == b {
        let usable = g.point_exists(a) && a != Point::Vertex(forbidden);
        return usable.then(Vec::new);
    }
    if !point_ok(a) || !point_ok(b) {
        return None;
    }
    if let (Point::EdgeInterior(e), Point::EdgeInterior(f)) = (a, b) {
        if e == f {
            return Some(vec![WalkStep::Edge(e)]);
        }
    }
    let carriers: BTreeSet<EdgeId> = [a, b]
        .into_iter()
        .filter_map(|p| match p {
            Point::EdgeInterior(e) => Some(e),
            Point::Vertex(_) => None,
        })
        .collect();
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for &e in allowed {
        if carriers.contains(&e) {
            continue;
        }
        let Some((x, y)) = g.endpoints(e) else { continue };
        if x == forbidden || y == forbidden {
            continue;
        }
        adj.entry(x).or_default().push((e, y));
        adj.entry(y).or_default().push((e, x));
    }
    let targets: BTreeSet<VertexId> = anchors(g, b, forbidden).into_iter().collect();
    let mut parent: BTreeMap<VertexId, Option<(EdgeId, VertexId)>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for s in anchors(g, a, forbidden) {
        parent.insert(s, None);
        queue.push_back(s);
    }
    let mut end = None;
    while let Some(x) = queue.pop_front() {
        if targets.contains(&x) {
            end = Some(x);
            break;
        }
        for &(e, y) in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
            if let Entry::Vacant(slot) = parent.entry(y) {
                slot.insert(Some((e, x)));
                queue.push_back(y);
            }
        }
    }
    let mut x = end?;
    let mut rev = vec![WalkStep::Vertex(x)];
    while let Some((e, p)) = parent[&x] {
        rev.push(WalkStep::Edge(e));
        rev.push(WalkStep::Vertex(p));
        x = p;
    }
    let mut walk = Vec::with_capacity(rev.len() + 2);
    if let Point::EdgeInterior(e) = a {
        walk.push(WalkStep::Edge(e));
    }
    walk.extend(rev.into_iter().rev());
    if let Point::EdgeInterior(e) = b {
        walk.push(WalkStep::Edge(e));
    }
    Some(walk)
}

/// Whether `a` and `b` can be joined in `g` without passing `forbidden`.
pub fn bypass_exists(g: &Multigraph, forbidden: VertexId, a: Point, b: Point) -> bool {
    find_bypass(g, &g.edge_ids(), forbidden, a, b).is_some()
}

/// Check that `walk` is an `a`-`b` arc in `allowed` avoiding `forbidden`.
pub fn check_walk(
    g: &Multigraph,
    allowed: &BTreeSet<EdgeId>,
    forbidden: VertexId,
    a: Point,
    b: Point,
    walk: &[WalkStep],
) -> Result<(), String> {
    for p in [a, b] {
        match p {
            Point::Vertex(x) if x == forbidden => return Err(format!("endpoint {p} is the forbidden vertex")),
            _ if !g.point_exists(p) => return Err(format!("endpoint {p} is not in the host")),
            _ => {}
        }
    }
    let mut edges_seen = BTreeSet::new();
    for step in walk {
        if let WalkStep::Edge(e) = *step {
            if !allowed.contains(&e) {
                return Err(format!("{e} is not in the designated trees"));
            }
            if !edges_seen.insert(e) {
                return Err(format!("{e} is used twice"));
            }
        }
    }
    if walk.is_empty() {
        return if a == b { Ok(()) } else { Err("empty walk between distinct points".into()) };
    }
    if let [WalkStep::Edge(e)] = walk {
        return if a == Point::EdgeInterior(*e) && b == Point::EdgeInterior(*e) {
            Ok(())
        } else {
            Err("single edge step must carry both endpoints".into())
        };
    }
    let mut pos = 0;
    let mut at: VertexId;
    match a {
        Point::Vertex(x) => {
            if walk[0] != WalkStep::Vertex(x) {
                return Err(format!("walk does not start at {a}"));
            }
            at = x;
        }
        Point::EdgeInterior(e) => {
            let (WalkStep::Edge(f), Some(&WalkStep::Vertex(x))) = (walk[0], walk.get(1)) else {
                return Err(format!("walk does not leave {a} through its edge"));
            };
            if f != e || !g.is_incident(e, x) {
                return Err(format!("walk does not leave {a} through its edge"));
            }
            at = x;
            pos = 1;
        }
    }
    let mut vertices_seen = BTreeSet::from([at]);
    if at == forbidden {
        return Err(format!("walk visits the forbidden vertex {forbidden}"));
    }
    loop {
        if pos == walk.len() - 1 {
            return if b == Point::Vertex(at) { Ok(()) } else { Err(format!("walk ends at {at}, not {b}")) };
        }
        let WalkStep::Edge(e) = walk[pos + 1] else {
            return Err("two consecutive vertex steps".into());
        };
        if pos + 1 == walk.len() - 1 {
            return if b == Point::EdgeInterior(e) && g.is_incident(e, at) {
                Ok(())
            } else {
                Err(format!("walk ends inside {e}, not at {b}"))
            };
        }
        let Some(y) = g.other_end(e, at) else {
            return Err(format!("{e} is not incident to {at}"));
        };
        if walk[pos + 2] != WalkStep::Vertex(y) {
            return Err(format!("step after {e} is not its far endpoint {y}"));
        }
        if y == forbidden {
            return Err(format!("walk visits the forbidden vertex {forbidden}"));
        }
        if !vertices_seen.insert(y) {
            return Err(format!("walk repeats {y}"));
        }
        at = y;
        pos += 2;
    }
}

/// Path between two vertices inside an acyclic edge set.
pub(crate) fn tree_path(g: &Multigraph, edges: &BTreeSet<EdgeId>, from: VertexId, to: VertexId) -> Option<Vec<EdgeId>> {
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for &e in edges {
        let (x, y) = g.endpoints(e)?;
        adj.entry(x).or_default().push((e, y));
        adj.entry(y).or_default().push((e, x));
    }
    let mut parent: BTreeMap<VertexId, Option<(EdgeId, VertexId)>> = BTreeMap::from([(from, None)]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &(e, y) in adj.get(&x).map(|v| v.as_slice()).unwrap_or(&[]) {
            if let Entry::Vacant(slot) = parent.entry(y) {
                slot.insert(Some((e, x)));
                queue.push_back(y);
            }
        }
    }
    parent.get(&to)?;
    let mut path = Vec::new();
    let mut x = to;
    while let Some((e, p)) = parent[&x] {
        path.push(e);
        x = p;
    }
    path.reverse();
    Some(path)
}

/// Vertices reachable from `from` through `edges`.
pub(crate) fn reach(g: &Multigraph, edges: &BTreeSet<EdgeId>, from: VertexId) -> BTreeSet<VertexId> {
    let sub = g.edge_subgraph(edges);
    sub.components_avoiding(&BTreeSet::new(), &BTreeSet::new())
        .into_iter()
        .find(|c| c.contains(&from))
        .unwrap_or_default()
}

/// Put the edge `e` into `trees[slot]`: swap trees if another tree owns it,
/// otherwise add it and drop the lowest other edge on the closed cycle.
/// Trees listed in `pinned` are never swapped away from their position.
pub(crate) fn ensure_edge_in_tree(
    g: &Multigraph,
    trees: &mut [BTreeSet<EdgeId>],
    e: EdgeId,
    slot: usize,
    pinned: &[usize],
) -> crate::Result<()> {
    if trees[slot].contains(&e) {
        return Ok(());
    }
    if let Some(i) = trees.iter().position(|t| t.contains(&e)) {
        if pinned.contains(&i) {
            return Err(crate::error::invariant!("{e} sits in pinned tree {i}"));
        }
        trees.swap(i, slot);
        return Ok(());
    }
    let (x, y) = g.endpoints(e).ok_or_else(|| crate::error::invariant!("{e} missing from host"))?;
    let cycle = tree_path(g, &trees[slot], x, y).ok_or_else(|| crate::error::invariant!("tree {slot} does not span {x} and {y}"))?;
    let drop = *cycle.iter().min().ok_or_else(|| crate::error::invariant!("empty cycle"))?;
    trees[slot].remove(&drop);
    trees[slot].insert(e);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn path4() -> Multigraph {
        let mut g = Multigraph::with_vertices(4);
        for i in 0..3 {
            g.add_edge(v(i), v(i + 1)).unwrap();
        }
        g
    }

    #[test]
    fn bypass_on_path() {
        let g = path4();
        let all = g.edge_ids();
        let w = find_bypass(&g, &all, v(3), Point::Vertex(v(0)), Point::Vertex(v(2))).unwrap();
        assert_eq!(w.len(), 5);
        check_walk(&g, &all, v(3), Point::Vertex(v(0)), Point::Vertex(v(2)), &w).unwrap();
        assert!(find_bypass(&g, &all, v(1), Point::Vertex(v(0)), Point::Vertex(v(2))).is_none());
    }

    #[test]
    fn bypass_with_interior_points() {
        let g = path4();
        let all = g.edge_ids();
        let a = Point::EdgeInterior(EdgeId(0));
        let b = Point::EdgeInterior(EdgeId(2));
        let w = find_bypass(&g, &all, v(0), a, b).unwrap();
        check_walk(&g, &all, v(0), a, b, &w).unwrap();
        assert_eq!(w.first(), Some(&WalkStep::Edge(EdgeId(0))));
        assert_eq!(w.last(), Some(&WalkStep::Edge(EdgeId(2))));
        let same = find_bypass(&g, &all, v(0), a, a).unwrap();
        assert!(same.is_empty());
        let one = Point::EdgeInterior(EdgeId(1));
        assert!(find_bypass(&g, &all, v(1), one, one).is_some());
    }

    #[test]
    fn walk_through_forbidden_is_rejected() {
        let g = path4();
        let all = g.edge_ids();
        let walk = vec![
            WalkStep::Vertex(v(0)),
            WalkStep::Edge(EdgeId(0)),
            WalkStep::Vertex(v(1)),
            WalkStep::Edge(EdgeId(1)),
            WalkStep::Vertex(v(2)),
        ];
        assert!(check_walk(&g, &all, v(3), Point::Vertex(v(0)), Point::Vertex(v(2)), &walk).is_ok());
        assert!(check_walk(&g, &all, v(1), Point::Vertex(v(0)), Point::Vertex(v(2)), &walk).is_err());
        let partial: BTreeSet<EdgeId> = [EdgeId(0)].into();
        assert!(check_walk(&g, &partial, v(3), Point::Vertex(v(0)), Point::Vertex(v(2)), &walk).is_err());
    }

    #[test]
    fn shared_edge_is_reported() {
        let mut g = Multigraph::with_vertices(2);
        let e = g.add_edge(v(0), v(1)).unwrap();
        let p = TreePacking::new(vec![[e].into(), [e].into()]);
        let r = verify_packing(&g, &p, None);
        assert!(!r.ok);
        assert!(r.violations[0].contains("e0"));
    }

    #[test]
    fn ensure_edge_rotates_cycle() {
        let mut g = Multigraph::with_vertices(3);
        let a = g.add_edge(v(0), v(1)).unwrap();
        let b = g.add_edge(v(1), v(2)).unwrap();
        let c = g.add_edge(v(2), v(0)).unwrap();
        let mut trees = vec![BTreeSet::from([a, b])];
        ensure_edge_in_tree(&g, &mut trees, c, 0, &[]).unwrap();
        assert!(trees[0].contains(&c));
        assert!(check_spanning_tree(&g, &trees[0]).is_ok());
    }
}
