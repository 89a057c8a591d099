//! Loop-free multigraphs with stable vertex and edge identifiers.
//!
//! Every structural operation (contraction, induced minors, splitting off,
//! pinching, ...) returns a new value. Edge identifiers are never reused
//! along a derivation chain: each graph carries counters for fresh vertex
//! and edge ids that only grow, so a packing computed on a derived graph can
//! name edges of its ancestors without ambiguity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invariant, precondition, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A vertex, or an interior point of an edge. Where on the edge does not matter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Vertex(VertexId),
    EdgeInterior(EdgeId),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "{v}"),
            Point::EdgeInterior(e) => write!(f, "inside {e}"),
        }
    }
}

/// Where a derived edge came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Created by splitting off the two edges at a common vertex.
    Split(EdgeId, EdgeId),
    /// One of the two halves created by pinching the edge.
    Pinch(EdgeId),
    /// One piece of a subdivided edge.
    Subdivide(EdgeId),
}

#[derive(Clone, Debug, Default)]
pub struct Multigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    incidence: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    provenance: BTreeMap<EdgeId, Provenance>,
    next_vertex: u32,
    next_edge: u32,
}

/// Structural equality: same vertices, same edges with the same endpoints.
impl PartialEq for Multigraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Multigraph {}

/// Result of collapsing vertex sets to single vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionMap {
    /// Original vertex to the vertex representing it after contraction.
    pub image: BTreeMap<VertexId, VertexId>,
    /// Original edges whose endpoints land on distinct vertices.
    pub surviving: BTreeSet<EdgeId>,
    /// Each new vertex with the set of original vertices it stands for.
    pub blobs: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl ContractionMap {
    pub fn map_vertex(&self, v: VertexId) -> Option<VertexId> {
        self.image.get(&v).copied()
    }

    /// Where a point of the original graph ends up. An interior point of a
    /// deleted edge collapses onto the contracted vertex.
    pub fn map_point(&self, original: &Multigraph, p: Point) -> Option<Point> {
        match p {
            Point::Vertex(v) => self.map_vertex(v).map(Point::Vertex),
            Point::EdgeInterior(e) => {
                if self.surviving.contains(&e) {
                    Some(p)
                } else {
                    let (a, _) = original.endpoints(e)?;
                    self.map_vertex(a).map(Point::Vertex)
                }
            }
        }
    }
}

/// The edges that replaced each pinched edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinchRecord {
    pub hub: VertexId,
    /// Pinched edge `xy` to the new edges `(xw, yw)`.
    pub halves: BTreeMap<EdgeId, (EdgeId, EdgeId)>,
}

/// The edge set `H|_{G'}`: the edges of `h` that survive the contraction.
pub fn restriction(h: &BTreeSet<EdgeId>, map: &ContractionMap) -> BTreeSet<EdgeId> {
    h.intersection(&map.surviving).copied().collect()
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on vertices `0..n` without edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Self::new();
        for i in 0..n {
            g.insert_vertex(VertexId(i));
        }
        g
    }

    /// Build from explicit identifiers. Rejects loops, unknown endpoints and
    /// duplicate ids.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            if g.has_vertex(v) {
                return Err(precondition!("duplicate vertex {v}"));
            }
            g.insert_vertex(v);
        }
        for (id, a, b) in edges {
            g.add_edge_with_id(id, a, b)?;
        }
        Ok(g)
    }

    fn insert_vertex(&mut self, v: VertexId) {
        self.vertices.insert(v);
        self.incidence.entry(v).or_default();
        self.next_vertex = self.next_vertex.max(v.0 + 1);
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_vertex);
        self.insert_vertex(v);
        v
    }

    pub fn add_vertex_with_id(&mut self, v: VertexId) -> Result<()> {
        if self.has_vertex(v) {
            return Err(precondition!("vertex {v} already present"));
        }
        self.insert_vertex(v);
        Ok(())
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<EdgeId> {
        let id = EdgeId(self.next_edge);
        self.add_edge_with_id(id, a, b)?;
        Ok(id)
    }

    pub fn add_edge_with_id(&mut self, id: EdgeId, a: VertexId, b: VertexId) -> Result<()> {
        if a == b {
            return Err(precondition!("edge {id} would be a loop at {a}"));
        }
        if !self.has_vertex(a) || !self.has_vertex(b) {
            return Err(precondition!("edge {id} has an endpoint outside the vertex set"));
        }
        if self.edges.contains_key(&id) {
            return Err(precondition!("duplicate edge id {id}"));
        }
        self.edges.insert(id, (a, b));
        self.incidence.get_mut(&a).unwrap().insert(id);
        self.incidence.get_mut(&b).unwrap().insert(id);
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    fn add_derived_edge(&mut self, a: VertexId, b: VertexId, why: Provenance) -> Result<EdgeId> {
        let id = self.add_edge(a, b)?;
        self.provenance.insert(id, why);
        Ok(id)
    }

    fn drop_edge(&mut self, e: EdgeId) {
        if let Some((a, b)) = self.edges.remove(&e) {
            self.incidence.get_mut(&a).unwrap().remove(&e);
            self.incidence.get_mut(&b).unwrap().remove(&e);
            self.provenance.remove(&e);
        }
    }

    fn drop_vertex(&mut self, v: VertexId) {
        if let Some(inc) = self.incidence.remove(&v) {
            for e in inc {
                if let Some((a, b)) = self.edges.remove(&e) {
                    let o = if a == v { b } else { a };
                    if let Some(s) = self.incidence.get_mut(&o) {
                        s.remove(&e);
                    }
                    self.provenance.remove(&e);
                }
            }
        }
        self.vertices.remove(&v);
    }

    /// Make sure later fresh ids of `self` do not collide with ids of `other`.
    pub fn reserve_ids_of(&mut self, other: &Multigraph) {
        self.next_vertex = self.next_vertex.max(other.next_vertex);
        self.next_edge = self.next_edge.max(other.next_edge);
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.next_vertex)
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    /// `(id, a, b)` triples in id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().map(|(&e, &(a, b))| (e, a, b))
    }

    pub fn edge_ids(&self) -> BTreeSet<EdgeId> {
        self.edges.keys().copied().collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges.get(&e).copied()
    }

    pub fn provenance(&self, e: EdgeId) -> Option<Provenance> {
        self.provenance.get(&e).copied()
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> Option<VertexId> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }

    pub fn is_incident(&self, e: EdgeId, v: VertexId) -> bool {
        matches!(self.endpoints(e), Some((a, b)) if a == v || b == v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence.get(&v).map_or(0, |s| s.len())
    }

    /// Edges at `v` in id order.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.incidence.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incident(v).filter_map(|e| self.other_end(e, v)).collect()
    }

    /// Number of parallel edges between `a` and `b`.
    pub fn multiplicity(&self, a: VertexId, b: VertexId) -> usize {
        self.incident(a).filter(|&e| self.other_end(e, a) == Some(b)).count()
    }

    pub fn point_exists(&self, p: Point) -> bool {
        match p {
            Point::Vertex(v) => self.has_vertex(v),
            Point::EdgeInterior(e) => self.has_edge(e),
        }
    }

    /// Connected components in ascending order of their smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        self.components_avoiding(&BTreeSet::new(), &BTreeSet::new())
    }

    /// Components of the graph after deleting `gone_vertices` and `gone_edges`.
    pub fn components_avoiding(
        &self,
        gone_vertices: &BTreeSet<VertexId>,
        gone_edges: &BTreeSet<EdgeId>,
    ) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        for s in self.vertices() {
            if gone_vertices.contains(&s) || seen.contains(&s) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([s]);
            seen.insert(s);
            while let Some(x) = queue.pop_front() {
                comp.insert(x);
                for e in self.incident(x) {
                    if gone_edges.contains(&e) {
                        continue;
                    }
                    let y = self.other_end(e, x).unwrap();
                    if !gone_vertices.contains(&y) && seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// `G[U]`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> Multigraph {
        let mut g = self.clone();
        let gone: Vec<VertexId> = self.vertices().filter(|v| !keep.contains(v)).collect();
        for v in gone {
            g.drop_vertex(v);
        }
        g
    }

    /// `G - v`.
    pub fn remove_vertex(&self, v: VertexId) -> Multigraph {
        let mut g = self.clone();
        g.drop_vertex(v);
        g
    }

    pub fn remove_vertices(&self, gone: &BTreeSet<VertexId>) -> Multigraph {
        let mut g = self.clone();
        for &v in gone {
            g.drop_vertex(v);
        }
        g
    }

    pub fn remove_edges(&self, gone: &BTreeSet<EdgeId>) -> Multigraph {
        let mut g = self.clone();
        for &e in gone {
            g.drop_edge(e);
        }
        g
    }

    /// Spanning subgraph keeping only the listed edges.
    pub fn edge_subgraph(&self, keep: &BTreeSet<EdgeId>) -> Multigraph {
        let mut g = self.clone();
        let gone: Vec<EdgeId> = self.edges.keys().filter(|e| !keep.contains(e)).copied().collect();
        for e in gone {
            g.drop_edge(e);
        }
        g
    }

    /// Add `count` parallel copies of the edge `ab`.
    pub fn with_parallel_edges(&self, a: VertexId, b: VertexId, count: usize) -> Result<(Multigraph, Vec<EdgeId>)> {
        let mut g = self.clone();
        let mut ids = Vec::with_capacity(count);
        for _ in 0..count {
            ids.push(g.add_edge(a, b)?);
        }
        Ok((g, ids))
    }

    /// `G/U`: replace `U` by a fresh vertex and delete the resulting loops.
    pub fn contract(&self, set: &BTreeSet<VertexId>) -> Result<(Multigraph, ContractionMap)> {
        if set.is_empty() {
            return Err(precondition!("cannot contract an empty vertex set"));
        }
        if let Some(v) = set.iter().find(|v| !self.has_vertex(**v)) {
            return Err(precondition!("{v} is not a vertex of the graph"));
        }
        self.contract_blobs(std::slice::from_ref(set))
    }

    /// Contract several pairwise disjoint vertex sets at once.
    pub fn contract_blobs(&self, sets: &[BTreeSet<VertexId>]) -> Result<(Multigraph, ContractionMap)> {
        let mut image: BTreeMap<VertexId, VertexId> = self.vertices().map(|v| (v, v)).collect();
        let mut g = Multigraph::new();
        g.reserve_ids_of(self);
        let mut blobs = BTreeMap::new();
        let mut claimed = BTreeSet::new();
        for set in sets {
            if set.is_empty() {
                return Err(precondition!("cannot contract an empty vertex set"));
            }
            let x = g.next_vertex_id();
            g.next_vertex += 1;
            for &v in set {
                if !self.has_vertex(v) || !claimed.insert(v) {
                    return Err(precondition!("contracted sets must be disjoint subsets of the vertex set"));
                }
                image.insert(v, x);
            }
            blobs.insert(x, set.clone());
        }
        for &v in image.values() {
            if !g.has_vertex(v) {
                g.insert_vertex(v);
            }
        }
        let mut surviving = BTreeSet::new();
        for (e, a, b) in self.edges() {
            let (x, y) = (image[&a], image[&b]);
            if x != y {
                g.add_edge_with_id(e, x, y)?;
                if let Some(p) = self.provenance(e) {
                    g.provenance.insert(e, p);
                }
                surviving.insert(e);
            }
        }
        Ok((g, ContractionMap { image, surviving, blobs }))
    }

    /// `G∤U`: contract every component of `G - U` to a single vertex.
    pub fn induced_minor(&self, keep: &BTreeSet<VertexId>) -> Result<(Multigraph, ContractionMap)> {
        if let Some(v) = keep.iter().find(|v| !self.has_vertex(**v)) {
            return Err(precondition!("{v} is not a vertex of the graph"));
        }
        let comps = self.components_avoiding(keep, &BTreeSet::new());
        self.contract_blobs(&comps)
    }

    /// Replace the edges `e1 = s x` and `e2 = s y` by a fresh edge `x y`.
    pub fn split_off(&self, s: VertexId, e1: EdgeId, e2: EdgeId) -> Result<(Multigraph, EdgeId)> {
        if e1 == e2 {
            return Err(precondition!("split_off needs two distinct edges"));
        }
        let x = self
            .other_end(e1, s)
            .ok_or_else(|| precondition!("{e1} is not incident to {s}"))?;
        let y = self
            .other_end(e2, s)
            .ok_or_else(|| precondition!("{e2} is not incident to {s}"))?;
        if x == y {
            return Err(precondition!("splitting off {e1} and {e2} at {s} would create a loop at {x}"));
        }
        let mut g = self.clone();
        g.drop_edge(e1);
        g.drop_edge(e2);
        let new = g.add_derived_edge(x, y, Provenance::Split(e1, e2))?;
        Ok((g, new))
    }

    /// Replace every edge `x y` in `set` by `x w` and `y w`. A hub that is not
    /// yet a vertex is added first.
    pub fn pinch(&self, set: &BTreeSet<EdgeId>, hub: VertexId) -> Result<(Multigraph, PinchRecord)> {
        let mut g = self.clone();
        if !g.has_vertex(hub) {
            g.insert_vertex(hub);
        }
        let mut halves = BTreeMap::new();
        for &e in set {
            let (x, y) = self
                .endpoints(e)
                .ok_or_else(|| precondition!("{e} is not an edge of the graph"))?;
            if x == hub || y == hub {
                return Err(precondition!("pinching {e} at its own endpoint {hub} would create a loop"));
            }
            g.drop_edge(e);
            let xw = g.add_derived_edge(x, hub, Provenance::Pinch(e))?;
            let yw = g.add_derived_edge(y, hub, Provenance::Pinch(e))?;
            halves.insert(e, (xw, yw));
        }
        Ok((g, PinchRecord { hub, halves }))
    }

    /// Line graph with simple adjacency. Vertex `VertexId(e.0)` stands for the
    /// edge `e`; two such vertices are adjacent once if the edges share an
    /// endpoint.
    pub fn line_graph(&self) -> Multigraph {
        let mut l = Multigraph::new();
        for (e, _, _) in self.edges() {
            l.insert_vertex(VertexId(e.0));
        }
        let mut seen: BTreeSet<(EdgeId, EdgeId)> = BTreeSet::new();
        for v in self.vertices() {
            let inc: Vec<EdgeId> = self.incident(v).collect();
            for (i, &e) in inc.iter().enumerate() {
                for &f in &inc[i + 1..] {
                    if seen.insert((e.min(f), e.max(f))) {
                        l.add_edge(VertexId(e.0), VertexId(f.0))
                            .expect("distinct edges give distinct line-graph vertices");
                    }
                }
            }
        }
        l
    }

    /// Subdivide `e` with `count` inner vertices. Returns the inner vertices
    /// in order from the first endpoint of `e` and the new edges in the same
    /// order.
    pub fn subdivide(&self, e: EdgeId, count: usize) -> Result<(Multigraph, Vec<VertexId>, Vec<EdgeId>)> {
        let (a, b) = self
            .endpoints(e)
            .ok_or_else(|| precondition!("{e} is not an edge of the graph"))?;
        let mut g = self.clone();
        g.drop_edge(e);
        let inner: Vec<VertexId> = (0..count).map(|_| g.add_vertex()).collect();
        let mut chain = vec![a];
        chain.extend(&inner);
        chain.push(b);
        let mut pieces = Vec::with_capacity(count + 1);
        for w in chain.windows(2) {
            pieces.push(g.add_derived_edge(w[0], w[1], Provenance::Subdivide(e))?);
        }
        Ok((g, inner, pieces))
    }

    /// Subdivide several edges at once, in the order given. Each entry of
    /// the result holds the inner vertices and pieces as in [`subdivide`];
    /// an edge subdivided zero times is kept and is its own single piece.
    ///
    /// [`subdivide`]: Multigraph::subdivide
    #[allow(clippy::type_complexity)]
    pub fn subdivide_many(&self, plan: &[(EdgeId, usize)]) -> Result<(Multigraph, Vec<(Vec<VertexId>, Vec<EdgeId>)>)> {
        let mut g = self.clone();
        let mut out = Vec::with_capacity(plan.len());
        for &(e, count) in plan {
            let (a, b) = g
                .endpoints(e)
                .ok_or_else(|| precondition!("{e} is not an edge of the graph or appears twice"))?;
            if count == 0 {
                out.push((Vec::new(), vec![e]));
                continue;
            }
            g.drop_edge(e);
            let inner: Vec<VertexId> = (0..count).map(|_| g.add_vertex()).collect();
            let mut chain = vec![a];
            chain.extend(&inner);
            chain.push(b);
            let pieces = chain
                .windows(2)
                .map(|w| g.add_derived_edge(w[0], w[1], Provenance::Subdivide(e)))
                .collect::<Result<Vec<_>>>()?;
            out.push((inner, pieces));
        }
        Ok((g, out))
    }

    /// Check the structural invariants. Used by tests and by verifiers that
    /// receive graphs from outside.
    pub fn check_invariants(&self) -> Result<()> {
        for (e, a, b) in self.edges() {
            if a == b {
                return Err(invariant!("{e} is a loop"));
            }
            if !self.has_vertex(a) || !self.has_vertex(b) {
                return Err(invariant!("{e} has a dangling endpoint"));
            }
            if !self.incidence[&a].contains(&e) || !self.incidence[&b].contains(&e) {
                return Err(invariant!("incidence index misses {e}"));
            }
        }
        let total: usize = self.incidence.values().map(|s| s.len()).sum();
        if total != 2 * self.edge_count() {
            return Err(invariant!("incidence index has stale entries"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set<T: Ord + Copy>(xs: &[T]) -> BTreeSet<T> {
        xs.iter().copied().collect()
    }

    fn triangle() -> Multigraph {
        let mut g = Multigraph::with_vertices(3);
        g.add_edge(VertexId(0), VertexId(1)).unwrap();
        g.add_edge(VertexId(1), VertexId(2)).unwrap();
        g.add_edge(VertexId(2), VertexId(0)).unwrap();
        g
    }

    fn path(n: u32) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for i in 0..n - 1 {
            g.add_edge(VertexId(i), VertexId(i + 1)).unwrap();
        }
        g
    }

    #[test]
    fn loops_are_rejected() {
        let mut g = Multigraph::with_vertices(2);
        assert!(g.add_edge(VertexId(0), VertexId(0)).is_err());
        assert!(g.add_edge(VertexId(0), VertexId(5)).is_err());
    }

    #[test]
    fn contract_singleton_keeps_shape() {
        let g = triangle();
        let (h, map) = g.contract(&set(&[VertexId(0)])).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 3);
        assert_eq!(map.surviving, g.edge_ids());
    }

    #[test]
    fn contract_pair_of_triangle_gives_double_edge() {
        let g = triangle();
        let (h, map) = g.contract(&set(&[VertexId(0), VertexId(1)])).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2);
        assert!(!map.surviving.contains(&EdgeId(0)));
        let x = map.image[&VertexId(0)];
        assert_eq!(h.multiplicity(x, VertexId(2)), 2);
    }

    #[test]
    fn contract_everything_gives_a_point() {
        let g = triangle();
        let (h, _) = g.contract(g.vertex_set()).unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn contract_rejects_bad_sets() {
        let g = triangle();
        assert!(g.contract(&BTreeSet::new()).is_err());
        assert!(g.contract(&set(&[VertexId(9)])).is_err());
    }

    #[test]
    fn induced_minor_of_path() {
        let g = path(4);
        let (h, map) = g.induced_minor(&set(&[VertexId(0), VertexId(3)])).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 2);
        let x = map.image[&VertexId(1)];
        assert_eq!(map.image[&VertexId(2)], x);
        assert_eq!(h.multiplicity(VertexId(0), x), 1);
        assert_eq!(h.multiplicity(x, VertexId(3)), 1);
    }

    #[test]
    fn induced_minor_of_everything_is_identity() {
        let g = triangle();
        let (h, _) = g.induced_minor(g.vertex_set()).unwrap();
        assert_eq!(h, g);
    }

    #[test]
    fn restriction_of_triangle_tree() {
        let g = triangle();
        let (_, map) = g.contract(&set(&[VertexId(0), VertexId(1)])).unwrap();
        let tree = set(&[EdgeId(0), EdgeId(1)]);
        assert_eq!(restriction(&tree, &map), set(&[EdgeId(1)]));
    }

    #[test]
    fn split_off_path_middle() {
        let g = path(3);
        let (h, e) = g.split_off(VertexId(1), EdgeId(0), EdgeId(1)).unwrap();
        assert_eq!(h.degree(VertexId(1)), 0);
        assert_eq!(h.endpoints(e), Some((VertexId(0), VertexId(2))));
        assert_eq!(h.provenance(e), Some(Provenance::Split(EdgeId(0), EdgeId(1))));
    }

    #[test]
    fn split_off_rejects_loop() {
        let mut g = Multigraph::with_vertices(2);
        let a = g.add_edge(VertexId(0), VertexId(1)).unwrap();
        let b = g.add_edge(VertexId(0), VertexId(1)).unwrap();
        assert!(g.split_off(VertexId(0), a, b).is_err());
    }

    #[test]
    fn pinch_at_fresh_vertex() {
        let g = path(2);
        let (h, rec) = g.pinch(&BTreeSet::new(), VertexId(7)).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert!(rec.halves.is_empty());
        let (h, rec) = g.pinch(&set(&[EdgeId(0)]), VertexId(7)).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.degree(VertexId(7)), 2);
        assert!(!h.has_edge(EdgeId(0)));
        assert_eq!(rec.halves.len(), 1);
    }

    #[test]
    fn pinch_rejects_own_endpoint() {
        let g = path(2);
        assert!(g.pinch(&set(&[EdgeId(0)]), VertexId(0)).is_err());
    }

    #[test]
    fn line_graph_small_cases() {
        let l = triangle().line_graph();
        assert_eq!((l.vertex_count(), l.edge_count()), (3, 3));
        let l = path(3).line_graph();
        assert_eq!((l.vertex_count(), l.edge_count()), (2, 1));
    }

    #[test]
    fn line_graph_of_double_edge_is_simple() {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(VertexId(0), VertexId(1)).unwrap();
        g.add_edge(VertexId(0), VertexId(1)).unwrap();
        let l = g.line_graph();
        assert_eq!(l.edge_count(), 1);
    }

    #[test]
    fn subdivide_makes_a_chain() {
        let g = path(2);
        let (h, inner, pieces) = g.subdivide(EdgeId(0), 3).unwrap();
        assert_eq!(inner.len(), 3);
        assert_eq!(pieces.len(), 4);
        assert_eq!(h.vertex_count(), 5);
        assert_eq!(h.endpoints(pieces[0]).unwrap().0, VertexId(0));
        h.check_invariants().unwrap();
    }

    #[test]
    fn fresh_ids_never_reuse_deleted_edges() {
        let g = triangle();
        let h = g.remove_edges(&set(&[EdgeId(2)]));
        let mut h2 = h.clone();
        let e = h2.add_edge(VertexId(0), VertexId(2)).unwrap();
        assert!(e.0 >= 3);
    }
}
