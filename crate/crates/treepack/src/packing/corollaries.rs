//! Packings derived from the bypass construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::bypass::{check_instance, pack_minus_u};
use super::{bypass_packing, check_spanning_tree, verify_packing, BypassCertificate, TreePacking, WalkStep};
use crate::connectivity::{edge_connectivity, global_edge_connectivity, is_min_uv_cut_at_u, local_edge_connectivity};
use crate::error::{invariant, precondition, Result};
use crate::multigraph::{ContractionMap, EdgeId, Multigraph, Point, VertexId};

/// `k` edge-disjoint spanning trees of `G - u`, for any `u` whose edges form
/// a minimum `u`-`v` cut for some `v` in a `2k`-edge-connected graph.
pub fn packing_minus_u(g: &Multigraph, u: VertexId, k: usize) -> Result<TreePacking> {
    if !g.has_vertex(u) {
        return Err(precondition!("{u} is not a vertex"));
    }
    if g.vertex_count() == 1 {
        return Ok(TreePacking::new(vec![BTreeSet::new(); k]));
    }
    let mut partner = None;
    for v in g.vertices().filter(|&v| v != u) {
        if is_min_uv_cut_at_u(g, u, v)? {
            partner = Some(v);
            break;
        }
    }
    let v = partner.ok_or_else(|| precondition!("the edges at {u} are not a minimum cut towards any vertex"))?;
    check_instance(g, u, v, k)?;
    let packing = TreePacking::new(pack_minus_u(g, u, v, None, k)?);
    let report = verify_packing(&g.remove_vertex(u), &packing, None);
    if !report.ok {
        return Err(invariant!("packing of G - {u} invalid: {}", report.violations.join("; ")));
    }
    Ok(packing)
}

/// `k - 1` spanning trees of `G - u` where the first tree alone contains an
/// `a`-`b` path avoiding `v`.
pub fn one_tree_bypass_packing(
    g: &Multigraph,
    u: VertexId,
    v: VertexId,
    a: Point,
    b: Point,
    k: usize,
) -> Result<(TreePacking, BypassCertificate)> {
    if let (Point::EdgeInterior(ea), Point::EdgeInterior(eb)) = (a, b) {
        if ea != eb && g.is_incident(ea, v) && g.is_incident(eb, v) {
            return Err(precondition!("{a} and {b} both lie on edges at {v}"));
        }
    }
    let (packing, cert) = bypass_packing(g, u, v, a, b, k)?;
    let host = g.remove_vertex(u);
    let seed: Vec<EdgeId> = cert
        .walk
        .iter()
        .filter_map(|s| match s {
            WalkStep::Edge(e) => Some(*e),
            WalkStep::Vertex(_) => None,
        })
        .collect();
    let mut uf = UnionFind::default();
    let mut merged = BTreeSet::new();
    for &e in &seed {
        let (x, y) = host.endpoints(e).ok_or_else(|| invariant!("{e} missing from host"))?;
        if !uf.union(x, y) {
            return Err(invariant!("bypass walk closes a cycle at {e}"));
        }
        merged.insert(e);
    }
    for e in packing.union_of(&[0, 1]) {
        let (x, y) = host.endpoints(e).ok_or_else(|| invariant!("{e} missing from host"))?;
        if uf.union(x, y) {
            merged.insert(e);
        }
    }
    let mut trees = vec![merged];
    trees.extend(packing.trees.into_iter().skip(2));
    let out = TreePacking::new(trees);
    let cert = BypassCertificate { pair: (0, 0), ..cert };
    let report = verify_packing(&host, &out, Some(&cert));
    if !report.ok {
        return Err(invariant!("single-tree bypass packing invalid: {}", report.violations.join("; ")));
    }
    Ok((out, cert))
}

/// `k` edge-disjoint spanning trees of `G` where each tree uses exactly one
/// edge of a minimum `u`-`v` cut.
pub fn one_edge_per_cut_packing(g: &Multigraph, u: VertexId, v: VertexId, k: usize) -> Result<TreePacking> {
    if u == v || !g.has_vertex(u) || !g.has_vertex(v) {
        return Err(precondition!("u and v must be two distinct vertices"));
    }
    let (kappa, _) = global_edge_connectivity(g)?;
    if kappa < 2 * k {
        return Err(precondition!("edge connectivity {kappa} is below 2k = {}", 2 * k));
    }
    let (_, cut) = local_edge_connectivity(g, &BTreeSet::from([u]), &BTreeSet::from([v]))?;
    let (side_u, side_v) = if cut.side_a.contains(&u) { (cut.side_a, cut.side_b) } else { (cut.side_b, cut.side_a) };

    let (gu, mu) = g.contract(&side_u)?;
    let xu = mu.image[&u];
    let trees_v = pack_minus_u(&gu, xu, v, None, k)?;
    let (gv, mv) = g.contract(&side_v)?;
    let xv = mv.image[&v];
    let trees_u = pack_minus_u(&gv, xv, u, None, k)?;

    let cut_edges: Vec<EdgeId> = cut.edges.iter().copied().collect();
    let trees: Vec<BTreeSet<EdgeId>> = (0..k)
        .map(|i| {
            let mut t: BTreeSet<EdgeId> = trees_u[i].union(&trees_v[i]).copied().collect();
            t.insert(cut_edges[i]);
            t
        })
        .collect();
    let out = TreePacking::new(trees);
    let report = verify_packing(g, &out, None);
    if !report.ok {
        return Err(invariant!("cut-respecting packing invalid: {}", report.violations.join("; ")));
    }
    Ok(out)
}

/// `k` edge-disjoint spanning trees of `G - F` for an edge set `F` of size
/// at most `k` in a `2k`-edge-connected graph, or of size `k + 1` in a
/// `(2k + 1)`-edge-connected graph.
pub fn catlin_check(g: &Multigraph, f: &BTreeSet<EdgeId>, k: usize) -> Result<TreePacking> {
    if let Some(e) = f.iter().find(|e| !g.has_edge(**e)) {
        return Err(precondition!("{e} is not an edge of the graph"));
    }
    let n = g.vertex_count();
    if n <= 1 || k == 0 {
        return Ok(TreePacking::new(vec![BTreeSet::new(); k]));
    }
    let kappa = edge_connectivity(g);
    let mut work = g.clone();
    let mut removed = f.clone();
    if f.len() > k + 1 {
        return Err(precondition!("{} removed edges exceed k + 1 = {}", f.len(), k + 1));
    }
    if f.len() == k + 1 {
        if kappa < 2 * k + 1 {
            return Err(precondition!("removing k + 1 edges needs connectivity {}, have {kappa}", 2 * k + 1));
        }
        // One edge out of a (2k+1)-connected graph leaves it 2k-connected.
        let first = *f.first().expect("nonempty");
        work = work.remove_edges(&BTreeSet::from([first]));
        removed.remove(&first);
    } else if kappa < 2 * k {
        return Err(precondition!("edge connectivity {kappa} is below 2k = {}", 2 * k));
    }
    // Removing extra edges only makes the statement stronger.
    for e in work.edge_ids() {
        if removed.len() >= k {
            break;
        }
        removed.insert(e);
    }
    let hub = work.next_vertex_id();
    let (pinched, _) = work.pinch(&removed, hub)?;
    let root = work.vertices().next().expect("graph has vertices");
    let trees = pack_minus_u(&pinched, hub, root, None, k)?;
    let out = TreePacking::new(trees);
    let rest = g.remove_edges(f);
    let report = verify_packing(&rest, &out, None);
    if !report.ok {
        return Err(invariant!("packing of G - F invalid: {}", report.violations.join("; ")));
    }
    Ok(out)
}

/// Combine a packing of a contraction with packings of the contracted
/// blobs: tree `i` of the result is tree `i` of `outer` plus tree `i` of
/// every blob packing.
pub fn glue_packings(
    g: &Multigraph,
    map: &ContractionMap,
    outer: &TreePacking,
    inner: &BTreeMap<VertexId, TreePacking>,
) -> Result<TreePacking> {
    let k = outer.len();
    let mut trees = outer.trees.clone();
    for t in &trees {
        if let Some(e) = t.iter().find(|e| !map.surviving.contains(e) || !g.has_edge(**e)) {
            return Err(precondition!("outer tree edge {e} does not survive the contraction"));
        }
    }
    for (&x, blob) in &map.blobs {
        if blob.len() < 2 {
            continue;
        }
        let packing = inner.get(&x).ok_or_else(|| precondition!("no packing for blob {x}"))?;
        if packing.len() != k {
            return Err(precondition!("blob {x} has {} trees, outer packing has {k}", packing.len()));
        }
        let sub = g.induced_subgraph(blob);
        for (i, t) in packing.trees.iter().enumerate() {
            check_spanning_tree(&sub, t).map_err(|m| precondition!("blob {x} tree {i}: {m}"))?;
            trees[i].extend(t.iter().copied());
        }
    }
    if let Some(x) = inner.keys().find(|x| !map.blobs.contains_key(x)) {
        return Err(precondition!("packing given for unknown blob {x}"));
    }
    let out = TreePacking::new(trees);
    let report = verify_packing(g, &out, None);
    if !report.ok {
        return Err(invariant!("glued packing invalid: {}", report.violations.join("; ")));
    }
    Ok(out)
}

#[derive(Default)]
pub(crate) struct UnionFind {
    parent: HashMap<VertexId, VertexId>,
}

impl UnionFind {
    pub(crate) fn find(&mut self, x: VertexId) -> VertexId {
        let p = *self.parent.entry(x).or_insert(x);
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.parent.insert(x, r);
        r
    }

    /// Merge the classes of `x` and `y`; false when already merged.
    pub(crate) fn union(&mut self, x: VertexId, y: VertexId) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent.insert(rx, ry);
        true
    }
}
