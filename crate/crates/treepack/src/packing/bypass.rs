//! Packings of `G - u` whose first two trees contain a bypass.
//!
//! Input: a `2k`-edge-connected `G`, vertices `u`, `v` such that the edges
//! at `u` form a minimum `u`-`v` cut, and points `a`, `b` of `G - u` joined
//! by some path avoiding `v`. Output: `k` edge-disjoint spanning trees of
//! `G - u` where trees 0 and 1 together contain such a path.
//!
//! The construction recurses on the number of vertices. After adding
//! parallel `uv` edges until some minimum cut `S` keeps `u` and `v` on one
//! side `C`, either the other side `C'` has several vertices and the
//! problem splits into `G/C` and `G/C'`, or `C' = {w}` and `w` is removed
//! by repeated splitting off. In the second case the packing of the smaller
//! graph is lifted back by pinching (see [`super::lift`]), and the choice
//! of which `w`-edges must end up in trees 0 and 1 depends on where `a` and
//! `b` sit relative to `w` and to the components of `H - {u, v}`.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    bypass_exists, ensure_edge_in_tree, find_bypass, glue_packings, lift_packing_through_pinch, verify_packing,
    BypassCertificate, PinchLedger, PinchedEdge, TreePacking, WalkStep,
};
use crate::connectivity::{
    even_degree_fix, global_edge_connectivity, is_min_uv_cut_at_u, mader_split_pair, pair_connectivity,
    split_or_delete,
};
use crate::error::{invariant, precondition, Error, Result};
use crate::multigraph::{EdgeId, Multigraph, Point, VertexId};

type Trees = Vec<BTreeSet<EdgeId>>;

/// `k` edge-disjoint spanning trees of `G - u` with an `a`-`b` path
/// avoiding `v` inside trees 0 and 1, plus the certificate for that path.
pub fn bypass_packing(
    g: &Multigraph,
    u: VertexId,
    v: VertexId,
    a: Point,
    b: Point,
    k: usize,
) -> Result<(TreePacking, BypassCertificate)> {
    if k < 2 {
        return Err(precondition!("a bypass needs two trees, got k = {k}"));
    }
    check_instance(g, u, v, k)?;
    let host = g.remove_vertex(u);
    for p in [a, b] {
        if !host.point_exists(p) {
            return Err(precondition!("{p} is not a point of the graph without {u}"));
        }
    }
    if !bypass_exists(&host, v, a, b) {
        return Err(precondition!("no path from {a} to {b} avoids {v} after removing {u}"));
    }
    let trees = pack_minus_u(g, u, v, Some((a, b)), k)?;
    let packing = TreePacking::new(trees);
    let walk = find_bypass(&host, &packing.union_of(&[0, 1]), v, a, b)
        .ok_or_else(|| invariant!("finished packing lost the bypass"))?;
    let cert = BypassCertificate { pair: (0, 1), a, b, walk, forbidden: v };
    let report = verify_packing(&host, &packing, Some(&cert));
    if !report.ok {
        return Err(invariant!("produced packing fails verification: {}", report.violations.join("; ")));
    }
    Ok((packing, cert))
}

/// Connectivity and cut preconditions shared by every entry point.
pub(crate) fn check_instance(g: &Multigraph, u: VertexId, v: VertexId, k: usize) -> Result<()> {
    if u == v || !g.has_vertex(u) || !g.has_vertex(v) {
        return Err(precondition!("u and v must be two distinct vertices"));
    }
    let (kappa, _) = global_edge_connectivity(g)?;
    if kappa < 2 * k {
        return Err(precondition!("edge connectivity {kappa} is below 2k = {}", 2 * k));
    }
    if !is_min_uv_cut_at_u(g, u, v)? {
        return Err(precondition!("the edges at {u} are not a minimum {u}-{v} cut"));
    }
    Ok(())
}

/// Recursive core. `ends = None` asks for a plain packing.
pub(crate) fn pack_minus_u(
    g: &Multigraph,
    u: VertexId,
    v: VertexId,
    ends: Option<(Point, Point)>,
    k: usize,
) -> Result<Trees> {
    rec(g, u, v, ends, k, None)
}

fn rec(
    g: &Multigraph,
    u: VertexId,
    v: VertexId,
    ends: Option<(Point, Point)>,
    k: usize,
    parent: Option<usize>,
) -> Result<Trees> {
    let n = g.vertex_count();
    if let Some(p) = parent {
        if n >= p {
            return Err(invariant!("recursion did not shrink the graph ({n} vertices, parent had {p})"));
        }
    }
    let ends = ends.filter(|(a, b)| a != b);
    let trees = match n {
        0 | 1 => return Err(invariant!("graph with {n} vertices cannot hold both {u} and {v}")),
        2 => {
            if ends.is_some() {
                return Err(invariant!("two-vertex graph has no bypass endpoints"));
            }
            vec![BTreeSet::new(); k]
        }
        3 => base_case(g, u, v, ends, k)?,
        _ => step(g, u, v, ends, k)?,
    };
    certify(g, u, v, ends, &trees)?;
    Ok(trees)
}

fn certify(g: &Multigraph, u: VertexId, v: VertexId, ends: Option<(Point, Point)>, trees: &Trees) -> Result<()> {
    let host = g.remove_vertex(u);
    let packing = TreePacking::new(trees.clone());
    let cert = match ends {
        Some((a, b)) => {
            let walk = find_bypass(&host, &packing.union_of(&[0, 1]), v, a, b)
                .ok_or_else(|| invariant!("no {a}-{b} bypass of {v} in trees 0 and 1"))?;
            Some(BypassCertificate { pair: (0, 1), a, b, walk, forbidden: v })
        }
        None => None,
    };
    let report = verify_packing(&host, &packing, cert.as_ref());
    if report.ok {
        Ok(())
    } else {
        Err(invariant!("intermediate packing invalid: {}", report.violations.join("; ")))
    }
}

/// Three vertices `u, v, w`: every tree of `G - u` is a single `vw` edge.
fn base_case(g: &Multigraph, u: VertexId, v: VertexId, ends: Option<(Point, Point)>, k: usize) -> Result<Trees> {
    let w = g
        .vertices()
        .find(|&x| x != u && x != v)
        .ok_or_else(|| invariant!("three-vertex graph without a third vertex"))?;
    let vw: Vec<EdgeId> = g.incident(w).filter(|&e| g.other_end(e, w) == Some(v)).collect();
    if vw.len() < k {
        return Err(invariant!("only {} edges join {v} and {w}, need {k}", vw.len()));
    }
    let mut order: Vec<EdgeId> = Vec::with_capacity(vw.len());
    if let Some((a, b)) = ends {
        for p in [a, b] {
            if let Point::EdgeInterior(e) = p {
                if !vw.contains(&e) {
                    return Err(invariant!("{p} is not on a {v}-{w} edge"));
                }
                if !order.contains(&e) {
                    order.push(e);
                }
            }
        }
    }
    for e in vw {
        if !order.contains(&e) {
            order.push(e);
        }
    }
    Ok(order.into_iter().take(k).map(|e| BTreeSet::from([e])).collect())
}

fn step(g: &Multigraph, u: VertexId, v: VertexId, ends: Option<(Point, Point)>, k: usize) -> Result<Trees> {
    let n = g.vertex_count();
    let deg_u = g.degree(u);
    if pair_connectivity(g, u, v)? != deg_u {
        return Err(invariant!("edges at {u} stopped being a minimum {u}-{v} cut"));
    }
    let (merged, merge_map) = g.contract(&BTreeSet::from([u, v]))?;
    let x_uv = merge_map.image[&u];
    let (c_star, cut) = global_edge_connectivity(&merged)?;
    if c_star < 2 * k {
        return Err(invariant!("cuts keeping {u} and {v} together have size {c_star} < 2k"));
    }
    // Extra uv edges make every minimum cut keep u and v together.
    let extra = (c_star + 1).saturating_sub(deg_u);
    let (gp, _) = g.with_parallel_edges(u, v, extra)?;
    let far = if cut.side_a.contains(&x_uv) { cut.side_b } else { cut.side_a };
    if far.len() > 1 {
        split_at_cut(&gp, u, v, ends, k, far, n)
    } else {
        let w = *far.first().ok_or_else(|| invariant!("empty side of a minimum cut"))?;
        SplitAway::new(&gp, u, v, w, k, n)?.solve(ends)
    }
}

/// The far side `C'` of the minimum cut has at least two vertices: pack
/// `G[C']` through `G/C`, pack `G/C'` with the mapped points, and glue.
fn split_at_cut(
    gp: &Multigraph,
    u: VertexId,
    v: VertexId,
    ends: Option<(Point, Point)>,
    k: usize,
    far: BTreeSet<VertexId>,
    n: usize,
) -> Result<Trees> {
    let near: BTreeSet<VertexId> = gp.vertices().filter(|x| !far.contains(x)).collect();
    let (g_near, near_map) = gp.contract(&near)?;
    let x_near = near_map.image[&u];
    let far_root = *far.first().expect("far side has two vertices");
    let mut inner = rec(&g_near, x_near, far_root, None, k, Some(n))?;

    let (g_far, far_map) = gp.contract(&far)?;
    let mapped = match ends {
        Some((a, b)) => {
            let ma = far_map.map_point(gp, a).ok_or_else(|| invariant!("{a} lost in contraction"))?;
            let mb = far_map.map_point(gp, b).ok_or_else(|| invariant!("{b} lost in contraction"))?;
            Some((ma, mb))
        }
        None => None,
    };
    let outer = rec(&g_far, u, v, mapped, k, Some(n))?;

    let inside = gp.induced_subgraph(&far);
    if let Some((a, b)) = ends {
        if let Point::EdgeInterior(e) = a {
            if inside.has_edge(e) {
                ensure_edge_in_tree(&inside, &mut inner, e, 0, &[])?;
            }
        }
        if let Point::EdgeInterior(e) = b {
            if inside.has_edge(e) && !inner[0].contains(&e) {
                ensure_edge_in_tree(&inside, &mut inner, e, 1, &[0])?;
            }
        }
    }

    let host = gp.remove_vertex(u);
    let (_, host_map) = host.contract(&far)?;
    let x_far = host_map.image[&far_root];
    let glued = glue_packings(
        &host,
        &host_map,
        &TreePacking::new(outer),
        &BTreeMap::from([(x_far, TreePacking::new(inner))]),
    )?;
    Ok(glued.trees)
}

/// Where a point sits relative to the split vertex `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Place {
    /// A point that survives in `H`.
    Remaining,
    /// `w` itself.
    Hub,
    /// Inside a `w`-edge.
    HubEdge(EdgeId),
}

/// State for the case where one side of the minimum cut is a single vertex
/// `w` that gets split away completely.
struct SplitAway<'g> {
    u: VertexId,
    v: VertexId,
    w: VertexId,
    k: usize,
    n: usize,
    /// `G - u` for the current level; the lifted trees live here.
    target: Multigraph,
    gp: &'g Multigraph,
    h: Multigraph,
    host_h: Multigraph,
    ledger: PinchLedger,
    comp: BTreeMap<VertexId, usize>,
    comps: Vec<BTreeSet<VertexId>>,
}

impl<'g> SplitAway<'g> {
    fn new(gp: &'g Multigraph, u: VertexId, v: VertexId, w: VertexId, k: usize, n: usize) -> Result<Self> {
        let mut cur = gp.clone();
        let mut ledger = PinchLedger::new(w);
        if cur.degree(w) % 2 == 1 {
            let e = even_degree_fix(&cur, w, u, v)?;
            let x = cur.other_end(e, w).expect("edge chosen at w");
            if x == u {
                return Err(invariant!("parity fix picked an edge at {u}"));
            }
            ledger.free.insert(e, x);
            cur = cur.remove_edges(&BTreeSet::from([e]));
        }
        while cur.degree(w) > 0 {
            let (e1, e2) = mader_split_pair(&cur, w)?;
            let x = cur.other_end(e1, w).expect("pair edges sit at w");
            let y = cur.other_end(e2, w).expect("pair edges sit at w");
            let (next, created) = split_or_delete(&cur, w, e1, e2)?;
            match (x == u, y == u) {
                (true, true) => return Err(invariant!("admissible pair {e1}, {e2} has both edges at {u}")),
                (true, false) => {
                    ledger.free.insert(e2, y);
                }
                (false, true) => {
                    ledger.free.insert(e1, x);
                }
                (false, false) => match created {
                    Some(ep) => {
                        ledger.pinched.insert(ep, PinchedEdge { x, half_x: e1, y, half_y: e2 });
                    }
                    None => {
                        ledger.free.insert(e1, x);
                        ledger.free.insert(e2, y);
                    }
                },
            }
            cur = next;
        }
        if ledger.weight() < k {
            return Err(invariant!("ledger weight {} is below k = {k}", ledger.weight()));
        }
        let h = cur.remove_vertex(w);
        if pair_connectivity(&h, u, v)? != h.degree(u) {
            return Err(invariant!("splitting at {w} broke the minimum cut at {u}"));
        }
        let host_h = h.remove_vertex(u);
        let comps = h.components_avoiding(&BTreeSet::from([u, v]), &BTreeSet::new());
        let mut comp = BTreeMap::new();
        for (i, c) in comps.iter().enumerate() {
            for &x in c {
                comp.insert(x, i);
            }
        }
        Ok(SplitAway { u, v, w, k, n, target: gp.remove_vertex(u), gp, h, host_h, ledger, comp, comps })
    }

    fn place(&self, p: Point) -> Place {
        match p {
            Point::Vertex(x) if x == self.w => Place::Hub,
            Point::EdgeInterior(e) if self.gp.is_incident(e, self.w) => Place::HubEdge(e),
            _ => Place::Remaining,
        }
    }

    /// Component of `H - {u, v}` holding a point of `H - u`.
    fn comp_of(&self, p: Point) -> Result<usize> {
        let anchor = match p {
            Point::Vertex(x) => Some(x),
            Point::EdgeInterior(e) => self
                .h
                .endpoints(e)
                .and_then(|(x, y)| [x, y].into_iter().find(|&z| z != self.v && z != self.u)),
        };
        anchor
            .and_then(|x| self.comp.get(&x).copied())
            .ok_or_else(|| invariant!("{p} lies in no component of H - {{u, v}}"))
    }

    /// The lowest `w`-edge leaving component `c`, with the point of `H`
    /// standing for it: its far endpoint when the edge is free, otherwise
    /// the interior of the pinched edge it belongs to.
    fn exit_from(&self, c: usize) -> Result<(Point, EdgeId)> {
        for g in self.target.incident(self.w) {
            let y = self.target.other_end(g, self.w).expect("incident edge");
            if self.comp.get(&y) != Some(&c) {
                continue;
            }
            if self.ledger.free.contains_key(&g) {
                return Ok((Point::Vertex(y), g));
            }
            if let Some(ep) = self.ledger.pinched_parent(g) {
                return Ok((Point::EdgeInterior(ep), g));
            }
            return Err(invariant!("{g} is missing from the ledger"));
        }
        Err(invariant!("no edge joins component {c} to {}", self.w))
    }

    /// Walking from the start (or the end) of `walk`, the half of the first
    /// pinched edge at the vertex where the walk enters it.
    fn first_pinched_half(&self, walk: &[WalkStep], from_start: bool) -> Option<EdgeId> {
        let steps: Vec<WalkStep> = if from_start { walk.to_vec() } else { walk.iter().rev().copied().collect() };
        let mut last_vertex = None;
        for s in steps {
            match s {
                WalkStep::Vertex(x) => last_vertex = Some(x),
                WalkStep::Edge(e) => {
                    if let Some(p) = self.ledger.pinched.get(&e) {
                        return p.half_at(last_vertex?);
                    }
                }
            }
        }
        None
    }

    fn recurse(&self, ends: Option<(Point, Point)>) -> Result<Trees> {
        rec(&self.h, self.u, self.v, ends, self.k, Some(self.n))
    }

    fn pair_walk(&self, trees: &Trees, a: Point, b: Point) -> Result<Vec<WalkStep>> {
        let allowed: BTreeSet<EdgeId> = trees[0].union(&trees[1]).copied().collect();
        find_bypass(&self.host_h, &allowed, self.v, a, b).ok_or_else(|| invariant!("no {a}-{b} bypass in trees 0 and 1 of H"))
    }

    fn lift(&self, trees: Trees, e1: Option<EdgeId>, e2: Option<EdgeId>) -> Result<Trees> {
        let lifted = lift_packing_through_pinch(&self.target, &TreePacking::new(trees), &self.ledger, e1, e2)?;
        Ok(lifted.trees)
    }

    fn solve(&self, ends: Option<(Point, Point)>) -> Result<Trees> {
        let Some((a, b)) = ends else {
            let trees = self.recurse(None)?;
            return self.lift(trees, None, None);
        };
        let (a, b) = if self.place(a) != Place::Remaining && self.place(b) == Place::Remaining { (b, a) } else { (a, b) };
        match (self.place(a), self.place(b)) {
            (Place::Remaining, Place::Remaining) => {
                if bypass_exists(&self.host_h, self.v, a, b) {
                    self.both_remain_connected(a, b)
                } else {
                    self.both_remain_separated(a, b)
                }
            }
            (Place::Remaining, far) => {
                let gb = match far {
                    Place::HubEdge(g) => g,
                    // Any path to w enters it through an edge from a's component.
                    _ => self.exit_from(self.comp_of(a)?)?.1,
                };
                match self.ledger.pinched_parent(gb) {
                    Some(ep) => self.far_on_pinched(a, gb, ep),
                    None => self.far_on_free(a, gb),
                }
            }
            (pa, pb) => {
                let edge = |p: Place| match p {
                    Place::HubEdge(g) => Some(g),
                    _ => None,
                };
                self.both_at_hub(edge(pa), edge(pb))
            }
        }
    }

    /// `a`, `b` in `H` and joined in `H - u` avoiding `v`.
    fn both_remain_connected(&self, a: Point, b: Point) -> Result<Trees> {
        let trees = self.recurse(Some((a, b)))?;
        let walk = self.pair_walk(&trees, a, b)?;
        let e1 = self.first_pinched_half(&walk, true);
        let e2 = self.first_pinched_half(&walk, false);
        self.lift(trees, e1, e2)
    }

    /// `a`, `b` in `H` but in different components of `H - {u, v}`; every
    /// bypass in `G - u` runs through `w`.
    fn both_remain_separated(&self, a: Point, b: Point) -> Result<Trees> {
        let (a2, ga) = self.exit_from(self.comp_of(a)?)?;
        let (b2, gb) = self.exit_from(self.comp_of(b)?)?;
        let trees = self.two_sided(a, a2, b, b2)?;
        let wa = self.pair_walk(&trees, a, a2)?;
        let wb = self.pair_walk(&trees, b, b2)?;
        let e1 = self.first_pinched_half(&wa, true).unwrap_or(ga);
        let e2 = self.first_pinched_half(&wb, true).unwrap_or(gb);
        self.lift(trees, Some(e1), Some(e2))
    }

    /// `b` inside a `w`-edge `gb` that is half of the pinched edge `ep`.
    fn far_on_pinched(&self, a: Point, gb: EdgeId, ep: EdgeId) -> Result<Trees> {
        let ca = self.comp_of(a)?;
        let pe = self.ledger.pinched[&ep];
        let touches = [pe.x, pe.y].into_iter().any(|z| self.comp.get(&z) == Some(&ca));
        let (trees, e1) = if touches {
            let target = Point::EdgeInterior(ep);
            let trees = self.recurse(Some((a, target)))?;
            let walk = self.pair_walk(&trees, a, target)?;
            let e1 = self.first_pinched_half(&walk, true);
            (trees, e1)
        } else {
            let (a2, ga) = self.exit_from(ca)?;
            let c = [pe.x, pe.y]
                .into_iter()
                .filter(|&z| z != self.v)
                .min()
                .ok_or_else(|| invariant!("pinched edge {ep} has no end besides {}", self.v))?;
            let trees = self.two_sided(a, a2, Point::Vertex(c), Point::EdgeInterior(ep))?;
            if !trees[0].contains(&ep) && !trees[1].contains(&ep) {
                return Err(invariant!("{ep} missing from trees 0 and 1"));
            }
            let walk = self.pair_walk(&trees, a, a2)?;
            (trees.clone(), Some(self.first_pinched_half(&walk, true).unwrap_or(ga)))
        };
        let e2 = Some(gb).filter(|&g| Some(g) != e1);
        self.lift(trees, e1, e2)
    }

    /// `b` inside a free `w`-edge `gb`.
    fn far_on_free(&self, a: Point, gb: EdgeId) -> Result<Trees> {
        let (a2, ga) = self.exit_from(self.comp_of(a)?)?;
        let trees = self.recurse(Some((a, a2)))?;
        let walk = self.pair_walk(&trees, a, a2)?;
        let e1 = self.first_pinched_half(&walk, true).unwrap_or(ga);
        let e2 = Some(gb).filter(|&g| g != e1);
        self.lift(trees, Some(e1), e2)
    }

    /// Both points at `w`: `w` itself or inside `w`-edges.
    fn both_at_hub(&self, ga: Option<EdgeId>, gb: Option<EdgeId>) -> Result<Trees> {
        let mut trees = self.recurse(None)?;
        let owners: BTreeSet<usize> = [ga, gb]
            .into_iter()
            .flatten()
            .filter_map(|g| self.ledger.pinched_parent(g))
            .filter_map(|ep| trees.iter().position(|t| t.contains(&ep)))
            .collect();
        let mut open_slots: Vec<usize> = [0, 1].into_iter().filter(|s| !owners.contains(s)).collect();
        for &o in owners.iter().filter(|&&o| o >= 2) {
            let s = open_slots.remove(0);
            trees.swap(o, s);
        }
        let gb = gb.filter(|&g| Some(g) != ga);
        self.lift(trees, ga, gb)
    }

    /// A packing of `H - u` whose trees 0 and 1 join `a` to `a2` and `c` to
    /// `c2`, where `a` and `c` lie in different components of `H - {u, v}`.
    /// Each side is packed in `H` with the other side and `v` contracted,
    /// and the two packings are united at `v`.
    fn two_sided(&self, a: Point, a2: Point, c: Point, c2: Point) -> Result<Trees> {
        let ca = self.comp_of(a)?;
        let side_a = &self.comps[ca];
        let rest: BTreeSet<VertexId> = self.h.vertices().filter(|x| *x != self.u && !side_a.contains(x)).collect();
        let mut with_v = side_a.clone();
        with_v.insert(self.v);

        let half = |collapse: &BTreeSet<VertexId>, p: Point, q: Point| -> Result<Trees> {
            let (hh, map) = self.h.contract(collapse)?;
            let x = map.image[&self.v];
            let mp = map.map_point(&self.h, p).ok_or_else(|| invariant!("{p} lost in contraction"))?;
            let mq = map.map_point(&self.h, q).ok_or_else(|| invariant!("{q} lost in contraction"))?;
            rec(&hh, self.u, x, Some((mp, mq)), self.k, Some(self.n))
        };
        let ta = half(&rest, a, a2)?;
        let tc = half(&with_v, c, c2)?;
        let trees: Trees = ta.into_iter().zip(tc).map(|(x, y)| x.union(&y).copied().collect()).collect();
        let packing = TreePacking::new(trees);
        let report = verify_packing(&self.host_h, &packing, None);
        if !report.ok {
            return Err(Error::Invariant(format!("two-sided union invalid: {}", report.violations.join("; "))));
        }
        Ok(packing.trees)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn circulant(n: u32, steps: &[u32]) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for &s in steps {
            for i in 0..n {
                g.add_edge(v(i), v((i + s) % n)).unwrap();
            }
        }
        g
    }

    fn hamilton_union(n: u32, k: usize, seed: u64) -> Multigraph {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = Multigraph::with_vertices(n);
        for _ in 0..k {
            let mut order: Vec<u32> = (0..n).collect();
            order.shuffle(&mut rng);
            for i in 0..n as usize {
                g.add_edge(v(order[i]), v(order[(i + 1) % n as usize])).unwrap();
            }
        }
        g
    }

    fn all_points(g: &Multigraph, u: VertexId, v: VertexId) -> Vec<Point> {
        let host = g.remove_vertex(u);
        host.vertices()
            .filter(|&x| x != v)
            .map(Point::Vertex)
            .chain(host.edge_ids().into_iter().map(Point::EdgeInterior))
            .collect()
    }

    fn check_all_pairs(g: &Multigraph, u: VertexId, vv: VertexId, k: usize) {
        let host = g.remove_vertex(u);
        let points = all_points(g, u, vv);
        for (i, &a) in points.iter().enumerate() {
            for &b in &points[i..] {
                if !bypass_exists(&host, vv, a, b) {
                    assert!(bypass_packing(g, u, vv, a, b, k).is_err());
                    continue;
                }
                let (p, cert) = bypass_packing(g, u, vv, a, b, k)
                    .unwrap_or_else(|e| panic!("{a} {b}: {e}"));
                assert_eq!(p.len(), k);
                assert!(verify_packing(&host, &p, Some(&cert)).ok);
            }
        }
    }

    #[test]
    fn square_of_cycle_every_point_pair() {
        let g = circulant(6, &[1, 2]);
        check_all_pairs(&g, v(0), v(3), 2);
        check_all_pairs(&g, v(0), v(1), 2);
    }

    #[test]
    fn doubled_cycle_every_point_pair() {
        let g = circulant(5, &[1, 1]);
        check_all_pairs(&g, v(0), v(2), 2);
    }

    #[test]
    fn k5_every_point_pair() {
        let g = circulant(5, &[1, 2]);
        check_all_pairs(&g, v(0), v(1), 2);
    }

    #[test]
    fn three_trees_in_six_regular_graph() {
        let g = circulant(9, &[1, 2, 4]);
        let host = g.remove_vertex(v(0));
        for (a, b) in [(1, 8), (2, 7), (3, 5)] {
            let (p, cert) = bypass_packing(&g, v(0), v(4), Point::Vertex(v(a)), Point::Vertex(v(b)), 3).unwrap();
            assert!(verify_packing(&host, &p, Some(&cert)).ok);
        }
    }

    #[test]
    fn heavy_u_with_min_cut() {
        // Six-regular with doubled antipodal edges, so the cut at u is tight.
        let g = circulant(6, &[1, 2, 3]);
        let (kappa, _) = global_edge_connectivity(&g).unwrap();
        assert!(kappa >= 4);
        check_all_pairs(&g, v(0), v(1), 2);
    }

    #[test]
    fn rejects_missing_bypass_and_low_connectivity() {
        let g = circulant(6, &[1, 2]);
        assert!(matches!(
            bypass_packing(&g, v(0), v(3), Point::Vertex(v(1)), Point::Vertex(v(2)), 3),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            bypass_packing(&g, v(0), v(3), Point::Vertex(v(3)), Point::Vertex(v(2)), 2),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            bypass_packing(&g, v(0), v(3), Point::Vertex(v(1)), Point::Vertex(v(2)), 1),
            Err(Error::Precondition(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_hamilton_unions(n in 5u32..12, k in 2usize..4, seed in any::<u64>(), pick in any::<u64>()) {
            let g = hamilton_union(n, k, seed);
            prop_assume!(edge_connectivity_at_least(&g, 2 * k));
            let u = v(0);
            let vv = g.vertices().find(|&x| x != u && is_min_uv_cut_at_u(&g, u, x).unwrap());
            prop_assume!(vv.is_some());
            let vv = vv.unwrap();
            let points = all_points(&g, u, vv);
            let a = points[(pick % points.len() as u64) as usize];
            let b = points[((pick >> 32) % points.len() as u64) as usize];
            let host = g.remove_vertex(u);
            let res = bypass_packing(&g, u, vv, a, b, k);
            if bypass_exists(&host, vv, a, b) {
                let (p, cert) = res.map_err(|e| TestCaseError::fail(format!("{a} {b}: {e}")))?;
                prop_assert!(verify_packing(&host, &p, Some(&cert)).ok);
            } else {
                prop_assert!(res.is_err());
            }
        }
    }

    fn edge_connectivity_at_least(g: &Multigraph, c: usize) -> bool {
        global_edge_connectivity(g).map(|(k, _)| k >= c).unwrap_or(false)
    }
}
