//! Turning a packing of `H - u` back into a packing of `G - u`, where `H`
//! arose from `G` by splitting off every edge at a vertex `w`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{reach, tree_path, TreePacking};
use crate::error::{invariant, precondition, Result};
use crate::multigraph::{EdgeId, Multigraph, VertexId};

/// An edge `xy` of `H` that replaced the two `w`-edges `half_x = xw` and
/// `half_y = yw`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinchedEdge {
    pub x: VertexId,
    pub half_x: EdgeId,
    pub y: VertexId,
    pub half_y: EdgeId,
}

impl PinchedEdge {
    /// The half at `end`.
    pub fn half_at(&self, end: VertexId) -> Option<EdgeId> {
        if end == self.x {
            Some(self.half_x)
        } else if end == self.y {
            Some(self.half_y)
        } else {
            None
        }
    }
}

/// What happened to the edges at `w` while it was split away.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinchLedger {
    pub hub: VertexId,
    /// `w`-edges not needed to rebuild any edge of `H`, with their far
    /// endpoint. Their far endpoints form the vertex multiset of the ledger.
    pub free: BTreeMap<EdgeId, VertexId>,
    /// Edges of `H` whose pinching at `w` restores two `w`-edges.
    pub pinched: BTreeMap<EdgeId, PinchedEdge>,
}

impl PinchLedger {
    pub fn new(hub: VertexId) -> Self {
        PinchLedger { hub, free: BTreeMap::new(), pinched: BTreeMap::new() }
    }

    /// `|V'| + |E'|`.
    pub fn weight(&self) -> usize {
        self.free.len() + self.pinched.len()
    }

    /// The pinched edge a `w`-edge belongs to.
    pub fn pinched_parent(&self, half: EdgeId) -> Option<EdgeId> {
        self.pinched
            .iter()
            .find(|(_, p)| p.half_x == half || p.half_y == half)
            .map(|(&e, _)| e)
    }

    /// Every `w`-edge the ledger knows about.
    pub fn hub_edges(&self) -> BTreeSet<EdgeId> {
        self.free
            .keys()
            .copied()
            .chain(self.pinched.values().flat_map(|p| [p.half_x, p.half_y]))
            .collect()
    }
}

/// Lift a packing of `H - u` to `target = G - u`.
///
/// Pinched edges are replaced by one or both of their halves, `e1` and `e2`
/// are forced into trees 0 and 1, and trees still missing `w` receive an
/// unused `w`-edge each. Membership of edges common to both graphs never
/// changes.
pub fn lift_packing_through_pinch(
    target: &Multigraph,
    packing_h: &TreePacking,
    ledger: &PinchLedger,
    e1: Option<EdgeId>,
    e2: Option<EdgeId>,
) -> Result<TreePacking> {
    let w = ledger.hub;
    if !target.has_vertex(w) {
        return Err(precondition!("hub {w} is not a vertex of the target graph"));
    }
    // Scratch graph with the pinched edges present, so tree paths can be
    // computed before and after pinching.
    let mut scratch = target.clone();
    for (&e, p) in &ledger.pinched {
        if target.has_edge(e) {
            return Err(precondition!("pinched edge {e} also exists in the target"));
        }
        scratch.add_edge_with_id(e, p.x, p.y)?;
        for (half, end) in [(p.half_x, p.x), (p.half_y, p.y)] {
            if target.endpoints(half).map(|(a, b)| (a.min(b), a.max(b))) != Some((end.min(w), end.max(w))) {
                return Err(precondition!("{half} is not an edge between {end} and {w}"));
            }
        }
    }
    for (&g, &x) in &ledger.free {
        if target.other_end(g, w) != Some(x) {
            return Err(precondition!("free edge {g} does not join {x} and {w}"));
        }
    }
    let mut trees = packing_h.trees.clone();
    let has_w = |t: &BTreeSet<EdgeId>| t.iter().any(|&e| scratch.is_incident(e, w));

    for (&ep, p) in &ledger.pinched {
        let Some(i) = trees.iter().position(|t| t.contains(&ep)) else { continue };
        if !has_w(&trees[i]) {
            trees[i].remove(&ep);
            trees[i].insert(p.half_x);
            trees[i].insert(p.half_y);
        } else {
            trees[i].remove(&ep);
            let side_x = reach(&scratch, &trees[i], p.x);
            let add = if side_x.contains(&w) { p.half_y } else { p.half_x };
            trees[i].insert(add);
        }
    }

    let e2 = e2.filter(|&e| Some(e) != e1);
    if let Some(e) = e1 {
        force_hub_edge(&scratch, &mut trees, w, e, e2)?;
    }
    if let Some(e) = e2 {
        force_hub_edge(&scratch, &mut trees, w, e, e1)?;
    }

    let used: BTreeSet<EdgeId> = trees.iter().flatten().copied().collect();
    let known = ledger.hub_edges();
    let mut spare: Vec<EdgeId> = target
        .incident(w)
        .filter(|e| !used.contains(e) && known.contains(e))
        .collect();
    spare.reverse();
    let missing: Vec<usize> = (0..trees.len()).filter(|&i| !has_w(&trees[i])).collect();
    if spare.len() < missing.len() {
        return Err(invariant!(
            "{} trees miss {w} but only {} unused edges remain there",
            missing.len(),
            spare.len()
        ));
    }
    for i in missing {
        let e = spare.pop().expect("counted above");
        trees[i].insert(e);
    }
    Ok(TreePacking::new(trees))
}

/// Make sure the `w`-edge `e` is in tree 0 or 1, choosing the slot that
/// does not hold `other`.
fn force_hub_edge(
    g: &Multigraph,
    trees: &mut [BTreeSet<EdgeId>],
    w: VertexId,
    e: EdgeId,
    other: Option<EdgeId>,
) -> Result<()> {
    match trees.iter().position(|t| t.contains(&e)) {
        Some(0) | Some(1) => return Ok(()),
        Some(i) => return Err(invariant!("{e} was pinched into tree {i}, outside the bypass pair")),
        None => {}
    }
    if trees.len() < 2 {
        return Err(invariant!("forcing edges needs at least two trees"));
    }
    let slot = if other.is_some_and(|o| trees[0].contains(&o)) { 1 } else { 0 };
    let x = g.other_end(e, w).ok_or_else(|| invariant!("{e} is not incident to {w}"))?;
    if trees[slot].iter().any(|&f| g.is_incident(f, w)) {
        let path = tree_path(g, &trees[slot], x, w).ok_or_else(|| invariant!("tree {slot} does not join {x} and {w}"))?;
        let last = *path.last().ok_or_else(|| invariant!("{x} coincides with {w}"))?;
        trees[slot].remove(&last);
    }
    trees[slot].insert(e);
    Ok(())
}
