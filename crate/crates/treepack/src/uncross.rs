//! Systems of minimum cuts from a common source and their uncrossing.
//!
//! A system is a list of minimum `x`-`y` cuts for various targets `y`. It is
//! compatible when no cut of the system has an edge with both ends on the
//! target side of another cut. [`make_compatible`] turns any finite system
//! into a compatible one that is no larger, uses only edges of the input
//! cuts, and leaves the component of `x` unchanged.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::connectivity::{crossing_edges, pair_connectivity, Cut};
use crate::error::{invariant, precondition, Result};
use crate::multigraph::{EdgeId, Multigraph, VertexId};

/// Vertex count up to which [`make_compatible`] may fall back to listing all
/// minimum cuts when uncrossing alone stops making progress.
const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutEntry {
    pub y: VertexId,
    /// `side_a` holds `x`, `side_b` is the component of `y` after removing
    /// the cut edges.
    pub cut: Cut,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSystem {
    pub x: VertexId,
    pub entries: Vec<CutEntry>,
}

/// A cut of the system containing an edge inside the target side of another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incompatibility {
    /// Target of the cut owning the edge.
    pub y: VertexId,
    /// Target of the cut whose side contains both ends of the edge.
    pub y_other: VertexId,
    pub edge: EdgeId,
    pub first: usize,
    pub second: usize,
}

/// The six edge classes and four vertex regions of two crossing cuts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossPartition {
    pub a1: BTreeSet<EdgeId>,
    pub a2: BTreeSet<EdgeId>,
    pub b1: BTreeSet<EdgeId>,
    pub b2: BTreeSet<EdgeId>,
    pub c: BTreeSet<EdgeId>,
    pub d: BTreeSet<EdgeId>,
    /// Everything outside both target sides, in particular `x`.
    pub c0: BTreeSet<VertexId>,
    pub only1: BTreeSet<VertexId>,
    pub only2: BTreeSet<VertexId>,
    pub both: BTreeSet<VertexId>,
}

/// How to replace two incompatible cuts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Uncrossing {
    /// The boundary of the common outside is a minimum cut for `y`; it
    /// replaces both input cuts.
    Merge { y: VertexId, cut: Cut },
    /// The first cut is replaced by the boundary of its private region,
    /// which is compatible with the second cut.
    ReplaceFirst { cut: Cut },
}

fn component_of(g: &Multigraph, start: VertexId, gone: &BTreeSet<EdgeId>) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(a) = queue.pop_front() {
        for e in g.incident(a) {
            if gone.contains(&e) {
                continue;
            }
            let b = g.other_end(e, a).expect("incident edge");
            if seen.insert(b) {
                queue.push_back(b);
            }
        }
    }
    seen
}

impl CutEntry {
    /// Build an entry from the edge set of a minimum `x`-`y` cut.
    pub fn from_edges(g: &Multigraph, x: VertexId, y: VertexId, edges: &BTreeSet<EdgeId>) -> Result<CutEntry> {
        if x == y || !g.has_vertex(x) || !g.has_vertex(y) {
            return Err(precondition!("cut targets must be two distinct vertices"));
        }
        let side_y = component_of(g, y, edges);
        if side_y.contains(&x) {
            return Err(precondition!("edge set does not separate {x} from {y}"));
        }
        let side_x: BTreeSet<VertexId> = g.vertices().filter(|v| !side_y.contains(v)).collect();
        let cut = Cut::from_side(g, side_x, Some((x, y)));
        if &cut.edges != edges || cut.size() != pair_connectivity(g, x, y)? {
            return Err(precondition!("edge set is not a minimum {x}-{y} cut"));
        }
        Ok(CutEntry { y, cut })
    }

    /// Build an entry from the target side of a cut.
    pub fn from_side(g: &Multigraph, x: VertexId, y: VertexId, side_y: &BTreeSet<VertexId>) -> Result<CutEntry> {
        let edges = crossing_edges(g, side_y);
        CutEntry::from_edges(g, x, y, &edges)
    }

    pub fn side(&self) -> &BTreeSet<VertexId> {
        &self.cut.side_b
    }

    pub fn edges(&self) -> &BTreeSet<EdgeId> {
        &self.cut.edges
    }
}

impl CutSystem {
    pub fn new(x: VertexId) -> Self {
        CutSystem { x, entries: Vec::new() }
    }

    /// One minimum cut per target, with the smallest `x` side.
    pub fn min_cuts(g: &Multigraph, x: VertexId, ys: &[VertexId]) -> Result<CutSystem> {
        let mut entries = Vec::with_capacity(ys.len());
        for &y in ys {
            let (_, cut) = crate::connectivity::local_edge_connectivity(g, &BTreeSet::from([x]), &BTreeSet::from([y]))?;
            entries.push(CutEntry::from_edges(g, x, y, &cut.edges)?);
        }
        Ok(CutSystem { x, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Union of all cut edges.
    pub fn union(&self) -> BTreeSet<EdgeId> {
        self.entries.iter().flat_map(|e| e.edges().iter().copied()).collect()
    }

    /// Component of `x` after removing every cut edge.
    pub fn x_component(&self, g: &Multigraph) -> BTreeSet<VertexId> {
        component_of(g, self.x, &self.union())
    }

    /// Number of distinct cuts.
    pub fn distinct(&self) -> usize {
        self.entries.iter().map(|e| e.edges()).collect::<BTreeSet<_>>().len()
    }

    /// Recheck every entry against `g`.
    pub fn validate(&self, g: &Multigraph) -> Result<()> {
        for e in &self.entries {
            let fresh = CutEntry::from_edges(g, self.x, e.y, e.edges())?;
            if fresh.cut != e.cut {
                return Err(precondition!("stored sides of the {} cut are inconsistent", e.y));
            }
        }
        Ok(())
    }
}

/// First offending edge of `first` that lies inside the side of `second`.
fn crossing_witness(first: &CutEntry, second: &CutEntry, g: &Multigraph) -> Option<EdgeId> {
    let side = second.side();
    first.edges().iter().copied().find(|&e| {
        let (a, b) = g.endpoints(e).expect("cut edges belong to the graph");
        side.contains(&a) && side.contains(&b)
    })
}

fn pair_incompatibility(g: &Multigraph, s: &CutSystem, i: usize, j: usize) -> Option<Incompatibility> {
    let (ei, ej) = (&s.entries[i], &s.entries[j]);
    if let Some(edge) = crossing_witness(ei, ej, g) {
        return Some(Incompatibility { y: ei.y, y_other: ej.y, edge, first: i, second: j });
    }
    crossing_witness(ej, ei, g).map(|edge| Incompatibility { y: ej.y, y_other: ei.y, edge, first: j, second: i })
}

pub fn is_compatible(g: &Multigraph, s: &CutSystem) -> bool {
    find_incompatibility(g, s).is_none()
}

/// The first offending pair in entry order, `None` for a compatible system.
pub fn find_incompatibility(g: &Multigraph, s: &CutSystem) -> Option<Incompatibility> {
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if let Some(w) = pair_incompatibility(g, s, i, j) {
                return Some(w);
            }
        }
    }
    None
}

/// Whether `s ⊑ u`: no more cuts, only edges of `u`, and the same
/// component of `x`.
pub fn sqsubset(g: &Multigraph, s: &CutSystem, u: &CutSystem) -> bool {
    if s.x != u.x || s.distinct() > u.distinct() {
        return false;
    }
    let all = u.union();
    if s.entries.iter().any(|e| !e.edges().is_subset(&all)) {
        return false;
    }
    s.x_component(g) == u.x_component(g)
}

/// Classify the edges of two cuts from the same source.
pub fn cross_partition(g: &Multigraph, first: &CutEntry, second: &CutEntry) -> CrossPartition {
    let (s1, s2) = (first.side(), second.side());
    let mut p = CrossPartition::default();
    for v in g.vertices() {
        match (s1.contains(&v), s2.contains(&v)) {
            (true, true) => p.both.insert(v),
            (true, false) => p.only1.insert(v),
            (false, true) => p.only2.insert(v),
            (false, false) => p.c0.insert(v),
        };
    }
    let region = |v: &VertexId| -> u8 {
        if p.both.contains(v) {
            3
        } else if p.only1.contains(v) {
            1
        } else if p.only2.contains(v) {
            2
        } else {
            0
        }
    };
    let mut classes: [BTreeSet<EdgeId>; 6] = Default::default();
    for (e, a, b) in g.edges() {
        let (ra, rb) = (region(&a), region(&b));
        let key = (ra.min(rb), ra.max(rb));
        let slot = match key {
            (0, 1) => 0,
            (0, 2) => 1,
            (2, 3) => 2,
            (1, 3) => 3,
            (1, 2) => 4,
            (0, 3) => 5,
            _ => continue,
        };
        classes[slot].insert(e);
    }
    let [a1, a2, b1, b2, c, d] = classes;
    CrossPartition { a1, a2, b1, b2, c, d, ..p }
}

/// Replacement for two incompatible minimum cuts.
pub fn uncross_pair(g: &Multigraph, x: VertexId, first: &CutEntry, second: &CutEntry) -> Result<Uncrossing> {
    if crossing_witness(first, second, g).is_none() && crossing_witness(second, first, g).is_none() {
        return Err(precondition!("cuts for {} and {} are already compatible", first.y, second.y));
    }
    let p = cross_partition(g, first, second);
    let union = |sets: &[&BTreeSet<EdgeId>]| -> BTreeSet<EdgeId> { sets.iter().flat_map(|s| s.iter().copied()).collect() };
    let (y1, y2) = (first.y, second.y);
    if p.both.contains(&y1) || p.both.contains(&y2) {
        if !p.c.is_empty() {
            return Err(invariant!("{} edges run between the private regions of nested targets", p.c.len()));
        }
        let y = if p.both.contains(&y1) { y2 } else { y1 };
        let edges = union(&[&p.a1, &p.a2, &p.d]);
        let cut = CutEntry::from_edges(g, x, y, &edges)
            .map_err(|e| invariant!("merged boundary is not a minimum {x}-{y} cut: {e}"))?;
        return Ok(Uncrossing::Merge { y, cut: cut.cut });
    }
    if !p.d.is_empty() {
        return Err(invariant!("{} edges join the outside to the common region of crossing targets", p.d.len()));
    }
    let edges = union(&[&p.a1, &p.b2, &p.c]);
    let cut = CutEntry::from_edges(g, x, y1, &edges)
        .map_err(|e| invariant!("private boundary is not a minimum {x}-{y1} cut: {e}"))?;
    Ok(Uncrossing::ReplaceFirst { cut: cut.cut })
}

/// A compatible system `s` with `s ⊑ u`.
pub fn make_compatible(g: &Multigraph, u: &CutSystem) -> Result<CutSystem> {
    u.validate(g)?;
    let out = compatible_rec(g, u.x, dedup(u.entries.clone()))?;
    let out = CutSystem { x: u.x, entries: out };
    if let Some(w) = find_incompatibility(g, &out) {
        return Err(invariant!("output still has {} inside the side of {}", w.edge, w.y_other));
    }
    if !sqsubset(g, &out, u) {
        return Err(invariant!("output is not below the input"));
    }
    Ok(out)
}

fn dedup(entries: Vec<CutEntry>) -> Vec<CutEntry> {
    let mut seen = BTreeSet::new();
    entries.into_iter().filter(|e| seen.insert(e.edges().clone())).collect()
}

fn incompatible_count(g: &Multigraph, cut: &CutEntry, others: &[CutEntry]) -> usize {
    others
        .iter()
        .filter(|o| crossing_witness(cut, o, g).is_some() || crossing_witness(o, cut, g).is_some())
        .count()
}

fn compatible_rec(g: &Multigraph, x: VertexId, mut u: Vec<CutEntry>) -> Result<Vec<CutEntry>> {
    if u.len() <= 1 {
        return Ok(u);
    }
    let size = u.len();
    let last = u.pop().expect("at least two cuts");
    let rest = compatible_rec(g, x, u)?;
    if rest.len() < size - 1 {
        let mut next = rest;
        next.push(last);
        return compatible_rec(g, x, dedup(next));
    }
    let target = {
        let mut all = rest.clone();
        all.push(last.clone());
        CutSystem { x, entries: all }
    };
    let mut s1 = last;
    loop {
        let Some(pos) = rest.iter().position(|o| crossing_witness(&s1, o, g).is_some() || crossing_witness(o, &s1, g).is_some())
        else {
            let mut done = rest;
            done.push(s1);
            return Ok(done);
        };
        let before = incompatible_count(g, &s1, &rest);
        match uncross_pair(g, x, &s1, &rest[pos]) {
            Ok(Uncrossing::Merge { y, cut }) => {
                let mut next: Vec<CutEntry> = rest.clone();
                next[pos] = CutEntry { y, cut };
                return compatible_rec(g, x, dedup(next));
            }
            Ok(Uncrossing::ReplaceFirst { cut }) => {
                let candidate = CutEntry { y: s1.y, cut };
                if incompatible_count(g, &candidate, &rest) < before {
                    s1 = candidate;
                    continue;
                }
                s1 = exhaustive_candidate(g, x, &s1, &rest, &target, before)?;
            }
            Err(e) => {
                if g.vertex_count() > EXHAUSTIVE_LIMIT {
                    return Err(e);
                }
                s1 = exhaustive_candidate(g, x, &s1, &rest, &target, before)?;
            }
        }
    }
}

/// Fallback when uncrossing does not lower the incompatibility count: the
/// minimum cut for any target of the system that keeps `rest ∪ {cut} ⊑
/// target` and has the fewest incompatibilities, if that is fewer than
/// `before`.
fn exhaustive_candidate(
    g: &Multigraph,
    x: VertexId,
    s1: &CutEntry,
    rest: &[CutEntry],
    target: &CutSystem,
    before: usize,
) -> Result<CutEntry> {
    if g.vertex_count() > EXHAUSTIVE_LIMIT {
        return Err(invariant!("uncrossing {} made no progress on a graph too large to enumerate", s1.y));
    }
    let ys: BTreeSet<VertexId> = target.entries.iter().map(|e| e.y).collect();
    let mut best: Option<(usize, CutEntry)> = None;
    for &y in &ys {
        for entry in all_min_cuts(g, x, y)? {
            let mut trial = rest.to_vec();
            trial.push(entry.clone());
            if !sqsubset(g, &CutSystem { x, entries: trial }, target) {
                continue;
            }
            let count = incompatible_count(g, &entry, rest);
            if best.as_ref().is_none_or(|(c, _)| count < *c) {
                best = Some((count, entry));
            }
        }
    }
    match best {
        Some((count, entry)) if count < before => Ok(entry),
        _ => Err(invariant!("no minimum cut lowers the incompatibility count of {}", s1.y)),
    }
}

/// Every minimum `x`-`y` cut, by enumerating the possible `y` sides.
pub fn all_min_cuts(g: &Multigraph, x: VertexId, y: VertexId) -> Result<Vec<CutEntry>> {
    let n = g.vertex_count();
    if n > EXHAUSTIVE_LIMIT {
        return Err(crate::Error::Budget(format!("cut enumeration limited to {EXHAUSTIVE_LIMIT} vertices, got {n}")));
    }
    let lambda = pair_connectivity(g, x, y)?;
    let free: Vec<VertexId> = g.vertices().filter(|&v| v != x && v != y).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << free.len()) {
        let mut side: BTreeSet<VertexId> = BTreeSet::from([y]);
        for (i, &v) in free.iter().enumerate() {
            if mask & (1 << i) != 0 {
                side.insert(v);
            }
        }
        let edges = crossing_edges(g, &side);
        if edges.len() == lambda {
            out.push(CutEntry { y, cut: Cut::from_side(g, g.vertices().filter(|v| !side.contains(v)).collect(), Some((x, y))) });
        }
    }
    Ok(out)
}
