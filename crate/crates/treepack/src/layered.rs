//! Finite stages of a one-ended graph: an exhausting sequence of vertex
//! sets, spanning tree packings of the contracted stages that restrict to
//! one another, and bookkeeping of gaps and the bridges built across them.
//!
//! The graph is a truncated half-cylinder. Column 0 is the removed base
//! `V_0`, the last column stands in for the end, and a few guard columns
//! keep the far side from interfering with the levels that are packed.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::connectivity::{local_edge_connectivity, Cut};
use crate::error::{invariant, precondition, Error, Result};
use crate::multigraph::{restriction, EdgeId, Multigraph, Point, VertexId};
use crate::packing::{
    bypass_packing, check_walk, glue_packings, one_tree_bypass_packing, packing_minus_u, tree_path, verify_packing,
    TreePacking, WalkStep,
};

/// Name of the only built-in family.
pub const HALF_CYLINDER: &str = "doubled_half_cylinder";

/// Guard columns added beyond the last packed level by default.
pub const DEFAULT_GUARD: usize = 2;

/// A truncated half-cylinder `C_m × {0, ..., columns - 1}`. Each column is a
/// simple `m`-cycle and consecutive columns are joined by doubled rungs, so
/// every inner vertex has degree 6 and every ring cut has `2m` edges.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub m: usize,
    pub columns: usize,
    pub graph: Multigraph,
}

impl Family {
    /// Vertex `p` of column `c`.
    pub fn vertex(&self, c: usize, p: usize) -> VertexId {
        VertexId((c * self.m + p) as u32)
    }

    pub fn column(&self, c: usize) -> BTreeSet<VertexId> {
        (0..self.m).map(|p| self.vertex(c, p)).collect()
    }

    pub fn column_of(&self, v: VertexId) -> usize {
        v.0 as usize / self.m
    }

    /// The same family with `extra` more columns. Ids of existing vertices
    /// and edges do not change.
    pub fn extended(&self, extra: usize) -> Family {
        half_cylinder(self.m, self.columns + extra)
    }
}

fn half_cylinder(m: usize, columns: usize) -> Family {
    let mut g = Multigraph::with_vertices((m * columns) as u32);
    let at = |c: usize, p: usize| VertexId((c * m + p) as u32);
    for c in 0..columns {
        for p in 0..m {
            g.add_edge(at(c, p), at(c, (p + 1) % m)).expect("distinct ring vertices");
        }
        if c > 0 {
            for p in 0..m {
                for _ in 0..2 {
                    g.add_edge(at(c - 1, p), at(c, p)).expect("distinct rung ends");
                }
            }
        }
    }
    Family { name: HALF_CYLINDER.to_string(), m, columns, graph: g }
}

/// Build a family truncated after `depth + guard` columns beyond the base.
pub fn builtin_family(name: &str, m: usize, depth: usize, guard: usize) -> Result<Family> {
    if name != HALF_CYLINDER {
        return Err(precondition!("unknown family {name:?}; the only one is {HALF_CYLINDER:?}"));
    }
    if m < 3 || depth < 1 {
        return Err(precondition!("need m >= 3 and depth >= 1, got m = {m}, depth = {depth}"));
    }
    if guard < 1 {
        return Err(precondition!("the guard band needs at least one column"));
    }
    Ok(half_cylinder(m, depth + guard + 1))
}

/// `(n1, n2, i, j)`: at some level, try to bridge a gap of tree `i`
/// separating the `n1`-th and `n2`-th vertex by means of tree `j`.
/// Vertex positions count from 1, tree indices from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub n1: usize,
    pub n2: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Phases `w = 2, 3, ...` each list every tuple with `n1 < n2 <= w`
    /// and `i != j < k`; once `w` reaches `vertex_count` that phase repeats.
    RoundRobin { vertex_count: usize, k: usize },
    /// A finite list, used as given.
    Fixed(Vec<ScheduleEntry>),
}

impl Schedule {
    /// Entry number `step`, counting from 0.
    pub fn entry(&self, step: usize) -> Option<ScheduleEntry> {
        match self {
            Schedule::Fixed(list) => list.get(step).copied(),
            &Schedule::RoundRobin { vertex_count, k } => {
                if vertex_count < 2 || k < 2 {
                    return None;
                }
                let mut rest = step;
                let mut w = 2;
                loop {
                    let size = phase_len(w, k);
                    if rest < size {
                        return Some(phase_entry(w, k, rest));
                    }
                    rest -= size;
                    if w == vertex_count {
                        return Some(phase_entry(w, k, rest % size));
                    }
                    w += 1;
                }
            }
        }
    }

    pub fn prefix(&self, len: usize) -> Vec<ScheduleEntry> {
        (0..len).map_while(|s| self.entry(s)).collect()
    }
}

fn phase_len(w: usize, k: usize) -> usize {
    w * (w - 1) / 2 * k * (k - 1)
}

fn phase_entry(w: usize, k: usize, idx: usize) -> ScheduleEntry {
    let pairs = k * (k - 1);
    let (mut vertex_pair, tree_pair) = (idx / pairs, idx % pairs);
    let (i, r) = (tree_pair / (k - 1), tree_pair % (k - 1));
    let j = if r < i { r } else { r + 1 };
    for n1 in 1..w {
        let count = w - n1;
        if vertex_pair < count {
            return ScheduleEntry { n1, n2: n1 + 1 + vertex_pair, i, j };
        }
        vertex_pair -= count;
    }
    unreachable!("index inside the phase")
}

/// The round-robin schedule over `vertex_count` vertices and `k` trees.
pub fn round_robin_schedule(vertex_count: usize, k: usize) -> Schedule {
    Schedule::RoundRobin { vertex_count, k }
}

/// `f(N)`: every tuple with vertex positions at most `N` appears among the
/// first `f(N)` entries of the round-robin schedule, and again in every
/// later phase. This is the length of phases `2..=N` together.
pub fn first_occurrence_bound(n: usize, k: usize) -> usize {
    (2..=n).map(|w| phase_len(w, k)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `k` trees; scheduled gaps of tree `i` get bridges in tree `j`.
    TwoTree,
    /// `k - 1` trees; scheduled gaps get closed inside their own tree.
    OneTree,
}

/// One packed stage.
#[derive(Clone, Debug)]
pub struct Level {
    pub n: usize,
    /// `V_n`, including the base column.
    pub vertices: BTreeSet<VertexId>,
    /// `W_n ∖ V_{n-1}`: the vertices added before the cut was computed.
    pub grown: BTreeSet<VertexId>,
    /// `S_n`, with `V_n` on side a.
    pub ring_cut: Cut,
    /// `G_n`: `G` with everything beyond `V_n` contracted, minus the base.
    pub graph: Multigraph,
    /// The contracted far side in `graph`.
    pub far: VertexId,
    pub packing: TreePacking,
}

/// A pair of components of `T^tree[V_n]`, named by their smallest vertices.
/// Components only grow as levels are added and new vertices have larger
/// ids, so the names stay valid until the gap closes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRecord {
    pub tree: usize,
    pub reps: (VertexId, VertexId),
    pub discovered: usize,
    /// Levels whose schedule entry targeted this gap.
    pub scheduled: Vec<usize>,
    pub bridges: Vec<Bridge>,
    pub terminated: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridge {
    pub level: usize,
    pub partner: usize,
    /// Edges of the partner tree on the joining path.
    pub edges: BTreeSet<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// The named vertices or trees do not exist yet.
    OutOfRange,
    /// Both vertices already lie in one component.
    SameComponent,
    /// The gap was targeted; `walk` joins the two vertices in `G_n`
    /// through the two trees without touching the far side.
    Joined { gap: usize, w1: VertexId, w2: VertexId, walk: Vec<WalkStep> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub level: usize,
    pub entry: ScheduleEntry,
    pub outcome: Outcome,
}

/// The whole run: the family, every packed level and the gap log.
#[derive(Clone, Debug)]
pub struct ExhaustionState {
    pub family: Family,
    pub k: usize,
    pub mode: Mode,
    pub schedule: Schedule,
    pub base: BTreeSet<VertexId>,
    /// `w_1, w_2, ...`: the vertices outside the base in id order.
    pub enumeration: Vec<VertexId>,
    pub levels: Vec<Level>,
    pub gaps: Vec<GapRecord>,
    pub events: Vec<ScheduleEvent>,
}

impl ExhaustionState {
    /// An unpacked state. `k` is the connectivity parameter: two-tree mode
    /// packs `k` trees, one-tree mode `k - 1`.
    pub fn new(family: Family, k: usize, mode: Mode, schedule: Option<Schedule>) -> Result<Self> {
        let trees = match mode {
            Mode::TwoTree if k < 2 => return Err(precondition!("two-tree mode needs k >= 2")),
            Mode::OneTree if k < 2 => return Err(precondition!("one-tree mode needs k >= 2")),
            Mode::TwoTree => k,
            Mode::OneTree => k - 1,
        };
        if 2 * family.m < 2 * k || 6 < 2 * k {
            return Err(precondition!("the half-cylinder is only {}-edge-connected, k = {k} needs {}", 6.min(2 * family.m), 2 * k));
        }
        let base = family.column(0);
        let enumeration: Vec<VertexId> = family.graph.vertices().filter(|v| !base.contains(v)).collect();
        let schedule = schedule.unwrap_or_else(|| round_robin_schedule(enumeration.len(), trees));
        Ok(ExhaustionState { family, k, mode, schedule, base, enumeration, levels: Vec::new(), gaps: Vec::new(), events: Vec::new() })
    }

    pub fn tree_count(&self) -> usize {
        match self.mode {
            Mode::TwoTree => self.k,
            Mode::OneTree => self.k - 1,
        }
    }

    /// `V_n`, with `V_0` the base column.
    pub fn level_vertices(&self, n: usize) -> Option<&BTreeSet<VertexId>> {
        if n == 0 {
            Some(&self.base)
        } else {
            self.levels.get(n - 1).map(|l| &l.vertices)
        }
    }

    pub fn level(&self, n: usize) -> Option<&Level> {
        n.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    fn next_step(&mut self, n: usize, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(precondition!("the state was built for {:?} mode", self.mode));
        }
        if n != self.levels.len() + 1 {
            return Err(precondition!("level {n} requested but {} levels are packed", self.levels.len()));
        }
        let cut = ring_cut(self, n)?;
        let near = cut.side_a.clone();
        let prev = self.level_vertices(n - 1).expect("checked above").clone();
        let grown = grown_set(&self.family.graph, &prev);
        let far_side: BTreeSet<VertexId> = cut.side_b.clone();

        let g = &self.family.graph;
        let (gc, map) = g.contract(&far_side)?;
        let z = map.map_vertex(*far_side.first().expect("far side nonempty")).expect("mapped");
        let g_n = gc.remove_vertices(&self.base);
        let (ring, ring_map) = g.contract_blobs(&[prev.clone(), far_side.clone()])?;
        let u = ring_map.map_vertex(*prev.first().expect("V_{n-1} nonempty")).expect("mapped");
        let v = ring_map.map_vertex(*far_side.first().expect("far side nonempty")).expect("mapped");

        let (inner, joined) = self.pack_ring(n, &ring, u, v)?;

        let packing = if n == 1 {
            inner
        } else {
            let prev_level = self.level(n - 1).expect("previous level");
            let blob: BTreeSet<VertexId> = near.difference(&prev).copied().chain([z]).collect();
            let (_, glue_map) = g_n.contract(&blob)?;
            let x = *glue_map.blobs.keys().next().expect("one blob");
            let glued = glue_packings(&g_n, &glue_map, &prev_level.packing, &BTreeMap::from([(x, inner)]))?;
            for (i, t) in glued.trees.iter().enumerate() {
                if restriction(t, &glue_map) != prev_level.packing.trees[i] {
                    return Err(invariant!("tree {i} of level {n} does not restrict to tree {i} of level {}", n - 1));
                }
            }
            glued
        };
        let report = verify_packing(&g_n, &packing, None);
        if !report.ok {
            return Err(invariant!("level {n} packing invalid: {}", report.violations.join("; ")));
        }
        self.levels.push(Level { n, vertices: near, grown, ring_cut: cut, graph: g_n, far: z, packing });

        if let Some((entry, gap, w1, w2, mut path)) = joined {
            let level = self.levels.last().expect("just pushed");
            let walk = walk_from_edges(&level.graph, w1, &path)?;
            let (i, j) = (entry.i, entry.j);
            let allowed = match self.mode {
                Mode::TwoTree => level.packing.union_of(&[i, j]),
                Mode::OneTree => level.packing.trees[i].clone(),
            };
            check_walk(&level.graph, &allowed, level.far, Point::Vertex(w1), Point::Vertex(w2), &walk)
                .map_err(|m| invariant!("joining path at level {n} is broken: {m}"))?;
            if self.mode == Mode::TwoTree {
                path.retain(|e| level.packing.trees[j].contains(e));
                self.gaps[gap].bridges.push(Bridge { level: n, partner: j, edges: path.into_iter().collect() });
            }
            self.events.push(ScheduleEvent { level: n, entry, outcome: Outcome::Joined { gap, w1, w2, walk } });
        }
        self.update_terminations(n);
        Ok(())
    }

    /// Pack `G'_n - u_n`. When the schedule asks for a gap that exists, the
    /// trees are arranged so the gap's two vertices get joined; the joining
    /// path in `G_n` is returned as an edge sequence from `w1`.
    #[allow(clippy::type_complexity)]
    fn pack_ring(
        &mut self,
        n: usize,
        ring: &Multigraph,
        u: VertexId,
        v: VertexId,
    ) -> Result<(TreePacking, Option<(ScheduleEntry, usize, VertexId, VertexId, Vec<EdgeId>)>)> {
        let trees = self.tree_count();
        let plain = |ring: &Multigraph| -> Result<TreePacking> {
            let mut p = packing_minus_u(ring, u, self.k)?;
            p.trees.truncate(trees);
            Ok(p)
        };
        if n == 1 {
            return Ok((plain(ring)?, None));
        }
        let Some(entry) = self.schedule.entry(n - 2) else {
            return Ok((plain(ring)?, None));
        };
        let prev = self.level(n - 1).expect("previous level");
        let w = |pos: usize| pos.checked_sub(1).and_then(|p| self.enumeration.get(p)).copied();
        let in_range = match (w(entry.n1), w(entry.n2)) {
            (Some(w1), Some(w2)) => {
                let ok = w1 != w2
                    && entry.i != entry.j
                    && entry.i < trees
                    && entry.j < trees
                    && prev.graph.has_vertex(w1)
                    && prev.graph.has_vertex(w2);
                ok.then_some((w1, w2))
            }
            _ => None,
        };
        let Some((w1, w2)) = in_range else {
            self.events.push(ScheduleEvent { level: n, entry, outcome: Outcome::OutOfRange });
            return Ok((plain(ring)?, None));
        };
        let tree = &prev.packing.trees[entry.i];
        let path = tree_path(&prev.graph, tree, w1, w2)
            .ok_or_else(|| invariant!("tree {} of level {} does not join {w1} and {w2}", entry.i, n - 1))?;
        let Some(at) = path.iter().position(|&e| prev.graph.is_incident(e, prev.far)) else {
            self.events.push(ScheduleEvent { level: n, entry, outcome: Outcome::SameComponent });
            return Ok((plain(ring)?, None));
        };
        let (ea, eb) = (path[at], path[at + 1]);
        let a = ring.other_end(ea, u).ok_or_else(|| invariant!("{ea} does not reach the contracted level"))?;
        let b = ring.other_end(eb, u).ok_or_else(|| invariant!("{eb} does not reach the contracted level"))?;

        let comps = components_without(&prev.graph, tree, prev.far);
        let mut reps = (comps[&w1], comps[&w2]);
        if reps.0 > reps.1 {
            reps = (reps.1, reps.0);
        }
        let gap = match self.gaps.iter().position(|g| g.tree == entry.i && g.reps == reps && g.terminated.is_none()) {
            Some(idx) => idx,
            None => {
                self.gaps.push(GapRecord {
                    tree: entry.i,
                    reps,
                    discovered: n - 1,
                    scheduled: Vec::new(),
                    bridges: Vec::new(),
                    terminated: None,
                });
                self.gaps.len() - 1
            }
        };
        self.gaps[gap].scheduled.push(n);

        let (packing, cert) = match self.mode {
            Mode::TwoTree => {
                let (p, c) = bypass_packing(ring, u, v, Point::Vertex(a), Point::Vertex(b), self.k)?;
                // The tree carrying more of the bypass goes to `j`, so the
                // bridge is not empty whenever the bypass has edges.
                let count = |t: usize| c.walk.iter().filter(|s| matches!(s, WalkStep::Edge(e) if p.trees[t].contains(e))).count();
                let (i, j) = if count(0) > count(1) { (entry.j, entry.i) } else { (entry.i, entry.j) };
                (move_pair(p, i, j), c)
            }
            Mode::OneTree => {
                let (mut p, c) = one_tree_bypass_packing(ring, u, v, Point::Vertex(a), Point::Vertex(b), self.k)?;
                p.trees.swap(0, entry.i);
                (p, c)
            }
        };
        let middle = cert.walk.iter().filter_map(|s| match s {
            WalkStep::Edge(e) => Some(*e),
            WalkStep::Vertex(_) => None,
        });
        let joined: Vec<EdgeId> = path[..at]
            .iter()
            .copied()
            .chain([ea])
            .chain(middle)
            .chain([eb])
            .chain(path[at + 2..].iter().copied())
            .collect();
        Ok((packing, Some((entry, gap, w1, w2, joined))))
    }

    fn update_terminations(&mut self, n: usize) {
        let level = self.levels.last().expect("a level exists");
        let mut cache: BTreeMap<usize, BTreeMap<VertexId, VertexId>> = BTreeMap::new();
        for gap in self.gaps.iter_mut().filter(|g| g.terminated.is_none()) {
            let comps = cache
                .entry(gap.tree)
                .or_insert_with(|| components_without(&level.graph, &level.packing.trees[gap.tree], level.far));
            if comps.get(&gap.reps.0) == comps.get(&gap.reps.1) {
                gap.terminated = Some(n);
            }
        }
    }
}

/// Put trees 0 and 1 into slots `i` and `j`, keeping the others in order.
fn move_pair(p: TreePacking, i: usize, j: usize) -> TreePacking {
    let mut rest = p.trees.iter().skip(2).cloned();
    let trees = (0..p.len())
        .map(|slot| match slot {
            s if s == i => p.trees[0].clone(),
            s if s == j => p.trees[1].clone(),
            _ => rest.next().expect("one tree per remaining slot"),
        })
        .collect();
    TreePacking::new(trees)
}

/// Component representative (smallest vertex) of every vertex other than
/// `avoid`, using the edges of `tree` that miss `avoid`.
fn components_without(g: &Multigraph, tree: &BTreeSet<EdgeId>, avoid: VertexId) -> BTreeMap<VertexId, VertexId> {
    let kept: BTreeSet<EdgeId> = tree.iter().copied().filter(|&e| !g.is_incident(e, avoid)).collect();
    let sub = g.edge_subgraph(&kept);
    let mut out = BTreeMap::new();
    for comp in sub.components_avoiding(&BTreeSet::from([avoid]), &BTreeSet::new()) {
        let rep = *comp.first().expect("components are nonempty");
        out.extend(comp.into_iter().map(|v| (v, rep)));
    }
    out
}

fn walk_from_edges(g: &Multigraph, start: VertexId, edges: &[EdgeId]) -> Result<Vec<WalkStep>> {
    let mut walk = vec![WalkStep::Vertex(start)];
    let mut at = start;
    for &e in edges {
        at = g.other_end(e, at).ok_or_else(|| invariant!("{e} does not continue the path at {at}"))?;
        walk.push(WalkStep::Edge(e));
        walk.push(WalkStep::Vertex(at));
    }
    Ok(walk)
}

/// `W_n ∖ V_{n-1}`: every neighbour of `V_{n-1}` outside it. On the
/// half-cylinder this is the next column.
fn grown_set(g: &Multigraph, prev: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    prev.iter().flat_map(|&x| g.neighbors(x)).filter(|y| !prev.contains(y)).collect()
}

fn ring_cut_in(family: &Family, prev: &BTreeSet<VertexId>) -> Result<Cut> {
    let g = &family.graph;
    let grown = grown_set(g, prev);
    let boundary = family.column(family.columns - 1);
    if grown.is_empty() || grown.iter().any(|v| boundary.contains(v)) {
        return Err(Error::Budget("the level reaches the far boundary column; increase the guard band R".into()));
    }
    if g.induced_subgraph(&grown).components().len() != 1 {
        return Err(precondition!("the added vertices do not induce a connected graph"));
    }
    let w: BTreeSet<VertexId> = prev.union(&grown).copied().collect();
    if g.remove_vertices(&w).components().len() != 1 {
        return Err(precondition!("more than one component remains beyond the level"));
    }
    let (_, cut) = local_edge_connectivity(g, &w, &boundary)?;
    if g.remove_vertices(&cut.side_a).components().len() != 1 {
        return Err(invariant!("the far side of the ring cut is disconnected"));
    }
    Ok(cut)
}

/// `S_n`: a minimum cut between `W_n = V_{n-1} ∪ N(V_{n-1})` and the far
/// boundary column. The cut is recomputed with one more guard column and
/// must come out the same.
pub fn ring_cut(state: &ExhaustionState, n: usize) -> Result<Cut> {
    if n == 0 {
        return Err(precondition!("level 0 is the base and has no ring cut"));
    }
    let prev = state
        .level_vertices(n - 1)
        .ok_or_else(|| precondition!("level {} is not packed yet", n - 1))?;
    let cut = ring_cut_in(&state.family, prev)?;
    let wider = ring_cut_in(&state.family.extended(1), prev)?;
    if wider.edges != cut.edges {
        return Err(Error::Budget(format!("ring cut {n} changes when the guard band grows; increase R")));
    }
    Ok(cut)
}

/// Pack level `n` with `k` trees, bridging the scheduled gap if any.
pub fn step_pack(state: &mut ExhaustionState, n: usize) -> Result<()> {
    state.next_step(n, Mode::TwoTree)
}

/// Pack level `n` with `k - 1` trees, closing the scheduled gap if any.
pub fn step_pack_single_tree(state: &mut ExhaustionState, n: usize) -> Result<()> {
    state.next_step(n, Mode::OneTree)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredConfig {
    pub m: usize,
    pub levels: usize,
    pub k: usize,
    pub mode: Mode,
    pub guard: usize,
    /// Replaces the round-robin schedule when present.
    pub schedule: Option<Vec<ScheduleEntry>>,
}

impl LayeredConfig {
    pub fn new(m: usize, levels: usize, k: usize, mode: Mode) -> Self {
        LayeredConfig { m, levels, k, mode, guard: DEFAULT_GUARD, schedule: None }
    }
}

/// Build the family and pack every level. A guard band too narrow for a
/// stable ring cut is widened and the run restarted.
pub fn run_layered(config: &LayeredConfig) -> Result<ExhaustionState> {
    let mut guard = config.guard.max(1);
    loop {
        let family = builtin_family(HALF_CYLINDER, config.m, config.levels, guard)?;
        let mut state = ExhaustionState::new(family, config.k, config.mode, config.schedule.clone().map(Schedule::Fixed))?;
        let mut result = Ok(());
        for n in 1..=config.levels {
            result = match config.mode {
                Mode::TwoTree => step_pack(&mut state, n),
                Mode::OneTree => step_pack_single_tree(&mut state, n),
            };
            if result.is_err() {
                break;
            }
        }
        match result {
            Ok(()) => return Ok(state),
            Err(Error::Budget(_)) if guard < config.guard.max(1) + 8 => guard += 1,
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GapStatus {
    Open,
    Terminated { level: usize },
    Bridged { levels: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapSummary {
    pub tree: usize,
    pub reps: (VertexId, VertexId),
    pub scheduled: usize,
    pub status: GapStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapAudit {
    pub levels: usize,
    pub gaps: Vec<GapSummary>,
    /// Gaps of the last level that no schedule entry ever targeted.
    pub open: Vec<GapSummary>,
    pub violations: Vec<String>,
}

impl GapAudit {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Recheck every level and every logged gap from scratch.
pub fn audit_gaps(state: &ExhaustionState) -> GapAudit {
    let mut audit = GapAudit { levels: state.levels.len(), ..GapAudit::default() };
    if state.levels.len() < 2 {
        return audit;
    }
    let v = &mut audit.violations;
    let full = &state.family.graph;
    for (idx, level) in state.levels.iter().enumerate() {
        let n = level.n;
        let report = verify_packing(&level.graph, &level.packing, None);
        v.extend(report.violations.iter().map(|m| format!("level {n}: {m}")));
        if level.packing.len() != state.tree_count() {
            v.push(format!("level {n} has {} trees", level.packing.len()));
        }
        if idx == 0 {
            continue;
        }
        let prev = &state.levels[idx - 1];
        let blob: BTreeSet<VertexId> = level.vertices.difference(&prev.vertices).copied().chain([level.far]).collect();
        match level.graph.contract(&blob) {
            Ok((_, map)) => {
                for (i, t) in level.packing.trees.iter().enumerate() {
                    if prev.packing.trees.get(i) != Some(&restriction(t, &map)) {
                        v.push(format!("tree {i} of level {n} does not restrict to level {}", n - 1));
                    }
                }
            }
            Err(e) => v.push(format!("level {n}: {e}")),
        }
        if !prev.vertices.is_subset(&level.vertices) {
            v.push(format!("level {n} does not contain level {}", n - 1));
        }
    }

    let inside = |e: EdgeId, set: &BTreeSet<VertexId>| full.endpoints(e).is_some_and(|(a, b)| set.contains(&a) && set.contains(&b));
    for event in &state.events {
        let Outcome::Joined { gap, w1, w2, walk } = &event.outcome else { continue };
        let n = event.level;
        let Some(level) = state.level(n) else {
            v.push(format!("event at unpacked level {n}"));
            continue;
        };
        let (i, j) = (event.entry.i, event.entry.j);
        let allowed = match state.mode {
            Mode::TwoTree => level.packing.union_of(&[i, j]),
            Mode::OneTree => level.packing.trees[i].clone(),
        };
        if let Err(m) = check_walk(&level.graph, &allowed, level.far, Point::Vertex(*w1), Point::Vertex(*w2), walk) {
            v.push(format!("level {n}: joining path invalid: {m}"));
        }
        let record = &state.gaps[*gap];
        match state.mode {
            Mode::TwoTree => {
                let Some(bridge) = record.bridges.iter().find(|b| b.level == n) else {
                    v.push(format!("gap {gap} scheduled at level {n} has no bridge"));
                    continue;
                };
                let prev = state.level_vertices(n - 1).expect("level n exists");
                if let Some(e) = bridge.edges.iter().find(|&&e| inside(e, prev)) {
                    v.push(format!("bridge at level {n} uses {e} inside level {}", n - 1));
                }
                let expected: BTreeSet<EdgeId> = walk
                    .iter()
                    .filter_map(|s| match s {
                        WalkStep::Edge(e) if level.packing.trees[j].contains(e) => Some(*e),
                        _ => None,
                    })
                    .collect();
                if expected != bridge.edges {
                    v.push(format!("bridge at level {n} does not match its path"));
                }
            }
            Mode::OneTree => {
                if record.terminated != Some(n) {
                    v.push(format!("gap {gap} scheduled at level {n} did not close there"));
                }
            }
        }
    }
    for (idx, g) in state.gaps.iter().enumerate() {
        if state.mode == Mode::TwoTree {
            if g.bridges.len() < g.scheduled.len() {
                v.push(format!("gap {idx} scheduled {} times has {} bridges", g.scheduled.len(), g.bridges.len()));
            }
            for (x, a) in g.bridges.iter().enumerate() {
                for b in &g.bridges[x + 1..] {
                    if !a.edges.is_disjoint(&b.edges) {
                        v.push(format!("gap {idx}: bridges at levels {} and {} share edges", a.level, b.level));
                    }
                }
            }
        }
        let status = match g.terminated {
            Some(level) => GapStatus::Terminated { level },
            None if g.bridges.is_empty() => GapStatus::Open,
            None => GapStatus::Bridged { levels: g.bridges.iter().map(|b| b.level).collect() },
        };
        audit.gaps.push(GapSummary { tree: g.tree, reps: g.reps, scheduled: g.scheduled.len(), status });
    }

    let last = state.levels.last().expect("at least two levels");
    for (i, t) in last.packing.trees.iter().enumerate() {
        let comps = components_without(&last.graph, t, last.far);
        let reps: BTreeSet<VertexId> = comps.values().copied().collect();
        let reps: Vec<VertexId> = reps.into_iter().collect();
        for (x, &r1) in reps.iter().enumerate() {
            for &r2 in &reps[x + 1..] {
                let logged = state.gaps.iter().any(|g| g.tree == i && g.reps == (r1, r2));
                if !logged {
                    audit.open.push(GapSummary { tree: i, reps: (r1, r2), scheduled: 0, status: GapStatus::Open });
                }
            }
        }
    }
    audit
}
