//! Graph generators: circulants, random unions of Hamiltonian cycles, a
//! small named catalog, and the layered construction that hangs copies of
//! a base graph `H` off subdivided paths, together with a connected
//! spanning even subgraph of it.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::{crossing_edges, edge_connectivity};
use crate::error::{invariant, precondition, Error, Result};
use crate::eulerline::parity_eulerian_subgraph;
use crate::layered::builtin_family;
use crate::multigraph::{EdgeId, Multigraph, VertexId};
use crate::packing::{pack_spanning_trees, tree_path, UnionFind};

/// Default limit on the number of copies of `H` a construction may add.
pub const DEFAULT_COPY_CAP: usize = 100_000;

/// Largest order tried by [`find_base_h`].
const BASE_SEARCH_LIMIT: usize = 64;

fn v(i: usize) -> VertexId {
    VertexId(i as u32)
}

/// The circulant multigraph on `0..n` joining `i` and `i + s` for every
/// offset `s`. Offsets may repeat; an offset of `n / 2` contributes each
/// of its chords once.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Multigraph> {
    if n < 3 {
        return Err(precondition!("a circulant needs at least 3 vertices"));
    }
    let mut g = Multigraph::with_vertices(n as u32);
    for &s in offsets {
        if s == 0 || 2 * s > n {
            return Err(precondition!("offset {s} is outside 1..={}", n / 2));
        }
        let count = if 2 * s == n { n / 2 } else { n };
        for i in 0..count {
            g.add_edge(v(i), v((i + s) % n))?;
        }
    }
    Ok(g)
}

/// A base graph with its far-apart vertex set.
#[derive(Clone, Debug)]
pub struct BaseGraph {
    pub h: Multigraph,
    /// `S`, in increasing order.
    pub s: Vec<VertexId>,
    pub order: usize,
    pub offsets: Vec<usize>,
}

/// Nondecreasing offset lists over `1..=n/2` giving every vertex degree `k`.
fn offset_lists(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, from: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for s in from..=n / 2 {
            let deg = if 2 * s == n { 1 } else { 2 };
            if deg > left || (deg == 1 && cur.contains(&s)) {
                continue;
            }
            cur.push(s);
            go(n, s, left - deg, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, k, &mut Vec::new(), &mut out);
    out
}

fn bfs_distances(g: &Multigraph, from: VertexId) -> BTreeMap<VertexId, usize> {
    let mut dist = BTreeMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        for y in g.neighbors(x) {
            if let Entry::Vacant(slot) = dist.entry(y) {
                slot.insert(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

/// `count` vertices pairwise at distance at least `apart`, smallest first.
fn far_apart_set(g: &Multigraph, count: usize, apart: usize) -> Option<Vec<VertexId>> {
    let verts: Vec<VertexId> = g.vertices().collect();
    let dist: BTreeMap<VertexId, BTreeMap<VertexId, usize>> = verts.iter().map(|&x| (x, bfs_distances(g, x))).collect();
    let far = |a: VertexId, b: VertexId| dist[&a].get(&b).is_none_or(|&d| d >= apart);
    fn extend(
        verts: &[VertexId],
        start: usize,
        count: usize,
        chosen: &mut Vec<VertexId>,
        far: &dyn Fn(VertexId, VertexId) -> bool,
    ) -> bool {
        if chosen.len() == count {
            return true;
        }
        for idx in start..verts.len() {
            let x = verts[idx];
            if chosen.iter().all(|&c| far(c, x)) {
                chosen.push(x);
                if extend(verts, idx + 1, count, chosen, far) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    extend(&verts, 0, count, &mut chosen, &far).then_some(chosen)
}

/// The first `k`-regular circulant, by order and then offset list, whose
/// edge connectivity is exactly `k` and which has `k` vertices pairwise at
/// distance at least `k`.
pub fn find_base_h(k: usize) -> Result<BaseGraph> {
    if k < 2 {
        return Err(precondition!("the base graph needs k >= 2"));
    }
    for n in 3..=BASE_SEARCH_LIMIT {
        for offsets in offset_lists(n, k) {
            let h = circulant(n, &offsets)?;
            if edge_connectivity(&h) != k {
                continue;
            }
            if let Some(s) = far_apart_set(&h, k, k) {
                return Ok(BaseGraph { h, s, order: n, offsets });
            }
        }
    }
    Err(Error::Budget(format!("no circulant base graph for k = {k} up to order {BASE_SEARCH_LIMIT}")))
}

/// A simple path: its vertices in order and the edges between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplePath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Every simple path with exactly `len` edges, each listed once, oriented
/// from its smaller end. Parallel edges give different paths.
pub fn paths_of_length(g: &Multigraph, len: usize, cap: usize) -> Result<Vec<SimplePath>> {
    fn dfs(
        g: &Multigraph,
        len: usize,
        cap: usize,
        verts: &mut Vec<VertexId>,
        edges: &mut Vec<EdgeId>,
        out: &mut Vec<SimplePath>,
    ) -> Result<()> {
        let at = *verts.last().expect("path has a start");
        if edges.len() == len {
            if verts[0] < at {
                if out.len() == cap {
                    return Err(Error::Budget(format!("more than {cap} paths of length {len}")));
                }
                out.push(SimplePath { vertices: verts.clone(), edges: edges.clone() });
            }
            return Ok(());
        }
        for e in g.incident(at).collect::<Vec<_>>() {
            let y = g.other_end(e, at).expect("incident edge");
            if verts.contains(&y) {
                continue;
            }
            verts.push(y);
            edges.push(e);
            dfs(g, len, cap, verts, edges, out)?;
            verts.pop();
            edges.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    if len == 0 {
        return Ok(out);
    }
    for s in g.vertices() {
        dfs(g, len, cap, &mut vec![s], &mut Vec::new(), &mut out)?;
    }
    Ok(out)
}

/// `p(e)`: how many of `paths` use each edge.
pub fn path_counts(paths: &[SimplePath]) -> BTreeMap<EdgeId, usize> {
    let mut counts = BTreeMap::new();
    for p in paths {
        for &e in &p.edges {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    counts
}

/// An edge of `G'_n` replaced by a chain through `inner`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    pub edge: EdgeId,
    pub inner: Vec<VertexId>,
    pub pieces: Vec<EdgeId>,
}

/// One copy of `H` hung off a subdivided path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyRecord {
    /// The copy is part of `G_step`.
    pub step: usize,
    /// Index of the host path in `path_index[step - 2]`.
    pub host: usize,
    /// The host path's edges in `G'_{step-1}`, before subdivision.
    pub host_path: Vec<EdgeId>,
    /// Image of each vertex of `H`, in the vertex order of `H`.
    pub vertices: Vec<VertexId>,
    /// Image of each edge of `H`, in the edge order of `H`, as created.
    pub edges: Vec<EdgeId>,
    /// `s_points[r]` is the image of `S[r]`, an inner vertex of
    /// `host_path[r]`.
    pub s_points: Vec<VertexId>,
}

/// Everything needed to replay the construction.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ATStructure {
    pub k: usize,
    pub depth: usize,
    pub s: Vec<VertexId>,
    /// `levels[n]` is `V_n` for `n < depth`; `V_0` is empty.
    pub levels: Vec<BTreeSet<VertexId>>,
    /// `path_index[n - 1]`: the length-`k` paths of `G'_n`.
    pub path_index: Vec<Vec<SimplePath>>,
    /// `path_counts[n - 1]`: `p_k(e)` for the edges of `G'_n`.
    pub path_counts: Vec<BTreeMap<EdgeId, usize>>,
    /// `subdivisions[n - 1]`: the edges of `G'_n` that were subdivided.
    pub subdivisions: Vec<Vec<Subdivision>>,
    pub copies: Vec<CopyRecord>,
    /// `stages[n - 1]` is `G_n`.
    #[serde(skip)]
    pub stages: Vec<Multigraph>,
}

impl ATStructure {
    /// `G_n` for `1 <= n <= depth`.
    pub fn stage(&self, n: usize) -> Option<&Multigraph> {
        n.checked_sub(1).and_then(|i| self.stages.get(i))
    }

    pub fn copies_at(&self, step: usize) -> impl Iterator<Item = (usize, &CopyRecord)> {
        self.copies.iter().enumerate().filter(move |(_, c)| c.step == step)
    }
}

fn check_base(h: &Multigraph, s: &[VertexId], k: usize) -> Result<()> {
    if k < 2 {
        return Err(precondition!("the construction needs k >= 2"));
    }
    let distinct: BTreeSet<VertexId> = s.iter().copied().collect();
    if s.len() != k || distinct.len() != k || s.iter().any(|x| !h.has_vertex(*x)) {
        return Err(precondition!("S must be {k} distinct vertices of H"));
    }
    if distinct.len() == h.vertex_count() {
        return Err(precondition!("H needs a vertex outside S"));
    }
    let kappa = edge_connectivity(h);
    if kappa < k {
        return Err(precondition!("H is only {kappa}-edge-connected, need {k}"));
    }
    for &a in s {
        let dist = bfs_distances(h, a);
        for &b in s.iter().filter(|&&b| b != a) {
            if dist.get(&b).is_some_and(|&d| d < k) {
                return Err(precondition!("{a} and {b} are at distance {} < {k}", dist[&b]));
            }
        }
    }
    Ok(())
}

/// `G_depth` of the layered construction over `(H, S)`, with the default
/// copy cap. Asserts that the result has edge connectivity exactly `k`.
pub fn gen_aharoni_thomassen(h: &Multigraph, s: &[VertexId], k: usize, depth: usize) -> Result<(Multigraph, ATStructure)> {
    gen_aharoni_thomassen_with_cap(h, s, k, depth, DEFAULT_COPY_CAP)
}

pub fn gen_aharoni_thomassen_with_cap(
    h: &Multigraph,
    s: &[VertexId],
    k: usize,
    depth: usize,
    cap: usize,
) -> Result<(Multigraph, ATStructure)> {
    check_base(h, s, k)?;
    if depth < 1 {
        return Err(precondition!("depth must be at least 1"));
    }
    let mut s_sorted = s.to_vec();
    s_sorted.sort();
    let h_vertices: Vec<VertexId> = h.vertices().collect();
    let h_index: BTreeMap<VertexId, usize> = h_vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let s_slot: BTreeMap<VertexId, usize> = s_sorted.iter().enumerate().map(|(r, &x)| (x, r)).collect();
    let h_edges: Vec<(VertexId, VertexId)> = h.edges().map(|(_, a, b)| (a, b)).collect();

    let mut g = h.clone();
    let mut st = ATStructure { k, depth, s: s_sorted.clone(), levels: vec![BTreeSet::new()], ..ATStructure::default() };
    st.stages.push(g.clone());
    for n in 1..depth {
        let prime = g.remove_vertices(&st.levels[n - 1]);
        let left = cap.saturating_sub(st.copies.len());
        let paths = paths_of_length(&prime, k, left).map_err(|e| match e {
            Error::Budget(_) => Error::Budget(format!("copy cap {cap} exceeded at step {}", n + 1)),
            other => other,
        })?;
        let counts = path_counts(&paths);
        let plan: Vec<(EdgeId, usize)> = counts.iter().map(|(&e, &c)| (e, c)).collect();
        let (next, pieces) = g.subdivide_many(&plan)?;
        g = next;
        let subdivisions: Vec<Subdivision> = plan
            .iter()
            .zip(pieces)
            .map(|(&(edge, _), (inner, pieces))| Subdivision { edge, inner, pieces })
            .collect();
        st.levels.push(g.vertex_set().clone());

        let inner_of: BTreeMap<EdgeId, &Vec<VertexId>> = subdivisions.iter().map(|s| (s.edge, &s.inner)).collect();
        let mut used: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for (host, p) in paths.iter().enumerate() {
            let s_points: Vec<VertexId> = p
                .edges
                .iter()
                .map(|e| {
                    let slot = used.entry(*e).or_insert(0);
                    let x = inner_of[e][*slot];
                    *slot += 1;
                    x
                })
                .collect();
            let vertices: Vec<VertexId> = h_vertices
                .iter()
                .map(|x| match s_slot.get(x) {
                    Some(&r) => s_points[r],
                    None => g.add_vertex(),
                })
                .collect();
            let edges = h_edges
                .iter()
                .map(|(a, b)| g.add_edge(vertices[h_index[a]], vertices[h_index[b]]))
                .collect::<Result<Vec<_>>>()?;
            st.copies.push(CopyRecord { step: n + 1, host, host_path: p.edges.clone(), vertices, edges, s_points });
        }
        st.path_index.push(paths);
        st.path_counts.push(counts);
        st.subdivisions.push(subdivisions);
        st.stages.push(g.clone());
    }
    let kappa = edge_connectivity(&g);
    if kappa != k {
        return Err(invariant!("the depth-{depth} graph has edge connectivity {kappa}, expected {k}"));
    }
    Ok((g, st))
}

/// How one copy is cut off by its subdivided host path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorCheck {
    pub copy: usize,
    /// The `k` host edges of `G'_{n-1}`.
    pub host_path: Vec<EdgeId>,
    /// Every piece of the subdivided host edges.
    pub cut: BTreeSet<EdgeId>,
    /// Size of the boundary of the part cut off, which lies inside `cut`.
    pub boundary: usize,
    /// The part cut off avoids `G_{n-1}` and every other copy of step `n`.
    pub isolated: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorReport {
    pub level: usize,
    pub checks: Vec<SeparatorCheck>,
}

impl SeparatorReport {
    pub fn ok(&self, k: usize) -> bool {
        self.checks.iter().all(|c| c.isolated && c.host_path.len() == k)
    }
}

/// Delete the subdivided host path of up to `sample` evenly spread copies
/// of step `level` from the final graph and check what gets cut off.
pub fn at_separator_demo(st: &ATStructure, level: usize, sample: usize) -> Result<SeparatorReport> {
    let mut report = SeparatorReport { level, checks: Vec::new() };
    if level < 2 {
        return Ok(report);
    }
    let g = st.stages.last().ok_or_else(|| precondition!("the structure has no stages"))?;
    let older = st.stage(level - 1).ok_or_else(|| precondition!("no stage {}", level - 1))?;
    let copies: Vec<(usize, &CopyRecord)> = st.copies_at(level).collect();
    if copies.is_empty() || sample == 0 {
        return Ok(report);
    }
    let pieces: BTreeMap<EdgeId, &Vec<EdgeId>> =
        st.subdivisions[level - 2].iter().map(|s| (s.edge, &s.pieces)).collect();
    let picks: BTreeSet<usize> = (0..sample.min(copies.len())).map(|t| t * copies.len() / sample.min(copies.len())).collect();
    for t in picks {
        let (idx, copy) = copies[t];
        let cut: BTreeSet<EdgeId> = copy.host_path.iter().flat_map(|e| pieces[e].iter().copied()).collect();
        let start = *copy
            .vertices
            .iter()
            .find(|x| !copy.s_points.contains(x))
            .ok_or_else(|| invariant!("copy {idx} has no vertex outside S"))?;
        let rest = g.remove_edges(&cut);
        let part = rest
            .components()
            .into_iter()
            .find(|c| c.contains(&start))
            .expect("start is a vertex");
        let others = copies.iter().filter(|(j, _)| *j != idx).flat_map(|(_, c)| c.vertices.iter());
        let isolated = older.vertices().all(|x| !part.contains(&x)) && others.into_iter().all(|x| !part.contains(x));
        let boundary = crossing_edges(g, &part);
        if !boundary.is_subset(&cut) {
            return Err(invariant!("copy {idx} is attached outside its host path"));
        }
        report.checks.push(SeparatorCheck { copy: idx, host_path: copy.host_path.clone(), cut, boundary: boundary.len(), isolated });
    }
    Ok(report)
}

fn toggle(l: &mut BTreeSet<EdgeId>, deg: &mut BTreeMap<VertexId, usize>, g: &Multigraph, e: EdgeId) {
    let (a, b) = g.endpoints(e).expect("edge of the stage");
    if l.remove(&e) {
        for x in [a, b] {
            *deg.get_mut(&x).expect("counted") -= 1;
        }
    } else {
        l.insert(e);
        for x in [a, b] {
            *deg.entry(x).or_insert(0) += 1;
        }
    }
}

/// Add cycles of `G - L` to `L` until the complement is a forest.
fn absorb_complement_cycles(g: &Multigraph, l: &mut BTreeSet<EdgeId>) {
    loop {
        let mut uf = UnionFind::default();
        let mut forest = BTreeSet::new();
        let mut cycle = None;
        for (e, a, b) in g.edges().filter(|(e, _, _)| !l.contains(e)) {
            if uf.union(a, b) {
                forest.insert(e);
            } else {
                let mut c = tree_path(g, &forest, a, b).expect("same class means a forest path");
                c.push(e);
                cycle = Some(c);
                break;
            }
        }
        match cycle {
            Some(c) => l.extend(c),
            None => return,
        }
    }
}

/// Vertices of the forest `adj` on paths between members of `targets`.
fn forest_hull(adj: &BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>, targets: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut deg: BTreeMap<VertexId, usize> = adj.iter().map(|(&x, n)| (x, n.len())).collect();
    let mut alive: BTreeSet<VertexId> = adj.keys().copied().collect();
    alive.extend(targets);
    let mut queue: Vec<VertexId> = alive.iter().copied().filter(|x| deg.get(x).copied().unwrap_or(0) <= 1 && !targets.contains(x)).collect();
    while let Some(x) = queue.pop() {
        if !alive.remove(&x) {
            continue;
        }
        for &(_, y) in adj.get(&x).map(|n| n.as_slice()).unwrap_or(&[]) {
            if alive.contains(&y) {
                let d = deg.get_mut(&y).expect("forest vertex");
                *d -= 1;
                if *d <= 1 && !targets.contains(&y) {
                    queue.push(y);
                }
            }
        }
    }
    alive
}

fn check_even_connected_spanning(g: &Multigraph, l: &BTreeSet<EdgeId>, level: usize) -> Result<()> {
    let sub = g.edge_subgraph(l);
    if let Some(x) = sub.vertices().find(|&x| sub.degree(x) % 2 == 1) {
        return Err(invariant!("level {level}: {x} has odd degree {}", sub.degree(x)));
    }
    if g.vertex_count() > 1 {
        if let Some(x) = sub.vertices().find(|&x| sub.degree(x) == 0) {
            return Err(invariant!("level {level}: {x} is not covered"));
        }
    }
    if !sub.is_connected() {
        return Err(invariant!("level {level}: the subgraph is disconnected"));
    }
    Ok(())
}

/// The even subgraphs of every stage and how they were obtained.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvenSubgraphs {
    /// `levels[n - 1]` is `L_n`.
    pub levels: Vec<BTreeSet<EdgeId>>,
    /// Per step, the copies that were reached by flipping a forest path.
    pub flipped: Vec<usize>,
    /// Per step, the edges the complement forest of `G_n - L_n` had.
    pub forest_edges: Vec<usize>,
}

impl EvenSubgraphs {
    pub fn last(&self) -> &BTreeSet<EdgeId> {
        self.levels.last().expect("at least one level")
    }
}

/// Connected spanning subgraphs `L_1, ..., L_depth` with every degree even,
/// one per stage of the construction. Needs `k >= 4` so `H` has two
/// edge-disjoint spanning trees.
///
/// When every vertex of `H` has even degree, so has every stage, the
/// complement forest is empty and no flipping happens.
pub fn at_eulerian_subgraph(st: &ATStructure) -> Result<EvenSubgraphs> {
    if st.k < 4 {
        return Err(precondition!("the even subgraph construction needs k >= 4, got {}", st.k));
    }
    let h = st.stage(1).ok_or_else(|| precondition!("the structure has no stages"))?;
    let trees = pack_spanning_trees(h, 2).map_err(|e| invariant!("H has no two disjoint spanning trees: {e}"))?;
    let (t1, t2) = (&trees.trees[0], &trees.trees[1]);
    let k_sub = parity_eulerian_subgraph(h, t1, t2)?;
    check_even_connected_spanning(h, &k_sub, 1)?;
    let h_edge_pos: BTreeMap<EdgeId, usize> = h.edges().enumerate().map(|(i, (e, _, _))| (e, i)).collect();
    // K with the parity of S[a] and S[b] flipped along their path in T1.
    let k_uv = |a: usize, b: usize| -> Result<BTreeSet<EdgeId>> {
        let path = tree_path(h, t1, st.s[a], st.s[b]).ok_or_else(|| invariant!("T1 is not spanning"))?;
        Ok(k_sub.symmetric_difference(&path.into_iter().collect()).copied().collect())
    };

    let mut out = vec![k_sub.clone()];
    let (mut flipped, mut forest_edges) = (Vec::new(), Vec::new());
    for n in 1..st.depth {
        let (g, g_next) = (&st.stages[n - 1], &st.stages[n]);
        let mut l_n = out[n - 1].clone();
        absorb_complement_cycles(g, &mut l_n);
        out[n - 1] = l_n.clone();
        let pieces: BTreeMap<EdgeId, &Vec<EdgeId>> = st.subdivisions[n - 1].iter().map(|s| (s.edge, &s.pieces)).collect();
        let image = |e: EdgeId| pieces.get(&e).map_or_else(|| vec![e], |p| p.to_vec());

        let mut l: BTreeSet<EdgeId> = BTreeSet::new();
        let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in l_n.iter().flat_map(|&e| image(e)) {
            toggle(&mut l, &mut deg, g_next, e);
        }
        let forest: BTreeSet<EdgeId> = g.edge_ids().difference(&l_n).flat_map(|&e| image(e)).collect();
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        for &e in &forest {
            let (a, b) = g_next.endpoints(e).expect("forest edge");
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }

        let copies: Vec<(usize, &CopyRecord)> = st.copies_at(n + 1).collect();
        let owner: BTreeMap<VertexId, usize> =
            copies.iter().enumerate().flat_map(|(c, (_, r))| r.s_points.iter().map(move |&x| (x, c))).collect();
        let mut handled = vec![false; copies.len()];
        let in_l = |deg: &BTreeMap<VertexId, usize>, x: &VertexId| deg.get(x).is_some_and(|&d| d > 0);
        let add_mapped = |set: &BTreeSet<EdgeId>, copy: &CopyRecord, l: &mut BTreeSet<EdgeId>, deg: &mut BTreeMap<VertexId, usize>| {
            for e in set {
                toggle(l, deg, g_next, copy.edges[h_edge_pos[e]]);
            }
        };

        for _round in 0..=copies.len() {
            let pending: Vec<usize> = (0..copies.len())
                .filter(|&c| !handled[c] && copies[c].1.vertices.iter().all(|x| !in_l(&deg, x)))
                .collect();
            let pending_points: BTreeSet<VertexId> = pending.iter().flat_map(|&c| copies[c].1.s_points.iter().copied()).collect();
            let pending_hull = forest_hull(&adj, &pending_points);
            let unsettled: Vec<usize> = (0..copies.len())
                .filter(|&c| {
                    !handled[c]
                        && copies[c].1.vertices.iter().filter(|x| in_l(&deg, x)).all(|x| pending_hull.contains(x))
                })
                .collect();
            if unsettled.is_empty() {
                break;
            }
            let targets: BTreeSet<VertexId> = unsettled.iter().flat_map(|&c| copies[c].1.s_points.iter().copied()).collect();
            let hull = forest_hull(&adj, &targets);
            let leaf = hull
                .iter()
                .copied()
                .find(|x| adj.get(x).map_or(0, |nb| nb.iter().filter(|(_, y)| hull.contains(y)).count()) <= 1)
                .ok_or_else(|| invariant!("level {}: the unsettled hull has no leaf", n + 1))?;
            if !targets.contains(&leaf) || in_l(&deg, &leaf) {
                return Err(invariant!("level {}: hull leaf {leaf} is settled or already covered", n + 1));
            }
            let c = owner[&leaf];
            let copy = copies[c].1;
            let b = copy.s_points.iter().position(|&x| x == leaf).expect("owner");
            let a = (0..st.k).find(|&r| r != b).expect("k >= 2");
            let u = copy.s_points[a];
            let path = tree_path(g_next, &forest, u, leaf)
                .ok_or_else(|| invariant!("level {}: {u} and {leaf} are not joined in the forest", n + 1))?;
            for e in path {
                toggle(&mut l, &mut deg, g_next, e);
            }
            add_mapped(&k_uv(a, b)?, copy, &mut l, &mut deg);
            handled[c] = true;
        }
        for (c, (_, copy)) in copies.iter().enumerate() {
            if !handled[c] && !copy.vertices.iter().all(|x| in_l(&deg, x)) {
                add_mapped(&k_sub, copy, &mut l, &mut deg);
            }
        }
        check_even_connected_spanning(g_next, &l, n + 1)?;
        out.push(l);
        flipped.push(handled.iter().filter(|&&h| h).count());
        forest_edges.push(forest.len());
    }
    Ok(EvenSubgraphs { levels: out, flipped, forest_edges })
}

/// The union of `k` Hamiltonian cycles on `0..n`, each following an
/// independent random permutation. Every cut is crossed at least twice by
/// each cycle, so the result is `2k`-edge-connected.
pub fn gen_random_2k_connected(n: usize, k: usize, seed: u64) -> Result<Multigraph> {
    if n < 3 {
        return Err(precondition!("need at least 3 vertices, got {n}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Multigraph::with_vertices(n as u32);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        order.shuffle(&mut rng);
        for i in 0..n {
            g.add_edge(v(order[i]), v(order[(i + 1) % n]))?;
        }
    }
    let kappa = edge_connectivity(&g);
    if kappa < 2 * k {
        return Err(invariant!("union of {k} Hamiltonian cycles is only {kappa}-edge-connected"));
    }
    Ok(g)
}

/// Names understood by [`named_graphs`]; `<n>` stands for a number.
pub const NAMED_GRAPHS: &[&str] =
    &["C<n>", "doubled_C<n>", "K<n>", "doubled_K<n>", "crossgadget8", "half_cylinder_<m>x<columns>"];

fn complete(n: usize, mult: usize) -> Multigraph {
    let mut g = Multigraph::with_vertices(n as u32);
    for a in 0..n {
        for b in a + 1..n {
            for _ in 0..mult {
                g.add_edge(v(a), v(b)).expect("distinct");
            }
        }
    }
    g
}

/// Four heavy pairs in a ring, neighbouring pairs joined by two edges.
/// The minimum cuts, of size 4, are the six ways to cut the ring twice,
/// and many of them cross.
fn crossgadget8() -> Multigraph {
    let mut g = Multigraph::with_vertices(8);
    for c in 0..4 {
        let (x, y) = (v(2 * c), v(2 * c + 1));
        for _ in 0..5 {
            g.add_edge(x, y).expect("distinct");
        }
        for _ in 0..2 {
            g.add_edge(y, v((2 * c + 2) % 8)).expect("distinct");
        }
    }
    g
}

pub fn named_graphs(name: &str) -> Result<Multigraph> {
    let num = |s: &str| s.parse::<usize>().ok();
    if name == "crossgadget8" {
        return Ok(crossgadget8());
    }
    if let Some(rest) = name.strip_prefix("half_cylinder_") {
        if let Some((m, c)) = rest.split_once('x').and_then(|(a, b)| Some((num(a)?, num(b)?))) {
            if c >= 3 {
                return Ok(builtin_family(crate::layered::HALF_CYLINDER, m, c - 2, 1)?.graph);
            }
        }
    }
    let (mult, base) = match name.strip_prefix("doubled_") {
        Some(rest) => (2, rest),
        None => (1, name),
    };
    if let Some(n) = base.strip_prefix('C').and_then(num) {
        return circulant(n, &vec![1; mult]);
    }
    if let Some(n) = base.strip_prefix('K').and_then(num) {
        if n >= 2 {
            return Ok(complete(n, mult));
        }
    }
    Err(precondition!("unknown graph name {name:?}; known patterns: {}", NAMED_GRAPHS.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::global_edge_connectivity;
    use crate::eulerline::{euler_tour, hamilton_from_trail, is_dominating};

    /// Brute-force count of simple paths with `len` edges, over ordered
    /// edge sequences, halved.
    fn brute_path_count(g: &Multigraph, len: usize) -> usize {
        let edges: Vec<(EdgeId, VertexId, VertexId)> = g.edges().collect();
        fn grow(edges: &[(EdgeId, VertexId, VertexId)], len: usize, seq: &mut Vec<VertexId>, used: usize) -> usize {
            if used == len {
                return 1;
            }
            let at = *seq.last().unwrap();
            let mut total = 0;
            for &(_, a, b) in edges {
                let next = if a == at { b } else if b == at { a } else { continue };
                if seq.contains(&next) {
                    continue;
                }
                seq.push(next);
                total += grow(edges, len, seq, used + 1);
                seq.pop();
            }
            total
        }
        let ordered: usize = g.vertices().map(|s| grow(&edges, len, &mut vec![s], 0)).sum();
        ordered / 2
    }

    #[test]
    fn circulant_degrees() {
        let g = circulant(6, &[1, 3]).unwrap();
        assert!(g.vertices().all(|x| g.degree(x) == 3));
        assert!(circulant(6, &[4]).is_err());
    }

    #[test]
    fn base_for_two_is_the_four_cycle() {
        let b = find_base_h(2).unwrap();
        assert_eq!((b.order, b.offsets.clone()), (4, vec![1]));
        assert_eq!(b.s, vec![v(0), v(2)]);
    }

    #[test]
    fn bases_for_three_and_four_pass_their_checks() {
        for k in [3, 4] {
            let b = find_base_h(k).unwrap();
            assert_eq!(global_edge_connectivity(&b.h).unwrap().0, k);
            check_base(&b.h, &b.s, k).unwrap();
        }
        assert!(find_base_h(1).is_err());
    }

    #[test]
    fn path_enumeration_matches_brute_force() {
        for g in [circulant(4, &[1]).unwrap(), circulant(6, &[1, 1]).unwrap(), complete(4, 1), circulant(7, &[1, 2]).unwrap()] {
            for len in 1..5 {
                assert_eq!(paths_of_length(&g, len, usize::MAX).unwrap().len(), brute_path_count(&g, len));
            }
        }
        assert!(matches!(paths_of_length(&complete(5, 1), 3, 10), Err(Error::Budget(_))));
    }

    #[test]
    fn depth_one_is_the_base() {
        let b = find_base_h(2).unwrap();
        let (g, st) = gen_aharoni_thomassen(&b.h, &b.s, 2, 1).unwrap();
        assert_eq!(g.edge_ids(), b.h.edge_ids());
        assert!(st.copies.is_empty());
    }

    #[test]
    fn four_cycle_depth_two_counts() {
        let b = find_base_h(2).unwrap();
        let (g, st) = gen_aharoni_thomassen(&b.h, &b.s, 2, 2).unwrap();
        let paths = brute_path_count(&b.h, 2);
        assert_eq!(st.copies.len(), paths);
        // Each edge of C4 lies on two of the four paths of length 2.
        assert!(st.path_counts[0].values().all(|&c| c == 2));
        assert_eq!(g.vertex_count(), 4 + 8 + 4 * 2);
        assert_eq!(global_edge_connectivity(&g).unwrap().0, 2);
        let all: Vec<VertexId> = st.copies.iter().flat_map(|c| c.vertices.iter().copied()).collect();
        let distinct: BTreeSet<VertexId> = all.iter().copied().collect();
        assert_eq!(all.len(), distinct.len(), "copies overlap");
    }

    #[test]
    fn subdivision_counts_match_recomputed_paths() {
        let b = find_base_h(3).unwrap();
        let (_, st) = gen_aharoni_thomassen(&b.h, &b.s, 3, 2).unwrap();
        let recount = path_counts(&paths_of_length(&b.h, 3, usize::MAX).unwrap());
        for s in &st.subdivisions[0] {
            assert_eq!(s.inner.len(), recount[&s.edge]);
        }
    }

    #[test]
    fn copy_cap_is_enforced() {
        let b = find_base_h(2).unwrap();
        assert!(matches!(gen_aharoni_thomassen_with_cap(&b.h, &b.s, 2, 2, 3), Err(Error::Budget(_))));
    }

    #[test]
    fn bad_bases_are_rejected() {
        let c4 = circulant(4, &[1]).unwrap();
        assert!(gen_aharoni_thomassen(&c4, &[v(0), v(1)], 2, 2).is_err());
        assert!(gen_aharoni_thomassen(&c4, &[v(0)], 2, 2).is_err());
        assert!(gen_aharoni_thomassen(&c4, &[v(0), v(2)], 2, 0).is_err());
    }

    #[test]
    fn separator_cuts_off_each_copy() {
        let b = find_base_h(2).unwrap();
        let (_, st) = gen_aharoni_thomassen(&b.h, &b.s, 2, 2).unwrap();
        let report = at_separator_demo(&st, 2, 10).unwrap();
        assert_eq!(report.checks.len(), 4);
        assert!(report.ok(2));
        assert!(report.checks.iter().all(|c| c.boundary == 4));
        assert!(at_separator_demo(&st, 1, 10).unwrap().checks.is_empty());
        // Copies on edge-disjoint host paths have disjoint cuts.
        for x in &report.checks {
            for y in &report.checks {
                let hx: BTreeSet<_> = x.host_path.iter().collect();
                if x.copy != y.copy && y.host_path.iter().all(|e| !hx.contains(e)) {
                    assert!(x.cut.is_disjoint(&y.cut));
                }
            }
        }
    }

    #[test]
    fn even_subgraph_needs_k_four() {
        let b = find_base_h(2).unwrap();
        let (_, st) = gen_aharoni_thomassen(&b.h, &b.s, 2, 2).unwrap();
        assert!(at_eulerian_subgraph(&st).is_err());
    }

    #[test]
    fn even_subgraph_of_the_base_is_k() {
        let b = find_base_h(4).unwrap();
        let (_, st) = gen_aharoni_thomassen(&b.h, &b.s, 4, 1).unwrap();
        let ls = at_eulerian_subgraph(&st).unwrap();
        assert_eq!(ls.levels.len(), 1);
        check_even_connected_spanning(&b.h, &ls.levels[0], 1).unwrap();
    }

    #[test]
    fn even_subgraph_at_depth_two_gives_a_line_graph_cycle() {
        let b = find_base_h(4).unwrap();
        let (g, st) = gen_aharoni_thomassen(&b.h, &b.s, 4, 2).unwrap();
        let ls = at_eulerian_subgraph(&st).unwrap();
        let l2 = ls.last();
        check_even_connected_spanning(&g, l2, 2).unwrap();
        let tour = euler_tour(&g, l2).unwrap();
        assert!(is_dominating(&g, &tour));
        let cert = hamilton_from_trail(&g, &tour).unwrap();
        cert.verify(&g).unwrap();
    }

    /// Doubled 16-cycle with one chord, so two vertices have odd degree.
    fn chorded_base() -> (Multigraph, Vec<VertexId>) {
        let mut h = circulant(16, &[1, 1]).unwrap();
        h.add_edge(v(2), v(10)).unwrap();
        (h, vec![v(0), v(4), v(8), v(12)])
    }

    #[test]
    fn odd_degree_base_leaves_a_forest() {
        let (h, s) = chorded_base();
        let (g, st) = gen_aharoni_thomassen(&h, &s, 4, 2).unwrap();
        let ls = at_eulerian_subgraph(&st).unwrap();
        assert!(ls.forest_edges[0] > 0);
        check_even_connected_spanning(&g, ls.last(), 2).unwrap();
        let tour = euler_tour(&g, ls.last()).unwrap();
        hamilton_from_trail(&g, &tour).unwrap().verify(&g).unwrap();
    }

    #[test]
    fn forest_hull_prunes_to_paths_between_targets() {
        // Path 0-1-2-3-4 with a pendant 5 at 2.
        let mut g = Multigraph::with_vertices(6);
        let es: Vec<EdgeId> = [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)].iter().map(|&(a, b)| g.add_edge(v(a), v(b)).unwrap()).collect();
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        for &e in &es {
            let (a, b) = g.endpoints(e).unwrap();
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
        let hull = forest_hull(&adj, &[v(1), v(3)].into());
        assert_eq!(hull, [v(1), v(2), v(3)].into());
        assert_eq!(forest_hull(&adj, &[v(5)].into()), [v(5)].into());
    }

    #[test]
    fn random_unions_are_2k_connected_and_seeded() {
        let g = gen_random_2k_connected(5, 2, 7).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(global_edge_connectivity(&g).unwrap().0, 4);
        let c = gen_random_2k_connected(9, 1, 3).unwrap();
        assert_eq!(edge_connectivity(&c), 2);
        let again = gen_random_2k_connected(5, 2, 7).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), again.edges().collect::<Vec<_>>());
        for seed in 0..100 {
            let n = 3 + (seed as usize % 20);
            let k = 1 + (seed as usize % 3);
            let g = gen_random_2k_connected(n, k, seed).unwrap();
            assert!(global_edge_connectivity(&g).unwrap().0 >= 2 * k);
        }
    }

    #[test]
    fn named_catalog() {
        assert_eq!(named_graphs("doubled_C5").unwrap().edge_count(), 10);
        assert_eq!(named_graphs("K4").unwrap().edge_count(), 6);
        assert_eq!(named_graphs("doubled_K4").unwrap().edge_count(), 12);
        assert_eq!(named_graphs("half_cylinder_4x5").unwrap().vertex_count(), 20);
        assert!(named_graphs("petersen").is_err());
        let x = named_graphs("crossgadget8").unwrap();
        assert_eq!(edge_connectivity(&x), 4);
        // Exhaustive: exactly six vertex bipartitions cut four edges.
        let verts: Vec<VertexId> = x.vertices().collect();
        let mut min_cuts = 0;
        for mask in 1u32..(1 << 7) {
            let side: BTreeSet<VertexId> = (0..7).filter(|i| mask >> i & 1 == 1).map(|i| verts[i]).collect();
            if crossing_edges(&x, &side).len() == 4 {
                min_cuts += 1;
            }
        }
        assert_eq!(min_cuts, 6);
    }
}
