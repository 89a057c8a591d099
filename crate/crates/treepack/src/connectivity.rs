//! Edge connectivity: unit-capacity max-flow, minimum cuts, edge-disjoint
//! path systems, bridges, and the search for admissible splitting pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invariant, precondition, Result};
use crate::multigraph::{EdgeId, Multigraph, VertexId};

/// An edge cut together with the vertex bipartition it comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub edges: BTreeSet<EdgeId>,
    pub side_a: BTreeSet<VertexId>,
    pub side_b: BTreeSet<VertexId>,
    /// The pair this cut separates, `x` in `side_a` and `y` in `side_b`.
    pub targets: Option<(VertexId, VertexId)>,
}

impl Cut {
    /// The cut `δ(side_a)`.
    pub fn from_side(g: &Multigraph, side_a: BTreeSet<VertexId>, targets: Option<(VertexId, VertexId)>) -> Cut {
        let side_b: BTreeSet<VertexId> = g.vertices().filter(|v| !side_a.contains(v)).collect();
        let edges = crossing_edges(g, &side_a);
        Cut { edges, side_a, side_b, targets }
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Check the cut against `g`: the sides partition the vertex set and the
    /// edge set is exactly the set of crossing edges.
    pub fn is_consistent(&self, g: &Multigraph) -> bool {
        let all: BTreeSet<VertexId> = self.side_a.union(&self.side_b).copied().collect();
        if &all != g.vertex_set() || self.side_a.intersection(&self.side_b).next().is_some() {
            return false;
        }
        if let Some((x, y)) = self.targets {
            if !self.side_a.contains(&x) || !self.side_b.contains(&y) {
                return false;
            }
        }
        crossing_edges(g, &self.side_a) == self.edges
    }

    /// The same cut with the sides exchanged.
    pub fn flipped(&self) -> Cut {
        Cut {
            edges: self.edges.clone(),
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
            targets: self.targets.map(|(x, y)| (y, x)),
        }
    }
}

/// Edges with exactly one endpoint in `side`.
pub fn crossing_edges(g: &Multigraph, side: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
    g.edges()
        .filter(|&(_, a, b)| side.contains(&a) != side.contains(&b))
        .map(|(e, _, _)| e)
        .collect()
}

/// Pairwise edge-disjoint paths from `source` to `sink`, each listed as
/// its edge sequence starting at `source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub source: VertexId,
    pub sink: VertexId,
    pub paths: Vec<Vec<EdgeId>>,
}

impl PathSystem {
    pub fn used_edges(&self) -> BTreeSet<EdgeId> {
        self.paths.iter().flatten().copied().collect()
    }
}

/// Compact indexed copy of a multigraph for the flow routines.
pub(crate) struct FlowNet {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    ends: Vec<(usize, usize)>,
    edge_ids: Vec<EdgeId>,
    adj: Vec<Vec<(usize, usize)>>,
}

pub(crate) struct Flow {
    pub value: usize,
    /// Net flow along each edge in the direction `ends.0 -> ends.1`.
    pub net: Vec<i8>,
    /// Residual reachability from the sources. Only a minimum cut when the
    /// flow stopped because no augmenting path was left.
    pub source_side: Vec<bool>,
    pub hit_limit: bool,
}

impl FlowNet {
    pub fn new(g: &Multigraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut edge_ids = Vec::with_capacity(g.edge_count());
        let mut adj = vec![Vec::new(); ids.len()];
        for (e, a, b) in g.edges() {
            let (ia, ib) = (index[&a], index[&b]);
            let k = ends.len();
            ends.push((ia, ib));
            edge_ids.push(e);
            adj[ia].push((k, ib));
            adj[ib].push((k, ia));
        }
        FlowNet { ids, index, ends, edge_ids, adj }
    }

    pub fn idx(&self, v: VertexId) -> usize {
        self.index[&v]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    /// Edmonds-Karp with multi-source BFS. Stops early after `limit`
    /// augmentations.
    pub fn max_flow(&self, sources: &[usize], sinks: &[usize], limit: usize) -> Flow {
        let n = self.ids.len();
        let mut net = vec![0i8; self.ends.len()];
        let mut is_sink = vec![false; n];
        for &t in sinks {
            is_sink[t] = true;
        }
        let mut value = 0;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        loop {
            if value >= limit {
                return Flow { value, net, source_side: vec![false; n], hit_limit: true };
            }
            seen.iter_mut().for_each(|s| *s = false);
            parent.iter_mut().for_each(|p| *p = None);
            let mut queue = VecDeque::new();
            for &s in sources {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
            let mut reached = None;
            'bfs: while let Some(x) = queue.pop_front() {
                for &(e, y) in &self.adj[x] {
                    if seen[y] {
                        continue;
                    }
                    let forward = self.ends[e].0 == x;
                    let residual = if forward { net[e] < 1 } else { net[e] > -1 };
                    if !residual {
                        continue;
                    }
                    seen[y] = true;
                    parent[y] = Some((e, x));
                    if is_sink[y] {
                        reached = Some(y);
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            let Some(mut y) = reached else {
                return Flow { value, net, source_side: seen, hit_limit: false };
            };
            while let Some((e, x)) = parent[y] {
                if self.ends[e].0 == x {
                    net[e] += 1;
                } else {
                    net[e] -= 1;
                }
                y = x;
            }
            value += 1;
        }
    }

    fn side_set(&self, side: &[bool]) -> BTreeSet<VertexId> {
        side.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| self.ids[i]).collect()
    }

    /// Decompose the flow from `source` into edge-disjoint paths to `sink`.
    fn decompose(&self, flow: &Flow, source: usize, sink: usize) -> Vec<Vec<EdgeId>> {
        let mut remaining = flow.net.clone();
        let mut out = Vec::with_capacity(flow.value);
        for _ in 0..flow.value {
            // Walk along positive residual flow, cutting out any cycle the
            // walk closes so the result is a path.
            let mut edges: Vec<usize> = Vec::new();
            let mut verts: Vec<usize> = vec![source];
            let mut pos: HashMap<usize, usize> = HashMap::from([(source, 0)]);
            let mut x = source;
            while x != sink {
                let (e, y) = self.adj[x]
                    .iter()
                    .copied()
                    .find(|&(e, _)| {
                        let forward = self.ends[e].0 == x;
                        if forward { remaining[e] > 0 } else { remaining[e] < 0 }
                    })
                    .expect("flow conservation guarantees an outgoing unit");
                if self.ends[e].0 == x {
                    remaining[e] -= 1;
                } else {
                    remaining[e] += 1;
                }
                if let Some(&p) = pos.get(&y) {
                    for v in verts.drain(p + 1..) {
                        pos.remove(&v);
                    }
                    edges.truncate(p);
                } else {
                    pos.insert(y, verts.len());
                    verts.push(y);
                    edges.push(e);
                }
                x = y;
            }
            out.push(edges.into_iter().map(|e| self.edge_ids[e]).collect());
        }
        out
    }
}

/// κ′(X, Y) and a minimum `X`-`Y` cut. The cut's `side_a` is the set of
/// vertices reachable from `X` in the final residual graph, so it is the
/// minimum cut with the smallest `X` side.
pub fn local_edge_connectivity(
    g: &Multigraph,
    xs: &BTreeSet<VertexId>,
    ys: &BTreeSet<VertexId>,
) -> Result<(usize, Cut)> {
    if xs.is_empty() || ys.is_empty() {
        return Err(precondition!("source and sink sets must be nonempty"));
    }
    if xs.intersection(ys).next().is_some() {
        return Err(precondition!("source and sink sets overlap"));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !g.has_vertex(**v)) {
        return Err(precondition!("{v} is not a vertex of the graph"));
    }
    let net = FlowNet::new(g);
    let s: Vec<usize> = xs.iter().map(|&v| net.idx(v)).collect();
    let t: Vec<usize> = ys.iter().map(|&v| net.idx(v)).collect();
    let flow = net.max_flow(&s, &t, usize::MAX);
    let side = net.side_set(&flow.source_side);
    let targets = (xs.len() == 1 && ys.len() == 1).then(|| (*xs.first().unwrap(), *ys.first().unwrap()));
    let cut = Cut::from_side(g, side, targets);
    if cut.size() != flow.value {
        return Err(invariant!("residual cut has {} edges but the flow is {}", cut.size(), flow.value));
    }
    Ok((flow.value, cut))
}

/// κ′(x, y) for two vertices.
pub fn pair_connectivity(g: &Multigraph, x: VertexId, y: VertexId) -> Result<usize> {
    if x == y {
        return Err(precondition!("pair connectivity needs two distinct vertices"));
    }
    let net = FlowNet::new(g);
    Ok(net.max_flow(&[net.idx(x)], &[net.idx(y)], usize::MAX).value)
}

/// A maximum family of edge-disjoint `u`-`v` paths.
pub fn max_disjoint_paths(g: &Multigraph, u: VertexId, v: VertexId) -> Result<PathSystem> {
    if u == v {
        return Err(precondition!("path endpoints must differ"));
    }
    if !g.has_vertex(u) || !g.has_vertex(v) {
        return Err(precondition!("path endpoints must be vertices of the graph"));
    }
    let net = FlowNet::new(g);
    let (s, t) = (net.idx(u), net.idx(v));
    let flow = net.max_flow(&[s], &[t], usize::MAX);
    let paths = net.decompose(&flow, s, t);
    Ok(PathSystem { source: u, sink: v, paths })
}

/// Whether the edges at `u` form a minimum `u`-`v` cut.
pub fn is_min_uv_cut_at_u(g: &Multigraph, u: VertexId, v: VertexId) -> Result<bool> {
    Ok(g.degree(u) == pair_connectivity(g, u, v)?)
}

/// Vertex count up to which the dense Stoer-Wagner routine is used.
const DENSE_LIMIT: usize = 300;

/// κ′(G) with a witnessing minimum cut. A disconnected graph gives 0 with
/// one component as `side_a`.
pub fn global_edge_connectivity(g: &Multigraph) -> Result<(usize, Cut)> {
    if g.vertex_count() < 2 {
        return Err(precondition!("global edge connectivity needs at least two vertices"));
    }
    let comps = g.components();
    if comps.len() > 1 {
        return Ok((0, Cut::from_side(g, comps[0].clone(), None)));
    }
    let side = if g.vertex_count() <= DENSE_LIMIT {
        stoer_wagner(g)
    } else {
        flow_global_cut(g)
    };
    let cut = Cut::from_side(g, side, None);
    Ok((cut.size(), cut))
}

/// Just the number κ′(G), 0 for graphs with fewer than two vertices.
pub fn edge_connectivity(g: &Multigraph) -> usize {
    global_edge_connectivity(g).map_or(0, |(c, _)| c)
}

fn stoer_wagner(g: &Multigraph) -> BTreeSet<VertexId> {
    let ids: Vec<VertexId> = g.vertices().collect();
    let n = ids.len();
    let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut w = vec![vec![0u64; n]; n];
    for (_, a, b) in g.edges() {
        let (i, j) = (index[&a], index[&b]);
        w[i][j] += 1;
        w[j][i] += 1;
    }
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let mut best_side: Vec<usize> = Vec::new();
    while active.len() > 1 {
        let mut key = vec![0u64; n];
        let mut added = vec![false; n];
        let mut prev = active[0];
        let mut last = active[0];
        for step in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&x| !added[x])
                .max_by(|&&x, &&y| key[x].cmp(&key[y]).then(y.cmp(&x)))
                .unwrap();
            added[next] = true;
            if step == active.len() - 1 {
                if key[next] < best {
                    best = key[next];
                    best_side = groups[next].clone();
                }
                prev = last;
                last = next;
            } else {
                last = next;
                for &y in &active {
                    if !added[y] {
                        key[y] += w[next][y];
                    }
                }
            }
        }
        // Merge `last` into `prev`.
        let (s, t) = (prev, last);
        let moved = std::mem::take(&mut groups[t]);
        groups[s].extend(moved);
        for &y in &active {
            w[s][y] += w[t][y];
            w[y][s] = w[s][y];
        }
        w[s][s] = 0;
        active.retain(|&x| x != t);
    }
    best_side.into_iter().map(|i| ids[i]).collect()
}

/// Exact global minimum cut by flows from a fixed root, each bounded by
/// the best cut found so far.
fn flow_global_cut(g: &Multigraph) -> BTreeSet<VertexId> {
    let net = FlowNet::new(g);
    let (mut best, mut side) = g
        .vertices()
        .map(|v| (g.degree(v), BTreeSet::from([v])))
        .min_by_key(|(d, _)| *d)
        .unwrap();
    let root = 0;
    for t in 1..net.len() {
        let flow = net.max_flow(&[root], &[t], best);
        if !flow.hit_limit && flow.value < best {
            best = flow.value;
            side = net.side_set(&flow.source_side);
        }
    }
    side
}

/// All edges whose removal disconnects their component.
pub fn find_bridges(g: &Multigraph) -> BTreeSet<EdgeId> {
    let net = FlowNet::new(g);
    let n = net.len();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut bridges = BTreeSet::new();
    let mut time = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Stack frames: (vertex, edge used to enter, next adjacency position).
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (x, via, ref mut pos)) = stack.last_mut() {
            if *pos < net.adj[x].len() {
                let (e, y) = net.adj[x][*pos];
                *pos += 1;
                if Some(e) == via {
                    continue;
                }
                if disc[y] == usize::MAX {
                    disc[y] = time;
                    low[y] = time;
                    time += 1;
                    stack.push((y, Some(e), 0));
                } else {
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if let (Some(e), Some(&(p, _, _))) = (via, stack.last()) {
                    low[p] = low[p].min(low[x]);
                    if low[x] > disc[p] {
                        bridges.insert(net.edge_ids[e]);
                    }
                }
            }
        }
    }
    bridges
}

/// A tree on a terminal set whose path minima give κ′ between any two
/// terminals (Gusfield's construction).
#[derive(Clone, Debug)]
pub struct EquivalentFlowTree {
    pub nodes: Vec<VertexId>,
    /// `parent[i] < i` for `i > 0`; node 0 is the root.
    pub parent: Vec<usize>,
    pub weight: Vec<usize>,
}

impl EquivalentFlowTree {
    /// Full matrix of pairwise values, indexed like `nodes`.
    pub fn matrix(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 1..n {
            children[self.parent[i]].push(i);
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for i in 1..n {
            adj[i].push((self.parent[i], self.weight[i]));
            adj[self.parent[i]].push((i, self.weight[i]));
        }
        let mut m = vec![vec![usize::MAX; n]; n];
        for (s, row) in m.iter_mut().enumerate() {
            let mut stack = vec![(s, usize::MAX, usize::MAX)];
            while let Some((x, from, val)) = stack.pop() {
                row[x] = val;
                for &(y, w) in &adj[x] {
                    if y != from {
                        stack.push((y, x, val.min(w)));
                    }
                }
            }
        }
        m
    }

    pub fn value(&self, x: VertexId, y: VertexId) -> Option<usize> {
        let i = self.nodes.iter().position(|&v| v == x)?;
        let j = self.nodes.iter().position(|&v| v == y)?;
        Some(self.matrix()[i][j])
    }
}

/// Pairwise κ′ among `terminals` with `|terminals| - 1` flow computations.
pub fn equivalent_flow_tree(g: &Multigraph, terminals: &BTreeSet<VertexId>) -> Result<EquivalentFlowTree> {
    if let Some(v) = terminals.iter().find(|v| !g.has_vertex(**v)) {
        return Err(precondition!("{v} is not a vertex of the graph"));
    }
    let nodes: Vec<VertexId> = terminals.iter().copied().collect();
    let n = nodes.len();
    let net = FlowNet::new(g);
    let idx: Vec<usize> = nodes.iter().map(|&v| net.idx(v)).collect();
    let mut parent = vec![0usize; n];
    let mut weight = vec![0usize; n];
    for s in 1..n {
        let t = parent[s];
        let flow = net.max_flow(&[idx[s]], &[idx[t]], usize::MAX);
        weight[s] = flow.value;
        for i in s + 1..n {
            if flow.source_side[idx[i]] && parent[i] == t {
                parent[i] = s;
            }
        }
    }
    Ok(EquivalentFlowTree { nodes, parent, weight })
}

/// Pairwise κ′ matrix over `terminals`, keyed by vertex pairs `x < y`.
pub fn all_pairs_connectivity(
    g: &Multigraph,
    terminals: &BTreeSet<VertexId>,
) -> Result<BTreeMap<(VertexId, VertexId), usize>> {
    let tree = equivalent_flow_tree(g, terminals)?;
    let m = tree.matrix();
    let mut out = BTreeMap::new();
    for (i, &x) in tree.nodes.iter().enumerate() {
        for (j, &y) in tree.nodes.iter().enumerate().skip(i + 1) {
            out.insert((x, y), m[i][j]);
        }
    }
    Ok(out)
}

/// Splitting off `e1`, `e2` at `s`. A pair whose far endpoints coincide
/// would form a loop, which is deleted together with both edges.
pub fn split_or_delete(g: &Multigraph, s: VertexId, e1: EdgeId, e2: EdgeId) -> Result<(Multigraph, Option<EdgeId>)> {
    let x = g.other_end(e1, s).ok_or_else(|| precondition!("{e1} is not incident to {s}"))?;
    let y = g.other_end(e2, s).ok_or_else(|| precondition!("{e2} is not incident to {s}"))?;
    if e1 == e2 {
        return Err(precondition!("split needs two distinct edges"));
    }
    if x == y {
        Ok((g.remove_edges(&BTreeSet::from([e1, e2])), None))
    } else {
        let (h, e) = g.split_off(s, e1, e2)?;
        Ok((h, Some(e)))
    }
}

/// A pair of edges at `s` whose splitting keeps κ′(x, y) for all
/// `x, y ≠ s`. Pairs are tried in id order. Pairs with distinct far
/// endpoints come first; a pair with a common far endpoint (a loop after
/// splitting, see [`split_or_delete`]) is only returned when no other pair
/// works.
pub fn mader_split_pair(g: &Multigraph, s: VertexId) -> Result<(EdgeId, EdgeId)> {
    if !g.has_vertex(s) {
        return Err(precondition!("{s} is not a vertex of the graph"));
    }
    let d = g.degree(s);
    if d < 2 {
        return Err(precondition!("{s} has degree {d}, at least 2 is required"));
    }
    if d == 3 {
        return Err(precondition!("{s} has degree 3"));
    }
    let bridges = find_bridges(g);
    if let Some(e) = g.incident(s).find(|e| bridges.contains(e)) {
        return Err(precondition!("{s} is incident to the bridge {e}"));
    }
    let others: BTreeSet<VertexId> = g.vertices().filter(|&x| x != s).collect();
    let before = equivalent_flow_tree(g, &others)?.matrix();
    let inc: Vec<EdgeId> = g.incident(s).collect();
    let mut pairs: Vec<(EdgeId, EdgeId)> = Vec::new();
    let mut loop_pairs: Vec<(EdgeId, EdgeId)> = Vec::new();
    for (i, &e1) in inc.iter().enumerate() {
        for &e2 in &inc[i + 1..] {
            if g.other_end(e1, s) == g.other_end(e2, s) {
                loop_pairs.push((e1, e2));
            } else {
                pairs.push((e1, e2));
            }
        }
    }
    for (e1, e2) in pairs.into_iter().chain(loop_pairs) {
        let (h, _) = split_or_delete(g, s, e1, e2)?;
        let after = equivalent_flow_tree(&h, &others)?.matrix();
        if dominates(&after, &before) {
            return Ok((e1, e2));
        }
    }
    Err(invariant!("no admissible splitting pair at {s}"))
}

fn dominates(after: &[Vec<usize>], before: &[Vec<usize>]) -> bool {
    after
        .iter()
        .zip(before)
        .all(|(ra, rb)| ra.iter().zip(rb).all(|(a, b)| a >= b))
}

/// An edge at `w` that a maximum system of edge-disjoint `u`-`v` paths
/// does not use. The paths pass through `w` an integral number of times,
/// so they use an even number of its edges and an odd degree leaves one
/// free. The lowest such edge id is returned.
pub fn even_degree_fix(g: &Multigraph, w: VertexId, u: VertexId, v: VertexId) -> Result<EdgeId> {
    if w == u || w == v {
        return Err(precondition!("{w} must differ from both path endpoints"));
    }
    if g.degree(w).is_multiple_of(2) {
        return Err(precondition!("{w} has even degree {}", g.degree(w)));
    }
    let used = max_disjoint_paths(g, u, v)?.used_edges();
    g.incident(w)
        .find(|e| !used.contains(e))
        .ok_or_else(|| invariant!("every edge at {w} is used by the u-v paths"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn cycle(n: u32, copies: usize) -> Multigraph {
        let mut g = Multigraph::with_vertices(n);
        for _ in 0..copies {
            for i in 0..n {
                g.add_edge(v(i), v((i + 1) % n)).unwrap();
            }
        }
        g
    }

    fn set(xs: &[u32]) -> BTreeSet<VertexId> {
        xs.iter().map(|&i| v(i)).collect()
    }

    /// Smallest number of edges whose removal separates `xs` from `ys`.
    fn brute_local(g: &Multigraph, xs: &BTreeSet<VertexId>, ys: &BTreeSet<VertexId>) -> usize {
        let free: Vec<VertexId> = g.vertices().filter(|x| !xs.contains(x) && !ys.contains(x)).collect();
        let mut best = usize::MAX;
        for mask in 0u32..(1 << free.len()) {
            let mut side = xs.clone();
            for (i, &x) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    side.insert(x);
                }
            }
            best = best.min(crossing_edges(g, &side).len());
        }
        best
    }

    fn random_graph(n: u32, m: usize, seed: u64) -> Multigraph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = Multigraph::with_vertices(n);
        while g.edge_count() < m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                g.add_edge(v(a), v(b)).unwrap();
            }
        }
        g
    }

    #[test]
    fn cycle_connectivities() {
        let g = cycle(4, 1);
        assert_eq!(local_edge_connectivity(&g, &set(&[0]), &set(&[2])).unwrap().0, 2);
        let g = cycle(4, 2);
        assert_eq!(local_edge_connectivity(&g, &set(&[0]), &set(&[2])).unwrap().0, 4);
        for n in 3..9 {
            assert_eq!(edge_connectivity(&cycle(n, 1)), 2);
        }
    }

    #[test]
    fn overlapping_sets_rejected() {
        let g = cycle(4, 1);
        assert!(local_edge_connectivity(&g, &set(&[0, 1]), &set(&[1])).is_err());
    }

    #[test]
    fn tree_has_connectivity_one_and_all_bridges() {
        let mut g = Multigraph::with_vertices(5);
        for i in 1..5 {
            g.add_edge(v(0), v(i)).unwrap();
        }
        assert_eq!(edge_connectivity(&g), 1);
        assert_eq!(find_bridges(&g), g.edge_ids());
        assert!(find_bridges(&cycle(6, 1)).is_empty());
    }

    #[test]
    fn bridge_between_triangles() {
        let mut g = Multigraph::with_vertices(6);
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            g.add_edge(v(a), v(b)).unwrap();
        }
        let e = g.add_edge(v(2), v(3)).unwrap();
        assert_eq!(find_bridges(&g), BTreeSet::from([e]));
    }

    #[test]
    fn parallel_edges_are_not_bridges() {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(0), v(1)).unwrap();
        assert!(find_bridges(&g).is_empty());
    }

    #[test]
    fn disconnected_graph_has_zero_connectivity() {
        let mut g = cycle(3, 1);
        g.add_vertex();
        let (c, cut) = global_edge_connectivity(&g).unwrap();
        assert_eq!(c, 0);
        assert!(cut.edges.is_empty());
    }

    #[test]
    fn disjoint_paths_small_cases() {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(0), v(1)).unwrap();
        let ps = max_disjoint_paths(&g, v(0), v(1)).unwrap();
        assert_eq!(ps.paths.len(), 2);
        assert!(ps.paths.iter().all(|p| p.len() == 1));
        let ps = max_disjoint_paths(&cycle(4, 1), v(0), v(2)).unwrap();
        assert_eq!(ps.paths.len(), 2);
        let ps = max_disjoint_paths(&cycle(5, 2), v(0), v(2)).unwrap();
        assert_eq!(ps.paths.len(), 4);
    }

    #[test]
    fn min_cut_at_u_examples() {
        assert!(is_min_uv_cut_at_u(&cycle(4, 2), v(0), v(2)).unwrap());
        let mut star = Multigraph::with_vertices(4);
        for i in 1..4 {
            star.add_edge(v(0), v(i)).unwrap();
        }
        assert!(!is_min_uv_cut_at_u(&star, v(0), v(1)).unwrap());
    }

    fn check_path_system(g: &Multigraph, ps: &PathSystem) {
        let mut used = BTreeSet::new();
        for p in &ps.paths {
            let mut at = ps.source;
            let mut seen = BTreeSet::from([at]);
            for &e in p {
                assert!(used.insert(e), "edge {e} reused");
                at = g.other_end(e, at).expect("path edges chain");
                assert!(seen.insert(at), "path repeats a vertex");
            }
            assert_eq!(at, ps.sink);
        }
    }

    #[test]
    fn menger_duality_on_random_graphs() {
        for seed in 0..60 {
            let n = 3 + (seed % 6) as u32;
            let g = random_graph(n, 2 * n as usize + (seed % 5) as usize, seed);
            for x in 0..n {
                for y in x + 1..n {
                    let (c, cut) = local_edge_connectivity(&g, &set(&[x]), &set(&[y])).unwrap();
                    assert!(cut.is_consistent(&g));
                    assert_eq!(c, brute_local(&g, &set(&[x]), &set(&[y])));
                    let ps = max_disjoint_paths(&g, v(x), v(y)).unwrap();
                    assert_eq!(ps.paths.len(), c);
                    check_path_system(&g, &ps);
                }
            }
        }
    }

    #[test]
    fn set_connectivity_matches_brute_force() {
        for seed in 0..30 {
            let g = random_graph(7, 14, 100 + seed);
            let (c, cut) = local_edge_connectivity(&g, &set(&[0, 1]), &set(&[5, 6])).unwrap();
            assert!(cut.is_consistent(&g));
            assert_eq!(c, brute_local(&g, &set(&[0, 1]), &set(&[5, 6])));
        }
    }

    #[test]
    fn global_cut_matches_pairwise_minimum() {
        for seed in 0..40 {
            let n = 2 + (seed % 9) as u32;
            let g = random_graph(n, 3 * n as usize, 500 + seed);
            let (c, cut) = global_edge_connectivity(&g).unwrap();
            assert!(cut.is_consistent(&g));
            assert_eq!(cut.size(), c);
            let mut best = usize::MAX;
            for x in 0..n {
                for y in x + 1..n {
                    best = best.min(pair_connectivity(&g, v(x), v(y)).unwrap());
                }
            }
            assert_eq!(c, best);
            assert!(!flow_global_cut(&g).is_empty());
            assert_eq!(crossing_edges(&g, &flow_global_cut(&g)).len(), best);
        }
    }

    #[test]
    fn union_of_hamiltonian_cycles_is_2k_connected() {
        let mut g = cycle(7, 1);
        // A second Hamiltonian cycle 0-2-4-6-1-3-5-0.
        let order = [0, 2, 4, 6, 1, 3, 5];
        for i in 0..7 {
            g.add_edge(v(order[i]), v(order[(i + 1) % 7])).unwrap();
        }
        assert_eq!(edge_connectivity(&g), 4);
    }

    #[test]
    fn equivalent_flow_tree_matches_naive_pairs() {
        for seed in 0..40 {
            let n = 2 + (seed % 9) as u32;
            let g = random_graph(n, 2 * n as usize, 900 + seed);
            let terms: BTreeSet<VertexId> = g.vertices().filter(|x| x.0 != 0 || seed % 2 == 0).collect();
            let table = all_pairs_connectivity(&g, &terms).unwrap();
            for (&(x, y), &c) in &table {
                assert_eq!(c, pair_connectivity(&g, x, y).unwrap(), "pair {x} {y} seed {seed}");
            }
        }
    }

    #[test]
    fn mader_pair_degree_two_is_forced() {
        let g = cycle(5, 1);
        let (a, b) = mader_split_pair(&g, v(0)).unwrap();
        let inc: Vec<EdgeId> = g.incident(v(0)).collect();
        assert_eq!(vec![a, b], inc);
    }

    #[test]
    fn mader_rejects_degree_three_and_bridges() {
        let mut g = cycle(4, 1);
        g.add_edge(v(0), v(2)).unwrap();
        assert!(matches!(mader_split_pair(&g, v(0)), Err(crate::Error::Precondition(_))));
        let mut g = cycle(3, 1);
        let x = g.add_vertex();
        g.add_edge(v(0), x).unwrap();
        g.add_edge(v(0), x).unwrap();
        g.add_edge(v(1), v(2)).unwrap();
        let y = g.add_vertex();
        g.add_edge(x, y).unwrap();
        g.add_edge(x, y).unwrap();
        assert!(mader_split_pair(&g, y).is_ok());
        let mut t = Multigraph::with_vertices(3);
        t.add_edge(v(0), v(1)).unwrap();
        t.add_edge(v(1), v(2)).unwrap();
        assert!(mader_split_pair(&t, v(1)).is_err());
    }

    #[test]
    fn mader_pair_preserves_all_pairs() {
        for seed in 0..40 {
            let n = 4 + (seed % 5) as u32;
            let g = random_graph(n, 3 * n as usize, 1300 + seed);
            let s = v(0);
            let d = g.degree(s);
            if d < 2 || d == 3 || g.incident(s).any(|e| find_bridges(&g).contains(&e)) {
                continue;
            }
            let (e1, e2) = mader_split_pair(&g, s).unwrap();
            let (h, _) = split_or_delete(&g, s, e1, e2).unwrap();
            for x in 1..n {
                for y in x + 1..n {
                    assert_eq!(
                        pair_connectivity(&h, v(x), v(y)).unwrap(),
                        pair_connectivity(&g, v(x), v(y)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mader_path_in_doubled_square() {
        // Doubled C4 on 0..4 plus a vertex s joined once to 0 and once to 2.
        let mut g = cycle(4, 2);
        let s = g.add_vertex();
        let e1 = g.add_edge(s, v(0)).unwrap();
        let e2 = g.add_edge(s, v(2)).unwrap();
        assert_eq!(mader_split_pair(&g, s).unwrap(), (e1, e2));
    }

    #[test]
    fn even_degree_fix_keeps_uv_connectivity() {
        // Five-regular gadget: K6.
        let mut g = Multigraph::with_vertices(6);
        for a in 0..6 {
            for b in a + 1..6 {
                g.add_edge(v(a), v(b)).unwrap();
            }
        }
        let before = pair_connectivity(&g, v(0), v(1)).unwrap();
        let e = even_degree_fix(&g, v(2), v(0), v(1)).unwrap();
        assert!(g.is_incident(e, v(2)));
        let h = g.remove_edges(&BTreeSet::from([e]));
        assert_eq!(pair_connectivity(&h, v(0), v(1)).unwrap(), before);
    }

    #[test]
    fn even_degree_fix_rejects_even_degree() {
        assert!(even_degree_fix(&cycle(4, 1), v(1), v(0), v(2)).is_err());
    }

    #[test]
    fn even_degree_fix_off_path_vertex() {
        let mut g = Multigraph::with_vertices(2);
        g.add_edge(v(0), v(1)).unwrap();
        let w = g.add_vertex();
        let e = g.add_edge(w, v(1)).unwrap();
        assert_eq!(even_degree_fix(&g, w, v(0), v(1)).unwrap(), e);
    }

    #[test]
    fn contraction_never_lowers_connectivity() {
        for seed in 0..30 {
            let g = random_graph(10, 25, 2000 + seed);
            let (h, map) = g.contract(&set(&[4, 5, 6])).unwrap();
            for x in [0, 1, 2] {
                for y in [3, 7, 8, 9] {
                    let before = pair_connectivity(&g, v(x), v(y)).unwrap();
                    let after = pair_connectivity(&h, map.image[&v(x)], map.image[&v(y)]).unwrap();
                    assert!(after >= before);
                }
            }
        }
    }
}
