//! Graph and certificate formats.
//!
//! Graphs are read from JSON or from a subset of Graphviz DOT (undirected
//! `graph` blocks with node and edge statements). Both writers keep vertex
//! and edge ids, so writing and reading back gives the same graph; reading
//! foreign DOT renames its node names to fresh ids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use treepack::packing::{BypassCertificate, TreePacking, WalkStep};
use treepack::{EdgeId, Multigraph, Point, VertexId};

/// A malformed input. Always reported with exit code 3.
#[derive(Debug)]
pub struct FormatError(pub String);

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! format_err {
    ($($arg:tt)*) => { FormatError(format!($($arg)*)) };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    #[serde(default)]
    vertices: Option<Vec<u32>>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<u32>,
    ends: [u32; 2],
}

/// `{"vertices": [..], "edges": [{"id": 0, "ends": [0, 1]}, ..]}`. Edge ids
/// are optional on input but must be given for all edges or none.
/// Without a vertex list the vertices are the edge endpoints.
pub fn graph_from_json(text: &str) -> Result<Multigraph, FormatError> {
    let parsed: GraphJson = serde_json::from_str(text).map_err(|e| format_err!("graph JSON: {e}"))?;
    let with_ids = parsed.edges.iter().filter(|e| e.id.is_some()).count();
    if with_ids != 0 && with_ids != parsed.edges.len() {
        return Err(format_err!("either every edge has an id or none does"));
    }
    let edges: Vec<(u32, u32, u32)> =
        parsed.edges.iter().enumerate().map(|(i, e)| (e.id.unwrap_or(i as u32), e.ends[0], e.ends[1])).collect();
    let vertices = match parsed.vertices {
        Some(vs) => vs,
        None => edges.iter().flat_map(|&(_, a, b)| [a, b]).collect::<BTreeSet<_>>().into_iter().collect(),
    };
    build(vertices, edges)
}

fn build(vertices: Vec<u32>, edges: Vec<(u32, u32, u32)>) -> Result<Multigraph, FormatError> {
    let known: BTreeSet<u32> = vertices.iter().copied().collect();
    if known.len() != vertices.len() {
        return Err(format_err!("a vertex is listed twice"));
    }
    let mut ids = BTreeSet::new();
    for &(id, a, b) in &edges {
        if a == b {
            return Err(format_err!("edge {id} is a loop at vertex {a}"));
        }
        if let Some(x) = [a, b].into_iter().find(|x| !known.contains(x)) {
            return Err(format_err!("edge {id} has unknown endpoint {x}"));
        }
        if !ids.insert(id) {
            return Err(format_err!("edge id {id} is used twice"));
        }
    }
    Multigraph::from_parts(
        vertices.into_iter().map(VertexId),
        edges.into_iter().map(|(id, a, b)| (EdgeId(id), VertexId(a), VertexId(b))),
    )
    .map_err(|e| format_err!("{e}"))
}

pub fn graph_to_json_value(g: &Multigraph) -> serde_json::Value {
    let doc = GraphJson {
        vertices: Some(g.vertices().map(|v| v.0).collect()),
        edges: g.edges().map(|(e, a, b)| EdgeJson { id: Some(e.0), ends: [a.0, b.0] }).collect(),
    };
    serde_json::to_value(doc).expect("plain data")
}

pub fn graph_to_json(g: &Multigraph) -> String {
    serde_json::to_string_pretty(&graph_to_json_value(g)).expect("plain data") + "\n"
}

/// Undirected DOT with one statement per vertex and per edge. Edge ids go
/// into an `id` attribute so that parallel edges keep their identity.
pub fn graph_to_dot(g: &Multigraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        writeln!(out, "  {};", v.0).unwrap();
    }
    for (e, a, b) in g.edges() {
        writeln!(out, "  {} -- {} [id={}];", a.0, b.0, e.0).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn write_graph(g: &Multigraph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Json => graph_to_json(g),
        GraphFormat::Dot => graph_to_dot(g),
    }
}

/// JSON if the text starts with `{`, DOT otherwise.
pub fn read_graph(text: &str) -> Result<Multigraph, FormatError> {
    if text.trim_start().starts_with('{') {
        graph_from_json(text)
    } else {
        graph_from_dot(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    EdgeOp,
    Arrow,
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, FormatError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' || (c == '/' && next == Some('/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && next == Some('*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= chars.len() {
                return Err(format_err!("DOT: unterminated comment"));
            }
            i += 2;
        } else if c == '-' && next == Some('-') {
            toks.push(Tok::EdgeOp);
            i += 2;
        } else if c == '-' && next == Some('>') {
            toks.push(Tok::Arrow);
            i += 2;
        } else if "{}[];=,:".contains(c) {
            toks.push(Tok::Sym(c));
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(format_err!("DOT: unterminated string")),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            toks.push(Tok::Id(s));
            i += 1;
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            toks.push(Tok::Id(chars[start..i].iter().collect()));
        } else {
            return Err(format_err!("DOT: unexpected character {c:?}"));
        }
    }
    Ok(toks)
}

struct DotParser {
    toks: Vec<Tok>,
    pos: usize,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), FormatError> {
        match self.bump() {
            Some(Tok::Sym(x)) if x == c => Ok(()),
            other => Err(format_err!("DOT: expected {c:?}, found {other:?}")),
        }
    }

    fn id(&mut self) -> Result<String, FormatError> {
        match self.bump() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format_err!("DOT: expected an identifier, found {other:?}")),
        }
    }

    /// Zero or more `[k=v, ...]` lists, merged.
    fn attrs(&mut self) -> Result<BTreeMap<String, String>, FormatError> {
        let mut out = BTreeMap::new();
        while self.peek() == Some(&Tok::Sym('[')) {
            self.bump();
            loop {
                match self.peek() {
                    Some(Tok::Sym(']')) => {
                        self.bump();
                        break;
                    }
                    Some(Tok::Sym(',')) | Some(Tok::Sym(';')) => {
                        self.bump();
                    }
                    _ => {
                        let key = self.id()?;
                        self.expect_sym('=')?;
                        out.insert(key, self.id()?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// A node id, ignoring any `:port`.
    fn node(&mut self) -> Result<String, FormatError> {
        let name = self.id()?;
        while self.peek() == Some(&Tok::Sym(':')) {
            self.bump();
            self.id()?;
        }
        Ok(name)
    }
}

/// Parse an undirected DOT graph. Directed graphs and subgraphs are
/// rejected. Numeric node names are kept as vertex ids when every name is
/// numeric; otherwise names are numbered in order of appearance. Numeric
/// `id` edge attributes are kept when every edge has a distinct one.
pub fn graph_from_dot(text: &str) -> Result<Multigraph, FormatError> {
    let mut p = DotParser { toks: tokenize(text)?, pos: 0 };
    if matches!(p.peek(), Some(Tok::Id(s)) if s.eq_ignore_ascii_case("strict")) {
        p.bump();
    }
    match p.bump() {
        Some(Tok::Id(s)) if s.eq_ignore_ascii_case("graph") => {}
        Some(Tok::Id(s)) if s.eq_ignore_ascii_case("digraph") => {
            return Err(format_err!("DOT: directed graphs are not supported"))
        }
        other => return Err(format_err!("DOT: expected `graph`, found {other:?}")),
    }
    if let Some(Tok::Id(_)) = p.peek() {
        p.bump();
    }
    p.expect_sym('{')?;
    let mut names: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut edges: Vec<(String, String, Option<String>)> = Vec::new();
    let mut note = |name: &str, names: &mut Vec<String>| {
        if seen.insert(name.to_string()) {
            names.push(name.to_string());
        }
    };
    loop {
        match p.peek() {
            None => return Err(format_err!("DOT: missing closing brace")),
            Some(Tok::Sym('}')) => {
                p.bump();
                break;
            }
            Some(Tok::Sym(';')) => {
                p.bump();
            }
            Some(Tok::Sym('{')) => return Err(format_err!("DOT: subgraphs are not supported")),
            Some(Tok::Id(s)) if s.eq_ignore_ascii_case("subgraph") => {
                return Err(format_err!("DOT: subgraphs are not supported"))
            }
            Some(Tok::Id(s)) if ["graph", "node", "edge"].iter().any(|k| s.eq_ignore_ascii_case(k)) => {
                p.bump();
                p.attrs()?;
            }
            Some(Tok::Id(_)) => {
                let first = p.node()?;
                match p.peek() {
                    Some(Tok::Sym('=')) => {
                        p.bump();
                        p.id()?;
                        continue;
                    }
                    Some(Tok::Arrow) => return Err(format_err!("DOT: directed edge in an undirected graph")),
                    _ => {}
                }
                let mut chain = vec![first];
                while p.peek() == Some(&Tok::EdgeOp) {
                    p.bump();
                    chain.push(p.node()?);
                }
                if p.peek() == Some(&Tok::Arrow) {
                    return Err(format_err!("DOT: directed edge in an undirected graph"));
                }
                let attrs = p.attrs()?;
                for name in &chain {
                    note(name, &mut names);
                }
                let id = attrs.get("id").cloned();
                for w in chain.windows(2) {
                    edges.push((w[0].clone(), w[1].clone(), if chain.len() == 2 { id.clone() } else { None }));
                }
            }
            Some(t) => return Err(format_err!("DOT: unexpected token {t:?}")),
        }
    }
    if p.peek().is_some() {
        return Err(format_err!("DOT: trailing input after the graph"));
    }
    let numeric: Option<Vec<u32>> = names.iter().map(|n| n.parse::<u32>().ok()).collect();
    let index: BTreeMap<&str, u32> = match &numeric {
        Some(nums) => names.iter().map(String::as_str).zip(nums.iter().copied()).collect(),
        None => names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect(),
    };
    let given: Option<Vec<u32>> = edges.iter().map(|(_, _, id)| id.as_deref().and_then(|s| s.parse().ok())).collect();
    let keep_ids = given.as_ref().is_some_and(|ids| ids.iter().collect::<BTreeSet<_>>().len() == ids.len());
    let out: Vec<(u32, u32, u32)> = edges
        .iter()
        .enumerate()
        .map(|(i, (a, b, _))| {
            let id = if keep_ids { given.as_ref().unwrap()[i] } else { i as u32 };
            (id, index[a.as_str()], index[b.as_str()])
        })
        .collect();
    let mut vertices: Vec<u32> = index.values().copied().collect();
    vertices.sort_unstable();
    build(vertices, out)
}

/// The line graph of `g` in DOT. Vertex `e<i>` stands for edge `i` of `g`;
/// line-graph edges between cyclically consecutive entries of `cycle` are
/// drawn bold red.
pub fn line_graph_dot(g: &Multigraph, cycle: &[EdgeId]) -> String {
    let m = cycle.len();
    let on_cycle: BTreeSet<(u32, u32)> =
        (0..m).map(|i| (cycle[i].0, cycle[(i + 1) % m].0)).map(|(a, b)| (a.min(b), a.max(b))).collect();
    let l = g.line_graph();
    let mut out = String::from("graph L {\n");
    for v in l.vertices() {
        writeln!(out, "  e{};", v.0).unwrap();
    }
    for (_, a, b) in l.edges() {
        let style = if on_cycle.contains(&(a.0.min(b.0), a.0.max(b.0))) { " [color=red, penwidth=2]" } else { "" };
        writeln!(out, "  e{} -- e{}{};", a.0, b.0, style).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Serialized packing with an optional bypass certificate. The host the
/// trees span is the input graph minus `without_vertex` and minus
/// `without_edges`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingCertificate {
    pub trees: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<Vec<WalkStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub without_vertex: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub without_edges: Vec<u32>,
}

impl PackingCertificate {
    pub fn new(packing: &TreePacking, cert: Option<&BypassCertificate>) -> Self {
        PackingCertificate {
            trees: packing.trees.iter().map(|t| t.iter().map(|e| e.0).collect()).collect(),
            pair: cert.map(|c| [c.pair.0, c.pair.1]),
            walk: cert.map(|c| c.walk.clone()),
            forbidden: cert.map(|c| c.forbidden.0),
            a: cert.map(|c| c.a),
            b: cert.map(|c| c.b),
            without_vertex: None,
            without_edges: Vec::new(),
        }
    }

    pub fn packing(&self) -> TreePacking {
        TreePacking::new(self.trees.iter().map(|t| t.iter().map(|&e| EdgeId(e)).collect()).collect())
    }

    /// The bypass part, if the certificate carries one. Partial bypass
    /// data is a format error.
    pub fn bypass(&self) -> Result<Option<BypassCertificate>, FormatError> {
        match (&self.pair, &self.walk, self.forbidden, self.a, self.b) {
            (None, None, None, None, None) => Ok(None),
            (Some(pair), Some(walk), Some(forbidden), Some(a), Some(b)) => Ok(Some(BypassCertificate {
                pair: (pair[0], pair[1]),
                a,
                b,
                walk: walk.clone(),
                forbidden: VertexId(forbidden),
            })),
            _ => Err(format_err!("bypass certificate needs all of pair, walk, forbidden, a and b")),
        }
    }

    /// The graph the trees are supposed to span.
    pub fn host(&self, g: &Multigraph) -> Result<Multigraph, FormatError> {
        let mut host = g.clone();
        if let Some(u) = self.without_vertex {
            if !g.has_vertex(VertexId(u)) {
                return Err(format_err!("removed vertex {u} is not in the graph"));
            }
            host = host.remove_vertex(VertexId(u));
        }
        if !self.without_edges.is_empty() {
            let gone: BTreeSet<EdgeId> = self.without_edges.iter().map(|&e| EdgeId(e)).collect();
            host = host.remove_edges(&gone);
        }
        Ok(host)
    }
}

/// `3` or `v3` is a vertex, `e5` the interior of an edge.
pub fn parse_point(s: &str) -> Result<Point, String> {
    if let Some(rest) = s.strip_prefix('e') {
        return rest.parse().map(|e| Point::EdgeInterior(EdgeId(e))).map_err(|_| format!("bad edge point {s:?}"));
    }
    s.strip_prefix('v').unwrap_or(s).parse().map(|v| Point::Vertex(VertexId(v))).map_err(|_| format!("bad point {s:?}"))
}
