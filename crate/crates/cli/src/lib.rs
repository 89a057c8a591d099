//! Command-line front end for `treepack`.
//!
//! Every subcommand prints a JSON run report on standard output. Commands
//! that produce a certificate re-check it with the library's independent
//! verifiers before reporting success, and serialize it even when the check
//! fails. Exit codes: 0 success, 1 verification failure, 2 precondition
//! violation, 3 I/O or format error.

pub mod io;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use treepack::connectivity::{global_edge_connectivity, pair_connectivity};
use treepack::eulerline::{line_hamilton_pipeline, HamiltonCycleCert};
use treepack::generators::{find_base_h, gen_aharoni_thomassen, gen_random_2k_connected, named_graphs};
use treepack::layered::{audit_gaps, run_layered, LayeredConfig, Mode, HALF_CYLINDER};
use treepack::packing::{
    bypass_packing, catlin_check, one_tree_bypass_packing, pack_spanning_trees, packing_minus_u, verify_packing,
};
use treepack::uncross::{find_incompatibility, is_compatible, make_compatible, sqsubset, CutSystem};
use treepack::{EdgeId, Error, Multigraph, Point, VertexId};

use crate::io::{FormatError, GraphFormat, PackingCertificate};

/// Environment variable holding the default seed of `gen random`.
pub const SEED_ENV: &str = "TREEPACK_SEED";

#[derive(Parser, Debug)]
#[command(name = "treepack", version, about = "Spanning tree packings with checkable certificates")]
struct Cli {
    /// Write the primary artifact (certificate, graph or trace) to this file.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Format of graph artifacts.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: GraphFormat,
    /// Include wall-clock timing in the report. Off by default so that
    /// reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    timing: bool,
    /// Worker threads for verifying several certificates.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Global edge connectivity with a minimum cut.
    Connectivity { graph: PathBuf },
    /// k edge-disjoint spanning trees, optionally of G - u.
    Pack {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        without: Option<u32>,
    },
    /// k spanning trees of G - u, two of which contain an a-b path avoiding v.
    PackBypass {
        graph: PathBuf,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        v: u32,
        /// A vertex (`3`) or an edge interior (`e5`).
        #[arg(long, value_parser = io::parse_point)]
        a: Point,
        #[arg(long, value_parser = io::parse_point)]
        b: Point,
        #[arg(long)]
        k: usize,
        /// Pack k - 1 trees with the path inside a single tree.
        #[arg(long)]
        one_tree: bool,
    },
    /// k edge-disjoint spanning trees of G - F.
    Catlin {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Edge ids of F, comma separated.
        #[arg(long, value_delimiter = ',')]
        remove: Vec<u32>,
    },
    /// Minimum x-y cuts for every target, made pairwise compatible.
    Uncross {
        graph: PathBuf,
        #[arg(long)]
        x: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<u32>,
    },
    /// Hamiltonian cycle of the line graph of a 4-edge-connected graph.
    Hamilton {
        graph: PathBuf,
        /// Write the line graph with the cycle highlighted as DOT.
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Packings over the levels of a layered graph.
    Layered {
        #[command(subcommand)]
        action: LayeredCommand,
    },
    /// Generate graphs.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Re-check certificates against a graph.
    Verify {
        graph: PathBuf,
        #[arg(required = true)]
        certificates: Vec<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum LayeredCommand {
    Run {
        #[arg(long, default_value = HALF_CYLINDER)]
        family: String,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        levels: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value = "two-tree")]
        mode: ModeArg,
        /// Initial guard band width.
        #[arg(long)]
        guard: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    TwoTree,
    OneTree,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Iterated subdivision construction over a searched base graph.
    At {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Union of k random Hamiltonian cycles, 2k-edge-connected.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
    /// A built-in graph such as doubled_C5, K4, crossgadget8 or half_cylinder_4x6.
    Named { name: String },
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Format(FormatError),
    Library(Error),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Format(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn status(&self) -> Status {
        match self {
            Failure::Io(_) | Failure::Format(_) => Status::FormatError,
            Failure::Library(Error::Invariant(_)) => Status::InternalError,
            Failure::Library(_) => Status::Precondition,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Format(e) => e.to_string(),
            Failure::Library(e) => e.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    VerificationFailed,
    InternalError,
    Precondition,
    FormatError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed | Status::InternalError => 1,
            Status::Precondition => 2,
            Status::FormatError => 3,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Verification {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl Verification {
    fn from_violations(violations: Vec<String>) -> Self {
        Verification { ok: violations.is_empty(), violations }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// What a command produced: report outputs, the check of its certificate,
/// and the artifact for `--output`.
struct Produced {
    outputs: Value,
    verification: Option<Verification>,
    artifact: Option<String>,
}

#[derive(Default)]
struct Inputs {
    digests: Vec<InputDigest>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = if path.as_os_str() == "-" {
            let mut buf = Vec::new();
            std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
                .map_err(|e| Failure::Io(format!("reading standard input: {e}")))?;
            buf
        } else {
            std::fs::read(path).map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?
        };
        let digest = Sha256::digest(&bytes);
        self.digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        String::from_utf8(bytes).map_err(|_| Failure::Format(FormatError(format!("{} is not UTF-8", path.display()))))
    }

    fn graph(&mut self, path: &Path) -> Result<Multigraph, Failure> {
        Ok(io::read_graph(&self.read(path)?)?)
    }
}

fn vertex(g: &Multigraph, id: u32) -> Result<VertexId, Failure> {
    let v = VertexId(id);
    if g.has_vertex(v) {
        Ok(v)
    } else {
        Err(Error::Precondition(format!("{v} is not a vertex of the graph")).into())
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain data") + "\n"
}

/// Parse `args` (including the program name), run the command, print the
/// report and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut command = vec!["treepack".to_string()];
    command.extend(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));

    let start = Instant::now();
    let mut inputs = Inputs::default();
    let result = dispatch(&cli, &mut inputs);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;

    let (status, error, produced) = match result {
        Ok(p) => {
            let status = match &p.verification {
                Some(v) if !v.ok => Status::VerificationFailed,
                _ => Status::Ok,
            };
            (status, None, Some(p))
        }
        Err(f) => (f.status(), Some(f.message()), None),
    };
    let (outputs, verification, artifact) = match produced {
        Some(p) => (p.outputs, p.verification, p.artifact),
        None => (Value::Null, None, None),
    };
    let mut report = RunReport {
        command,
        inputs: inputs.digests,
        status,
        error,
        outputs,
        verification,
        elapsed_ms: cli.timing.then_some(elapsed),
    };
    if let (Some(path), Some(text)) = (&cli.output, &artifact) {
        if let Err(e) = std::fs::write(path, text) {
            report.status = Status::FormatError;
            report.error = Some(format!("writing {}: {e}", path.display()));
        }
    }
    if let Some(msg) = &report.error {
        eprintln!("treepack: {msg}");
    } else if report.status == Status::VerificationFailed {
        eprintln!("treepack: verification failed");
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("plain data"));
    report.status.exit_code()
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<Produced, Failure> {
    match &cli.command {
        Command::Connectivity { graph } => connectivity(&inputs.graph(graph)?),
        Command::Pack { graph, k, without } => pack(&inputs.graph(graph)?, *k, *without),
        Command::PackBypass { graph, u, v, a, b, k, one_tree } => {
            pack_bypass(&inputs.graph(graph)?, *u, *v, *a, *b, *k, *one_tree)
        }
        Command::Catlin { graph, k, remove } => catlin(&inputs.graph(graph)?, *k, remove),
        Command::Uncross { graph, x, targets } => uncross(&inputs.graph(graph)?, *x, targets),
        Command::Hamilton { graph, emit_dot } => hamilton(&inputs.graph(graph)?, emit_dot.as_deref()),
        Command::Layered { action: LayeredCommand::Run { family, m, levels, k, mode, guard } } => {
            layered(family, *m, *levels, *k, *mode, *guard)
        }
        Command::Gen { kind } => generate(kind, cli.format),
        Command::Verify { graph, certificates } => {
            let g = inputs.graph(graph)?;
            let texts = certificates.iter().map(|p| inputs.read(p)).collect::<Result<Vec<_>, _>>()?;
            verify(&g, certificates, &texts, cli.jobs)
        }
    }
}

fn connectivity(g: &Multigraph) -> Result<Produced, Failure> {
    let (kappa, cut) = global_edge_connectivity(g)?;
    let mut violations = Vec::new();
    if !cut.is_consistent(g) {
        violations.push("cut sides do not match its edges".to_string());
    }
    if cut.size() != kappa {
        violations.push(format!("cut has {} edges, reported value is {kappa}", cut.size()));
    }
    // A flow of the cut's size between two separated vertices shows the cut
    // is minimum for that pair.
    if let (Some(&x), Some(&y)) = (cut.side_a.first(), cut.side_b.first()) {
        let flow = pair_connectivity(g, x, y)?;
        if flow != cut.size() {
            violations.push(format!("{x}-{y} flow is {flow}, cut has {} edges", cut.size()));
        }
    }
    let outputs = json!({ "edge_connectivity": kappa, "cut": cut });
    Ok(Produced { artifact: Some(pretty(&outputs)), outputs, verification: Some(Verification::from_violations(violations)) })
}

/// Verify a packing certificate on `g` and expect `trees` trees.
fn check_certificate(g: &Multigraph, cert: &PackingCertificate, trees: Option<usize>) -> Result<Verification, Failure> {
    let host = cert.host(g)?;
    let bypass = cert.bypass()?;
    let packing = cert.packing();
    let mut report = verify_packing(&host, &packing, bypass.as_ref());
    if let Some(k) = trees {
        if packing.len() != k {
            report.violations.push(format!("expected {k} trees, found {}", packing.len()));
        }
    }
    Ok(Verification::from_violations(report.violations))
}

fn packing_output(g: &Multigraph, cert: PackingCertificate, trees: usize) -> Result<Produced, Failure> {
    let verification = check_certificate(g, &cert, Some(trees))?;
    Ok(Produced {
        outputs: json!({ "certificate": cert }),
        verification: Some(verification),
        artifact: Some(serde_json::to_string_pretty(&cert).expect("plain data") + "\n"),
    })
}

fn pack(g: &Multigraph, k: usize, without: Option<u32>) -> Result<Produced, Failure> {
    let (packing, removed) = match without {
        Some(u) => (packing_minus_u(g, vertex(g, u)?, k)?, Some(u)),
        None => (pack_spanning_trees(g, k)?, None),
    };
    let mut cert = PackingCertificate::new(&packing, None);
    cert.without_vertex = removed;
    packing_output(g, cert, k)
}

fn pack_bypass(g: &Multigraph, u: u32, v: u32, a: Point, b: Point, k: usize, one_tree: bool) -> Result<Produced, Failure> {
    let (u, v) = (vertex(g, u)?, vertex(g, v)?);
    let (packing, bypass) =
        if one_tree { one_tree_bypass_packing(g, u, v, a, b, k)? } else { bypass_packing(g, u, v, a, b, k)? };
    let mut cert = PackingCertificate::new(&packing, Some(&bypass));
    cert.without_vertex = Some(u.0);
    packing_output(g, cert, if one_tree { k - 1 } else { k })
}

fn catlin(g: &Multigraph, k: usize, remove: &[u32]) -> Result<Produced, Failure> {
    let f: BTreeSet<EdgeId> = remove.iter().map(|&e| EdgeId(e)).collect();
    let packing = catlin_check(g, &f, k)?;
    let mut cert = PackingCertificate::new(&packing, None);
    cert.without_edges = f.iter().map(|e| e.0).collect();
    packing_output(g, cert, k)
}

fn uncross(g: &Multigraph, x: u32, targets: &[u32]) -> Result<Produced, Failure> {
    let x = vertex(g, x)?;
    let ys = targets.iter().map(|&y| vertex(g, y)).collect::<Result<Vec<_>, _>>()?;
    let input = CutSystem::min_cuts(g, x, &ys)?;
    let output = make_compatible(g, &input)?;
    let mut violations = Vec::new();
    if let Some(w) = find_incompatibility(g, &output) {
        violations.push(format!("cuts for {} and {} are incompatible at {}", w.y, w.y_other, w.edge));
    }
    if !sqsubset(g, &output, &input) {
        violations.push("output is not below the input system".to_string());
    }
    for entry in &output.entries {
        if !entry.cut.is_consistent(g) {
            violations.push(format!("cut for {} is inconsistent", entry.y));
        }
        let flow = pair_connectivity(g, x, entry.y)?;
        if flow != entry.cut.size() {
            violations.push(format!("cut for {} has {} edges, {x}-{} connectivity is {flow}", entry.y, entry.cut.size(), entry.y));
        }
    }
    let outputs = json!({
        "input": input,
        "input_compatible": is_compatible(g, &input),
        "output": output,
        "output_compatible": is_compatible(g, &output),
    });
    Ok(Produced { artifact: Some(pretty(&outputs)), outputs, verification: Some(Verification::from_violations(violations)) })
}

fn hamilton(g: &Multigraph, emit_dot: Option<&Path>) -> Result<Produced, Failure> {
    let cert = line_hamilton_pipeline(g)?;
    let verification = Verification::from_violations(cert.verify(g).err().into_iter().collect());
    if let Some(path) = emit_dot {
        std::fs::write(path, io::line_graph_dot(g, &cert.cycle))
            .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
    }
    Ok(Produced {
        outputs: json!({ "certificate": cert }),
        verification: Some(verification),
        artifact: Some(pretty(&to_value(&cert))),
    })
}

fn layered(family: &str, m: usize, levels: usize, k: usize, mode: ModeArg, guard: Option<usize>) -> Result<Produced, Failure> {
    if family != HALF_CYLINDER {
        return Err(Error::Precondition(format!("unknown family {family:?}, the built-in one is {HALF_CYLINDER}")).into());
    }
    let mode = match mode {
        ModeArg::TwoTree => Mode::TwoTree,
        ModeArg::OneTree => Mode::OneTree,
    };
    let mut config = LayeredConfig::new(m, levels, k, mode);
    if let Some(g) = guard {
        config.guard = g;
    }
    let state = run_layered(&config)?;
    let audit = audit_gaps(&state);
    let level_trace: Vec<Value> = state
        .levels
        .iter()
        .map(|l| {
            json!({
                "n": l.n,
                "vertices": l.vertices,
                "grown": l.grown,
                "ring_cut": l.ring_cut.edges,
                "far": l.far,
                "trees": l.packing.trees,
            })
        })
        .collect();
    let outputs = json!({
        "config": config,
        "columns": state.family.columns,
        "tree_count": state.tree_count(),
        "levels": level_trace,
        "gap_log": state.gaps,
        "events": state.events,
        "audit": audit,
    });
    let verification = Verification::from_violations(audit.violations.clone());
    Ok(Produced { artifact: Some(pretty(&outputs)), outputs, verification: Some(verification) })
}

fn generate(kind: &GenCommand, format: GraphFormat) -> Result<Produced, Failure> {
    let (g, mut outputs, violations) = match kind {
        GenCommand::At { k, depth } => {
            let base = find_base_h(*k)?;
            let (g, st) = gen_aharoni_thomassen(&base.h, &base.s, *k, *depth)?;
            let kappa = treepack::connectivity::edge_connectivity(&g);
            let bad = (kappa != *k).then(|| format!("edge connectivity is {kappa}, expected {k}"));
            let out = json!({ "base_offsets": base.offsets, "structure": st, "edge_connectivity": kappa });
            (g, out, bad.into_iter().collect::<Vec<_>>())
        }
        GenCommand::Random { n, k, seed } => {
            let g = gen_random_2k_connected(*n, *k, *seed)?;
            let kappa = treepack::connectivity::edge_connectivity(&g);
            let bad = (kappa < 2 * k).then(|| format!("edge connectivity is {kappa}, expected at least {}", 2 * k));
            (g, json!({ "seed": seed, "edge_connectivity": kappa }), bad.into_iter().collect())
        }
        GenCommand::Named { name } => (named_graphs(name)?, json!({ "name": name }), Vec::new()),
    };
    outputs["graph"] = io::graph_to_json_value(&g);
    let verification = match kind {
        GenCommand::Named { .. } => None,
        _ => Some(Verification::from_violations(violations)),
    };
    Ok(Produced { outputs, verification, artifact: Some(io::write_graph(&g, format)) })
}

/// A bare certificate, or a run report whose outputs hold one.
fn certificate_value(text: &str) -> Result<Value, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError(format!("certificate JSON: {e}")))?;
    match v.get("outputs").and_then(|o| o.get("certificate")) {
        Some(inner) => Ok(inner.clone()),
        None => Ok(v),
    }
}

enum AnyCertificate {
    Packing(PackingCertificate),
    Hamilton(HamiltonCycleCert),
}

fn parse_certificate(text: &str) -> Result<AnyCertificate, FormatError> {
    let v = certificate_value(text)?;
    if v.get("cycle").is_some() {
        serde_json::from_value(v).map(AnyCertificate::Hamilton).map_err(|e| FormatError(format!("Hamilton certificate: {e}")))
    } else {
        serde_json::from_value(v).map(AnyCertificate::Packing).map_err(|e| FormatError(format!("packing certificate: {e}")))
    }
}

fn verify(g: &Multigraph, paths: &[PathBuf], texts: &[String], jobs: Option<usize>) -> Result<Produced, Failure> {
    let certs = texts.iter().map(|t| parse_certificate(t)).collect::<Result<Vec<_>, _>>()?;
    let check = |c: &AnyCertificate| -> Result<Verification, Failure> {
        match c {
            AnyCertificate::Packing(p) => check_certificate(g, p, None),
            AnyCertificate::Hamilton(h) => Ok(Verification::from_violations(h.verify(g).err().into_iter().collect())),
        }
    };
    let results: Vec<Result<Verification, Failure>> = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?
            .install(|| certs.par_iter().map(check).collect()),
        None => certs.par_iter().map(check).collect(),
    };
    let mut per_file = Vec::new();
    let mut violations = Vec::new();
    for (path, r) in paths.iter().zip(results) {
        let v = r?;
        violations.extend(v.violations.iter().map(|m| format!("{}: {m}", path.display())));
        per_file.push(json!({ "path": path.display().to_string(), "ok": v.ok, "violations": v.violations }));
    }
    let outputs = json!({ "certificates": per_file });
    Ok(Produced { outputs, verification: Some(Verification::from_violations(violations)), artifact: None })
}
