//! Reading and writing graphs, colors, communities and node metadata.
//!
//! Two edge-list dialects are understood:
//!
//! * SNAP-style lists: `#` comment lines and one `u v` pair per line, separated by
//!   whitespace. Ids are arbitrary tokens, remapped to dense ids in order of first
//!   appearance. Arcs are symmetrized, duplicate pairs collapse to one edge and
//!   self-loops are dropped.
//! * The multigraph dialect written by [`write_edge_list`], recognized by its
//!   first line `# netstruct-edgelist v1 multigraph nodes=N edges=M`. Ids are
//!   already dense and parallel edges are kept, so generated graphs round-trip
//!   exactly.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use log::warn;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::generators::{ColoredGraph, HomophylyParams};
use crate::graph::Graph;
use crate::metrics::{CommunitySet, Partition};
use crate::prediction::Document;

/// Version stamped into every JSON document this crate writes.
pub const SCHEMA_VERSION: u32 = 1;

const HEADER_TAG: &str = "netstruct-edgelist";

/// A parsed edge list together with the original node ids.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    /// `id_map[v]` is the original id of dense node `v`.
    pub id_map: Vec<String>,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

fn parse_error(source: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        msg: msg.into(),
    }
}

/// Parses `# netstruct-edgelist v1 multigraph nodes=N edges=M`.
fn parse_header(line: &str, source: &str) -> Result<Option<(usize, usize)>> {
    let mut words = line.trim_start_matches('#').split_whitespace();
    if words.next() != Some(HEADER_TAG) {
        return Ok(None);
    }
    let bad = || parse_error(source, 1, format!("malformed header: {line}"));
    if words.next() != Some("v1") || words.next() != Some("multigraph") {
        return Err(bad());
    }
    let mut nodes = None;
    let mut edges = None;
    for word in words {
        let (key, value) = word.split_once('=').ok_or_else(bad)?;
        let value: usize = value.parse().map_err(|_| bad())?;
        match key {
            "nodes" => nodes = Some(value),
            "edges" => edges = Some(value),
            _ => return Err(bad()),
        }
    }
    Ok(Some((nodes.ok_or_else(bad)?, edges.ok_or_else(bad)?)))
}

fn split_pair<'a>(line: &'a str, source: &str, lineno: usize) -> Result<(&'a str, &'a str)> {
    let mut tokens = line.split_whitespace();
    match (tokens.next(), tokens.next(), tokens.next()) {
        (Some(u), Some(v), None) => Ok((u, v)),
        _ => Err(parse_error(
            source,
            lineno,
            format!("expected two node ids, got {line:?}"),
        )),
    }
}

/// Parses an edge list in either dialect. `source` names the input in error messages.
pub fn parse_edge_list(reader: impl BufRead, source: &str) -> Result<EdgeList> {
    let mut lines = reader.lines().enumerate().peekable();
    let header = match lines.peek() {
        Some((_, Ok(first))) if first.starts_with('#') => parse_header(first, source)?,
        _ => None,
    };
    let mut next_line = || -> Option<Result<(usize, String)>> {
        for (i, line) in lines.by_ref() {
            let lineno = i + 1;
            match line {
                Err(e) => return Some(Err(parse_error(source, lineno, e.to_string()))),
                Ok(l) => {
                    let t = l.trim();
                    if !t.is_empty() && !t.starts_with('#') {
                        return Some(Ok((lineno, t.to_string())));
                    }
                }
            }
        }
        None
    };

    if let Some((n, m)) = header {
        let mut edges = Vec::with_capacity(m);
        while let Some(item) = next_line() {
            let (lineno, line) = item?;
            let (a, b) = split_pair(&line, source, lineno)?;
            let parse = |tok: &str| -> Result<usize> {
                let id: usize = tok
                    .parse()
                    .map_err(|_| parse_error(source, lineno, format!("node id {tok:?} is not an integer")))?;
                if id >= n {
                    return Err(parse_error(source, lineno, format!("node id {id} ≥ declared node count {n}")));
                }
                Ok(id)
            };
            let (u, v) = (parse(a)?, parse(b)?);
            if u == v {
                return Err(parse_error(source, lineno, format!("self-loop on node {u}")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(parse_error(
                source,
                1,
                format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        return Ok(EdgeList {
            graph: Graph::from_edges(n, edges)?,
            id_map: (0..n).map(|v| v.to_string()).collect(),
            self_loops_dropped: 0,
            duplicates_dropped: 0,
        });
    }

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut id_map: Vec<String> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    let mut self_loops = 0;
    let mut duplicates = 0;
    while let Some(item) = next_line() {
        let (lineno, line) = item?;
        let (a, b) = split_pair(&line, source, lineno)?;
        let mut dense = |tok: &str| {
            *index.entry(tok.to_string()).or_insert_with(|| {
                id_map.push(tok.to_string());
                id_map.len() - 1
            })
        };
        let (u, v) = (dense(a), dense(b));
        if u == v {
            self_loops += 1;
            continue;
        }
        if seen.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        } else {
            duplicates += 1;
        }
    }
    if self_loops > 0 || duplicates > 0 {
        warn!("{source}: dropped {self_loops} self-loops and {duplicates} duplicate arcs");
    }
    if id_map.is_empty() {
        warn!("{source}: no edges; the graph is empty");
    }
    Ok(EdgeList {
        graph: Graph::from_edges(id_map.len(), edges)?,
        id_map,
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_edge_list(path: &Path) -> Result<EdgeList> {
    parse_edge_list(open(path)?, &path.display().to_string())
}

/// Writes the multigraph dialect: a header line, then one tab-separated edge per line.
pub fn write_edge_list(g: &Graph, mut w: impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "# {HEADER_TAG} v1 multigraph nodes={} edges={}",
        g.node_count(),
        g.edge_count()
    )?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u}\t{v}")?;
    }
    w.flush()
}

pub fn write_edge_list_file(path: &Path, g: &Graph) -> Result<()> {
    write_edge_list(g, create(path)?).map_err(|e| Error::io(path, e))
}

/// Writes `value` as pretty-printed JSON followed by a newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(open(path)?)?)
}

fn check_schema(found: u32, path: &Path) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::invalid(format!(
            "{}: schema version {found}, expected {SCHEMA_VERSION}",
            path.display()
        )));
    }
    Ok(())
}

/// Sidecar mapping dense ids back to the original ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMapFile {
    pub schema_version: u32,
    pub ids: Vec<String>,
}

impl IdMapFile {
    pub fn new(ids: Vec<String>) -> Self {
        IdMapFile {
            schema_version: SCHEMA_VERSION,
            ids,
        }
    }
}

/// Sidecar holding the color attributes of a [`ColoredGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorsFile {
    pub schema_version: u32,
    pub color: Vec<usize>,
    pub is_seed: Vec<bool>,
    pub creation_time: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<HomophylyParams>,
}

impl ColorsFile {
    pub fn from_colored(cg: &ColoredGraph, params: Option<HomophylyParams>) -> Self {
        ColorsFile {
            schema_version: SCHEMA_VERSION,
            color: cg.color.clone(),
            is_seed: cg.is_seed.clone(),
            creation_time: cg.creation_time.clone(),
            params,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file: ColorsFile = read_json(path)?;
        check_schema(file.schema_version, path)?;
        Ok(file)
    }

    pub fn attach(self, graph: Graph) -> Result<ColoredGraph> {
        ColoredGraph::from_parts(graph, self.color, self.is_seed, self.creation_time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommunityKind {
    /// Disjoint modules covering every node.
    Partition,
    /// Possibly overlapping node sets.
    Communities,
}

/// Envelope for partitions and community sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunitiesFile {
    pub schema_version: u32,
    pub kind: CommunityKind,
    pub communities: CommunitySet,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CommunitiesInput {
    Envelope(CommunitiesFile),
    Bare(CommunitySet),
}

pub fn write_communities(path: &Path, communities: &CommunitySet) -> Result<()> {
    write_json(
        path,
        &CommunitiesFile {
            schema_version: SCHEMA_VERSION,
            kind: CommunityKind::Communities,
            communities: communities.clone(),
        },
    )
}

pub fn write_partition(path: &Path, partition: &Partition) -> Result<()> {
    write_json(
        path,
        &CommunitiesFile {
            schema_version: SCHEMA_VERSION,
            kind: CommunityKind::Partition,
            communities: partition.to_community_set(),
        },
    )
}

/// Reads either an envelope or a bare JSON array of node-id arrays.
pub fn read_communities(path: &Path) -> Result<CommunitySet> {
    match read_json(path)? {
        CommunitiesInput::Envelope(f) => {
            check_schema(f.schema_version, path)?;
            Ok(f.communities)
        }
        CommunitiesInput::Bare(c) => Ok(c),
    }
}

/// Reads a community file and checks that it partitions `0..n`.
pub fn read_partition(path: &Path, n: usize) -> Result<Partition> {
    Partition::from_modules(n, &read_communities(path)?)
}

/// Self-contained JSON form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphBundle {
    pub schema_version: u32,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub id_map: Vec<String>,
}

impl GraphBundle {
    pub fn new(graph: &Graph, id_map: Vec<String>) -> Self {
        GraphBundle {
            schema_version: SCHEMA_VERSION,
            n: graph.node_count(),
            edges: graph.edges().to_vec(),
            id_map,
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        if self.id_map.len() != self.n {
            return Err(Error::invalid(format!(
                "bundle id map has {} entries for {} nodes",
                self.id_map.len(),
                self.n
            )));
        }
        Graph::from_edges(self.n, self.edges.clone())
    }
}

fn looks_like_json(path: &Path) -> Result<bool> {
    let mut buf = [0u8; 256];
    let read = open(path)?.read(&mut buf).map_err(|e| Error::io(path, e))?;
    Ok(buf[..read]
        .iter()
        .find(|b| !b.is_ascii_whitespace())
        .is_some_and(|&b| b == b'{'))
}

/// Loads an edge list or a graph bundle into a bundle.
///
/// Converting a bundle returns it unchanged.
pub fn convert(path: &Path) -> Result<GraphBundle> {
    if looks_like_json(path)? {
        let bundle: GraphBundle = read_json(path)?;
        check_schema(bundle.schema_version, path)?;
        bundle.to_graph()?;
        return Ok(bundle);
    }
    let list = read_edge_list(path)?;
    Ok(GraphBundle::new(&list.graph, list.id_map))
}

/// Loads a graph from an edge list or a bundle, returning the original ids too.
pub fn read_graph(path: &Path) -> Result<(Graph, Vec<String>)> {
    let bundle = convert(path)?;
    let graph = bundle.to_graph()?;
    Ok((graph, bundle.id_map))
}

#[derive(Deserialize)]
struct MetadataRecord {
    id: serde_json::Value,
    #[serde(flatten)]
    doc: Document,
}

/// Reads JSONL node metadata, one `{"id", "title", "abstract", "keywords"}` record per line.
///
/// Records are matched to nodes through `id_map`; nodes without a record get an
/// empty document and records for unknown ids are skipped.
pub fn read_metadata(path: &Path, id_map: &[String]) -> Result<Vec<Document>> {
    let source = path.display().to_string();
    let index: HashMap<&str, usize> = id_map
        .iter()
        .enumerate()
        .map(|(v, id)| (id.as_str(), v))
        .collect();
    let mut docs = vec![Document::default(); id_map.len()];
    let mut unknown = 0;
    for (i, line) in open(path)?.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| parse_error(&source, lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: MetadataRecord =
            serde_json::from_str(&line).map_err(|e| parse_error(&source, lineno, e.to_string()))?;
        let id = match &record.id {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(parse_error(&source, lineno, format!("unsupported id {other}"))),
        };
        match index.get(id.as_str()) {
            Some(&v) => docs[v] = record.doc,
            None => unknown += 1,
        }
    }
    if unknown > 0 {
        warn!("{source}: skipped {unknown} records whose id is not in the graph");
    }
    Ok(docs)
}

/// Hex-encoded SHA-256 digest of a file.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut reader = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let read = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if read == 0 {
            break;
        }
        hasher.update(&buf[..read]);
    }
    Ok(hex::encode(hasher.finalize()))
}
