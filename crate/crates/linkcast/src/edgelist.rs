//! Edge-list ingestion, node relabeling and the canonical on-disk graph.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use linkcast_core::{NodeId, TemporalEdge, TemporalGraph, Timestamp};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Tab,
    /// Runs of spaces or tabs.
    Whitespace,
    Byte(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeaderMode {
    /// A first row whose time column is not numeric is a header.
    Auto,
    Present,
    Absent,
}

/// Layout of an edge-list file. Parsed from strings such as `csv`, `tsv`,
/// `ws`, or `csv:header=no:cols=1,0,3`. Columns are zero-based and name the
/// source, destination and time fields; any other column is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListFormat {
    pub delimiter: Delimiter,
    pub header: HeaderMode,
    pub src: usize,
    pub dst: usize,
    pub t: usize,
}

impl Default for EdgeListFormat {
    fn default() -> Self {
        EdgeListFormat {
            delimiter: Delimiter::Comma,
            header: HeaderMode::Auto,
            src: 0,
            dst: 1,
            t: 2,
        }
    }
}

impl FromStr for EdgeListFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let delimiter = match parts.next().unwrap_or_default() {
            "csv" | "" => Delimiter::Comma,
            "tsv" => Delimiter::Tab,
            "ws" | "whitespace" => Delimiter::Whitespace,
            other => return Err(format!("unknown delimiter kind '{other}' (csv, tsv, ws)")),
        };
        let mut f = EdgeListFormat {
            delimiter,
            ..EdgeListFormat::default()
        };
        for opt in parts {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{opt}'"))?;
            match key {
                "header" => {
                    f.header = match value {
                        "auto" => HeaderMode::Auto,
                        "yes" | "true" => HeaderMode::Present,
                        "no" | "false" => HeaderMode::Absent,
                        _ => return Err(format!("header must be auto, yes or no, got '{value}'")),
                    }
                }
                "cols" => {
                    let cols: Vec<usize> = value
                        .split(',')
                        .map(|c| {
                            c.trim()
                                .parse()
                                .map_err(|_| format!("bad column index '{c}'"))
                        })
                        .collect::<Result<_, _>>()?;
                    let [src, dst, t] = cols[..] else {
                        return Err("cols needs exactly three indices: src,dst,t".into());
                    };
                    (f.src, f.dst, f.t) = (src, dst, t);
                }
                "delim" => {
                    let &[b] = value.as_bytes() else {
                        return Err(format!("delim must be a single byte, got '{value}'"));
                    };
                    f.delimiter = Delimiter::Byte(b);
                }
                _ => return Err(format!("unknown format option '{key}'")),
            }
        }
        Ok(f)
    }
}

impl fmt::Display for EdgeListFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.delimiter {
            Delimiter::Comma => write!(f, "csv")?,
            Delimiter::Tab => write!(f, "tsv")?,
            Delimiter::Whitespace => write!(f, "ws")?,
            Delimiter::Byte(b) => write!(f, "csv:delim={}", b as char)?,
        }
        let header = match self.header {
            HeaderMode::Auto => "auto",
            HeaderMode::Present => "yes",
            HeaderMode::Absent => "no",
        };
        write!(
            f,
            ":header={header}:cols={},{},{}",
            self.src, self.dst, self.t
        )
    }
}

/// A graph together with where it came from and how its nodes were renamed.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: TemporalGraph,
    /// Original label of each dense node id.
    pub labels: Vec<String>,
    /// Hex sha256 of the input bytes.
    pub fingerprint: String,
    pub source: PathBuf,
}

impl LoadedGraph {
    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn label_index(&self) -> HashMap<&str, NodeId> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as NodeId))
            .collect()
    }
}

pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a time field. Integral floats such as `1.0e9` are accepted.
pub fn parse_timestamp(field: &str) -> Option<Timestamp> {
    if let Ok(t) = field.parse::<i64>() {
        return Some(t);
    }
    let x: f64 = field.parse().ok()?;
    (x.is_finite() && x.fract() == 0.0 && x.abs() < 9.2e18).then_some(x as i64)
}

fn newline_offsets(text: &str) -> Vec<u64> {
    text.bytes()
        .enumerate()
        .filter(|&(_, b)| b == b'\n')
        .map(|(i, _)| i as u64)
        .collect()
}

struct RawEdges {
    /// Provisional ids in order of first appearance in the file.
    labels: Vec<String>,
    edges: Vec<TemporalEdge>,
}

fn collect_rows(text: &str, format: &EdgeListFormat, path: &Path) -> Result<RawEdges> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let needed = format.src.max(format.dst).max(format.t) + 1;
    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut raw = RawEdges {
        labels: Vec::new(),
        edges: Vec::new(),
    };
    let mut intern = |label: &str| -> NodeId {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = raw.labels.len() as NodeId;
        raw.labels.push(label.to_string());
        ids.insert(label.to_string(), id);
        id
    };
    let mut first_row = true;
    let mut push = |fields: &[&str], line: u64| -> Result<()> {
        let is_first = std::mem::replace(&mut first_row, false);
        if fields.len() < needed {
            if is_first && format.header == HeaderMode::Present {
                return Ok(());
            }
            return Err(parse_err(
                line,
                format!("expected at least {needed} fields, found {}", fields.len()),
            ));
        }
        let t_field = fields[format.t].trim();
        let t = parse_timestamp(t_field);
        if is_first {
            match format.header {
                HeaderMode::Present => return Ok(()),
                HeaderMode::Auto if t.is_none() => return Ok(()),
                _ => {}
            }
        }
        let t =
            t.ok_or_else(|| parse_err(line, format!("timestamp '{t_field}' is not an integer")))?;
        if t < 0 {
            return Err(parse_err(line, format!("negative timestamp {t}")));
        }
        let (s, d) = (fields[format.src].trim(), fields[format.dst].trim());
        if s.is_empty() || d.is_empty() {
            return Err(parse_err(line, "empty node label".into()));
        }
        let src = intern(s);
        let dst = intern(d);
        raw.edges.push(TemporalEdge::new(src, dst, t));
        Ok(())
    };

    match format.delimiter {
        Delimiter::Whitespace => {
            for (i, line) in text.lines().enumerate() {
                let body = line.trim();
                if body.is_empty() || body.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = body.split_whitespace().collect();
                push(&fields, i as u64 + 1)?;
            }
        }
        delim => {
            let byte = match delim {
                Delimiter::Comma => b',',
                Delimiter::Tab => b'\t',
                Delimiter::Byte(b) => b,
                Delimiter::Whitespace => unreachable!(),
            };
            // a record's position points at any comments or blank lines the
            // reader skipped before it; step over those to the physical line
            let newlines: Vec<u64> = newline_offsets(text);
            let physical: Vec<&str> = text.split('\n').collect();
            let line_at = |byte: u64| {
                let mut idx = newlines.partition_point(|&nl| nl < byte);
                while physical
                    .get(idx)
                    .is_some_and(|l| l.trim().is_empty() || l.trim_start().starts_with('#'))
                {
                    idx += 1;
                }
                idx as u64 + 1
            };
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(byte)
                .has_headers(false)
                .flexible(true)
                .comment(Some(b'#'))
                .from_reader(text.as_bytes());
            let mut record = csv::StringRecord::new();
            loop {
                let more = reader.read_record(&mut record).map_err(|e| {
                    let line = e.position().map_or(0, |p| line_at(p.byte()));
                    parse_err(line, e.to_string())
                })?;
                if !more {
                    break;
                }
                let line = record.position().map_or(0, |p| line_at(p.byte()));
                if record.len() == 1 && record[0].trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = record.iter().collect();
                push(&fields, line)?;
            }
        }
    }
    Ok(raw)
}

/// Reads an edge list, sorts it stably by time and renames nodes densely in
/// chronological order of first appearance.
pub fn load_edge_list(
    path: &Path,
    format: &EdgeListFormat,
    resolution: Timestamp,
) -> Result<LoadedGraph> {
    let bytes = read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: format!("not valid UTF-8: {e}"),
    })?;
    let raw = collect_rows(text, format, path)?;
    if raw.edges.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no edges".into(),
        });
    }
    let mut edges = raw.edges;
    edges.sort_by_key(|e| e.t);

    const UNSEEN: NodeId = NodeId::MAX;
    let mut dense = vec![UNSEEN; raw.labels.len()];
    let mut labels = Vec::with_capacity(raw.labels.len());
    let mut rename = |id: NodeId| -> NodeId {
        let slot = &mut dense[id as usize];
        if *slot == UNSEEN {
            *slot = labels.len() as NodeId;
            labels.push(raw.labels[id as usize].clone());
        }
        *slot
    };
    for e in &mut edges {
        e.src = rename(e.src);
        e.dst = rename(e.dst);
    }
    let graph = TemporalGraph::new(labels.len(), edges, resolution)?;
    Ok(LoadedGraph {
        graph,
        labels,
        fingerprint: fingerprint(&bytes),
        source: path.to_path_buf(),
    })
}

/// Sidecar of a canonical graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: usize,
    pub m: usize,
    pub resolution: Timestamp,
    /// Fingerprint of the file the graph was originally loaded from.
    pub source_fingerprint: String,
    /// Original label of each dense node id.
    pub remap: Vec<String>,
}

pub fn meta_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

/// Writes `src,dst,t` rows with original labels in graph order, plus a JSON
/// sidecar next to it.
pub fn write_canonical(g: &LoadedGraph, csv_path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let werr = |e: csv::Error| Error::Write {
        path: csv_path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    w.write_record(["src", "dst", "t"]).map_err(werr)?;
    for e in g.graph.edges() {
        w.write_record([g.label(e.src), g.label(e.dst), &e.t.to_string()])
            .map_err(werr)?;
    }
    let body = w.into_inner().map_err(|e| werr(e.into_error().into()))?;
    crate::output::write_file(csv_path, &body)?;
    let meta = GraphMeta {
        n: g.graph.node_count(),
        m: g.graph.edge_count(),
        resolution: g.graph.resolution(),
        source_fingerprint: g.fingerprint.clone(),
        remap: g.labels.clone(),
    };
    crate::output::write_json(&meta_path(csv_path), &meta)
}

/// Loads a canonical graph and checks it against its sidecar.
pub fn read_canonical(csv_path: &Path) -> Result<(LoadedGraph, GraphMeta)> {
    let meta_file = meta_path(csv_path);
    let meta: GraphMeta =
        serde_json::from_slice(&read(&meta_file)?).map_err(|e| Error::Format {
            path: meta_file.clone(),
            message: e.to_string(),
        })?;
    let format = EdgeListFormat {
        header: HeaderMode::Present,
        ..EdgeListFormat::default()
    };
    let g = load_edge_list(csv_path, &format, meta.resolution)?;
    if g.graph.node_count() != meta.n || g.graph.edge_count() != meta.m || g.labels != meta.remap {
        return Err(Error::Format {
            path: meta_file,
            message: "sidecar does not match the edge file".into(),
        });
    }
    Ok((g, meta))
}
