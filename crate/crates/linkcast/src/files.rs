//! Delimited exchange files: instances, scores, chunk exports and series.

use std::fmt::Write as _;
use std::path::Path;

use linkcast_core::baselines::ScoredInstance;
use linkcast_core::chunking::{ChunkAssignment, ChunkScheme};
use linkcast_core::evaluation::MetricReport;
use linkcast_core::info::NmiCurve;
use linkcast_core::sampling::{EvalInstance, Label, SamplerSpec};
use linkcast_core::TemporalGraph;
use serde::{Deserialize, Serialize};

use crate::edgelist::{parse_timestamp, LoadedGraph};
use crate::error::{Error, Result};

const INSTANCES_TAG: &str = "linkcast instances";
const SCORES_TAG: &str = "linkcast scores";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train_ratio: f64,
    pub val_ratio: f64,
}

/// Everything needed to regenerate an instance stream. Score files repeat it.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceHeader {
    pub fingerprint: String,
    pub scheme: ChunkScheme,
    pub split: SplitRatios,
    pub sampler: SamplerSpec,
}

impl InstanceHeader {
    fn render(&self, tag: &str) -> String {
        format!(
            "# {tag}\n# fingerprint: {}\n# scheme: {}\n# split: {}\n# sampler: {}\n",
            self.fingerprint,
            json(&self.scheme),
            json(&self.split),
            json(&self.sampler),
        )
    }

    fn parse(text: &str, tag: &str, path: &Path) -> Result<Self> {
        let bad = |message: String| Error::Format {
            path: path.to_path_buf(),
            message,
        };
        let mut lines = text
            .lines()
            .map_while(|l| l.strip_prefix('#'))
            .map(str::trim);
        if lines.next() != Some(tag) {
            return Err(bad(format!("missing '# {tag}' header line")));
        }
        let (mut fingerprint, mut scheme, mut split, mut sampler) = (None, None, None, None);
        for line in lines {
            let Some((key, value)) = line.split_once(": ") else {
                continue;
            };
            let field = |what: &str| bad(format!("bad {what} header"));
            match key {
                "fingerprint" => fingerprint = Some(value.to_string()),
                "scheme" => {
                    scheme = Some(serde_json::from_str(value).map_err(|_| field("scheme"))?)
                }
                "split" => split = Some(serde_json::from_str(value).map_err(|_| field("split"))?),
                "sampler" => {
                    sampler = Some(serde_json::from_str(value).map_err(|_| field("sampler"))?)
                }
                _ => {}
            }
        }
        Ok(InstanceHeader {
            fingerprint: fingerprint.ok_or_else(|| bad("no fingerprint header".into()))?,
            scheme: scheme.ok_or_else(|| bad("no scheme header".into()))?,
            split: split.ok_or_else(|| bad("no split header".into()))?,
            sampler: sampler.ok_or_else(|| bad("no sampler header".into()))?,
        })
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("header types serialize")
}

fn label_bit(l: Label) -> &'static str {
    if l.is_positive() {
        "1"
    } else {
        "0"
    }
}

fn rows(
    header: &str,
    g: &LoadedGraph,
    instances: &[EvalInstance],
    scores: Option<&[f64]>,
) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(header.as_bytes().to_vec());
    let mut columns = vec!["chunk_ordinal", "src", "dst", "t", "label"];
    if scores.is_some() {
        columns.push("score");
    }
    w.write_record(&columns).expect("in-memory write");
    for (i, inst) in instances.iter().enumerate() {
        let chunk = inst.chunk.to_string();
        let t = inst.t.to_string();
        let mut rec = vec![
            chunk.as_str(),
            g.label(inst.src),
            g.label(inst.dst),
            t.as_str(),
            label_bit(inst.label),
        ];
        let score;
        if let Some(s) = scores {
            score = s[i].to_string();
            rec.push(&score);
        }
        w.write_record(&rec).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

pub fn render_instances(
    header: &InstanceHeader,
    g: &LoadedGraph,
    instances: &[EvalInstance],
) -> Vec<u8> {
    rows(&header.render(INSTANCES_TAG), g, instances, None)
}

pub fn render_scores(
    header: &InstanceHeader,
    g: &LoadedGraph,
    instances: &[EvalInstance],
    scores: &[f64],
) -> Vec<u8> {
    rows(&header.render(SCORES_TAG), g, instances, Some(scores))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_rows(
    text: &str,
    path: &Path,
    g: &LoadedGraph,
    with_score: bool,
) -> Result<Vec<ScoredInstance>> {
    let ids = g.label_index();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let width = if with_score { 6 } else { 5 };
        if rec.len() != width {
            return Err(err(format!("expected {width} fields, found {}", rec.len())));
        }
        let chunk: i64 = rec[0]
            .parse()
            .map_err(|_| err(format!("bad chunk ordinal '{}'", &rec[0])))?;
        let node = |s: &str| {
            ids.get(s)
                .copied()
                .ok_or_else(|| err(format!("unknown node '{s}'")))
        };
        let t =
            parse_timestamp(&rec[3]).ok_or_else(|| err(format!("bad timestamp '{}'", &rec[3])))?;
        let label = match &rec[4] {
            "1" => Label::Positive,
            "0" => Label::Negative,
            other => return Err(err(format!("label must be 0 or 1, got '{other}'"))),
        };
        let score = if with_score {
            let s: f64 = rec[5]
                .parse()
                .map_err(|_| err(format!("bad score '{}'", &rec[5])))?;
            if !s.is_finite() {
                return Err(err(format!("score '{}' is not finite", &rec[5])));
            }
            s
        } else {
            0.0
        };
        out.push(ScoredInstance {
            instance: EvalInstance {
                chunk,
                src: node(&rec[1])?,
                dst: node(&rec[2])?,
                t,
                label,
            },
            score,
        });
    }
    Ok(out)
}

pub fn read_instances(path: &Path, g: &LoadedGraph) -> Result<(InstanceHeader, Vec<EvalInstance>)> {
    let text = read_text(path)?;
    let header = InstanceHeader::parse(&text, INSTANCES_TAG, path)?;
    let rows = parse_rows(&text, path, g, false)?;
    Ok((header, rows.into_iter().map(|r| r.instance).collect()))
}

pub fn read_scores(path: &Path, g: &LoadedGraph) -> Result<(InstanceHeader, Vec<ScoredInstance>)> {
    let text = read_text(path)?;
    let header = InstanceHeader::parse(&text, SCORES_TAG, path)?;
    Ok((header, parse_rows(&text, path, g, true)?))
}

/// Refuses a score file produced for a different instance stream.
pub fn check_echo(expected: &InstanceHeader, got: &InstanceHeader, path: &Path) -> Result<()> {
    if expected.fingerprint != got.fingerprint {
        return Err(Error::FingerprintMismatch {
            left: expected.fingerprint.clone(),
            right: got.fingerprint.clone(),
        });
    }
    if expected != got {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "header does not match the instance stream (scheme, split or sampler differ)"
                .into(),
        });
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `edge_index,chunk_ordinal,t` for every edge of the assignment.
pub fn render_chunk_export(g: &TemporalGraph, a: &ChunkAssignment) -> String {
    let mut s = String::from("edge_index,chunk_ordinal,t\n");
    for idx in a.range() {
        let _ = writeln!(s, "{idx},{},{}", a.ordinal_of(idx), g.edges()[idx].t);
    }
    s
}

pub fn render_sweep(curve: &NmiCurve) -> String {
    let mut s = String::from("parameter,nmi,h_x,h_y,mi\n");
    for p in &curve.points {
        let r = &p.report;
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.parameter, r.value, r.h_x, r.h_y, r.mi
        );
    }
    s
}

pub fn render_series(report: &MetricReport) -> String {
    let mut s = String::from("chunk_ordinal,t_mid,auc,ap,n_pos\n");
    for c in &report.per_chunk {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            c.ordinal,
            c.t_mid,
            opt(c.auc),
            opt(c.ap),
            c.n_pos
        );
    }
    s
}

pub fn render_activity(bins: &[(i64, usize)]) -> String {
    let mut s = String::from("bin_start,count\n");
    for (t, n) in bins {
        let _ = writeln!(s, "{t},{n}");
    }
    s
}
