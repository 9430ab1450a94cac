//! File formats of the pipeline: charpoly sidecar files, per-class DOT
//! files, line-delimited class records, and the search summary.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::charpoly::charpoly;
use crate::cospectral::MatchClass;
use crate::graph::{graph6_decode, Graph};
use crate::poly::IntPoly;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// One line of a charpoly sidecar file: a graph6 string followed by the
/// characteristic polynomial coefficients, highest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidecarEntry {
    pub g6: String,
    pub coeffs: Vec<BigInt>,
}

pub fn format_sidecar_line(g6: &str, poly: &IntPoly) -> String {
    let mut line = String::from(g6);
    for c in poly.coeffs_desc() {
        line.push(' ');
        line.push_str(&c.to_string());
    }
    line
}

pub fn parse_sidecar_line(line: &str) -> Result<SidecarEntry, String> {
    let mut fields = line.split_whitespace();
    let g6 = fields.next().ok_or("empty line")?.to_string();
    let coeffs = fields
        .map(|f| BigInt::from_str(f).map_err(|_| format!("bad coefficient {f:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.is_empty() {
        return Err("missing coefficients".to_string());
    }
    Ok(SidecarEntry { g6, coeffs })
}

/// Computes the sidecar for a .g6 file, preserving input order. Any
/// malformed line aborts with its line number.
pub fn charpolys_file(input: &Path, output: &Path) -> Result<usize, ReportError> {
    let reader = BufReader::new(fs::File::open(input)?);
    let mut lines: Vec<(usize, String)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        lines.push((i + 1, line.trim().to_string()));
    }
    let computed: Result<Vec<String>, ReportError> = lines
        .par_iter()
        .map(|(lineno, g6)| {
            let graph = graph6_decode(g6).map_err(|e| ReportError::Malformed {
                line: *lineno,
                message: e.to_string(),
            })?;
            Ok(format_sidecar_line(g6, &charpoly(&graph)))
        })
        .collect();
    let computed = computed?;
    let mut out = fs::File::create(output)?;
    for line in &computed {
        writeln!(out, "{line}")?;
    }
    Ok(computed.len())
}

/// Stable-sorts a sidecar file by coefficient vector so that cospectral
/// graphs occupy consecutive lines. Malformed lines are rejected.
pub fn sort_sidecar_file(input: &Path, output: &Path) -> Result<usize, ReportError> {
    let reader = BufReader::new(fs::File::open(input)?);
    let mut entries: Vec<SidecarEntry> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(
            parse_sidecar_line(&line).map_err(|message| ReportError::Malformed {
                line: i + 1,
                message,
            })?,
        );
    }
    entries.sort_by(|a, b| a.coeffs.cmp(&b.coeffs));
    let mut out = fs::File::create(output)?;
    for e in &entries {
        let mut line = e.g6.clone();
        for c in &e.coeffs {
            line.push(' ');
            line.push_str(&c.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(entries.len())
}

/// Machine-readable record of one MatchClass, one JSON object per line in
/// classes.jsonl. Field order is the stable wire format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassRecord {
    pub class: usize,
    pub signature: Vec<u32>,
    pub removal_cospectral: bool,
    pub members: Vec<MemberRecord>,
    /// HosoyaVector components l = 0..k, each as decimal coefficient
    /// strings highest degree first.
    pub vector: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MemberRecord {
    pub g6: String,
    pub graph_index: usize,
    pub selection: Vec<usize>,
}

pub fn class_record(class: &MatchClass, g6s: &[String], index: usize) -> ClassRecord {
    ClassRecord {
        class: index,
        signature: class.signature.entries().to_vec(),
        removal_cospectral: class.removal_cospectral,
        members: class
            .members
            .iter()
            .map(|m| MemberRecord {
                g6: g6s[m.graph_index].clone(),
                graph_index: m.graph_index,
                selection: m.spec.vertices().to_vec(),
            })
            .collect(),
        vector: class
            .vector
            .components()
            .iter()
            .map(|p| p.coeffs_desc().iter().map(BigInt::to_string).collect())
            .collect(),
    }
}

/// DOT rendering of a class: one `graph member_i { }` block per member,
/// every vertex as an explicit node statement, selected vertices annotated
/// with their copy multiplicity.
pub fn dot_for_class(class: &MatchClass, g6s: &[String], index: usize) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "// class {index}; signature {}; removal_cospectral={}\n",
        class.signature, class.removal_cospectral
    ));
    for (mi, member) in class.members.iter().enumerate() {
        let g = member.spec.graph();
        out.push_str(&format!("graph member_{mi} {{\n"));
        out.push_str(&format!("  // graph6: {}\n", g6s[member.graph_index]));
        for v in 0..g.n() {
            match member.spec.vertices().iter().position(|&u| u == v) {
                Some(pos) => out.push_str(&format!(
                    "  {v} [mult={}];\n",
                    class.signature.entries()[pos]
                )),
                None => out.push_str(&format!("  {v};\n")),
            }
        }
        for (a, b) in g.edges() {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
    }
    out
}

/// One member as recovered from a DOT file: the underlying graph and the
/// (vertex, multiplicity) annotations in vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotMember {
    pub graph: Graph,
    pub selection: Vec<(usize, u32)>,
}

/// Parses the output of `dot_for_class` back into members; the inverse used
/// by round-trip tests.
pub fn parse_dot_class(text: &str) -> Result<Vec<DotMember>, String> {
    let mut members: Vec<DotMember> = Vec::new();
    let mut nodes: Vec<(usize, Option<u32>)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut open = false;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        if line.starts_with("graph ") && line.ends_with('{') {
            if open {
                return Err("nested graph block".to_string());
            }
            open = true;
            nodes.clear();
            edges.clear();
            continue;
        }
        if line == "}" {
            if !open {
                return Err("unmatched closing brace".to_string());
            }
            let n = nodes.iter().map(|&(v, _)| v + 1).max().unwrap_or(0);
            let mut graph = Graph::new(n);
            for &(a, b) in &edges {
                if a >= n || b >= n {
                    return Err(format!("edge endpoint {} out of range", a.max(b)));
                }
                graph.add_edge(a, b);
            }
            let selection = nodes
                .iter()
                .filter_map(|&(v, m)| m.map(|mult| (v, mult)))
                .collect();
            members.push(DotMember { graph, selection });
            open = false;
            continue;
        }
        let stmt = line
            .strip_suffix(';')
            .ok_or_else(|| format!("missing semicolon: {line:?}"))?;
        if let Some((a, b)) = stmt.split_once("--") {
            let a = a
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad edge: {line:?}"))?;
            let b = b
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad edge: {line:?}"))?;
            edges.push((a, b));
        } else if let Some((v, attr)) = stmt.split_once('[') {
            let v = v
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad node: {line:?}"))?;
            let mult = attr
                .trim_end_matches(']')
                .trim()
                .strip_prefix("mult=")
                .and_then(|m| m.parse::<u32>().ok())
                .ok_or_else(|| format!("bad attribute: {line:?}"))?;
            nodes.push((v, Some(mult)));
        } else {
            let v = stmt
                .trim()
                .parse::<usize>()
                .map_err(|_| format!("bad node: {line:?}"))?;
            nodes.push((v, None));
        }
    }
    if open {
        return Err("unterminated graph block".to_string());
    }
    Ok(members)
}

/// Final counts of a search run; serialized as summary.json.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
pub struct Summary {
    pub groups: usize,
    pub classes: usize,
    pub pairs: usize,
    pub triplets: usize,
    pub quadruplets: usize,
    /// class size -> count, sizes as decimal strings for JSON stability.
    pub by_size: std::collections::BTreeMap<usize, usize>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn record_class_size(&mut self, size: usize) {
        self.classes += 1;
        *self.by_size.entry(size).or_insert(0) += 1;
        match size {
            2 => self.pairs += 1,
            3 => self.triplets += 1,
            4 => self.quadruplets += 1,
            _ => {}
        }
    }
}
