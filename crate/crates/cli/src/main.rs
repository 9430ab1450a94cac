//! `cmc`: command-line pipeline for finding and checking cospectral
//! multiple coalescences.
//!
//! The three-stage pipeline is `charpolys` (graph6 file to charpoly
//! sidecar), `group` (sort so cospectral graphs are adjacent), and `search`
//! (exhaustive CMC search per cospectral group). `verify` checks one pair
//! of selections directly and `family` generates a constructed path pair.
//!
//! Exit codes: 0 success/verified, 1 verification failed, 2 usage error,
//! 3 I/O or parse error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmc_core::cospectral::{hosoya_vector, CoalescenceSpec, HosoyaVector};
use cmc_core::families::{verify_pair, PathFamilyParams};
use cmc_core::graph::{graph6_decode, Graph};
use cmc_core::poly::Signature;
use cmc_core::report::{charpolys_file, sort_sidecar_file, Summary};
use cmc_core::search::{search_file, SearchError, SearchOptions};

#[derive(Parser)]
#[command(
    name = "cmc",
    version,
    about = "Cospectral multiple coalescence toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Append a characteristic-polynomial sidecar line for every graph in a
    /// graph6 file.
    Charpolys {
        /// Input file, one graph6 string per line.
        input: PathBuf,
        /// Output sidecar path; defaults to INPUT.charpoly.g6.
        output: Option<PathBuf>,
    },
    /// Sort a sidecar file so cospectral graphs occupy adjacent lines.
    Group {
        /// Sidecar file produced by `charpolys`.
        input: PathBuf,
        /// Output path; defaults to INPUT.sorted.
        output: Option<PathBuf>,
    },
    /// Exhaustively search a sorted sidecar file for cospectral multiple
    /// coalescences, writing DOT and JSON reports per match class.
    Search {
        /// Sorted sidecar file produced by `group`.
        input: PathBuf,
        /// Maximum signature entry (copies attached at a single vertex).
        mse: u32,
        /// Bound on selection size; defaults to the graph order.
        #[arg(long)]
        max_k: Option<usize>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// Treat selections related by a known graph symmetry as one
        /// selection when flagging removal-cospectral collapses.
        #[arg(long)]
        dedup_automorphisms: bool,
        /// Report directory; defaults to INPUT.classes.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print the Hosoya vectors of two selections on one host graph and
    /// whether they are equal (equal vectors give cospectral coalescences
    /// for every attached rooted graph).
    Verify {
        /// Host graph: a graph6 string or P<n> for the n-vertex path.
        graph: String,
        /// First selection, e.g. 0,2,3,6 (parentheses allowed).
        selection1: String,
        /// Second selection, positionally matched to the first.
        selection2: String,
        /// Copy counts per position, e.g. 1,1,1,1.
        signature: String,
    },
    /// Generate one constructed path pair from parameters k,m,d,a1:...:ap
    /// and verify it.
    Family {
        /// Parameter string, e.g. 3,1,3,0 (offsets optional: 3,1,2).
        params: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn io_at(path: &Path, e: impl ToString) -> CliError {
        CliError {
            code: 3,
            message: format!("{}: {}", path.display(), e.to_string()),
        }
    }
}

const VERIFICATION_FAILED: u8 = 1;

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Charpolys { input, output } => {
            let output = output.unwrap_or_else(|| suffixed(&input, ".charpoly.g6"));
            charpolys_file(&input, &output).map_err(|e| CliError::io_at(&input, e))?;
            println!("{}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Group { input, output } => {
            let output = output.unwrap_or_else(|| suffixed(&input, ".sorted"));
            sort_sidecar_file(&input, &output).map_err(|e| CliError::io_at(&input, e))?;
            println!("{}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Search {
            input,
            mse,
            max_k,
            jobs,
            dedup_automorphisms,
            out_dir,
        } => {
            let out_dir = out_dir.unwrap_or_else(|| suffixed(&input, ".classes"));
            let options = SearchOptions {
                mse,
                max_k,
                jobs,
                dedup_automorphisms,
            };
            let report = search_file(&input, &out_dir, &options).map_err(|e| match e {
                SearchError::ZeroMse | SearchError::SearchTooLarge { .. } => {
                    CliError::usage(e.to_string())
                }
                other => CliError::io_at(&input, other),
            })?;
            print!("{}", summary_text(&report.summary));
            for w in &report.summary.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!("reports in {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            graph,
            selection1,
            selection2,
            signature,
        } => {
            let g = parse_graph_arg(&graph)?;
            let sel1 = parse_selection(&selection1)?;
            let sel2 = parse_selection(&selection2)?;
            let sig = parse_signature(&signature)?;
            let spec = |sel: Vec<usize>| {
                CoalescenceSpec::new(g.clone(), sel, sig.clone())
                    .map_err(|e| CliError::usage(e.to_string()))
            };
            let (spec1, spec2) = (spec(sel1)?, spec(sel2)?);
            let (v1, v2) = (hosoya_vector(&spec1), hosoya_vector(&spec2));
            print!("{}", vector_text(&graph, &spec1, &v1));
            print!("{}", vector_text(&graph, &spec2, &v2));
            if v1 == v2 {
                println!("EQUAL");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("NOT EQUAL");
                Ok(ExitCode::from(VERIFICATION_FAILED))
            }
        }
        Command::Family { params } => {
            let params: PathFamilyParams = params
                .parse()
                .map_err(|e: cmc_core::families::FamilyError| CliError::usage(e.to_string()))?;
            let (spec1, spec2) = params.generate_pair();
            let verified =
                verify_pair(&spec1, &spec2).map_err(|e| CliError::usage(e.to_string()))?;
            println!(
                "P_{}: {} | {} {}",
                params.n(),
                tuple(spec1.vertices()),
                tuple(spec2.vertices()),
                if verified { "VERIFIED" } else { "NOT VERIFIED" }
            );
            Ok(if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(VERIFICATION_FAILED)
            })
        }
    }
}

/// INPUT -> INPUT<suffix> (appended to the full file name).
fn suffixed(input: &Path, suffix: &str) -> PathBuf {
    let mut name = input.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

/// Accepts P<n> (path on n vertices; digits are never valid graph6 payload,
/// so the forms cannot collide) or a graph6 string.
fn parse_graph_arg(s: &str) -> Result<Graph, CliError> {
    let path_order = s
        .strip_prefix(['P', 'p'])
        .and_then(|rest| rest.parse::<usize>().ok());
    if let Some(n) = path_order {
        return Graph::path(n).map_err(|e| CliError::usage(e.to_string()));
    }
    graph6_decode(s)
        .map_err(|e| CliError::usage(format!("graph must be a graph6 string or P<n>: {e}")))
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
    trimmed
        .split(',')
        .map(|f| {
            f.trim().parse::<usize>().map_err(|_| {
                CliError::usage(format!(
                    "{what} must be comma-separated integers, got {s:?}"
                ))
            })
        })
        .collect()
}

fn parse_selection(s: &str) -> Result<Vec<usize>, CliError> {
    parse_usize_list(s, "selection")
}

fn parse_signature(s: &str) -> Result<Signature, CliError> {
    let entries = parse_usize_list(s, "signature")?
        .into_iter()
        .map(|v| u32::try_from(v).map_err(|_| CliError::usage("signature entry too large")))
        .collect::<Result<Vec<u32>, CliError>>()?;
    Signature::new(entries).map_err(|e| CliError::usage(e.to_string()))
}

fn tuple(values: &[usize]) -> String {
    let joined = values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    format!("({joined})")
}

fn vector_text(graph_arg: &str, spec: &CoalescenceSpec, v: &HosoyaVector) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} selection {} signature {}",
        graph_arg,
        tuple(spec.vertices()),
        tuple(
            &spec
                .signature()
                .entries()
                .iter()
                .map(|&a| a as usize)
                .collect::<Vec<_>>()
        ),
    );
    for (l, p) in v.components().iter().enumerate() {
        let _ = writeln!(out, "  component {l}: {p}");
    }
    out
}

fn summary_text(summary: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "groups: {}", summary.groups);
    let _ = writeln!(out, "classes: {}", summary.classes);
    let _ = writeln!(out, "pairs: {}", summary.pairs);
    let _ = writeln!(out, "triplets: {}", summary.triplets);
    let _ = writeln!(out, "quadruplets: {}", summary.quadruplets);
    for (&size, &count) in summary.by_size.range(5..) {
        let _ = writeln!(out, "size {size}: {count}");
    }
    out
}
