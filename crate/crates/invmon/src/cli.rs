//! Command-line front end. Data goes to the output stream (or `--out`
//! files); progress and diagnostics go to the error stream.
//!
//! Exit status: `0` for a definite answer or a written artifact, `2` when a
//! budget ran out or the answer is unknown, `1` on errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{gromov_delta, polygon_hyperbolic_check, strong_tree_check, GeometryError};
use crate::graphs::{export_dot, export_json, import_json, GraphIoError, Marks, VertexSet};
use crate::langtools::{
    build_pda, geodesic_automaton, pda_accepts, word_problem_with_progress, GeodesicError, Pda, PdaIoError,
    WordProblemAnswer,
};
use crate::sapling::{materialize, GrowError, Sapling, SaplingIoError, SaplingSearch, SearchOutcome};
use crate::stephen::{build_e_presentation, expand, munn_tree, EWordError};
use crate::words::{parse_word, InvWord, ParseError, Presentation};

#[derive(Parser, Debug)]
#[command(name = "invmon", version, about = "Word problems and Schützenberger graphs of inverse monoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Munn tree of a word, as graph JSON.
    Munn {
        word: String,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The approximation exp_n(MT(w)).
    Expand {
        #[arg(short = 'p', long)]
        presentation: PathBuf,
        #[arg(short = 'w', long)]
        word: String,
        #[arg(short = 'n', long)]
        steps: usize,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decide whether two words are equal.
    Decide {
        #[arg(short = 'p', long)]
        presentation: PathBuf,
        #[arg(short = 'u')]
        u: String,
        #[arg(short = 'v')]
        v: String,
        #[arg(long, default_value_t = 60)]
        budget: usize,
    },
    /// Search for a sapling of S(w).
    Sapling {
        #[arg(short = 'p', long)]
        presentation: PathBuf,
        #[arg(short = 'w', long)]
        word: String,
        #[arg(long, default_value_t = 40)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile a sapling into a pushdown automaton.
    Pda {
        #[arg(long)]
        sapling: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Membership of a word in a pushdown automaton's language.
    Accept {
        #[arg(long)]
        pda: PathBuf,
        #[arg(short = 'w', long)]
        word: String,
    },
    /// Geodesic automaton of S(w) from a materialised sapling.
    Geodesics {
        #[arg(short = 'p', long)]
        presentation: PathBuf,
        #[arg(short = 'w', long)]
        word: String,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 40)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four-point constant, and the polygon test when --delta is given.
    Hyperbolic {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        delta: Option<usize>,
    },
    /// Check a partition for a strong tree decomposition of width ≤ M.
    Treecheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        width: usize,
    },
    /// Presentation with the e-word relator for a group and subgroup.
    Eword {
        #[arg(short = 'p', long)]
        presentation: PathBuf,
        #[arg(long)]
        subgroup: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Presentation { path: PathBuf, source: ParseError },
    #[error("word {text:?}: {source}")]
    Word { text: String, source: ParseError },
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Grow(#[from] GrowError),
    #[error(transparent)]
    EWord(#[from] EWordError),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

/// Partition file: `{"blocks": [[v, …], …]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub blocks: Vec<Vec<usize>>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

/// Runs one command, writing data to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn presentation(path: &Path) -> Result<Presentation, CliError> {
    read(path)?.parse().map_err(|source| CliError::Presentation {
        path: path.to_path_buf(),
        source,
    })
}

fn word_in(p: &Presentation, text: &str) -> Result<InvWord, CliError> {
    p.word(text).map_err(|source| CliError::Word {
        text: text.into(),
        source,
    })
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn roots(start: usize, end: usize) -> Marks {
    let mut m = Marks::new();
    m.insert("start".into(), start.into());
    m.insert("end".into(), end.into());
    m
}

/// Writes `text` to `path`, or to the data stream when no path is given.
fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn emit_graph(
    out: &mut dyn Write,
    g: &crate::graphs::InvWordGraph,
    marks: &Marks,
    json: Option<&Path>,
    dot: Option<&Path>,
) -> Result<(), CliError> {
    if let Some(d) = dot {
        write_file(d, &export_dot(g))?;
    }
    if json.is_some() || dot.is_none() {
        emit(out, json, &export_json(g, marks))?;
    }
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Munn { word, dot, json } => {
            let w = parse_word(&word).map_err(|source| CliError::Word { text: word, source })?;
            let mt = munn_tree(&w);
            emit_graph(out, &mt.graph, &roots(mt.start, mt.end), json.as_deref(), dot.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Expand {
            presentation: pp,
            word,
            steps,
            dot,
            json,
        } => {
            let p = presentation(&pp)?;
            let w = word_in(&p, &word)?;
            let a = expand(&w, &p, steps);
            emit_graph(out, a.graph(), &roots(a.start(), a.end()), json.as_deref(), dot.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Decide {
            presentation: pp,
            u,
            v,
            budget,
        } => {
            let p = presentation(&pp)?;
            let (u, v) = (word_in(&p, &u)?, word_in(&p, &v)?);
            let answer = word_problem_with_progress(&u, &v, &p, budget, |m, l| {
                let _ = writeln!(err, "stage {m}, watching {l} candidates");
            });
            let (text, code) = match answer {
                WordProblemAnswer::Equal => ("equal", EXIT_OK),
                WordProblemAnswer::Unequal => ("unequal", EXIT_OK),
                WordProblemAnswer::Exhausted => ("exhausted", EXIT_UNKNOWN),
            };
            writeln!(out, "{text}")?;
            Ok(code)
        }
        Command::Sapling {
            presentation: pp,
            word,
            budget,
            out: path,
        } => {
            let p = presentation(&pp)?;
            let w = word_in(&p, &word)?;
            match search(&w, &p, budget, err) {
                SearchOutcome::Sapling(s) => {
                    writeln!(
                        err,
                        "sapling: {} vertices, {} pairs, k = {}",
                        s.graph().vertex_count(),
                        s.pairs.len(),
                        s.k
                    )?;
                    emit(out, path.as_deref(), &s.to_json())?;
                    Ok(EXIT_OK)
                }
                SearchOutcome::Finite(a) => {
                    writeln!(err, "the Schützenberger graph is finite ({} vertices)", a.graph().vertex_count())?;
                    emit(out, path.as_deref(), &export_json(a.graph(), &roots(a.start(), a.end())))?;
                    Ok(EXIT_OK)
                }
                SearchOutcome::Exhausted { m, list_len } => {
                    writeln!(err, "budget exhausted at stage {m} with {list_len} candidates")?;
                    writeln!(out, "exhausted")?;
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::Pda { sapling, out: path } => {
            let s = Sapling::from_json(&read(&sapling)?).map_err(|e: SaplingIoError| file_error(&sapling, e))?;
            emit(out, path.as_deref(), &build_pda(&s).to_json())?;
            Ok(EXIT_OK)
        }
        Command::Accept { pda, word } => {
            let p = Pda::from_json(&read(&pda)?).map_err(|e: PdaIoError| file_error(&pda, e))?;
            let w = parse_word(&word).map_err(|source| CliError::Word { text: word, source })?;
            writeln!(out, "{}", pda_accepts(&p, &w))?;
            Ok(EXIT_OK)
        }
        Command::Geodesics {
            presentation: pp,
            word,
            delta,
            depth,
            budget,
            out: path,
        } => {
            let p = presentation(&pp)?;
            let w = word_in(&p, &word)?;
            let (g, x0) = match search(&w, &p, budget, err) {
                SearchOutcome::Sapling(s) => {
                    let m = materialize(&s, depth)?;
                    (m.graph().clone(), m.x0())
                }
                SearchOutcome::Finite(a) => (a.graph().clone(), a.start()),
                SearchOutcome::Exhausted { .. } => {
                    writeln!(out, "exhausted")?;
                    return Ok(EXIT_UNKNOWN);
                }
            };
            let f = geodesic_automaton(&g, x0, delta, &p)?;
            emit(out, path.as_deref(), &f.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Hyperbolic { graph, delta } => {
            let (g, marks) = import_json(&read(&graph)?).map_err(|e: GraphIoError| file_error(&graph, e))?;
            let d: Rational64 = gromov_delta(&g)?;
            writeln!(out, "delta = {d}")?;
            if let Some(delta) = delta {
                let x0 = marks.get("start").and_then(|v| v.as_u64()).unwrap_or(0) as usize;
                if x0 >= g.vertex_count() {
                    return Err(file_error(&graph, format!("start vertex {x0} out of range")));
                }
                writeln!(out, "polygon check (delta {delta}): {}", polygon_hyperbolic_check(&g, x0, delta))?;
            }
            Ok(EXIT_OK)
        }
        Command::Treecheck {
            graph,
            partition,
            width,
        } => {
            let (g, _) = import_json(&read(&graph)?).map_err(|e| file_error(&graph, e))?;
            let doc: PartitionDoc =
                serde_json::from_str(&read(&partition)?).map_err(|e| file_error(&partition, e))?;
            let blocks: Vec<VertexSet> = doc.blocks.into_iter().map(|b| b.into_iter().collect()).collect();
            let ok = strong_tree_check(&g, &blocks, width)?;
            writeln!(out, "{ok}")?;
            Ok(EXIT_OK)
        }
        Command::Eword {
            presentation: pp,
            subgroup,
        } => {
            let p = presentation(&pp)?;
            let relators: Vec<InvWord> = p
                .relations
                .iter()
                .map(|(r, s)| r.concat(&s.inverse()))
                .collect();
            let words: Vec<InvWord> = subgroup
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| word_in(&p, s))
                .collect::<Result<_, _>>()?;
            let e = build_e_presentation(&p.alphabet, &relators, &words)?;
            write!(out, "{e}")?;
            Ok(EXIT_OK)
        }
    }
}

fn search(w: &InvWord, p: &Presentation, budget: usize, err: &mut dyn Write) -> SearchOutcome {
    let mut s = SaplingSearch::new(w, p);
    for _ in 0..budget {
        if let Some(found) = s.step() {
            return found;
        }
        let _ = writeln!(err, "stage {}, watching {} candidates", s.stage(), s.list_len());
    }
    s.exhausted()
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERROR,
            }
        }
    }
}
