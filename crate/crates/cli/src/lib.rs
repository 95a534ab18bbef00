//! The `gral` subcommands. Results go to `out` and diagnostics to `err`; the
//! return value is the process exit code.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gral::frontend::ParsedPattern;
use gral::golden::{run_golden, CheckKind, Corpus};
use gral::{
    eval_pattern_observed, parse_graph_in, parse_pattern_in, parse_query_in, run_query_observed,
    serialize_graph, serialize_table, FreshVars, Graph, MatchSet, ParseError, Pattern, SourceSpan,
    TableFormat,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gral",
    version,
    about = "Graph-to-graph queries over GTF graph files"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a query and print the result graph.
    Eval(RunConfig),
    /// Print the assignment table of a pattern's value.
    Matches(RunConfig),
    /// Parse and validate graph (.gtf) and query or pattern (.gral) files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run the built-in corpus of worked examples.
    Golden {
        /// Read the corpus from this directory instead of the built-in copy.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long = "graph")]
    pub graph_path: PathBuf,
    #[arg(long = "query")]
    pub query_path: PathBuf,
    /// Write the result here instead of standard output.
    #[arg(long = "out")]
    pub output_path: Option<PathBuf>,
    /// Table format: tsv, markdown or json.
    #[arg(long = "format", default_value = "markdown")]
    pub table_format: TableFormat,
    /// Print every subpattern's table to standard error as it is computed.
    #[arg(long)]
    pub trace: bool,
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Eval(cfg) => cmd_eval(cfg, out, err),
        Command::Matches(cfg) => cmd_matches(cfg, out, err),
        Command::Check { files } => cmd_check(files, out, err),
        Command::Golden { fixtures } => cmd_golden(fixtures.as_deref(), out, err),
    }
}

/// Early exit carrying an exit code; the message was already written.
struct Exit(i32);

fn read(path: &Path, err: &mut dyn Write) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        Exit(EXIT_IO)
    })
}

fn invalid(e: &ParseError, err: &mut dyn Write) -> Exit {
    let _ = writeln!(err, "{e}");
    Exit(EXIT_INVALID)
}

fn load_graph(path: &Path, err: &mut dyn Write) -> Result<Graph, Exit> {
    let text = read(path, err)?;
    parse_graph_in(&text, &path.display().to_string()).map_err(|e| invalid(&e, err))
}

/// Writes `text` plus a trailing newline; an empty result stays empty.
fn emit(cfg: &RunConfig, text: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    let body = if text.is_empty() {
        String::new()
    } else {
        format!("{text}\n")
    };
    let result = match &cfg.output_path {
        Some(p) => fs::write(p, &body).map_err(|e| (p.display().to_string(), e)),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| ("standard output".to_string(), e)),
    };
    result.map_err(|(target, e)| {
        let _ = writeln!(err, "error: cannot write {target}: {e}");
        Exit(EXIT_IO)
    })
}

/// Observer printing each subpattern's table, labelled by its source span.
fn tracer<'a>(
    spans: &'a [SourceSpan],
    format: TableFormat,
    err: &'a mut dyn Write,
) -> impl FnMut(usize, &Pattern, &MatchSet) + 'a {
    move |node, p, ms| {
        let _ = writeln!(
            err,
            "{} {} ({} rows)\n{}\n",
            spans[node],
            p.operator_name(),
            ms.len(),
            serialize_table(&ms.table(), format)
        );
    }
}

fn eval_failure(e: impl std::fmt::Display, err: &mut dyn Write) -> Exit {
    let _ = writeln!(err, "error: {e}");
    Exit(EXIT_INVALID)
}

pub fn cmd_eval(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    exit_code(eval(cfg, out, err))
}

fn exit_code(r: Result<(), Exit>) -> i32 {
    r.err().map_or(EXIT_OK, |Exit(c)| c)
}

fn eval(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    let g = load_graph(&cfg.graph_path, err)?;
    let text = read(&cfg.query_path, err)?;
    let q = parse_query_in(&text, &cfg.query_path.display().to_string())
        .map_err(|e| invalid(&e, err))?;
    let result = if cfg.trace {
        run_query_observed(&q.query, &g, &mut tracer(&q.spans, cfg.table_format, err))
    } else {
        run_query_observed(&q.query, &g, &mut |_: usize, _: &Pattern, _: &MatchSet| {})
    };
    let r = result.map_err(|e| eval_failure(e, err))?;
    emit(cfg, &serialize_graph(&r), out, err)
}

pub fn cmd_matches(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    exit_code(matches(cfg, out, err))
}

fn matches(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    let g = load_graph(&cfg.graph_path, err)?;
    let text = read(&cfg.query_path, err)?;
    let p = parse_pattern_in(&text, &cfg.query_path.display().to_string())
        .map_err(|e| invalid(&e, err))?;
    let mut fresh = FreshVars::new();
    let result = if cfg.trace {
        eval_pattern_observed(
            &p.pattern,
            &g,
            &mut fresh,
            &mut tracer(&p.spans, cfg.table_format, err),
        )
    } else {
        eval_pattern_observed(
            &p.pattern,
            &g,
            &mut fresh,
            &mut |_: usize, _: &Pattern, _: &MatchSet| {},
        )
    };
    let ms = result.map_err(|e| eval_failure(e, err))?;
    emit(
        cfg,
        &serialize_table(&ms.table(), cfg.table_format),
        out,
        err,
    )
}

/// A `.gral` file is a query when wrapped in `GRAPH ( … )`, a bare pattern
/// otherwise.
fn check_gral(text: &str, file: &str) -> Result<(), ParseError> {
    let ParsedPattern { wrapped, .. } = parse_pattern_in(text, file)?;
    if wrapped {
        parse_query_in(text, file)?;
    }
    Ok(())
}

pub fn cmd_check(files: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut code = EXIT_OK;
    for path in files {
        let name = path.display().to_string();
        let text = match read(path, err) {
            Ok(t) => t,
            Err(Exit(c)) => {
                code = code.max(c);
                continue;
            }
        };
        let result = match path.extension().and_then(|e| e.to_str()) {
            Some("gtf") => parse_graph_in(&text, &name).map(drop),
            Some("gral") => check_gral(&text, &name),
            _ => {
                let _ = writeln!(err, "{name}: unknown file type (expected .gtf or .gral)");
                code = code.max(EXIT_INVALID);
                continue;
            }
        };
        match result {
            Ok(()) => {
                let _ = writeln!(out, "{name}: ok");
            }
            Err(e) => {
                let _ = writeln!(err, "{e}");
                code = code.max(EXIT_INVALID);
            }
        }
    }
    code
}

fn corpus_from_dir(dir: &Path) -> io::Result<Corpus> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            let name = entry.file_name().to_string_lossy().into_owned();
            files.push((name, fs::read_to_string(entry.path())?));
        }
    }
    Ok(Corpus::from_files(files))
}

pub fn cmd_golden(fixtures: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let corpus = match fixtures {
        None => Corpus::embedded(),
        Some(dir) => match corpus_from_dir(dir) {
            Ok(c) => c,
            Err(e) => {
                let _ = writeln!(err, "error: cannot read fixtures in {}: {e}", dir.display());
                return EXIT_IO;
            }
        },
    };
    let report = run_golden(&corpus);
    if let Some(e) = &report.setup_error {
        let _ = writeln!(err, "error: {e}");
        return EXIT_MISMATCH;
    }
    for o in &report.outcomes {
        let _ = writeln!(out, "{}", o.to_string().lines().next().unwrap_or_default());
        if let Some(why) = &o.failure {
            let _ = writeln!(err, "{}: {why}", o.name);
        }
    }
    let mismatches = report.failures().count();
    let _ = writeln!(
        out,
        "golden: {} query checks, {} table checks, {mismatches} mismatches",
        report.count(CheckKind::Query),
        report.count(CheckKind::Table),
    );
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}
