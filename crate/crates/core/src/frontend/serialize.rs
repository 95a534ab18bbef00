use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::json;
use thiserror::Error;

use crate::algebra::AssignmentTable;
use crate::graph::{Graph, Triple};
use crate::label::Label;

/// Canonical GTF text: triples in textual order, then isolated nodes, one
/// statement per line. No trailing newline.
pub fn serialize_graph(g: &Graph) -> String {
    let mut triples: Vec<&Triple> = g.triples().iter().collect();
    triples.sort_by(|a, b| {
        a.subject
            .canonical_cmp(&b.subject)
            .then_with(|| a.predicate.canonical_cmp(&b.predicate))
            .then_with(|| a.object.canonical_cmp(&b.object))
    });
    let mut isolated: Vec<&Label> = g.isolated_nodes().into_iter().collect();
    isolated.sort_by(|a, b| a.canonical_cmp(b));
    let lines: Vec<String> = triples
        .iter()
        .map(|t| format!("{t} ."))
        .chain(isolated.iter().map(|n| format!("{n} .")))
        .collect();
    lines.join("\n")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TableFormat {
    Tsv,
    #[default]
    Markdown,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown table format '{0}' (expected tsv, markdown or json)")]
pub struct UnknownFormat(pub String);

impl FromStr for TableFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(TableFormat::Tsv),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "json" => Ok(TableFormat::Json),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

/// Renders a table with `?`-prefixed column headers and labels in GTF
/// notation. No trailing newline.
pub fn serialize_table(t: &AssignmentTable, format: TableFormat) -> String {
    let header: Vec<String> = t.columns.iter().map(|c| format!("?{c}")).collect();
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| r.iter().map(Label::to_string).collect())
        .collect();
    match format {
        TableFormat::Tsv => std::iter::once(header.join("\t"))
            .chain(rows.iter().map(|r| r.join("\t")))
            .collect::<Vec<_>>()
            .join("\n"),
        TableFormat::Markdown => {
            let mut out = String::new();
            let line = |cells: &[String]| -> String {
                if cells.is_empty() {
                    "| |".to_string()
                } else {
                    format!("| {} |", cells.join(" | "))
                }
            };
            out.push_str(&line(&header));
            out.push('\n');
            let rule: Vec<String> = vec!["---".to_string(); header.len().max(1)];
            write!(out, "|{}|", rule.join("|")).unwrap();
            for r in &rows {
                out.push('\n');
                out.push_str(&line(r));
            }
            out
        }
        TableFormat::Json => json!({ "columns": header, "rows": rows }).to_string(),
    }
}
