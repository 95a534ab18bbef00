//! The built-in corpus of worked examples: the toy social network `g0.gtf`,
//! five queries with their expected result graphs, and a set of patterns with
//! their expected match tables.
//!
//! A file `name.gral` is checked as a query when `name.expected.gtf` exists
//! (graphs compared up to isomorphism) and as a pattern when
//! `name.expected.tsv` exists (tables compared as text).

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::FreshVars;
use crate::frontend::{
    parse_graph_in, parse_pattern_in, parse_query_in, serialize_table, TableFormat,
};
use crate::graph::Graph;
use crate::pattern::{eval_pattern, run_query};

pub const GRAPH_FILE: &str = "g0.gtf";

const EMBEDDED: &[(&str, &str)] = &[
    (
        "c4_inner.expected.tsv",
        include_str!("../fixtures/golden/c4_inner.expected.tsv"),
    ),
    (
        "c4_inner.gral",
        include_str!("../fixtures/golden/c4_inner.gral"),
    ),
    ("g0.gtf", include_str!("../fixtures/golden/g0.gtf")),
    (
        "m_pl.expected.tsv",
        include_str!("../fixtures/golden/m_pl.expected.tsv"),
    ),
    ("m_pl.gral", include_str!("../fixtures/golden/m_pl.gral")),
    (
        "m_pl_restricted.expected.tsv",
        include_str!("../fixtures/golden/m_pl_restricted.expected.tsv"),
    ),
    (
        "m_pl_restricted.gral",
        include_str!("../fixtures/golden/m_pl_restricted.gral"),
    ),
    (
        "m_prp.expected.tsv",
        include_str!("../fixtures/golden/m_prp.expected.tsv"),
    ),
    ("m_prp.gral", include_str!("../fixtures/golden/m_prp.gral")),
    (
        "m_ps.expected.tsv",
        include_str!("../fixtures/golden/m_ps.expected.tsv"),
    ),
    ("m_ps.gral", include_str!("../fixtures/golden/m_ps.gral")),
    (
        "p2.expected.tsv",
        include_str!("../fixtures/golden/p2.expected.tsv"),
    ),
    ("p2.gral", include_str!("../fixtures/golden/p2.gral")),
    (
        "p3.expected.tsv",
        include_str!("../fixtures/golden/p3.expected.tsv"),
    ),
    ("p3.gral", include_str!("../fixtures/golden/p3.gral")),
    (
        "p4_inner.expected.tsv",
        include_str!("../fixtures/golden/p4_inner.expected.tsv"),
    ),
    (
        "p4_inner.gral",
        include_str!("../fixtures/golden/p4_inner.gral"),
    ),
    (
        "q1.expected.gtf",
        include_str!("../fixtures/golden/q1.expected.gtf"),
    ),
    (
        "q1.expected.tsv",
        include_str!("../fixtures/golden/q1.expected.tsv"),
    ),
    ("q1.gral", include_str!("../fixtures/golden/q1.gral")),
    (
        "q2.expected.gtf",
        include_str!("../fixtures/golden/q2.expected.gtf"),
    ),
    (
        "q2.expected.tsv",
        include_str!("../fixtures/golden/q2.expected.tsv"),
    ),
    ("q2.gral", include_str!("../fixtures/golden/q2.gral")),
    (
        "q3.expected.gtf",
        include_str!("../fixtures/golden/q3.expected.gtf"),
    ),
    (
        "q3.expected.tsv",
        include_str!("../fixtures/golden/q3.expected.tsv"),
    ),
    ("q3.gral", include_str!("../fixtures/golden/q3.gral")),
    (
        "q4.expected.gtf",
        include_str!("../fixtures/golden/q4.expected.gtf"),
    ),
    (
        "q4.expected.tsv",
        include_str!("../fixtures/golden/q4.expected.tsv"),
    ),
    ("q4.gral", include_str!("../fixtures/golden/q4.gral")),
    (
        "q5.expected.gtf",
        include_str!("../fixtures/golden/q5.expected.gtf"),
    ),
    (
        "q5.expected.tsv",
        include_str!("../fixtures/golden/q5.expected.tsv"),
    ),
    ("q5.gral", include_str!("../fixtures/golden/q5.gral")),
    (
        "q_pl_join.expected.tsv",
        include_str!("../fixtures/golden/q_pl_join.expected.tsv"),
    ),
    (
        "q_pl_join.gral",
        include_str!("../fixtures/golden/q_pl_join.gral"),
    ),
    (
        "q_ps_concat.expected.tsv",
        include_str!("../fixtures/golden/q_ps_concat.expected.tsv"),
    ),
    (
        "q_ps_concat.gral",
        include_str!("../fixtures/golden/q_ps_concat.gral"),
    ),
];

#[derive(Clone, Debug, Default)]
pub struct Corpus {
    files: BTreeMap<String, String>,
}

impl Corpus {
    pub fn embedded() -> Self {
        Self::from_files(EMBEDDED.iter().map(|(n, t)| (n.to_string(), t.to_string())))
    }

    pub fn from_files(files: impl IntoIterator<Item = (String, String)>) -> Self {
        Corpus {
            files: files.into_iter().collect(),
        }
    }

    pub fn files(&self) -> &BTreeMap<String, String> {
        &self.files
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    /// Replaces or adds one file.
    pub fn set(&mut self, name: impl Into<String>, text: impl Into<String>) {
        self.files.insert(name.into(), text.into());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Query,
    Table,
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub kind: CheckKind,
    /// `None` when the check passed.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CheckKind::Query => "query",
            CheckKind::Table => "table",
        };
        match &self.failure {
            None => write!(f, "ok       {kind} {}", self.name),
            Some(why) => write!(f, "MISMATCH {kind} {}: {why}", self.name),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GoldenReport {
    pub outcomes: Vec<CheckOutcome>,
    /// Set when the corpus graph itself is missing or malformed.
    pub setup_error: Option<String>,
}

impl GoldenReport {
    pub fn passed(&self) -> bool {
        self.setup_error.is_none() && self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn count(&self, kind: CheckKind) -> usize {
        self.outcomes.iter().filter(|o| o.kind == kind).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

fn check_query(c: &Corpus, g: &Graph, file: &str, expected_file: &str) -> Result<(), String> {
    let q = parse_query_in(c.get(file).unwrap(), file).map_err(|e| e.to_string())?;
    let expected =
        parse_graph_in(c.get(expected_file).unwrap(), expected_file).map_err(|e| e.to_string())?;
    let got = run_query(&q.query, g).map_err(|e| e.to_string())?;
    if got.is_isomorphic_to(&expected) {
        Ok(())
    } else {
        Err(format!(
            "result is not isomorphic to {expected_file}:\n{}",
            crate::frontend::serialize_graph(&got)
        ))
    }
}

fn check_table(c: &Corpus, g: &Graph, file: &str, expected_file: &str) -> Result<(), String> {
    let p = parse_pattern_in(c.get(file).unwrap(), file).map_err(|e| e.to_string())?;
    let ms = eval_pattern(&p.pattern, g, &mut FreshVars::new()).map_err(|e| e.to_string())?;
    let got = serialize_table(&ms.table(), TableFormat::Tsv);
    let expected = c.get(expected_file).unwrap().trim_end();
    if got == expected {
        Ok(())
    } else {
        Err(format!("table differs from {expected_file}:\n{got}"))
    }
}

pub fn run_golden(c: &Corpus) -> GoldenReport {
    let graph = match c.get(GRAPH_FILE) {
        None => Err(format!("{GRAPH_FILE} is missing")),
        Some(text) => parse_graph_in(text, GRAPH_FILE).map_err(|e| e.to_string()),
    };
    let g = match graph {
        Ok(g) => g,
        Err(e) => {
            return GoldenReport {
                outcomes: Vec::new(),
                setup_error: Some(e),
            }
        }
    };
    let mut outcomes = Vec::new();
    for file in c.files.keys().filter(|f| f.ends_with(".gral")) {
        let stem = file.trim_end_matches(".gral");
        let gtf = format!("{stem}.expected.gtf");
        if c.files.contains_key(&gtf) {
            outcomes.push(CheckOutcome {
                name: stem.to_string(),
                kind: CheckKind::Query,
                failure: check_query(c, &g, file, &gtf).err(),
            });
        }
        let tsv = format!("{stem}.expected.tsv");
        if c.files.contains_key(&tsv) {
            outcomes.push(CheckOutcome {
                name: stem.to_string(),
                kind: CheckKind::Table,
                failure: check_table(c, &g, file, &tsv).err(),
            });
        }
    }
    GoldenReport {
        outcomes,
        setup_error: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_list_matches_directory() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/golden");
        let mut on_disk: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        on_disk.sort();
        let embedded: Vec<String> = EMBEDDED.iter().map(|(n, _)| n.to_string()).collect();
        assert_eq!(on_disk, embedded);
    }

    #[test]
    fn embedded_corpus_passes() {
        let r = run_golden(&Corpus::embedded());
        for o in &r.outcomes {
            assert!(o.passed(), "{o}");
        }
        assert!(r.passed());
        assert_eq!(r.count(CheckKind::Query), 5);
        assert!(r.count(CheckKind::Table) >= 8);
    }

    #[test]
    fn corrupted_expectation_is_reported() {
        let mut c = Corpus::embedded();
        c.set(
            "q3.expected.gtf",
            "auth1 nbOfLikes 1 . auth2 nbOfLikes 1 . auth3 nbOfLikes 4 .",
        );
        c.set("m_ps.expected.tsv", "?a\t?d\t?m\nauth1\tdate1\tmes1");
        let r = run_golden(&c);
        assert!(!r.passed());
        let bad: Vec<_> = r.failures().map(|o| (o.name.as_str(), o.kind)).collect();
        assert_eq!(
            bad,
            vec![("m_ps", CheckKind::Table), ("q3", CheckKind::Query)]
        );
    }

    #[test]
    fn missing_graph() {
        let r = run_golden(&Corpus::default());
        assert!(r.setup_error.is_some());
        assert!(!r.passed());
    }
}
