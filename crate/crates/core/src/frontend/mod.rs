//! Concrete syntax of graph and query files, plus the output formats.
//!
//! A GTF file is a list of statements separated by `.`; a statement is either
//! a triple `s p o` or a single node. Query files hold `GRAPH ( pattern )`,
//! where patterns use `CONSTRUCT { … } WHERE { … }` blocks and the suffix
//! clauses `JOIN`, `BIND … AS`, `FILTER`, `CONSTRUCT` and `UNION`.

use std::fmt;

use thiserror::Error;

mod lexer;
mod parser;
mod serialize;

pub use parser::{
    parse_graph, parse_graph_in, parse_pattern_in, parse_query, parse_query_in, ParsedPattern,
    ParsedQuery,
};
pub use serialize::{serialize_graph, serialize_table, TableFormat, UnknownFormat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    /// 1-based.
    pub line: usize,
    /// 1-based.
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntactic,
    Validation,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical",
            ErrorKind::Syntactic => "syntax",
            ErrorKind::Validation => "validation",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {kind} error: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ErrorKind,
    pub message: String,
}
