//! A graph-to-graph query engine.
//!
//! Graphs may contain isolated nodes. A pattern evaluates to a set of matches
//! from a graph determined by the pattern into a graph containing the queried
//! one; a query `GRAPH (P)` returns the image of the template of `P` by those
//! matches.
//!
//! ```
//! use gral::{parse_graph, parse_query, run_query, serialize_graph};
//!
//! let g = parse_graph("a knows b . b knows c").unwrap();
//! let q = parse_query("GRAPH(CONSTRUCT { ?x reaches ?z } WHERE { ?x knows ?y . ?y knows ?z })").unwrap();
//! assert_eq!(serialize_graph(&run_query(&q, &g).unwrap()), "a reaches c .");
//! ```

pub mod algebra;
pub mod expr;
pub mod frontend;
pub mod golden;
pub mod graph;
pub mod label;
pub mod matching;
pub mod pattern;

pub use algebra::{
    assignment_table, bind, construct, extend, filter, join, merge, restrict, union, AlgebraError,
    AssignmentTable, ConstantFamily, FamilySupplier, FnFamily, FreshVars, Match, MatchSet,
};
pub use expr::{
    apply_aggregate, eval_expr, eval_group, AggOp, BinaryOp, Expr, ExprError, GroupExprs, UnaryOp,
    ValueFamily,
};
pub use frontend::{
    parse_graph, parse_graph_in, parse_pattern_in, parse_query, parse_query_in, serialize_graph,
    serialize_table, ErrorKind, ParseError, SourceSpan, TableFormat,
};
pub use graph::{Assignment, Graph, GraphError, Triple};
pub use label::{ConstValue, Label};
pub use matching::enumerate_matches;
pub use pattern::{
    eval_pattern, eval_pattern_observed, patterns_equivalent_bounded, run_query,
    run_query_observed, EvalError, Pattern, Query,
};
