//! Random instance generators and independent oracles shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gral::{
    Assignment, BinaryOp, ConstValue, Expr, Graph, Label, Match, MatchSet, Pattern, Triple, UnaryOp,
};
use proptest::prelude::*;

pub const VARS: [&str; 4] = ["x", "y", "z", "w"];
pub const SYMS: [&str; 4] = ["a", "b", "c", "d"];
pub const PREDS: [&str; 2] = ["p", "q"];

pub fn tri(s: Label, p: Label, o: Label) -> Triple {
    Triple::new(s, p, o)
}

fn data_node() -> impl Strategy<Value = Label> {
    prop_oneof![
        4 => prop::sample::select(&SYMS[..]).prop_map(Label::sym),
        1 => (1i64..=2).prop_map(Label::int),
    ]
}

/// Constant-only graphs with at most 8 triples and a few isolated nodes.
pub fn data_graph() -> impl Strategy<Value = Graph> {
    let triple = (
        data_node(),
        prop::sample::select(&PREDS[..]).prop_map(Label::sym),
        data_node(),
    )
        .prop_map(|(s, p, o)| tri(s, p, o));
    (
        prop::collection::vec(triple, 0..=8),
        prop::collection::vec(data_node(), 0..=2),
    )
        .prop_map(|(ts, ns)| Graph::from_parts(ns, ts))
}

fn pattern_label(vars: &'static [&'static str]) -> impl Strategy<Value = Label> {
    prop_oneof![
        3 => prop::sample::select(vars).prop_map(Label::var),
        1 => data_node(),
    ]
}

fn pattern_pred(vars: &'static [&'static str]) -> impl Strategy<Value = Label> {
    prop_oneof![
        3 => prop::sample::select(&PREDS[..]).prop_map(Label::sym),
        1 => prop::sample::select(vars).prop_map(Label::var),
    ]
}

/// Basic patterns over the given variables: up to 3 triples and 2 isolated
/// nodes.
pub fn basic_graph_over(vars: &'static [&'static str]) -> impl Strategy<Value = Graph> {
    let triple = (pattern_label(vars), pattern_pred(vars), pattern_label(vars))
        .prop_map(|(s, p, o)| tri(s, p, o));
    (
        prop::collection::vec(triple, 0..=3),
        prop::collection::vec(pattern_label(vars), 0..=2),
    )
        .prop_map(|(ts, ns)| Graph::from_parts(ns, ts))
}

pub fn basic_graph() -> impl Strategy<Value = Graph> {
    basic_graph_over(&VARS)
}

/// Every assignment of the pattern's variables to labels of `g` whose image
/// is a subgraph of `g`.
pub fn brute_force_matches(x: &Graph, g: &Graph) -> MatchSet {
    let vars: Vec<String> = x.vars().into_iter().map(str::to_string).collect();
    let targets: Vec<Label> = g.labels().into_iter().cloned().collect();
    let mut found = Vec::new();
    let mut idx = vec![0usize; vars.len()];
    if !vars.is_empty() && targets.is_empty() {
        return MatchSet::new(x.clone(), g.clone(), []).unwrap();
    }
    loop {
        let a: Assignment = vars
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.clone(), targets[i].clone()))
            .collect();
        let img = |l: &Label| match l {
            Label::Var(v) => a[v].clone(),
            c => c.clone(),
        };
        let nodes_ok = x.nodes().iter().all(|n| g.nodes().contains(&img(n)));
        let triples_ok = x.triples().iter().all(|t| {
            g.triples()
                .contains(&tri(img(&t.subject), img(&t.predicate), img(&t.object)))
        });
        if nodes_ok && triples_ok {
            found.push(Match::new(a));
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return MatchSet::new(x.clone(), g.clone(), found).unwrap();
            }
            idx[k] += 1;
            if idx[k] < targets.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Random expressions over the variables in `scope`.
pub fn expr_over(scope: Vec<String>) -> BoxedStrategy<Expr> {
    let leaf = if scope.is_empty() {
        prop_oneof![(0i64..4).prop_map(Expr::int), Just(Expr::sym("a"))].boxed()
    } else {
        prop_oneof![
            (0i64..4).prop_map(Expr::int),
            Just(Expr::sym("a")),
            prop::sample::select(scope).prop_map(Expr::var),
        ]
        .boxed()
    };
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::unary(UnaryOp::Not, e)),
            (
                prop::sample::select(vec![
                    BinaryOp::Add,
                    BinaryOp::Eq,
                    BinaryOp::Gt,
                    BinaryOp::And,
                    BinaryOp::Or,
                ]),
                inner.clone(),
                inner,
            )
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        ]
    })
    .boxed()
}

/// Valid patterns built from every operator. UNION operands share one
/// template.
pub fn pattern() -> BoxedStrategy<Pattern> {
    let leaf = basic_graph().prop_map(Pattern::Basic).boxed();
    leaf.prop_recursive(3, 12, 2, |inner| {
        let templated = (inner.clone(), basic_graph_over(&["x", "y", "v"]))
            .prop_map(|(p, r)| p.construct(r))
            .boxed();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.join(b)),
            inner.clone().prop_flat_map(|p| {
                let scope: Vec<String> = p.in_scope_vars().into_iter().collect();
                let fresh = ["b1", "b2"]
                    .into_iter()
                    .find(|v| !scope.iter().any(|s| s == v))
                    .unwrap_or("b3");
                expr_over(scope).prop_map(move |e| p.clone().bind(e, fresh))
            }),
            inner.clone().prop_flat_map(|p| {
                let scope: Vec<String> = p.in_scope_vars().into_iter().collect();
                expr_over(scope).prop_map(move |e| p.clone().filter(e))
            }),
            templated.clone(),
            (templated, inner).prop_map(|(a, b)| {
                let r = a.template().unwrap().clone();
                a.union(b.construct(r))
            }),
        ]
    })
    .boxed()
}

/// Variables fixed by each match of `ms`, as plain maps, for order-free
/// comparisons.
pub fn rows(ms: &MatchSet) -> Vec<BTreeMap<String, Label>> {
    ms.iter().map(|m| m.assignment().clone()).collect()
}

pub fn sym(s: &str) -> Label {
    Label::sym(s)
}

pub fn str_val(s: &str) -> ConstValue {
    ConstValue::str(s)
}
pub mod props;

/// Labels of every kind that has a source syntax.
pub fn any_label() -> impl Strategy<Value = Label> {
    let symbol = "[a-zA-Z][a-zA-Z0-9_]{0,5}"
        .prop_filter("booleans are not symbols", |s| s != "true" && s != "false")
        .prop_map(Label::sym);
    prop_oneof![
        3 => symbol,
        1 => prop::sample::select(vec!["CONSTRUCT", "WHERE", "GRAPH", "COUNT", "AS"]).prop_map(Label::sym),
        2 => any::<i64>().prop_map(Label::int),
        2 => any::<f64>()
            .prop_filter("finite", |f| f.is_finite())
            .prop_map(|f| Label::Const(ConstValue::Float(f))),
        2 => "[ -~\\t\\né]{0,6}".prop_map(|s| Label::Const(ConstValue::str(s))),
        1 => any::<bool>().prop_map(|b| Label::Const(ConstValue::Bool(b))),
        2 => "[a-z][a-z0-9_]{0,3}".prop_map(Label::var),
    ]
}

pub fn any_graph() -> impl Strategy<Value = Graph> {
    let triple = (any_label(), any_label(), any_label()).prop_map(|(s, p, o)| tri(s, p, o));
    (
        prop::collection::vec(triple, 0..=6),
        prop::collection::vec(any_label(), 0..=3),
    )
        .prop_map(|(ts, ns)| Graph::from_parts(ns, ts))
}

pub type RowSet = std::collections::BTreeSet<Vec<(String, Label)>>;

/// Rows of symbols as printed, column by column, independent of column order.
pub fn printed_table(cols: &[&str], printed: &[&[&str]]) -> RowSet {
    printed
        .iter()
        .map(|r| {
            let mut row: Vec<_> = cols
                .iter()
                .zip(r.iter())
                .map(|(c, v)| (c.to_string(), sym(v)))
                .collect();
            row.sort();
            row
        })
        .collect()
}

pub fn row_set(ms: &MatchSet) -> RowSet {
    rows(ms)
        .into_iter()
        .map(|r| r.into_iter().collect())
        .collect()
}
