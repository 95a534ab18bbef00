//! Property checkers shared by the proptest suites and the acceptance report.

use std::collections::{BTreeMap, BTreeSet};

use gral::expr::{apply_binary, apply_unary};
use gral::{
    bind, construct, enumerate_matches, eval_expr, eval_pattern, extend, filter, join, merge,
    parse_graph, restrict, run_query, serialize_graph, union, AggOp, BinaryOp, ConstValue, Expr,
    FnFamily, FreshVars, Graph, Label, Match, MatchSet, Pattern, Query, UnaryOp,
};
use proptest::prelude::*;

use super::brute_force_matches;

type Check = Result<(), TestCaseError>;

/// Drops every other triple and isolated node of `x`.
fn sub_pattern(x: &Graph) -> Graph {
    let ts: Vec<_> = x.triples().iter().step_by(2).cloned().collect();
    let ns: Vec<_> = x.isolated_nodes().into_iter().step_by(2).cloned().collect();
    Graph::from_parts(ns, ts)
}

/// The eight cardinality bounds, two of them as equalities.
pub fn cardinality(
    x: &Graph,
    y: &Graph,
    g: &Graph,
    g2: &Graph,
    r: &Graph,
    flags: &[bool],
) -> Check {
    let ms = enumerate_matches(x, g);
    let other = enumerate_matches(y, g);
    let flag = |i: usize| flags.get(i % flags.len().max(1)).copied().unwrap_or(true);

    // Merge with a family that varies with the match.
    let mut sizes = 0usize;
    let mut family = FnFamily::new(y.clone(), |i, _m: &Match| {
        let picked: Vec<Match> = other
            .iter()
            .enumerate()
            .filter(|(j, _)| flag(i + j))
            .map(|(_, p)| p.clone())
            .collect();
        sizes += picked.len();
        MatchSet::new(y.clone(), g.clone(), picked).unwrap()
    });
    let merged = merge(&ms, &mut family).unwrap();
    merged.validate().unwrap();
    prop_assert!(merged.len() <= sizes);

    let sub = sub_pattern(x);
    let rs = restrict(&ms, &sub, ms.range()).unwrap();
    rs.validate().unwrap();
    prop_assert!(rs.len() <= ms.len());

    let bigger = g.union(g2);
    let ex = extend(&ms, &bigger).unwrap();
    prop_assert_eq!(ex.len(), ms.len());
    prop_assert_eq!(ex.range(), &bigger);

    let j = join(&ms, &other);
    j.validate().unwrap();
    prop_assert!(j.len() <= ms.len() * other.len());

    let values: Vec<ConstValue> = (0..ms.len())
        .map(|i| ConstValue::Int(i as i64 % 3))
        .collect();
    let fresh_var = "fresh_bound";
    prop_assert!(!x.has_var(fresh_var));
    let b = bind(&ms, &values, fresh_var).unwrap();
    b.validate().unwrap();
    prop_assert_eq!(b.len(), ms.len());

    let bools: Vec<ConstValue> = (0..ms.len()).map(|i| ConstValue::Bool(flag(i))).collect();
    let f = filter(&ms, &bools).unwrap();
    f.validate().unwrap();
    prop_assert!(f.len() <= ms.len());

    let c = construct(&ms, r, &mut FreshVars::new());
    c.validate().unwrap();
    prop_assert!(c.len() <= ms.len());

    let ms2 = enumerate_matches(x, g2);
    let u = union(&ms, &ms2).unwrap();
    u.validate().unwrap();
    prop_assert!(u.len() <= ms.len() + ms2.len());
    Ok(())
}

pub fn oracle(x: &Graph, g: &Graph) -> Check {
    let fast = enumerate_matches(x, g);
    let slow = brute_force_matches(x, g);
    prop_assert_eq!(fast, slow);
    Ok(())
}

pub fn commutativity(x: &Graph, y: &Graph, g: &Graph, g2: &Graph) -> Check {
    let a = enumerate_matches(x, g);
    let b = enumerate_matches(y, g);
    prop_assert_eq!(join(&a, &b), join(&b, &a));
    let a2 = enumerate_matches(x, g2);
    prop_assert_eq!(union(&a, &a2).unwrap(), union(&a2, &a).unwrap());
    Ok(())
}

pub fn basic_union_law(x: &Graph, y: &Graph, g: &Graph) -> Check {
    let mut fresh = FreshVars::new();
    let whole = eval_pattern(&Pattern::Basic(x.union(y)), g, &mut fresh).unwrap();
    let ab = Pattern::Basic(x.clone()).join(Pattern::Basic(y.clone()));
    let ba = Pattern::Basic(y.clone()).join(Pattern::Basic(x.clone()));
    prop_assert_eq!(&whole, &eval_pattern(&ab, g, &mut fresh).unwrap());
    prop_assert_eq!(&whole, &eval_pattern(&ba, g, &mut fresh).unwrap());
    Ok(())
}

/// Domain variables equal the in-scope variables and the range contains the
/// queried graph.
pub fn in_scope(p: &Pattern, g: &Graph) -> Check {
    let ms = eval_pattern(p, g, &mut FreshVars::new()).unwrap();
    let domain: BTreeSet<String> = ms.domain().vars().into_iter().map(str::to_string).collect();
    prop_assert_eq!(domain, p.in_scope_vars());
    prop_assert!(g.is_subgraph_of(ms.range()));
    ms.validate().unwrap();
    Ok(())
}

pub fn round_trip(g: &Graph) -> Check {
    let text = serialize_graph(g);
    let back = parse_graph(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&back, g, "{}", text);
    Ok(())
}

pub fn rename(g: &Graph, suffix: &str) -> Graph {
    let f: BTreeMap<String, String> = g
        .vars()
        .into_iter()
        .map(|v| (v.to_string(), format!("{v}{suffix}")))
        .collect();
    g.rename_vars(&f)
}

pub fn isomorphism(a: &Graph, b: &Graph) -> Check {
    prop_assert!(a.is_isomorphic_to(a));
    prop_assert_eq!(a.is_isomorphic_to(b), b.is_isomorphic_to(a));
    let ra = rename(a, "_r");
    prop_assert!(a.is_isomorphic_to(&ra));
    prop_assert_eq!(ra.is_isomorphic_to(b), a.is_isomorphic_to(b));
    // The identity on variables leaves a graph unchanged.
    let id: gral::Assignment = a
        .vars()
        .into_iter()
        .map(|v| (v.to_string(), Label::var(v)))
        .collect();
    prop_assert_eq!(&a.image(&id).unwrap(), a);
    Ok(())
}

pub fn bind_then_restrict(x: &Graph, g: &Graph) -> Check {
    let ms = enumerate_matches(x, g);
    let values: Vec<ConstValue> = (0..ms.len()).map(|i| ConstValue::Int(i as i64)).collect();
    let b = bind(&ms, &values, "fresh_bound").unwrap();
    let back = restrict(&b, x, ms.range()).unwrap();
    prop_assert_eq!(back, ms);
    Ok(())
}

/// Filter keeps exactly the matches whose value is `true`.
pub fn filter_oracle(x: &Graph, g: &Graph, e: &Expr) -> Check {
    let ms = enumerate_matches(x, g);
    let values = eval_expr(&ms, e).unwrap();
    let kept: BTreeSet<&Match> = ms
        .iter()
        .zip(values.values())
        .filter(|(_, v)| **v == ConstValue::Bool(true))
        .map(|(m, _)| m)
        .collect();
    let f = filter(&ms, values.values()).unwrap();
    prop_assert_eq!(f.domain(), ms.domain());
    prop_assert_eq!(f.range(), ms.range());
    prop_assert_eq!(f.iter().collect::<BTreeSet<_>>(), kept);
    Ok(())
}

/// On the shared variables, constructed matches are exactly the input ones.
pub fn construct_restriction(x: &Graph, g: &Graph, r: &Graph) -> Check {
    let ms = enumerate_matches(x, g);
    let c = construct(&ms, r, &mut FreshVars::new());
    let shared: Vec<&str> = r.vars().into_iter().filter(|v| x.has_var(v)).collect();
    let got: BTreeSet<Match> = c
        .iter()
        .map(|m| m.restrict_to(shared.iter().copied()))
        .collect();
    let want: BTreeSet<Match> = ms
        .iter()
        .map(|m| m.restrict_to(shared.iter().copied()))
        .collect();
    prop_assert_eq!(got, want);
    // Unshared template variables get pairwise distinct fresh values.
    let unshared: Vec<&str> = r.vars().into_iter().filter(|v| !x.has_var(v)).collect();
    let mut seen = BTreeSet::new();
    for m in c.iter() {
        for v in &unshared {
            let val = m.get(v).unwrap();
            prop_assert!(matches!(val, Label::Var(n) if n.starts_with('_')));
            prop_assert!(seen.insert(val.clone()));
        }
    }
    Ok(())
}

/// Values of an aggregate-free expression do not depend on the other
/// matches of the set.
pub fn pointwise(x: &Graph, g: &Graph, e: &Expr, keep: &[bool]) -> Check {
    let ms = enumerate_matches(x, g);
    let all = eval_expr(&ms, e).unwrap();
    let picked: Vec<(Match, ConstValue)> = ms
        .iter()
        .cloned()
        .zip(all.values().iter().cloned())
        .enumerate()
        .filter(|(i, _)| keep.get(i % keep.len().max(1)).copied().unwrap_or(true))
        .map(|(_, p)| p)
        .collect();
    let sub = MatchSet::new(
        ms.domain().clone(),
        ms.range().clone(),
        picked.iter().map(|(m, _)| m.clone()),
    )
    .unwrap();
    let sub_values = eval_expr(&sub, e).unwrap();
    let want: Vec<ConstValue> = picked.into_iter().map(|(_, v)| v).collect();
    prop_assert_eq!(sub_values.values(), &want[..]);
    Ok(())
}

/// COUNT is constant across the set, and with BY constant on each group.
pub fn aggregates(x: &Graph, g: &Graph, group_var: Option<&str>) -> Check {
    let ms = enumerate_matches(x, g);
    for op in [AggOp::Count, AggOp::Sum, AggOp::Max, AggOp::Min, AggOp::Avg] {
        let e = Expr::agg(op, false, Expr::int(1), None);
        let v = eval_expr(&ms, &e).unwrap();
        prop_assert!(v.values().windows(2).all(|w| w[0] == w[1]));
        if let Some(gv) = group_var {
            let e = Expr::agg(op, false, Expr::int(1), Some(vec![Expr::var(gv)]));
            let v = eval_expr(&ms, &e).unwrap();
            let mut per_group: BTreeMap<Label, (ConstValue, i64)> = BTreeMap::new();
            for (m, val) in ms.iter().zip(v.values()) {
                let key = m.get(gv).unwrap().clone();
                let entry = per_group.entry(key).or_insert((val.clone(), 0));
                prop_assert_eq!(&entry.0, val);
                entry.1 += 1;
            }
            if op == AggOp::Count {
                // Groups partition the set: their sizes add up.
                let total: i64 = per_group.values().map(|(_, n)| *n).sum();
                prop_assert_eq!(total as usize, ms.len());
                for (c, n) in per_group.values() {
                    prop_assert_eq!(c, &ConstValue::Int(*n));
                }
            }
        }
    }
    Ok(())
}

pub fn err_absorbing(other: &ConstValue) -> Check {
    let err = Label::Const(ConstValue::Err);
    let o = Label::Const(other.clone());
    for op in [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Eq,
        BinaryOp::Gt,
        BinaryOp::Lt,
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Concat,
    ] {
        prop_assert_eq!(&apply_binary(op, &err, &o), &err, "{:?}", op);
        prop_assert_eq!(&apply_binary(op, &o, &err), &err, "{:?}", op);
    }
    for op in [UnaryOp::Neg, UnaryOp::Not] {
        prop_assert_eq!(&apply_unary(op, &err), &err);
    }
    Ok(())
}

/// Consistently renaming the variables of a query gives an isomorphic result.
pub fn query_renaming(x: &Graph, r: &Graph, g: &Graph) -> Check {
    let q = Query::new(Pattern::Basic(x.clone()).construct(r.clone())).unwrap();
    let q2 = Query::new(Pattern::Basic(rename(x, "_r")).construct(rename(r, "_r"))).unwrap();
    let a = run_query(&q, g).unwrap();
    let b = run_query(&q2, g).unwrap();
    prop_assert!(a.is_isomorphic_to(&b));
    Ok(())
}

/// A parse error points inside the text (or one past its end).
pub fn error_span_in_text(text: &str) -> Check {
    let results = [
        gral::parse_graph_in(text, "t.gtf").err(),
        gral::parse_query_in(text, "t.gral").err(),
        gral::parse_pattern_in(text, "t.gral").err(),
    ];
    let lines: Vec<&str> = text.split('\n').collect();
    for e in results.into_iter().flatten() {
        prop_assert!(e.span.line >= 1 && e.span.line <= lines.len(), "{}", e);
        let width = lines[e.span.line - 1].chars().count();
        prop_assert!(e.span.column >= 1 && e.span.column <= width + 1, "{}", e);
    }
    Ok(())
}
