//! Expressions and their evaluation against a set of matches.
//!
//! The value of an expression is a family of constants indexed by the matches
//! of the set, in canonical order. Basic operators act pointwise; aggregates
//! see the whole set, or with `BY` the group of matches agreeing on the group
//! expressions.
//!
//! Errors at run time are values: every operator returns `err` when one of its
//! operands is `err` or when its operands make no sense for it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Match, MatchSet};
use crate::label::{ConstValue, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("variable ?{0} is not in scope")]
    OutOfScope(String),
    #[error("BY group shares variables with the aggregated expression: {0}")]
    GroupNotDisjoint(String),
    #[error("a BY group needs at least one expression")]
    EmptyGroup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Gt,
    Lt,
    And,
    Or,
    Concat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggOp {
    Count,
    Max,
    Min,
    Sum,
    Avg,
}

impl AggOp {
    pub fn name(self) -> &'static str {
        match self {
            AggOp::Count => "COUNT",
            AggOp::Max => "MAX",
            AggOp::Min => "MIN",
            AggOp::Sum => "SUM",
            AggOp::Avg => "AVG",
        }
    }

    pub fn from_name(s: &str) -> Option<AggOp> {
        Some(match s {
            "COUNT" => AggOp::Count,
            "MAX" => AggOp::Max,
            "MIN" => AggOp::Min,
            "SUM" => AggOp::Sum,
            "AVG" => AggOp::Avg,
            _ => return None,
        })
    }
}

/// A non-empty list of expressions used for grouping.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupExprs(Vec<Expr>);

impl GroupExprs {
    pub fn new(items: Vec<Expr>) -> Result<Self, ExprError> {
        if items.is_empty() {
            return Err(ExprError::EmptyGroup);
        }
        Ok(GroupExprs(items))
    }

    pub fn items(&self) -> &[Expr] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(ConstValue),
    Var(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Agg {
        op: AggOp,
        distinct: bool,
        arg: Box<Expr>,
        by: Option<GroupExprs>,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Const(ConstValue::Symbol(name.into()))
    }

    pub fn int(i: i64) -> Expr {
        Expr::Const(ConstValue::Int(i))
    }

    pub fn unary(op: UnaryOp, arg: Expr) -> Expr {
        Expr::Unary(op, Box::new(arg))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn agg(op: AggOp, distinct: bool, arg: Expr, by: Option<Vec<Expr>>) -> Expr {
        Expr::Agg {
            op,
            distinct,
            arg: Box::new(arg),
            by: by.map(|items| GroupExprs::new(items).expect("non-empty group")),
        }
    }

    /// In-scope variables. Variables that only occur in a `BY` group are not
    /// in scope.
    pub fn in_scope_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(false, &mut out);
        out
    }

    /// Every variable occurring in the expression, `BY` groups included.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(true, &mut out);
        out
    }

    fn collect_vars(&self, with_groups: bool, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Unary(_, a) => a.collect_vars(with_groups, out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(with_groups, out);
                b.collect_vars(with_groups, out);
            }
            Expr::Agg { arg, by, .. } => {
                arg.collect_vars(with_groups, out);
                if with_groups {
                    for e in by.iter().flat_map(GroupExprs::items) {
                        e.collect_vars(with_groups, out);
                    }
                }
            }
        }
    }

    pub fn has_aggregate(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Unary(_, a) => a.has_aggregate(),
            Expr::Binary(_, a, b) => a.has_aggregate() || b.has_aggregate(),
            Expr::Agg { .. } => true,
        }
    }

    /// Checks that every `BY` group is variable-disjoint from its aggregated
    /// expression.
    pub fn check_groups(&self) -> Result<(), ExprError> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Ok(()),
            Expr::Unary(_, a) => a.check_groups(),
            Expr::Binary(_, a, b) => {
                a.check_groups()?;
                b.check_groups()
            }
            Expr::Agg { arg, by, .. } => {
                arg.check_groups()?;
                if let Some(gp) = by {
                    let arg_vars = arg.all_vars();
                    let mut shared = BTreeSet::new();
                    for e in gp.items() {
                        e.check_groups()?;
                        shared.extend(e.all_vars().intersection(&arg_vars).cloned());
                    }
                    if !shared.is_empty() {
                        let names: Vec<String> = shared.iter().map(|v| format!("?{v}")).collect();
                        return Err(ExprError::GroupNotDisjoint(names.join(", ")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Full static check against the variables available for evaluation.
    pub fn validate_over(&self, available: impl Fn(&str) -> bool) -> Result<(), ExprError> {
        self.check_groups()?;
        match self.all_vars().into_iter().find(|v| !available(v)) {
            Some(v) => Err(ExprError::OutOfScope(v)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "?{v}"),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "-({a})"),
            Expr::Unary(UnaryOp::Not, a) => write!(f, "NOT({a})"),
            Expr::Binary(BinaryOp::Concat, a, b) => write!(f, "CONCAT({a}, {b})"),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Eq => "=",
                    BinaryOp::Gt => ">",
                    BinaryOp::Lt => "<",
                    BinaryOp::And => "AND",
                    BinaryOp::Or => "OR",
                    BinaryOp::Concat => unreachable!(),
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Agg {
                op,
                distinct,
                arg,
                by,
            } => {
                write!(f, "{}(", op.name())?;
                if *distinct {
                    f.write_str("DISTINCT ")?;
                }
                write!(f, "{arg}")?;
                if let Some(gp) = by {
                    f.write_str(" BY ")?;
                    for (i, e) in gp.items().iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{e}")?;
                    }
                }
                f.write_str(")")
            }
        }
    }
}

/// One constant per match, in the canonical order of the match set.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFamily(Vec<ConstValue>);

impl ValueFamily {
    pub fn values(&self) -> &[ConstValue] {
        &self.0
    }

    pub fn into_values(self) -> Vec<ConstValue> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn err() -> Label {
    Label::Const(ConstValue::Err)
}

fn to_const(l: Label) -> ConstValue {
    match l {
        Label::Const(c) => c,
        Label::Var(_) => ConstValue::Err,
    }
}

fn check_scope(ms: &MatchSet, e: &Expr) -> Result<(), ExprError> {
    let domain = ms.domain().vars();
    e.validate_over(|v| domain.contains(v))
}

/// Value of `e` with respect to `ms`.
///
/// Fails only when `e` mentions a variable outside the domain of `ms` or has
/// an ill-formed `BY` group; every run-time anomaly yields `err`.
pub fn eval_expr(ms: &MatchSet, e: &Expr) -> Result<ValueFamily, ExprError> {
    check_scope(ms, e)?;
    let rows: Vec<&Match> = ms.iter().collect();
    Ok(ValueFamily(
        eval_rows(&rows, e).into_iter().map(to_const).collect(),
    ))
}

/// Pointwise tuples of the group expressions.
pub fn eval_group(ms: &MatchSet, gp: &GroupExprs) -> Result<Vec<Vec<ConstValue>>, ExprError> {
    for e in gp.items() {
        check_scope(ms, e)?;
    }
    let rows: Vec<&Match> = ms.iter().collect();
    Ok(group_keys(&rows, gp)
        .into_iter()
        .map(|t| t.into_iter().map(to_const).collect())
        .collect())
}

fn group_keys(rows: &[&Match], gp: &GroupExprs) -> Vec<Vec<Label>> {
    let cols: Vec<Vec<Label>> = gp.items().iter().map(|e| eval_rows(rows, e)).collect();
    (0..rows.len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

// Values may be variable labels here; they only become `err` at the boundary,
// so that equality on variables stays meaningful.
fn eval_rows(rows: &[&Match], e: &Expr) -> Vec<Label> {
    match e {
        Expr::Const(c) => vec![Label::Const(c.clone()); rows.len()],
        Expr::Var(v) => rows
            .iter()
            .map(|m| m.get(v).cloned().unwrap_or_else(err))
            .collect(),
        Expr::Unary(op, a) => eval_rows(rows, a)
            .into_iter()
            .map(|x| apply_unary(*op, &x))
            .collect(),
        Expr::Binary(op, a, b) => eval_rows(rows, a)
            .iter()
            .zip(eval_rows(rows, b).iter())
            .map(|(x, y)| apply_binary(*op, x, y))
            .collect(),
        Expr::Agg {
            op,
            distinct,
            arg,
            by: None,
        } => {
            let v = aggregate_labels(*op, *distinct, &eval_rows(rows, arg));
            vec![v; rows.len()]
        }
        Expr::Agg {
            op,
            distinct,
            arg,
            by: Some(gp),
        } => {
            let keys = group_keys(rows, gp);
            let mut groups: BTreeMap<&Vec<Label>, Vec<usize>> = BTreeMap::new();
            for (i, k) in keys.iter().enumerate() {
                groups.entry(k).or_default().push(i);
            }
            let mut out = vec![err(); rows.len()];
            for members in groups.values() {
                let sub: Vec<&Match> = members.iter().map(|&i| rows[i]).collect();
                let v = aggregate_labels(*op, *distinct, &eval_rows(&sub, arg));
                for &i in members {
                    out[i] = v.clone();
                }
            }
            out
        }
    }
}

fn numeric_result(x: f64) -> Label {
    if x.is_finite() {
        Label::Const(ConstValue::Float(x))
    } else {
        err()
    }
}

fn int_or_err(x: Option<i64>) -> Label {
    x.map_or_else(err, Label::int)
}

pub fn apply_unary(op: UnaryOp, x: &Label) -> Label {
    let Label::Const(c) = x else { return err() };
    match (op, c) {
        (UnaryOp::Neg, ConstValue::Int(i)) => int_or_err(i.checked_neg()),
        (UnaryOp::Neg, ConstValue::Float(f)) => numeric_result(-f),
        (UnaryOp::Not, ConstValue::Bool(b)) => Label::Const(ConstValue::Bool(!b)),
        _ => err(),
    }
}

fn concat_text(c: &ConstValue) -> Option<String> {
    Some(match c {
        ConstValue::Symbol(s) | ConstValue::Str(s) => s.clone(),
        ConstValue::Err => return None,
        other => other.to_string(),
    })
}

pub fn apply_binary(op: BinaryOp, x: &Label, y: &Label) -> Label {
    use ConstValue::*;
    let bool_label = |b: bool| Label::Const(Bool(b));
    if matches!(x, Label::Const(Err)) || matches!(y, Label::Const(Err)) {
        return err();
    }
    if op == BinaryOp::Eq {
        return match (x, y) {
            (Label::Const(a), Label::Const(b)) if a.is_numeric() && b.is_numeric() => {
                bool_label(numeric_cmp(a, b) == Some(std::cmp::Ordering::Equal))
            }
            _ => bool_label(x == y),
        };
    }
    let (Label::Const(a), Label::Const(b)) = (x, y) else {
        return err();
    };
    match op {
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => arith(op, a, b),
        BinaryOp::Gt | BinaryOp::Lt => {
            let ord = match (a, b) {
                (Str(s), Str(t)) | (Symbol(s), Symbol(t)) => Some(s.cmp(t)),
                _ if a.is_numeric() && b.is_numeric() => numeric_cmp(a, b),
                _ => None,
            };
            match ord {
                Some(o) if op == BinaryOp::Gt => bool_label(o.is_gt()),
                Some(o) => bool_label(o.is_lt()),
                None => err(),
            }
        }
        BinaryOp::And | BinaryOp::Or => match (a, b) {
            (Bool(p), Bool(q)) if op == BinaryOp::And => bool_label(*p && *q),
            (Bool(p), Bool(q)) => bool_label(*p || *q),
            _ => err(),
        },
        BinaryOp::Concat => match (concat_text(a), concat_text(b)) {
            (Some(s), Some(t)) => Label::Const(Str(s + &t)),
            _ => err(),
        },
        BinaryOp::Eq => unreachable!("handled above"),
    }
}

fn numeric_cmp(a: &ConstValue, b: &ConstValue) -> Option<std::cmp::Ordering> {
    match (a, b) {
        (ConstValue::Int(i), ConstValue::Int(j)) => Some(i.cmp(j)),
        _ => a.as_f64()?.partial_cmp(&b.as_f64()?),
    }
}

fn arith(op: BinaryOp, a: &ConstValue, b: &ConstValue) -> Label {
    if let (ConstValue::Int(i), ConstValue::Int(j)) = (a, b) {
        return int_or_err(match op {
            BinaryOp::Add => i.checked_add(*j),
            BinaryOp::Sub => i.checked_sub(*j),
            BinaryOp::Mul => i.checked_mul(*j),
            // Truncating division; `checked_div` covers zero and MIN / -1.
            _ => i.checked_div(*j),
        });
    }
    let (Some(x), Some(y)) = (a.as_f64(), b.as_f64()) else {
        return err();
    };
    match op {
        BinaryOp::Add => numeric_result(x + y),
        BinaryOp::Sub => numeric_result(x - y),
        BinaryOp::Mul => numeric_result(x * y),
        _ if y == 0.0 => err(),
        _ => numeric_result(x / y),
    }
}

fn aggregate_labels(op: AggOp, distinct: bool, values: &[Label]) -> Label {
    let owned: Vec<&Label>;
    let values: Vec<&Label> = if distinct {
        owned = values.iter().collect::<BTreeSet<_>>().into_iter().collect();
        owned
    } else {
        values.iter().collect()
    };
    if op == AggOp::Count {
        return Label::int(values.len() as i64);
    }
    let nums: Option<Vec<&ConstValue>> = values
        .iter()
        .map(|l| l.as_const().filter(|c| c.is_numeric()))
        .collect();
    let Some(nums) = nums else { return err() };
    match op {
        AggOp::Sum => sum(&nums),
        AggOp::Avg => {
            if nums.is_empty() {
                return err();
            }
            let total: f64 = nums.iter().filter_map(|c| c.as_f64()).sum();
            numeric_result(total / nums.len() as f64)
        }
        AggOp::Max | AggOp::Min => {
            let mut best: Option<&ConstValue> = None;
            for c in nums {
                let better = match best {
                    None => true,
                    Some(b) => {
                        let o = numeric_cmp(c, b);
                        if op == AggOp::Max {
                            o == Some(std::cmp::Ordering::Greater)
                        } else {
                            o == Some(std::cmp::Ordering::Less)
                        }
                    }
                };
                if better {
                    best = Some(c);
                }
            }
            best.map_or_else(err, |c| Label::Const(c.clone()))
        }
        AggOp::Count => unreachable!(),
    }
}

fn sum(nums: &[&ConstValue]) -> Label {
    if nums.iter().all(|c| matches!(c, ConstValue::Int(_))) {
        let mut acc: i64 = 0;
        for c in nums {
            let ConstValue::Int(i) = c else {
                unreachable!()
            };
            match acc.checked_add(*i) {
                Some(s) => acc = s,
                None => return err(),
            }
        }
        return Label::int(acc);
    }
    numeric_result(nums.iter().filter_map(|c| c.as_f64()).sum())
}

/// Applies an aggregation operator to a multiset of constants.
pub fn apply_aggregate(op: AggOp, distinct: bool, values: &[ConstValue]) -> ConstValue {
    let labels: Vec<Label> = values.iter().cloned().map(Label::Const).collect();
    to_const(aggregate_labels(op, distinct, &labels))
}

/// Bounded equivalence check: both expressions have the same value on every
/// match set of `corpus` over which both are well-formed.
pub fn exprs_equivalent_bounded(a: &Expr, b: &Expr, corpus: &[MatchSet]) -> bool {
    corpus
        .iter()
        .all(|ms| match (eval_expr(ms, a), eval_expr(ms, b)) {
            (Ok(x), Ok(y)) => x == y,
            (Err(_), Err(_)) => true,
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstValue::*;

    fn c(v: ConstValue) -> Label {
        Label::Const(v)
    }

    #[test]
    fn aggregates_on_multisets() {
        let likes = vec![Symbol("likes".into()); 5];
        assert_eq!(apply_aggregate(AggOp::Count, false, &likes), Int(5));
        assert_eq!(apply_aggregate(AggOp::Count, true, &likes), Int(1));
        let v = [Int(1), Int(2), Int(2)];
        assert_eq!(apply_aggregate(AggOp::Sum, false, &v), Int(5));
        assert_eq!(apply_aggregate(AggOp::Sum, true, &v), Int(3));
        assert_eq!(apply_aggregate(AggOp::Max, false, &v), Int(2));
        assert_eq!(apply_aggregate(AggOp::Min, false, &v), Int(1));
        assert_eq!(
            apply_aggregate(AggOp::Avg, false, &[Int(1), Int(2)]),
            Float(1.5)
        );
    }

    #[test]
    fn aggregates_on_empty_and_bad_input() {
        assert_eq!(apply_aggregate(AggOp::Count, false, &[]), Int(0));
        assert_eq!(apply_aggregate(AggOp::Sum, false, &[]), Int(0));
        assert_eq!(apply_aggregate(AggOp::Max, false, &[]), Err);
        assert_eq!(apply_aggregate(AggOp::Min, false, &[]), Err);
        assert_eq!(apply_aggregate(AggOp::Avg, false, &[]), Err);
        assert_eq!(
            apply_aggregate(AggOp::Sum, false, &[Int(1), Symbol("a".into())]),
            Err
        );
        assert_eq!(apply_aggregate(AggOp::Max, false, &[Int(1), Err]), Err);
        assert_eq!(apply_aggregate(AggOp::Count, false, &[Err, Err]), Int(2));
        assert_eq!(
            apply_aggregate(AggOp::Sum, false, &[Int(i64::MAX), Int(1)]),
            Err
        );
        assert_eq!(
            apply_aggregate(AggOp::Sum, false, &[Int(1), Float(0.5)]),
            Float(1.5)
        );
    }

    #[test]
    fn arithmetic() {
        let b = |op, x, y| to_const(apply_binary(op, &c(x), &c(y)));
        assert_eq!(b(BinaryOp::Add, Int(2), Int(3)), Int(5));
        assert_eq!(b(BinaryOp::Add, Int(2), Float(0.5)), Float(2.5));
        assert_eq!(b(BinaryOp::Div, Int(7), Int(2)), Int(3));
        assert_eq!(b(BinaryOp::Div, Int(7), Int(0)), Err);
        assert_eq!(b(BinaryOp::Div, Float(1.0), Float(0.0)), Err);
        assert_eq!(b(BinaryOp::Mul, Int(i64::MAX), Int(2)), Err);
        assert_eq!(b(BinaryOp::Add, Symbol("a".into()), Int(1)), Err);
        assert_eq!(to_const(apply_unary(UnaryOp::Neg, &c(Int(i64::MIN)))), Err);
    }

    #[test]
    fn comparisons() {
        let b = |op, x, y| to_const(apply_binary(op, &c(x), &c(y)));
        assert_eq!(b(BinaryOp::Eq, Int(1), Float(1.0)), Bool(true));
        assert_eq!(
            b(BinaryOp::Eq, Symbol("a".into()), Symbol("a".into())),
            Bool(true)
        );
        assert_eq!(
            b(BinaryOp::Eq, Symbol("a".into()), Str("a".into())),
            Bool(false)
        );
        assert_eq!(
            b(BinaryOp::Lt, Str("a".into()), Str("b".into())),
            Bool(true)
        );
        assert_eq!(b(BinaryOp::Gt, Int(3), Float(2.5)), Bool(true));
        assert_eq!(b(BinaryOp::Gt, Int(3), Str("a".into())), Err);
        let v = Label::var("_f1");
        assert_eq!(to_const(apply_binary(BinaryOp::Eq, &v, &v)), Bool(true));
        assert_eq!(to_const(apply_binary(BinaryOp::Add, &v, &c(Int(1)))), Err);
    }

    #[test]
    fn err_absorbs_without_short_circuit() {
        let b = |op, x, y| to_const(apply_binary(op, &c(x), &c(y)));
        assert_eq!(b(BinaryOp::And, Bool(false), Err), Err);
        assert_eq!(b(BinaryOp::Or, Bool(true), Err), Err);
        assert_eq!(b(BinaryOp::Eq, Err, Err), Err);
        assert_eq!(to_const(apply_unary(UnaryOp::Not, &c(Err))), Err);
    }

    #[test]
    fn concat_renders_operands() {
        let r = apply_binary(BinaryOp::Concat, &Label::sym("date1"), &Label::sym("mes1"));
        assert_eq!(to_const(r), Str("date1mes1".into()));
        let r = apply_binary(BinaryOp::Concat, &c(Str("n=".into())), &c(Int(5)));
        assert_eq!(to_const(r), Str("n=5".into()));
    }

    #[test]
    fn scope_of_grouped_aggregates() {
        let e = Expr::agg(
            AggOp::Count,
            false,
            Expr::sym("likes"),
            Some(vec![Expr::var("a1")]),
        );
        assert!(e.in_scope_vars().is_empty());
        assert_eq!(e.all_vars(), BTreeSet::from(["a1".to_string()]));
        let eq = Expr::binary(BinaryOp::Eq, Expr::var("a1"), Expr::var("a2"));
        assert_eq!(eq.in_scope_vars().len(), 2);
        assert!(Expr::int(5).in_scope_vars().is_empty());
    }

    #[test]
    fn group_must_be_disjoint() {
        let e = Expr::agg(
            AggOp::Count,
            false,
            Expr::var("a"),
            Some(vec![Expr::var("a")]),
        );
        assert!(matches!(
            e.check_groups(),
            Result::Err(ExprError::GroupNotDisjoint(_))
        ));
        assert_eq!(GroupExprs::new(vec![]), Result::Err(ExprError::EmptyGroup));
    }
}
