//! Patterns, queries and their evaluation.
//!
//! The value of a pattern over a graph `G` is a match set from a graph that
//! depends only on the pattern to a graph containing `G`. Subpatterns are
//! always evaluated first, and the right operand of `JOIN`/`UNION` is
//! evaluated over the range produced by the left one.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{self, AlgebraError, FreshVars, Match, MatchSet};
use crate::expr::{eval_expr, Expr, ExprError};
use crate::graph::{find_isomorphism, Graph, GraphError};
use crate::label::{is_reserved_var, Label};
use crate::matching::enumerate_matches;

#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Basic(Graph),
    Join(Box<Pattern>, Box<Pattern>),
    Bind(Box<Pattern>, Expr, String),
    Filter(Box<Pattern>, Expr),
    Construct(Box<Pattern>, Graph),
    Union(Box<Pattern>, Box<Pattern>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationErrorKind {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("UNION operand has no template")]
    UnionWithoutTemplate,
    #[error("UNION operands have different templates")]
    UnionTemplateMismatch,
    #[error("variable ?{0} uses the reserved prefix ?_")]
    ReservedVariable(String),
    #[error("a query needs a CONSTRUCT or UNION pattern")]
    NoTemplate,
}

/// A static error, located at a subpattern by its pre-order position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct ValidationError {
    pub node: usize,
    pub kind: ValidationErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl Pattern {
    pub fn basic(g: Graph) -> Pattern {
        Pattern::Basic(g)
    }

    pub fn join(self, other: Pattern) -> Pattern {
        Pattern::Join(Box::new(self), Box::new(other))
    }

    pub fn bind(self, e: Expr, var: impl Into<String>) -> Pattern {
        Pattern::Bind(Box::new(self), e, var.into())
    }

    pub fn filter(self, e: Expr) -> Pattern {
        Pattern::Filter(Box::new(self), e)
    }

    pub fn construct(self, template: Graph) -> Pattern {
        Pattern::Construct(Box::new(self), template)
    }

    pub fn union(self, other: Pattern) -> Pattern {
        Pattern::Union(Box::new(self), Box::new(other))
    }

    /// In-scope variables.
    pub fn in_scope_vars(&self) -> BTreeSet<String> {
        match self {
            Pattern::Basic(g) => g.vars().into_iter().map(str::to_string).collect(),
            Pattern::Join(a, b) => {
                let mut v = a.in_scope_vars();
                v.extend(b.in_scope_vars());
                v
            }
            Pattern::Bind(p, _, x) => {
                let mut v = p.in_scope_vars();
                v.insert(x.clone());
                v
            }
            Pattern::Filter(p, _) => p.in_scope_vars(),
            Pattern::Construct(_, r) => r.vars().into_iter().map(str::to_string).collect(),
            Pattern::Union(a, _) => a.in_scope_vars(),
        }
    }

    pub fn template(&self) -> Option<&Graph> {
        match self {
            Pattern::Construct(_, r) => Some(r),
            Pattern::Union(a, _) => a.template(),
            _ => None,
        }
    }

    /// Direct subpatterns, left to right.
    pub fn children(&self) -> Vec<&Pattern> {
        match self {
            Pattern::Basic(_) => vec![],
            Pattern::Join(a, b) | Pattern::Union(a, b) => vec![a, b],
            Pattern::Bind(p, ..) | Pattern::Filter(p, _) | Pattern::Construct(p, _) => vec![p],
        }
    }

    /// Number of nodes of the pattern tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn operator_name(&self) -> &'static str {
        match self {
            Pattern::Basic(_) => "basic",
            Pattern::Join(..) => "JOIN",
            Pattern::Bind(..) => "BIND",
            Pattern::Filter(..) => "FILTER",
            Pattern::Construct(..) => "CONSTRUCT",
            Pattern::Union(..) => "UNION",
        }
    }

    /// Scope, template and grouping checks over the whole pattern.
    pub fn validate(&self) -> Result<(), ValidationError> {
        self.validate_at(0)
    }

    fn validate_at(&self, node: usize) -> Result<(), ValidationError> {
        let fail = |kind| Err(ValidationError { node, kind });
        let first = node + 1;
        match self {
            Pattern::Basic(_) => Ok(()),
            Pattern::Join(a, b) => {
                a.validate_at(first)?;
                b.validate_at(first + a.size())
            }
            Pattern::Bind(p, e, x) => {
                p.validate_at(first)?;
                if is_reserved_var(x) {
                    return fail(ValidationErrorKind::ReservedVariable(x.clone()));
                }
                check_expr_over(p, e).or_else(fail)
            }
            Pattern::Filter(p, e) => {
                p.validate_at(first)?;
                check_expr_over(p, e).or_else(fail)
            }
            Pattern::Construct(p, _) => p.validate_at(first),
            Pattern::Union(a, b) => {
                a.validate_at(first)?;
                b.validate_at(first + a.size())?;
                match (a.template(), b.template()) {
                    (Some(r1), Some(r2)) if r1 == r2 => Ok(()),
                    (Some(_), Some(_)) => fail(ValidationErrorKind::UnionTemplateMismatch),
                    _ => fail(ValidationErrorKind::UnionWithoutTemplate),
                }
            }
        }
    }
}

fn check_expr_over(p: &Pattern, e: &Expr) -> Result<(), ValidationErrorKind> {
    let scope = p.in_scope_vars();
    e.validate_over(|v| scope.contains(v))
        .map_err(ValidationErrorKind::from)
}

/// A query `GRAPH (P)`: a pattern with a template.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pattern: Pattern,
}

impl Query {
    pub fn new(pattern: Pattern) -> Result<Self, ValidationError> {
        if pattern.template().is_none() {
            return Err(ValidationError {
                node: 0,
                kind: ValidationErrorKind::NoTemplate,
            });
        }
        Ok(Query { pattern })
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn template(&self) -> &Graph {
        self.pattern.template().expect("checked at construction")
    }
}

/// Callback receiving each subpattern's value as soon as it is computed,
/// with the subpattern's pre-order position.
pub trait EvalObserver {
    fn evaluated(&mut self, node: usize, pattern: &Pattern, value: &MatchSet);
}

impl<F: FnMut(usize, &Pattern, &MatchSet)> EvalObserver for F {
    fn evaluated(&mut self, node: usize, pattern: &Pattern, value: &MatchSet) {
        self(node, pattern, value)
    }
}

struct NoObserver;

impl EvalObserver for NoObserver {
    fn evaluated(&mut self, _: usize, _: &Pattern, _: &MatchSet) {}
}

/// Value of `p` over `g`. Fresh variables are drawn from `fresh`.
pub fn eval_pattern(p: &Pattern, g: &Graph, fresh: &mut FreshVars) -> Result<MatchSet, EvalError> {
    eval_pattern_observed(p, g, fresh, &mut NoObserver)
}

pub fn eval_pattern_observed(
    p: &Pattern,
    g: &Graph,
    fresh: &mut FreshVars,
    observer: &mut dyn EvalObserver,
) -> Result<MatchSet, EvalError> {
    p.validate()?;
    eval_at(p, g, fresh, observer, 0)
}

fn eval_at(
    p: &Pattern,
    g: &Graph,
    fresh: &mut FreshVars,
    obs: &mut dyn EvalObserver,
    node: usize,
) -> Result<MatchSet, EvalError> {
    let first = node + 1;
    let value = match p {
        Pattern::Basic(x) => enumerate_matches(x, g),
        Pattern::Join(a, b) => {
            let left = eval_at(a, g, fresh, obs, first)?;
            let right = eval_at(b, left.range(), fresh, obs, first + a.size())?;
            algebra::join(&left, &right)
        }
        Pattern::Bind(q, e, x) => {
            let inner = eval_at(q, g, fresh, obs, first)?;
            let values = eval_expr(&inner, e).map_err(|k| ValidationError {
                node,
                kind: k.into(),
            })?;
            algebra::bind(&inner, values.values(), x)?
        }
        Pattern::Filter(q, e) => {
            let inner = eval_at(q, g, fresh, obs, first)?;
            let values = eval_expr(&inner, e).map_err(|k| ValidationError {
                node,
                kind: k.into(),
            })?;
            algebra::filter(&inner, values.values())?
        }
        Pattern::Construct(q, r) => {
            let inner = eval_at(q, g, fresh, obs, first)?;
            algebra::construct(&inner, r, fresh)
        }
        Pattern::Union(a, b) => {
            let left = eval_at(a, g, fresh, obs, first)?;
            let right = eval_at(b, left.range(), fresh, obs, first + a.size())?;
            algebra::union(&left, &right)?
        }
    };
    obs.evaluated(node, p, &value);
    Ok(value)
}

/// Result of a query: the image of its template by the value of its pattern.
pub fn run_query(q: &Query, g: &Graph) -> Result<Graph, EvalError> {
    run_query_observed(q, g, &mut NoObserver)
}

pub fn run_query_observed(
    q: &Query,
    g: &Graph,
    observer: &mut dyn EvalObserver,
) -> Result<Graph, EvalError> {
    let mut fresh = FreshVars::new();
    let value = eval_pattern_observed(&q.pattern, g, &mut fresh, observer)?;
    Ok(value.image_of(q.template())?)
}

/// Whether two values agree up to a renaming of engine-minted variables.
pub fn match_sets_equivalent(a: &MatchSet, b: &MatchSet) -> bool {
    if a.domain() != b.domain() || a.len() != b.len() {
        return false;
    }
    if a == b {
        return true;
    }
    find_isomorphism(a.range(), b.range(), |renaming| {
        if renaming.iter().any(|(k, v)| !is_reserved_var(k) && k != v) {
            return false;
        }
        a.iter().all(|m| b.contains(&rename_match(m, renaming)))
    })
    .is_some()
}

fn rename_match(m: &Match, renaming: &BTreeMap<String, String>) -> Match {
    Match::from_pairs(m.assignment().iter().map(|(k, v)| {
        let v = match v {
            Label::Var(x) => Label::Var(renaming.get(x).cloned().unwrap_or_else(|| x.clone())),
            c => c.clone(),
        };
        (k.clone(), v)
    }))
}

/// Bounded equivalence check: both patterns have the same value over every
/// graph of `corpus`, up to the names of fresh variables.
pub fn patterns_equivalent_bounded(p1: &Pattern, p2: &Pattern, corpus: &[Graph]) -> bool {
    corpus.iter().all(|g| {
        let a = eval_pattern(p1, g, &mut FreshVars::new());
        let b = eval_pattern(p2, g, &mut FreshVars::new());
        match (a, b) {
            (Ok(a), Ok(b)) => match_sets_equivalent(&a, &b),
            (Err(_), Err(_)) => true,
            _ => false,
        }
    })
}

/// Bounded equivalence check for queries: same template, and isomorphic
/// results over every graph of `corpus`.
pub fn queries_equivalent_bounded(q1: &Query, q2: &Query, corpus: &[Graph]) -> bool {
    q1.template() == q2.template()
        && corpus
            .iter()
            .all(|g| match (run_query(q1, g), run_query(q2, g)) {
                (Ok(a), Ok(b)) => a.is_isomorphic_to(&b),
                (Err(_), Err(_)) => true,
                _ => false,
            })
}
