//! Sets of matches and the operations on them.
//!
//! `Merge` is the primitive: it combines each match of a set with a family of
//! match sets supplied per match. `Join`, `Bind`, `Filter` and `Construct`
//! are thin wrappers over it; `Restrict`, `Extend` and `Union` complete the
//! algebra.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Assignment, Graph, GraphError};
use crate::label::{ConstValue, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("incompatible matches")]
    Incompatible,
    #[error("invalid restriction: {0}")]
    InvalidRestriction(&'static str),
    #[error("range not contained in the extension graph")]
    RangeNotContained,
    #[error("union domain mismatch")]
    UnionDomainMismatch,
    #[error("family produced a match set over a different domain")]
    FamilyDomainMismatch,
    #[error("value family has {got} values for {expected} matches")]
    FamilyLength { expected: usize, got: usize },
    #[error("invalid match set: {0}")]
    InvalidMatchSet(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A match, given by its assignment of the domain's variables. Constants are
/// implicitly fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Match(Assignment);

impl Match {
    pub fn new(assignment: Assignment) -> Self {
        Match(assignment)
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Label)>) -> Self {
        Match(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn assignment(&self) -> &Assignment {
        &self.0
    }

    pub fn into_assignment(self) -> Assignment {
        self.0
    }

    pub fn get(&self, var: &str) -> Option<&Label> {
        self.0.get(var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Applies the match to a label, fixing constants.
    pub fn apply(&self, l: &Label) -> Option<Label> {
        match l {
            Label::Var(v) => self.0.get(v).cloned(),
            c => Some(c.clone()),
        }
    }

    /// Agreement on every shared variable.
    pub fn compatible(&self, other: &Match) -> bool {
        let (small, large) = if self.0.len() <= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .all(|(k, v)| large.0.get(k).is_none_or(|w| w == v))
    }

    /// The common extension of two compatible matches.
    pub fn bowtie(&self, other: &Match) -> Result<Match, AlgebraError> {
        if !self.compatible(other) {
            return Err(AlgebraError::Incompatible);
        }
        let mut a = self.0.clone();
        a.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(Match(a))
    }

    pub fn restrict_to<'a>(&self, vars: impl IntoIterator<Item = &'a str>) -> Match {
        Match(
            vars.into_iter()
                .filter_map(|v| self.0.get(v).map(|l| (v.to_string(), l.clone())))
                .collect(),
        )
    }

    pub fn with(&self, var: &str, value: Label) -> Match {
        let mut a = self.0.clone();
        a.insert(var.to_string(), value);
        Match(a)
    }

    /// Whether this match maps `x` structurally into `g`.
    pub fn preserves(&self, x: &Graph, g: &Graph) -> bool {
        let Ok(image) = x.image(&self.0) else {
            return false;
        };
        image.is_subgraph_of(g)
    }
}

// Row order of assignment tables: column by column, labels in canonical order.
impl Ord for Match {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((ka, va), (kb, vb)) in self.0.iter().zip(other.0.iter()) {
            let o = ka.cmp(kb).then_with(|| va.canonical_cmp(vb));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Match {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Match {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "?{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

/// A set of matches from `domain` to `range`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchSet {
    domain: Graph,
    range: Graph,
    matches: BTreeSet<Match>,
}

impl MatchSet {
    /// Builds a match set, checking that every match assigns exactly the
    /// domain's variables and maps the domain into the range.
    pub fn new(
        domain: Graph,
        range: Graph,
        matches: impl IntoIterator<Item = Match>,
    ) -> Result<Self, AlgebraError> {
        let ms = MatchSet::from_parts(domain, range, matches);
        ms.validate()?;
        Ok(ms)
    }

    pub(crate) fn from_parts(
        domain: Graph,
        range: Graph,
        matches: impl IntoIterator<Item = Match>,
    ) -> Self {
        MatchSet {
            domain,
            range,
            matches: matches.into_iter().collect(),
        }
    }

    pub fn empty(domain: Graph, range: Graph) -> Self {
        MatchSet::from_parts(domain, range, std::iter::empty())
    }

    /// The single empty match over the empty graph: the unit of `join`.
    pub fn unit() -> Self {
        MatchSet::from_parts(Graph::empty(), Graph::empty(), [Match::default()])
    }

    pub fn domain(&self) -> &Graph {
        &self.domain
    }

    pub fn range(&self) -> &Graph {
        &self.range
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    /// Matches in canonical (table row) order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &Match> {
        self.matches.iter()
    }

    pub fn contains(&self, m: &Match) -> bool {
        self.matches.contains(m)
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let vars: BTreeSet<&str> = self.domain.vars();
        for m in &self.matches {
            if !m.vars().eq(vars.iter().copied()) {
                return Err(AlgebraError::InvalidMatchSet(format!(
                    "match {m} does not assign exactly the domain variables"
                )));
            }
            if !m.preserves(&self.domain, &self.range) {
                return Err(AlgebraError::InvalidMatchSet(format!(
                    "match {m} does not preserve the domain structure"
                )));
            }
        }
        Ok(())
    }

    pub fn table(&self) -> AssignmentTable {
        assignment_table(self)
    }

    /// Image of `x` by the assignments of this set.
    pub fn image_of(&self, x: &Graph) -> Result<Graph, GraphError> {
        x.image_by_set(self.matches.iter().map(Match::assignment))
    }
}

/// Supplies, for each match of a set, a match set over a fixed domain.
pub trait FamilySupplier {
    fn domain(&self) -> &Graph;
    /// `index` is the position of `m` in canonical order.
    fn supply(&mut self, index: usize, m: &Match) -> MatchSet;
}

/// A family given by a closure.
pub struct FnFamily<F> {
    domain: Graph,
    f: F,
}

impl<F: FnMut(usize, &Match) -> MatchSet> FnFamily<F> {
    pub fn new(domain: Graph, f: F) -> Self {
        FnFamily { domain, f }
    }
}

impl<F: FnMut(usize, &Match) -> MatchSet> FamilySupplier for FnFamily<F> {
    fn domain(&self) -> &Graph {
        &self.domain
    }

    fn supply(&mut self, index: usize, m: &Match) -> MatchSet {
        (self.f)(index, m)
    }
}

/// The family that does not depend on the match.
pub struct ConstantFamily<'a>(pub &'a MatchSet);

impl FamilySupplier for ConstantFamily<'_> {
    fn domain(&self) -> &Graph {
        &self.0.domain
    }

    fn supply(&mut self, _index: usize, _m: &Match) -> MatchSet {
        self.0.clone()
    }
}

/// Mints fresh variable names `_f1`, `_f2`, … (rendered `?_f1`, …).
#[derive(Debug, Default, Clone)]
pub struct FreshVars {
    next: usize,
}

impl FreshVars {
    pub fn new() -> Self {
        FreshVars::default()
    }

    /// Next name for which `taken` is false.
    pub fn mint(&mut self, taken: impl Fn(&str) -> bool) -> String {
        loop {
            self.next += 1;
            let name = format!("_f{}", self.next);
            if !taken(&name) {
                return name;
            }
        }
    }
}

/// Merging of `ms` along a family: every `m ⋈ p` for `p` in the family's set
/// at `m`, compatible with `m`.
pub fn merge(ms: &MatchSet, family: &mut impl FamilySupplier) -> Result<MatchSet, AlgebraError> {
    let y = family.domain().clone();
    let mut range = ms.range.clone();
    let mut out = BTreeSet::new();
    for (i, m) in ms.matches.iter().enumerate() {
        let p = family.supply(i, m);
        if p.domain != y {
            return Err(AlgebraError::FamilyDomainMismatch);
        }
        range = range.union_with(&p.range);
        for q in &p.matches {
            if m.compatible(q) {
                out.insert(m.bowtie(q)?);
            }
        }
    }
    Ok(MatchSet::from_parts(ms.domain.union(&y), range, out))
}

/// Restriction of every match to the variables of `y`, as matches into `h`.
pub fn restrict(ms: &MatchSet, y: &Graph, h: &Graph) -> Result<MatchSet, AlgebraError> {
    if !y.is_subgraph_of(&ms.domain) {
        return Err(AlgebraError::InvalidRestriction(
            "graph not contained in the domain",
        ));
    }
    if !h.is_subgraph_of(&ms.range) {
        return Err(AlgebraError::InvalidRestriction(
            "graph not contained in the range",
        ));
    }
    let vars = y.vars();
    let mut out = BTreeSet::new();
    for m in &ms.matches {
        let r = m.restrict_to(vars.iter().copied());
        if !r.preserves(y, h) {
            return Err(AlgebraError::InvalidRestriction(
                "image not contained in the target",
            ));
        }
        out.insert(r);
    }
    Ok(MatchSet::from_parts(y.clone(), h.clone(), out))
}

pub fn extend(ms: &MatchSet, h: &Graph) -> Result<MatchSet, AlgebraError> {
    if !ms.range.is_subgraph_of(h) {
        return Err(AlgebraError::RangeNotContained);
    }
    Ok(MatchSet {
        domain: ms.domain.clone(),
        range: h.clone(),
        matches: ms.matches.clone(),
    })
}

pub fn join(a: &MatchSet, b: &MatchSet) -> MatchSet {
    merge(a, &mut ConstantFamily(b)).expect("a constant family has a single domain")
}

fn check_family_len(ms: &MatchSet, values: &[ConstValue]) -> Result<(), AlgebraError> {
    if values.len() != ms.len() {
        return Err(AlgebraError::FamilyLength {
            expected: ms.len(),
            got: values.len(),
        });
    }
    Ok(())
}

/// Binds `x` to the `i`-th value for the `i`-th match (canonical order).
///
/// When `x` is already a variable of the domain this keeps the matches whose
/// value for `x` equals the supplied constant.
pub fn bind(ms: &MatchSet, values: &[ConstValue], x: &str) -> Result<MatchSet, AlgebraError> {
    check_family_len(ms, values)?;
    let node = Graph::from_nodes([Label::var(x)]);
    let mut family = FnFamily::new(node.clone(), |i, _m: &Match| {
        let c = Label::Const(values[i].clone());
        MatchSet::from_parts(
            node.clone(),
            Graph::from_nodes([c.clone()]),
            [Match::from_pairs([(x, c)])],
        )
    });
    merge(ms, &mut family)
}

/// Keeps the matches whose value is `true`: the values and then `true` are
/// bound to an auxiliary variable, and the result is restricted back to the
/// original domain and range.
pub fn filter(ms: &MatchSet, values: &[ConstValue]) -> Result<MatchSet, AlgebraError> {
    check_family_len(ms, values)?;
    let mut aux = String::from("_filter");
    while ms.domain.has_var(&aux) {
        aux.push('_');
    }
    let bound = bind(ms, values, &aux)?;
    let trues = vec![ConstValue::Bool(true); bound.len()];
    let selected = bind(&bound, &trues, &aux)?;
    restrict(&selected, &ms.domain, &ms.range)
}

/// Matches from the template `r`: each match keeps its values on the shared
/// variables and sends every other template variable to a fresh variable.
pub fn construct(ms: &MatchSet, r: &Graph, fresh: &mut FreshVars) -> MatchSet {
    let shared: Vec<String> = r
        .vars()
        .into_iter()
        .filter(|v| ms.domain.has_var(v))
        .map(str::to_string)
        .collect();
    let unbound: Vec<String> = r
        .vars()
        .into_iter()
        .filter(|v| !ms.domain.has_var(v))
        .map(str::to_string)
        .collect();
    let taken = |n: &str| ms.range.has_var(n) || ms.domain.has_var(n) || r.has_var(n);
    let mut family = FnFamily::new(r.clone(), |_i, m: &Match| {
        let mut p = m.restrict_to(shared.iter().map(String::as_str));
        for x in &unbound {
            p = p.with(x, Label::Var(fresh.mint(taken)));
        }
        let image = r
            .image(p.assignment())
            .expect("all template variables are assigned");
        MatchSet::from_parts(r.clone(), image, [p])
    });
    let merged = merge(ms, &mut family).expect("construct family has the template as domain");
    let range = merged.range.clone();
    restrict(&merged, r, &range).expect("template is part of the merged domain")
}

/// Set union of two match sets over the same domain, both extended to the
/// union of their ranges.
pub fn union(a: &MatchSet, b: &MatchSet) -> Result<MatchSet, AlgebraError> {
    if a.domain != b.domain {
        return Err(AlgebraError::UnionDomainMismatch);
    }
    let range = a.range.union(&b.range);
    let mut out = extend(a, &range)?;
    out.matches.extend(extend(b, &range)?.matches);
    Ok(out)
}

/// The assignment table of a match set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentTable {
    /// Variable names without the `?` sigil, sorted.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Label>>,
}

impl AssignmentTable {
    /// Column `var` as a list, if present.
    pub fn column(&self, var: &str) -> Option<Vec<&Label>> {
        let i = self.columns.iter().position(|c| c == var)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

pub fn assignment_table(ms: &MatchSet) -> AssignmentTable {
    let columns: Vec<String> = ms.domain.vars().into_iter().map(str::to_string).collect();
    let rows = ms
        .matches
        .iter()
        .map(|m| {
            columns
                .iter()
                .map(|c| {
                    m.get(c)
                        .cloned()
                        .expect("match assigns every domain variable")
                })
                .collect()
        })
        .collect();
    AssignmentTable { columns, rows }
}
