//! Graphs with isolated nodes.
//!
//! A graph is a set of nodes and a set of triples whose subjects and objects
//! are nodes. Predicates need not be nodes. Graphs are immutable values: every
//! operation here returns a new graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::label::{ConstValue, Label};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("triple {0} has a subject or object that is not a node")]
    DanglingTriple(Triple),
    #[error("unbound variable in image: ?{0}")]
    UnboundVariable(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Label,
    pub predicate: Label,
    pub object: Label,
}

impl Triple {
    pub fn new(subject: Label, predicate: Label, object: Label) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }

    pub fn labels(&self) -> [&Label; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn map(&self, mut f: impl FnMut(&Label) -> Label) -> Triple {
        Triple::new(f(&self.subject), f(&self.predicate), f(&self.object))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

/// A graph: nodes plus triples over labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    nodes: BTreeSet<Label>,
    triples: BTreeSet<Triple>,
}

/// A map from variable names to labels.
pub type Assignment = BTreeMap<String, Label>;

impl Graph {
    pub fn empty() -> Self {
        Graph::default()
    }

    /// Builds a graph from explicit nodes and triples, checking that every
    /// subject and object is among the nodes.
    pub fn try_new(
        nodes: impl IntoIterator<Item = Label>,
        triples: impl IntoIterator<Item = Triple>,
    ) -> Result<Self, GraphError> {
        let nodes: BTreeSet<Label> = nodes.into_iter().collect();
        let triples: BTreeSet<Triple> = triples.into_iter().collect();
        if let Some(t) = triples
            .iter()
            .find(|t| !nodes.contains(&t.subject) || !nodes.contains(&t.object))
        {
            return Err(GraphError::DanglingTriple(t.clone()));
        }
        Ok(Graph { nodes, triples })
    }

    /// Builds a graph from triples and extra nodes; subjects and objects are
    /// added to the node set.
    pub fn from_parts(
        isolated: impl IntoIterator<Item = Label>,
        triples: impl IntoIterator<Item = Triple>,
    ) -> Self {
        let triples: BTreeSet<Triple> = triples.into_iter().collect();
        let mut nodes: BTreeSet<Label> = isolated.into_iter().collect();
        for t in &triples {
            nodes.insert(t.subject.clone());
            nodes.insert(t.object.clone());
        }
        Graph { nodes, triples }
    }

    pub fn from_triples(triples: impl IntoIterator<Item = Triple>) -> Self {
        Graph::from_parts(std::iter::empty(), triples)
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = Label>) -> Self {
        Graph::from_parts(nodes, std::iter::empty())
    }

    pub fn nodes(&self) -> &BTreeSet<Label> {
        &self.nodes
    }

    pub fn triples(&self) -> &BTreeSet<Triple> {
        &self.triples
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.triples.is_empty()
    }

    /// Nodes that are neither the subject nor the object of a triple.
    pub fn isolated_nodes(&self) -> BTreeSet<&Label> {
        let mut used = BTreeSet::new();
        for t in &self.triples {
            used.insert(&t.subject);
            used.insert(&t.object);
        }
        self.nodes.iter().filter(|n| !used.contains(n)).collect()
    }

    /// Nodes and predicates.
    pub fn labels(&self) -> BTreeSet<&Label> {
        self.nodes
            .iter()
            .chain(self.triples.iter().map(|t| &t.predicate))
            .collect()
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        self.labels()
            .into_iter()
            .filter_map(Label::as_var)
            .collect()
    }

    pub fn consts(&self) -> BTreeSet<&ConstValue> {
        self.labels()
            .into_iter()
            .filter_map(Label::as_const)
            .collect()
    }

    pub fn has_var(&self, name: &str) -> bool {
        self.nodes
            .iter()
            .chain(self.triples.iter().map(|t| &t.predicate))
            .any(|l| l.as_var() == Some(name))
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        g.nodes.extend(other.nodes.iter().cloned());
        g.triples.extend(other.triples.iter().cloned());
        g
    }

    /// Same as [`Graph::union`] but consumes `self`.
    pub fn union_with(mut self, other: &Graph) -> Graph {
        self.nodes.extend(other.nodes.iter().cloned());
        self.triples.extend(other.triples.iter().cloned());
        self
    }

    /// Returns this graph with `node` added.
    pub fn with_node(mut self, node: Label) -> Graph {
        self.nodes.insert(node);
        self
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.nodes.is_subset(&other.nodes) && self.triples.is_subset(&other.triples)
    }

    /// Image of the graph by a map defined on its variables; constants are
    /// fixed.
    pub fn image(&self, f: &Assignment) -> Result<Graph, GraphError> {
        let apply = |l: &Label| -> Result<Label, GraphError> {
            match l {
                Label::Var(v) => f
                    .get(v)
                    .cloned()
                    .ok_or_else(|| GraphError::UnboundVariable(v.clone())),
                c => Ok(c.clone()),
            }
        };
        let nodes = self.nodes.iter().map(apply).collect::<Result<_, _>>()?;
        let triples = self
            .triples
            .iter()
            .map(|t| {
                Ok(Triple::new(
                    apply(&t.subject)?,
                    apply(&t.predicate)?,
                    apply(&t.object)?,
                ))
            })
            .collect::<Result<_, _>>()?;
        Ok(Graph { nodes, triples })
    }

    /// Union of the images of the graph by each map in `fs`.
    pub fn image_by_set<'a>(
        &self,
        fs: impl IntoIterator<Item = &'a Assignment>,
    ) -> Result<Graph, GraphError> {
        fs.into_iter()
            .try_fold(Graph::empty(), |acc, f| Ok(acc.union_with(&self.image(f)?)))
    }

    /// Renames variables by `f`; variables missing from `f` are kept.
    pub fn rename_vars(&self, f: &BTreeMap<String, String>) -> Graph {
        let apply = |l: &Label| match l {
            Label::Var(v) => Label::Var(f.get(v).cloned().unwrap_or_else(|| v.clone())),
            c => c.clone(),
        };
        Graph {
            nodes: self.nodes.iter().map(apply).collect(),
            triples: self.triples.iter().map(|t| t.map(apply)).collect(),
        }
    }

    pub fn is_isomorphic_to(&self, other: &Graph) -> bool {
        find_isomorphism(self, other, |_| true).is_some()
    }
}

/// Searches for a bijection between the variables of `a` and `b` that maps
/// `a` onto `b` (constants fixed) and that `accept` approves.
///
/// Backtracking over variables in decreasing occurrence order; candidates
/// must share the occurrence signature of the variable they replace.
pub fn find_isomorphism(
    a: &Graph,
    b: &Graph,
    mut accept: impl FnMut(&BTreeMap<String, String>) -> bool,
) -> Option<BTreeMap<String, String>> {
    if a.nodes.len() != b.nodes.len() || a.triples.len() != b.triples.len() {
        return None;
    }
    if a.consts() != b.consts() {
        return None;
    }
    let sig_a = signatures(a);
    let sig_b = signatures(b);
    if sig_a.len() != sig_b.len() {
        return None;
    }
    let mut sorted_a: Vec<Vec<usize>> = sig_a.values().cloned().collect();
    let mut sorted_b: Vec<Vec<usize>> = sig_b.values().cloned().collect();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return None;
    }

    let mut order: Vec<&str> = sig_a.keys().map(String::as_str).collect();
    order.sort_by_key(|v| std::cmp::Reverse(sig_a[*v].iter().sum::<usize>()));

    struct Search<'g, F> {
        a: &'g Graph,
        b: &'g Graph,
        order: Vec<&'g str>,
        sig_a: &'g BTreeMap<String, Vec<usize>>,
        sig_b: &'g BTreeMap<String, Vec<usize>>,
        map: BTreeMap<String, String>,
        used: BTreeSet<&'g str>,
        accept: F,
    }

    impl<'g, F: FnMut(&BTreeMap<String, String>) -> bool> Search<'g, F> {
        fn consistent(&self) -> bool {
            // Every triple of `a` whose variables are all mapped must land in `b`.
            self.a.triples.iter().all(|t| {
                let mapped: Option<Vec<Label>> = t
                    .labels()
                    .iter()
                    .map(|l| match l {
                        Label::Var(v) => self.map.get(v).map(|w| Label::Var(w.clone())),
                        c => Some((*c).clone()),
                    })
                    .collect();
                match mapped {
                    Some(v) => self.b.triples.contains(&Triple::new(
                        v[0].clone(),
                        v[1].clone(),
                        v[2].clone(),
                    )),
                    None => true,
                }
            })
        }

        fn run(&mut self, depth: usize) -> bool {
            if depth == self.order.len() {
                let image = self.a.rename_vars(&self.map);
                return image == *self.b && (self.accept)(&self.map);
            }
            let v = self.order[depth];
            let candidates: Vec<&'g str> = self
                .sig_b
                .iter()
                .filter(|(w, s)| !self.used.contains(w.as_str()) && **s == self.sig_a[v])
                .map(|(w, _)| w.as_str())
                .collect();
            for w in candidates {
                self.map.insert(v.to_string(), w.to_string());
                self.used.insert(w);
                if self.consistent() && self.run(depth + 1) {
                    return true;
                }
                self.used.remove(w);
                self.map.remove(v);
            }
            false
        }
    }

    let mut search = Search {
        a,
        b,
        order,
        sig_a: &sig_a,
        sig_b: &sig_b,
        map: BTreeMap::new(),
        used: BTreeSet::new(),
        accept: &mut accept,
    };
    if search.run(0) {
        Some(search.map)
    } else {
        None
    }
}

/// Per variable: [isolated-node, subject, predicate, object] occurrence counts.
fn signatures(g: &Graph) -> BTreeMap<String, Vec<usize>> {
    let mut sig: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for v in g.vars() {
        sig.insert(v.to_string(), vec![0; 4]);
    }
    for n in g.isolated_nodes() {
        if let Label::Var(v) = n {
            sig.get_mut(v).unwrap()[0] += 1;
        }
    }
    for t in &g.triples {
        for (i, l) in t.labels().iter().enumerate() {
            if let Label::Var(v) = l {
                sig.get_mut(v).unwrap()[i + 1] += 1;
            }
        }
    }
    sig
}
