//! Enumeration of all matches from a graph into another.
//!
//! Backtracking over the triples of the pattern graph first, always expanding
//! the triple with the most positions already fixed, then over the nodes left
//! unassigned (isolated variable nodes), which may go to any node of the
//! target.

use std::collections::BTreeMap;

use crate::algebra::{Match, MatchSet};
use crate::graph::{Assignment, Graph, Triple};
use crate::label::Label;

struct Matcher<'g> {
    pattern: Vec<&'g Triple>,
    nodes: Vec<&'g Label>,
    target: &'g Graph,
    by_predicate: BTreeMap<&'g Label, Vec<&'g Triple>>,
    done: Vec<bool>,
    assignment: Assignment,
    out: Vec<Match>,
}

impl<'g> Matcher<'g> {
    fn bound(&self, l: &Label) -> Option<Label> {
        match l {
            Label::Var(v) => self.assignment.get(v).cloned(),
            c => Some(c.clone()),
        }
    }

    fn fixed_positions(&self, t: &Triple) -> usize {
        t.labels()
            .iter()
            .filter(|l| self.bound(l).is_some())
            .count()
    }

    fn next_triple(&self) -> Option<usize> {
        (0..self.pattern.len())
            .filter(|&i| !self.done[i])
            .max_by_key(|&i| (self.fixed_positions(self.pattern[i]), std::cmp::Reverse(i)))
    }

    /// Tries to extend the assignment so that `pat` maps onto `t`; returns the
    /// variables newly bound, or `None` on conflict (the assignment is then
    /// left unchanged).
    fn unify(&mut self, pat: &Triple, t: &Triple) -> Option<Vec<String>> {
        let mut added = Vec::new();
        for (p, l) in pat.labels().into_iter().zip(t.labels()) {
            let ok = match p {
                Label::Var(v) => match self.assignment.get(v) {
                    Some(b) => b == l,
                    None => {
                        self.assignment.insert(v.clone(), l.clone());
                        added.push(v.clone());
                        true
                    }
                },
                c => c == l,
            };
            if !ok {
                for v in &added {
                    self.assignment.remove(v);
                }
                return None;
            }
        }
        Some(added)
    }

    fn search_triples(&mut self) {
        let Some(i) = self.next_triple() else {
            self.search_nodes(0);
            return;
        };
        let pat = self.pattern[i];
        let candidates: Vec<&'g Triple> = match self.bound(&pat.predicate) {
            Some(p) => self.by_predicate.get(&p).cloned().unwrap_or_default(),
            None => self.target.triples().iter().collect(),
        };
        self.done[i] = true;
        for t in candidates {
            if let Some(added) = self.unify(pat, t) {
                self.search_triples();
                for v in added {
                    self.assignment.remove(&v);
                }
            }
        }
        self.done[i] = false;
    }

    fn search_nodes(&mut self, k: usize) {
        if k == self.nodes.len() {
            self.out.push(Match::new(self.assignment.clone()));
            return;
        }
        let n = self.nodes[k];
        match self.bound(n) {
            Some(image) => {
                if self.target.nodes().contains(&image) {
                    self.search_nodes(k + 1);
                }
            }
            None => {
                let v = n
                    .as_var()
                    .expect("unbound labels are variables")
                    .to_string();
                for image in self.target.nodes() {
                    self.assignment.insert(v.clone(), image.clone());
                    self.search_nodes(k + 1);
                }
                self.assignment.remove(&v);
            }
        }
    }
}

/// All matches from `x` to `g`, as a match set `x ⇒ g`.
pub fn enumerate_matches(x: &Graph, g: &Graph) -> MatchSet {
    let mut by_predicate: BTreeMap<&Label, Vec<&Triple>> = BTreeMap::new();
    for t in g.triples() {
        by_predicate.entry(&t.predicate).or_default().push(t);
    }
    let mut matcher = Matcher {
        pattern: x.triples().iter().collect(),
        nodes: x.nodes().iter().collect(),
        target: g,
        by_predicate,
        done: vec![false; x.triples().len()],
        assignment: Assignment::new(),
        out: Vec::new(),
    };
    matcher.search_triples();
    MatchSet::from_parts(x.clone(), g.clone(), matcher.out)
}
