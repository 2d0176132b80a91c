//! Augmented acyclic directed mixed graphs.
//!
//! An [`AugmentedAdmg`] holds observed vertices, an optional selection vertex
//! (a sink modelling membership in the sub-population), directed edges and
//! bidirected edges. Graphs are validated once at construction; every
//! operation afterwards is a pure function returning a fresh value.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lexicographically ordered set of vertex names.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<String>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(name: impl Into<String>) -> Self {
        let mut s = Self::new();
        s.insert(name);
        s
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn remove(&mut self, name: &str) -> bool {
        self.0.remove(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::collections::btree_set::Iter<'_, String> {
        self.0.iter()
    }

    /// Least member in lexicographic order.
    pub fn first(&self) -> Option<&String> {
        self.0.iter().next()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn to_vec(&self) -> Vec<String> {
        self.0.iter().cloned().collect()
    }

    /// Comma-separated member list without braces.
    pub fn join(&self, sep: &str) -> String {
        self.to_vec().join(sep)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.join(","))
    }
}

impl<S: Into<String>> FromIterator<S> for VertexSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        VertexSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<S: Into<String>> Extend<S> for VertexSet {
    fn extend<I: IntoIterator<Item = S>>(&mut self, iter: I) {
        self.0.extend(iter.into_iter().map(Into::into));
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for VertexSet {
    type Item = String;
    type IntoIter = std::collections::btree_set::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// A permutation of a vertex set in which every parent precedes its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopoOrder(Vec<String>);

impl TopoOrder {
    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `i` vertices of the order.
    pub fn prefix(&self, i: usize) -> VertexSet {
        self.0[..i].iter().cloned().collect()
    }

    pub fn into_vec(self) -> Vec<String> {
        self.0
    }
}

/// Graph over `V ∪ {S}` with directed and bidirected edges and no directed cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedAdmg {
    vertices: VertexSet,
    selection: Option<String>,
    directed: BTreeSet<(String, String)>,
    bidirected: BTreeSet<(String, String)>,
    parents: BTreeMap<String, VertexSet>,
    children: BTreeMap<String, VertexSet>,
    siblings: BTreeMap<String, VertexSet>,
}

fn ordered_pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

impl AugmentedAdmg {
    /// Builds and validates a graph.
    ///
    /// Rejects self-loops, undeclared endpoints, duplicate edges, directed
    /// cycles, and a selection vertex with children. A directed and a
    /// bidirected edge between the same pair may coexist.
    pub fn new<V, D, B>(
        vertices: V,
        directed: D,
        bidirected: B,
        selection: Option<String>,
    ) -> Result<Self>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        D: IntoIterator<Item = (String, String)>,
        B: IntoIterator<Item = (String, String)>,
    {
        let vertices: VertexSet = vertices.into_iter().collect();
        let mut dir = BTreeSet::new();
        for (a, b) in directed {
            check_edge(&vertices, &a, &b)?;
            if !dir.insert((a.clone(), b.clone())) {
                return Err(Error::DuplicateEdge {
                    kind: "directed",
                    from: a,
                    to: b,
                });
            }
        }
        let mut bi = BTreeSet::new();
        for (a, b) in bidirected {
            check_edge(&vertices, &a, &b)?;
            if !bi.insert(ordered_pair(&a, &b)) {
                return Err(Error::DuplicateEdge {
                    kind: "bidirected",
                    from: a,
                    to: b,
                });
            }
        }
        if let Some(s) = &selection {
            if !vertices.contains(s) {
                return Err(Error::UnknownVertex(s.clone()));
            }
        }
        Self::assemble(vertices, dir, bi, selection)
    }

    fn assemble(
        vertices: VertexSet,
        directed: BTreeSet<(String, String)>,
        bidirected: BTreeSet<(String, String)>,
        selection: Option<String>,
    ) -> Result<Self> {
        let mut parents: BTreeMap<String, VertexSet> = vertices
            .iter()
            .map(|v| (v.clone(), VertexSet::new()))
            .collect();
        let mut children = parents.clone();
        let mut siblings = parents.clone();
        for (a, b) in &directed {
            parents
                .get_mut(b)
                .expect("validated endpoint")
                .insert(a.clone());
            children
                .get_mut(a)
                .expect("validated endpoint")
                .insert(b.clone());
        }
        for (a, b) in &bidirected {
            siblings
                .get_mut(a)
                .expect("validated endpoint")
                .insert(b.clone());
            siblings
                .get_mut(b)
                .expect("validated endpoint")
                .insert(a.clone());
        }
        let g = AugmentedAdmg {
            vertices,
            selection,
            directed,
            bidirected,
            parents,
            children,
            siblings,
        };
        if let Some(cycle) = g.find_cycle() {
            return Err(Error::Cycle(cycle));
        }
        if let Some(s) = &g.selection {
            let kids = &g.children[s];
            if !kids.is_empty() {
                return Err(Error::SelectionHasChildren {
                    selection: s.clone(),
                    children: kids.clone(),
                });
            }
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn selection(&self) -> Option<&str> {
        self.selection.as_deref()
    }

    /// Vertices other than the selection vertex.
    pub fn observed(&self) -> VertexSet {
        match &self.selection {
            Some(s) => {
                let mut v = self.vertices.clone();
                v.remove(s);
                v
            }
            None => self.vertices.clone(),
        }
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.directed.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    /// Bidirected edges as `(a, b)` with `a < b`.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.bidirected
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn has_directed(&self, from: &str, to: &str) -> bool {
        self.directed.contains(&(from.to_owned(), to.to_owned()))
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        self.bidirected.contains(&ordered_pair(a, b))
    }

    pub fn num_directed(&self) -> usize {
        self.directed.len()
    }

    pub fn num_bidirected(&self) -> usize {
        self.bidirected.len()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    /// Fails with the first member of `set` that is not a vertex.
    pub fn check_members(&self, set: &VertexSet) -> Result<()> {
        match set.iter().find(|v| !self.vertices.contains(v)) {
            Some(v) => Err(Error::UnknownVertex(v.clone())),
            None => Ok(()),
        }
    }

    fn check_vertex(&self, v: &str) -> Result<()> {
        if self.vertices.contains(v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_owned()))
        }
    }

    pub fn parents(&self, v: &str) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.parents[v].clone())
    }

    pub fn children(&self, v: &str) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.children[v].clone())
    }

    /// Endpoints of bidirected edges at `v`.
    pub fn siblings(&self, v: &str) -> Result<VertexSet> {
        self.check_vertex(v)?;
        Ok(self.siblings[v].clone())
    }

    /// Reflexive-transitive closure of the parent relation.
    pub fn ancestors(&self, seeds: &VertexSet) -> Result<VertexSet> {
        self.check_members(seeds)?;
        let mut out = seeds.clone();
        let mut stack: Vec<&String> = seeds.iter().collect();
        while let Some(v) = stack.pop() {
            for p in &self.parents[v] {
                if out.insert(p.clone()) {
                    stack.push(p);
                }
            }
        }
        Ok(out)
    }

    /// `G[keep]`. The selection marker survives only if the selection vertex is kept.
    pub fn induced_subgraph(&self, keep: &VertexSet) -> Result<AugmentedAdmg> {
        self.check_members(keep)?;
        let directed = self
            .directed
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .cloned()
            .collect();
        let bidirected = self
            .bidirected
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .cloned()
            .collect();
        let selection = self.selection.clone().filter(|s| keep.contains(s));
        Self::assemble(keep.clone(), directed, bidirected, selection)
    }

    /// Removes every edge with an arrowhead at `bar_in` (directed edges into it
    /// and all bidirected edges touching it) and every directed edge out of
    /// `bar_out`.
    pub fn edge_surgery(&self, bar_in: &VertexSet, bar_out: &VertexSet) -> Result<AugmentedAdmg> {
        self.check_members(bar_in)?;
        self.check_members(bar_out)?;
        let directed = self
            .directed
            .iter()
            .filter(|(a, b)| !bar_in.contains(b) && !bar_out.contains(a))
            .cloned()
            .collect();
        let bidirected = self
            .bidirected
            .iter()
            .filter(|(a, b)| !bar_in.contains(a) && !bar_in.contains(b))
            .cloned()
            .collect();
        Self::assemble(
            self.vertices.clone(),
            directed,
            bidirected,
            self.selection.clone(),
        )
    }

    /// Topological order of `scope` under the directed edges of `G[scope]`;
    /// ties are broken lexicographically.
    pub fn topological_order(&self, scope: &VertexSet) -> Result<TopoOrder> {
        self.topological_order_with_priority(scope, &VertexSet::new())
    }

    /// Like [`topological_order`](Self::topological_order), but whenever a
    /// vertex of `priority` is available it is emitted before any other.
    /// If `priority` is ancestral in `G[scope]` it forms a prefix of the order.
    pub fn topological_order_with_priority(
        &self,
        scope: &VertexSet,
        priority: &VertexSet,
    ) -> Result<TopoOrder> {
        self.check_members(scope)?;
        let mut indegree: BTreeMap<&str, usize> = scope
            .iter()
            .map(|v| {
                let d = self.parents[v].iter().filter(|p| scope.contains(p)).count();
                (v.as_str(), d)
            })
            .collect();
        // (not prioritised, name) so that priority vertices sort first
        let mut ready: BTreeSet<(bool, &str)> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| (!priority.contains(v), v))
            .collect();
        let mut order = Vec::with_capacity(scope.len());
        while let Some(entry) = ready.pop_first() {
            let v = entry.1;
            order.push(v.to_owned());
            for c in &self.children[v] {
                if let Some(d) = indegree.get_mut(c.as_str()) {
                    *d -= 1;
                    if *d == 0 {
                        ready.insert((!priority.contains(c), c.as_str()));
                    }
                }
            }
        }
        if order.len() != scope.len() {
            return Err(Error::Internal(
                "cycle encountered in a validated graph".into(),
            ));
        }
        Ok(TopoOrder(order))
    }

    /// `(V^s, V^s̄)`: observed ancestors of the selection vertex and the rest.
    pub fn split_by_selection(&self) -> Result<(VertexSet, VertexSet)> {
        let s = self.selection.as_ref().ok_or(Error::MissingSelection)?;
        let anc = self.ancestors(&VertexSet::singleton(s.clone()))?;
        let observed = self.observed();
        let vs = observed.intersection(&anc);
        let vns = observed.difference(&anc);
        Ok((vs, vns))
    }

    /// Ancestors of the selection vertex, the selection vertex included.
    pub fn selection_ancestors(&self) -> Result<VertexSet> {
        let s = self.selection.as_ref().ok_or(Error::MissingSelection)?;
        self.ancestors(&VertexSet::singleton(s.clone()))
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut mark: BTreeMap<&str, Mark> = self
            .vertices
            .iter()
            .map(|v| (v.as_str(), Mark::New))
            .collect();
        for root in &self.vertices {
            if mark[root.as_str()] != Mark::New {
                continue;
            }
            // iterative DFS keeping the active path
            let mut path: Vec<&str> = vec![root];
            let mut iters: Vec<std::collections::btree_set::Iter<'_, String>> =
                vec![self.children[root].iter()];
            mark.insert(root, Mark::Active);
            while let Some(it) = iters.last_mut() {
                match it.next() {
                    Some(c) => match mark[c.as_str()] {
                        Mark::Active => {
                            let start = path.iter().position(|v| *v == c).expect("on path");
                            let mut cycle: Vec<String> =
                                path[start..].iter().map(|v| v.to_string()).collect();
                            cycle.push(c.clone());
                            return Some(cycle);
                        }
                        Mark::New => {
                            mark.insert(c, Mark::Active);
                            path.push(c);
                            iters.push(self.children[c].iter());
                        }
                        Mark::Done => {}
                    },
                    None => {
                        let v = path.pop().expect("non-empty path");
                        mark.insert(v, Mark::Done);
                        iters.pop();
                    }
                }
            }
        }
        None
    }
}

fn check_edge(vertices: &VertexSet, a: &str, b: &str) -> Result<()> {
    for v in [a, b] {
        if !vertices.contains(v) {
            return Err(Error::UnknownVertex(v.to_owned()));
        }
    }
    if a == b {
        return Err(Error::SelfLoop(a.to_owned()));
    }
    Ok(())
}

/// Incremental construction; vertices are implied by edges.
#[derive(Clone, Debug, Default)]
pub struct AdmgBuilder {
    vertices: Vec<String>,
    directed: Vec<(String, String)>,
    bidirected: Vec<(String, String)>,
    selection: Option<String>,
}

impl AdmgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, v: &str) -> Self {
        self.vertices.push(v.to_owned());
        self
    }

    pub fn directed(mut self, from: &str, to: &str) -> Self {
        self.vertices.extend([from.to_owned(), to.to_owned()]);
        self.directed.push((from.to_owned(), to.to_owned()));
        self
    }

    pub fn bidirected(mut self, a: &str, b: &str) -> Self {
        self.vertices.extend([a.to_owned(), b.to_owned()]);
        self.bidirected.push((a.to_owned(), b.to_owned()));
        self
    }

    pub fn select(mut self, s: &str) -> Self {
        self.vertices.push(s.to_owned());
        self.selection = Some(s.to_owned());
        self
    }

    pub fn build(self) -> Result<AugmentedAdmg> {
        AugmentedAdmg::new(
            self.vertices,
            self.directed,
            self.bidirected,
            self.selection,
        )
    }
}
