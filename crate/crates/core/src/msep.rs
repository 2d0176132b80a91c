//! m-separation on mixed graphs.
//!
//! The production test replaces every bidirected edge by a fresh latent
//! parent of both endpoints and runs a reachability ("Bayes ball") search
//! for active trails in the resulting DAG. [`m_separated_bruteforce`]
//! enumerates simple paths in the mixed graph directly and applies the
//! blocking rule literally; it exists to cross-check the fast version.

use std::collections::{BTreeMap, VecDeque};

use crate::admg::{AugmentedAdmg, VertexSet};
use crate::error::{Error, Result};

/// Largest graph accepted by [`m_separated_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 12;

fn check_query(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet, w: &VertexSet) -> Result<()> {
    for s in [x, y, w] {
        g.check_members(s)?;
    }
    let overlap = x
        .intersection(y)
        .union(&x.intersection(w))
        .union(&y.intersection(w));
    if overlap.is_empty() {
        Ok(())
    } else {
        Err(Error::Overlap(overlap))
    }
}

/// DAG over the observed vertices plus one latent per bidirected edge.
struct LatentDag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    index: BTreeMap<String, usize>,
}

impl LatentDag {
    fn new(g: &AugmentedAdmg) -> Self {
        let index: BTreeMap<String, usize> = g
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let n = index.len() + g.num_bidirected();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (a, b) in g.directed_edges() {
            let (a, b) = (index[a], index[b]);
            parents[b].push(a);
            children[a].push(b);
        }
        for (k, (a, b)) in g.bidirected_edges().enumerate() {
            let u = index.len() + k;
            for v in [index[a], index[b]] {
                parents[v].push(u);
                children[u].push(v);
            }
        }
        LatentDag {
            parents,
            children,
            index,
        }
    }

    fn mask(&self, set: &VertexSet) -> Vec<bool> {
        let mut m = vec![false; self.parents.len()];
        for v in set {
            m[self.index[v]] = true;
        }
        m
    }

    fn ancestor_mask(&self, seeds: &[bool]) -> Vec<bool> {
        let mut anc = seeds.to_vec();
        let mut stack: Vec<usize> = (0..anc.len()).filter(|&i| anc[i]).collect();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if !anc[p] {
                    anc[p] = true;
                    stack.push(p);
                }
            }
        }
        anc
    }
}

/// `(X ⊥ Y | W)` in `g`.
///
/// Errors if the three sets are not pairwise disjoint or name unknown vertices.
pub fn m_separated(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet, w: &VertexSet) -> Result<bool> {
    check_query(g, x, y, w)?;
    if x.is_empty() || y.is_empty() {
        return Ok(true);
    }
    let dag = LatentDag::new(g);
    let observed = dag.mask(w);
    let anc = dag.ancestor_mask(&observed);
    let target = dag.mask(y);

    // direction: true = arrived from a child (moving up), false = from a parent
    let n = dag.parents.len();
    let mut seen = vec![[false; 2]; n];
    let mut queue: VecDeque<(usize, bool)> = x.iter().map(|v| (dag.index[v], true)).collect();
    while let Some((v, up)) = queue.pop_front() {
        let slot = &mut seen[v][usize::from(up)];
        if *slot {
            continue;
        }
        *slot = true;
        if !observed[v] && target[v] {
            return Ok(false);
        }
        if up {
            if !observed[v] {
                queue.extend(dag.parents[v].iter().map(|&p| (p, true)));
                queue.extend(dag.children[v].iter().map(|&c| (c, false)));
            }
        } else {
            if !observed[v] {
                queue.extend(dag.children[v].iter().map(|&c| (c, false)));
            }
            if anc[v] {
                queue.extend(dag.parents[v].iter().map(|&p| (p, true)));
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum EdgeKind {
    /// `current -> next`
    Forward,
    /// `current <- next`
    Backward,
    Bidirected,
}

impl EdgeKind {
    fn head_at_next(self) -> bool {
        matches!(self, EdgeKind::Forward | EdgeKind::Bidirected)
    }

    fn head_at_current(self) -> bool {
        matches!(self, EdgeKind::Backward | EdgeKind::Bidirected)
    }
}

/// Same contract as [`m_separated`], decided by enumerating every simple path.
///
/// Exponential; refuses graphs with more than [`BRUTEFORCE_CAP`] vertices.
pub fn m_separated_bruteforce(
    g: &AugmentedAdmg,
    x: &VertexSet,
    y: &VertexSet,
    w: &VertexSet,
) -> Result<bool> {
    if g.vertices().len() > BRUTEFORCE_CAP {
        return Err(Error::SizeCap {
            cap: BRUTEFORCE_CAP,
            actual: g.vertices().len(),
        });
    }
    check_query(g, x, y, w)?;
    let anc_w = g.ancestors(w)?;

    struct Search<'a> {
        g: &'a AugmentedAdmg,
        y: &'a VertexSet,
        w: &'a VertexSet,
        anc_w: &'a VertexSet,
        path: Vec<String>,
        kinds: Vec<EdgeKind>,
    }

    impl Search<'_> {
        fn edges_between(&self, a: &str, b: &str) -> Vec<EdgeKind> {
            let mut out = Vec::new();
            if self.g.has_directed(a, b) {
                out.push(EdgeKind::Forward);
            }
            if self.g.has_directed(b, a) {
                out.push(EdgeKind::Backward);
            }
            if self.g.has_bidirected(a, b) {
                out.push(EdgeKind::Bidirected);
            }
            out
        }

        /// Blocking status of the interior vertex at the end of the current path
        /// given the edge used to arrive there and the edge used to leave.
        fn interior_blocks(&self, v: &str, into: EdgeKind, out: EdgeKind) -> bool {
            let collider = into.head_at_next() && out.head_at_current();
            if collider {
                !self.anc_w.contains(v)
            } else {
                self.w.contains(v)
            }
        }

        fn open_path_exists(&mut self) -> bool {
            let current = self.path.last().expect("non-empty").clone();
            if self.path.len() > 1 && self.y.contains(&current) {
                return true;
            }
            for next in self.g.vertices().iter() {
                if self.path.contains(next) {
                    continue;
                }
                for kind in self.edges_between(&current, next) {
                    if let Some(&into) = self.kinds.last() {
                        if self.interior_blocks(&current, into, kind) {
                            continue;
                        }
                    }
                    self.path.push(next.clone());
                    self.kinds.push(kind);
                    let found = self.open_path_exists();
                    self.path.pop();
                    self.kinds.pop();
                    if found {
                        return true;
                    }
                }
            }
            false
        }
    }

    for start in x {
        let mut search = Search {
            g,
            y,
            w,
            anc_w: &anc_w,
            path: vec![start.clone()],
            kinds: Vec::new(),
        };
        if search.open_path_exists() {
            return Ok(false);
        }
    }
    Ok(true)
}
