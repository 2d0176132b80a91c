//! Random augmented ADMGs and queries for property tests and sweeps.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::admg::{AugmentedAdmg, VertexSet};

#[derive(Clone, Debug, PartialEq)]
pub struct GraphConfig {
    /// Number of observed vertices, named `V0, V1, …`.
    pub observed: usize,
    pub p_directed: f64,
    pub p_bidirected: f64,
    /// Probability that an observed vertex is a parent of `S`.
    pub p_selection_parent: f64,
    /// Whether to add the selection vertex `S` at all.
    pub with_selection: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            observed: 6,
            p_directed: 0.3,
            p_bidirected: 0.2,
            p_selection_parent: 0.3,
            with_selection: true,
        }
    }
}

/// Random graph: directed edges follow a random permutation of the observed
/// vertices, `S` (if present) is a sink, and bidirected edges may touch `S`.
pub fn random_admg<R: Rng>(rng: &mut R, config: &GraphConfig) -> AugmentedAdmg {
    let mut order: Vec<String> = (0..config.observed).map(|i| format!("V{i}")).collect();
    order.shuffle(rng);
    let mut directed = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if rng.gen_bool(config.p_directed) {
                directed.push((order[i].clone(), order[j].clone()));
            }
        }
    }
    let mut all = order.clone();
    if config.with_selection {
        for v in &order {
            if rng.gen_bool(config.p_selection_parent) {
                directed.push((v.clone(), "S".to_owned()));
            }
        }
        all.push("S".to_owned());
    }
    let mut bidirected = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if rng.gen_bool(config.p_bidirected) {
                bidirected.push((all[i].clone(), all[j].clone()));
            }
        }
    }
    let selection = config.with_selection.then(|| "S".to_owned());
    AugmentedAdmg::new(all, directed, bidirected, selection)
        .expect("construction is acyclic with S a sink")
}

/// Disjoint `(X, Y)` over the observed vertices with `1 ≤ |Y| ≤ 2` and `|X| ≤ 2`.
pub fn random_query<R: Rng>(rng: &mut R, g: &AugmentedAdmg) -> (VertexSet, VertexSet) {
    let mut pool = g.observed().to_vec();
    pool.shuffle(rng);
    let ny = rng.gen_range(1..=2.min(pool.len()));
    let nx = rng.gen_range(0..=2.min(pool.len() - ny));
    let y = pool[..ny].iter().cloned().collect();
    let x = pool[ny..ny + nx].iter().cloned().collect();
    (x, y)
}

/// Three pairwise disjoint subsets of `g`'s vertices, the first two non-empty.
pub fn random_separation_query<R: Rng>(
    rng: &mut R,
    g: &AugmentedAdmg,
) -> (VertexSet, VertexSet, VertexSet) {
    let mut pool = g.vertices().to_vec();
    pool.shuffle(rng);
    let nx = rng.gen_range(1..=2.min(pool.len() - 1));
    let ny = rng.gen_range(1..=2.min(pool.len() - nx));
    let nw = rng.gen_range(0..=pool.len() - nx - ny);
    let x = pool[..nx].iter().cloned().collect();
    let y = pool[nx..nx + ny].iter().cloned().collect();
    let w = pool[nx + ny..nx + ny + nw].iter().cloned().collect();
    (x, y, w)
}
