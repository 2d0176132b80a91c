//! Exact ground truth from finite-domain structural causal models.
//!
//! Each bidirected edge becomes one shared latent parent of its endpoints.
//! Distributions are obtained by enumerating every joint state of the
//! latents, the observed variables and the selection vertex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};
use serde::{Deserialize, Serialize};

use crate::admg::{AdmgBuilder, AugmentedAdmg, VertexSet};
use crate::error::{Error, Result};
use crate::estimand::{Estimand, Evaluator};
use crate::identify::{s_id, FailureWitness, IdentifyResult};
use crate::table::{assignments, Assignment, ProbabilityTable};

/// Default cap on the number of joint states enumerated by the oracle.
pub const STATE_CAP: u128 = 1 << 24;

/// `P(variable | parents)`, one row per parent configuration (last parent fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub variable: String,
    pub parents: Vec<String>,
    pub parent_sizes: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    fn row_index(&self, parent_values: impl Iterator<Item = usize>) -> usize {
        parent_values
            .zip(&self.parent_sizes)
            .fold(0, |acc, (v, &k)| acc * k + v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Latent {
    pub name: String,
    pub endpoints: (String, String),
    pub prior: Vec<f64>,
}

/// A finite-domain SCM whose structure matches an augmented ADMG.
///
/// `cpts` covers the observed vertices in topological order; each lists the
/// observed graph parents first and the incident latents after them.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteScm {
    pub graph: AugmentedAdmg,
    pub observed: Vec<(String, usize)>,
    pub latents: Vec<Latent>,
    pub cpts: Vec<Cpt>,
    pub selection_cpt: Option<Cpt>,
}

fn latent_name(a: &str, b: &str) -> String {
    format!("U({a},{b})")
}

fn incident_latents(g: &AugmentedAdmg, v: &str) -> Vec<String> {
    g.bidirected_edges()
        .filter(|(a, b)| *a == v || *b == v)
        .map(|(a, b)| latent_name(a, b))
        .collect()
}

fn dirichlet_row<R: Rng>(rng: &mut R, k: usize, min_prob: f64) -> Vec<f64> {
    let flat = Dirichlet::new(&vec![1.0; k]).expect("k >= 2");
    let free = 1.0 - k as f64 * min_prob;
    flat.sample(rng)
        .into_iter()
        .map(|p| min_prob + free * p)
        .collect()
}

/// Random SCM for `g` with every observed variable and latent on `k` values.
///
/// Each CPT row is `min_prob + (1 - k·min_prob)·p` with `p` uniform on the
/// simplex, so every entry is at least `min_prob`. `P(S=1 | ·)` is uniform on
/// `[min_prob, 1 - min_prob]`.
pub fn random_scm(g: &AugmentedAdmg, k: usize, min_prob: f64, seed: u64) -> Result<DiscreteScm> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "domain size must be at least 2, got {k}"
        )));
    }
    if !(min_prob > 0.0 && min_prob <= 1.0 / k as f64) {
        return Err(Error::InvalidParameter(format!(
            "min_prob must lie in (0, 1/{k}], got {min_prob}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let latents = g
        .bidirected_edges()
        .map(|(a, b)| Latent {
            name: latent_name(a, b),
            endpoints: (a.to_owned(), b.to_owned()),
            prior: dirichlet_row(&mut rng, k, min_prob),
        })
        .collect();
    let observed_set = g.observed();
    let observed = observed_set.iter().map(|v| (v.clone(), k)).collect();
    let mut cpts = Vec::new();
    for v in g.topological_order(&observed_set)?.into_vec() {
        let mut parents = g.parents(&v)?.to_vec();
        parents.extend(incident_latents(g, &v));
        let parent_sizes = vec![k; parents.len()];
        let rows = (0..k.pow(parents.len() as u32))
            .map(|_| dirichlet_row(&mut rng, k, min_prob))
            .collect();
        cpts.push(Cpt {
            variable: v,
            parents,
            parent_sizes,
            rows,
        });
    }
    let selection_cpt = match g.selection() {
        Some(s) => {
            let mut parents = g.parents(s)?.to_vec();
            parents.extend(incident_latents(g, s));
            let parent_sizes = vec![k; parents.len()];
            let rows = (0..k.pow(parents.len() as u32))
                .map(|_| {
                    let p = rng.gen_range(min_prob..=1.0 - min_prob);
                    vec![1.0 - p, p]
                })
                .collect();
            Some(Cpt {
                variable: s.to_owned(),
                parents,
                parent_sizes,
                rows,
            })
        }
        None => None,
    };
    Ok(DiscreteScm {
        graph: g.clone(),
        observed,
        latents,
        cpts,
        selection_cpt,
    })
}

fn bern(p: f64, v: usize) -> f64 {
    if v == 1 {
        p
    } else {
        1.0 - p
    }
}

/// The XOR selection model: `X → Y`, `Z → S`, `X ↔ Z` through `U1`, `Y ↔ S` through `U2`.
///
/// `U1, U2 ~ Bern(0.5)`; `X = U1 ⊕ e_x`, `Z = U1 ⊕ e_z` with `e ~ Bern(0.2)`;
/// `Y = X ⊕ U2`; `S = (Z·e1) ⊕ (U2·e2) ⊕ e3` with `e ~ Bern(0.6, 0.9, 0.1)`.
pub fn appendix_d_model() -> DiscreteScm {
    let graph = AdmgBuilder::new()
        .directed("X", "Y")
        .bidirected("X", "Z")
        .directed("Z", "S")
        .bidirected("Y", "S")
        .select("S")
        .build()
        .expect("valid graph");
    let noisy_copy = |var: &str| Cpt {
        variable: var.to_owned(),
        parents: vec!["U1".to_owned()],
        parent_sizes: vec![2],
        rows: vec![vec![0.8, 0.2], vec![0.2, 0.8]],
    };
    let y = Cpt {
        variable: "Y".to_owned(),
        parents: vec!["X".to_owned(), "U2".to_owned()],
        parent_sizes: vec![2, 2],
        rows: (0..4)
            .map(|i| {
                let (x, u2) = (i / 2, i % 2);
                if x ^ u2 == 1 {
                    vec![0.0, 1.0]
                } else {
                    vec![1.0, 0.0]
                }
            })
            .collect(),
    };
    let s_rows = (0..4)
        .map(|i| {
            let (z, u2) = (i / 2, i % 2);
            let mut p1 = 0.0;
            for e in 0..8 {
                let (e1, e2, e3) = (e >> 2 & 1, e >> 1 & 1, e & 1);
                let w = bern(0.6, e1) * bern(0.9, e2) * bern(0.1, e3);
                if (z & e1) ^ (u2 & e2) ^ e3 == 1 {
                    p1 += w;
                }
            }
            vec![1.0 - p1, p1]
        })
        .collect();
    DiscreteScm {
        graph,
        observed: ["X", "Y", "Z"].iter().map(|v| (v.to_string(), 2)).collect(),
        latents: vec![
            Latent {
                name: "U1".to_owned(),
                endpoints: ("X".to_owned(), "Z".to_owned()),
                prior: vec![0.5, 0.5],
            },
            Latent {
                name: "U2".to_owned(),
                endpoints: ("S".to_owned(), "Y".to_owned()),
                prior: vec![0.5, 0.5],
            },
        ],
        cpts: vec![noisy_copy("X"), noisy_copy("Z"), y],
        selection_cpt: Some(Cpt {
            variable: "S".to_owned(),
            parents: vec!["Z".to_owned(), "U2".to_owned()],
            parent_sizes: vec![2, 2],
            rows: s_rows,
        }),
    }
}

impl DiscreteScm {
    fn observed_names(&self) -> VertexSet {
        self.observed.iter().map(|(v, _)| v.clone()).collect()
    }

    fn check_observed(&self, set: &VertexSet) -> Result<()> {
        let names = self.observed_names();
        match set.iter().find(|v| !names.contains(v)) {
            Some(v) => Err(Error::UnknownVertex(v.clone())),
            None => Ok(()),
        }
    }

    /// Sums out the latents from `Π_{v ∉ skip} P(v | pa(v))`, including the
    /// selection mechanism when there is one.
    ///
    /// The table lists the latents (if `keep_latents`), then the observed
    /// variables in `observed` order, then `S`. With `skip = X` the entry at
    /// `(x, v, s)` is `P_x(v, s)`.
    fn enumerate(
        &self,
        skip: &VertexSet,
        keep_latents: bool,
        cap: u128,
    ) -> Result<ProbabilityTable> {
        let mut names: Vec<String> = Vec::new();
        let mut sizes: Vec<usize> = Vec::new();
        for l in &self.latents {
            names.push(l.name.clone());
            sizes.push(l.prior.len());
        }
        let n_latent = names.len();
        for (v, k) in &self.observed {
            names.push(v.clone());
            sizes.push(*k);
        }
        if let Some(s) = &self.selection_cpt {
            names.push(s.variable.clone());
            sizes.push(2);
        }
        let states = sizes.iter().map(|&k| k as u128).product::<u128>();
        if states > cap {
            return Err(Error::StateSpace { states, cap });
        }
        let index = |name: &str| -> Result<usize> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownVertex(name.to_owned()))
        };

        // factors in enumeration order: latents, observed (CPT order), S
        struct Factor<'a> {
            var: usize,
            parents: Vec<usize>,
            cpt: Option<&'a Cpt>,
            prior: Option<&'a [f64]>,
        }
        let mut factors = Vec::new();
        for (i, l) in self.latents.iter().enumerate() {
            factors.push(Factor {
                var: i,
                parents: Vec::new(),
                cpt: None,
                prior: Some(&l.prior),
            });
        }
        for cpt in self.cpts.iter().chain(self.selection_cpt.as_ref()) {
            let parents = cpt
                .parents
                .iter()
                .map(|p| index(p))
                .collect::<Result<Vec<_>>>()?;
            factors.push(Factor {
                var: index(&cpt.variable)?,
                parents,
                cpt: (!skip.contains(&cpt.variable)).then_some(cpt),
                prior: None,
            });
        }
        if factors.len() != names.len() {
            return Err(Error::Internal(
                "every variable needs exactly one mechanism".into(),
            ));
        }

        let first_out = if keep_latents { 0 } else { n_latent };
        let out_sizes = &sizes[first_out..];
        let mut out = vec![0.0; out_sizes.iter().product()];
        let mut state = vec![0usize; names.len()];

        fn descend(
            depth: usize,
            weight: f64,
            factors: &[Factor<'_>],
            sizes: &[usize],
            state: &mut Vec<usize>,
            first_out: usize,
            out: &mut [f64],
        ) {
            if depth == factors.len() {
                let idx = state[first_out..]
                    .iter()
                    .zip(&sizes[first_out..])
                    .fold(0, |acc, (&v, &k)| acc * k + v);
                out[idx] += weight;
                return;
            }
            let f = &factors[depth];
            let row = f
                .cpt
                .map(|cpt| &cpt.rows[cpt.row_index(f.parents.iter().map(|&p| state[p]))]);
            for v in 0..sizes[f.var] {
                let p = match (f.prior, row) {
                    (Some(prior), _) => prior[v],
                    (None, Some(row)) => row[v],
                    (None, None) => 1.0,
                };
                if p == 0.0 {
                    continue;
                }
                state[f.var] = v;
                descend(depth + 1, weight * p, factors, sizes, state, first_out, out);
            }
        }
        descend(0, 1.0, &factors, &sizes, &mut state, first_out, &mut out);

        ProbabilityTable::new(names[first_out..].to_vec(), out_sizes.to_vec(), out)
    }

    fn selection_name(&self) -> Result<&str> {
        self.selection_cpt
            .as_ref()
            .map(|c| c.variable.as_str())
            .ok_or(Error::MissingSelection)
    }

    /// `P(V, S)`.
    pub fn joint(&self) -> Result<ProbabilityTable> {
        self.joint_with_cap(STATE_CAP)
    }

    pub fn joint_with_cap(&self, cap: u128) -> Result<ProbabilityTable> {
        self.enumerate(&VertexSet::new(), false, cap)
    }

    /// `P(U, V, S)` with the latents listed first.
    pub fn joint_with_latents(&self) -> Result<ProbabilityTable> {
        self.enumerate(&VertexSet::new(), true, STATE_CAP)
    }

    /// `P(V | S=1)`.
    pub fn observational_s(&self) -> Result<ProbabilityTable> {
        let s = self.selection_name()?;
        condition_on_selection(&self.joint()?, s)
    }

    /// `P_x(v ∖ x, s)` for every `x`, as one table over `V ∪ {S}`.
    pub fn intervention_family(&self, x: &VertexSet) -> Result<ProbabilityTable> {
        self.check_observed(x)?;
        self.enumerate(x, false, STATE_CAP)
    }

    /// `P_x(V ∖ X | S=1)`.
    pub fn interventional_s(&self, intervention: &Assignment) -> Result<ProbabilityTable> {
        let x = intervention.vars();
        let s = self.selection_name()?;
        let sliced = self.intervention_family(&x)?.slice(intervention)?;
        condition_on_selection(&sliced, s)
    }

    /// `P_x(V ∖ X)`.
    pub fn interventional_population(&self, intervention: &Assignment) -> Result<ProbabilityTable> {
        let x = intervention.vars();
        let sliced = self.intervention_family(&x)?.slice(intervention)?;
        sliced.marginal(&self.observed_names().difference(&x))
    }

    /// `P_{V ∖ keep}(keep, S=1)` as a function of every observed variable.
    pub fn q_with_selection(&self, keep: &VertexSet) -> Result<ProbabilityTable> {
        self.check_observed(keep)?;
        let s = self.selection_name()?;
        let family = self.intervention_family(&self.observed_names().difference(keep))?;
        family.slice(&Assignment::new().with(s, 1))
    }

    /// `Q^s[H] = P_{V^s̄ ∖ H}(H | V^s, S=1)` as a function of every observed
    /// variable, computed by intervening and conditioning directly.
    pub fn qs_ground_truth(&self, h: &VertexSet) -> Result<ProbabilityTable> {
        let (_, vns) = self.graph.split_by_selection()?;
        if !h.is_subset(&vns) {
            return Err(Error::NotInNonAncestors(h.clone()));
        }
        let s = self.selection_name()?;
        let family = self.intervention_family(&vns.difference(h))?;
        let sliced = family.slice(&Assignment::new().with(s, 1))?;
        conditional_family(&sliced, h)
    }
}

fn condition_on_selection(t: &ProbabilityTable, s: &str) -> Result<ProbabilityTable> {
    let sliced = t.slice(&Assignment::new().with(s, 1))?;
    let mass = sliced.total();
    if mass <= 0.0 {
        return Err(Error::ZeroSelection);
    }
    Ok(sliced.scale(1.0 / mass))
}

/// `t(v) / Σ_{of} t(v)` at every entry, keeping the layout of `t`.
pub fn conditional_family(t: &ProbabilityTable, of: &VertexSet) -> Result<ProbabilityTable> {
    let rest: VertexSet = t
        .vars()
        .iter()
        .filter(|v| !of.contains(v))
        .cloned()
        .collect();
    let den = t.marginal(&rest)?;
    let mut values = Vec::with_capacity(t.values().len());
    for (a, &num) in assignments(&t.domain()).zip(t.values()) {
        let d = den.get(&a)?;
        if d <= 0.0 {
            return Err(Error::ZeroDenominator {
                assignment: a.restrict(&rest).to_string(),
            });
        }
        values.push(num / d);
    }
    ProbabilityTable::new(t.vars().to_vec(), t.sizes().to_vec(), values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub treatment: VertexSet,
    pub outcome: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub seed: u64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub query: Query,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub estimand: Option<Estimand>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure_witness: Option<FailureWitness>,
    pub trials: usize,
    pub max_abs_error: f64,
    pub per_trial: Vec<TrialError>,
}

/// Largest `|estimand − P_x(y | S=1)|` over every assignment of `X`, `Y` and
/// the estimand's free variables.
pub fn estimand_error(
    scm: &DiscreteScm,
    estimand: &Estimand,
    x: &VertexSet,
    y: &VertexSet,
) -> Result<f64> {
    let s = scm.selection_name()?;
    let ps = scm.observational_s()?;
    let family = scm
        .intervention_family(x)?
        .slice(&Assignment::new().with(s, 1))?;
    let p_xy = family.marginal(&x.union(y))?;
    let p_x = family.marginal(x)?;
    let mut ev = Evaluator::new(estimand, &ps)?;
    let vars = x.union(y).union(&ev.free_variables());
    let domain: Vec<(String, usize)> = ps
        .domain()
        .into_iter()
        .filter(|(v, _)| vars.contains(v))
        .collect();
    let mut worst: f64 = 0.0;
    for a in assignments(&domain) {
        let den = p_x.get(&a)?;
        if den <= 0.0 {
            return Err(Error::ZeroSelection);
        }
        let truth = p_xy.get(&a)? / den;
        worst = worst.max((ev.eval(&a)? - truth).abs());
    }
    Ok(worst)
}

/// Runs [`s_id`] and compares its estimand with the oracle on `trials`
/// random SCMs seeded `seed, seed + 1, …`.
pub fn verify(
    g: &AugmentedAdmg,
    x: &VertexSet,
    y: &VertexSet,
    trials: usize,
    k: usize,
    min_prob: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let query = Query {
        treatment: x.clone(),
        outcome: y.clone(),
    };
    let estimand = match s_id(g, x, y)? {
        IdentifyResult::Fail { failure_witness } => {
            return Ok(VerificationReport {
                query,
                status: "fail".into(),
                estimand: None,
                failure_witness: Some(failure_witness),
                trials: 0,
                max_abs_error: 0.0,
                per_trial: Vec::new(),
            })
        }
        IdentifyResult::Identifiable { estimand } => estimand,
    };
    let mut per_trial = Vec::with_capacity(trials);
    for t in 0..trials {
        let sub = seed.wrapping_add(t as u64);
        let scm = random_scm(g, k, min_prob, sub)?;
        per_trial.push(TrialError {
            seed: sub,
            error: estimand_error(&scm, &estimand, x, y)?,
        });
    }
    Ok(VerificationReport {
        query,
        status: "identifiable".into(),
        estimand: Some(estimand),
        failure_witness: None,
        trials,
        max_abs_error: per_trial.iter().map(|t| t.error).fold(0.0, f64::max),
        per_trial,
    })
}

/// Exact values for the XOR selection model at `X=0, Y=1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XorModelSummary {
    /// `P_{X=0}(Y=1 | S=1)` by intervention on the model.
    pub truth: f64,
    pub estimand: Estimand,
    /// The estimand evaluated on the model's `P(V | S=1)`.
    pub estimand_value: f64,
    /// `P(Y=1 | X=0, S=1)`, the answer that ignores selection.
    pub naive_value: f64,
    pub naive_gap: f64,
}

pub fn xor_model_summary() -> Result<XorModelSummary> {
    let scm = appendix_d_model();
    let at = Assignment::new().with("X", 0).with("Y", 1);
    let x = VertexSet::singleton("X");
    let y = VertexSet::singleton("Y");
    let truth = scm
        .interventional_s(&Assignment::new().with("X", 0))?
        .marginal(&y)?
        .get(&at)?;
    let estimand = s_id(&scm.graph, &x, &y)?
        .estimand()
        .cloned()
        .ok_or_else(|| Error::Internal("the XOR model query must be identifiable".into()))?;
    let ps = scm.observational_s()?;
    let estimand_value = Evaluator::new(&estimand, &ps)?.eval(&at)?;
    let naive_value = ps.conditional(&y, &x, &at)?;
    Ok(XorModelSummary {
        truth,
        estimand,
        estimand_value,
        naive_value,
        naive_gap: (naive_value - truth).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(names: &[&str]) -> VertexSet {
        names.iter().copied().collect()
    }

    #[test]
    fn random_scm_is_deterministic() {
        let g = fixtures::fig3b();
        assert_eq!(
            random_scm(&g, 2, 0.05, 7).unwrap(),
            random_scm(&g, 2, 0.05, 7).unwrap()
        );
        assert_ne!(
            random_scm(&g, 2, 0.05, 7).unwrap(),
            random_scm(&g, 2, 0.05, 8).unwrap()
        );
    }

    #[test]
    fn random_scm_rows_are_distributions() {
        let scm = random_scm(&fixtures::fig3b(), 3, 0.1, 1).unwrap();
        for cpt in scm.cpts.iter().chain(scm.selection_cpt.as_ref()) {
            for row in &cpt.rows {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(row.iter().all(|&p| p >= 0.1 - 1e-15));
            }
        }
    }

    #[test]
    fn floor_at_half_is_uniform() {
        let scm = random_scm(&fixtures::fig2(), 2, 0.5, 3).unwrap();
        for cpt in &scm.cpts {
            for row in &cpt.rows {
                assert!(row.iter().all(|&p| (p - 0.5).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        let g = fixtures::fig2();
        assert!(random_scm(&g, 2, 0.0, 0).is_err());
        assert!(random_scm(&g, 2, 0.6, 0).is_err());
        assert!(random_scm(&g, 1, 0.1, 0).is_err());
    }

    #[test]
    fn selected_distribution_is_positive() {
        let scm = random_scm(&fixtures::fig3b(), 2, 0.05, 1).unwrap();
        let ps = scm.observational_s().unwrap();
        assert_eq!(ps.values().len(), 64);
        assert!(ps.values().iter().all(|&p| p > 0.0));
        assert!((ps.total() - 1.0).abs() < 1e-12);
        assert!((scm.joint().unwrap().total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn selection_mechanism_of_appendix_model() {
        let scm = appendix_d_model();
        let full = scm.joint_with_latents().unwrap();
        let s_u2 = full.marginal(&set(&["S", "U2"])).unwrap();
        for (u2, expected) in [(0, 0.34), (1, 0.628)] {
            let pu = s_u2
                .marginal(&set(&["U2"]))
                .unwrap()
                .get(&Assignment::new().with("U2", u2))
                .unwrap();
            let p = s_u2
                .get(&Assignment::new().with("U2", u2).with("S", 1))
                .unwrap()
                / pu;
            assert!((p - expected).abs() < 1e-12, "P(S=1|U2={u2}) = {p}");
        }
    }

    #[test]
    fn appendix_model_effects() {
        let scm = appendix_d_model();
        let p = scm
            .interventional_s(&Assignment::new().with("X", 0))
            .unwrap()
            .marginal(&set(&["Y"]))
            .unwrap()
            .get(&Assignment::new().with("Y", 1))
            .unwrap();
        assert!((p - 0.628 / 0.968).abs() < 1e-12);
        for x in 0..2 {
            let pop = scm
                .interventional_population(&Assignment::new().with("X", x))
                .unwrap();
            let py = pop.marginal(&set(&["Y"])).unwrap();
            assert!(py.values().iter().all(|&v| (v - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn empty_intervention_is_the_joint_marginal() {
        let scm = random_scm(&fixtures::fig2(), 2, 0.05, 4).unwrap();
        let pop = scm.interventional_population(&Assignment::new()).unwrap();
        let joint = scm
            .joint()
            .unwrap()
            .marginal(&set(&["X", "Y", "Z"]))
            .unwrap();
        for (a, b) in pop.values().iter().zip(joint.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn qs_of_all_non_ancestors_is_a_conditional() {
        let scm = random_scm(&fixtures::fig6(), 2, 0.05, 2).unwrap();
        let q = scm.qs_ground_truth(&set(&["X", "Y"])).unwrap();
        let ps = scm.observational_s().unwrap();
        for a in assignments(&ps.domain()) {
            let direct = ps.conditional(&set(&["X", "Y"]), &set(&["Z"]), &a).unwrap();
            assert!((q.get(&a).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn state_cap_is_enforced() {
        let scm = random_scm(&fixtures::fig3b(), 2, 0.05, 0).unwrap();
        assert!(matches!(
            scm.joint_with_cap(16),
            Err(Error::StateSpace { .. })
        ));
    }

    #[test]
    fn verify_reports_failures_without_trials() {
        let r = verify(
            &fixtures::fig3b(),
            &set(&["X1"]),
            &set(&["Y1", "Y2"]),
            20,
            2,
            0.05,
            0,
        )
        .unwrap();
        assert_eq!(r.status, "fail");
        assert_eq!(r.trials, 0);
        assert!(r.failure_witness.is_some());
    }
}
