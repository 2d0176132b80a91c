//! Decision procedures: s-ID with estimand synthesis, s-Recoverability, and
//! the classical Hedge criterion.
//!
//! A `Fail` result means "not identified by this procedure"; it is never a
//! certificate of non-identifiability.

use serde::{Deserialize, Serialize};

use crate::admg::{AugmentedAdmg, VertexSet};
use crate::error::{Error, Result};
use crate::estimand::{canonicalize, qs_base, qs_decompose, qs_marginalize, Estimand, QsTerm};
use crate::msep::m_separated;
use crate::scomp::{c_components, find_hedge, is_s_hedge, s_components};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureWitness {
    /// `x` and `y` are m-connected given `given` in the graph with incoming
    /// edges of `bar_in` and outgoing edges of `bar_out` removed.
    SeparationFailure {
        x: VertexSet,
        y: VertexSet,
        given: VertexSet,
        bar_in: VertexSet,
        bar_out: VertexSet,
    },
    /// `t` is an s-Hedge for the s-component `c`.
    SHedge { c: VertexSet, t: VertexSet },
}

impl FailureWitness {
    /// Re-runs the check that produced this witness; `true` if it still fails.
    pub fn recheck(&self, g: &AugmentedAdmg) -> Result<bool> {
        match self {
            FailureWitness::SeparationFailure {
                x,
                y,
                given,
                bar_in,
                bar_out,
            } => Ok(!m_separated(
                &g.edge_surgery(bar_in, bar_out)?,
                x,
                y,
                given,
            )?),
            FailureWitness::SHedge { c, t } => is_s_hedge(g, c, t),
        }
    }
}

impl std::fmt::Display for FailureWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailureWitness::SeparationFailure {
                x,
                y,
                given,
                bar_in,
                bar_out,
            } => {
                write!(f, "{x} and {y} are m-connected given {given}")?;
                match (bar_in.is_empty(), bar_out.is_empty()) {
                    (true, true) => Ok(()),
                    (false, true) => write!(f, " with edges into {bar_in} removed"),
                    (true, false) => write!(f, " with edges out of {bar_out} removed"),
                    (false, false) => {
                        write!(f, " with edges into {bar_in} and out of {bar_out} removed")
                    }
                }
            }
            FailureWitness::SHedge { c, t } => write!(f, "{t} is an s-Hedge for {c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IdentifyResult {
    Identifiable { estimand: Estimand },
    Fail { failure_witness: FailureWitness },
}

impl IdentifyResult {
    pub fn is_identifiable(&self) -> bool {
        matches!(self, IdentifyResult::Identifiable { .. })
    }

    pub fn estimand(&self) -> Option<&Estimand> {
        match self {
            IdentifyResult::Identifiable { estimand } => Some(estimand),
            IdentifyResult::Fail { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&FailureWitness> {
        match self {
            IdentifyResult::Identifiable { .. } => None,
            IdentifyResult::Fail { failure_witness } => Some(failure_witness),
        }
    }
}

/// Outcome of [`s_id_single`].
#[derive(Clone, Debug, PartialEq)]
pub enum SingleOutcome {
    Term(QsTerm),
    /// The recursion stopped at a set that is an s-Hedge for `C`.
    Hedge(VertexSet),
}

fn check_query(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet) -> Result<()> {
    g.check_members(x)?;
    g.check_members(y)?;
    if let Some(s) = g.selection() {
        if x.contains(s) || y.contains(s) {
            return Err(Error::SelectionInQuery(s.to_owned()));
        }
    }
    if y.is_empty() {
        return Err(Error::EmptyOutcome);
    }
    let overlap = x.intersection(y);
    if !overlap.is_empty() {
        return Err(Error::Overlap(overlap));
    }
    Ok(())
}

struct Split {
    vs: VertexSet,
    vns: VertexSet,
    xs: VertexSet,
    xns: VertexSet,
}

fn split(g: &AugmentedAdmg, x: &VertexSet) -> Result<Split> {
    let (vs, vns) = g.split_by_selection()?;
    Ok(Split {
        xs: x.intersection(&vs),
        xns: x.intersection(&vns),
        vs,
        vns,
    })
}

fn line6_witness(g: &AugmentedAdmg, sp: &Split, y: &VertexSet) -> Result<Option<FailureWitness>> {
    let s = g.selection().ok_or(Error::MissingSelection)?;
    let given = sp.xns.union(&VertexSet::singleton(s));
    let cut = g.edge_surgery(&sp.xns, &sp.xs)?;
    if m_separated(&cut, &sp.xs, y, &given)? {
        Ok(None)
    } else {
        Ok(Some(FailureWitness::SeparationFailure {
            x: sp.xs.clone(),
            y: y.clone(),
            given,
            bar_in: sp.xns.clone(),
            bar_out: sp.xs.clone(),
        }))
    }
}

/// `(X^s ⊥ Y | X^s̄, S)` in the graph with edges out of `X^s` and into `X^s̄` removed.
pub fn check_line6(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet) -> Result<bool> {
    check_query(g, x, y)?;
    Ok(line6_witness(g, &split(g, x)?, y)?.is_none())
}

/// Expression for `P_X(Y | S=1)` in terms of `P(V | S=1)`, or a failure witness.
pub fn s_id(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet) -> Result<IdentifyResult> {
    check_query(g, x, y)?;
    let sp = split(g, x)?;
    if let Some(w) = line6_witness(g, &sp, y)? {
        return Ok(IdentifyResult::Fail { failure_witness: w });
    }
    let ys = y.intersection(&sp.vs);
    let yns = y.intersection(&sp.vns);
    let w = sp.vs.difference(&sp.xs.union(&ys));

    let inner = if yns.is_empty() {
        Estimand::One
    } else {
        let d = g
            .induced_subgraph(&sp.vns.difference(&sp.xns))?
            .ancestors(&yns)?;
        let enclosing = qs_decompose(g, &qs_base(g)?)?;
        let mut factors = Vec::new();
        for di in s_components(g, &d)? {
            let probe = di.first().expect("components are non-empty");
            let ti = enclosing
                .iter()
                .find(|t| t.set.contains(probe))
                .ok_or_else(|| Error::Internal(format!("{probe} lies in no s-component")))?;
            if !di.is_subset(&ti.set) {
                return Err(Error::Internal(format!(
                    "{di} straddles the s-component {}",
                    ti.set
                )));
            }
            match s_id_single(g, &di, &ti.set, ti)? {
                SingleOutcome::Term(q) => factors.push(q.expr),
                SingleOutcome::Hedge(t) => {
                    return Ok(IdentifyResult::Fail {
                        failure_witness: FailureWitness::SHedge { c: di, t },
                    })
                }
            }
        }
        Estimand::sum(d.difference(&yns), Estimand::product(factors))
    };

    let outer = Estimand::prob(ys.union(&w), sp.xs.clone());
    let estimand = Estimand::sum(w, Estimand::product([outer, inner]));
    Ok(IdentifyResult::Identifiable {
        estimand: canonicalize(&estimand),
    })
}

/// `Q^s[C]` from `Q^s[T]` for single s-components `C ⊆ T ⊆ V^s̄`, or the
/// s-Hedge that blocks it.
pub fn s_id_single(
    g: &AugmentedAdmg,
    c: &VertexSet,
    t: &VertexSet,
    qs_t: &QsTerm,
) -> Result<SingleOutcome> {
    let (_, vns) = g.split_by_selection()?;
    if c.is_empty() || !c.is_subset(t) || !t.is_subset(&vns) {
        return Err(Error::Precondition(format!(
            "need non-empty {c} ⊆ {t} ⊆ {vns}"
        )));
    }
    if qs_t.set != *t {
        return Err(Error::Precondition(format!(
            "Q^s term is for {}, not {t}",
            qs_t.set
        )));
    }
    for set in [c, t] {
        if s_components(g, set)?.len() != 1 {
            return Err(Error::NotSingleComponent(set.clone(), "s-component"));
        }
    }

    let mut t = t.clone();
    let mut q = qs_t.clone();
    loop {
        let a = g.induced_subgraph(&t)?.ancestors(c)?;
        if a == *c {
            return Ok(SingleOutcome::Term(if a == t {
                q
            } else {
                qs_marginalize(g, &q, c)?
            }));
        }
        if a == t {
            return Ok(SingleOutcome::Hedge(t));
        }
        let qa = qs_marginalize(g, &q, &a)?;
        let probe = c.first().expect("checked non-empty");
        let next = qs_decompose(g, &qa)?
            .into_iter()
            .find(|term| term.set.contains(probe))
            .ok_or_else(|| Error::Internal(format!("{probe} lies in no s-component of {a}")))?;
        if !c.is_subset(&next.set) || next.set.len() >= t.len() {
            return Err(Error::Internal(format!(
                "recursion from {t} to {} does not shrink around {c}",
                next.set
            )));
        }
        t = next.set.clone();
        q = next;
    }
}

/// Whether `P_X(Y)` is identifiable from `P(V)` by the Hedge criterion.
/// The selection vertex, if any, is dropped first.
pub fn is_id(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet) -> Result<bool> {
    check_query(g, x, y)?;
    let g = g.induced_subgraph(&g.observed())?;
    let d = g
        .induced_subgraph(&g.vertices().difference(x))?
        .ancestors(y)?;
    for c in c_components(&g, &d)? {
        if find_hedge(&g, &c)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Expression for the population effect `P_X(Y)` in terms of `P(V | S=1)`:
/// requires `(Y ⊥ S | X)` once edges into `X` are removed, then defers to [`s_id`].
pub fn s_recover(g: &AugmentedAdmg, x: &VertexSet, y: &VertexSet) -> Result<IdentifyResult> {
    check_query(g, x, y)?;
    let s = VertexSet::singleton(g.selection().ok_or(Error::MissingSelection)?);
    let cut = g.edge_surgery(x, &VertexSet::new())?;
    if !m_separated(&cut, y, &s, x)? {
        return Ok(IdentifyResult::Fail {
            failure_witness: FailureWitness::SeparationFailure {
                x: y.clone(),
                y: s,
                given: x.clone(),
                bar_in: x.clone(),
                bar_out: VertexSet::new(),
            },
        });
    }
    s_id(g, x, y)
}
