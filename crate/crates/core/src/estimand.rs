//! Symbolic estimands over the sub-population distribution `P(V | S=1)`.
//!
//! Every [`Estimand::Prob`] node is implicitly conditioned on `S=1`. Summation
//! is lexically scoped: an inner [`Estimand::Sum`] over a variable that an
//! enclosing sum already binds shadows the outer binding.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::admg::{AugmentedAdmg, VertexSet};
use crate::error::{Error, Result};
use crate::scomp::{is_ancestral, s_components};
use crate::table::{Assignment, Odometer, ProbabilityTable};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimand {
    /// `P(of | given, S=1)`.
    Prob {
        of: VertexSet,
        given: VertexSet,
    },
    Sum {
        over: VertexSet,
        body: Box<Estimand>,
    },
    Product {
        factors: Vec<Estimand>,
    },
    Quotient {
        num: Box<Estimand>,
        den: Box<Estimand>,
    },
    One,
}

/// Output syntax for [`render`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Plain text with `Σ`.
    Text,
    /// Plain text with `Sum` in place of `Σ`.
    Ascii,
    Latex,
    Json,
}

impl Estimand {
    /// `P(of | given, S=1)`; `One` when `of` is empty.
    ///
    /// # Panics
    /// If `of` and `given` overlap.
    pub fn prob(of: VertexSet, given: VertexSet) -> Estimand {
        assert!(
            of.is_disjoint(&given),
            "P({of} | {given}) has overlapping sides"
        );
        if of.is_empty() {
            Estimand::One
        } else {
            Estimand::Prob { of, given }
        }
    }

    /// `Σ_over body`, merging directly nested sums over disjoint sets.
    pub fn sum(over: VertexSet, body: Estimand) -> Estimand {
        if over.is_empty() {
            return body;
        }
        match body {
            Estimand::Sum { over: inner, body } if inner.is_disjoint(&over) => Estimand::Sum {
                over: over.union(&inner),
                body,
            },
            body => Estimand::Sum {
                over,
                body: Box::new(body),
            },
        }
    }

    /// Flattened product without `One` factors, ordered by rendered form.
    pub fn product<I: IntoIterator<Item = Estimand>>(factors: I) -> Estimand {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                Estimand::One => {}
                Estimand::Product { factors } => flat.extend(factors),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Estimand::One,
            1 => flat.pop().expect("one factor"),
            _ => {
                flat.sort_by_cached_key(|f| render(f, Format::Ascii));
                Estimand::Product { factors: flat }
            }
        }
    }

    pub fn quotient(num: Estimand, den: Estimand) -> Estimand {
        match den {
            Estimand::One => num,
            den => Estimand::Quotient {
                num: Box::new(num),
                den: Box::new(den),
            },
        }
    }

    /// Variables not bound by an enclosing sum.
    pub fn free_variables(&self) -> VertexSet {
        match self {
            Estimand::One => VertexSet::new(),
            Estimand::Prob { of, given } => of.union(given),
            Estimand::Sum { over, body } => body.free_variables().difference(over),
            Estimand::Product { factors } => factors
                .iter()
                .fold(VertexSet::new(), |acc, f| acc.union(&f.free_variables())),
            Estimand::Quotient { num, den } => num.free_variables().union(&den.free_variables()),
        }
    }

    /// Every variable mentioned anywhere in the tree.
    pub fn variables(&self) -> VertexSet {
        match self {
            Estimand::One => VertexSet::new(),
            Estimand::Prob { of, given } => of.union(given),
            Estimand::Sum { over, body } => body.variables().union(over),
            Estimand::Product { factors } => factors
                .iter()
                .fold(VertexSet::new(), |acc, f| acc.union(&f.variables())),
            Estimand::Quotient { num, den } => num.variables().union(&den.variables()),
        }
    }

    /// Whether some sum rebinds a variable already bound above it.
    pub fn has_shadowed_binding(&self) -> bool {
        fn walk(e: &Estimand, bound: &VertexSet) -> bool {
            match e {
                Estimand::One | Estimand::Prob { .. } => false,
                Estimand::Sum { over, body } => {
                    !over.is_disjoint(bound) || walk(body, &bound.union(over))
                }
                Estimand::Product { factors } => factors.iter().any(|f| walk(f, bound)),
                Estimand::Quotient { num, den } => walk(num, bound) || walk(den, bound),
            }
        }
        walk(self, &VertexSet::new())
    }

    /// Whether every probability term has disjoint sides.
    pub fn validate(&self) -> Result<()> {
        match self {
            Estimand::One => Ok(()),
            Estimand::Prob { of, given } => {
                let overlap = of.intersection(given);
                if overlap.is_empty() {
                    Ok(())
                } else {
                    Err(Error::Overlap(overlap))
                }
            }
            Estimand::Sum { body, .. } => body.validate(),
            Estimand::Product { factors } => factors.iter().try_for_each(Estimand::validate),
            Estimand::Quotient { num, den } => {
                num.validate()?;
                den.validate()
            }
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Estimand::One | Estimand::Prob { .. })
    }
}

impl std::fmt::Display for Estimand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render(self, Format::Text))
    }
}

// ---------------------------------------------------------------------------
// rendering

pub fn render(e: &Estimand, format: Format) -> String {
    match format {
        Format::Text => text(e, "Σ"),
        Format::Ascii => text(e, "Sum"),
        Format::Latex => latex(e),
        Format::Json => {
            let value = serde_json::to_value(e).expect("estimands always serialize");
            value.to_string()
        }
    }
}

fn text(e: &Estimand, sigma: &str) -> String {
    match e {
        Estimand::One => "1".to_owned(),
        Estimand::Prob { of, given } => {
            if given.is_empty() {
                format!("P({}|S=1)", of.join(","))
            } else {
                format!("P({}|{},S=1)", of.join(","), given.join(","))
            }
        }
        Estimand::Sum { over, body } => {
            format!("{sigma}_{{{}}} {}", over.join(","), text(body, sigma))
        }
        Estimand::Product { factors } => {
            let last = factors.len().saturating_sub(1);
            factors
                .iter()
                .enumerate()
                .map(|(i, f)| match f {
                    Estimand::Sum { .. } if i < last => format!("[{}]", text(f, sigma)),
                    Estimand::Quotient { .. } | Estimand::Product { .. } => {
                        format!("({})", text(f, sigma))
                    }
                    _ => text(f, sigma),
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        Estimand::Quotient { num, den } => {
            let operand = |x: &Estimand| {
                if x.is_atomic() {
                    text(x, sigma)
                } else {
                    format!("({})", text(x, sigma))
                }
            };
            format!("{} / {}", operand(num), operand(den))
        }
    }
}

fn latex(e: &Estimand) -> String {
    match e {
        Estimand::One => "1".to_owned(),
        Estimand::Prob { of, given } => {
            let mut cond = given.to_vec();
            cond.push("S=1".to_owned());
            format!("P({} \\mid {})", of.join(", "), cond.join(", "))
        }
        Estimand::Sum { over, body } => format!("\\sum_{{{}}} {}", over.join(", "), latex(body)),
        Estimand::Product { factors } => {
            let last = factors.len().saturating_sub(1);
            factors
                .iter()
                .enumerate()
                .map(|(i, f)| match f {
                    Estimand::Sum { .. } if i < last => format!("\\left[{}\\right]", latex(f)),
                    Estimand::Product { .. } => format!("\\left({}\\right)", latex(f)),
                    _ => latex(f),
                })
                .collect::<Vec<_>>()
                .join(" ")
        }
        Estimand::Quotient { num, den } => format!("\\frac{{{}}}{{{}}}", latex(num), latex(den)),
    }
}

// ---------------------------------------------------------------------------
// simplification

/// Structural clean-up that preserves evaluation on every positive table:
/// flattens products, drops `One` factors and denominators, cancels `A / A`,
/// and collapses telescoping quotient chains `(B / A)(C / B) → C / A`.
pub fn simplify(e: &Estimand) -> Estimand {
    match e {
        Estimand::One | Estimand::Prob { .. } => e.clone(),
        Estimand::Sum { over, body } => Estimand::sum(over.clone(), simplify(body)),
        Estimand::Quotient { num, den } => {
            let (num, den) = (simplify(num), simplify(den));
            if num == den {
                Estimand::One
            } else {
                Estimand::quotient(num, den)
            }
        }
        Estimand::Product { factors } => {
            let flat = match Estimand::product(factors.iter().map(simplify)) {
                Estimand::Product { factors } => factors,
                single => return single,
            };
            Estimand::product(telescope(flat))
        }
    }
}

fn telescope(mut factors: Vec<Estimand>) -> Vec<Estimand> {
    'outer: loop {
        for j in 0..factors.len() {
            let Estimand::Quotient { num: nj, den: dj } = &factors[j] else {
                continue;
            };
            for i in 0..factors.len() {
                if i == j {
                    continue;
                }
                let merged = if &factors[i] == dj.as_ref() {
                    Some(nj.as_ref().clone())
                } else if let Estimand::Quotient { num: ni, den: di } = &factors[i] {
                    (ni == dj).then(|| Estimand::quotient(nj.as_ref().clone(), di.as_ref().clone()))
                } else {
                    None
                };
                if let Some(m) = merged {
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    factors.remove(hi);
                    factors.remove(lo);
                    match m {
                        Estimand::One => {}
                        Estimand::Product { factors: inner } => factors.extend(inner),
                        other => factors.push(other),
                    }
                    continue 'outer;
                }
            }
        }
        return factors;
    }
}

/// Rewrites sums and ratios of probability terms into single terms:
/// `Σ_B P(A,B | C) → P(A | C)` and `P(A,B | C) / P(B | C) → P(A | B,C)`.
pub fn fold_probabilities(e: &Estimand) -> Estimand {
    match e {
        Estimand::One | Estimand::Prob { .. } => e.clone(),
        Estimand::Sum { over, body } => match fold_probabilities(body) {
            Estimand::Prob { of, given } if !over.is_disjoint(&of) && over.is_disjoint(&given) => {
                let summed = over.intersection(&of);
                let rest = over.difference(&summed);
                Estimand::sum(rest, Estimand::prob(of.difference(&summed), given))
            }
            body => Estimand::sum(over.clone(), body),
        },
        Estimand::Quotient { num, den } => {
            let (num, den) = (fold_probabilities(num), fold_probabilities(den));
            if num == den {
                return Estimand::One;
            }
            match (&num, &den) {
                (Estimand::Prob { of: a, given: g1 }, Estimand::Prob { of: b, given: g2 })
                    if g1 == g2 && b.is_subset(a) =>
                {
                    Estimand::prob(a.difference(b), g1.union(b))
                }
                _ => Estimand::quotient(num, den),
            }
        }
        Estimand::Product { factors } => Estimand::product(factors.iter().map(fold_probabilities)),
    }
}

/// [`simplify`] and [`fold_probabilities`] to a fixpoint.
pub fn canonicalize(e: &Estimand) -> Estimand {
    let mut cur = e.clone();
    loop {
        let next = fold_probabilities(&simplify(&cur));
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

// ---------------------------------------------------------------------------
// Q^s terms

/// An expression for `Q^s[set] = P_{V^s̄ ∖ set}(set | V^s, S=1)` in terms of `P(V | S=1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QsTerm {
    pub set: VertexSet,
    pub expr: Estimand,
}

/// How [`qs_decompose_with`] orders `H` when forming prefixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixOrder {
    /// Topological order of `G[H]`, ties broken lexicographically.
    Lexicographic,
    /// As above, but the ancestors in `G[H]` of the component being
    /// extracted come first. The resulting expression mentions only those
    /// ancestors from outside the component.
    AncestorsFirst,
}

/// `Q^s[V^s̄] = P(V^s̄ | V^s, S=1)`.
pub fn qs_base(g: &AugmentedAdmg) -> Result<QsTerm> {
    let (vs, vns) = g.split_by_selection()?;
    Ok(QsTerm {
        expr: Estimand::prob(vns.clone(), vs),
        set: vns,
    })
}

/// `Q^s[to] = Σ_{from ∖ to} Q^s[from]`, valid when `to` is ancestral in `G[from]`.
pub fn qs_marginalize(g: &AugmentedAdmg, from: &QsTerm, to: &VertexSet) -> Result<QsTerm> {
    if !to.is_subset(&from.set) || to == &from.set {
        return Err(Error::Precondition(format!(
            "{to} must be a strict subset of {}",
            from.set
        )));
    }
    if !is_ancestral(g, to, &from.set)? {
        return Err(Error::NotAncestral {
            subset: to.clone(),
            scope: from.set.clone(),
        });
    }
    Ok(QsTerm {
        set: to.clone(),
        expr: Estimand::sum(from.set.difference(to), from.expr.clone()),
    })
}

/// One [`QsTerm`] per s-component of `from.set`, each obtained from
/// `Q^s[from.set]` as a telescoping product of prefix marginals.
pub fn qs_decompose(g: &AugmentedAdmg, from: &QsTerm) -> Result<Vec<QsTerm>> {
    qs_decompose_with(g, from, PrefixOrder::AncestorsFirst)
}

pub fn qs_decompose_with(
    g: &AugmentedAdmg,
    from: &QsTerm,
    order: PrefixOrder,
) -> Result<Vec<QsTerm>> {
    let h = &from.set;
    let components = s_components(g, h)?;
    let sub = g.induced_subgraph(h)?;
    let mut out = Vec::with_capacity(components.len());
    for comp in components {
        let priority = match order {
            PrefixOrder::Lexicographic => VertexSet::new(),
            PrefixOrder::AncestorsFirst => sub.ancestors(&comp)?,
        };
        let order = g.topological_order_with_priority(h, &priority)?;
        let prefix_term = |i: usize| -> Estimand {
            if i == 0 {
                Estimand::One
            } else {
                Estimand::sum(h.difference(&order.prefix(i)), from.expr.clone())
            }
        };
        let factors = order
            .as_slice()
            .iter()
            .enumerate()
            .filter(|(_, v)| comp.contains(v))
            .map(|(i, _)| Estimand::quotient(prefix_term(i + 1), prefix_term(i)))
            .collect::<Vec<_>>();
        out.push(QsTerm {
            set: comp,
            expr: simplify(&Estimand::product(factors)),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// evaluation

enum NodeKind {
    One,
    Prob {
        joint: Vec<usize>,
        given: Vec<usize>,
    },
    Sum {
        over: Vec<usize>,
        body: usize,
    },
    Product(Vec<usize>),
    Quotient(usize, usize),
}

struct Node {
    kind: NodeKind,
    free: Vec<usize>,
}

/// Compiled form of an estimand against one table, memoising every
/// sub-expression on the values of its free variables.
pub struct Evaluator<'t> {
    table: &'t ProbabilityTable,
    nodes: Vec<Node>,
    root: usize,
    memo: Vec<HashMap<usize, f64>>,
    marginals: HashMap<Vec<usize>, Vec<f64>>,
}

impl<'t> Evaluator<'t> {
    pub fn new(e: &Estimand, table: &'t ProbabilityTable) -> Result<Self> {
        let mut ev = Evaluator {
            table,
            nodes: Vec::new(),
            root: 0,
            memo: Vec::new(),
            marginals: HashMap::new(),
        };
        ev.root = ev.compile(e)?;
        ev.memo = (0..ev.nodes.len()).map(|_| HashMap::new()).collect();
        Ok(ev)
    }

    fn positions(&self, set: &VertexSet) -> Result<Vec<usize>> {
        let mut out = set
            .iter()
            .map(|v| {
                self.table
                    .position(v)
                    .ok_or_else(|| Error::UnknownVertex(v.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        Ok(out)
    }

    fn compile(&mut self, e: &Estimand) -> Result<usize> {
        let (kind, free) = match e {
            Estimand::One => (NodeKind::One, Vec::new()),
            Estimand::Prob { of, given } => {
                let joint = self.positions(&of.union(given))?;
                let given = self.positions(given)?;
                (
                    NodeKind::Prob {
                        joint: joint.clone(),
                        given,
                    },
                    joint,
                )
            }
            Estimand::Sum { over, body } => {
                let over = self.positions(over)?;
                let body = self.compile(body)?;
                let free = self.nodes[body]
                    .free
                    .iter()
                    .copied()
                    .filter(|v| !over.contains(v))
                    .collect();
                (NodeKind::Sum { over, body }, free)
            }
            Estimand::Product { factors } => {
                let ids = factors
                    .iter()
                    .map(|f| self.compile(f))
                    .collect::<Result<Vec<_>>>()?;
                let mut free: Vec<usize> = ids
                    .iter()
                    .flat_map(|&i| self.nodes[i].free.clone())
                    .collect();
                free.sort_unstable();
                free.dedup();
                (NodeKind::Product(ids), free)
            }
            Estimand::Quotient { num, den } => {
                let (n, d) = (self.compile(num)?, self.compile(den)?);
                let mut free: Vec<usize> = self.nodes[n]
                    .free
                    .iter()
                    .chain(&self.nodes[d].free)
                    .copied()
                    .collect();
                free.sort_unstable();
                free.dedup();
                (NodeKind::Quotient(n, d), free)
            }
        };
        self.nodes.push(Node { kind, free });
        Ok(self.nodes.len() - 1)
    }

    /// Free variables of the compiled estimand.
    pub fn free_variables(&self) -> VertexSet {
        self.nodes[self.root]
            .free
            .iter()
            .map(|&i| self.table.vars()[i].clone())
            .collect()
    }

    /// Value at `fixed`, which must assign every free variable.
    pub fn eval(&mut self, fixed: &Assignment) -> Result<f64> {
        let n = self.table.vars().len();
        let mut env: Vec<Option<usize>> = vec![None; n];
        for (i, var) in self.table.vars().iter().enumerate() {
            if let Some(v) = fixed.get(var) {
                if v >= self.table.sizes()[i] {
                    return Err(Error::InvalidParameter(format!(
                        "{var}={v} outside domain of size {}",
                        self.table.sizes()[i]
                    )));
                }
                env[i] = Some(v);
            }
        }
        self.eval_node(self.root, &mut env)
    }

    fn key(&self, vars: &[usize], env: &[Option<usize>]) -> Result<usize> {
        let sizes = self.table.sizes();
        vars.iter().try_fold(0usize, |acc, &v| {
            let val = env[v].ok_or_else(|| Error::UnboundVariable(self.table.vars()[v].clone()))?;
            Ok(acc * sizes[v] + val)
        })
    }

    fn marginal_at(&mut self, vars: &[usize], env: &[Option<usize>]) -> Result<f64> {
        let key = self.key(vars, env)?;
        if !self.marginals.contains_key(vars) {
            let sizes = self.table.sizes();
            let mut m = vec![0.0; vars.iter().map(|&v| sizes[v]).product()];
            for (flat, vals) in Odometer::new(sizes).enumerate() {
                let idx = vars.iter().fold(0, |acc, &v| acc * sizes[v] + vals[v]);
                m[idx] += self.table.values()[flat];
            }
            self.marginals.insert(vars.to_vec(), m);
        }
        Ok(self.marginals[vars][key])
    }

    fn describe(&self, env: &[Option<usize>]) -> String {
        let a: Assignment = self
            .table
            .vars()
            .iter()
            .zip(env)
            .filter_map(|(v, x)| x.map(|x| (v.clone(), x)))
            .collect();
        a.to_string()
    }

    fn eval_node(&mut self, id: usize, env: &mut Vec<Option<usize>>) -> Result<f64> {
        let key = self.key(&self.nodes[id].free, env)?;
        if let Some(&v) = self.memo[id].get(&key) {
            return Ok(v);
        }
        let value = match &self.nodes[id].kind {
            NodeKind::One => 1.0,
            NodeKind::Prob { joint, given } => {
                let (joint, given) = (joint.clone(), given.clone());
                let den = self.marginal_at(&given, env)?;
                if den <= 0.0 {
                    return Err(Error::ZeroDenominator {
                        assignment: self.describe(env),
                    });
                }
                self.marginal_at(&joint, env)? / den
            }
            NodeKind::Sum { over, body } => {
                let (over, body) = (over.clone(), *body);
                let saved: Vec<Option<usize>> = over.iter().map(|&v| env[v]).collect();
                let sizes: Vec<usize> = over.iter().map(|&v| self.table.sizes()[v]).collect();
                let mut acc = 0.0;
                for vals in Odometer::new(&sizes) {
                    for (&v, x) in over.iter().zip(vals) {
                        env[v] = Some(x);
                    }
                    acc += self.eval_node(body, env)?;
                }
                for (&v, s) in over.iter().zip(saved) {
                    env[v] = s;
                }
                acc
            }
            NodeKind::Product(ids) => {
                let ids = ids.clone();
                let mut acc = 1.0;
                for i in ids {
                    acc *= self.eval_node(i, env)?;
                }
                acc
            }
            NodeKind::Quotient(n, d) => {
                let (n, d) = (*n, *d);
                let den = self.eval_node(d, env)?;
                if den <= 0.0 {
                    return Err(Error::ZeroDenominator {
                        assignment: self.describe(env),
                    });
                }
                self.eval_node(n, env)? / den
            }
        };
        self.memo[id].insert(key, value);
        Ok(value)
    }
}

/// Value of `e` on `table` (a distribution over `V`, read as `P(V | S=1)`)
/// at the assignment `fixed` of its free variables.
pub fn evaluate(e: &Estimand, table: &ProbabilityTable, fixed: &Assignment) -> Result<f64> {
    Evaluator::new(e, table)?.eval(fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(names: &[&str]) -> VertexSet {
        names.iter().copied().collect()
    }

    fn p(of: &[&str], given: &[&str]) -> Estimand {
        Estimand::prob(set(of), set(given))
    }

    #[test]
    fn qs_base_examples() {
        let q = qs_base(&fixtures::fig3b()).unwrap();
        assert_eq!(q.expr, p(&["X1", "X2", "Y1", "Y2"], &["Z1", "Z2"]));
        let q = qs_base(&fixtures::fig6()).unwrap();
        assert_eq!(q.expr, p(&["X", "Y"], &["Z"]));
        let g = crate::admg::AdmgBuilder::new()
            .directed("A", "S")
            .select("S")
            .build()
            .unwrap();
        assert_eq!(qs_base(&g).unwrap().expr, Estimand::One);
    }

    #[test]
    fn qs_marginalize_examples() {
        let g = fixtures::fig3b();
        let base = QsTerm {
            set: set(&["Y1", "Y2"]),
            expr: p(&["Y1", "Y2"], &["Z1"]),
        };
        let m = qs_marginalize(&g, &base, &set(&["Y1"])).unwrap();
        assert_eq!(m.expr, Estimand::sum(set(&["Y2"]), base.expr.clone()));
        assert!(matches!(
            qs_marginalize(&g, &base, &set(&["Y1", "Y2"])),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            qs_marginalize(&g, &base, &set(&["Y2"])),
            Err(Error::NotAncestral { .. })
        ));
        let x = QsTerm {
            set: set(&["X1", "X2"]),
            expr: p(&["X1", "X2"], &[]),
        };
        let m = qs_marginalize(&g, &x, &set(&["X1"])).unwrap();
        assert_eq!(m.expr, Estimand::sum(set(&["X2"]), x.expr.clone()));
    }

    #[test]
    fn qs_decompose_fig3b() {
        let g = fixtures::fig3b();
        let base = qs_base(&g).unwrap();
        let terms = qs_decompose(&g, &base).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].set, set(&["X1", "X2"]));
        assert_eq!(
            terms[0].expr,
            Estimand::sum(set(&["Y1", "Y2"]), base.expr.clone())
        );
        assert_eq!(terms[1].set, set(&["Y1", "Y2"]));
        assert_eq!(
            terms[1].expr,
            Estimand::quotient(
                base.expr.clone(),
                Estimand::sum(set(&["Y1", "Y2"]), base.expr.clone())
            )
        );
    }

    #[test]
    fn single_component_decomposes_to_itself() {
        let g = fixtures::fig3b();
        let q = QsTerm {
            set: set(&["Y1", "Y2"]),
            expr: p(&["Y1", "Y2"], &["X1", "X2", "Z1", "Z2"]),
        };
        let terms = qs_decompose(&g, &q).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].expr, q.expr);
    }

    #[test]
    fn text_rendering() {
        let e1 = Estimand::sum(
            set(&["Z"]),
            Estimand::product([p(&["Z"], &[]), p(&["Y"], &["X", "Z"])]),
        );
        assert_eq!(render(&e1, Format::Text), "Σ_{Z} P(Y|X,Z,S=1) P(Z|S=1)");
        assert_eq!(render(&e1, Format::Ascii), "Sum_{Z} P(Y|X,Z,S=1) P(Z|S=1)");
        assert_eq!(render(&Estimand::One, Format::Text), "1");

        let e10 = Estimand::sum(
            set(&["Z1", "Z2"]),
            Estimand::product([
                p(&["Z1", "Z2"], &[]),
                Estimand::sum(
                    set(&["X1"]),
                    Estimand::quotient(
                        p(&["X1", "X2", "Y"], &["Z1", "Z2"]),
                        p(&["X2"], &["X1", "Z1", "Z2"]),
                    ),
                ),
            ]),
        );
        assert_eq!(
            render(&e10, Format::Text),
            "Σ_{Z1,Z2} P(Z1,Z2|S=1) Σ_{X1} P(X1,X2,Y|Z1,Z2,S=1) / P(X2|X1,Z1,Z2,S=1)"
        );
        assert_eq!(
            render(&e1, Format::Latex),
            "\\sum_{Z} P(Y \\mid X, Z, S=1) P(Z \\mid S=1)"
        );
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let e = Estimand::quotient(
            p(&["A", "B"], &["C"]),
            Estimand::sum(set(&["B"]), p(&["A", "B"], &["C"])),
        );
        let json = render(&e, Format::Json);
        assert!(json.starts_with("{\"den\":"));
        let back: Estimand = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value.to_string(), json);
        assert_eq!(render(&Estimand::One, Format::Json), "{\"kind\":\"one\"}");
    }

    #[test]
    fn simplify_identities() {
        assert_eq!(
            simplify(&Estimand::Product {
                factors: vec![Estimand::One, Estimand::One]
            }),
            Estimand::One
        );
        let a = p(&["A"], &[]);
        let q = Estimand::Quotient {
            num: Box::new(a.clone()),
            den: Box::new(Estimand::One),
        };
        assert_eq!(simplify(&q), a);
    }

    #[test]
    fn telescoping_collapses() {
        let q = |i: usize| {
            Estimand::sum(
                (i..4).map(|k| format!("V{k}")).collect(),
                p(&["V0", "V1", "V2", "V3"], &[]),
            )
        };
        // Q(H1)/Q(H0) * Q(H2)/Q(H1) * Q(H3)/Q(H2) with H0 summing everything but V0.
        let chain = Estimand::product((1..4).map(|i| Estimand::quotient(q(i + 1), q(i))));
        assert_eq!(simplify(&chain), Estimand::quotient(q(4), q(1)));
    }

    #[test]
    fn folding_recovers_conditionals() {
        let joint = p(&["X1", "X2", "Y1", "Y2"], &["Z1", "Z2"]);
        let ratio = Estimand::quotient(
            joint.clone(),
            Estimand::sum(set(&["Y1", "Y2"]), joint.clone()),
        );
        assert_eq!(
            canonicalize(&ratio),
            p(&["Y1", "Y2"], &["X1", "X2", "Z1", "Z2"])
        );
        let marg = Estimand::sum(set(&["X2"]), Estimand::sum(set(&["Y1", "Y2"]), joint));
        assert_eq!(canonicalize(&marg), p(&["X1"], &["Z1", "Z2"]));
    }

    #[test]
    fn evaluation_basics() {
        let t = ProbabilityTable::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        assert_eq!(
            evaluate(&Estimand::One, &t, &Assignment::new()).unwrap(),
            1.0
        );
        let e = p(&["A"], &["B"]);
        let v = evaluate(&e, &t, &Assignment::new().with("A", 1).with("B", 0)).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        let s = Estimand::sum(set(&["A"]), e.clone());
        assert!((evaluate(&s, &t, &Assignment::new().with("B", 1)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            evaluate(&e, &t, &Assignment::new().with("A", 1)),
            Err(Error::UnboundVariable("B".into()))
        );
        let z = ProbabilityTable::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![0.5, 0.0, 0.5, 0.0],
        )
        .unwrap();
        assert!(matches!(
            evaluate(&e, &z, &Assignment::new().with("A", 0).with("B", 1)),
            Err(Error::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn inner_sum_shadows_outer_binding() {
        let t = ProbabilityTable::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        // Σ_A [P(A) · Σ_A P(A|B)] = Σ_A P(A) · 1 = 1 for every B
        let inner = Estimand::Sum {
            over: set(&["A"]),
            body: Box::new(p(&["A"], &["B"])),
        };
        let e = Estimand::Sum {
            over: set(&["A"]),
            body: Box::new(Estimand::Product {
                factors: vec![p(&["A"], &[]), inner],
            }),
        };
        assert!(e.has_shadowed_binding());
        let v = evaluate(&e, &t, &Assignment::new().with("B", 0)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
