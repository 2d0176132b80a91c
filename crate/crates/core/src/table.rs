//! Dense tables over finite-domain variables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::admg::VertexSet;
use crate::error::{Error, Result};

/// Values for a set of variables, keyed by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<String, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: &str, value: usize) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: &str, value: usize) {
        self.0.insert(var.to_owned(), value);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &usize)> + '_ {
        self.0.iter()
    }

    pub fn vars(&self) -> VertexSet {
        self.0.keys().cloned().collect()
    }

    /// Restriction to the variables in `vars`.
    pub fn restrict(&self, vars: &VertexSet) -> Assignment {
        Assignment(
            self.0
                .iter()
                .filter(|(k, _)| vars.contains(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl<S: Into<String>> FromIterator<(S, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// Iterates over every joint value of a list of domain sizes, last index fastest.
#[derive(Clone, Debug)]
pub struct Odometer {
    sizes: Vec<usize>,
    current: Option<Vec<usize>>,
}

impl Odometer {
    pub fn new(sizes: &[usize]) -> Self {
        let current = if sizes.contains(&0) {
            None
        } else {
            Some(vec![0; sizes.len()])
        };
        Odometer {
            sizes: sizes.to_vec(),
            current,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("checked above");
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < self.sizes[i] {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

/// Every assignment of `vars` (name, domain size) in odometer order.
pub fn assignments(vars: &[(String, usize)]) -> impl Iterator<Item = Assignment> + '_ {
    let sizes: Vec<usize> = vars.iter().map(|(_, k)| *k).collect();
    Odometer::new(&sizes).map(move |vals| {
        vars.iter()
            .zip(vals)
            .map(|((name, _), v)| (name.clone(), v))
            .collect()
    })
}

/// Non-negative values indexed by the joint assignment of an ordered list of
/// variables (row-major, last variable fastest).
///
/// Distributions sum to one; families of conditionals and other functions of
/// an assignment reuse the same layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    vars: Vec<String>,
    sizes: Vec<usize>,
    values: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(vars: Vec<String>, sizes: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if vars.len() != sizes.len() {
            return Err(Error::InvalidParameter(
                "variable and domain-size lists differ in length".into(),
            ));
        }
        let expected: usize = sizes.iter().product();
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "table needs {expected} entries, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("invalid table entry {v}")));
        }
        let mut seen = VertexSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "variable `{v}` listed twice"
                )));
            }
        }
        Ok(ProbabilityTable {
            vars,
            sizes,
            values,
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> Vec<(String, usize)> {
        self.vars
            .iter()
            .cloned()
            .zip(self.sizes.iter().copied())
            .collect()
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn domain_size(&self, var: &str) -> Option<usize> {
        self.position(var).map(|i| self.sizes[i])
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn index_of(&self, values: &[usize]) -> usize {
        values
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&v, &k)| acc * k + v)
    }

    /// Entry at a full assignment of the table's variables (extra keys ignored).
    pub fn get(&self, a: &Assignment) -> Result<f64> {
        let mut idx = Vec::with_capacity(self.vars.len());
        for (v, &k) in self.vars.iter().zip(&self.sizes) {
            let val = a.get(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            if val >= k {
                return Err(Error::InvalidParameter(format!(
                    "{v}={val} outside domain of size {k}"
                )));
            }
            idx.push(val);
        }
        Ok(self.values[self.index_of(&idx)])
    }

    /// Sums out every variable not in `keep`; the result lists `keep` in
    /// the order the variables appear in this table.
    pub fn marginal(&self, keep: &VertexSet) -> Result<ProbabilityTable> {
        for v in keep {
            if self.position(v).is_none() {
                return Err(Error::UnknownVertex(v.clone()));
            }
        }
        let kept: Vec<usize> = (0..self.vars.len())
            .filter(|&i| keep.contains(&self.vars[i]))
            .collect();
        let sizes: Vec<usize> = kept.iter().map(|&i| self.sizes[i]).collect();
        let mut values = vec![0.0; sizes.iter().product()];
        for (flat, vals) in Odometer::new(&self.sizes).enumerate() {
            let idx = kept.iter().fold(0, |acc, &i| acc * self.sizes[i] + vals[i]);
            values[idx] += self.values[flat];
        }
        Ok(ProbabilityTable {
            vars: kept.iter().map(|&i| self.vars[i].clone()).collect(),
            sizes,
            values,
        })
    }

    /// Slice at the values in `evidence` (variables absent from the table are
    /// ignored), renormalised to sum to one.
    pub fn condition(&self, evidence: &Assignment) -> Result<ProbabilityTable> {
        let slice = self.slice(evidence)?;
        let mass = slice.total();
        if mass <= 0.0 {
            return Err(Error::ZeroDenominator {
                assignment: evidence.to_string(),
            });
        }
        Ok(slice.scale(1.0 / mass))
    }

    /// Entries consistent with `evidence`, over the remaining variables.
    pub fn slice(&self, evidence: &Assignment) -> Result<ProbabilityTable> {
        let fixed: Vec<Option<usize>> = self.vars.iter().map(|v| evidence.get(v)).collect();
        for (i, f) in fixed.iter().enumerate() {
            if let Some(val) = f {
                if *val >= self.sizes[i] {
                    return Err(Error::InvalidParameter(format!(
                        "{}={val} outside domain of size {}",
                        self.vars[i], self.sizes[i]
                    )));
                }
            }
        }
        let free: Vec<usize> = (0..self.vars.len())
            .filter(|&i| fixed[i].is_none())
            .collect();
        let sizes: Vec<usize> = free.iter().map(|&i| self.sizes[i]).collect();
        let mut values = Vec::with_capacity(sizes.iter().product());
        let mut full = vec![0; self.vars.len()];
        for vals in Odometer::new(&sizes) {
            for (j, &i) in free.iter().enumerate() {
                full[i] = vals[j];
            }
            for (i, f) in fixed.iter().enumerate() {
                if let Some(v) = f {
                    full[i] = *v;
                }
            }
            values.push(self.values[self.index_of(&full)]);
        }
        Ok(ProbabilityTable {
            vars: free.iter().map(|&i| self.vars[i].clone()).collect(),
            sizes,
            values,
        })
    }

    pub fn scale(&self, factor: f64) -> ProbabilityTable {
        ProbabilityTable {
            vars: self.vars.clone(),
            sizes: self.sizes.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `P(of | given)` at the values in `a`.
    pub fn conditional(&self, of: &VertexSet, given: &VertexSet, a: &Assignment) -> Result<f64> {
        let num = self.marginal(&of.union(given))?.get(a)?;
        let den = self.marginal(given)?.get(a)?;
        if den <= 0.0 {
            return Err(Error::ZeroDenominator {
                assignment: a.restrict(given).to_string(),
            });
        }
        Ok(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> ProbabilityTable {
        ProbabilityTable::new(
            vec!["A".into(), "B".into()],
            vec![2, 2],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap()
    }

    #[test]
    fn odometer_counts_all_states() {
        let all: Vec<_> = Odometer::new(&[2, 3]).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[5], vec![1, 2]);
        assert_eq!(Odometer::new(&[]).count(), 1);
    }

    #[test]
    fn marginal_and_condition() {
        let t = two_by_two();
        let a = t.marginal(&["A"].into_iter().collect()).unwrap();
        assert!((a.values()[0] - 0.3).abs() < 1e-15);
        assert!((a.values()[1] - 0.7).abs() < 1e-15);
        let empty = t.marginal(&VertexSet::new()).unwrap();
        assert!((empty.values()[0] - 1.0).abs() < 1e-15);
        let c = t.condition(&Assignment::new().with("B", 1)).unwrap();
        assert_eq!(c.vars(), ["A"]);
        assert!((c.values()[0] - 1.0 / 3.0).abs() < 1e-15);
        let p = t
            .conditional(
                &["A"].into_iter().collect(),
                &["B"].into_iter().collect(),
                &Assignment::new().with("A", 1).with("B", 0),
            )
            .unwrap();
        assert!((p - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(ProbabilityTable::new(vec!["A".into()], vec![2], vec![0.5]).is_err());
        assert!(ProbabilityTable::new(vec!["A".into()], vec![2], vec![-0.5, 1.5]).is_err());
        assert!(
            ProbabilityTable::new(vec!["A".into(), "A".into()], vec![1, 1], vec![1.0]).is_err()
        );
    }
}
