//! c-components, s-components, ancestral sets, and Hedge / s-Hedge search.

use crate::admg::{AugmentedAdmg, VertexSet};
use crate::error::{Error, Result};

/// Bidirected-connected components of `G[scope]`, ordered by least member.
pub fn c_components(g: &AugmentedAdmg, scope: &VertexSet) -> Result<Vec<VertexSet>> {
    g.check_members(scope)?;
    let mut remaining = scope.clone();
    let mut out = Vec::new();
    while let Some(root) = remaining.first().cloned() {
        let mut comp = VertexSet::singleton(root.clone());
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for s in g.siblings(&v)?.iter() {
                if scope.contains(s) && comp.insert(s.clone()) {
                    stack.push(s.clone());
                }
            }
        }
        remaining = remaining.difference(&comp);
        out.push(comp);
    }
    out.sort();
    Ok(out)
}

/// s-components of `h ⊆ V^s̄`: the non-empty traces on `h` of the
/// c-components of `G^s[h ∪ An(S)]`.
pub fn s_components(g: &AugmentedAdmg, h: &VertexSet) -> Result<Vec<VertexSet>> {
    g.check_members(h)?;
    let (_, vns) = g.split_by_selection()?;
    if !h.is_subset(&vns) {
        return Err(Error::NotInNonAncestors(h.clone()));
    }
    let anc_s = g.selection_ancestors()?;
    let mut out: Vec<VertexSet> = c_components(g, &h.union(&anc_s))?
        .into_iter()
        .map(|c| c.intersection(h))
        .filter(|c| !c.is_empty())
        .collect();
    out.sort();
    Ok(out)
}

/// Whether `subset` equals its ancestors inside `G[scope]`.
pub fn is_ancestral(g: &AugmentedAdmg, subset: &VertexSet, scope: &VertexSet) -> Result<bool> {
    g.check_members(scope)?;
    if !subset.is_subset(scope) {
        return Err(Error::Precondition(format!(
            "{subset} is not a subset of {scope}"
        )));
    }
    Ok(&g.induced_subgraph(scope)?.ancestors(subset)? == subset)
}

fn component_containing<'a>(components: &'a [VertexSet], y: &VertexSet) -> Result<&'a VertexSet> {
    let probe = y
        .first()
        .ok_or_else(|| Error::Precondition("empty set has no component".into()))?;
    let comp = components
        .iter()
        .find(|c| c.contains(probe))
        .ok_or_else(|| Error::Internal(format!("{probe} lies in no component")))?;
    if !y.is_subset(comp) {
        return Err(Error::Internal(format!(
            "{y} straddles the component {comp}"
        )));
    }
    Ok(comp)
}

/// The component of `scope` (under `components_of`) containing `y`,
/// after the shrink map `T ↦ component of An(y in G[T]) containing y` has
/// reached its fixpoint.
fn shrink_to_fixpoint<F>(
    g: &AugmentedAdmg,
    y: &VertexSet,
    start: VertexSet,
    components_of: F,
) -> Result<VertexSet>
where
    F: Fn(&VertexSet) -> Result<Vec<VertexSet>>,
{
    let mut t = start;
    loop {
        let a = g.induced_subgraph(&t)?.ancestors(y)?;
        let next = component_containing(&components_of(&a)?, y)?.clone();
        if next == t {
            return Ok(t);
        }
        t = next;
    }
}

/// A Hedge for `y` in `g`, if one exists.
///
/// Requires `G[y]` to be a single c-component. The returned witness is the
/// largest Hedge reachable by the shrink map starting from the c-component
/// of `g` that contains `y`.
pub fn find_hedge(g: &AugmentedAdmg, y: &VertexSet) -> Result<Option<VertexSet>> {
    g.check_members(y)?;
    if c_components(g, y)?.len() != 1 {
        return Err(Error::NotSingleComponent(y.clone(), "c-component"));
    }
    let start = component_containing(&c_components(g, g.vertices())?, y)?.clone();
    let t = shrink_to_fixpoint(g, y, start, |a| c_components(g, a))?;
    Ok((&t != y).then_some(t))
}

/// An s-Hedge for `y ⊆ V^s̄` in `g`, if one exists.
///
/// Requires `y` to be a single s-component; the search mirrors
/// [`find_hedge`] with s-components in place of c-components.
pub fn find_s_hedge(g: &AugmentedAdmg, y: &VertexSet) -> Result<Option<VertexSet>> {
    if s_components(g, y)?.len() != 1 {
        return Err(Error::NotSingleComponent(y.clone(), "s-component"));
    }
    let (_, vns) = g.split_by_selection()?;
    let start = component_containing(&s_components(g, &vns)?, y)?.clone();
    let t = shrink_to_fixpoint(g, y, start, |a| s_components(g, a))?;
    Ok((&t != y).then_some(t))
}

/// Direct check of the Hedge conditions for `h` with respect to `y`.
pub fn is_hedge(g: &AugmentedAdmg, y: &VertexSet, h: &VertexSet) -> Result<bool> {
    g.check_members(h)?;
    if !y.is_subset(h) || y == h || y.is_empty() {
        return Ok(false);
    }
    Ok(c_components(g, y)?.len() == 1
        && c_components(g, h)?.len() == 1
        && &g.induced_subgraph(h)?.ancestors(y)? == h)
}

/// Direct check of the s-Hedge conditions for `h` with respect to `y`.
pub fn is_s_hedge(g: &AugmentedAdmg, y: &VertexSet, h: &VertexSet) -> Result<bool> {
    g.check_members(h)?;
    let (_, vns) = g.split_by_selection()?;
    if !h.is_subset(&vns) || !y.is_subset(h) || y == h || y.is_empty() {
        return Ok(false);
    }
    Ok(s_components(g, y)?.len() == 1
        && s_components(g, h)?.len() == 1
        && &g.induced_subgraph(h)?.ancestors(y)? == h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(names: &[&str]) -> VertexSet {
        names.iter().copied().collect()
    }

    #[test]
    fn c_component_examples() {
        let g = fixtures::fig1a();
        assert_eq!(
            c_components(&g, &set(&["X1", "X2", "Y1", "Y2"])).unwrap(),
            vec![set(&["X1", "X2", "Y1", "Y2"])]
        );
        assert_eq!(
            c_components(&g, &set(&["X1", "X2", "Y1"])).unwrap(),
            vec![set(&["X1", "X2"]), set(&["Y1"])]
        );
        let dag = crate::admg::AdmgBuilder::new()
            .directed("A", "B")
            .directed("B", "C")
            .build()
            .unwrap();
        assert_eq!(
            c_components(&dag, dag.vertices()).unwrap(),
            vec![set(&["A"]), set(&["B"]), set(&["C"])]
        );
    }

    #[test]
    fn s_component_examples() {
        let g = fixtures::fig3b();
        assert_eq!(
            s_components(&g, &set(&["X1", "X2", "Y1", "Y2"])).unwrap(),
            vec![set(&["X1", "X2"]), set(&["Y1", "Y2"])]
        );
        assert_eq!(
            s_components(&g, &set(&["X1", "Y1", "Y2"])).unwrap(),
            vec![set(&["X1"]), set(&["Y1", "Y2"])]
        );
        assert!(s_components(&g, &VertexSet::new()).unwrap().is_empty());
        assert_eq!(
            s_components(&g, &set(&["Z1", "X1"])),
            Err(Error::NotInNonAncestors(set(&["X1", "Z1"])))
        );
    }

    #[test]
    fn ancestral_examples() {
        let g = fixtures::fig3b();
        let scope = set(&["Y1", "Y2"]);
        assert!(is_ancestral(&g, &set(&["Y1"]), &scope).unwrap());
        assert!(is_ancestral(&g, &scope, &scope).unwrap());
        assert!(!is_ancestral(&g, &set(&["Y2"]), &scope).unwrap());
    }

    #[test]
    fn hedge_examples() {
        let g = fixtures::fig1a();
        let y = set(&["Y1", "Y2"]);
        let h = find_hedge(&g, &y).unwrap().expect("hedge exists");
        assert!(is_hedge(&g, &y, &h).unwrap());
        assert!(is_hedge(&g, &y, &set(&["X1", "Y1", "Y2"])).unwrap());
        assert_eq!(find_hedge(&g, &set(&["Y1"])).unwrap(), None);
        assert_eq!(find_hedge(&g, &set(&["Y2"])).unwrap(), None);
        assert_eq!(find_hedge(&g, g.vertices()).unwrap(), None);
        assert!(matches!(
            find_hedge(&g, &set(&["X2", "Y1"])),
            Err(Error::NotSingleComponent(..))
        ));
    }

    #[test]
    fn s_hedge_examples() {
        let g = fixtures::fig3b();
        assert_eq!(
            find_s_hedge(&g, &set(&["X2"])).unwrap(),
            Some(set(&["X1", "X2"]))
        );
        assert_eq!(
            find_s_hedge(&g, &set(&["Y2"])).unwrap(),
            Some(set(&["Y1", "Y2"]))
        );
        assert_eq!(find_s_hedge(&g, &set(&["Y1", "Y2"])).unwrap(), None);
        assert!(is_s_hedge(&g, &set(&["X2"]), &set(&["X1", "X2"])).unwrap());
        assert!(!is_s_hedge(&g, &set(&["X1"]), &set(&["X1", "X2"])).unwrap());
    }
}
