use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sid_core::estimand::{canonicalize, evaluate, fold_probabilities, render, simplify, Format};
use sid_core::msep::{m_separated, m_separated_bruteforce};
use sid_core::random::{random_admg, random_separation_query, GraphConfig};
use sid_core::table::{assignments, ProbabilityTable};
use sid_core::{AugmentedAdmg, Estimand, VertexSet};

const VARS: [&str; 4] = ["A", "B", "C", "D"];

fn graph(seed: u64, observed: usize) -> AugmentedAdmg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_admg(
        &mut rng,
        &GraphConfig {
            observed,
            ..GraphConfig::default()
        },
    )
}

fn var_set() -> impl Strategy<Value = VertexSet> {
    proptest::sample::subsequence(VARS.to_vec(), 0..=VARS.len())
        .prop_map(|v| v.into_iter().collect())
}

fn prob() -> impl Strategy<Value = Estimand> {
    (var_set(), var_set()).prop_map(|(of, given)| {
        let given = given.difference(&of);
        Estimand::prob(of, given)
    })
}

fn estimand() -> impl Strategy<Value = Estimand> {
    prob().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (var_set(), inner.clone()).prop_map(|(over, body)| Estimand::Sum {
                over,
                body: Box::new(body)
            }),
            prop::collection::vec(inner.clone(), 0..3)
                .prop_map(|factors| Estimand::Product { factors }),
            (inner.clone(), inner).prop_map(|(n, d)| Estimand::Quotient {
                num: Box::new(n),
                den: Box::new(d)
            }),
        ]
    })
}

fn table() -> impl Strategy<Value = ProbabilityTable> {
    prop::collection::vec(0.05f64..1.0, 16).prop_map(|raw| {
        let total: f64 = raw.iter().sum();
        ProbabilityTable::new(
            VARS.iter().map(|v| v.to_string()).collect(),
            vec![2; 4],
            raw.into_iter().map(|v| v / total).collect(),
        )
        .unwrap()
    })
}

fn agree(a: &Estimand, b: &Estimand, t: &ProbabilityTable) -> Result<(), TestCaseError> {
    for v in assignments(&t.domain()) {
        let (x, y) = (evaluate(a, t, &v).unwrap(), evaluate(b, t, &v).unwrap());
        prop_assert!(
            (x - y).abs() <= 1e-12 * x.abs().max(1.0),
            "{} = {x} but {} = {y}",
            render(a, Format::Ascii),
            render(b, Format::Ascii)
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplify_preserves_value(e in estimand(), t in table()) {
        agree(&e, &simplify(&e), &t)?;
    }

    #[test]
    fn folding_preserves_value(e in estimand(), t in table()) {
        agree(&e, &fold_probabilities(&e), &t)?;
        agree(&e, &canonicalize(&e), &t)?;
    }

    #[test]
    fn simplify_is_idempotent(e in estimand()) {
        let once = simplify(&e);
        prop_assert_eq!(simplify(&once), once);
    }

    #[test]
    fn json_round_trips(e in estimand()) {
        let text = render(&e, Format::Json);
        let back: Estimand = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn ancestors_are_idempotent(seed in any::<u64>(), n in 1usize..7) {
        let g = graph(seed, n);
        for v in g.vertices() {
            let once = g.ancestors(&VertexSet::singleton(v.clone())).unwrap();
            prop_assert!(once.contains(v));
            prop_assert_eq!(g.ancestors(&once).unwrap(), once);
        }
    }

    #[test]
    fn surgery_removes_exactly_the_named_edges(seed in any::<u64>(), n in 1usize..7, mask in 0u32..64) {
        let g = graph(seed, n);
        let obs = g.observed().to_vec();
        let bar_in: VertexSet = obs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        let bar_out: VertexSet = obs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, v)| v.clone()).collect();
        let cut = g.edge_surgery(&bar_in, &bar_out).unwrap();
        for (a, b) in g.directed_edges() {
            let keep = !bar_in.contains(b) && !bar_out.contains(a);
            prop_assert_eq!(cut.has_directed(a, b), keep);
        }
        for (a, b) in g.bidirected_edges() {
            let keep = !bar_in.contains(a) && !bar_in.contains(b);
            prop_assert_eq!(cut.has_bidirected(a, b), keep);
        }
        prop_assert_eq!(cut.num_directed() + cut.num_bidirected() <= g.num_directed() + g.num_bidirected(), true);
    }

    #[test]
    fn m_separation_is_symmetric_and_matches_paths(seed in any::<u64>(), n in 2usize..7) {
        let g = graph(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..4 {
            let (x, y, w) = random_separation_query(&mut rng, &g);
            let fwd = m_separated(&g, &x, &y, &w).unwrap();
            prop_assert_eq!(fwd, m_separated(&g, &y, &x, &w).unwrap());
            prop_assert_eq!(fwd, m_separated_bruteforce(&g, &x, &y, &w).unwrap());
        }
    }
}
