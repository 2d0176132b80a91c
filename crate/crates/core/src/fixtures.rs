//! Bundled example graphs, parsed from the files under `fixtures/`.

use crate::admg::AugmentedAdmg;
use crate::dsl::parse_graph;

pub const FIG1A: &str = include_str!("../../../fixtures/fig1a.g");
pub const FIG2: &str = include_str!("../../../fixtures/fig2.g");
pub const FIG3B: &str = include_str!("../../../fixtures/fig3b.g");
pub const FIG4: &str = include_str!("../../../fixtures/fig4.g");
pub const FIG5: &str = include_str!("../../../fixtures/fig5.g");
pub const FIG6: &str = include_str!("../../../fixtures/fig6.g");

fn load(text: &str) -> AugmentedAdmg {
    parse_graph(text).expect("bundled fixture parses").graph
}

/// Two treatments, two outcomes, no selection vertex.
pub fn fig1a() -> AugmentedAdmg {
    load(FIG1A)
}

pub fn fig2() -> AugmentedAdmg {
    load(FIG2)
}

pub fn fig3b() -> AugmentedAdmg {
    load(FIG3B)
}

pub fn fig4() -> AugmentedAdmg {
    load(FIG4)
}

pub fn fig5() -> AugmentedAdmg {
    load(FIG5)
}

pub fn fig6() -> AugmentedAdmg {
    load(FIG6)
}

/// Every bundled graph with its file stem.
pub fn all() -> Vec<(&'static str, AugmentedAdmg)> {
    vec![
        ("fig1a", fig1a()),
        ("fig2", fig2()),
        ("fig3b", fig3b()),
        ("fig4", fig4()),
        ("fig5", fig5()),
        ("fig6", fig6()),
    ]
}
