//! Identification of conditional causal effects in a selected sub-population.
//!
//! Given an augmented ADMG over `V ∪ {S}` (where `S` marks membership in
//! the sub-population), [`identify::s_id`] decides whether `P_X(Y | S=1)`
//! can be computed from `P(V | S=1)` and returns an [`Estimand`] when it
//! can. The [`oracle`] module checks such estimands against exact
//! enumeration of random discrete structural causal models.
//!
//! ```
//! use sid_core::{dsl::parse_graph, identify::s_id, VertexSet};
//!
//! let g = parse_graph("X -> Y\nX <-> Z\nZ -> S\nY <-> S").unwrap().graph;
//! let x: VertexSet = ["X"].into_iter().collect();
//! let y: VertexSet = ["Y"].into_iter().collect();
//! let result = s_id(&g, &x, &y).unwrap();
//! assert_eq!(result.estimand().unwrap().to_string(), "Σ_{Z} P(Y|X,Z,S=1) P(Z|S=1)");
//! ```

pub mod admg;
pub mod dsl;
pub mod error;
pub mod estimand;
pub mod fixtures;
pub mod identify;
pub mod msep;
pub mod oracle;
pub mod random;
pub mod scomp;
pub mod table;

pub use admg::{AdmgBuilder, AugmentedAdmg, TopoOrder, VertexSet};
pub use error::{Error, Result};
pub use estimand::{Estimand, Format, QsTerm};
pub use identify::{FailureWitness, IdentifyResult};
pub use table::{Assignment, ProbabilityTable};
