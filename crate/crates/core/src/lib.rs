//! Graph machinery for marginal DAG (mDAG) models.

pub mod classify;
pub mod equivalence;
pub mod error;
pub mod graph;
pub mod nested;
pub mod oracle;
pub mod projection;
pub mod separation;
pub mod vset;

pub use error::{Error, Result};
pub use graph::{GraphDescription, Mark, MarkedMixedGraph, MDag, VertexRelations, Violation};
pub use vset::VertexSet;

pub use classify::{classify, emit_witness, ClassificationReport, Constraint, ModelClass, Witness};
pub use equivalence::{build_pag, ci_dag_representable, enumerate_class, EquivalenceClass};
pub use graph::{parse_mdag, serialize_mdag};
pub use nested::{find_nested_constraints, fix_graph, NestedWitness};
pub use oracle::DiscreteDistribution;
pub use projection::{canonical_dag, latent_project, mag_project};
pub use separation::{e_separated, m_separated};
