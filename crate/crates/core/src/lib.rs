//! Sparse hypergraph constructions and their verifiers.
//!
//! `G_r(v, e)`-free graphs: `r`-uniform hypergraphs in which every `e` edges
//! together cover at least `v + 1` vertices. The crate builds them two ways
//! (a prime-field hashing recursion and a lift through packed component
//! graphs), checks them with fast and naive verifiers, computes small exact
//! values, and certifies the codegree upper bound on any free input.

pub mod algebraic;
pub mod bounds;
pub mod ff;
pub mod hypergraph;
pub mod lift;
pub mod oracle;
pub mod phm;

pub use algebraic::{construct_recursive, verify_construction, ConstructionReport, RecursionBudget};
pub use bounds::{certificate_check, UpperBoundCertificate};
pub use ff::{FieldElement, Polynomial, PrimeField};
pub use hypergraph::{Freeness, FreenessWitness, Hypergraph, HypergraphError, Vertex};
pub use lift::{construct_lifted, GtTemplate, LiftedConstruction, PackingPlan, SimpleGraph};
pub use oracle::{exact_max_edges, greedy_free_graph, SearchConfig};
pub use phm::{build_matrix, find_good_vector, CodeMatrix, EvaluationVector, Strong3ph};
