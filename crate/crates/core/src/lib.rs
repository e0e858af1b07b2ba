//! Couplings between measures from acyclic flows on digraphs.
//!
//! The library turns couplings into flows and, constructively, acyclic flows
//! back into couplings; decides stochastic dominance on finite posets by
//! flow feasibility on the Hasse digraph; and solves discrete
//! Monge-Kantorovich transport through the equivalent minimal-flow problem.
//! All arithmetic is exact rational.

pub mod coupling;
pub mod dominance;
pub mod flow;
pub mod graph;
pub mod jsonio;
pub mod measure;
pub mod num;
pub mod sample;
pub mod transport;
pub mod truncate;

mod netflow;

pub use flow::{
    flow_from_decomposition, flow_from_path, minimal_flow_from_field, path_decompose,
    project_to_field, remove_cycles, stabilize_decomposition, DiscreteVectorField, Flow,
    PathMeasure,
};
pub use graph::{
    fundamental_cycle_basis, hasse_digraph, CycleBasis, Digraph, DirectedPath,
    PartialOrderRelation,
};
pub use measure::{
    difference, distribution_function, half_total_variation, v_minus_v_plus, Measure,
    SignedMeasure,
};
pub use num::Rat;
