//! Shared fixtures for the benchmarks.

use fqgraph::count::PolySystem;
use fqgraph::poly::graph_poly::graph_polynomial;
use fqgraph::{FieldSpec, Multigraph};

/// `Ψ_Γ` as a projective system over all edge variables.
pub fn psi_system(g: &Multigraph) -> PolySystem {
    PolySystem::projective(vec![graph_polynomial(g).expect("connected")], g.edge_ids()).expect("homogeneous")
}

pub fn field(q: u64) -> FieldSpec {
    FieldSpec::of_order(q).expect("prime power")
}
