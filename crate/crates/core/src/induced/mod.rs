//! Transverse graph embeddings `M = {z'' = g(z')}` in an adapted chart of a
//! distribution: the induced structure, `∂̄f`, the variation formula and the
//! Nijenhuis identity, each paired with an independent numerical route.

mod embedding;
mod poly;
mod sample;
mod variation;

pub use embedding::{
    dbar_f, dbar_fiber_residual, induced_jf_formula, induced_jf_quotient, nijenhuis_via_torsion,
    real_jacobian_fd, transversality_report, FdGraphMap, GraphEmbedding, GraphMap,
    InducedStructureField, QuotientSolver, TransversalityReport,
};
pub use poly::{ComplexPolyMap, MixedMonomial};
pub use sample::{random_instance, InducedInstance, InstanceParams};
pub use variation::{
    deformed_structure, variation_djf, variation_fd_quotient, variation_report, VariationData,
    VariationReport, STRUCTURE_FD_STEP,
};

#[cfg(test)]
mod tests;
