//! Corank-`n` holomorphic distributions in adapted coordinates.
//!
//! A chart presents `D_z = {(a(z)η, η) : η ∈ C^{N-n}}` for a holomorphic
//! `n × (N-n)` matrix function `a`, normalized so that `a(z_0) = 0`.

mod chart;
mod poly;
mod torsion;

pub use chart::{
    recentering_transform, ClosureMap, DerivativeMode, DistributionChart, HolomorphicMatrixMap,
};
pub use poly::{Monomial, PolynomialMatrix};
pub use torsion::{
    frame_bracket_torsion, is_foliation, isotropy_test, torsion_at, torsion_operator, FoliationReport,
    IsotropyReport, TorsionTensor,
};
