use thiserror::Error;

/// Errors raised by the constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not a complex structure: |J^2 + I| = {residual:e}")]
    NotAComplexStructure { residual: f64 },

    #[error("unbalanced eigenspaces: dim(+i) = {plus}, dim(-i) = {minus}")]
    UnbalancedEigenspaces { plus: usize, minus: usize },

    #[error("subspaces are not complementary (smallest singular value {sigma_min:e})")]
    NotComplementary { sigma_min: f64 },

    #[error("basis is rank deficient: rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("chart is not normalized at the base point: |a(z0)| = {residual:e}")]
    NotNormalized { residual: f64 },

    #[error("distribution fiber is not a graph over the trailing coordinates (sigma_min {sigma_min:e})")]
    GraphConditionFails { sigma_min: f64 },

    #[error("point lies outside the chart domain: |z - z0| = {distance} > {radius}")]
    OutsideDomain { distance: f64, radius: f64 },

    #[error("subspace is not contained in the distribution fiber (residual {residual:e})")]
    NotASubspaceOfFiber { residual: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("embedding differential is rank deficient at the sample point (sigma_min {sigma_min:e})")]
    RankDeficientEmbedding { sigma_min: f64 },

    #[error("eigen-splitting failed: {0}")]
    EigenSplitFailure(String),

    #[error("submanifold is not transverse to the distribution (sigma_min {sigma_min:e})")]
    NotTransverse { sigma_min: f64 },

    #[error("graph chart degenerates: {0}")]
    ChartDegeneracy(String),

    #[error("input structures are not compatible: {0}")]
    NotCompatible(String),

    #[error("convex hull has empty interior for index set {0:?}")]
    DegenerateHull(Vec<usize>),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
