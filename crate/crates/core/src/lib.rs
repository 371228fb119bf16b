//! Transverse embeddings of almost complex manifolds into holomorphic
//! distributions, with numerical certificates for each identity.
//!
//! The crate is organised bottom-up: [`linalg`] (subspaces and complex
//! structures), [`fields`] (trigonometric-polynomial fields on tori),
//! [`distribution`] (adapted charts and torsion), [`induced`] (graph
//! embeddings and the induced structure), [`universal`] (the universal
//! flag-type space and its symplectic variant), [`lvmb`] (combinatorial
//! conditions), and [`harness`] (scenario files and reports).
//!
//! # Conventions
//!
//! * `C^m` is realified as `(Re z, Im z)`, so `i` acts by `[[0, -I], [I, 0]]`.
//! * Lie brackets on real coordinates: `[V, W] = DW·V - DV·W`.
//! * Torsion components are `θ_ijk = ½(∂_j a_ik - ∂_k a_ij)` at a normalized
//!   base point, and the frame bracket there is `[e_j, e_k] = 2 θ_ijk ∂_i`.

pub mod distribution;
pub mod error;
pub mod exec;
pub mod fields;
pub mod harness;
pub mod induced;
pub mod linalg;
pub mod lvmb;
pub mod rng;
pub mod tolerance;
pub mod universal;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
