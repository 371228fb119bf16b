use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every check.
///
/// `alg` is an absolute bound for identities that hold up to rounding,
/// `rank` is relative to the largest singular value, and `fd` is a relative
/// bound for quantities that pass through one finite-difference layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub alg: f64,
    pub rank: f64,
    pub fd: f64,
    /// Bound on `|J_f - J_X|` for the universal reconstruction.
    pub reconstruction: f64,
    /// Minimal gap between the last kept and first dropped singular value.
    pub rank_gap: f64,
    /// Relative bound for closed-form torsion against the frame-bracket oracle.
    pub torsion: f64,
    /// Bound on the symplectic compatibility and pullback residuals.
    pub symplectic: f64,
    /// Bound on the terminal error of the variation difference quotient.
    pub variation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: 1e-9,
            rank: 1e-8,
            fd: 1e-4,
            reconstruction: 1e-8,
            rank_gap: 1e-6,
            torsion: 1e-6,
            symplectic: 1e-10,
            variation: 1e-3,
        }
    }
}

impl Tolerances {
    /// Multiply every acceptance bound by `factor`. `rank` and `rank_gap`
    /// define numerical rank and are left unchanged.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alg: self.alg * factor,
            rank: self.rank,
            fd: self.fd * factor,
            reconstruction: self.reconstruction * factor,
            rank_gap: self.rank_gap,
            torsion: self.torsion * factor,
            symplectic: self.symplectic * factor,
            variation: self.variation * factor,
        }
    }
}
