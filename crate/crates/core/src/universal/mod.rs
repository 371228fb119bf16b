//! The universal space `Z_{n,k}` of 5-tuples `(z, S', S'', Σ', Σ'')` with
//! `z ∈ C^{2k}`, `S' ⊂ Σ'`, `S'' ⊂ Σ''`, carrying the corank-`n` distribution
//! `D_p = {ζ : π_*ζ ∈ S' ⊕ Σ''}`, together with the explicit lift of an
//! almost complex torus, its graph charts, the versality conditions, and the
//! pointwise symplectic model.

mod chart;
mod fiber;
mod manifold;
mod symplectic;
mod versality;

pub use chart::{universal_chart, ChartChoice, UniversalChart};
pub use fiber::{
    build_fiber, induced_structure_at, lifted_structure, plucker_certificate,
    transversality_sigma, DistributionFiber, InvariantReport, UniversalPoint,
};
pub use manifold::PointwiseACManifold;
pub use symplectic::{
    random_compatible_input, symplectic_pointwise_model, NormalData, PairingSign,
    SymplecticReport,
};
pub use versality::{
    lift_at, rank_with_gap, versality_check, versality_from_dbar, versality_map, UniversalLift,
    VersalityReport,
};

use crate::error::{Error, Result};

/// `N = 2k + 2(k² + n(k-n))`, the dimension of `Z_{n,k}`.
pub fn dimension_universal(n: usize, k: usize) -> Result<usize> {
    if n < 1 || k <= n {
        return Err(Error::InvalidParams(format!("need k > n >= 1, got n={n}, k={k}")));
    }
    Ok(2 * k + 2 * (k * k + n * (k - n)))
}

/// `N = 2bk(2bk+1) + 2n(2bk-n)`, the dimension of the symplectic variant.
pub fn dimension_symplectic(n: usize, b: usize, k: usize) -> Result<usize> {
    if n < 1 || b < 1 || k < 2 * n + 1 {
        return Err(Error::InvalidParams(format!(
            "need n, b >= 1 and k >= 2n+1, got n={n}, b={b}, k={k}"
        )));
    }
    let m = 2 * b * k;
    Ok(m * (m + 1) + 2 * n * (m - n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_dimensions() {
        assert_eq!(dimension_universal(1, 4).unwrap(), 46);
        assert_eq!(dimension_universal(2, 8).unwrap(), 168);
        assert_eq!(dimension_universal(1, 2).unwrap(), 14);
        for n in 1..=3 {
            assert_eq!(dimension_universal(n, 4 * n).unwrap(), 38 * n * n + 8 * n);
        }
        assert!(matches!(dimension_universal(2, 2), Err(Error::InvalidParams(_))));
        assert!(matches!(dimension_universal(0, 3), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn symplectic_dimensions() {
        assert_eq!(dimension_symplectic(1, 1, 3).unwrap(), 52);
        assert_eq!(dimension_symplectic(1, 2, 3).unwrap(), 178);
        assert_eq!(dimension_symplectic(2, 1, 5).unwrap(), 142);
        assert!(matches!(dimension_symplectic(2, 1, 4), Err(Error::InvalidParams(_))));
    }
}
