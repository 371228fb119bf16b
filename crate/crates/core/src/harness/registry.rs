use super::Kind;
use serde::Serialize;

/// Direction of the comparison between a measured value and its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Pass when `value <= tolerance`.
    Upper,
    /// Pass when `value >= tolerance`.
    Lower,
}

impl Bound {
    pub fn accepts(self, value: f64, tolerance: f64) -> bool {
        match self {
            Bound::Upper => value <= tolerance,
            Bound::Lower => value >= tolerance,
        }
    }
}

/// A registered check: stable id, display name, and the identity it certifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckInfo {
    pub id: &'static str,
    pub kind: Kind,
    pub name: &'static str,
    pub identity: &'static str,
    pub bound: Bound,
}

const fn check(id: &'static str, kind: Kind, name: &'static str, identity: &'static str, bound: Bound) -> CheckInfo {
    CheckInfo {
        id,
        kind,
        name,
        identity,
        bound,
    }
}

use Bound::{Lower, Upper};
use Kind::{Fields, Induced, Lvmb, Symplectic, Universal};

static REGISTRY: &[CheckInfo] = &[
    check(
        "universal.dimension",
        Universal,
        "dim Z_{n,k}",
        "chart dimension N = 2k + 2(k^2 + n(k-n)); N = 38n^2 + 8n at k = 4n",
        Upper,
    ),
    check(
        "universal.fiber_invariants",
        Universal,
        "fiber invariants",
        "S' ⊂ Σ', S'' ⊂ Σ'', Σ' ⊕ Σ'' = C^{2k}, Σ'' = conj(Σ') at f(x)",
        Upper,
    ),
    check(
        "universal.reconstruction",
        Universal,
        "J_f == J_X",
        "the structure induced on X by the universal lift equals J_X",
        Upper,
    ),
    check(
        "universal.transversality",
        Universal,
        "dG(T_xX) ⊕ (S' ⊕ Σ'') = C^{2k}",
        "the universal lift is transverse to D (smallest singular value of the stacked bases)",
        Lower,
    ),
    check(
        "universal.plucker",
        Universal,
        "S real",
        "S = S' ⊕ S'' is a real subspace: |det(BᵀB)| / det(BᴴB) = 1",
        Upper,
    ),
    check(
        "universal.chart_lift",
        Universal,
        "J_f from chart lift == J_X",
        "J_f = (q∘df)^{-1} i (q∘df) computed from the lift in a universal chart",
        Upper,
    ),
    check(
        "universal.versality_rank",
        Universal,
        "versality ranks",
        "rank_C ∂̄f = n and rank_R (u ↦ θ(∂̄f, u)) = 2n^2",
        Upper,
    ),
    check(
        "universal.versality_gap",
        Universal,
        "versality singular-value gap",
        "(σ_r - σ_{r+1}) / max(σ_1, 1) at the numerical rank of u ↦ θ(∂̄f, u)",
        Lower,
    ),
    check(
        "universal.chart_independence",
        Universal,
        "versality chart independence",
        "the versality ranks agree in two different universal charts",
        Upper,
    ),
    check(
        "universal.isotropy",
        Universal,
        "integrable ⇒ isotropic",
        "θ vanishes on span ∂̄f(x) when J_X is integrable",
        Upper,
    ),
    check(
        "universal.nijenhuis",
        Universal,
        "N_{J_f} = 4θ(∂̄f·, ∂̄f·)",
        "Nijenhuis tensor of J_f from the universal torsion against the four-bracket of J_X",
        Upper,
    ),
    check(
        "universal.torsion_bracket",
        Universal,
        "universal torsion vs frame bracket",
        "θ_ijk = ½(∂_j a_ik - ∂_k a_ij) = ½[e_j, e_k]_i mod D in a universal chart",
        Upper,
    ),
    check(
        "induced.jf_square",
        Induced,
        "J_F^2 = -I",
        "the quotient structure J_F = (q∘dF)^{-1} i (q∘dF) squares to -I",
        Upper,
    ),
    check(
        "induced.jf_formula",
        Induced,
        "J_F quotient == closed form",
        "J_F ζ = iζ - 2(q∘dF)^{-1}(i a(F) ∂̄g ζ, 0)",
        Upper,
    ),
    check(
        "induced.transversality",
        Induced,
        "dF(T_zM) ⊕ D = T_F(z)Z",
        "smallest singular value of [dF | real basis of D]",
        Lower,
    ),
    check(
        "induced.dbar_fiber",
        Induced,
        "∂̄F ∈ D",
        "∂̄F = ½(dF + i dF J_F) takes values in D",
        Upper,
    ),
    check(
        "induced.nijenhuis",
        Induced,
        "N_{J_F} = 4θ(∂̄F·, ∂̄F·)",
        "Nijenhuis identity N(ζ, η) = 4 θ(∂̄F ζ, ∂̄F η) mod D (four-bracket by finite differences)",
        Upper,
    ),
    check(
        "induced.variation_rate",
        Induced,
        "variation linear convergence",
        "dJ_f = 2 J_f T + L_v J_f: difference-quotient error ratio between t = 1e-3 and 1e-4 lies in [8, 12]",
        Upper,
    ),
    check(
        "induced.variation_error",
        Induced,
        "variation terminal error",
        "dJ_f = 2 J_f T + L_v J_f with T = θ(∂̄f ·, u) mod D: error of (J_{f_t} - J_f)/t at t = 1e-4",
        Upper,
    ),
    check(
        "induced.variation_anticommutation",
        Induced,
        "dJ_f anticommutes with J_f",
        "J_f dJ_f + dJ_f J_f = 0 for the closed-form variation 2 J_f T + L_v J_f",
        Upper,
    ),
    check(
        "induced.torsion_double_entry",
        Induced,
        "torsion vs frame bracket",
        "θ_ijk = ½(∂_j a_ik - ∂_k a_ij) = ½[e_j, e_k]_i mod D (relative)",
        Upper,
    ),
    check(
        "induced.torsion_antisymmetry",
        Induced,
        "θ antisymmetric",
        "θ_ijk = -θ_ikj exactly",
        Upper,
    ),
    check(
        "induced.foliation_versality",
        Induced,
        "foliation control",
        "θ ≡ 0 on a foliation, so u ↦ θ(∂̄F, u) has rank 0",
        Upper,
    ),
    check(
        "symplectic.compatibility",
        Symplectic,
        "γ̃(J̃·, J̃·) = γ̃",
        "J̃ on V × V is compatible with γ̃ = ½(γ ⊕ -γ)",
        Upper,
    ),
    check(
        "symplectic.pullback",
        Symplectic,
        "G*γ̃ = ω",
        "G = (ι, Cι) pulls γ̃ back to ω",
        Upper,
    ),
    check(
        "symplectic.square",
        Symplectic,
        "J̃^2 = -I",
        "J̃ = J ⊕ (-J) ⊕ J_N is a complex structure on V × V",
        Upper,
    ),
    check(
        "symplectic.lift",
        Symplectic,
        "J̃ dG = dG J",
        "G is (J, J̃)-holomorphic at the point",
        Upper,
    ),
    check(
        "symplectic.negative_control",
        Symplectic,
        "sign-flip control fails",
        "with γ̃ = ½(γ ⊕ γ) the compatibility or pullback residual is at least the tolerance",
        Lower,
    ),
    check(
        "fields.square",
        Fields,
        "J^2 = -I",
        "the almost complex field squares to -I at every sample",
        Upper,
    ),
    check(
        "fields.nijenhuis_fd",
        Fields,
        "N_J exact vs finite differences",
        "N_J(ζ, η) = [ζ,η] - [Jζ,Jη] + J[ζ,Jη] + J[Jζ,η], exact derivatives against a fourth-order stencil",
        Upper,
    ),
    check(
        "fields.tensoriality",
        Fields,
        "N_J tensorial",
        "the four-bracket at x depends only on ζ(x), η(x)",
        Upper,
    ),
    check(
        "fields.nijenhuis_antisymmetry",
        Fields,
        "N_J antisymmetric",
        "N_J(ζ, η) = -N_J(η, ζ)",
        Upper,
    ),
    check(
        "fields.nijenhuis_antilinear",
        Fields,
        "N_J J-antilinear",
        "N_J(Jζ, η) = -J N_J(ζ, η)",
        Upper,
    ),
    check(
        "lvmb.condition_i",
        Lvmb,
        "condition (i)",
        "interiors of hull{ℓ_j : j ∈ J} and hull{ℓ_j : j ∈ J'} meet for all J, J' ∈ E (linear program)",
        Upper,
    ),
    check(
        "lvmb.condition_ii",
        Lvmb,
        "condition (ii)",
        "for J ∈ E and k there is k' ∈ J with (J \\ {k'}) ∪ {k} ∈ E",
        Upper,
    ),
    check(
        "lvmb.killing_commute",
        Lvmb,
        "Killing fields commute",
        "[ζ_j, ζ_l] = 0 for ζ_j = Σ_k λ_jk z_k ∂/∂z_k",
        Upper,
    ),
];

pub fn registry() -> &'static [CheckInfo] {
    REGISTRY
}

pub fn lookup(id: &str) -> Option<&'static CheckInfo> {
    REGISTRY.iter().find(|c| c.id == id)
}

/// Registered checks of one scenario kind, in registry order.
pub fn checks_for(kind: Kind) -> impl Iterator<Item = &'static CheckInfo> {
    REGISTRY.iter().filter(move |c| c.kind == kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn anchors_are_non_empty_and_ids_unique() {
        let mut ids = BTreeSet::new();
        for c in registry() {
            assert!(!c.identity.trim().is_empty(), "{}", c.id);
            assert!(!c.name.trim().is_empty(), "{}", c.id);
            assert!(ids.insert(c.id), "duplicate id {}", c.id);
            assert!(c.id.starts_with(c.kind.as_str()), "{}", c.id);
        }
        assert!(registry().len() >= 15);
    }

    #[test]
    fn variation_and_nijenhuis_identities_are_registered() {
        assert!(registry().iter().any(|c| c.identity.contains("dJ_f = 2 J_f T + L_v J_f")));
        assert!(registry().iter().any(|c| c.identity.contains("N(ζ, η) = 4 θ(∂̄F ζ, ∂̄F η)")));
    }

    #[test]
    fn every_kind_has_checks() {
        for kind in Kind::ALL {
            assert!(checks_for(kind).count() >= 3, "{kind:?}");
        }
    }

    #[test]
    fn bounds() {
        assert!(Bound::Upper.accepts(1.0, 1.0) && !Bound::Upper.accepts(1.1, 1.0));
        assert!(Bound::Lower.accepts(1.0, 1.0) && !Bound::Lower.accepts(0.9, 1.0));
        assert!(!Bound::Upper.accepts(f64::NAN, 1.0) && !Bound::Lower.accepts(f64::NAN, 1.0));
    }
}
