//! The finite reductive layer assembled into the relative-completion
//! representation: a finite cover of a configuration-type space with deck
//! translations, a flat equivariant Lie-valued form upstairs, and the
//! resulting representation of based loops into S ⋉ exp 𝔫 — together with
//! the Lie-algebra extraction from coordinate-ring data and the
//! isotypic-dimension law for coefficient systems.
//!
//! The group-theoretic substrate (finite groups, irreducible
//! representations, the Peter–Weyl check, semidirect arithmetic) lives in
//! [`crate::groups`] and is re-exported here; the braid worked example is
//! the special case assembled in [`crate::braid`].
//!
//! A loop downstairs is presented by its lift: a path upstairs from the
//! basepoint to some deck translate of it. The finite monodromy ρ(γ) is
//! read off from which translate the lift ends at, and the representation is
//!
//!   γ ↦ (ρ(γ), Ad(ρ(γ)⁻¹)·T(γ̃)),
//!
//! multiplicative for the semidirect law (s₁,u₁)(s₂,u₂) =
//! (s₁s₂, Ad(s₂⁻¹)(u₁)·u₂). Multiplicativity needs the two hypotheses
//! validated at construction: the deck translations form a left action
//! compatible with the group table, and the form is equivariant —
//! pulling it back along a deck translation equals twisting its
//! coefficients by Ad.

use num_complex::Complex64;
use thiserror::Error;

use crate::bar::{
    q_action_matrices, BarContext, BarError, CoefficientCoalgebra, DgaModel, H0Data,
    Indecomposables,
};
use crate::braid::canonical_term_map;
use crate::envelope::{Envelope, EnvelopeError};
use crate::freelie::{GradedLie, LieError};
use crate::groups::{GroupError, SemidirectContext, SemidirectElement};
use crate::linalg::{RatMatrix, SparseVec};
use crate::rational::rat_i64;
use crate::transport::{
    check_integrability, transport, AffineMap, LieValuedOneForm, OdeOptions, PiecewisePath,
    TransportError,
};

pub use crate::groups::{
    cyclic_irreps, isotypic_multiplicities, peter_weyl_check, symmetric_irreps, FiniteGroup,
    Irrep, PeterWeylReport, SymmetricGroup,
};

#[derive(Debug, Error)]
pub enum RelcompError {
    #[error("deck translations are not an action: {0}")]
    BadDeckAction(String),
    #[error("form is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("form is not integrable: {0}")]
    NotIntegrable(String),
    #[error("lift endpoint matches no deck translate of the basepoint (closest gap {gap:.3e})")]
    LiftNotClosed { gap: f64 },
    #[error("lift does not start at the basepoint (gap {gap:.3e})")]
    LiftBasepoint { gap: f64 },
    #[error("level mixing in the group action on Q: level-{level} block is not closed")]
    LevelMixing { level: usize },
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

// ---------------------------------------------------------------------------
// The relative-completion representation of loops.
// ---------------------------------------------------------------------------

/// A validated local system for relative completion: finite deck group S
/// acting on the cover by affine translations and on the nilpotent
/// coefficients by Ad, plus a flat equivariant one-form. Construction
/// certifies every hypothesis the homomorphism property needs; after that,
/// [`RelativeLocalSystem::relative_rep`] is pure evaluation.
pub struct RelativeLocalSystem<'a> {
    pub group: &'a FiniteGroup,
    pub env: &'a Envelope,
    /// images[g][label] = Ad(g)(x_label); validated as a left action on U.
    pub images: Vec<Vec<SparseVec>>,
    /// Deck translation per group element; decks[identity] = id and
    /// decks[g·h] = decks[g] ∘ decks[h], exactly.
    pub decks: Vec<AffineMap>,
    pub omega: LieValuedOneForm,
    pub basepoint: Vec<Complex64>,
}

impl<'a> RelativeLocalSystem<'a> {
    pub fn new(
        group: &'a FiniteGroup,
        env: &'a Envelope,
        images: Vec<Vec<SparseVec>>,
        decks: Vec<AffineMap>,
        omega: LieValuedOneForm,
        basepoint: Vec<Complex64>,
    ) -> Result<RelativeLocalSystem<'a>, RelcompError> {
        // Ad is a left action on U.
        SemidirectContext::new(group, env, images.clone())?;

        // Deck translations form a left action by exact affine maps.
        let order = group.order();
        if decks.len() != order {
            return Err(RelcompError::BadDeckAction(format!(
                "{} maps for a group of order {order}",
                decks.len()
            )));
        }
        let dim = basepoint.len();
        for (g, d) in decks.iter().enumerate() {
            d.validate()?;
            if d.dimension() != dim {
                return Err(RelcompError::BadDeckAction(format!(
                    "deck {g} has dimension {}, basepoint has {dim}",
                    d.dimension()
                )));
            }
        }
        if decks[group.identity] != AffineMap::identity(dim) {
            return Err(RelcompError::BadDeckAction(
                "identity element does not act as the identity map".into(),
            ));
        }
        for g in 0..order {
            for h in 0..order {
                if decks[group.mul(g, h)] != decks[g].compose(&decks[h]) {
                    return Err(RelcompError::BadDeckAction(format!(
                        "decks[{g}·{h}] ≠ decks[{g}] ∘ decks[{h}]"
                    )));
                }
            }
        }

        let system = RelativeLocalSystem { group, env, images, decks, omega, basepoint };

        // Flatness, exactly.
        let report = check_integrability(&system.omega, &system.env.lie, dim)?;
        if !report.integrable {
            return Err(RelcompError::NotIntegrable(
                report.certificate.unwrap_or_else(|| "no certificate".into()),
            ));
        }

        // Equivariance, exactly: s^*ω = Ad(s)ω for every s.
        system.check_equivariance()?;
        Ok(system)
    }

    /// Exact equivariance: for each g, the pullback of ω along the deck
    /// translation equals ω with coefficients twisted by Ad(g), letters
    /// compared in canonical form.
    pub fn check_equivariance(&self) -> Result<(), RelcompError> {
        for g in 0..self.group.order() {
            let pulled = self.omega.substitute(&self.decks[g])?;
            let lhs = canonical_term_map(&pulled)
                .map_err(|e| RelcompError::NotEquivariant(e.to_string()))?;
            let twisted = LieValuedOneForm {
                terms: self
                    .omega
                    .terms
                    .iter()
                    .map(|(w, x)| {
                        let mut img = SparseVec::new();
                        for (&label, c) in x {
                            for (&l2, c2) in &self.images[g][label] {
                                let e = img.entry(l2).or_insert_with(|| rat_i64(0));
                                *e += c * c2;
                                if num_traits::Zero::is_zero(e) {
                                    img.remove(&l2);
                                }
                            }
                        }
                        (w.clone(), img)
                    })
                    .collect(),
            };
            let rhs = canonical_term_map(&twisted)
                .map_err(|e| RelcompError::NotEquivariant(e.to_string()))?;
            if lhs != rhs {
                return Err(RelcompError::NotEquivariant(format!(
                    "pullback along deck {g} differs from the Ad({g}) twist"
                )));
            }
        }
        Ok(())
    }

    /// The validated semidirect context. (Validation ran in `new`.)
    pub fn context(&self) -> SemidirectContext<'_> {
        SemidirectContext { group: self.group, env: self.env, images: self.images.clone() }
    }

    /// Read the finite monodromy off a lift's endpoint: the unique g with
    /// decks[g](basepoint) within `tol` of the endpoint.
    pub fn monodromy_of_lift(
        &self,
        lift: &PiecewisePath,
        tol: f64,
    ) -> Result<usize, RelcompError> {
        let end = lift.end();
        let mut best_gap = f64::INFINITY;
        let mut found = None;
        for g in 0..self.group.order() {
            let translated = self.decks[g].apply_point(&self.basepoint);
            let gap = end
                .iter()
                .zip(&translated)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            if gap < best_gap {
                best_gap = gap;
                if gap <= tol {
                    found = Some(g);
                }
            }
        }
        found.ok_or(RelcompError::LiftNotClosed { gap: best_gap })
    }

    /// The relative-completion representation of the loop presented by this
    /// lift: (ρ(γ), Ad(ρ(γ)⁻¹)·T(γ̃)). Multiplicative over concatenation of
    /// lifts (translate the second lift by decks[ρ(γ₁)] to concatenate).
    pub fn relative_rep(
        &self,
        lift: &PiecewisePath,
        opts: &OdeOptions,
    ) -> Result<(SemidirectElement, f64), RelcompError> {
        let start = lift.start();
        let gap = start
            .iter()
            .zip(&self.basepoint)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        if gap > 1e-9 {
            return Err(RelcompError::LiftBasepoint { gap });
        }
        let s = self.monodromy_of_lift(lift, 1e-9)?;
        let t = transport(lift, &self.omega, self.env, opts)?;
        let ctx = self.context();
        let u = ctx.ad(self.group.inverse[s], &t.series);
        Ok((SemidirectElement { s, u }, t.estimated_error))
    }

    /// Concatenate two lifts: γ̃₁ followed by the deck translate of γ̃₂ under
    /// ρ(γ₁), which is the lift of the concatenated loop.
    pub fn concat_lifts(
        &self,
        a: &PiecewisePath,
        b: &PiecewisePath,
    ) -> Result<PiecewisePath, RelcompError> {
        let s = self.monodromy_of_lift(a, 1e-9)?;
        let translated = b.substitute(&self.decks[s])?;
        Ok(a.concat(&translated)?)
    }
}

// ---------------------------------------------------------------------------
// Lie algebras from coordinate rings.
// ---------------------------------------------------------------------------

/// The graded Lie algebra dual to the coordinate ring of the prounipotent
/// radical, computed from bar-construction H⁰ data through the given cap:
/// indecomposables give the graded pieces, the antisymmetrized reduced
/// coproduct gives the cobracket, and dualization gives structure constants
/// (validated through the free-Lie checker).
pub struct CoordinateRingLie {
    pub h0: H0Data,
    pub ind: Indecomposables,
}

impl CoordinateRingLie {
    pub fn lie(&self) -> &GradedLie {
        &self.ind.dual_lie
    }

    pub fn dims(&self) -> &[usize] {
        &self.ind.q_dims
    }
}

pub fn lie_from_coordinate_ring(
    ctx: &BarContext,
    cap: usize,
) -> Result<CoordinateRingLie, RelcompError> {
    let h0 = ctx.h0(cap)?;
    let ind = ctx.indecomposables(&h0)?;
    Ok(CoordinateRingLie { h0, ind })
}

// ---------------------------------------------------------------------------
// The isotypic-dimension law for coefficient systems.
// ---------------------------------------------------------------------------

/// Isotypic decomposition of the weight-one associated graded of H₁ of the
/// covering, computed from a coefficient coalgebra 𝒪(S): the group acts on
/// the degree-one indecomposables of H⁰ of the bar construction, and the
/// multiplicity of each irreducible V in that action equals the dimension
/// of the model's H¹ with 𝕍-coefficients.
pub struct IsotypicReport {
    pub irrep_names: Vec<String>,
    pub multiplicities: Vec<usize>,
    /// Dimension of the degree-one block the action was decomposed on.
    pub q1_dim: usize,
}

/// Restrict the Q-action matrices to the level-one block, checking exactly
/// that the block is closed (no level mixing), and decompose it into
/// isotypic multiplicities against the given irreducibles. H⁰ and its
/// indecomposables are computed with trivial coefficients (the coefficient
/// side tensors off); the group acts through the coalgebra's component maps.
pub fn gr_h1_isotypic(
    model: &DgaModel,
    coalg: &CoefficientCoalgebra,
    irreps: &[Irrep],
    cap: usize,
) -> Result<IsotypicReport, RelcompError> {
    let ctx = BarContext::new(model, None);
    let ring = lie_from_coordinate_ring(&ctx, cap)?;
    let mats = q_action_matrices(&ctx, &ring.h0, &ring.ind, coalg)?;
    let block: Vec<usize> = ring
        .ind
        .rep_levels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .map(|(k, _)| k)
        .collect();
    let q1 = block.len();
    let mut restricted = Vec::with_capacity(mats.len());
    for m in &mats {
        let mut r = RatMatrix::zero(q1, q1);
        for (bi, &i) in block.iter().enumerate() {
            for (j, c) in m.row(i) {
                match block.iter().position(|&k| k == *j) {
                    Some(bj) => r.set(bi, bj, c.clone()),
                    None => {
                        if !num_traits::Zero::is_zero(c) {
                            return Err(RelcompError::LevelMixing { level: 1 });
                        }
                    }
                }
            }
        }
        restricted.push(r);
    }
    let multiplicities = isotypic_multiplicities(&coalg.group, irreps, &restricted);
    Ok(IsotypicReport {
        irrep_names: irreps.iter().map(|r| r.name().to_string()).collect(),
        multiplicities,
        q1_dim: q1,
    })
}
