//! Lagrangian subspaces of ℂⁿ as symmetric unitary matrices, the anti-unitary
//! involutions they induce, and the two-involution decomposition of a
//! unitary.

use num_complex::Complex;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numcore::{
    self, check_same_dim, check_unitary, eig_unitary, sym_defect, unitary_defect, CMat, CVec,
};

/// A Lagrangian subspace L_w = {z : z = w z̄}, stored as its symmetric
/// unitary label w. The associated involution acts as σ(z) = w z̄.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSubspace {
    w: CMat,
}

impl LagrangianSubspace {
    /// Wraps a symmetric unitary label.
    pub fn from_w(w: CMat, tol: &Tolerances) -> Result<Self> {
        numcore::check_finite(&w)?;
        let n = w.nrows();
        let udef = unitary_defect(&w);
        if udef > tol.unitary(n) {
            return Err(Error::NotSymmetricUnitary {
                what: "unitarity",
                defect: udef,
                tol: tol.unitary(n),
            });
        }
        let sdef = sym_defect(&w);
        if sdef > tol.sym {
            return Err(Error::NotSymmetricUnitary {
                what: "symmetry",
                defect: sdef,
                tol: tol.sym,
            });
        }
        Ok(LagrangianSubspace { w })
    }

    /// The horizontal Lagrangian L₀ = ℝⁿ, labelled by the identity.
    pub fn horizontal(n: usize) -> Self {
        LagrangianSubspace { w: CMat::identity(n, n) }
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    /// Image φ(L), labelled by φ w φᵗ.
    pub fn transported(&self, phi: &CMat) -> Self {
        LagrangianSubspace { w: phi * &self.w * phi.transpose() }
    }
}

/// Label of the Lagrangian u(L₀): w = u uᵗ. Right-multiplying u by any real
/// orthogonal matrix leaves the label unchanged.
pub fn lagrangian_from_frame(u: &CMat, tol: &Tolerances) -> Result<LagrangianSubspace> {
    check_unitary(u, tol)?;
    Ok(LagrangianSubspace { w: u * u.transpose() })
}

/// Applies the involution σ_L(z) = w z̄.
pub fn involution_apply(l: &LagrangianSubspace, z: &CVec) -> Result<CVec> {
    if z.len() != l.dim() {
        return Err(Error::DimensionMismatch { left: l.dim(), right: z.len() });
    }
    Ok(&l.w * z.map(|c| c.conj()))
}

/// The unitary σ_{L₁}σ_{L₂} = w₁ w̄₂.
pub fn sigma_compose(l1: &LagrangianSubspace, l2: &LagrangianSubspace) -> Result<CMat> {
    check_same_dim(&l1.w, &l2.w)?;
    Ok(&l1.w * l2.w.map(|c| c.conj()))
}

/// Sorted eigen-angles of σ_{L₁}σ_{L₂}; the complete invariant of the pair
/// (L₁, L₂) up to a simultaneous unitary motion.
pub fn measure_angle(
    l1: &LagrangianSubspace,
    l2: &LagrangianSubspace,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let u = sigma_compose(l1, l2)?;
    Ok(eig_unitary(&u, tol)?.angles)
}

/// True when the pairs (L₁, L₂) and (L₁', L₂') are congruent, i.e. their
/// angle multisets agree within the spectral tolerance.
pub fn pairs_congruent(
    l1: &LagrangianSubspace,
    l2: &LagrangianSubspace,
    l1p: &LagrangianSubspace,
    l2p: &LagrangianSubspace,
    tol: &Tolerances,
) -> Result<bool> {
    let a = measure_angle(l1, l2, tol)?;
    let b = measure_angle(l1p, l2p, tol)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    Ok(numcore::angle_multiset_distance(&a, &b) <= tol.spec)
}

/// Writes u = σ_{L₁}σ_{L₂}: with u = φ d² φ*, take L₂ = φ(L₀) and
/// L₁ = φ d(L₀), d the principal half-angle diagonal.
pub fn decompose_two_lagrangians(
    u: &CMat,
    tol: &Tolerances,
) -> Result<(LagrangianSubspace, LagrangianSubspace)> {
    let eig = eig_unitary(u, tol)?;
    let n = u.nrows();
    let v = &eig.frame;
    let d = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.angles.iter().map(|&t| Complex::from_polar(1.0, t / 2.0)),
    ));
    let l2 = LagrangianSubspace { w: v * v.transpose() };
    let frame1 = v * d;
    let l1 = LagrangianSubspace { w: &frame1 * frame1.transpose() };
    Ok((l1, l2))
}
