//! Representation tuples of the punctured-sphere group, the involution β,
//! the σ₀-Lagrangian test with explicit witnesses, and the general
//! Lagrangian test through intertwiners.

use num_complex::Complex;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lagrange::{sigma_compose, LagrangianSubspace};
use crate::numcore::{
    self, angle_multiset_distance, check_unitary, eig_unitary, polar_unitary_factor, CMat,
};

/// Eigen-angles below this gap are treated as coinciding when deciding
/// whether a class has pairwise distinct eigenvalues.
pub const DISTINCT_ANGLE_GAP: f64 = 1e-6;

/// A conjugacy class of U(n), labelled by its sorted multiset of
/// eigen-angles in [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyClass {
    pub n: usize,
    pub angles: Vec<f64>,
}

impl ConjugacyClass {
    pub fn new(n: usize, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: angles.len() });
        }
        if !angles.iter().all(|a| a.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let mut angles: Vec<f64> = angles.iter().map(|&a| numcore::wrap_angle(a)).collect();
        angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(ConjugacyClass { n, angles })
    }

    /// True when all eigen-angles are pairwise separated on the circle.
    pub fn has_distinct_angles(&self) -> bool {
        let n = self.angles.len();
        if n < 2 {
            return true;
        }
        for i in 0..n {
            let gap = numcore::circular_distance(self.angles[i], self.angles[(i + 1) % n]);
            if gap <= DISTINCT_ANGLE_GAP {
                return false;
            }
        }
        true
    }

    /// A concrete member: V diag(e^{iλ}) V*.
    pub fn realize(&self, frame: &CMat) -> CMat {
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n,
            self.angles.iter().map(|&t| Complex::from_polar(1.0, t)),
        ));
        frame * d * frame.adjoint()
    }
}

/// Sorted eigen-angle label of a unitary.
pub fn class_of(u: &CMat, tol: &Tolerances) -> Result<ConjugacyClass> {
    let eig = eig_unitary(u, tol)?;
    Ok(ConjugacyClass { n: u.nrows(), angles: eig.angles })
}

/// True when u belongs to the class within the circular multiset tolerance.
pub fn membership(class: &ConjugacyClass, u: &CMat, tol: &Tolerances) -> Result<bool> {
    Ok(membership_distance(class, u, tol)? <= tol.spec)
}

/// Circular multiset distance between Spec(u) and the class label.
pub fn membership_distance(class: &ConjugacyClass, u: &CMat, tol: &Tolerances) -> Result<f64> {
    if u.nrows() != class.n {
        return Err(Error::DimensionMismatch { left: class.n, right: u.nrows() });
    }
    let spec = class_of(u, tol)?;
    Ok(angle_multiset_distance(&class.angles, &spec.angles))
}

/// An ordered tuple (u₁, …, u_l) of unitary matrices, optionally carrying
/// prescribed conjugacy classes.
#[derive(Debug, Clone, PartialEq)]
pub struct RepTuple {
    pub matrices: Vec<CMat>,
    pub classes: Option<Vec<ConjugacyClass>>,
}

impl RepTuple {
    pub fn new(matrices: Vec<CMat>, tol: &Tolerances) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Malformed("a representation tuple needs l ≥ 1 factors".into()));
        }
        let n = matrices[0].nrows();
        for m in &matrices {
            check_unitary(m, tol)?;
            if m.nrows() != n {
                return Err(Error::DimensionMismatch { left: n, right: m.nrows() });
            }
        }
        Ok(RepTuple { matrices, classes: None })
    }

    pub fn with_classes(mut self, classes: Vec<ConjugacyClass>) -> Result<Self> {
        if classes.len() != self.l() {
            return Err(Error::DimensionMismatch { left: self.l(), right: classes.len() });
        }
        for c in &classes {
            if c.n != self.n() {
                return Err(Error::DimensionMismatch { left: self.n(), right: c.n });
            }
        }
        self.classes = Some(classes);
        Ok(self)
    }

    pub fn l(&self) -> usize {
        self.matrices.len()
    }

    pub fn n(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// Ordered product u₁⋯u_l.
    pub fn product(&self) -> CMat {
        let n = self.n();
        self.matrices.iter().fold(CMat::identity(n, n), |acc, m| acc * m)
    }

    pub fn product_residual(&self) -> f64 {
        let n = self.n();
        (self.product() - CMat::identity(n, n)).norm()
    }

    pub fn check_closed(&self, tol: &Tolerances) -> Result<()> {
        let residual = self.product_residual();
        if residual > tol.product {
            return Err(Error::NotClosed { residual, tol: tol.product });
        }
        Ok(())
    }

    /// Componentwise conjugation g.(u₁, …, u_l) = (g u₁ g⁻¹, …, g u_l g⁻¹).
    pub fn conjugated_by(&self, g: &CMat) -> RepTuple {
        let gi = g.adjoint();
        RepTuple {
            matrices: self.matrices.iter().map(|u| g * u * &gi).collect(),
            classes: self.classes.clone(),
        }
    }

    /// Largest componentwise Frobenius distance to another tuple.
    pub fn distance(&self, other: &RepTuple) -> f64 {
        self.matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Lagrangian witnesses (L₁, …, L_l) for a tuple with u_j = σ_jσ_{j+1}.
#[derive(Debug, Clone)]
pub struct LagrangianWitness {
    pub subspaces: Vec<LagrangianSubspace>,
}

impl LagrangianWitness {
    pub fn l(&self) -> usize {
        self.subspaces.len()
    }
}

/// The involution β(u₁, …, u_l) =
/// (ū_l⁻¹⋯ū₂⁻¹ u₁ᵗ ū₂⋯ū_l, …, ū_l⁻¹ u_{l−1}ᵗ ū_l, u_lᵗ).
///
/// With suffix products s_j = u_j⋯u_l this is β_j = s_{j+1}ᵗ u_jᵗ s̄_{j+1},
/// since ū⁻¹ = uᵗ for unitary u.
pub fn beta(rep: &RepTuple) -> RepTuple {
    let l = rep.l();
    let n = rep.n();
    let mut suffix = vec![CMat::identity(n, n); l + 1];
    for j in (0..l).rev() {
        suffix[j] = &rep.matrices[j] * &suffix[j + 1];
    }
    let matrices = (0..l)
        .map(|j| {
            let s = &suffix[j + 1];
            s.transpose() * rep.matrices[j].transpose() * s.map(|c| c.conj())
        })
        .collect();
    RepTuple { matrices, classes: rep.classes.clone() }
}

/// The base-point-shifted involution β_{L₁} = w₁ · β(·) · w₁⁻¹ applied
/// componentwise, where w₁ is the label of L₁.
pub fn beta_at(rep: &RepTuple, l1: &LagrangianSubspace) -> RepTuple {
    beta(rep).conjugated_by(l1.w())
}

/// Componentwise fixed-point defect of β.
pub fn beta_fix_defect(rep: &RepTuple) -> f64 {
    rep.distance(&beta(rep))
}

/// Builds the closed tuple u_j = σ_jσ_{j+1} (indices mod l) from witnesses.
pub fn rep_from_lagrangians(witness: &LagrangianWitness) -> Result<RepTuple> {
    let l = witness.l();
    if l == 0 {
        return Err(Error::Malformed("a witness needs l ≥ 1 subspaces".into()));
    }
    let matrices: Result<Vec<CMat>> = (0..l)
        .map(|j| sigma_compose(&witness.subspaces[j], &witness.subspaces[(j + 1) % l]))
        .collect();
    Ok(RepTuple { matrices: matrices?, classes: None })
}

/// σ₀-Lagrangian test: a closed tuple is σ₀-Lagrangian iff it is β-fixed.
/// On success the witnesses L_j with labels w_j = u_j⋯u_l (so w₁ = I) are
/// returned; they satisfy σ_jσ_{j+1} = u_j.
pub fn is_sigma0_lagrangian(
    rep: &RepTuple,
    tol: &Tolerances,
) -> Result<(bool, Option<LagrangianWitness>)> {
    rep.check_closed(tol)?;
    if beta_fix_defect(rep) > tol.fix {
        return Ok((false, None));
    }
    let l = rep.l();
    let n = rep.n();
    let mut subspaces = Vec::with_capacity(l);
    let mut suffix = CMat::identity(n, n);
    let mut labels = vec![CMat::identity(n, n); l];
    for j in (0..l).rev() {
        suffix = &rep.matrices[j] * suffix;
        labels[j] = suffix.clone();
    }
    // w₁ is the full product, identity up to the closure residual; snap it
    labels[0] = CMat::identity(n, n);
    for w in labels {
        // β-fixedness makes each label symmetric up to the fixed-point
        // defect; project back to W(n)
        let sym = (&w + w.transpose()).scale(0.5);
        let cleaned = polar_unitary_factor(&sym)?;
        subspaces.push(LagrangianSubspace::from_w(cleaned, tol)?);
    }
    Ok((true, Some(LagrangianWitness { subspaces })))
}

/// Stacked Sylvester operator of the joint system vec(b_jψ − ψa_j) = 0,
/// column-major vec with ψ[(r, c)] at index c·n + r.
fn intertwine_operator(a: &RepTuple, b: &RepTuple) -> CMat {
    let n = a.n();
    let l = a.l();
    let nn = n * n;
    let mut k = CMat::zeros(l * nn, nn);
    for j in 0..l {
        let (aj, bj) = (&a.matrices[j], &b.matrices[j]);
        for c in 0..n {
            for r in 0..n {
                let row = j * nn + c * n + r;
                for t in 0..n {
                    k[(row, c * n + t)] += bj[(r, t)];
                    k[(row, t * n + r)] -= aj[(t, c)];
                }
            }
        }
    }
    k
}

/// Right-singular vectors of k below the threshold, as matrices.
fn small_kernel_basis(k: &CMat, n: usize, threshold: f64) -> Vec<CMat> {
    let svd = k.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&p, &q| svd.singular_values[p].partial_cmp(&svd.singular_values[q]).unwrap());
    order
        .into_iter()
        .take_while(|&i| svd.singular_values[i] < threshold)
        .map(|i| {
            let mut m = CMat::zeros(n, n);
            for c in 0..n {
                for r in 0..n {
                    m[(r, c)] = v_t[(i, c * n + r)].conj();
                }
            }
            m
        })
        .collect()
}

/// Frobenius projection of m onto the span of the basis matrices.
fn project_onto(basis: &[CMat], m: &CMat) -> CMat {
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for b in basis {
        let coeff = b.dotc(m);
        out += b.scale(1.0) * coeff;
    }
    out
}

/// Least-squares solution of the joint intertwining system
/// ψ a_j = b_j ψ, j = 1..l, with a unitarity correction and an
/// irreducibility certificate from the singular-value gap. Degenerate
/// kernels are searched for an invertible element, preferring the
/// identity direction, then symmetric combinations.
pub fn find_intertwiner(
    a: &RepTuple,
    b: &RepTuple,
    tol: &Tolerances,
) -> Result<Option<(CMat, bool)>> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { left: a.n(), right: b.n() });
    }
    if a.l() != b.l() {
        return Err(Error::DimensionMismatch { left: a.l(), right: b.l() });
    }
    let n = a.n();
    let l = a.l();
    let threshold = tol.twine * (l as f64).sqrt();
    let k = intertwine_operator(a, b);
    let svd = k.clone().svd(false, false);
    let mut sigmas: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigmas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if sigmas[0] >= threshold {
        return Ok(None);
    }
    let irreducible = sigmas.len() > 1 && sigmas[1] >= 1e3 * sigmas[0].max(1e-13);

    let accept = |candidate: &CMat| -> Option<CMat> {
        let psi = polar_unitary_factor(candidate).ok()?;
        if intertwiner_residual(&psi, a, b) > tol.twine {
            return None;
        }
        Some(normalize_phase(&psi))
    };

    let basis = small_kernel_basis(&k, n, threshold);
    if basis.len() == 1 {
        return Ok(accept(&basis[0]).map(|psi| (psi, irreducible)));
    }

    // identity direction first: catches commutant-type kernels exactly
    let id_proj = project_onto(&basis, &CMat::identity(n, n));
    if id_proj.norm() > 1e-3 {
        if let Some(psi) = accept(&id_proj) {
            return Ok(Some((psi, irreducible)));
        }
    }
    // symmetric slice of the kernel: append antisymmetry rows and re-solve
    let nn = n * n;
    let extra = n * (n - 1) / 2;
    let mut ks = CMat::zeros(l * nn + extra, nn);
    ks.view_mut((0, 0), (l * nn, nn)).copy_from(&k);
    let mut row = l * nn;
    for c in 0..n {
        for r in 0..c {
            ks[(row, c * n + r)] = Complex::new(1.0, 0.0);
            ks[(row, r * n + c)] = Complex::new(-1.0, 0.0);
            row += 1;
        }
    }
    let sym_basis = small_kernel_basis(&ks, n, threshold);
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1a9);
    for pool in [&sym_basis, &basis] {
        if pool.is_empty() {
            continue;
        }
        for _ in 0..4 {
            let mut combo = CMat::zeros(n, n);
            for bmat in pool.iter() {
                let c = Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                combo += bmat.scale(1.0) * c;
            }
            if let Some(psi) = accept(&combo) {
                return Ok(Some((psi, irreducible)));
            }
        }
    }
    Ok(None)
}

/// max_j ‖ψ a_j − b_j ψ‖_F.
pub fn intertwiner_residual(psi: &CMat, a: &RepTuple, b: &RepTuple) -> f64 {
    a.matrices
        .iter()
        .zip(&b.matrices)
        .map(|(aj, bj)| (psi * aj - bj * psi).norm())
        .fold(0.0, f64::max)
}

/// Rotates the global phase so the largest-modulus entry is real positive.
/// The symmetry defect ‖ψ − ψᵗ‖ is invariant under this rotation.
fn normalize_phase(psi: &CMat) -> CMat {
    let mut best = (0usize, 0usize);
    let n = psi.nrows();
    for r in 0..n {
        for c in 0..n {
            if psi[(r, c)].norm() > psi[best].norm() + 1e-14 {
                best = (r, c);
            }
        }
    }
    let z = psi[best];
    if z.norm() == 0.0 {
        return psi.clone();
    }
    psi.scale(1.0) * (z.conj() / z.norm())
}

/// How the symmetry of the intertwiner was justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictRegime {
    /// the tuple was already β-fixed, no intertwiner search was needed
    BetaFixed,
    /// the class at this index has pairwise distinct eigen-angles, which
    /// forces every intertwiner to be symmetric
    DistinctSpectrum(usize),
    /// no class separates its spectrum; the symmetry of ψ was checked
    /// numerically but is not backed by the spectral argument
    UnverifiedHypothesis,
}

/// Certificate produced by a positive Lagrangian verdict.
#[derive(Debug, Clone)]
pub struct LagrangianCertificate {
    /// symmetric unitary intertwining β(u) with u
    pub psi: CMat,
    /// square root with φᵗφ = ψ
    pub phi: CMat,
    /// φ.u, which is σ₀-Lagrangian
    pub conjugated: RepTuple,
    /// witnesses on the original tuple, with L₁ = φ⁻¹(L₀)
    pub witness: LagrangianWitness,
    pub regime: VerdictRegime,
    pub psi_symmetry_defect: f64,
}

/// Lagrangian test: a closed tuple decomposes into Lagrangian involutions
/// iff β(u) is conjugate to u. On success returns the symmetric intertwiner
/// ψ, a root φ with φᵗφ = ψ, the β-fixed conjugated tuple φ.u and witnesses
/// transported back to the original tuple.
pub fn is_lagrangian(
    rep: &RepTuple,
    tol: &Tolerances,
) -> Result<(bool, Option<LagrangianCertificate>)> {
    rep.check_closed(tol)?;
    let l = rep.l();
    let n = rep.n();

    // β-fixed tuples are σ₀-Lagrangian outright, with ψ = φ = I
    if beta_fix_defect(rep) <= tol.fix {
        let (fixed, witness) = is_sigma0_lagrangian(rep, tol)?;
        debug_assert!(fixed);
        return Ok((
            true,
            Some(LagrangianCertificate {
                psi: CMat::identity(n, n),
                phi: CMat::identity(n, n),
                conjugated: rep.clone(),
                witness: witness.expect("fixed tuple carries witnesses"),
                regime: VerdictRegime::BetaFixed,
                psi_symmetry_defect: 0.0,
            }),
        ));
    }

    let classes: Vec<ConjugacyClass> = match &rep.classes {
        Some(cs) => cs.clone(),
        None => rep
            .matrices
            .iter()
            .map(|u| class_of(u, tol))
            .collect::<Result<Vec<_>>>()?,
    };
    // prefer the last factor: its intertwiner needs no cyclic rotation
    let distinct_class = if classes[l - 1].has_distinct_angles() {
        Some(l - 1)
    } else {
        (0..l).rev().find(|&j| classes[j].has_distinct_angles())
    };

    // rotate the distinguished class to the end, solve there, and map the
    // intertwiner back through the suffix product
    let rotations = match distinct_class {
        Some(r) => (l - 1 - r) % l,
        None => 0,
    };
    let mut rotated = rep.matrices.clone();
    rotated.rotate_right(rotations);
    let rotated = RepTuple { matrices: rotated, classes: None };
    let pair = find_intertwiner(&rotated, &beta(&rotated), tol)?;
    let psi_rot = match pair {
        Some((psi, _)) => psi,
        None => return Ok((false, None)),
    };
    let mut psi = psi_rot;
    if rotations > 0 {
        let r = distinct_class.expect("rotations imply a distinct class");
        let mut s = CMat::identity(n, n);
        for j in (r + 1)..l {
            s = s * &rep.matrices[j];
        }
        psi = psi * s;
    }
    let psi = normalize_phase(&psi);
    let residual = intertwiner_residual(&psi, rep, &beta(rep));
    if residual > tol.twine {
        return Err(Error::ConvergenceFailure { residual, tol: tol.twine });
    }

    let defect = numcore::sym_defect(&psi);
    if distinct_class.is_none() {
        if defect > tol.sym {
            return Err(Error::NonSymmetricIntertwiner { defect });
        }
    } else if defect > tol.twine {
        // the distinct-spectrum argument forces symmetry exactly; defects up
        // to tol.twine are attributed to closure noise in the input and
        // removed by symmetrization, which the steps below re-certify
        return Err(Error::ConvergenceFailure { residual: defect, tol: tol.twine });
    }
    let psi = polar_unitary_factor(&(&psi + psi.transpose()).scale(0.5))?;

    let phi = numcore::symmetric_unitary_sqrt(&psi, tol)?;
    let conjugated = rep.conjugated_by(&phi);
    let (fixed, conj_witness) = is_sigma0_lagrangian(&conjugated, tol)?;
    if !fixed {
        return Ok((false, None));
    }
    let conj_witness = conj_witness.expect("positive verdict carries witnesses");
    let phi_inv = phi.adjoint();
    let witness = LagrangianWitness {
        subspaces: conj_witness
            .subspaces
            .iter()
            .map(|s| s.transported(&phi_inv))
            .collect(),
    };
    let regime = match distinct_class {
        Some(r) => VerdictRegime::DistinctSpectrum(r),
        None => VerdictRegime::UnverifiedHypothesis,
    };
    Ok((
        true,
        Some(LagrangianCertificate {
            psi,
            phi,
            conjugated,
            witness,
            regime,
            psi_symmetry_defect: defect,
        }),
    ))
}
