//! Dense complex linear algebra: unitary eigendecomposition, joint
//! diagonalization, symmetric-unitary square roots, polar factors, Haar
//! sampling and the anti-Hermitian matrix exponential.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex;
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex<f64>>;
pub type CVec = DVector<Complex<f64>>;
pub type RMat = DMatrix<f64>;

pub const TAU: f64 = std::f64::consts::TAU;

/// Eigendecomposition of a unitary matrix: u = V diag(e^{iθ_k}) V* with the
/// angles ascending in [0, 2π).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub angles: Vec<f64>,
    pub frame: CMat,
}

impl EigenDecomposition {
    /// Rebuilds V diag(e^{iθ}) V*.
    pub fn reconstruct(&self) -> CMat {
        let d = CMat::from_diagonal(&CVec::from_iterator(
            self.angles.len(),
            self.angles.iter().map(|&t| Complex::from_polar(1.0, t)),
        ));
        &self.frame * d * self.frame.adjoint()
    }
}

pub fn frob(a: &CMat) -> f64 {
    a.norm()
}

pub fn unitary_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMat::identity(n, n)).norm()
}

pub fn sym_defect(a: &CMat) -> f64 {
    (a - a.transpose()).norm()
}

pub fn anti_hermitian_defect(x: &CMat) -> f64 {
    (x + x.adjoint()).norm()
}

pub fn check_finite(a: &CMat) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteEntries)
    }
}

pub fn check_unitary(u: &CMat, tol: &Tolerances) -> Result<()> {
    check_finite(u)?;
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::Malformed("matrix must be square and nonempty".into()));
    }
    let defect = unitary_defect(u);
    let bound = tol.unitary(u.nrows());
    if defect > bound {
        return Err(Error::NotUnitary { defect, tol: bound });
    }
    Ok(())
}

pub fn check_same_dim(a: &CMat, b: &CMat) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(())
}

/// Wraps an angle into [0, 2π).
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // t slightly below zero wraps to values that round to 2π itself
    if r >= TAU {
        r = 0.0;
    }
    r
}

/// Distance between two angles on the circle, in [0, π].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (wrap_angle(a) - wrap_angle(b)).abs();
    d.min(TAU - d)
}

/// Distance between two angle multisets under the best circular alignment:
/// both are sorted, then the maximal pairwise circular distance is minimized
/// over cyclic shifts of one of them.
pub fn angle_multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal cardinality");
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut sa: Vec<f64> = a.iter().map(|&t| wrap_angle(t)).collect();
    let mut sb: Vec<f64> = b.iter().map(|&t| wrap_angle(t)).collect();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut best = f64::INFINITY;
    for shift in 0..n {
        let mut worst: f64 = 0.0;
        for j in 0..n {
            worst = worst.max(circular_distance(sa[j], sb[(j + shift) % n]));
        }
        best = best.min(worst);
    }
    best
}

/// One Givens rotation of a simultaneous-diagonalization sweep: the 2×2 block
/// [[c, -s̄], [s, c]] on columns (p, q), applied as m ← g* m g on each matrix
/// and accumulated as v ← v g.
struct JointRotation {
    c: f64,
    s: Complex<f64>,
}

fn apply_joint_rotation(m: &mut CMat, p: usize, q: usize, rot: &JointRotation) {
    let (c, s) = (Complex::from(rot.c), rot.s);
    let n = m.nrows();
    // rows: (row_p, row_q) ← (c·row_p + s̄·row_q, −s·row_p + c·row_q)
    for k in 0..n {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = c * a + s.conj() * b;
        m[(q, k)] = -s * a + c * b;
    }
    rotate_columns(m, p, q, rot);
}

fn rotate_columns(m: &mut CMat, p: usize, q: usize, rot: &JointRotation) {
    let (c, s) = (Complex::from(rot.c), rot.s);
    let n = m.nrows();
    for k in 0..n {
        let a = m[(k, p)];
        let b = m[(k, q)];
        m[(k, p)] = c * a + s * b;
        m[(k, q)] = -s.conj() * a + c * b;
    }
}

/// Rotation minimizing the joint off-diagonal mass of a family of Hermitian
/// matrices on the (p, q) plane. Returns None when the pair is already
/// jointly diagonal to working precision.
fn joint_rotation_hermitian(mats: &[&CMat], p: usize, q: usize) -> Option<JointRotation> {
    let mut g = nalgebra::Matrix3::<f64>::zeros();
    let mut scale: f64 = 0.0;
    for m in mats {
        let h = nalgebra::Vector3::new(
            (m[(p, p)] - m[(q, q)]).re,
            2.0 * m[(p, q)].re,
            2.0 * m[(p, q)].im,
        );
        g += h * h.transpose();
        scale = scale.max(h[0].abs());
        scale = scale.max(m[(p, q)].norm());
    }
    let off: f64 = mats.iter().map(|m| m[(p, q)].norm_sqr()).sum();
    if off.sqrt() <= 1e-15 * (1.0 + scale) {
        return None;
    }
    let eig = nalgebra::SymmetricEigen::new(g);
    let mut top = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] > eig.eigenvalues[top] {
            top = i;
        }
    }
    let mut v = eig.eigenvectors.column(top).into_owned();
    if v[0] < 0.0 {
        v = -v;
    }
    let c = ((1.0 + v[0]) / 2.0).sqrt();
    if c <= 1e-9 {
        return None;
    }
    let s = Complex::new(v[1], -v[2]) / (2.0 * c);
    if s.norm() <= 1e-16 {
        return None;
    }
    Some(JointRotation { c, s })
}

fn offdiag_norm(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Simultaneously diagonalizes a family of commuting Hermitian matrices by
/// Jacobi sweeps, starting from the frame `v0`. The matrices are updated in
/// place to (near-)diagonal form and the accumulated frame is returned.
fn joint_diagonalize_hermitian(mats: &mut [CMat], v0: CMat) -> CMat {
    let n = v0.nrows();
    let mut v = v0;
    for m in mats.iter_mut() {
        *m = v.adjoint() * &*m * &v;
    }
    let scale: f64 = mats.iter().map(|m| m.norm()).sum::<f64>() + 1.0;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let rot = {
                    let refs: Vec<&CMat> = mats.iter().collect();
                    joint_rotation_hermitian(&refs, p, q)
                };
                if let Some(rot) = rot {
                    for m in mats.iter_mut() {
                        apply_joint_rotation(m, p, q, &rot);
                    }
                    rotate_columns(&mut v, p, q, &rot);
                    rotated = true;
                }
            }
        }
        let off: f64 = mats.iter().map(offdiag_norm).sum();
        if !rotated || off <= 1e-14 * scale {
            break;
        }
    }
    v
}

/// Makes the largest-modulus entry of every column real positive; ties go to
/// the lowest row index.
fn normalize_column_phases(v: &mut CMat) {
    let (n, m) = v.shape();
    for j in 0..m {
        let mut best = 0;
        for i in 1..n {
            if v[(i, j)].norm() > v[(best, j)].norm() + 1e-14 {
                best = i;
            }
        }
        let z = v[(best, j)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                v[(i, j)] *= phase;
            }
        }
    }
}

/// Groups sorted angles into clusters of circular diameter ≤ 1e-12, joining
/// across the 0 ≡ 2π seam. Returns index groups into the sorted order.
fn degenerate_clusters(sorted_angles: &[f64]) -> Vec<Vec<usize>> {
    let n = sorted_angles.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    for i in 1..n {
        if circular_distance(sorted_angles[i], sorted_angles[i - 1]) <= 1e-12 {
            current.push(i);
        } else {
            clusters.push(std::mem::take(&mut current));
            current = vec![i];
        }
    }
    clusters.push(current);
    // the seam: a cluster ending at 2π−ε continues at 0+ε
    if clusters.len() > 1
        && circular_distance(sorted_angles[n - 1], sorted_angles[0]) <= 1e-12
    {
        let first = clusters.remove(0);
        clusters.last_mut().unwrap().extend(first);
    }
    clusters
}

/// Replaces the columns of a degenerate cluster with the canonical
/// orthonormal basis of its eigenspace: the leading columns of a pivoted QR
/// of the spectral projector. The result depends on the subspace alone, not
/// on the arbitrary basis an eigensolver happened to return.
fn canonicalize_cluster_basis(frame: &mut CMat, cluster: &[usize]) {
    let n = frame.nrows();
    let mut proj = CMat::zeros(n, n);
    for &j in cluster {
        let col = frame.column(j);
        proj += &col * col.adjoint();
    }
    let qr = proj.col_piv_qr();
    let q = qr.q();
    for (idx, &j) in cluster.iter().enumerate() {
        frame.set_column(j, &q.column(idx));
    }
}

fn column_lex_less(v: &CMat, a: usize, b: usize) -> bool {
    for i in 0..v.nrows() {
        let (x, y) = (v[(i, a)], v[(i, b)]);
        if x.re != y.re {
            return x.re < y.re;
        }
        if x.im != y.im {
            return x.im < y.im;
        }
    }
    false
}

/// Eigendecomposition of a unitary matrix.
///
/// The Hermitian commuting pair H = (u+u*)/2, S = (u−u*)/(2i) is jointly
/// diagonalized (seeded by the eigendecomposition of H), which keeps
/// eigenvectors accurate even when two eigen-angles have nearly equal
/// cosines. Angles come back ascending in [0, 2π), degenerate clusters
/// ordered by column-lexicographic comparison of the frame, and every column
/// phase is normalized so its largest entry is real positive.
pub fn eig_unitary(u: &CMat, tol: &Tolerances) -> Result<EigenDecomposition> {
    check_unitary(u, tol)?;
    let n = u.nrows();
    let h = (u + u.adjoint()).scale(0.5);
    let s = (u - u.adjoint()) * Complex::new(0.0, -0.5);
    let seed = nalgebra::SymmetricEigen::new(h.clone());
    let mut mats = [h, s];
    let v = joint_diagonalize_hermitian(&mut mats, seed.eigenvectors);

    let mut angles: Vec<f64> = (0..n)
        .map(|i| wrap_angle(mats[1][(i, i)].re.atan2(mats[0][(i, i)].re)))
        .collect();
    let mut frame = v;

    let sort_columns = |angles: &mut Vec<f64>, frame: &mut CMat| {
        let mut order: Vec<usize> = (0..angles.len()).collect();
        order.sort_by(|&a, &b| {
            // within equal angles, the column with the larger leading entry
            // comes first, so the identity frame stays the identity
            angles[a].partial_cmp(&angles[b]).unwrap().then_with(|| {
                if column_lex_less(frame, b, a) {
                    std::cmp::Ordering::Less
                } else if column_lex_less(frame, a, b) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
        });
        *frame = CMat::from_columns(
            &order.iter().map(|&j| frame.column(j).into_owned()).collect::<Vec<_>>(),
        );
        *angles = order.iter().map(|&j| angles[j]).collect();
    };

    sort_columns(&mut angles, &mut frame);
    for cluster in degenerate_clusters(&angles) {
        if cluster.len() < 2 {
            continue;
        }
        // snap the cluster to one representative angle so the ordering
        // within it is decided by the column tie-break alone
        let r = angles[cluster[0]];
        let mean = r + cluster
            .iter()
            .map(|&j| {
                let mut d = (angles[j] - r) % TAU;
                if d > std::f64::consts::PI {
                    d -= TAU;
                } else if d < -std::f64::consts::PI {
                    d += TAU;
                }
                d
            })
            .sum::<f64>()
            / cluster.len() as f64;
        let snapped = wrap_angle(mean);
        for &j in &cluster {
            angles[j] = snapped;
        }
        canonicalize_cluster_basis(&mut frame, &cluster);
    }
    normalize_column_phases(&mut frame);
    sort_columns(&mut angles, &mut frame);
    let decomp = EigenDecomposition { angles, frame };

    let residual = (decomp.reconstruct() - u).norm();
    let bound = tol.recon(n);
    if residual > bound {
        return Err(Error::ConvergenceFailure { residual, tol: bound });
    }
    Ok(decomp)
}

fn check_real_symmetric(x: &RMat, tol: &Tolerances) -> Result<()> {
    let defect = (x - x.transpose()).norm();
    if defect > tol.sym {
        return Err(Error::NotSymmetric { defect, tol: tol.sym });
    }
    Ok(())
}

/// Real analogue of the joint rotation, on a pair of symmetric matrices.
fn joint_rotation_symmetric(mats: &[&RMat], p: usize, q: usize) -> Option<JointRotation> {
    let mut g = nalgebra::Matrix2::<f64>::zeros();
    let mut scale: f64 = 0.0;
    for m in mats {
        let h = nalgebra::Vector2::new(m[(p, p)] - m[(q, q)], 2.0 * m[(p, q)]);
        g += h * h.transpose();
        scale = scale.max(h[0].abs()).max(h[1].abs());
    }
    let off: f64 = mats.iter().map(|m| m[(p, q)] * m[(p, q)]).sum();
    if off.sqrt() <= 1e-15 * (1.0 + scale) {
        return None;
    }
    let eig = nalgebra::SymmetricEigen::new(g);
    let top = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let mut v = eig.eigenvectors.column(top).into_owned();
    if v[0] < 0.0 {
        v = -v;
    }
    let c = ((1.0 + v[0]) / 2.0).sqrt();
    if c <= 1e-9 {
        return None;
    }
    let s = v[1] / (2.0 * c);
    if s.abs() <= 1e-16 {
        return None;
    }
    Some(JointRotation { c, s: Complex::from(s) })
}

/// Finds k ∈ O(n) with k x kᵗ and k y kᵗ both diagonal, for commuting real
/// symmetric x, y. Columns are ordered by the diagonal of x (ties by the
/// diagonal of y) and sign-normalized on the largest entry.
pub fn codiagonalize_commuting_symmetric(x: &RMat, y: &RMat, tol: &Tolerances) -> Result<RMat> {
    if x.nrows() != y.nrows() || x.nrows() != x.ncols() || y.nrows() != y.ncols() {
        return Err(Error::DimensionMismatch { left: x.nrows(), right: y.nrows() });
    }
    check_real_symmetric(x, tol)?;
    check_real_symmetric(y, tol)?;
    let defect = (x * y - y * x).norm();
    if defect > tol.commute {
        return Err(Error::NotCommuting { defect, tol: tol.commute });
    }

    let n = x.nrows();
    let mut a = x.clone();
    let mut b = y.clone();
    let mut v = RMat::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                if let Some(rot) = joint_rotation_symmetric(&[&a, &b], p, q) {
                    let (c, s) = (rot.c, rot.s.re);
                    for m in [&mut a, &mut b] {
                        for k in 0..n {
                            let (u0, u1) = (m[(p, k)], m[(q, k)]);
                            m[(p, k)] = c * u0 + s * u1;
                            m[(q, k)] = -s * u0 + c * u1;
                        }
                        for k in 0..n {
                            let (u0, u1) = (m[(k, p)], m[(k, q)]);
                            m[(k, p)] = c * u0 + s * u1;
                            m[(k, q)] = -s * u0 + c * u1;
                        }
                    }
                    for k in 0..n {
                        let (u0, u1) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = c * u0 + s * u1;
                        v[(k, q)] = -s * u0 + c * u1;
                    }
                    rotated = true;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .partial_cmp(&a[(j, j)])
            .unwrap()
            .then(b[(i, i)].partial_cmp(&b[(j, j)]).unwrap())
    });
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    for &j in &order {
        let mut col = v.column(j).into_owned();
        let mut best = 0;
        for i in 1..n {
            if col[i].abs() > col[best].abs() + 1e-14 {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col = -col;
        }
        cols.push(col);
    }
    let v = RMat::from_columns(&cols);
    let k = v.transpose();

    let bound = tol.recon(n);
    let off = |m: &RMat| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += m[(i, j)] * m[(i, j)];
                }
            }
        }
        acc.sqrt()
    };
    let da = &k * x * k.transpose();
    let db = &k * y * k.transpose();
    if off(&da) > bound || off(&db) > bound {
        return Err(Error::ConvergenceFailure {
            residual: off(&da).max(off(&db)),
            tol: bound,
        });
    }
    Ok(k)
}

fn real_part(a: &CMat) -> RMat {
    RMat::from_iterator(a.nrows(), a.ncols(), a.iter().map(|z| z.re))
}

fn imag_part(a: &CMat) -> RMat {
    RMat::from_iterator(a.nrows(), a.ncols(), a.iter().map(|z| z.im))
}

/// Principal square root in W(n): for symmetric unitary w returns symmetric
/// unitary φ with φ² = w, the branch halving representative angles in
/// [0, 2π).
///
/// Writes w = x + iy; x, y are commuting real symmetric matrices (this is
/// exactly unitarity plus symmetry of w), so an orthogonal k diagonalizes
/// both and φ = kᵗ diag(e^{iθ/2}) k.
pub fn symmetric_unitary_sqrt(w: &CMat, tol: &Tolerances) -> Result<CMat> {
    check_finite(w)?;
    let n = w.nrows();
    let udef = unitary_defect(w);
    if udef > tol.unitary(n) {
        return Err(Error::NotSymmetricUnitary {
            what: "unitarity",
            defect: udef,
            tol: tol.unitary(n),
        });
    }
    let sdef = sym_defect(w);
    if sdef > tol.sym {
        return Err(Error::NotSymmetricUnitary {
            what: "symmetry",
            defect: sdef,
            tol: tol.sym,
        });
    }
    let x = real_part(w);
    let y = imag_part(w);
    let k = codiagonalize_commuting_symmetric(&x, &y, tol)?;
    let dx = &k * &x * k.transpose();
    let dy = &k * &y * k.transpose();
    let half = CMat::from_diagonal(&CVec::from_iterator(
        n,
        (0..n).map(|i| Complex::from_polar(1.0, wrap_angle(dy[(i, i)].atan2(dx[(i, i)])) / 2.0)),
    ));
    let kc = k.map(Complex::from);
    let phi = kc.transpose() * half * kc;
    let residual = (&phi * &phi - w).norm();
    if residual > tol.recon(n) {
        return Err(Error::ConvergenceFailure { residual, tol: tol.recon(n) });
    }
    Ok(phi)
}

/// Closest unitary in Frobenius norm, via the singular value decomposition.
pub fn polar_unitary_factor(a: &CMat) -> Result<CMat> {
    check_finite(a)?;
    let svd = a.clone().svd(true, true);
    let sigma_min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(sigma_min > 1e-12) {
        return Err(Error::RankDeficient { sigma_min });
    }
    let u = svd.u.as_ref().expect("svd requested u");
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    Ok(u * v_t)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
/// diagonal phases pushed into Q.
pub fn haar_unitary_with(n: usize, rng: &mut impl rand::Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im) / 2f64.sqrt()
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CMat::from_diagonal(&CVec::from_iterator(
        n,
        (0..n).map(|i| {
            let z = r[(i, i)];
            if z.norm() > 0.0 {
                z / z.norm()
            } else {
                Complex::new(1.0, 0.0)
            }
        }),
    ));
    q * phases
}

pub fn haar_unitary(n: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(n, &mut rng)
}

/// Haar-distributed orthogonal matrix: QR of a real Gaussian with the signs
/// of the R diagonal pushed into Q.
pub fn haar_orthogonal_with(n: usize, rng: &mut impl rand::Rng) -> RMat {
    let g = RMat::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let signs = RMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|i| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }),
    ));
    q * signs
}

pub fn haar_orthogonal(n: usize, seed: u64) -> RMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_orthogonal_with(n, &mut rng)
}

/// Random element of u(n): anti-Hermitian part of a complex Gaussian.
pub fn random_anti_hermitian(n: usize, rng: &mut impl rand::Rng) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex::new(re, im)
    });
    (&g - g.adjoint()).scale(0.5)
}

/// exp(X) for anti-Hermitian X, through the Hermitian eigendecomposition of
/// iX. Diagonal input is exponentiated entrywise, which keeps the diagonal
/// case exact.
pub fn expm_antihermitian(x: &CMat) -> CMat {
    let n = x.nrows();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || x[(i, j)] == Complex::new(0.0, 0.0)));
    if diagonal {
        return CMat::from_diagonal(&CVec::from_iterator(n, (0..n).map(|i| x[(i, i)].exp())));
    }
    // h = iX is Hermitian; exp(X) = exp(−ih) = V diag(e^{−iλ}) V*
    let h = x * Complex::new(0.0, 1.0);
    let h = (&h + h.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&t| Complex::from_polar(1.0, -t)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}
