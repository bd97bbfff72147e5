//! Two-forms on products of conjugacy classes, the group-valued momentum
//! map, numerical verification of the quasi-Hamiltonian axioms, and the
//! anti-symplectic property of β.
//!
//! Tangent vectors are always carried as Lie-algebra representatives:
//! X ∈ u(n) stands for [X]_u = Xu − uX at the base point u.

use num_complex::Complex;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numcore::{check_same_dim, eig_unitary, haar_unitary_with, CMat, RMat};
use crate::reps::{self, ConjugacyClass, RepTuple};

/// Sign s in [X♯, Y♯] = s·[X,Y]♯ for the conjugation action flows
/// t ↦ e^{tX}·p·e^{−tX}. Calibrated so that dω = −μ*χ holds on a single
/// conjugacy class, where the axiom is unconditional; a test pins it.
/// Discrimination needs n ≥ 3: at n = 2 both candidate signs agree on a
/// single class because the bracket sum and χ vanish there.
pub const FUNDAMENTAL_BRACKET_SIGN: f64 = -1.0;

/// Ad-invariant metric (X|Y) = tr(XY*) = −tr(XY); real for
/// anti-Hermitian arguments.
pub fn inner(x: &CMat, y: &CMat) -> f64 {
    -(x * y).trace().re
}

/// Cartan 3-form χ(X,Y,Z) = ½ (X | [Y,Z]).
pub fn chi(x: &CMat, y: &CMat, z: &CMat) -> f64 {
    0.5 * inner(x, &(y * z - z * y))
}

fn ad(u: &CMat, x: &CMat) -> CMat {
    u * x * u.adjoint()
}

fn ad_inv(u: &CMat, x: &CMat) -> CMat {
    u.adjoint() * x * u
}

/// Realized tangent [X]_u = Xu − uX of the conjugation action.
pub fn realized(u: &CMat, x: &CMat) -> CMat {
    x * u - u * x
}

/// Orthonormal anti-Hermitian basis of u(n) under (·|·): iE_kk, then
/// (E_jk − E_kj)/√2 and i(E_jk + E_kj)/√2 for j < k.
pub fn tangent_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = CMat::zeros(n, n);
        m[(k, k)] = Complex::new(0.0, 1.0);
        basis.push(m);
    }
    let s = 1.0 / 2.0_f64.sqrt();
    for j in 0..n {
        for k in (j + 1)..n {
            let mut a = CMat::zeros(n, n);
            a[(j, k)] = Complex::new(s, 0.0);
            a[(k, j)] = Complex::new(-s, 0.0);
            basis.push(a);
            let mut b = CMat::zeros(n, n);
            b[(j, k)] = Complex::new(0.0, s);
            b[(k, j)] = Complex::new(0.0, s);
            basis.push(b);
        }
    }
    basis
}

/// A point of a conjugacy class.
#[derive(Debug, Clone)]
pub struct ClassPoint {
    pub u: CMat,
    pub class: ConjugacyClass,
}

impl ClassPoint {
    pub fn new(u: CMat, class: ConjugacyClass, tol: &Tolerances) -> Result<Self> {
        if !reps::membership(&class, &u, tol)? {
            let d = reps::membership_distance(&class, &u, tol)?;
            return Err(Error::Malformed(format!(
                "matrix lies outside its prescribed class (distance {d:.3e})"
            )));
        }
        Ok(ClassPoint { u, class })
    }

    /// The point's own spectrum as its class.
    pub fn from_unitary(u: CMat, tol: &Tolerances) -> Result<Self> {
        let class = reps::class_of(&u, tol)?;
        Ok(ClassPoint { u, class })
    }
}

/// A point of C₁ × ⋯ × C_l.
#[derive(Debug, Clone)]
pub struct ProductPoint {
    pub points: Vec<ClassPoint>,
}

impl ProductPoint {
    pub fn new(points: Vec<ClassPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Malformed("a product point needs l ≥ 1 factors".into()));
        }
        let n = points[0].u.nrows();
        for p in &points {
            if p.u.nrows() != n {
                return Err(Error::DimensionMismatch { left: n, right: p.u.nrows() });
            }
        }
        Ok(ProductPoint { points })
    }

    pub fn from_unitaries(ms: &[CMat], tol: &Tolerances) -> Result<Self> {
        ProductPoint::new(
            ms.iter()
                .map(|u| ClassPoint::from_unitary(u.clone(), tol))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn l(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        self.points[0].u.nrows()
    }

    pub fn rep(&self) -> RepTuple {
        RepTuple {
            matrices: self.points.iter().map(|p| p.u.clone()).collect(),
            classes: Some(self.points.iter().map(|p| p.class.clone()).collect()),
        }
    }
}

/// Ordered product μ(u₁, …, u_l) = u₁⋯u_l.
pub fn momentum(p: &ProductPoint) -> CMat {
    let n = p.n();
    p.points
        .iter()
        .fold(CMat::identity(n, n), |acc, q| acc * &q.u)
}

/// ω on a single class: ω_u([X]_u, [Y]_u) = ½((Ad u.X|Y) − (Ad u.Y|X)).
pub fn class_form(p: &ClassPoint, x: &CMat, y: &CMat) -> Result<f64> {
    check_same_dim(&p.u, x)?;
    check_same_dim(&p.u, y)?;
    Ok(0.5 * (inner(&ad(&p.u, x), y) - inner(&ad(&p.u, y), x)))
}

/// Running state of the left-associated fusion fold: the partial momentum,
/// the two partial realized tangents under dμ, and the accumulated form.
struct FusedState {
    mu: CMat,
    xi_x: CMat,
    xi_y: CMat,
    acc: f64,
}

impl FusedState {
    fn single(p: &ClassPoint, x: &CMat, y: &CMat) -> Result<FusedState> {
        Ok(FusedState {
            mu: p.u.clone(),
            xi_x: realized(&p.u, x),
            xi_y: realized(&p.u, y),
            acc: class_form(p, x, y)?,
        })
    }

    /// Fusion step: ω = ω₁ ⊕ ω₂ + ½[(μ₁*θ^L.x₁ | μ₂*θ^R.y₂) − (x↔y)],
    /// with θ^L_u(ξ) = u⁻¹ξ and θ^R_u(ξ) = ξu⁻¹.
    fn fuse(self, rhs: FusedState) -> FusedState {
        let theta_l_x = self.mu.adjoint() * &self.xi_x;
        let theta_l_y = self.mu.adjoint() * &self.xi_y;
        let theta_r_x = &rhs.xi_x * rhs.mu.adjoint();
        let theta_r_y = &rhs.xi_y * rhs.mu.adjoint();
        let correction = 0.5 * (inner(&theta_l_x, &theta_r_y) - inner(&theta_l_y, &theta_r_x));
        FusedState {
            xi_x: &self.xi_x * &rhs.mu + &self.mu * &rhs.xi_x,
            xi_y: &self.xi_y * &rhs.mu + &self.mu * &rhs.xi_y,
            mu: self.mu * rhs.mu,
            acc: self.acc + rhs.acc + correction,
        }
    }
}

fn check_lists(p: &ProductPoint, xs: &[CMat], ys: &[CMat]) -> Result<()> {
    if xs.len() != p.l() || ys.len() != p.l() {
        return Err(Error::DimensionMismatch { left: p.l(), right: xs.len().min(ys.len()) });
    }
    for (q, m) in p.points.iter().zip(xs.iter().chain(ys.iter()).cycle().take(2 * p.l())) {
        check_same_dim(&q.u, m)?;
    }
    Ok(())
}

/// Fusion 2-form on C₁ × ⋯ × C_l, folded left-associatively.
pub fn fusion_form_general(p: &ProductPoint, xs: &[CMat], ys: &[CMat]) -> Result<f64> {
    check_lists(p, xs, ys)?;
    let mut state = FusedState::single(&p.points[0], &xs[0], &ys[0])?;
    for j in 1..p.l() {
        state = state.fuse(FusedState::single(&p.points[j], &xs[j], &ys[j])?);
    }
    Ok(state.acc)
}

/// The displayed ten-term expression for the fusion form on a triple
/// product, coded literally as an independent route.
pub fn fusion_form_l3(p: &ProductPoint, xs: &[CMat], ys: &[CMat]) -> Result<f64> {
    if p.l() != 3 {
        return Err(Error::DimensionMismatch { left: 3, right: p.l() });
    }
    check_lists(p, xs, ys)?;
    let (u1, u2, u3) = (&p.points[0].u, &p.points[1].u, &p.points[2].u);
    let (x1, x2, x3) = (&xs[0], &xs[1], &xs[2]);
    let (y1, y2, y3) = (&ys[0], &ys[1], &ys[2]);
    let u23 = u2 * u3;
    let value = inner(&ad(u1, x1), y1) - inner(&ad(u1, y1), x1)
        + inner(&ad(u2, x2), y2) - inner(&ad(u2, y2), x2)
        + inner(&ad(u3, x3), y3) - inner(&ad(u3, y3), x3)
        + inner(&(ad_inv(u1, x1) - x1), &(y2 - ad(u2, y2)))
        - inner(&(ad_inv(u1, y1) - y1), &(x2 - ad(u2, x2)))
        + inner(&(ad_inv(u2, x2) - x2), &(y3 - ad(u3, y3)))
        - inner(&(ad_inv(u2, y2) - y2), &(x3 - ad(u3, x3)))
        + inner(&(ad_inv(u1, x1) - x1), &(ad(u2, y3) - ad(&u23, y3)))
        - inner(&(ad_inv(u1, y1) - y1), &(ad(u2, x3) - ad(&u23, x3)));
    Ok(0.5 * value)
}

/// dμ applied to the tangent with representatives xs: Σ_j L_j [X_j] R_j,
/// a tangent vector at μ(p).
pub fn momentum_differential(p: &ProductPoint, xs: &[CMat]) -> CMat {
    let l = p.l();
    let n = p.n();
    let mut prefix = vec![CMat::identity(n, n); l + 1];
    for j in 0..l {
        prefix[j + 1] = &prefix[j] * &p.points[j].u;
    }
    let mut suffix = vec![CMat::identity(n, n); l + 1];
    for j in (0..l).rev() {
        suffix[j] = &p.points[j].u * &suffix[j + 1];
    }
    let mut out = CMat::zeros(n, n);
    for j in 0..l {
        out += &prefix[j] * realized(&p.points[j].u, &xs[j]) * &suffix[j + 1];
    }
    out
}

/// Moment condition ι_{X♯}ω = ½ μ*(θ^L + θ^R | X): the largest deviation
/// over the coordinate spanning set of tangent directions.
pub fn check_moment_condition(p: &ProductPoint, x: &CMat) -> Result<f64> {
    let l = p.l();
    let n = p.n();
    let diag: Vec<CMat> = vec![x.clone(); l];
    let m = momentum(p);
    let m_inv = m.adjoint();
    let basis = tangent_basis(n);
    let mut worst = 0.0_f64;
    let mut v_list = vec![CMat::zeros(n, n); l];
    for j in 0..l {
        for b in &basis {
            v_list[j] = b.clone();
            let lhs = fusion_form_general(p, &diag, &v_list)?;
            let dmu = momentum_differential(p, &v_list);
            let rhs = 0.5 * (inner(&(&m_inv * &dmu), x) + inner(&(&dmu * &m_inv), x));
            worst = worst.max((lhs - rhs).abs());
        }
        v_list[j] = CMat::zeros(n, n);
    }
    Ok(worst)
}

/// Numeric kernel dimension of ω at p against the predicted dimension
/// dim{X ∈ u(n) : Ad μ(p)·X = −X}; both ranks use the 1e-7 threshold.
pub fn check_kernel_condition(p: &ProductPoint) -> Result<(usize, usize)> {
    const RANK_EPS: f64 = 1e-7;
    let l = p.l();
    let n = p.n();
    let basis = tangent_basis(n);
    let nn = basis.len();

    // spanning set: basis element b in slot j, realized per factor
    let mut span = RMat::zeros(2 * n * n * l, nn * l);
    for j in 0..l {
        for (k, b) in basis.iter().enumerate() {
            let r = realized(&p.points[j].u, b);
            for c in 0..n {
                for rr in 0..n {
                    let base = j * 2 * n * n + 2 * (c * n + rr);
                    span[(base, j * nn + k)] = r[(rr, c)].re;
                    span[(base + 1, j * nn + k)] = r[(rr, c)].im;
                }
            }
        }
    }
    let tangent_rank = span
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_EPS)
        .count();

    let mut gram = RMat::zeros(nn * l, nn * l);
    let mut lists: Vec<Vec<CMat>> = Vec::with_capacity(nn * l);
    for j in 0..l {
        for b in &basis {
            let mut v = vec![CMat::zeros(n, n); l];
            v[j] = b.clone();
            lists.push(v);
        }
    }
    for a in 0..nn * l {
        for bq in (a + 1)..nn * l {
            let value = fusion_form_general(p, &lists[a], &lists[bq])?;
            gram[(a, bq)] = value;
            gram[(bq, a)] = -value;
        }
    }
    let gram_rank = gram
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > RANK_EPS)
        .count();
    let kernel_dim = tangent_rank - gram_rank;

    // predicted: nullity of Ad μ(p) + Id on u(n) in the orthonormal basis
    let m = momentum(p);
    let mut op = RMat::zeros(nn, nn);
    for (bcol, b) in basis.iter().enumerate() {
        let image = ad(&m, b) + b;
        for (brow, a) in basis.iter().enumerate() {
            op[(brow, bcol)] = inner(a, &image);
        }
    }
    let predicted = nn
        - op.svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > RANK_EPS)
            .count();
    Ok((kernel_dim, predicted))
}

fn conjugation_flow(p: &ProductPoint, x: &CMat, t: f64) -> ProductPoint {
    let g = crate::numcore::expm_antihermitian(&x.scale(t));
    let gi = g.adjoint();
    ProductPoint {
        points: p
            .points
            .iter()
            .map(|q| ClassPoint { u: &g * &q.u * &gi, class: q.class.clone() })
            .collect(),
    }
}

fn bracket(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

fn d_omega_estimate(
    p: &ProductPoint,
    x: &CMat,
    y: &CMat,
    z: &CMat,
    h: f64,
) -> Result<f64> {
    let l = p.l();
    let eval = |q: &ProductPoint, a: &CMat, b: &CMat| -> Result<f64> {
        fusion_form_general(q, &vec![a.clone(); l], &vec![b.clone(); l])
    };
    let deriv = |a: &CMat, b: &CMat, c: &CMat| -> Result<f64> {
        let plus = eval(&conjugation_flow(p, a, h), b, c)?;
        let minus = eval(&conjugation_flow(p, a, -h), b, c)?;
        Ok((plus - minus) / (2.0 * h))
    };
    // Cartan: dω(A,B,C) = Aω(B,C) − Bω(A,C) + Cω(A,B)
    //                     − ω([A,B],C) + ω([A,C],B) − ω([B,C],A)
    let derivative_part = deriv(x, y, z)? - deriv(y, x, z)? + deriv(z, x, y)?;
    let bracket_part = eval(p, &bracket(x, y), z)? - eval(p, &bracket(x, z), y)?
        + eval(p, &bracket(y, z), x)?;
    Ok(derivative_part - FUNDAMENTAL_BRACKET_SIGN * bracket_part)
}

/// Residual |dω(X♯,Y♯,Z♯) + χ(dμX♯, dμY♯, dμZ♯)| at step h, with dω by
/// Cartan's formula on fundamental fields and central differences along
/// the conjugation flows.
pub fn check_d_omega(
    p: &ProductPoint,
    x: &CMat,
    y: &CMat,
    z: &CMat,
    h: f64,
) -> Result<f64> {
    check_d_omega_inner(p, x, y, z, h, false)
}

/// check_d_omega with one Richardson extrapolation step (h and h/2).
pub fn check_d_omega_richardson(
    p: &ProductPoint,
    x: &CMat,
    y: &CMat,
    z: &CMat,
    h: f64,
) -> Result<f64> {
    check_d_omega_inner(p, x, y, z, h, true)
}

fn check_d_omega_inner(
    p: &ProductPoint,
    x: &CMat,
    y: &CMat,
    z: &CMat,
    h: f64,
    richardson: bool,
) -> Result<f64> {
    if !(1e-6..=1e-4).contains(&h) {
        return Err(Error::StepOutOfRange { h, lo: 1e-6, hi: 1e-4 });
    }
    let d_omega = if richardson {
        let coarse = d_omega_estimate(p, x, y, z, h)?;
        let fine = d_omega_estimate(p, x, y, z, h / 2.0)?;
        (4.0 * fine - coarse) / 3.0
    } else {
        d_omega_estimate(p, x, y, z, h)?
    };
    let l = p.l();
    let m_inv = momentum(p).adjoint();
    let translate = |w: &CMat| -> CMat { &m_inv * w };
    let a = translate(&momentum_differential(p, &vec![x.clone(); l]));
    let b = translate(&momentum_differential(p, &vec![y.clone(); l]));
    let c = translate(&momentum_differential(p, &vec![z.clone(); l]));
    Ok((d_omega + chi(&a, &b, &c)).abs())
}

/// First-order jet (value, velocity) of a matrix curve.
#[derive(Clone)]
struct Jet {
    val: CMat,
    vel: CMat,
}

impl Jet {
    fn mul(&self, rhs: &Jet) -> Jet {
        Jet {
            val: &self.val * &rhs.val,
            vel: &self.vel * &rhs.val + &self.val * &rhs.vel,
        }
    }

    fn transpose(&self) -> Jet {
        Jet { val: self.val.transpose(), vel: self.vel.transpose() }
    }

    fn conj(&self) -> Jet {
        Jet {
            val: self.val.map(|c| c.conj()),
            vel: self.vel.map(|c| c.conj()),
        }
    }
}

/// Differential of β at p: the image point β(p) and the exact first-order
/// velocities of β along the curves u_j(t) = e^{tX_j} u_j e^{−tX_j},
/// re-expressed as Lie-algebra representatives at the image point.
pub fn beta_pushforward(
    p: &ProductPoint,
    xs: &[CMat],
) -> Result<(ProductPoint, Vec<CMat>)> {
    if xs.len() != p.l() {
        return Err(Error::DimensionMismatch { left: p.l(), right: xs.len() });
    }
    let l = p.l();
    let n = p.n();
    let jets: Vec<Jet> = (0..l)
        .map(|j| Jet {
            val: p.points[j].u.clone(),
            vel: realized(&p.points[j].u, &xs[j]),
        })
        .collect();
    // suffix products s_j = u_j⋯u_l as jets; β_j = s_{j+1}ᵗ u_jᵗ s̄_{j+1}
    let identity = Jet { val: CMat::identity(n, n), vel: CMat::zeros(n, n) };
    let mut suffix = vec![identity; l + 1];
    for j in (0..l).rev() {
        suffix[j] = jets[j].mul(&suffix[j + 1]);
    }
    let mut image_points = Vec::with_capacity(l);
    let mut image_tangents = Vec::with_capacity(l);
    for j in 0..l {
        let s = &suffix[j + 1];
        let out = s.transpose().mul(&jets[j].transpose()).mul(&s.conj());
        let rep_x = realize_representative(&out.val, &out.vel)?;
        image_points.push(ClassPoint { u: out.val, class: p.points[j].class.clone() });
        image_tangents.push(rep_x);
    }
    Ok((ProductPoint { points: image_points }, image_tangents))
}

/// Solves [X]_v = velocity for anti-Hermitian X. In the eigenbasis of
/// v the equation decouples entrywise: X̃_rc (e^{iθ_c} − e^{iθ_r}) = w̃_rc,
/// so X̃ is w̃ divided by eigenvalue differences, zero where they vanish.
fn realize_representative(v: &CMat, velocity: &CMat) -> Result<CMat> {
    let n = v.nrows();
    let eig = eig_unitary(v, &Tolerances::default())?;
    let q = &eig.frame;
    let w_tilde = q.adjoint() * velocity * q;
    let mut x_tilde = CMat::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let diff = Complex::new(0.0, eig.angles[c]).exp() - Complex::new(0.0, eig.angles[r]).exp();
            if diff.norm() > 1e-12 {
                x_tilde[(r, c)] = w_tilde[(r, c)] / diff;
            }
        }
    }
    let x_tilde = (&x_tilde - x_tilde.adjoint()).scale(0.5);
    let x = q * x_tilde * q.adjoint();
    let residual = (realized(v, &x) - velocity).norm();
    if residual > 1e-8 {
        return Err(Error::TangentRealizationFailure { residual, tol: 1e-8 });
    }
    Ok(x)
}

/// Residual |ω_{β(p)}(dβ·X♯, dβ·Y♯) + ω_p(X♯, Y♯)|.
pub fn check_beta_antisymplectic(
    p: &ProductPoint,
    xs: &[CMat],
    ys: &[CMat],
) -> Result<f64> {
    let (q, xs_img) = beta_pushforward(p, xs)?;
    let (_, ys_img) = beta_pushforward(p, ys)?;
    let pushed = fusion_form_general(&q, &xs_img, &ys_img)?;
    let original = fusion_form_general(p, xs, ys)?;
    Ok((pushed + original).abs())
}

/// One verification batch of the formcheck suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub degenerate_count: usize,
}

/// Formcheck configuration: dimensions, sample count, seed, FD step.
#[derive(Debug, Clone, Copy)]
pub struct FormcheckConfig {
    pub n: usize,
    pub l: usize,
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
}

impl Default for FormcheckConfig {
    fn default() -> Self {
        FormcheckConfig { n: 2, l: 3, samples: 50, seed: 1, h: 1e-5 }
    }
}

/// Full formcheck report.
#[derive(Debug, Clone, PartialEq)]
pub struct FormcheckReport {
    pub n: usize,
    pub l: usize,
    pub samples: usize,
    pub seed: u64,
    pub h: f64,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

fn random_point(n: usize, l: usize, rng: &mut impl rand::Rng) -> ProductPoint {

    let points = (0..l)
        .map(|_| {
            let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..crate::numcore::TAU)).collect();
            let class = ConjugacyClass::new(n, angles).expect("finite angles");
            let frame = haar_unitary_with(n, rng);
            let u = class.realize(&frame);
            ClassPoint { u, class }
        })
        .collect();
    ProductPoint { points }
}

fn random_rep_list(n: usize, l: usize, rng: &mut impl rand::Rng) -> Vec<CMat> {
    (0..l)
        .map(|_| crate::numcore::random_anti_hermitian(n, rng))
        .collect()
}

/// Runs every axiom check on `samples` independent random points and
/// tangent data; sample k uses the RNG stream (seed, k), so the report
/// does not depend on scheduling.
pub fn run_formcheck(cfg: &FormcheckConfig) -> Result<FormcheckReport> {
    use rand::SeedableRng;
    let per_sample = |k: usize| -> Result<SampleResiduals> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let p = random_point(cfg.n, cfg.l, &mut rng);
        let xs = random_rep_list(cfg.n, cfg.l, &mut rng);
        let ys = random_rep_list(cfg.n, cfg.l, &mut rng);
        let x = crate::numcore::random_anti_hermitian(cfg.n, &mut rng);
        let y = crate::numcore::random_anti_hermitian(cfg.n, &mut rng);
        let z = crate::numcore::random_anti_hermitian(cfg.n, &mut rng);

        let degenerate = p
            .points
            .iter()
            .zip(&xs)
            .all(|(q, xj)| realized(&q.u, xj).norm() < 1e-10);

        let antisym = {
            let a = fusion_form_general(&p, &xs, &ys)?;
            let b = fusion_form_general(&p, &ys, &xs)?;
            (a + b).abs()
        };
        let moment = check_moment_condition(&p, &x)?;
        let (kdim, pdim) = check_kernel_condition(&p)?;
        let kernel = (kdim as f64 - pdim as f64).abs();
        let h = cfg.h.clamp(1e-6, 1e-4);
        let domega = check_d_omega(&p, &x, &y, &z, h)?;
        let anti = check_beta_antisymplectic(&p, &xs, &ys)?;
        let assoc = if cfg.l == 3 {
            (fusion_form_l3(&p, &xs, &ys)? - fusion_form_general(&p, &xs, &ys)?).abs()
        } else {
            0.0
        };
        Ok(SampleResiduals { antisym, moment, kernel, domega, anti, assoc, degenerate })
    };

    let results: Result<Vec<SampleResiduals>> =
        (0..cfg.samples).into_par_iter().map(per_sample).collect();
    let results = results?;

    let collect = |name: &str, tolerance: f64, pick: fn(&SampleResiduals) -> f64| -> CheckReport {
        let mut max_residual = 0.0_f64;
        let mut degenerate_count = 0usize;
        for r in &results {
            if r.degenerate {
                degenerate_count += 1;
                continue;
            }
            max_residual = max_residual.max(pick(r));
        }
        CheckReport {
            name: name.to_string(),
            samples: cfg.samples,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            degenerate_count,
        }
    };

    let checks = vec![
        collect("antisymmetry", 1e-12, |r| r.antisym),
        collect("moment_condition", 1e-9, |r| r.moment),
        collect("kernel_condition", 0.5, |r| r.kernel),
        collect("d_omega", 1e-5, |r| r.domega),
        collect("beta_antisymplectic", 1e-8, |r| r.anti),
        collect("fusion_associativity", 1e-12, |r| r.assoc),
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(FormcheckReport {
        n: cfg.n,
        l: cfg.l,
        samples: cfg.samples,
        seed: cfg.seed,
        h: cfg.h,
        checks,
        pass,
    })
}

struct SampleResiduals {
    antisym: f64,
    moment: f64,
    kernel: f64,
    domega: f64,
    anti: f64,
    assoc: f64,
    degenerate: bool,
}
