//! Constructive search for closed tuples in prescribed conjugacy classes
//! and for β-fixed closed tuples built from Lagrangian chains, via
//! multi-start Riemannian gradient descent.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{SolverConfig, Tolerances};
use crate::error::{Error, Result};
use crate::lagrange::LagrangianSubspace;
use crate::numcore::{circular_distance, expm_antihermitian, haar_unitary_with, CMat};
use crate::reps::{self, ConjugacyClass, LagrangianWitness, RepTuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Search over eigenvector frames: u_j = V_j diag(e^{iλ_j}) V_j*.
    /// Class membership is exact; the objective drives the product to 1.
    Unitary,
    /// Search over symmetric unitary labels w_j = q_j q_jᵗ with w₁ ≡ 1
    /// and u_j = w_j w̄_{j+1}. Closure is exact by telescoping; the
    /// objective drives each u_j into its class via power-trace moments.
    Lagrangian,
}

/// Deviation of Σ_j Σ_m λ_{j,m} from 0 mod 2π beyond which no closed
/// tuple can exist (the determinant of the product is e^{iΣλ}).
pub const DETERMINANT_OBSTRUCTION_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SolveProblem {
    pub n: usize,
    pub l: usize,
    pub classes: Vec<ConjugacyClass>,
    pub mode: SolveMode,
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl SolveProblem {
    /// Budget defaults come from `SolverConfig::default()`.
    pub fn new(classes: Vec<ConjugacyClass>, mode: SolveMode, seed: u64) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Malformed("a problem needs l ≥ 1 classes".into()));
        }
        let n = classes[0].n;
        if n == 0 {
            return Err(Error::Malformed("class dimension must be positive".into()));
        }
        for c in &classes {
            if c.n != n {
                return Err(Error::DimensionMismatch { left: n, right: c.n });
            }
        }
        let cfg = SolverConfig::default();
        Ok(SolveProblem {
            n,
            l: classes.len(),
            classes,
            mode,
            restarts: cfg.restarts,
            max_iter: cfg.max_iter,
            seed,
        })
    }

    /// Deviation of the total angle sum from 0 mod 2π.
    pub fn determinant_defect(&self) -> f64 {
        let total: f64 = self.classes.iter().flat_map(|c| c.angles.iter()).sum();
        circular_distance(total, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Found,
    NotFound,
    InfeasibleDeterminant,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub rep: Option<RepTuple>,
    pub witness: Option<LagrangianWitness>,
    pub product_residual: Option<f64>,
    pub class_residuals: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub iterations: usize,
    pub restarts_used: usize,
}

/// Optimization state: one unitary frame per factor. Unitary mode reads
/// them as eigenvector frames V_j; lagrangian mode as the q_j in
/// w_j = q_j q_jᵗ, with frames[0] pinned to the identity.
#[derive(Clone, Debug)]
pub struct SolverState {
    pub frames: Vec<CMat>,
}

fn diag_from_angles(class: &ConjugacyClass) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        class.n,
        class.angles.iter().map(|&a| Complex::new(0.0, a).exp()),
    ))
}

/// Power-trace targets t_k = Σ_m e^{ikλ_m}, k = 1..n.
fn moment_targets(class: &ConjugacyClass) -> Vec<Complex<f64>> {
    (1..=class.n)
        .map(|k| {
            class
                .angles
                .iter()
                .map(|&a| Complex::new(0.0, k as f64 * a).exp())
                .sum()
        })
        .collect()
}

fn state_unitaries(problem: &SolveProblem, state: &SolverState) -> Vec<CMat> {
    match problem.mode {
        SolveMode::Unitary => (0..problem.l)
            .map(|j| {
                let v = &state.frames[j];
                v * diag_from_angles(&problem.classes[j]) * v.adjoint()
            })
            .collect(),
        SolveMode::Lagrangian => {
            let ws: Vec<CMat> = state.frames.iter().map(|q| q * q.transpose()).collect();
            (0..problem.l)
                .map(|j| &ws[j] * ws[(j + 1) % problem.l].map(|c| c.conj()))
                .collect()
        }
    }
}

fn objective_value(problem: &SolveProblem, state: &SolverState) -> f64 {
    let us = state_unitaries(problem, state);
    match problem.mode {
        SolveMode::Unitary => {
            let n = problem.n;
            let mut p = CMat::identity(n, n);
            for u in &us {
                p = &p * u;
            }
            (p - CMat::identity(n, n)).norm_squared()
        }
        SolveMode::Lagrangian => {
            let mut f = 0.0;
            for (j, u) in us.iter().enumerate() {
                let targets = moment_targets(&problem.classes[j]);
                let mut pow = u.clone();
                for t in &targets {
                    f += (pow.trace() - t).norm_sqr();
                    pow = &pow * u;
                }
            }
            f
        }
    }
}

/// Objective together with the Riemannian gradient per frame, for the
/// metric ⟨A,B⟩ = Re tr(AB*) on anti-Hermitian perturbations
/// frame_j ← e^{tZ_j} frame_j. In lagrangian mode the first slot is
/// pinned and its gradient is zero.
pub fn objective_and_gradient(
    problem: &SolveProblem,
    state: &SolverState,
) -> Result<(f64, Vec<CMat>)> {
    let n = problem.n;
    let l = problem.l;
    if state.frames.len() != l {
        return Err(Error::DimensionMismatch { left: l, right: state.frames.len() });
    }
    for fr in &state.frames {
        if fr.nrows() != n || fr.ncols() != n {
            return Err(Error::DimensionMismatch { left: n, right: fr.nrows() });
        }
    }
    let us = state_unitaries(problem, state);
    match problem.mode {
        SolveMode::Unitary => {
            let mut p = CMat::identity(n, n);
            for u in &us {
                p = &p * u;
            }
            let f = (&p - CMat::identity(n, n)).norm_squared();
            let e = (&p - CMat::identity(n, n)).adjoint();
            let mut prefixes = vec![CMat::identity(n, n); l + 1];
            for j in 0..l {
                prefixes[j + 1] = &prefixes[j] * &us[j];
            }
            let mut suffixes = vec![CMat::identity(n, n); l + 1];
            for j in (0..l).rev() {
                suffixes[j] = &us[j] * &suffixes[j + 1];
            }
            let grads = (0..l)
                .map(|j| {
                    let k = &suffixes[j + 1] * &e * &prefixes[j];
                    let m = &us[j] * &k - &k * &us[j];
                    m.adjoint() - m
                })
                .collect();
            Ok((f, grads))
        }
        SolveMode::Lagrangian => {
            let ws: Vec<CMat> = state.frames.iter().map(|q| q * q.transpose()).collect();
            let mut f = 0.0;
            // P_j = Σ_k k · conj(tr(u_jᵏ) − t_{j,k}) · u_j^{k−1}
            let mut polys = Vec::with_capacity(l);
            for (j, u) in us.iter().enumerate() {
                let targets = moment_targets(&problem.classes[j]);
                let mut poly = CMat::zeros(n, n);
                let mut pow_prev = CMat::identity(n, n);
                for (k, t) in targets.iter().enumerate() {
                    let pow = &pow_prev * u;
                    let c = pow.trace() - t;
                    f += c.norm_sqr();
                    poly += pow_prev.scale((k + 1) as f64) * c.conj();
                    pow_prev = pow;
                }
                polys.push(poly);
            }
            let grads = (0..l)
                .map(|m| {
                    if m == 0 {
                        return CMat::zeros(n, n);
                    }
                    let prev = (m + l - 1) % l;
                    let next = (m + 1) % l;
                    let a = &us[m] * &polys[m]
                        + &ws[m] * polys[m].transpose() * ws[next].adjoint()
                        - &ws[prev] * polys[prev].transpose() * ws[m].adjoint()
                        - &polys[prev] * &us[prev];
                    a.adjoint() - a
                })
                .collect();
            Ok((f, grads))
        }
    }
}

fn retract(state: &SolverState, grads: &[CMat], t: f64) -> SolverState {
    let frames = state
        .frames
        .iter()
        .zip(grads)
        .map(|(fr, g)| {
            if g.norm_squared() == 0.0 {
                fr.clone()
            } else {
                expm_antihermitian(&g.scale(-t)) * fr
            }
        })
        .collect();
    SolverState { frames }
}

struct RestartOutcome {
    index: usize,
    state: SolverState,
    objective: f64,
    iterations: usize,
    score: f64,
    product_residual: f64,
    class_residuals: Vec<f64>,
}

fn measure(
    problem: &SolveProblem,
    state: &SolverState,
    cfg: &SolverConfig,
    tol: &Tolerances,
) -> (f64, f64, Vec<f64>) {
    let us = state_unitaries(problem, state);
    let rep = RepTuple { matrices: us, classes: None };
    let product_residual = rep.product_residual();
    let class_residuals: Vec<f64> = (0..problem.l)
        .map(|j| {
            reps::membership_distance(&problem.classes[j], &rep.matrices[j], tol)
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let worst_class = class_residuals.iter().cloned().fold(0.0_f64, f64::max);
    let mut score = (product_residual / cfg.tol_product).max(worst_class / cfg.tol_class);
    if !score.is_finite() {
        score = f64::INFINITY;
    }
    (score, product_residual, class_residuals)
}

fn run_restart(
    problem: &SolveProblem,
    cfg: &SolverConfig,
    tol: &Tolerances,
    index: usize,
) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    rng.set_stream(index as u64);
    let frames: Vec<CMat> = (0..problem.l)
        .map(|j| {
            if problem.mode == SolveMode::Lagrangian && j == 0 {
                CMat::identity(problem.n, problem.n)
            } else {
                haar_unitary_with(problem.n, &mut rng)
            }
        })
        .collect();
    let mut state = SolverState { frames };
    let (mut f, mut grads) = objective_and_gradient(problem, &state).expect("validated problem");
    let mut step = 1.0_f64;
    let mut iterations = 0;
    for iter in 0..problem.max_iter {
        iterations = iter;
        let converged = match problem.mode {
            SolveMode::Unitary => f.sqrt() <= cfg.tol_product,
            SolveMode::Lagrangian => {
                (f <= 1e-7 || iter % 25 == 0) && {
                    let (score, _, _) = measure(problem, &state, cfg, tol);
                    score <= 1.0
                }
            }
        };
        if converged {
            break;
        }
        let gnorm2: f64 = grads.iter().map(|g| g.norm_squared()).sum();
        if gnorm2 < 1e-28 {
            break;
        }
        let mut t = step;
        let mut accepted = None;
        while t > 1e-18 {
            let cand = retract(&state, &grads, t);
            let fc = objective_value(problem, &cand);
            if fc <= f - 1e-4 * t * gnorm2 {
                accepted = Some((cand, fc));
                break;
            }
            t /= 2.0;
        }
        let Some((cand, fc)) = accepted else { break };
        state = cand;
        f = fc;
        grads = objective_and_gradient(problem, &state).expect("validated problem").1;
        step = (t * 2.0).min(100.0);
    }
    let (score, product_residual, class_residuals) = measure(problem, &state, cfg, tol);
    RestartOutcome {
        index,
        state,
        objective: f,
        iterations,
        score,
        product_residual,
        class_residuals,
    }
}

fn found_result(
    problem: &SolveProblem,
    outcome: RestartOutcome,
    restarts_used: usize,
    tol: &Tolerances,
) -> Result<SolveResult> {
    let us = state_unitaries(problem, &outcome.state);
    let found = outcome.score <= 1.0;
    let (rep, witness) = if found {
        let rep = RepTuple::new(us, tol)?.with_classes(problem.classes.clone())?;
        let witness = match problem.mode {
            SolveMode::Unitary => None,
            SolveMode::Lagrangian => {
                let subspaces: Result<Vec<LagrangianSubspace>> = outcome
                    .state
                    .frames
                    .iter()
                    .map(|q| LagrangianSubspace::from_w(q * q.transpose(), tol))
                    .collect();
                Some(LagrangianWitness { subspaces: subspaces? })
            }
        };
        (Some(rep), witness)
    } else {
        (None, None)
    };
    Ok(SolveResult {
        status: if found { SolveStatus::Found } else { SolveStatus::NotFound },
        rep,
        witness,
        product_residual: Some(outcome.product_residual),
        class_residuals: Some(outcome.class_residuals),
        objective: Some(outcome.objective),
        iterations: outcome.iterations,
        restarts_used,
    })
}

/// A class whose angles are all equal contains exactly one matrix, e^{iλ}1.
fn is_scalar_class(class: &ConjugacyClass) -> bool {
    class
        .angles
        .iter()
        .all(|&a| circular_distance(a, class.angles[0]) <= 1e-12)
}

/// Closed-form solution when every class is scalar (always the case at
/// n = 1): the factors are forced, so only angle bookkeeping remains.
fn solve_all_scalar(
    problem: &SolveProblem,
    cfg: &SolverConfig,
    tol: &Tolerances,
) -> Result<SolveResult> {
    let n = problem.n;
    let l = problem.l;
    let eye = CMat::identity(n, n);
    let angles: Vec<f64> = problem.classes.iter().map(|c| c.angles[0]).collect();
    match problem.mode {
        SolveMode::Unitary => {
            // u_j = e^{iλ_j}·1 except the last, which closes the product
            let mut us = Vec::with_capacity(l);
            let mut partial = Complex::new(1.0, 0.0);
            for (j, &a) in angles.iter().enumerate() {
                let u = if j + 1 == l {
                    partial.conj()
                } else {
                    Complex::new(0.0, a).exp()
                };
                partial *= u;
                us.push(&eye * u);
            }
            finish_scalar(problem, us, None, cfg, tol)
        }
        SolveMode::Lagrangian => {
            // lines at cumulative angles: φ₁ = 0, φ_{j+1} = φ_j − λ_j/2
            let mut phis = vec![0.0_f64; l];
            for j in 0..l.saturating_sub(1) {
                phis[j + 1] = phis[j] - angles[j] / 2.0;
            }
            let ws: Vec<CMat> = phis
                .iter()
                .map(|&p| &eye * Complex::new(0.0, 2.0 * p).exp())
                .collect();
            let us: Vec<CMat> = (0..l)
                .map(|j| &ws[j] * ws[(j + 1) % l][(0, 0)].conj())
                .collect();
            let subspaces: Result<Vec<LagrangianSubspace>> = ws
                .into_iter()
                .map(|w| LagrangianSubspace::from_w(w, tol))
                .collect();
            finish_scalar(problem, us, Some(LagrangianWitness { subspaces: subspaces? }), cfg, tol)
        }
    }
}

fn finish_scalar(
    problem: &SolveProblem,
    us: Vec<CMat>,
    witness: Option<LagrangianWitness>,
    cfg: &SolverConfig,
    tol: &Tolerances,
) -> Result<SolveResult> {
    let rep = RepTuple::new(us, tol)?.with_classes(problem.classes.clone())?;
    let product_residual = rep.product_residual();
    let class_residuals: Vec<f64> = (0..problem.l)
        .map(|j| {
            reps::membership_distance(&problem.classes[j], &rep.matrices[j], tol)
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let worst = class_residuals.iter().cloned().fold(0.0_f64, f64::max);
    let found = product_residual <= cfg.tol_product && worst <= cfg.tol_class;
    Ok(SolveResult {
        status: if found { SolveStatus::Found } else { SolveStatus::NotFound },
        rep: if found { Some(rep) } else { None },
        witness: if found { witness } else { None },
        product_residual: Some(product_residual),
        class_residuals: Some(class_residuals),
        objective: Some(0.0),
        iterations: 0,
        restarts_used: 0,
    })
}

/// Multi-start search. Deterministic for a fixed problem (including its
/// seed and budget): restarts run in parallel on private RNG streams and
/// the winner is the lowest score, ties broken by lowest restart index.
pub fn solve(problem: &SolveProblem, cfg: &SolverConfig, tol: &Tolerances) -> Result<SolveResult> {
    if problem.determinant_defect() > DETERMINANT_OBSTRUCTION_TOL {
        return Ok(SolveResult {
            status: SolveStatus::InfeasibleDeterminant,
            rep: None,
            witness: None,
            product_residual: None,
            class_residuals: None,
            objective: None,
            iterations: 0,
            restarts_used: 0,
        });
    }
    if problem.classes.iter().all(is_scalar_class) {
        return solve_all_scalar(problem, cfg, tol);
    }
    if problem.restarts == 0 {
        return Ok(SolveResult {
            status: SolveStatus::NotFound,
            rep: None,
            witness: None,
            product_residual: None,
            class_residuals: None,
            objective: None,
            iterations: 0,
            restarts_used: 0,
        });
    }
    let outcomes: Vec<RestartOutcome> = (0..problem.restarts)
        .into_par_iter()
        .map(|idx| run_restart(problem, cfg, tol, idx))
        .collect();
    let restarts_used = outcomes.len();
    let best = outcomes
        .into_iter()
        .min_by(|a, b| {
            (a.score, a.index)
                .partial_cmp(&(b.score, b.index))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("at least one restart");
    found_result(problem, best, restarts_used, tol)
}

/// Re-verification on a code path disjoint from the search: unitarity,
/// product residual, class membership, and in lagrangian mode the
/// witness chain (w₁ = 1, σ_jσ_{j+1} = u_j, β-fixedness).
pub fn verify_solution(
    problem: &SolveProblem,
    result: &SolveResult,
    cfg: &SolverConfig,
    tol: &Tolerances,
) -> Result<bool> {
    if result.status != SolveStatus::Found {
        return Ok(true);
    }
    let Some(rep) = &result.rep else { return Ok(false) };
    let rep = RepTuple::new(rep.matrices.clone(), tol)?;
    if rep.product_residual() > cfg.tol_product {
        return Ok(false);
    }
    for (j, class) in problem.classes.iter().enumerate() {
        if reps::membership_distance(class, &rep.matrices[j], tol)? > cfg.tol_class {
            return Ok(false);
        }
    }
    if problem.mode == SolveMode::Lagrangian {
        let Some(witness) = &result.witness else { return Ok(false) };
        let n = problem.n;
        if (witness.subspaces[0].w() - CMat::identity(n, n)).norm() > tol.fix {
            return Ok(false);
        }
        let rebuilt = reps::rep_from_lagrangians(witness)?;
        let agree = rep
            .matrices
            .iter()
            .zip(&rebuilt.matrices)
            .all(|(a, b)| (a - b).norm() <= tol.fix);
        if !agree {
            return Ok(false);
        }
        let (ok, _) = reps::is_sigma0_lagrangian(&rep, tol)?;
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classes of a random closed tuple, plus the tuple that realizes them.
pub fn planted_unitary_problem(
    n: usize,
    l: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(SolveProblem, RepTuple)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices: Vec<CMat> = (0..l.saturating_sub(1))
        .map(|_| haar_unitary_with(n, &mut rng))
        .collect();
    let mut p = CMat::identity(n, n);
    for u in &matrices {
        p = &p * u;
    }
    matrices.push(p.adjoint());
    let classes: Result<Vec<ConjugacyClass>> =
        matrices.iter().map(|u| reps::class_of(u, tol)).collect();
    let problem = SolveProblem::new(classes?, SolveMode::Unitary, seed)?;
    Ok((problem, RepTuple { matrices, classes: None }))
}

/// Classes of a random σ₀-Lagrangian tuple (u_j = w_j w̄_{j+1} with
/// random symmetric unitary labels, w₁ = 1), plus tuple and witness.
pub fn planted_lagrangian_problem(
    n: usize,
    l: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(SolveProblem, RepTuple, LagrangianWitness)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ws: Vec<CMat> = (0..l)
        .map(|j| {
            if j == 0 {
                CMat::identity(n, n)
            } else {
                let q = haar_unitary_with(n, &mut rng);
                &q * q.transpose()
            }
        })
        .collect();
    let matrices: Vec<CMat> = (0..l)
        .map(|j| &ws[j] * ws[(j + 1) % l].map(|c| c.conj()))
        .collect();
    let classes: Result<Vec<ConjugacyClass>> =
        matrices.iter().map(|u| reps::class_of(u, tol)).collect();
    let subspaces: Result<Vec<LagrangianSubspace>> = ws
        .into_iter()
        .map(|w| LagrangianSubspace::from_w(w, tol))
        .collect();
    let problem = SolveProblem::new(classes?, SolveMode::Lagrangian, seed)?;
    Ok((problem, RepTuple { matrices, classes: None }, LagrangianWitness { subspaces: subspaces? }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{random_anti_hermitian, TAU};
    use rand::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    fn trivial_classes(n: usize, l: usize) -> Vec<ConjugacyClass> {
        (0..l)
            .map(|_| ConjugacyClass::new(n, vec![0.0; n]).unwrap())
            .collect()
    }

    #[test]
    fn determinant_obstruction_is_checked_up_front() {
        let classes = vec![
            ConjugacyClass::new(2, vec![0.3, 0.4]).unwrap(),
            ConjugacyClass::new(2, vec![0.5, 0.6]).unwrap(),
        ];
        let problem = SolveProblem::new(classes, SolveMode::Unitary, 7).unwrap();
        assert!(problem.determinant_defect() > 1.0);
        let result = solve(&problem, &cfg(), &tol()).unwrap();
        assert_eq!(result.status, SolveStatus::InfeasibleDeterminant);
        assert_eq!(result.restarts_used, 0);
        assert!(result.rep.is_none());
    }

    #[test]
    fn trivial_classes_solve_immediately() {
        for mode in [SolveMode::Unitary, SolveMode::Lagrangian] {
            let problem = SolveProblem::new(trivial_classes(2, 3), mode, 1).unwrap();
            let result = solve(&problem, &cfg(), &tol()).unwrap();
            assert_eq!(result.status, SolveStatus::Found);
            let rep = result.rep.as_ref().unwrap();
            for u in &rep.matrices {
                assert!((u - CMat::identity(2, 2)).norm() < 1e-9);
            }
            assert!(verify_solution(&problem, &result, &cfg(), &tol()).unwrap());
        }
    }

    #[test]
    fn scalar_problems_have_closed_forms() {
        let third = TAU / 3.0;
        let classes: Vec<ConjugacyClass> = (0..3)
            .map(|_| ConjugacyClass::new(1, vec![third]).unwrap())
            .collect();
        for mode in [SolveMode::Unitary, SolveMode::Lagrangian] {
            let problem = SolveProblem::new(classes.clone(), mode, 3).unwrap();
            let result = solve(&problem, &cfg(), &tol()).unwrap();
            assert_eq!(result.status, SolveStatus::Found);
            assert_eq!(result.iterations, 0);
            assert!(result.product_residual.unwrap() < 1e-12);
            assert!(verify_solution(&problem, &result, &cfg(), &tol()).unwrap());
        }
        // lagrangian witness starts at the identity label
        let problem = SolveProblem::new(classes, SolveMode::Lagrangian, 3).unwrap();
        let result = solve(&problem, &cfg(), &tol()).unwrap();
        let witness = result.witness.unwrap();
        assert!((witness.subspaces[0].w() - CMat::identity(1, 1)).norm() < 1e-14);
        let rebuilt = reps::rep_from_lagrangians(&witness).unwrap();
        let rep = result.rep.unwrap();
        for (a, b) in rep.matrices.iter().zip(&rebuilt.matrices) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_infeasible_angle_sum_is_rejected() {
        let classes = vec![
            ConjugacyClass::new(1, vec![0.3]).unwrap(),
            ConjugacyClass::new(1, vec![0.4]).unwrap(),
        ];
        let problem = SolveProblem::new(classes, SolveMode::Unitary, 0).unwrap();
        let result = solve(&problem, &cfg(), &tol()).unwrap();
        assert_eq!(result.status, SolveStatus::InfeasibleDeterminant);
    }

    fn random_state(problem: &SolveProblem, rng: &mut ChaCha8Rng) -> SolverState {
        let frames = (0..problem.l)
            .map(|j| {
                if problem.mode == SolveMode::Lagrangian && j == 0 {
                    CMat::identity(problem.n, problem.n)
                } else {
                    haar_unitary_with(problem.n, rng)
                }
            })
            .collect();
        SolverState { frames }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..50 {
            let mode = if trial % 2 == 0 { SolveMode::Unitary } else { SolveMode::Lagrangian };
            let n = 2 + trial % 2;
            let l = 2 + trial % 3;
            let classes: Vec<ConjugacyClass> = (0..l)
                .map(|_| {
                    let angles = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
                    ConjugacyClass::new(n, angles).unwrap()
                })
                .collect();
            let problem = SolveProblem::new(classes, mode, 0).unwrap();
            let state = random_state(&problem, &mut rng);
            let (f0, grads) = objective_and_gradient(&problem, &state).unwrap();
            assert!(f0 >= 0.0);
            let start = if mode == SolveMode::Lagrangian { 1 } else { 0 };
            for slot in start..l {
                let z = random_anti_hermitian(n, &mut rng);
                let h = 1e-6;
                let perturb = |t: f64| {
                    let mut frames = state.frames.clone();
                    frames[slot] = expm_antihermitian(&z.scale(t)) * &frames[slot];
                    objective_value(&problem, &SolverState { frames })
                };
                let fd = (perturb(h) - perturb(-h)) / (2.0 * h);
                // ⟨G, Z⟩ = Re tr(G Z*)
                let pairing = (&grads[slot] * z.adjoint()).trace().re;
                let scale = fd.abs().max(pairing.abs()).max(1.0);
                assert!(
                    (fd - pairing).abs() / scale < 1e-5,
                    "slot {slot} fd {fd} pairing {pairing}"
                );
            }
        }
    }

    #[test]
    fn planted_solutions_are_global_minima() {
        let t = tol();
        let (problem, rep) = planted_unitary_problem(3, 3, 5, &t).unwrap();
        // frames that realize the planted tuple: eigenvector frames
        let frames: Vec<CMat> = rep
            .matrices
            .iter()
            .zip(&problem.classes)
            .map(|(u, _)| {
                let eig = crate::numcore::eig_unitary(u, &t).unwrap();
                eig.frame
            })
            .collect();
        let state = SolverState { frames };
        let (f, grads) = objective_and_gradient(&problem, &state).unwrap();
        assert!(f < 1e-16, "objective {f}");
        let gnorm: f64 = grads.iter().map(|g| g.norm_squared()).sum::<f64>().sqrt();
        assert!(gnorm < 1e-8, "gradient norm {gnorm}");
    }

    #[test]
    fn single_factor_nontrivial_class_has_positive_objective() {
        let classes = vec![ConjugacyClass::new(2, vec![1.0, TAU - 1.0]).unwrap()];
        let problem = SolveProblem::new(classes, SolveMode::Unitary, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let state = random_state(&problem, &mut rng);
            let f = objective_value(&problem, &state);
            assert!(f > 1e-2, "objective {f} should be bounded away from 0");
        }
    }

    #[test]
    fn lagrangian_states_are_closed_by_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for &(n, l) in &[(2usize, 3usize), (3, 4), (4, 2)] {
            let classes: Vec<ConjugacyClass> = (0..l)
                .map(|_| {
                    let angles = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
                    ConjugacyClass::new(n, angles).unwrap()
                })
                .collect();
            let problem = SolveProblem::new(classes, SolveMode::Lagrangian, 0).unwrap();
            let state = random_state(&problem, &mut rng);
            let us = state_unitaries(&problem, &state);
            let rep = RepTuple { matrices: us, classes: None };
            assert!(rep.product_residual() <= (n * l) as f64 * 1e-14);
        }
    }

    #[test]
    fn unitary_plant_and_recover() {
        let t = tol();
        for seed in [100, 101, 102] {
            let (problem, _) = planted_unitary_problem(2, 3, seed, &t).unwrap();
            let result = solve(&problem, &cfg(), &t).unwrap();
            assert_eq!(result.status, SolveStatus::Found, "seed {seed}");
            assert!(result.product_residual.unwrap() <= 1e-8);
            assert!(result
                .class_residuals
                .as_ref()
                .unwrap()
                .iter()
                .all(|&r| r <= 1e-6));
            assert!(verify_solution(&problem, &result, &cfg(), &t).unwrap());
        }
        let (problem, _) = planted_unitary_problem(3, 3, 200, &t).unwrap();
        let result = solve(&problem, &cfg(), &t).unwrap();
        assert_eq!(result.status, SolveStatus::Found);
        assert!(verify_solution(&problem, &result, &cfg(), &t).unwrap());
    }

    #[test]
    fn lagrangian_plant_and_recover() {
        let t = tol();
        for seed in [300, 301] {
            let (problem, _, _) = planted_lagrangian_problem(2, 3, seed, &t).unwrap();
            let result = solve(&problem, &cfg(), &t).unwrap();
            assert_eq!(result.status, SolveStatus::Found, "seed {seed}");
            let rep = result.rep.as_ref().unwrap();
            let (ok, _) = reps::is_sigma0_lagrangian(rep, &t).unwrap();
            assert!(ok, "recovered tuple must be σ₀-lagrangian");
            assert!(verify_solution(&problem, &result, &cfg(), &t).unwrap());
        }
    }

    #[test]
    fn identical_seeds_give_identical_results() {
        let t = tol();
        let (problem, _) = planted_unitary_problem(2, 3, 77, &t).unwrap();
        let a = solve(&problem, &cfg(), &t).unwrap();
        let b = solve(&problem, &cfg(), &t).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.objective, b.objective);
        let (ra, rb) = (a.rep.unwrap(), b.rep.unwrap());
        for (x, y) in ra.matrices.iter().zip(&rb.matrices) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn verifier_rejects_tampered_results() {
        let t = tol();
        let (problem, _) = planted_unitary_problem(2, 3, 55, &t).unwrap();
        let mut result = solve(&problem, &cfg(), &t).unwrap();
        assert_eq!(result.status, SolveStatus::Found);
        let rep = result.rep.as_mut().unwrap();
        // break the product by replacing one factor with a fresh unitary
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        rep.matrices[0] = haar_unitary_with(2, &mut rng);
        assert!(!verify_solution(&problem, &result, &cfg(), &t).unwrap());
    }

    #[test]
    fn unsolvable_but_determinant_feasible_reports_not_found() {
        // a single factor must equal the identity to close, but the class
        // excludes it; the angle sum still passes the determinant test
        let classes = vec![ConjugacyClass::new(2, vec![1.0, TAU - 1.0]).unwrap()];
        for mode in [SolveMode::Unitary, SolveMode::Lagrangian] {
            let problem = SolveProblem::new(classes.clone(), mode, 4).unwrap();
            assert!(problem.determinant_defect() < 1e-12);
            let result = solve(&problem, &cfg(), &tol()).unwrap();
            assert_eq!(result.status, SolveStatus::NotFound);
            assert!(result.rep.is_none());
        }
    }

    #[test]
    fn zero_restarts_report_not_found() {
        let t = tol();
        let (mut problem, _) = planted_unitary_problem(2, 3, 60, &t).unwrap();
        problem.restarts = 0;
        let result = solve(&problem, &cfg(), &t).unwrap();
        assert_eq!(result.status, SolveStatus::NotFound);
        assert_eq!(result.restarts_used, 0);
    }
}
