//! Sample builders shared by the integration suites.
#![allow(dead_code)]

use lagrep_core::lagrange::{lagrangian_from_frame, LagrangianSubspace};
use lagrep_core::numcore::{haar_unitary_with, random_anti_hermitian, CMat};
use lagrep_core::qham::ProductPoint;
use lagrep_core::reps::{rep_from_lagrangians, LagrangianWitness, RepTuple};
use lagrep_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closed tuple: l − 1 Haar factors and the closing inverse.
pub fn random_closed_with(n: usize, l: usize, rng: &mut ChaCha8Rng) -> RepTuple {
    let mut matrices: Vec<CMat> = (0..l - 1).map(|_| haar_unitary_with(n, rng)).collect();
    let prefix = matrices.iter().fold(CMat::identity(n, n), |acc, m| acc * m);
    matrices.push(prefix.adjoint());
    RepTuple { matrices, classes: None }
}

pub fn random_closed(n: usize, l: usize, seed: u64) -> RepTuple {
    random_closed_with(n, l, &mut rng(seed))
}

/// Witness with L₁ = L₀ and the σ₀-Lagrangian tuple it generates.
pub fn random_sigma0_pair(n: usize, l: usize, seed: u64) -> (LagrangianWitness, RepTuple) {
    let mut rng = rng(seed);
    let mut subspaces = vec![LagrangianSubspace::horizontal(n)];
    for _ in 1..l {
        let u = haar_unitary_with(n, &mut rng);
        subspaces.push(lagrangian_from_frame(&u, &tol()).unwrap());
    }
    let witness = LagrangianWitness { subspaces };
    let rep = rep_from_lagrangians(&witness).unwrap();
    (witness, rep)
}

/// Symmetric unitary u uᵗ of a Haar sample.
pub fn random_symmetric_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let u = haar_unitary_with(n, rng);
    &u * u.transpose()
}

pub fn random_point(n: usize, l: usize, rng: &mut ChaCha8Rng) -> ProductPoint {
    let ms: Vec<CMat> = (0..l).map(|_| haar_unitary_with(n, rng)).collect();
    ProductPoint::from_unitaries(&ms, &tol()).unwrap()
}

pub fn random_tangents(n: usize, l: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
    (0..l).map(|_| random_anti_hermitian(n, rng)).collect()
}
