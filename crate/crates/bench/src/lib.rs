//! Seeded input builders shared by the benchmark targets.

use lagrep_core::numcore::{haar_unitary, random_anti_hermitian, CMat};
use lagrep_core::qham::ProductPoint;
use lagrep_core::reps::RepTuple;
use lagrep_core::Tolerances;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

/// Closed tuple: l − 1 Haar factors and the adjoint of their product.
pub fn closed_tuple(n: usize, l: usize, seed: u64) -> RepTuple {
    let mut matrices: Vec<CMat> = (0..l - 1)
        .map(|j| haar_unitary(n, seed.wrapping_add(j as u64)))
        .collect();
    let prod = matrices
        .iter()
        .fold(CMat::identity(n, n), |acc, m| acc * m);
    matrices.push(prod.adjoint());
    RepTuple { matrices, classes: None }
}

pub fn product_point(n: usize, l: usize, seed: u64) -> ProductPoint {
    let us: Vec<CMat> = (0..l)
        .map(|j| haar_unitary(n, seed.wrapping_add(j as u64)))
        .collect();
    ProductPoint::from_unitaries(&us, &Tolerances::default()).expect("haar factors")
}

pub fn tangents(n: usize, l: usize, seed: u64) -> Vec<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..l).map(|_| random_anti_hermitian(n, &mut rng)).collect()
}
