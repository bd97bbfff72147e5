//! Doubling machinery relating the unitary problem to the centered
//! Lagrangian one: the maps η and η^(l), the swap involution α^(l),
//! O(n)×O(n)-orbit labels, and the passage between pair tuples and
//! single tuples.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numcore::{check_unitary, eig_unitary, CMat};
use crate::reps::RepTuple;

/// An l-tuple of pairs (u_j, v_j) in U(n) × U(n).
#[derive(Debug, Clone, PartialEq)]
pub struct PairTuple {
    pub pairs: Vec<(CMat, CMat)>,
}

impl PairTuple {
    pub fn new(pairs: Vec<(CMat, CMat)>, tol: &Tolerances) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Malformed("a pair tuple needs l ≥ 1 pairs".into()));
        }
        let n = pairs[0].0.nrows();
        for (u, v) in &pairs {
            check_unitary(u, tol)?;
            check_unitary(v, tol)?;
            if u.nrows() != n || v.nrows() != n {
                return Err(Error::DimensionMismatch { left: n, right: u.nrows().max(v.nrows()) });
            }
        }
        Ok(PairTuple { pairs })
    }

    pub fn l(&self) -> usize {
        self.pairs.len()
    }

    pub fn n(&self) -> usize {
        self.pairs[0].0.nrows()
    }

    fn component(&self, second: bool) -> Vec<CMat> {
        self.pairs
            .iter()
            .map(|(u, v)| if second { v.clone() } else { u.clone() })
            .collect()
    }

    pub fn u_product_residual(&self) -> f64 {
        let n = self.n();
        let p = self
            .pairs
            .iter()
            .fold(CMat::identity(n, n), |acc, (u, _)| acc * u);
        (p - CMat::identity(n, n)).norm()
    }

    pub fn v_product_residual(&self) -> f64 {
        let n = self.n();
        let p = self
            .pairs
            .iter()
            .fold(CMat::identity(n, n), |acc, (_, v)| acc * v);
        (p - CMat::identity(n, n)).norm()
    }

    pub fn check_biclosed(&self, tol: &Tolerances) -> Result<()> {
        let u_residual = self.u_product_residual();
        let v_residual = self.v_product_residual();
        if u_residual > tol.product || v_residual > tol.product {
            return Err(Error::NotBiclosed { u_residual, v_residual, tol: tol.product });
        }
        Ok(())
    }
}

/// Orbit label of the two-sided O(n) action u ↦ k₁uk₂⁻¹: the sorted
/// eigen-angle multiset of uᵗu.
#[derive(Debug, Clone, PartialEq)]
pub struct KKOrbitLabel {
    pub angles: Vec<f64>,
}

/// η(u, v) = u⁻¹v. Its conjugacy class is constant along diagonal
/// two-sided orbits (u, v) ↦ (aub⁻¹, avb⁻¹).
pub fn eta(u: &CMat, v: &CMat) -> Result<CMat> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch { left: u.nrows(), right: v.nrows() });
    }
    Ok(u.adjoint() * v)
}

/// η^(l) with components s_{j+1}⁻¹ (u_j⁻¹v_j) s_{j+1}, where
/// s_j = u_j⋯u_l. Sends biclosed pair tuples to closed tuples.
pub fn eta_l(pairs: &PairTuple, tol: &Tolerances) -> Result<RepTuple> {
    pairs.check_biclosed(tol)?;
    let l = pairs.l();
    let n = pairs.n();
    let mut suffix = vec![CMat::identity(n, n); l + 1];
    for j in (0..l).rev() {
        suffix[j] = &pairs.pairs[j].0 * &suffix[j + 1];
    }
    let matrices = (0..l)
        .map(|j| {
            let s = &suffix[j + 1];
            s.adjoint() * (pairs.pairs[j].0.adjoint() * &pairs.pairs[j].1) * s
        })
        .collect();
    Ok(RepTuple { matrices, classes: None })
}

/// α^(l)((u_j, v_j)) = ((v̄_j, ū_j)). Involutive; fixed points are the
/// tuples with u_j = v̄_j.
pub fn alpha_l(pairs: &PairTuple) -> PairTuple {
    PairTuple {
        pairs: pairs
            .pairs
            .iter()
            .map(|(u, v)| (v.map(|c| c.conj()), u.map(|c| c.conj())))
            .collect(),
    }
}

/// Componentwise fixed-point defect of α^(l).
pub fn alpha_fix_defect(pairs: &PairTuple) -> f64 {
    pairs
        .pairs
        .iter()
        .map(|(u, v)| (u - v.map(|c| c.conj())).norm())
        .fold(0.0, f64::max)
}

/// Sorted eigen-angles of uᵗu, a complete invariant of the double coset
/// O(n) u O(n).
pub fn kk_orbit_label(u: &CMat, tol: &Tolerances) -> Result<KKOrbitLabel> {
    check_unitary(u, tol)?;
    let eig = eig_unitary(&(u.transpose() * u), tol)?;
    Ok(KKOrbitLabel { angles: eig.angles })
}

/// Extracts the closed tuple (v_j) from an α-fixed biclosed pair tuple.
pub fn realify(pairs: &PairTuple, tol: &Tolerances) -> Result<RepTuple> {
    pairs.check_biclosed(tol)?;
    let defect = alpha_fix_defect(pairs);
    if defect > tol.fix {
        return Err(Error::NotAlphaFixed { defect, tol: tol.fix });
    }
    // on the fixed locus u_j⁻¹v_j = w̄_j⁻¹w_j = w_jᵗw_j, so the class of
    // η agrees with the orbit label of w_j
    Ok(RepTuple { matrices: pairs.component(true), classes: None })
}

/// Embeds a closed tuple as the biclosed pair tuple ((I, w_j)); a section
/// of η^(l).
pub fn complexify(rep: &RepTuple, tol: &Tolerances) -> Result<PairTuple> {
    rep.check_closed(tol)?;
    let n = rep.n();
    Ok(PairTuple {
        pairs: rep
            .matrices
            .iter()
            .map(|w| (CMat::identity(n, n), w.clone()))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{
        angle_multiset_distance, haar_orthogonal, haar_unitary, haar_unitary_with,
        symmetric_unitary_sqrt,
    };
    use crate::reps::{beta, beta_fix_defect, class_of};
    use num_complex::Complex;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_closed(n: usize, l: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
        let mut ms: Vec<CMat> = (0..l - 1).map(|_| haar_unitary_with(n, rng)).collect();
        let prefix = ms.iter().fold(CMat::identity(n, n), |acc, m| acc * m);
        ms.push(prefix.adjoint());
        ms
    }

    fn random_biclosed(n: usize, l: usize, seed: u64) -> PairTuple {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let us = random_closed(n, l, &mut rng);
        let vs = random_closed(n, l, &mut rng);
        PairTuple { pairs: us.into_iter().zip(vs).collect() }
    }

    #[test]
    fn eta_identities() {
        let u = haar_unitary(3, 1);
        assert!((eta(&u, &u).unwrap() - CMat::identity(3, 3)).norm() < 1e-14);
        let w = haar_unitary(3, 2);
        assert!((eta(&CMat::identity(3, 3), &w).unwrap() - w).norm() < 1e-14);
    }

    #[test]
    fn eta_class_is_orbit_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary_with(3, &mut rng);
        let v = haar_unitary_with(3, &mut rng);
        let base = class_of(&eta(&u, &v).unwrap(), &tol()).unwrap();
        for _ in 0..300 {
            let a = haar_unitary_with(3, &mut rng);
            let b = haar_unitary_with(3, &mut rng);
            let moved = eta(&(&a * &u * b.adjoint()), &(&a * &v * b.adjoint())).unwrap();
            let c = class_of(&moved, &tol()).unwrap();
            assert!(angle_multiset_distance(&base.angles, &c.angles) < 1e-9);
        }
    }

    #[test]
    fn eta_l_collapses_when_u_components_are_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let vs = random_closed(2, 4, &mut rng);
        let pairs = PairTuple {
            pairs: vs.iter().map(|v| (CMat::identity(2, 2), v.clone())).collect(),
        };
        let rep = eta_l(&pairs, &tol()).unwrap();
        for (a, b) in rep.matrices.iter().zip(&vs) {
            assert!((a - b).norm() < 1e-14);
        }

        let single = PairTuple {
            pairs: vec![(CMat::identity(2, 2), CMat::identity(2, 2))],
        };
        let rep = eta_l(&single, &tol()).unwrap();
        assert!((&rep.matrices[0] - CMat::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn eta_l_sends_biclosed_to_closed() {
        for s in 0..40 {
            let pairs = random_biclosed(3, 4, 100 + s);
            let rep = eta_l(&pairs, &tol()).unwrap();
            assert!(rep.product_residual() < 1e-10);
        }
    }

    #[test]
    fn eta_l_rejects_non_biclosed() {
        let pairs = PairTuple {
            pairs: vec![
                (haar_unitary(2, 11), haar_unitary(2, 12)),
                (haar_unitary(2, 13), haar_unitary(2, 14)),
            ],
        };
        assert!(matches!(eta_l(&pairs, &tol()), Err(Error::NotBiclosed { .. })));
    }

    #[test]
    fn alpha_is_an_involution_with_the_expected_fixed_set() {
        let pairs = random_biclosed(3, 3, 21);
        let twice = alpha_l(&alpha_l(&pairs));
        for ((a, b), (c, d)) in pairs.pairs.iter().zip(&twice.pairs) {
            assert!((a - c).norm() < 1e-12);
            assert!((b - d).norm() < 1e-12);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let ws = random_closed(3, 3, &mut rng);
        let fixed = PairTuple {
            pairs: ws.iter().map(|w| (w.map(|c| c.conj()), w.clone())).collect(),
        };
        assert!(alpha_fix_defect(&fixed) < 1e-14);
        assert!(alpha_fix_defect(&pairs) > 1e-3);

        // n = 1: fixed iff u = v̄
        let z = Complex::from_polar(1.0, 0.8);
        let fixed1 = PairTuple {
            pairs: vec![(CMat::from_element(1, 1, z.conj()), CMat::from_element(1, 1, z))],
        };
        assert!(alpha_fix_defect(&fixed1) < 1e-15);
    }

    #[test]
    fn alpha_preserves_biclosedness() {
        let pairs = random_biclosed(2, 5, 23);
        assert!(alpha_l(&pairs).check_biclosed(&tol()).is_ok());
    }

    #[test]
    fn kk_label_basics() {
        let k = haar_orthogonal(3, 31).map(Complex::from);
        let label = kk_orbit_label(&k, &tol()).unwrap();
        assert!(label.angles.iter().all(|&a| a.abs() < 1e-9 || (a - crate::numcore::TAU).abs() < 1e-9));

        let thetas = [0.3, 1.1, 2.9];
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            thetas.iter().map(|&t| Complex::from_polar(1.0, t)),
        ));
        let label = kk_orbit_label(&d, &tol()).unwrap();
        let mut expected: Vec<f64> = thetas
            .iter()
            .map(|&t| crate::numcore::wrap_angle(2.0 * t))
            .collect();
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!(angle_multiset_distance(&label.angles, &expected) < 1e-9);
    }

    #[test]
    fn kk_label_is_two_sided_orthogonal_invariant() {
        let u = haar_unitary(3, 41);
        let base = kk_orbit_label(&u, &tol()).unwrap();
        for s in 0..500 {
            let k1 = haar_orthogonal(3, 4200 + s).map(Complex::from);
            let k2 = haar_orthogonal(3, 5200 + s).map(Complex::from);
            let moved = &k1 * &u * k2.transpose();
            let label = kk_orbit_label(&moved, &tol()).unwrap();
            assert!(angle_multiset_distance(&base.angles, &label.angles) < 1e-9);
        }
    }

    #[test]
    fn kk_label_of_the_symmetric_root_is_the_class() {
        for s in 0..20 {
            let frame = haar_unitary(3, 600 + s);
            let w = &frame * frame.transpose();
            let root = symmetric_unitary_sqrt(&w, &tol()).unwrap();
            let label = kk_orbit_label(&root, &tol()).unwrap();
            let class = class_of(&w, &tol()).unwrap();
            assert!(angle_multiset_distance(&label.angles, &class.angles) < 1e-9);
        }
    }

    #[test]
    fn realify_recovers_a_planted_tuple() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let ws = random_closed(3, 4, &mut rng);
        let pairs = PairTuple {
            pairs: ws.iter().map(|w| (w.map(|c| c.conj()), w.clone())).collect(),
        };
        let rep = realify(&pairs, &tol()).unwrap();
        for (a, b) in rep.matrices.iter().zip(&ws) {
            assert!((a - b).norm() == 0.0);
        }
        // the class of η matches the orbit label of the extracted factor
        for (j, w) in ws.iter().enumerate() {
            let h = eta(&pairs.pairs[j].0, &pairs.pairs[j].1).unwrap();
            let label = kk_orbit_label(w, &tol()).unwrap();
            let class = class_of(&h, &tol()).unwrap();
            assert!(angle_multiset_distance(&label.angles, &class.angles) < 1e-9);
        }

        // orthogonal w: labels all zero
        let k = haar_orthogonal(2, 52).map(Complex::from);
        let pairs = PairTuple {
            pairs: vec![
                (k.map(|c| c.conj()), k.clone()),
                (k.transpose().map(|c| c.conj()), k.transpose()),
            ],
        };
        let rep = realify(&pairs, &tol()).unwrap();
        let label = kk_orbit_label(&rep.matrices[0], &tol()).unwrap();
        assert!(label
            .angles
            .iter()
            .all(|&a| a.abs() < 1e-9 || (a - crate::numcore::TAU).abs() < 1e-9));

        // scalars come back verbatim
        let z = Complex::from_polar(1.0, 1.7);
        let pairs = PairTuple {
            pairs: vec![
                (CMat::from_element(1, 1, z.conj()), CMat::from_element(1, 1, z)),
                (CMat::from_element(1, 1, z), CMat::from_element(1, 1, z.conj())),
            ],
        };
        let rep = realify(&pairs, &tol()).unwrap();
        assert_eq!(rep.matrices[0][(0, 0)], z);
    }

    #[test]
    fn realify_rejects_unfixed_tuples() {
        let pairs = random_biclosed(2, 3, 61);
        assert!(matches!(realify(&pairs, &tol()), Err(Error::NotAlphaFixed { .. })));
    }

    #[test]
    fn complexify_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let rep = RepTuple { matrices: random_closed(3, 4, &mut rng), classes: None };
        let pairs = complexify(&rep, &tol()).unwrap();
        pairs.check_biclosed(&tol()).unwrap();
        let back = eta_l(&pairs, &tol()).unwrap();
        assert!(back.distance(&rep) < 1e-14);
        for (j, (u, v)) in pairs.pairs.iter().enumerate() {
            let h = eta(u, v).unwrap();
            let a = class_of(&h, &tol()).unwrap();
            let b = class_of(&rep.matrices[j], &tol()).unwrap();
            assert!(angle_multiset_distance(&a.angles, &b.angles) < 1e-12);
        }

        let trivial = RepTuple {
            matrices: vec![CMat::identity(2, 2); 3],
            classes: None,
        };
        let pairs = complexify(&trivial, &tol()).unwrap();
        for (u, v) in &pairs.pairs {
            assert!((u - CMat::identity(2, 2)).norm() == 0.0);
            assert!((v - CMat::identity(2, 2)).norm() == 0.0);
        }
    }

    #[test]
    fn eta_intertwines_alpha_with_beta() {
        for s in 0..40 {
            let pairs = random_biclosed(3, 4, 8000 + s);
            let lhs = eta_l(&alpha_l(&pairs), &tol()).unwrap();
            let rhs = beta(&eta_l(&pairs, &tol()).unwrap());
            assert!(lhs.distance(&rhs) < 1e-10, "intertwining failed (s={s})");
        }
    }

    #[test]
    fn eta_maps_alpha_fixed_to_beta_fixed() {
        for s in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + s);
            let ws = random_closed(3, 4, &mut rng);
            let fixed = PairTuple {
                pairs: ws.iter().map(|w| (w.map(|c| c.conj()), w.clone())).collect(),
            };
            let rep = eta_l(&fixed, &tol()).unwrap();
            assert!(beta_fix_defect(&rep) <= tol().fix, "image not β-fixed (s={s})");
        }
    }
}
