use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toda_core::groups::{self, sym_character};
use toda_core::linalg::mat_mul;
use toda_core::sampling;
use toda_core::symrep::{intertwine_residual, rational_normal_lift, sym_power_matrix};
use toda_core::{ComplexMatrix, ProjectivePoint, SubgroupSpec, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homomorphism(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, v) = (sampling::su2(&mut rng), sampling::su2(&mut rng));
        let lhs = sym_power_matrix(&(u * v), n).mat;
        let rhs = mat_mul(&sym_power_matrix(&u, n).mat, &sym_power_matrix(&v, n).mat).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn kernel_of_projection_is_plus_minus_one(seed in any::<u64>(), n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sampling::su2(&mut rng);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let neg = sym_power_matrix(&u.neg(), n).mat;
        let pos = sym_power_matrix(&u, n).mat.scale(C64::new(sign, 0.0));
        prop_assert!(neg.max_abs_diff(&pos) < 1e-12);
    }

    #[test]
    fn unitary_and_intertwining(seed in any::<u64>(), n in 1usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = sampling::su2(&mut rng);
        prop_assert!(sym_power_matrix(&u, n).mat.unitarity_defect() < 1e-10);
        let z = ProjectivePoint::new(vec![sampling::complex(&mut rng), sampling::complex(&mut rng)]).unwrap();
        prop_assert!(intertwine_residual(&u, &z, n).unwrap() < 1e-9);
    }
}

#[test]
fn lift_norm_is_power_of_pair_norm() {
    let (z0, z1) = (C64::new(0.4, -0.2), C64::new(1.3, 0.5));
    let rho = z0.norm_sqr() + z1.norm_sqr();
    for n in 1..12 {
        let norm: f64 = rational_normal_lift(z0, z1, n).unwrap().iter().map(|w| w.norm_sqr()).sum();
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        assert!((norm * fact / rho.powi(n as i32) - 1.0).abs() < 1e-13);
    }
}

#[test]
fn traces_match_characters_on_finite_groups() {
    for spec in [SubgroupSpec::E6, SubgroupSpec::BinaryDihedral(3), SubgroupSpec::Cyclic(5)] {
        let group = groups::enumerate(spec).unwrap();
        for g in &group.elements {
            for n in [1usize, 4, 9] {
                let s = sym_power_matrix(g, n).mat;
                assert!((s.trace() - sym_character(g, n)).norm() < 1e-10);
                assert!(s.unitarity_defect() < 1e-9);
            }
        }
    }
    let id = sym_power_matrix(&toda_core::Su2Matrix::IDENTITY, 5).mat;
    assert!(id.max_abs_diff(&ComplexMatrix::identity(6)) == 0.0);
}
