use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toda_core::linalg::{cholesky_unimodular, mat_mul, pattern_holds, HermitianUnimodular};
use toda_core::sampling;
use toda_core::{ComplexMatrix, Error, Tolerances, UpperTriangularPositive, C64};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cholesky_round_trip(seed in any::<u64>(), dim in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = sampling::unimodular_pd(&mut rng, dim, 1e-9);
        let delta = cholesky_unimodular(&m).unwrap();
        prop_assert!(delta.matrix().is_upper_triangular(0.0));
        prop_assert!((0..dim).all(|i| delta.matrix()[(i, i)].im == 0.0 && delta.matrix()[(i, i)].re > 0.0));
        prop_assert!(delta.gram().max_abs_diff(m.matrix()) < 1e-10);
    }

    #[test]
    fn factor_of_gram_is_itself(seed in any::<u64>(), dim in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = UpperTriangularPositive::new(sampling::delta_patterned(&mut rng, dim, 1), 1e-9).unwrap();
        let m = HermitianUnimodular::new(delta.gram(), 1e-9).unwrap();
        let again = cholesky_unimodular(&m).unwrap();
        prop_assert!(again.matrix().max_abs_diff(delta.matrix()) < 1e-10);
    }

    #[test]
    fn sparsity_transfers_both_ways(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = sampling::delta_patterned(&mut rng, 8, k);
        let gram = mat_mul(&delta.adjoint(), &delta).unwrap();
        prop_assert!(pattern_holds(&gram, k, 1e-9));
        let m = sampling::unimodular_pd_patterned(&mut rng, 8, k, 1e-9);
        let factor = cholesky_unimodular(&m).unwrap();
        prop_assert!(pattern_holds(factor.matrix(), k, 1e-9));
    }
}

#[test]
fn indefinite_input_is_reported() {
    let m = ComplexMatrix::from_diag(&[C64::new(-1.0, 0.0), C64::new(-1.0, 0.0)]);
    let m = HermitianUnimodular::new(m, 1e-9).unwrap();
    assert!(matches!(cholesky_unimodular(&m), Err(Error::NotPositiveDefinite { index: 0, .. })));
}

#[test]
fn sparsity_is_not_automatic() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = sampling::unimodular_pd(&mut rng, 6, Tolerances::default().det);
    let factor = cholesky_unimodular(&m).unwrap();
    assert!(!pattern_holds(factor.matrix(), 2, 1e-9));
}
