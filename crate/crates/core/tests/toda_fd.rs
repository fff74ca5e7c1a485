use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use toda_core::toda::{metric_density, pair_norm, plucker_check, residual_ladder, toda_residual};
use toda_core::wronskian::random_mobius_pair;
use toda_core::{Error, Grid2D, PolyPair, RationalPoly, C64};

#[test]
fn unimodular_normalization_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = random_mobius_pair(&mut rng);
    for k in 0..50 {
        let z = C64::new(-1.0 + 0.04 * k as f64, 0.3 - 0.01 * k as f64);
        let rho = pair_norm(&p, z);
        let e_u = metric_density(&p, z).unwrap().exp();
        assert!((e_u * rho * rho - 1.0).abs() < 1e-10);
    }
}

#[test]
fn unitary_recombination_preserves_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let p = random_mobius_pair(&mut rng);
    let u = toda_core::sampling::su2(&mut rng);
    for k in 0..20 {
        let z = C64::new(0.1 * k as f64 - 1.0, 0.05 * k as f64);
        let (v0, v1) = p.eval(z);
        let [w0, w1] = u.apply([v0, v1]);
        let rho = w0.norm_sqr() + w1.norm_sqr();
        assert!((rho - pair_norm(&p, z)).abs() < 1e-12 * rho.max(1.0));
    }
}

#[test]
fn ladder_converges_at_second_order() {
    let grid = Grid2D::unit_box(0.02).unwrap();
    let p = PolyPair::standard();
    for n in [1usize, 3] {
        let ladder = residual_ladder(&p, &grid, &[0.02, 0.01], n).unwrap();
        let ratio = ladder[1].ratio.unwrap();
        assert!((3.5..=4.5).contains(&ratio), "n={n} ratio={ratio}");
        assert!(ladder[1].max_res < 1e-3);
    }
}

#[test]
fn plucker_degree_one() {
    let grid = Grid2D::unit_box(0.02).unwrap();
    let dev = plucker_check(&PolyPair::standard(), &grid, 1).unwrap();
    assert!(dev < 1e-2);
}

#[test]
fn non_unimodular_pairs_are_rejected() {
    let grid = Grid2D::unit_box(0.05).unwrap();
    let p = PolyPair::new(RationalPoly::one(), RationalPoly::from_i64(&[0, 0, 1])).unwrap();
    assert_eq!(toda_residual(&p, &grid, 2).unwrap_err(), Error::NotUnimodular);
    assert!(metric_density(&PolyPair::new(RationalPoly::identity(), RationalPoly::zero()).unwrap(), C64::new(0.0, 0.0)).is_err());
}
