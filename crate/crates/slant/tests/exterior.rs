use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slant::exterior::{
    eta, hodge_star, j0_block, mu, omega_power_pairing, project_pm, slant_plane_frame, wedge2, zeta_hat_pairing,
    MultiVector2k, OrientedPlane, TwoVector, Vec4, PAIRS,
};

fn basis4(i: usize) -> Vec4 {
    let mut v = Vec4::zeros();
    v[i] = 1.0;
    v
}

fn rand_vec4(rng: &mut ChaCha8Rng) -> Vec4 {
    Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0))
}

fn rand_two_vector(rng: &mut ChaCha8Rng) -> TwoVector {
    TwoVector::new(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
}

/// <x₁∧x₂, y₁∧y₂> = det(<x_i, y_j>).
fn det_pairing(x1: &Vec4, x2: &Vec4, y1: &Vec4, y2: &Vec4) -> f64 {
    Matrix2::new(x1.dot(y1), x1.dot(y2), x2.dot(y1), x2.dot(y2)).determinant()
}

/// Oriented volume ξ∧η for 2-vectors, summed over basis pairs.
fn wedge_volume(xi: &TwoVector, eta: &TwoVector) -> f64 {
    let mut s = 0.0;
    for (a, &(i, j)) in PAIRS.iter().enumerate() {
        for (b, &(k, l)) in PAIRS.iter().enumerate() {
            let m = Matrix4::from_columns(&[basis4(i), basis4(j), basis4(k), basis4(l)]);
            s += xi.coords()[a] * eta.coords()[b] * m.determinant();
        }
    }
    s
}

#[test]
fn wedge_of_basis_vectors() {
    let w = wedge2(&basis4(0), &basis4(1));
    assert_eq!(w, TwoVector::basis(0, 1));
    let x = Vec4::new(0.3, -1.0, 2.0, 0.5);
    assert_eq!(wedge2(&x, &x), TwoVector::ZERO);
}

#[test]
fn wedge_matches_determinant_pairings() {
    let x = Vec4::new(1.0, 0.0, 0.0, 0.0);
    let y = Vec4::new(0.0, 1.0, 1.0, 0.0);
    let w = wedge2(&x, &y);
    assert!((w.norm() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(w, TwoVector::basis(0, 1) + TwoVector::basis(0, 2));
    for &(i, j) in PAIRS.iter() {
        let expect = det_pairing(&x, &y, &basis4(i), &basis4(j));
        assert!((w.dot(&TwoVector::basis(i, j)) - expect).abs() < 1e-15);
    }
}

#[test]
fn gram_identity_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (x, y, z, w) = (rand_vec4(&mut rng), rand_vec4(&mut rng), rand_vec4(&mut rng), rand_vec4(&mut rng));
        let a = wedge2(&x, &y);
        let g = x.norm_squared() * y.norm_squared() - x.dot(&y).powi(2);
        assert!((a.dot(&a) - g).abs() <= 1e-10 * g.max(1e-3));
        let b = wedge2(&z, &w);
        let d = det_pairing(&x, &y, &z, &w);
        assert!((a.dot(&b) - d).abs() <= 1e-10 * d.abs().max(1.0));
    }
}

#[test]
fn hodge_star_examples() {
    assert_eq!(hodge_star(&TwoVector::basis(0, 1)), TwoVector::basis(2, 3));
    assert!(hodge_star(&eta(1)).max_abs_diff(&eta(1)) < 1e-16);
    assert!(hodge_star(&eta(4)).max_abs_diff(&(-eta(4))) < 1e-16);
}

#[test]
fn hodge_star_matches_volume_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let xi = rand_two_vector(&mut rng);
        assert!(hodge_star(&hodge_star(&xi)).max_abs_diff(&xi) < 1e-15);
        for &(i, j) in PAIRS.iter() {
            let e = TwoVector::basis(i, j);
            assert!((hodge_star(&xi).dot(&e) - wedge_volume(&xi, &e)).abs() < 1e-12);
        }
    }
}

#[test]
fn eta_basis_is_orthonormal_and_split() {
    for a in 1..=6 {
        for b in 1..=6 {
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((eta(a).dot(&eta(b)) - expect).abs() < 1e-15);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let xi = rand_two_vector(&mut rng);
        let back = TwoVector::from_eta(xi.to_eta());
        assert!(back.max_abs_diff(&xi) < 1e-15);
        let n2: f64 = xi.to_eta().iter().map(|x| x * x).sum();
        assert!((n2 - xi.dot(&xi)).abs() < 1e-14);
    }
}

#[test]
fn projection_examples() {
    let (p, m) = project_pm(&TwoVector::basis(0, 1));
    assert!(p.max_abs_diff(&eta(1).scale(FRAC_1_SQRT_2)) < 1e-15);
    assert!(m.max_abs_diff(&eta(4).scale(FRAC_1_SQRT_2)) < 1e-15);
    let (p, m) = project_pm(&eta(1));
    assert!(p.max_abs_diff(&eta(1)) < 1e-16);
    assert!(m.norm() < 1e-16);
}

#[test]
fn unit_decomposables_land_on_both_spheres() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let v = OrientedPlane::from_span(&rand_vec4(&mut rng), &rand_vec4(&mut rng)).unwrap();
        let (p, m) = project_pm(&v.plucker());
        assert!((p.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((m.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((p + m).max_abs_diff(&v.plucker()) < 1e-15);
        assert!(hodge_star(&p).max_abs_diff(&p) < 1e-15);
        assert!(hodge_star(&m).max_abs_diff(&(-m)) < 1e-15);
    }
}

#[test]
fn decomposability_characterizations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let w = wedge2(&rand_vec4(&mut rng), &rand_vec4(&mut rng));
        assert!(w.is_decomposable());
        let (p, m) = project_pm(&w);
        assert!((p.norm() - m.norm()).abs() < 1e-12);
        let s = w + wedge2(&rand_vec4(&mut rng), &rand_vec4(&mut rng));
        let (p, m) = project_pm(&s);
        assert_eq!(s.is_decomposable(), (p.norm() - m.norm()).abs() < 1e-9 * s.norm().max(1e-3));
    }
    // ε₁∧ε₂ + ε₃∧ε₄ is the standard non-decomposable example.
    assert!(!(TwoVector::basis(0, 1) + TwoVector::basis(2, 3)).is_decomposable());
}

#[test]
fn complement_plane_is_the_star() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..100 {
        let v = OrientedPlane::from_span(&rand_vec4(&mut rng), &rand_vec4(&mut rng)).unwrap();
        assert!(v.complement().plucker().max_abs_diff(&hodge_star(&v.plucker())) < 1e-12);
    }
}

fn e(dim: usize, i: usize) -> DVector<f64> {
    let mut x = DVector::zeros(dim);
    x[i] = 1.0;
    x
}

#[test]
fn omega_pairing_examples() {
    let omega = j0_block(4);
    let j = j0_block(4);
    let x = e(4, 0);
    let y = &j * &x;
    assert!((omega_power_pairing(&omega, &[x.clone(), y]).unwrap() + 1.0).abs() < 1e-15);
    assert!(omega_power_pairing(&omega, &[e(4, 0), e(4, 1)]).unwrap().abs() < 1e-15);
    assert!(omega_power_pairing(&j0_block(8), &[e(8, 0), e(8, 1), e(8, 2), e(8, 3), e(8, 4), e(8, 5)]).is_err());
}

/// Ω₀∧Ω₀ expanded directly: Ω²(a,b,c,d) = ⅓(Ω(a,b)Ω(c,d) − Ω(a,c)Ω(b,d) + Ω(a,d)Ω(b,c)).
fn omega_squared_oracle(omega: &DMatrix<f64>, v: &[DVector<f64>]) -> f64 {
    let w = |a: &DVector<f64>, b: &DVector<f64>| a.dot(&(omega * b));
    (w(&v[0], &v[1]) * w(&v[2], &v[3]) - w(&v[0], &v[2]) * w(&v[1], &v[3]) + w(&v[0], &v[3]) * w(&v[1], &v[2])) / 3.0
}

#[test]
fn ex27_four_frame_pairing() {
    let k = 0.5;
    let frame = slant::jets::catalog::ex27_frame(k, 0.3, -1.1).unwrap();
    let omega = j0_block(8);
    let direct = omega_power_pairing(&omega, &frame).unwrap();
    assert!((direct - omega_squared_oracle(&omega, &frame)).abs() < 1e-14);
    let v = MultiVector2k::wedge(&frame).unwrap();
    let pairing = zeta_hat_pairing(&v, 8).unwrap();
    assert!((pairing - 1.0 / 12.0).abs() < 1e-12);
    assert!((pairing - mu(2) * k * k).abs() < 1e-12);
}

#[test]
fn zeta_hat_examples() {
    let j = j0_block(4);
    let hol = MultiVector2k::wedge(&[e(4, 0), &j * e(4, 0)]).unwrap();
    assert!((zeta_hat_pairing(&hol, 4).unwrap() - 1.0).abs() < 1e-15);
    let real = MultiVector2k::wedge(&[e(4, 0), e(4, 1)]).unwrap();
    assert!(zeta_hat_pairing(&real, 4).unwrap().abs() < 1e-15);
    // Tangent plane of (u, k cos v, v, k sin v) at the origin, k = 1.
    let xu = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let xv = DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0]) * FRAC_1_SQRT_2;
    let v = MultiVector2k::wedge(&[xu, xv]).unwrap();
    assert!((zeta_hat_pairing(&v, 4).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn pairing_suite_on_constructed_planes() {
    assert_eq!(mu(1), 1.0);
    assert!((mu(2) - 1.0 / 3.0).abs() < 1e-16);
    for alpha in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2] {
        for (dim, k) in [(4, 1), (8, 1), (8, 2)] {
            let frame = slant_plane_frame(dim, k, alpha).unwrap();
            let v = MultiVector2k::wedge(&frame).unwrap();
            let got = zeta_hat_pairing(&v, dim).unwrap();
            let expect = mu(k) * alpha.cos().powi(k as i32);
            assert!((got - expect).abs() <= 1e-10, "dim {dim} k {k} alpha {alpha}: {got} vs {expect}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

    #[test]
    fn wedge_inner_product_is_gram_determinant(x in prop::array::uniform4(-2.0f64..2.0), y in prop::array::uniform4(-2.0f64..2.0),
                                               z in prop::array::uniform4(-2.0f64..2.0), w in prop::array::uniform4(-2.0f64..2.0)) {
        let (x, y, z, w) = (Vec4::from(x), Vec4::from(y), Vec4::from(z), Vec4::from(w));
        let d = det_pairing(&x, &y, &z, &w);
        prop_assert!((wedge2(&x, &y).dot(&wedge2(&z, &w)) - d).abs() <= 1e-10 * d.abs().max(1.0));
    }

    #[test]
    fn star_is_isometric_involution(c in prop::array::uniform6(-3.0f64..3.0)) {
        let xi = TwoVector::new(c);
        prop_assert!(hodge_star(&hodge_star(&xi)).max_abs_diff(&xi) < 1e-15);
        prop_assert!((hodge_star(&xi).norm() - xi.norm()).abs() < 1e-12);
        let (p, m) = project_pm(&xi);
        prop_assert!((p + m).max_abs_diff(&xi) < 1e-14);
        prop_assert!(p.dot(&m).abs() < 1e-12);
    }

    #[test]
    fn pairing_matches_expanded_oracle(c in prop::collection::vec(-1.0f64..1.0, 32)) {
        let vs: Vec<DVector<f64>> = (0..4).map(|i| DVector::from_column_slice(&c[8 * i..8 * i + 8])).collect();
        let omega = j0_block(8);
        let a = omega_power_pairing(&omega, &vs).unwrap();
        prop_assert!((a - omega_squared_oracle(&omega, &vs)).abs() < 1e-10);
    }
}
