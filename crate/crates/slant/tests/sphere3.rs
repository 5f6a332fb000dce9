use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slant::cxstruct::{j1, j1_minus};
use slant::jets::{catalog, point_geometry, wirtinger_field, Grid, Immersion};
use slant::sphere3::{
    helical_cylinder, helix, left_invariant_field, left_matrix, left_translate, phi, phi_compose, qconj, qmul,
    right_invariant_field, right_matrix, right_translate, ruled, sphere_deviation, spherical_frame,
    spherical_gauss_maps, stencil_frenet, x_basis, Curve3Sphere, HelixParams, UnitQuat,
};
use slant::Vec4;

fn rand_unit(rng: &mut ChaCha8Rng) -> Vec4 {
    loop {
        let v = Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        if v.norm() > 0.1 {
            return v.normalize();
        }
    }
}

fn f_at(u: f64, v: f64) -> Vec4 {
    Vec4::new(u.cos() * v.cos(), u.sin() * v.cos(), v.sin(), 0.0)
}

fn build(id: &str) -> Immersion {
    catalog::build(id, &BTreeMap::new()).unwrap()
}

#[test]
fn quaternion_product_matches_matrix_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1000 {
        let p = rand_unit(&mut rng);
        let q = rand_unit(&mut rng);
        let pq = qmul(&p, &q);
        assert!((left_matrix(&p) * q - pq).amax() < 1e-12);
        assert!((right_matrix(&q) * p - pq).amax() < 1e-12);
        assert!((pq.norm() - 1.0).abs() < 1e-12);
        let (up, uq) = (UnitQuat::new(p).unwrap(), UnitQuat::new(q).unwrap());
        assert!((left_translate(&up, &uq).coords() - pq).amax() < 1e-15);
        assert!((right_translate(&uq, &up).coords() - pq).amax() < 1e-15);
        // Translations are isometries.
        let m = left_matrix(&p);
        assert!((m.transpose() * m - nalgebra::Matrix4::identity()).amax() < 1e-12);
    }
}

#[test]
fn identity_and_unit_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let q = UnitQuat::new(rand_unit(&mut rng)).unwrap();
    assert_eq!(left_translate(&UnitQuat::identity(), &q), q);
    assert!((q.mul(&q.inverse()).coords() - UnitQuat::identity().coords()).amax() < 1e-15);
    assert!(UnitQuat::new(Vec4::new(1.0, 1.0, 0.0, 0.0)).is_err());
}

#[test]
fn complex_structures_on_the_position_are_invariant_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..100 {
        let q = rand_unit(&mut rng);
        assert!((j1_minus().apply(&q) - left_invariant_field(1, &q)).amax() < 1e-10);
        assert!((j1().apply(&q) - right_invariant_field(1, &q)).amax() < 1e-10);
        assert!((left_matrix(&q) * x_basis(1) - left_invariant_field(1, &q)).amax() < 1e-10);
    }
}

#[test]
fn phi_reverses_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..1000 {
        let p = rand_unit(&mut rng);
        let q = rand_unit(&mut rng);
        assert!((phi(&qmul(&p, &q)) - qmul(&phi(&q), &phi(&p))).amax() < 1e-12);
    }
}

#[test]
fn helix_with_a_zero_is_the_one_parameter_subgroup() {
    let p = HelixParams::new(0.0, 1.0, 0.0).unwrap();
    let c = helix(&p, (0.0, 2.0 * PI), 65).unwrap();
    for s in &c.samples {
        let expect = Vec4::new(s.s.cos(), s.s.sin(), 0.0, 0.0);
        assert!((Vec4::from(s.position) - expect).amax() < 1e-12);
    }
}

#[test]
fn helix_params_are_validated() {
    assert!(HelixParams::new(0.6, 0.7, 0.0).is_err());
    assert!(HelixParams::new(1.0, 0.0, 0.0).is_err());
    let p = HelixParams::new(0.6, 0.8, 0.0).unwrap();
    assert!(helical_cylinder(&p, None).is_err());
}

#[test]
fn helix_torsion_and_binormal_pairing() {
    let p = HelixParams::new(0.6, -0.8, 0.0).unwrap();
    let c = helix(&p, (0.0, 2.0 * PI), 2049).unwrap();
    for s in &c.samples {
        assert!((s.tau + 1.0).abs() < 1e-5);
        assert!((s.f.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-8);
    }
    assert!(c.max_binormal_defect() < 1e-6);
    assert!(c.max_component_defect() < 1e-8);
    let st = stencil_frenet(&c).unwrap();
    for (&tau, &bx) in st.tau.iter().zip(&st.binormal_x1) {
        assert!((tau + 1.0).abs() < 1e-4, "{tau}");
        assert!((bx - 0.6).abs() < 1e-6, "{bx}");
    }
}

#[test]
fn helix_norm_drift_stays_small() {
    for (a, b) in [(0.6, -0.8), (0.28, 0.96), (-0.8, 0.6)] {
        let p = HelixParams::new(a, b, 0.3).unwrap();
        let c = helix(&p, (0.0, 20.0), 201).unwrap();
        assert!(c.max_norm_drift() <= 1e-9);
        for s in &c.samples {
            assert!((Vec4::from(s.position) - p.closed_form(s.s)).amax() < 1e-8);
        }
    }
}

#[test]
fn phi_flips_torsion() {
    let p = HelixParams::new(0.6, -0.8, 0.0).unwrap();
    let c = helix(&p, (0.0, 2.0 * PI), 513).unwrap();
    let mut mirrored: Curve3Sphere = c.clone();
    for s in &mut mirrored.samples {
        s.position = phi(&Vec4::from(s.position)).into();
    }
    let a = stencil_frenet(&c).unwrap();
    let b = stencil_frenet(&mirrored).unwrap();
    for (ta, tb) in a.tau.iter().zip(&b.tau) {
        assert!((ta + tb).abs() <= 1e-4, "{ta} {tb}");
    }
}

#[test]
fn helical_cylinder_is_flat_and_slant() {
    let p = HelixParams::new(0.6, -0.8, 0.0).unwrap();
    let imm = helical_cylinder(&p, None).unwrap();
    let grid = Grid::new(24, 24);
    assert!(sphere_deviation(&imm, &grid).unwrap() < 1e-12);
    let w = wirtinger_field(&imm, &grid, &j1_minus()).unwrap();
    let alpha = 0.6f64.acos();
    assert!(w.spread < 1e-5);
    assert!((w.mean - alpha).abs() < 1e-5);
    for (u, v) in grid.nodes(&imm.domain) {
        let pg = point_geometry(&imm, u, v, &j1_minus()).unwrap();
        assert!(pg.gauss.abs() <= 1e-5 && pg.normal_curvature.abs() <= 1e-5);
    }
    let composed = phi_compose(&imm).unwrap();
    let w = wirtinger_field(&composed, &grid, &j1()).unwrap();
    assert!(w.spread < 1e-5);
    assert!((w.mean - alpha).abs() < 1e-5);
}

#[test]
fn helical_cylinder_normal_pairs_constantly_with_x1() {
    let p = HelixParams::new(0.6, -0.8, 0.0).unwrap();
    let imm = helical_cylinder(&p, None).unwrap();
    let mut seen = Vec::new();
    for (u, v) in Grid::new(16, 16).nodes(&imm.domain) {
        let (f, _, xi) = spherical_frame(&imm, u, v).unwrap();
        seen.push(xi.dot(&left_invariant_field(1, &f)));
    }
    let first = seen[0];
    assert!((first.abs() - 0.6).abs() < 1e-9);
    assert!(seen.iter().all(|x| (x - first).abs() < 1e-9));
    // Slant for the left structure at α puts g₋ on the circle ⟨X, X₁⟩ = −cos(π − α).
    assert!(first > 0.0);
}

#[test]
fn helical_cylinder_with_explicit_direction() {
    let p = HelixParams::new(0.6, -0.8, 0.0).unwrap();
    let n0 = p.nu(0.0);
    let t0 = p.omega(0.0);
    let w = (n0 * 0.8 + t0 * 0.6).normalize();
    let imm = helical_cylinder(&p, Some(Vec4::new(0.0, w[0], w[1], w[2]))).unwrap();
    let ws = wirtinger_field(&imm, &Grid::new(12, 12), &j1_minus()).unwrap();
    assert!((ws.mean - 0.6f64.acos()).abs() < 1e-5 && ws.spread < 1e-5);
    let off = t0.cross(&n0);
    assert!(helical_cylinder(&p, Some(Vec4::new(0.0, off[0], off[1], off[2]))).is_err());
    assert!(helical_cylinder(&p, Some(Vec4::new(0.0, t0[0], t0[1], t0[2]))).is_err());
}

#[test]
fn spherical_gauss_maps_of_the_flat_torus() {
    let imm = build("torus");
    for (u, v) in Grid::new(12, 12).nodes(&imm.domain) {
        let (gp, gm) = spherical_gauss_maps(&imm, u, v).unwrap();
        for g in [gp, gm] {
            assert!((g.norm() - 1.0).abs() < 1e-12);
            assert!(g[0].abs() < 1e-12);
            assert!(g.dot(&x_basis(1)).abs() < 1e-12);
        }
    }
}

#[test]
fn spherical_gauss_maps_of_the_great_sphere() {
    let imm = build("s2-geodesic");
    for (u, v) in Grid::new(9, 9).nodes(&imm.domain) {
        let (gp, gm) = spherical_gauss_maps(&imm, u, v).unwrap();
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        // g₋ = f⁻¹ξ with ξ = k, in closed form.
        let em = Vec4::new(0.0, -sv, su * cv, cu * cv);
        assert!((gm - em).amax() < 1e-12, "{gm:?} vs {em:?}");
        assert!((gm - qmul(&qconj(&f_at(u, v)), &x_basis(3))).amax() < 1e-12);
        // Alternative closed forms differ by a sign flip of g₊ and conjugation of g₋ by j.
        let pub_p = Vec4::new(0.0, -sv, -cu * cv, su * cv);
        let pub_m = Vec4::new(0.0, sv, su * cv, -cu * cv);
        assert!((gp + pub_p).amax() < 1e-12, "{gp:?} vs {pub_p:?}");
        let j = x_basis(2);
        assert!((qmul(&qmul(&j, &gm), &qconj(&j)) - pub_m).amax() < 1e-12);
    }
}

#[test]
fn ruled_generators_are_slant_for_j1() {
    for beta in [0.3, 0.6, 1.2] {
        let w = wirtinger_field(&ruled::cylinder(beta).unwrap(), &Grid::new(16, 16), &j1()).unwrap();
        assert!(w.spread < 1e-9 && (w.mean - beta).abs() < 1e-9);
    }
    for psi in [0.3, 0.5, 1.0] {
        let w = wirtinger_field(&ruled::cone(psi).unwrap(), &Grid::new(16, 16), &j1()).unwrap();
        assert!(w.spread < 1e-9 && (w.mean - (FRAC_PI_2 - psi)).abs() < 1e-9);
    }
    for (r, h) in [(1.0, 0.5), (2.0, 1.0), (0.5, 3.0)] {
        let w = wirtinger_field(&ruled::tangent_developable(r, h).unwrap(), &Grid::new(16, 16), &j1()).unwrap();
        assert!(w.spread < 1e-9 && (w.mean - (h / r).atan()).abs() < 1e-9);
    }
    assert!(ruled::tangent_developable(0.0, 1.0).is_err());
}
