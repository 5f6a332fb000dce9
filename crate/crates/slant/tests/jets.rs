use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::{DVector, Matrix4, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slant::cxstruct::{j0, j1};
use slant::dsl::ImmersionConfig;
use slant::jets::{
    adapted_frame, catalog, jet_by_differences, point_geometry, slant_operator_checks, wirtinger_field, Grid,
    Immersion, PointGeometry,
};
use slant::ComplexStructure;

fn params(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn build(id: &str, p: &[(&str, f64)]) -> Immersion {
    catalog::build(id, &params(p)).unwrap()
}

fn structure(id: &str) -> ComplexStructure {
    let e = catalog::lookup(id).unwrap();
    e.structure4(&e.defaults()).unwrap().unwrap()
}

/// Four-dimensional catalog entries that carry a slant structure.
fn slant_entries() -> Vec<(&'static str, Immersion, ComplexStructure)> {
    catalog::entries()
        .iter()
        .filter(|e| e.ambient_dim == 4 && e.structure.is_some())
        .map(|e| (e.id, catalog::build(e.id, &e.defaults()).unwrap(), structure(e.id)))
        .collect()
}

fn dsl_ex24(k: f64) -> Immersion {
    let json = format!(
        r#"{{"name":"ex2.4-dsl","ambient_dim":4,"components":["u","k*cos(v)","v","k*sin(v)"],
            "params":{{"k":{k}}},"domain":[[-1,1],[0,6.283185307179586]]}}"#
    );
    Immersion::from_config(&ImmersionConfig::from_json(&json).unwrap()).unwrap()
}

fn dsl_ex23(k: f64) -> Immersion {
    let json = format!(
        r#"{{"name":"ex2.3-dsl","ambient_dim":4,
            "components":["exp(k*u)*cos(u)*cos(v)","exp(k*u)*sin(u)*cos(v)","exp(k*u)*cos(u)*sin(v)","exp(k*u)*sin(u)*sin(v)"],
            "params":{{"k":{k}}},"domain":[[-0.5,0.5],[0,6.283185307179586]]}}"#
    );
    Immersion::from_config(&ImmersionConfig::from_json(&json).unwrap()).unwrap()
}

fn max_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).amax()
}

#[test]
fn ex24_jet_at_origin() {
    let j = build("ex2.4", &[("k", 1.0)]).jet_at(0.0, 0.0).unwrap();
    assert!(max_diff(&j.xu, &DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0])) < 1e-15);
    assert!(max_diff(&j.xv, &DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0])) < 1e-15);
    assert!(max_diff(&j.xvv, &DVector::from_vec(vec![0.0, -1.0, 0.0, 0.0])) < 1e-15);
    assert!(j.xuu.amax() == 0.0 && j.xuv.amax() == 0.0);
}

#[test]
fn affine_plane_has_zero_second_derivatives() {
    let imm = build("ex2.1", &[("alpha", 0.7)]);
    for (u, v) in [(0.0, 0.0), (0.4, -0.3)] {
        let j = imm.jet_at(u, v).unwrap();
        assert_eq!(j.xuu.amax(), 0.0);
        assert_eq!(j.xuv.amax(), 0.0);
        assert_eq!(j.xvv.amax(), 0.0);
    }
}

#[test]
fn dsl_copies_match_catalog_jets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in [0.5, 1.0, 2.0] {
        let (c24, d24) = (build("ex2.4", &[("k", k)]), dsl_ex24(k));
        let (c23, d23) = (build("ex2.3", &[("k", k)]), dsl_ex23(k));
        for _ in 0..25 {
            let u = rng.gen_range(-0.5..0.5);
            let v = rng.gen_range(0.0..6.28);
            assert!(c24.jet_at(u, v).unwrap().max_abs_diff(&d24.jet_at(u, v).unwrap()) < 1e-13);
            assert!(c23.jet_at(u, v).unwrap().max_abs_diff(&d23.jet_at(u, v).unwrap()) < 1e-13);
        }
    }
}

#[test]
fn catalog_jets_agree_with_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for e in catalog::entries() {
        let imm = catalog::build(e.id, &e.defaults()).unwrap();
        let d = imm.domain;
        for _ in 0..5 {
            let u = d.u.0 + (d.u.1 - d.u.0) * rng.gen_range(0.1..0.9);
            let v = d.v.0 + (d.v.1 - d.v.0) * rng.gen_range(0.1..0.9);
            let exact = imm.jet_at(u, v).unwrap();
            let fd = jet_by_differences(&imm, u, v, 1e-3).unwrap();
            assert!(exact.max_abs_diff(&fd) < 1e-6, "{} at ({u}, {v}): {}", e.id, exact.max_abs_diff(&fd));
        }
    }
}

#[test]
fn out_of_domain_and_singular_points_are_rejected() {
    let imm = build("ex2.4", &[("k", 1.0)]);
    assert!(imm.jet_at(5.0, 0.0).is_err());
    let cone = Immersion::analytic("bad", 4, slant::Domain::new(-1.0, 1.0, -1.0, 1.0), |u, v| {
        slant::Jet::from_components(&[
            [u, 1.0, 0.0, 0.0, 0.0, 0.0],
            [u, 1.0, 0.0, 0.0, 0.0, 0.0],
            [v * u, v, u, 0.0, 1.0, 0.0],
            [0.0; 6],
        ])
    });
    assert!(cone.jet_at(0.0, 0.0).is_err());
}

/// Acceptance-style fixture values for the flat slant torus family.
#[test]
fn ex24_fixture_values() {
    for k in [0.5, 1.0, 2.0] {
        let imm = build("ex2.4", &[("k", k)]);
        let theta = (1.0 / (1.0 + k * k).sqrt()).acos();
        let h = k / (2.0 * (1.0 + k * k));
        for (u, v) in Grid::new(8, 8).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j0()).unwrap();
            assert!((pg.wirtinger - theta).abs() < 1e-9);
            assert!((pg.mean_curvature_norm() - h).abs() < 1e-9);
            assert!(pg.gauss.abs() < 1e-9 && pg.normal_curvature.abs() < 1e-9);
        }
        let w = wirtinger_field(&imm, &Grid::new(16, 16), &j0()).unwrap();
        assert!(w.slant && w.spread < 1e-9);
        assert!((w.mean - theta).abs() < 1e-9);
    }
}

#[test]
fn ex23_fixture_values() {
    for k in [0.5, 1.0, 2.0] {
        let imm = build("ex2.3", &[("k", k)]);
        let theta = (k / (1.0 + k * k).sqrt()).acos();
        for i in 0..25 {
            let u = -0.5 + i as f64 / 24.0;
            let pg = point_geometry(&imm, u, 1.0, &j0()).unwrap();
            assert!((pg.wirtinger - theta).abs() < 1e-8);
            let h = (-k * u).exp() / (1.0 + k * k).sqrt();
            assert!((pg.mean_curvature_norm() - h).abs() < 1e-8, "k {k} u {u}");
        }
    }
    let w = wirtinger_field(&build("ex2.3", &[("k", 2.0)]), &Grid::new(16, 16), &j0()).unwrap();
    assert!((w.mean - (2.0 / 5f64.sqrt()).acos()).abs() < 1e-9);
}

#[test]
fn round_sphere_values() {
    for r in [0.5, 1.0, 2.0] {
        let imm = build("sphere", &[("r", r)]);
        let pg = point_geometry(&imm, 0.4, 1.1, &j1()).unwrap();
        assert!((pg.gauss - 1.0 / (r * r)).abs() < 1e-10);
        assert!((pg.mean_curvature_norm() - 1.0 / r).abs() < 1e-10);
        assert!(pg.normal_curvature.abs() < 1e-10);
    }
    let imm = build("sphere", &[]);
    for j in [j0(), j1()] {
        let w = wirtinger_field(&imm, &Grid::new(16, 16), &j).unwrap();
        assert!(w.spread > 0.1 && !w.slant);
    }
}

#[test]
fn frames_are_orthonormal_positive_and_h_symmetric() {
    for (id, imm, j) in slant_entries() {
        for (u, v) in Grid::new(6, 6).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j).unwrap();
            let f = pg.frame();
            for a in 0..4 {
                for b in 0..4 {
                    let d = f[a].dot(&f[b]) - if a == b { 1.0 } else { 0.0 };
                    assert!(d.abs() < 1e-10, "{id}");
                }
            }
            assert!(Matrix4::from_columns(&f).determinant() > 0.0, "{id}");
            for r in 0..2 {
                assert_eq!(pg.h[r][0][1], pg.h[r][1][0], "{id}");
            }
            let h = (pg.hvec[0][0] + pg.hvec[1][1]) * 0.5;
            assert!((h - pg.mean_curvature).norm() < 1e-12, "{id}");
        }
    }
}

#[test]
fn gauss_equals_normal_curvature_on_slant_surfaces() {
    let grid = Grid::new(64, 64);
    for (id, imm, j) in slant_entries() {
        for (u, v) in grid.nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j).unwrap();
            let r = pg.curvature_identity_residual();
            assert!(r <= 1e-7 * (1.0 + pg.gauss.abs()), "{id} at ({u}, {v}): {r:e}");
        }
    }
}

#[test]
fn block_matrix_squares_to_minus_identity() {
    for (id, imm, j) in slant_entries() {
        for (u, v) in Grid::new(8, 8).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j).unwrap();
            let b = pg.block_matrix();
            assert!((b * b + Matrix4::identity()).amax() < 1e-10, "{id}");
            let f = Matrix4::from_columns(&pg.frame());
            assert!((f.transpose() * j.matrix() * f - b).amax() < 1e-10, "{id}");
        }
    }
}

#[test]
fn p_scales_every_tangent_vector_by_cos_theta() {
    for (id, imm, j) in slant_entries() {
        let w = wirtinger_field(&imm, &Grid::new(8, 8), &j).unwrap();
        assert!(w.slant, "{id}");
        let c = w.mean.cos();
        for (u, v) in Grid::new(8, 8).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j).unwrap();
            for k in 0..12 {
                let phi = k as f64 * 0.5;
                let x = Vector2::new(phi.cos(), phi.sin());
                assert!(((pg.p * x).norm() - c).abs() < 1e-9, "{id}");
            }
            assert!((pg.p * pg.p + nalgebra::Matrix2::identity() * c * c).amax() < 1e-9, "{id}");
        }
    }
}

fn mirror_x4(imm: &Immersion) -> Immersion {
    let inner = imm.clone();
    Immersion::analytic("mirror", 4, imm.domain, move |u, v| {
        let mut j = inner.eval_raw(u, v).unwrap();
        for d in [&mut j.x, &mut j.xu, &mut j.xv, &mut j.xuu, &mut j.xuv, &mut j.xvv] {
            d[3] = -d[3];
        }
        j
    })
}

fn invariants(pg: &PointGeometry) -> [f64; 4] {
    [pg.gauss, pg.normal_curvature.powi(2), pg.mean_curvature_norm(), pg.wirtinger_samples.iter().sum::<f64>()]
}

#[test]
fn invariants_are_gauge_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let ids = ["ex2.3", "ex2.4", "sphere", "catenoid-e3", "ex3.1-whitney", "holo-j1"];
    for id in ids {
        let imm = build(id, &[]);
        for (u, v) in Grid::new(4, 4).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j1()).unwrap();
            let base = invariants(&pg);
            let a = rng.gen_range(-3.0..3.0);
            let b = rng.gen_range(-3.0..3.0);
            let rot = pg.rotated(a, b);
            let got = invariants(&rot);
            assert!((got[0] - base[0]).abs() < 1e-9, "{id}");
            assert!((got[1] - base[1]).abs() < 1e-9, "{id}");
            assert!((got[2] - base[2]).abs() < 1e-9, "{id}");
            assert!((rot.normal_curvature - pg.normal_curvature).abs() < 1e-9, "{id}");
            // cos θ = |PX| on the unit tangent circle, shifted by the rotation.
            for k in 0..8 {
                let phi = k as f64 * 0.4;
                assert!((rot.wirtinger_at(phi - a).cos() - pg.wirtinger_at(phi).cos()).abs() < 1e-12, "{id}");
            }
            // Reversing the surface orientation keeps (e1, e2, e3, e4) positive and G^D fixed.
            let refl = pg.reflected();
            assert!((refl.gauss - pg.gauss).abs() < 1e-9, "{id}");
            assert!((refl.normal_curvature - pg.normal_curvature).abs() < 1e-9, "{id}");
            // Reversing the ambient orientation flips G^D.
            let mirrored = mirror_x4(&imm);
            let pm = point_geometry(&mirrored, u, v, &j1()).unwrap();
            assert!((pm.gauss - pg.gauss).abs() < 1e-9, "{id}");
            assert!((pm.normal_curvature + pg.normal_curvature).abs() < 1e-9, "{id}");
        }
    }
}

#[test]
fn operator_checks_examples() {
    let grid = Grid::new(16, 16);
    let ex24 = build("ex2.4", &[("k", 1.0)]);
    let c = slant_operator_checks(&ex24, &grid, &j0()).unwrap();
    assert!(c.a_f_symmetry < 1e-8);
    assert!(!c.austere);
    assert!(c.q_residual < 1e-9);

    let holo = build("holo-j1", &[]);
    let c = slant_operator_checks(&holo, &grid, &j1()).unwrap();
    assert!(c.austere);
    assert!(c.a_f_symmetry < 1e-8);

    for (id, imm, j) in slant_entries() {
        let c = slant_operator_checks(&imm, &grid, &j).unwrap();
        assert!(c.a_f_symmetry < 1e-8, "{id}: {}", c.a_f_symmetry);
    }
}

#[test]
fn adapted_frame_identities() {
    for (id, imm, j) in slant_entries() {
        let w = wirtinger_field(&imm, &Grid::new(4, 4), &j).unwrap();
        let theta = w.mean;
        let proper = theta > 1e-6 && (theta - FRAC_PI_2).abs() > 1e-6;
        for (u, v) in Grid::new(6, 6).nodes(&imm.domain) {
            let pg = point_geometry(&imm, u, v, &j).unwrap();
            match adapted_frame(&pg) {
                Ok(f) => {
                    assert!(proper, "{id}");
                    assert!(f.orthonormality_error() < 1e-9, "{id}");
                    assert!(f.identity_error(&j) < 1e-9, "{id}");
                    assert!((f.frame[0] - pg.tangent[0]).norm() < 1e-15, "{id}");
                    assert!((f.gauss - pg.gauss).abs() < 1e-9, "{id}");
                    // Symmetry h^4_{1k} = h^3_{2k}.
                    for k in 0..2 {
                        assert!((f.h[1][0][k] - f.h[0][1][k]).abs() < 1e-7, "{id}");
                    }
                }
                Err(e) => {
                    assert!(!proper, "{id}: {e}");
                }
            }
        }
    }
}

#[test]
fn adapted_frame_refuses_degenerate_angles() {
    let torus = build("torus", &[]);
    let pg = point_geometry(&torus, 0.3, 0.3, &j1()).unwrap();
    let e = adapted_frame(&pg).unwrap_err().to_string();
    assert!(e.contains("totally real"), "{e}");
    let holo = build("holo-j1", &[]);
    let pg = point_geometry(&holo, 0.3, 0.3, &j1()).unwrap();
    let e = adapted_frame(&pg).unwrap_err().to_string();
    assert!(e.contains("complex"), "{e}");
}

#[test]
fn ex23_adapted_frame_starts_from_x_u() {
    let imm = build("ex2.3", &[("k", 1.0)]);
    for (u, v) in Grid::new(5, 5).nodes(&imm.domain) {
        let pg = point_geometry(&imm, u, v, &j0()).unwrap();
        let f = adapted_frame(&pg).unwrap();
        let xu = imm.jet_at(u, v).unwrap().xu;
        let e1 = nalgebra::Vector4::from_iterator(xu.iter().cloned()).normalize();
        assert!((f.frame[0] - e1).norm() < 1e-14);
        assert!((f.theta - FRAC_PI_4).abs() < 1e-12);
        assert!(f.identity_error(&j0()) < 1e-9);
    }
}
