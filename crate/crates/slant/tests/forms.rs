use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};

use slant::cxstruct::{j0, j1, structure_from_zeta};
use slant::exterior::eta;
use slant::forms::{
    connection_forms, connection_forms_at, d_theta, exterior_derivative, exterior_derivative_of, lambda_form,
    loop_integral_psi, theta_form, theta_frame_at, Loop, OneFormField,
};
use slant::jets::{catalog, point_geometry, wirtinger_field, Grid, Immersion};
use slant::{ComplexStructure, Domain, GeomError};

fn params(p: &[(&str, f64)]) -> BTreeMap<String, f64> {
    p.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn build(id: &str, p: &[(&str, f64)]) -> Immersion {
    catalog::build(id, &params(p)).unwrap()
}

/// Catalog entries that are proper slant for their recorded structure.
fn proper_slant_entries() -> Vec<(&'static str, Immersion, ComplexStructure)> {
    let mut out = Vec::new();
    for e in catalog::entries().iter().filter(|e| e.ambient_dim == 4) {
        let Some(j) = e.structure4(&e.defaults()).unwrap() else { continue };
        let imm = catalog::build(e.id, &e.defaults()).unwrap();
        let w = wirtinger_field(&imm, &Grid::new(4, 4), &j).unwrap();
        if w.slant && w.mean > 1e-6 && (w.mean - FRAC_PI_2).abs() > 1e-6 {
            out.push((e.id, imm, j));
        }
    }
    out
}

/// ex2.6 with p = q = 1 is complex for J1; use a structure at angle β from it.
fn ex26_complex_case(beta: f64) -> (Immersion, ComplexStructure) {
    let imm = build("ex2.6", &[("p", 1.0), ("q", 1.0)]);
    let zeta = (eta(1).scale(beta.cos()) + eta(2).scale(beta.sin())).scale(SQRT_2);
    (imm, structure_from_zeta(&zeta).unwrap())
}

#[test]
fn proper_slant_fixture_list_is_complete() {
    let ids: Vec<&str> = proper_slant_entries().iter().map(|e| e.0).collect();
    for id in ["ex2.1", "ex2.2", "ex2.3", "ex2.4", "ex2.5", "ex2.6", "ex3.2", "helical-cylinder", "cylinder", "cone", "tandev"] {
        assert!(ids.contains(&id), "{id} missing from {ids:?}");
    }
}

#[test]
fn connection_forms_vanish_on_a_plane() {
    let imm = build("ex2.1", &[("alpha", 0.8)]);
    for c in connection_forms(&imm, &j0(), &Grid::new(5, 5)).unwrap() {
        for a in c.omega.iter().flatten().flatten() {
            assert!(a.abs() < 1e-10);
        }
    }
}

#[test]
fn ex24_weingarten_matches_second_fundamental_form() {
    let imm = build("ex2.4", &[("k", 1.0)]);
    for c in connection_forms(&imm, &j0(), &Grid::new(8, 8)).unwrap() {
        assert!(c.weingarten < 1e-8);
        let pg = point_geometry(&imm, c.u, c.v, &j0()).unwrap();
        let e3 = nalgebra::Vector4::from(c.frame[2]);
        let h11 = pg.hvec[0][0].dot(&e3);
        assert!((c.omega[0][2][0] - h11).abs() < 1e-8);
    }
}

#[test]
fn connection_form_identities_on_every_proper_slant_surface() {
    for (id, imm, j) in proper_slant_entries() {
        for c in connection_forms(&imm, &j, &Grid::new(8, 8)).unwrap() {
            assert!(c.antisymmetry < 1e-8, "{id}: {}", c.antisymmetry);
            assert!(c.weingarten < 1e-6, "{id}: {}", c.weingarten);
            assert!(c.normal_relation < 1e-6, "{id}: {}", c.normal_relation);
            assert!(c.symmetry < 1e-7, "{id}: {}", c.symmetry);
        }
    }
}

#[test]
fn theta_dual_paths_agree() {
    for (id, imm, j) in proper_slant_entries() {
        let t = theta_form(&imm, &j, &Grid::new(12, 12)).unwrap();
        assert!(t.dual_residual < 1e-6, "{id}: {}", t.dual_residual);
        assert_eq!(t.tolerance, 1e-6);
    }
}

#[test]
fn theta_vanishes_on_minimal_slant_surface() {
    let imm = build("ex2.2", &[("alpha", 0.9)]);
    let j = slant::cxstruct::j_alpha(0.9);
    let t = theta_form(&imm, &j, &Grid::new(10, 10)).unwrap();
    for c in &t.form.coeffs {
        assert!(c[0].abs() < 1e-12 && c[1].abs() < 1e-12);
    }
}

#[test]
fn ex24_theta_has_no_e1_component() {
    let imm = build("ex2.4", &[("k", 1.0)]);
    for (u, v) in Grid::new(8, 8).nodes(&imm.domain) {
        let t = theta_frame_at(&imm, &j0(), u, v).unwrap();
        assert!(t[0].abs() < 1e-12);
        assert!(t[1].abs() > 0.1);
    }
}

#[test]
fn ex23_theta_magnitude_is_twice_mean_curvature() {
    let imm = build("ex2.3", &[("k", 1.0)]);
    for (u, v) in Grid::new(8, 8).nodes(&imm.domain) {
        let t = theta_frame_at(&imm, &j0(), u, v).unwrap();
        let h = (-u).exp() * FRAC_1_SQRT_2;
        assert!((t[0].hypot(t[1]) - 2.0 * h).abs() < 1e-10);
    }
}

#[test]
fn exterior_derivative_of_affine_forms() {
    let domain = Domain::new(-1.0, 2.0, 0.0, 1.0);
    let grid = Grid::new(7, 5);
    let field = |f: &dyn Fn(f64, f64) -> [f64; 2]| OneFormField {
        domain,
        grid: grid.clone(),
        coeffs: grid.nodes(&domain).into_iter().map(|(u, v)| f(u, v)).collect(),
    };
    let du = exterior_derivative(&field(&|_, _| [1.0, 0.0]));
    assert!(du.max_abs() < 1e-14);
    let udv = exterior_derivative(&field(&|u, _| [0.0, u]));
    for c in &udv.cells {
        assert!((c.2 - 1.0).abs() < 1e-12);
    }
    let mixed = exterior_derivative(&field(&|u, v| [2.0 * v + 3.0, -u + 1.0]));
    for c in &mixed.cells {
        assert!((c.2 + 3.0).abs() < 1e-12);
    }
    let q = exterior_derivative_of(&domain, &grid, |u, v| Ok([0.0, u * u * v])).unwrap();
    for (u, v, c) in &q.cells {
        // d(u²v dv) = 2uv du∧dv; cell average of 2uv is exact at the midpoint.
        assert!((c - 2.0 * u * v).abs() < 1e-12);
    }
}

#[test]
fn d_theta_vanishes_on_proper_slant_surfaces() {
    for (id, imm, j) in proper_slant_entries() {
        let d = d_theta(&imm, &j, &Grid::new(16, 16)).unwrap();
        assert!(d.max_abs() <= 1e-5, "{id}: {}", d.max_abs());
    }
    let (imm, j) = ex26_complex_case(0.7);
    assert!(d_theta(&imm, &j, &Grid::new(16, 16)).unwrap().max_abs() <= 1e-5);
}

#[test]
fn lambda_values_and_parallel_p() {
    let ex24 = build("ex2.4", &[("k", 1.0)]);
    let l = lambda_form(&ex24, &j0(), &Grid::new(12, 12)).unwrap();
    for s in &l.samples {
        assert!((s.lambda_e12 + FRAC_1_SQRT_2).abs() < 1e-12);
    }
    assert!(l.max_nabla_p < 1e-6 && l.max_d_lambda < 1e-6);

    let ex23 = build("ex2.3", &[("k", 1.0)]);
    let l = lambda_form(&ex23, &j0(), &Grid::new(12, 12)).unwrap();
    for s in &l.samples {
        assert!((s.lambda_e12.abs() - FRAC_1_SQRT_2).abs() < 1e-12);
    }
    assert!(l.max_nabla_p < 1e-6);

    let torus = build("torus", &[]);
    let l = lambda_form(&torus, &j1(), &Grid::new(12, 12)).unwrap();
    for s in &l.samples {
        assert!(s.lambda_e12.abs() < 1e-14 && s.chart_coeff.abs() < 1e-14);
    }

    for (id, imm, j) in proper_slant_entries() {
        let l = lambda_form(&imm, &j, &Grid::new(8, 8)).unwrap();
        let w = wirtinger_field(&imm, &Grid::new(4, 4), &j).unwrap();
        assert!(l.max_nabla_p < 1e-6, "{id}: {}", l.max_nabla_p);
        assert!(l.max_d_lambda < 1e-6, "{id}");
        assert!((l.min_abs_lambda - w.mean.cos()).abs() < 1e-9, "{id}");
    }
}

fn period_loop(imm: &Immersion) -> Loop {
    let dir = if imm.periods[0].dir == slant::jets::Direction::U { "period-u" } else { "period-v" };
    Loop::parse(dir, &imm.domain).unwrap()
}

#[test]
fn period_loops_give_integers() {
    let cases: [(&str, &[(&str, f64)], f64); 7] = [
        ("ex2.3", &[("k", 1.0)], 2.0),
        ("ex2.4", &[("k", 1.0)], 1.0),
        ("ex2.5", &[], 1.0),
        ("ex2.6", &[("p", 1.0), ("q", 2.0)], -3.0),
        ("ex3.2", &[("k", 1.0)], 1.0),
        ("cylinder", &[], 1.0),
        ("cone", &[], 1.0),
    ];
    for (id, p, expect) in cases {
        let e = catalog::lookup(id).unwrap();
        let mut pp = e.defaults();
        pp.extend(params(p));
        let imm = catalog::build(id, &pp).unwrap();
        let j = e.structure4(&pp).unwrap().unwrap();
        let lp = period_loop(&imm);
        let coarse = loop_integral_psi(&imm, &j, &lp, 64).unwrap();
        let fine = loop_integral_psi(&imm, &j, &lp, 4096).unwrap();
        assert!(fine.distance <= 1e-4, "{id}: {}", fine.value);
        assert_eq!(fine.nearest_integer, expect, "{id}");
        assert!(fine.distance <= coarse.distance + 1e-12, "{id}");
        assert!(fine.closure <= 1e-9);
        assert!((fine.value_sqrt2_normalization * SQRT_2 - fine.value).abs() < 1e-14);
    }
}

#[test]
fn ex26_complex_case_loop_is_zero() {
    for beta in [0.3, 0.7, 1.2] {
        let (imm, j) = ex26_complex_case(beta);
        let r = loop_integral_psi(&imm, &j, &period_loop(&imm), 4096).unwrap();
        assert!((r.theta - beta).abs() < 1e-9);
        assert_eq!(r.nearest_integer, 0.0);
        assert!(r.distance < 1e-4);
    }
}

#[test]
fn contractible_loops_integrate_to_zero() {
    for (id, imm, j) in proper_slant_entries() {
        for spec in ["square", "circle"] {
            let lp = Loop::parse(spec, &imm.domain).unwrap();
            let r = loop_integral_psi(&imm, &j, &lp, 4096).unwrap();
            assert!(r.value.abs() < 1e-6, "{id} {spec}: {}", r.value);
        }
    }
}

#[test]
fn expression_loop_matches_named_circle() {
    let imm = build("ex2.4", &[("k", 1.0)]);
    let (cu, cv) = imm.domain.center();
    let p = params(&[("cu", cu), ("cv", cv)]);
    let lp = Loop::from_exprs("cu + 0.3*cos(t)", "cv + 0.3*sin(t)", 0.0, 2.0 * std::f64::consts::PI, p).unwrap();
    let named = Loop::parse(&format!("circle@{cu},{cv},0.3"), &imm.domain).unwrap();
    let a = loop_integral_psi(&imm, &j0(), &lp, 1024).unwrap();
    let b = loop_integral_psi(&imm, &j0(), &named, 1024).unwrap();
    assert!((a.value - b.value).abs() < 1e-14);
}

#[test]
fn open_loops_and_bad_specs_are_rejected() {
    let imm = build("ex2.4", &[("k", 1.0)]);
    let lp = Loop::from_exprs("0.1*t", "t", 0.0, 1.0, BTreeMap::new()).unwrap();
    match loop_integral_psi(&imm, &j0(), &lp, 64) {
        Err(GeomError::OpenLoop(gap)) => assert!(gap > 1e-9),
        other => panic!("expected open loop, got {other:?}"),
    }
    assert!(Loop::parse("spiral", &imm.domain).is_err());
    assert!(Loop::parse("square@1,2", &imm.domain).is_err());
    // ex2.4 declares no u-period.
    let pu = Loop::parse("period-u", &imm.domain).unwrap();
    assert!(loop_integral_psi(&imm, &j0(), &pu, 64).is_err());
    // A loop leaving the domain.
    let big = Loop::parse("circle@0,3,5", &imm.domain).unwrap();
    assert!(matches!(loop_integral_psi(&imm, &j0(), &big, 64), Err(GeomError::Domain { .. })));
}

#[test]
fn forms_refuse_degenerate_angles() {
    let torus = build("torus", &[]);
    assert!(theta_form(&torus, &j1(), &Grid::new(4, 4)).is_err());
    let holo = build("holo-j1", &[]);
    assert!(connection_forms_at(&holo, &j1(), 0.1, 0.1, 1e-3).is_err());
}
