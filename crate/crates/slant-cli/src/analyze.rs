//! The `analyze` and `detect` reports.

use std::f64::consts::FRAC_PI_2;

use serde_json::{json, Value};
use slant::forms::{connection_forms, d_theta, lambda_form, loop_integral_psi, theta_form, Loop};
use slant::gaussmap::{detect_slant_structures, gauss_jacobians, SlantDetection, MIN_DETECTION_SAMPLES};
use slant::jets::{
    point_geometry, slant_operator_checks, wirtinger_field, wirtinger_field_general, Direction, Grid, WirtingerStats,
};
use slant::{tol, ComplexStructure, Immersion};

use crate::source::{CliResult, Source, Structure};

/// Failed checks collected while a report is assembled.
#[derive(Default)]
pub struct Violations(pub Vec<String>);

impl Violations {
    /// Record `name` when `value` exceeds `tolerance` (or is not finite).
    fn check(&mut self, name: &str, value: f64, tolerance: f64) -> Value {
        let ok = value <= tolerance;
        if !ok {
            self.0.push(format!("{name}: {value:e} exceeds {tolerance:e}"));
        }
        json!({"value": value, "tolerance": tolerance, "ok": ok})
    }
}

/// One row of the per-point table.
pub struct PointRow {
    pub u: f64,
    pub v: f64,
    pub gauss: f64,
    pub normal_curvature: f64,
    pub h_norm: f64,
    pub wirtinger: f64,
    pub alpha: f64,
    pub identity_residual: f64,
}

pub struct Analysis {
    pub report: Value,
    pub rows: Vec<PointRow>,
    pub violations: Violations,
}

pub fn is_proper(w: &WirtingerStats) -> bool {
    w.slant && w.mean > tol::DEGENERATE_ANGLE && (FRAC_PI_2 - w.mean) > tol::DEGENERATE_ANGLE
}

fn extrema(xs: impl Iterator<Item = f64> + Clone) -> Value {
    let n = xs.clone().count().max(1) as f64;
    json!({
        "min": xs.clone().fold(f64::INFINITY, f64::min),
        "max": xs.clone().fold(f64::NEG_INFINITY, f64::max),
        "mean": xs.sum::<f64>() / n,
    })
}

pub fn analyze(src: &Source, grid: &Grid, steps: usize) -> CliResult<Analysis> {
    let mut viol = Violations::default();
    let mut report = json!({
        "command": "analyze",
        "source": src.describe(),
        "grid": {"spec": grid.to_string(), "nu": grid.nu, "nv": grid.nv},
        "structure": src.describe_structure(),
    });
    let j = match &src.structure {
        Structure::Four(j) => *j,
        Structure::General(m) => {
            let w = wirtinger_field_general(&src.imm, grid, m)?;
            report["wirtinger"] = serde_json::to_value(&w).expect("serializes");
            let why = format!("ambient dimension {}: only Wirtinger statistics apply", src.imm.ambient_dim);
            for key in ["curvature", "detection", "operator_checks", "forms", "identities"] {
                report[key] = json!({"skipped": why});
            }
            return Ok(finish(report, Vec::new(), viol));
        }
    };
    let imm = &src.imm;
    let w = wirtinger_field(imm, grid, &j)?;
    report["wirtinger"] = serde_json::to_value(&w).expect("serializes");

    let mut rows = Vec::with_capacity(grid.len());
    for (u, v) in grid.nodes(&imm.domain) {
        let pg = point_geometry(imm, u, v, &j)?;
        rows.push(PointRow {
            u,
            v,
            gauss: pg.gauss,
            normal_curvature: pg.normal_curvature,
            h_norm: pg.mean_curvature_norm(),
            wirtinger: pg.wirtinger,
            alpha: pg.alpha,
            identity_residual: pg.curvature_identity_residual(),
        });
    }
    let h = extrema(rows.iter().map(|r| r.h_norm));
    report["curvature"] = json!({
        "H_norm": h["mean"],
        "H_norm_extrema": h,
        "G": extrema(rows.iter().map(|r| r.gauss)),
        "G_D": extrema(rows.iter().map(|r| r.normal_curvature)),
        "points": rows.iter().map(|r| [r.u, r.v, r.gauss, r.normal_curvature, r.h_norm]).collect::<Vec<_>>(),
        "columns": ["u", "v", "G", "G_D", "H_norm"],
        "tolerance": 1e-9,
    });

    report["detection"] = if grid.len() >= MIN_DETECTION_SAMPLES {
        let det = detect_slant_structures(imm, grid)?;
        detection_json(imm, grid, &det, &mut viol)?
    } else {
        json!({"skipped": format!("detection needs at least {MIN_DETECTION_SAMPLES} grid samples")})
    };

    let mut identities = serde_json::Map::new();
    if w.slant {
        let worst = rows.iter().map(|r| r.identity_residual).fold(0.0, f64::max);
        identities.insert("curvature_identity".into(), viol.check("curvature_identity", worst, tol::CURVATURE_IDENTITY));
    } else {
        identities.insert("curvature_identity".into(), json!({"skipped": "not slant under the chosen structure"}));
    }
    let (mut jp, mut jm) = (0.0f64, 0.0f64);
    let (hu, hv) = grid.spacing(&imm.domain);
    let d = imm.domain;
    for g in gauss_jacobians(imm, grid, None)? {
        let inside = g.u > d.u.0 + 0.5 * hu && g.u < d.u.1 - 0.5 * hu && g.v > d.v.0 + 0.5 * hv && g.v < d.v.1 - 0.5 * hv;
        if inside {
            jp = jp.max((g.det_plus - 0.5 * (g.gauss + g.normal_curvature)).abs());
            jm = jm.max((g.det_minus - 0.5 * (g.gauss - g.normal_curvature)).abs());
        }
    }
    identities.insert("gauss_jacobian_plus".into(), viol.check("gauss_jacobian_plus", jp, tol::GAUSS_JACOBIAN));
    identities.insert("gauss_jacobian_minus".into(), viol.check("gauss_jacobian_minus", jm, tol::GAUSS_JACOBIAN));

    if w.slant {
        let oc = slant_operator_checks(imm, grid, &j)?;
        let mut v = serde_json::to_value(&oc).expect("serializes");
        v["q_check"] = viol.check("operator_q", oc.q_residual, oc.tolerance);
        report["operator_checks"] = v;
    } else {
        report["operator_checks"] = json!({"skipped": "not slant under the chosen structure"});
    }

    if is_proper(&w) {
        let (forms, conn) = forms_json(imm, &j, grid, steps, w.mean, &mut viol)?;
        report["forms"] = forms;
        for (k, v) in conn {
            identities.insert(k, v);
        }
    } else {
        report["forms"] = json!({"skipped": "needs a proper slant surface (angle strictly between 0 and pi/2)"});
    }
    report["identities"] = Value::Object(identities);
    Ok(finish(report, rows, viol))
}

fn finish(mut report: Value, rows: Vec<PointRow>, viol: Violations) -> Analysis {
    report["ok"] = json!(viol.0.is_empty());
    report["violations"] = json!(viol.0);
    Analysis {
        report,
        rows,
        violations: viol,
    }
}

type Named = Vec<(String, Value)>;

fn forms_json(
    imm: &Immersion,
    j: &ComplexStructure,
    grid: &Grid,
    steps: usize,
    theta: f64,
    viol: &mut Violations,
) -> CliResult<(Value, Named)> {
    let cf = connection_forms(imm, j, grid)?;
    let worst = |f: fn(&slant::forms::ConnectionForms) -> f64| cf.iter().map(f).fold(0.0, f64::max);
    let conn = vec![
        (
            "connection_antisymmetry".to_string(),
            viol.check("connection_antisymmetry", worst(|c| c.antisymmetry), tol::CONNECTION_ANTISYMMETRY),
        ),
        (
            "connection_weingarten".to_string(),
            viol.check("connection_weingarten", worst(|c| c.weingarten), tol::CONNECTION_WEINGARTEN),
        ),
        (
            "connection_normal_relation".to_string(),
            viol.check("connection_normal_relation", worst(|c| c.normal_relation), tol::CONNECTION_NORMAL),
        ),
        (
            "connection_symmetry".to_string(),
            viol.check("connection_symmetry", worst(|c| c.symmetry), tol::CONNECTION_SYMMETRY),
        ),
    ];
    let th = theta_form(imm, j, grid)?;
    let dth = d_theta(imm, j, grid)?.max_abs();
    let lam = lambda_form(imm, j, grid)?;
    let mut loops = Vec::new();
    for p in &imm.periods {
        let spec = match p.dir {
            Direction::U => "period-u",
            Direction::V => "period-v",
        };
        let r = loop_integral_psi(imm, j, &Loop::parse(spec, &imm.domain)?, steps)?;
        loops.push(json!({
            "loop": spec,
            "report": r,
            "integrality": viol.check(&format!("{spec} integrality"), r.distance, tol::PERIOD_INTEGRAL),
        }));
    }
    for spec in ["square", "circle"] {
        let r = loop_integral_psi(imm, j, &Loop::parse(spec, &imm.domain)?, steps)?;
        loops.push(json!({
            "loop": spec,
            "report": r,
            "contractible": viol.check(&format!("{spec} contractible"), r.value.abs(), tol::CONTRACTIBLE_INTEGRAL),
        }));
    }
    let forms = json!({
        "theta_dual": viol.check("theta_dual", th.dual_residual, th.tolerance),
        "d_theta": viol.check("d_theta", dth, tol::D_THETA),
        "lambda": {
            "min_abs_lambda_e12": lam.min_abs_lambda,
            "expected_abs_lambda_e12": theta.cos(),
            "nabla_p": viol.check("nabla_p", lam.max_nabla_p, lam.tolerance),
            "d_lambda": viol.check("d_lambda", lam.max_d_lambda, lam.tolerance),
            "tolerance": lam.tolerance,
        },
        "loops": loops,
        "steps": steps,
    });
    Ok((forms, conn))
}

/// Detection output with an independent Wirtinger verification per structure.
pub fn detection_json(imm: &Immersion, grid: &Grid, det: &SlantDetection, viol: &mut Violations) -> CliResult<Value> {
    let mut classes = serde_json::Map::new();
    for cd in [&det.plus, &det.minus] {
        let mut list = Vec::new();
        for d in &cd.structures {
            let w = wirtinger_field(imm, grid, &d.structure)?;
            let gap = (w.mean - d.wirtinger).abs().max(w.spread);
            list.push(json!({
                "structure": d.structure,
                "zeta_eta": slant::cxstruct::zeta_of(&d.structure).to_eta(),
                "alpha": d.alpha,
                "wirtinger": d.wirtinger,
                "residual": d.residual,
                "verification": {
                    "mean": w.mean,
                    "spread": w.spread,
                    "check": viol.check("detection verification", gap, tol::DETECTION_VERIFY),
                },
            }));
        }
        let key = match cd.class {
            slant::OrientationClass::Plus => "plus",
            slant::OrientationClass::Minus => "minus",
        };
        classes.insert(
            key.into(),
            json!({
                "fit": cd.fit,
                "every_structure": cd.every_structure,
                "structures": list,
            }),
        );
    }
    Ok(json!({
        "case": det.case,
        "count": det.count(),
        "doubly_slant": det.doubly_slant,
        "samples": det.samples,
        "classes": classes,
        "thresholds": {
            "singleton_spread": tol::SINGLETON_SPREAD,
            "circle_residual": tol::CIRCLE_RESIDUAL,
            "verification": tol::DETECTION_VERIFY,
        },
    }))
}

pub fn detect(src: &Source, grid: &Grid) -> CliResult<(Value, Violations)> {
    let mut viol = Violations::default();
    let det = detect_slant_structures(&src.imm, grid)?;
    let mut report = json!({
        "command": "detect",
        "source": src.describe(),
        "grid": {"spec": grid.to_string(), "nu": grid.nu, "nv": grid.nv},
        "detection": detection_json(&src.imm, grid, &det, &mut viol)?,
    });
    report["ok"] = json!(viol.0.is_empty());
    report["violations"] = json!(viol.0);
    Ok((report, viol))
}
