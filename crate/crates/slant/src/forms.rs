//! Connection forms of the adapted slant frame, the canonical 1-form Θ and
//! its normalization Ψ, the 2-form Λ(X, Y) = <X, PY>, and numerical
//! exterior derivatives by cell circulation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Matrix4;
use serde::Serialize;

use crate::cxstruct::ComplexStructure;
use crate::dsl::{self, Env, Expr, Jet2, Var};
use crate::error::{GeomError, Result};
use crate::exterior::Vec4;
use crate::jets::{self, adapted_frame, AdaptedSlantFrame, Direction, Domain, Grid, Immersion, PointGeometry};
use crate::tol;

/// Largest difference step used for frame differencing.
pub const MAX_STEP: f64 = 1e-3;

/// Differencing step for a grid: the smaller of the grid spacing and `MAX_STEP`.
pub fn form_step(domain: &Domain, grid: &Grid) -> f64 {
    let (hu, hv) = grid.spacing(domain);
    hu.min(hv).min(MAX_STEP)
}

fn check4(imm: &Immersion) -> Result<()> {
    if imm.ambient_dim != 4 {
        return Err(GeomError::AmbientDim {
            got: imm.ambient_dim,
            expected: 4,
        });
    }
    Ok(())
}

fn geometry_raw(imm: &Immersion, u: f64, v: f64, j: &ComplexStructure) -> Result<PointGeometry> {
    let jet = imm.eval_raw(u, v)?;
    jets::check_immersion(&jet, u, v)?;
    Ok(jets::geometry_from_jet(u, v, jet, j))
}

fn adapted_raw(imm: &Immersion, u: f64, v: f64, j: &ComplexStructure) -> Result<(PointGeometry, AdaptedSlantFrame)> {
    let pg = geometry_raw(imm, u, v, j)?;
    let fr = adapted_frame(&pg)?;
    Ok((pg, fr))
}

/// Richardson-extrapolated central difference of a frame-valued function.
fn diff_frame<F>(f: F, h: f64) -> Result<[Vec4; 4]>
where
    F: Fn(f64) -> Result<[Vec4; 4]>,
{
    let d = |h: f64| -> Result<[Vec4; 4]> {
        let p = f(h)?;
        let m = f(-h)?;
        Ok(std::array::from_fn(|a| (p[a] - m[a]) / (2.0 * h)))
    };
    let a = d(h)?;
    let b = d(h / 2.0)?;
    Ok(std::array::from_fn(|k| (b[k] * 4.0 - a[k]) / 3.0))
}

fn diff_matrix<F>(f: F, h: f64) -> Result<Matrix4<f64>>
where
    F: Fn(f64) -> Result<Matrix4<f64>>,
{
    let d = |h: f64| -> Result<Matrix4<f64>> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

/// Connection forms of the adapted frame (e₁, e₂, e₃ = e₁*, e₄ = e₂*) at a
/// point, with the identities they satisfy on a slant surface.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionForms {
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub frame: [[f64; 4]; 4],
    /// omega[a][b][i] = ω_a^b(e_i) = <D_{e_i} e_a, e_b>.
    pub omega: [[[f64; 2]; 4]; 4],
    /// max |ω_a^b + ω_b^a|.
    pub antisymmetry: f64,
    /// max |ω_i^r(e_k) − h^r_{ik}|.
    pub weingarten: f64,
    /// max_k |ω₃⁴(e_k) − ω₁²(e_k) + cot θ tr h^{k+2}|.
    pub normal_relation: f64,
    /// max_k |ω₁⁴(e_k) − ω₂³(e_k)|.
    pub symmetry: f64,
}

impl ConnectionForms {
    /// Θ(e_k) = ω₁³(e_k) + ω₂⁴(e_k).
    pub fn theta_frame(&self) -> [f64; 2] {
        [0, 1].map(|k| self.omega[0][2][k] + self.omega[1][3][k])
    }
}

pub fn connection_forms_at(imm: &Immersion, j: &ComplexStructure, u: f64, v: f64, step: f64) -> Result<ConnectionForms> {
    check4(imm)?;
    let (pg, fr) = adapted_raw(imm, u, v, j)?;
    let frame_at = |a: f64, b: f64| adapted_raw(imm, a, b, j).map(|(_, f)| f.frame);
    let du = diff_frame(|h| frame_at(u + h, v), step)?;
    let dv = diff_frame(|h| frame_at(u, v + h), step)?;
    // e1 is x_u/|x_u| and e2 = ±(Gram–Schmidt of x_v), so convert the chart
    // derivatives with the tangent-frame coefficients.
    let c = pg.coeffs;
    let s = fr.sign;
    let coef = [c[0], [s * c[1][0], s * c[1][1]]];
    let mut omega = [[[0.0; 2]; 4]; 4];
    for (i, ci) in coef.iter().enumerate() {
        for a in 0..4 {
            let d = du[a] * ci[0] + dv[a] * ci[1];
            for b in 0..4 {
                omega[a][b][i] = d.dot(&fr.frame[b]);
            }
        }
    }
    let mut antisymmetry: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for i in 0..2 {
                antisymmetry = antisymmetry.max((omega[a][b][i] + omega[b][a][i]).abs());
            }
        }
    }
    let mut weingarten: f64 = 0.0;
    for r in 0..2 {
        for i in 0..2 {
            for k in 0..2 {
                weingarten = weingarten.max((omega[i][r + 2][k] - fr.h[r][i][k]).abs());
            }
        }
    }
    let cot = 1.0 / fr.theta.tan();
    let mut normal_relation: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    for k in 0..2 {
        let tr = fr.h[k][0][0] + fr.h[k][1][1];
        normal_relation = normal_relation.max((omega[2][3][k] - omega[0][1][k] + cot * tr).abs());
        symmetry = symmetry.max((omega[0][3][k] - omega[1][2][k]).abs());
    }
    Ok(ConnectionForms {
        u,
        v,
        theta: fr.theta,
        frame: fr.frame.map(|e| [e[0], e[1], e[2], e[3]]),
        omega,
        antisymmetry,
        weingarten,
        normal_relation,
        symmetry,
    })
}

pub fn connection_forms(imm: &Immersion, j: &ComplexStructure, grid: &Grid) -> Result<Vec<ConnectionForms>> {
    let step = form_step(&imm.domain, grid);
    grid.nodes(&imm.domain)
        .into_iter()
        .map(|(u, v)| connection_forms_at(imm, j, u, v, step))
        .collect()
}

/// a du + b dv sampled at grid nodes (node order as `Grid::nodes`).
#[derive(Clone, Debug, Serialize)]
pub struct OneFormField {
    pub domain: Domain,
    pub grid: Grid,
    pub coeffs: Vec<[f64; 2]>,
}

/// c du∧dv per grid cell, cell (i, j) spanning nodes i..=i+1, j..=j+1.
#[derive(Clone, Debug, Serialize)]
pub struct TwoFormField {
    pub domain: Domain,
    pub grid: Grid,
    /// (u, v) at the cell centre and the coefficient.
    pub cells: Vec<(f64, f64, f64)>,
}

impl TwoFormField {
    pub fn max_abs(&self) -> f64 {
        self.cells.iter().map(|c| c.2.abs()).fold(0.0, f64::max)
    }
}

/// Θ(X) = −2 csc θ <JH, X> at a point, as chart coefficients (Θ(x_u), Θ(x_v)).
pub fn theta_at(imm: &Immersion, j: &ComplexStructure, u: f64, v: f64) -> Result<[f64; 2]> {
    check4(imm)?;
    let (pg, fr) = adapted_raw(imm, u, v, j)?;
    Ok(theta_chart(&pg, &fr))
}

fn theta_chart(pg: &PointGeometry, fr: &AdaptedSlantFrame) -> [f64; 2] {
    let jh = pg.j.apply(&pg.mean_curvature);
    let k = -2.0 / fr.theta.sin();
    let xu = jets::v4(&pg.jet.xu);
    let xv = jets::v4(&pg.jet.xv);
    [k * jh.dot(&xu), k * jh.dot(&xv)]
}

/// Θ in the adapted frame, (Θ(e₁), Θ(e₂)).
pub fn theta_frame_at(imm: &Immersion, j: &ComplexStructure, u: f64, v: f64) -> Result<[f64; 2]> {
    check4(imm)?;
    let (pg, fr) = adapted_raw(imm, u, v, j)?;
    let jh = pg.j.apply(&pg.mean_curvature);
    let k = -2.0 / fr.theta.sin();
    Ok([k * jh.dot(&fr.frame[0]), k * jh.dot(&fr.frame[1])])
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaForm {
    pub form: OneFormField,
    /// Θ(e₁), Θ(e₂) per node.
    pub frame_values: Vec<[f64; 2]>,
    /// max |Θ(e_k) − (ω₁³ + ω₂⁴)(e_k)| over nodes.
    pub dual_residual: f64,
    pub tolerance: f64,
}

/// Θ on the grid from the mean-curvature formula, cross-checked against the
/// connection-form sum.
pub fn theta_form(imm: &Immersion, j: &ComplexStructure, grid: &Grid) -> Result<ThetaForm> {
    check4(imm)?;
    let step = form_step(&imm.domain, grid);
    let mut coeffs = Vec::with_capacity(grid.len());
    let mut frame_values = Vec::with_capacity(grid.len());
    let mut dual: f64 = 0.0;
    for (u, v) in grid.nodes(&imm.domain) {
        coeffs.push(theta_at(imm, j, u, v)?);
        let tf = theta_frame_at(imm, j, u, v)?;
        let cf = connection_forms_at(imm, j, u, v, step)?.theta_frame();
        dual = dual.max((tf[0] - cf[0]).abs()).max((tf[1] - cf[1]).abs());
        frame_values.push(tf);
    }
    Ok(ThetaForm {
        form: OneFormField {
            domain: imm.domain,
            grid: grid.clone(),
            coeffs,
        },
        frame_values,
        dual_residual: dual,
        tolerance: tol::THETA_DUAL,
    })
}

fn cells(domain: &Domain, grid: &Grid) -> Vec<(usize, usize, f64, f64, f64, f64)> {
    let mut out = Vec::new();
    for i in 0..grid.nu.saturating_sub(1) {
        for k in 0..grid.nv.saturating_sub(1) {
            let (u0, v0) = grid.node(domain, i, k);
            let (u1, v1) = grid.node(domain, i + 1, k + 1);
            out.push((i, k, u0, v0, u1, v1));
        }
    }
    out
}

/// d of a sampled 1-form: trapezoid circulation around each cell divided by
/// its area (exact for affine coefficients).
pub fn exterior_derivative(form: &OneFormField) -> TwoFormField {
    let nv = form.grid.nv;
    let at = |i: usize, k: usize| form.coeffs[i * nv + k];
    let cells = cells(&form.domain, &form.grid)
        .into_iter()
        .map(|(i, k, u0, v0, u1, v1)| {
            let (hu, hv) = (u1 - u0, v1 - v0);
            let circ = 0.5 * hu * (at(i, k)[0] + at(i + 1, k)[0]) + 0.5 * hv * (at(i + 1, k)[1] + at(i + 1, k + 1)[1])
                - 0.5 * hu * (at(i, k + 1)[0] + at(i + 1, k + 1)[0])
                - 0.5 * hv * (at(i, k)[1] + at(i, k + 1)[1]);
            (0.5 * (u0 + u1), 0.5 * (v0 + v1), circ / (hu * hv))
        })
        .collect();
    TwoFormField {
        domain: form.domain,
        grid: form.grid.clone(),
        cells,
    }
}

const GAUSS8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

/// d of a 1-form given pointwise: circulation around each grid cell by
/// 8-point Gauss–Legendre quadrature on every edge, divided by cell area.
pub fn exterior_derivative_of<F>(domain: &Domain, grid: &Grid, form: F) -> Result<TwoFormField>
where
    F: Fn(f64, f64) -> Result<[f64; 2]>,
{
    let edge = |a: (f64, f64), b: (f64, f64)| -> Result<f64> {
        let (du, dv) = (b.0 - a.0, b.1 - a.1);
        let mut s = 0.0;
        for (x, w) in GAUSS8 {
            let t = 0.5 * (x + 1.0);
            let c = form(a.0 + t * du, a.1 + t * dv)?;
            s += 0.5 * w * (c[0] * du + c[1] * dv);
        }
        Ok(s)
    };
    let mut out = Vec::new();
    for (_, _, u0, v0, u1, v1) in cells(domain, grid) {
        let circ = edge((u0, v0), (u1, v0))? + edge((u1, v0), (u1, v1))? + edge((u1, v1), (u0, v1))?
            + edge((u0, v1), (u0, v0))?;
        out.push((0.5 * (u0 + u1), 0.5 * (v0 + v1), circ / ((u1 - u0) * (v1 - v0))));
    }
    Ok(TwoFormField {
        domain: *domain,
        grid: grid.clone(),
        cells: out,
    })
}

/// dΘ by quadrature circulation on the grid cells.
pub fn d_theta(imm: &Immersion, j: &ComplexStructure, grid: &Grid) -> Result<TwoFormField> {
    check4(imm)?;
    exterior_derivative_of(&imm.domain, grid, |u, v| theta_at(imm, j, u, v))
}

/// A closed curve in the chart domain.
#[derive(Clone, Debug)]
pub enum Loop {
    /// u runs over its period at fixed v.
    PeriodU { v: f64 },
    /// v runs over its period at fixed u.
    PeriodV { u: f64 },
    /// Axis-parallel square, traversed counterclockwise.
    Square { center: (f64, f64), half: f64 },
    Circle { center: (f64, f64), radius: f64 },
    /// (u(t), v(t)) for t in [t0, t1].
    Expr {
        u: Expr,
        v: Expr,
        t0: f64,
        t1: f64,
        params: BTreeMap<String, f64>,
    },
}

impl Loop {
    /// Parse "period-u", "period-v", "period-u@0.3", "square", "square@u,v,h",
    /// "circle@u,v,r"; missing positions default to the domain centre.
    pub fn parse(spec: &str, domain: &Domain) -> Result<Loop> {
        let (name, args) = match spec.split_once('@') {
            Some((n, a)) => (n.trim(), Some(a)),
            None => (spec.trim(), None),
        };
        let nums: Vec<f64> = match args {
            Some(a) => a
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| GeomError::Params(format!("bad loop argument '{x}'")))
                })
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let (cu, cv) = domain.center();
        let small = 0.25 * (domain.u.1 - domain.u.0).min(domain.v.1 - domain.v.0);
        let want = |n: usize| -> Result<()> {
            if nums.is_empty() || nums.len() == n {
                Ok(())
            } else {
                Err(GeomError::Params(format!("loop '{name}' takes {n} arguments")))
            }
        };
        match name {
            "period-u" => {
                want(1)?;
                Ok(Loop::PeriodU {
                    v: nums.first().copied().unwrap_or(cv),
                })
            }
            "period-v" => {
                want(1)?;
                Ok(Loop::PeriodV {
                    u: nums.first().copied().unwrap_or(cu),
                })
            }
            "square" => {
                want(3)?;
                Ok(match nums.as_slice() {
                    [u, v, h] => Loop::Square {
                        center: (*u, *v),
                        half: *h,
                    },
                    _ => Loop::Square {
                        center: (cu, cv),
                        half: small,
                    },
                })
            }
            "circle" => {
                want(3)?;
                Ok(match nums.as_slice() {
                    [u, v, r] => Loop::Circle {
                        center: (*u, *v),
                        radius: *r,
                    },
                    _ => Loop::Circle {
                        center: (cu, cv),
                        radius: small,
                    },
                })
            }
            _ => Err(GeomError::Unknown(format!("loop '{spec}'"))),
        }
    }

    /// Loop from DSL expressions in the variable t.
    pub fn from_exprs(u: &str, v: &str, t0: f64, t1: f64, params: BTreeMap<String, f64>) -> Result<Loop> {
        let names: Vec<String> = params.keys().cloned().collect();
        Ok(Loop::Expr {
            u: dsl::parse_with_params(u, &names)?,
            v: dsl::parse_with_params(v, &names)?,
            t0,
            t1,
            params,
        })
    }

    /// Smooth pieces of the parameter interval.
    fn pieces(&self, imm: &Immersion) -> Result<Vec<(f64, f64)>> {
        let period = |d: Direction| {
            imm.periods
                .iter()
                .find(|p| p.dir == d)
                .map(|p| p.period)
                .ok_or_else(|| GeomError::Params(format!("'{}' declares no period in {d:?}", imm.id)))
        };
        Ok(match self {
            Loop::PeriodU { .. } => vec![(imm.domain.u.0, imm.domain.u.0 + period(Direction::U)?)],
            Loop::PeriodV { .. } => vec![(imm.domain.v.0, imm.domain.v.0 + period(Direction::V)?)],
            Loop::Square { .. } => (0..4).map(|k| (k as f64, k as f64 + 1.0)).collect(),
            Loop::Circle { .. } => vec![(0.0, 2.0 * PI)],
            Loop::Expr { t0, t1, .. } => vec![(*t0, *t1)],
        })
    }

    /// Point and velocity at parameter t.
    pub fn eval(&self, t: f64) -> Result<((f64, f64), (f64, f64))> {
        self.eval_on(t, None)
    }

    /// As `eval`, with the square side forced (so corners take the velocity
    /// of the side being integrated).
    fn eval_on(&self, t: f64, side: Option<usize>) -> Result<((f64, f64), (f64, f64))> {
        Ok(match self {
            Loop::PeriodU { v } => ((t, *v), (1.0, 0.0)),
            Loop::PeriodV { u } => ((*u, t), (0.0, 1.0)),
            Loop::Square { center: (cu, cv), half: h } => {
                let side = side.map(|k| k as i64).unwrap_or((t.floor() as i64).clamp(0, 3));
                let s = t - side as f64;
                let l = 2.0 * h;
                match side {
                    0 => ((cu - h + l * s, cv - h), (l, 0.0)),
                    1 => ((cu + h, cv - h + l * s), (0.0, l)),
                    2 => ((cu + h - l * s, cv + h), (-l, 0.0)),
                    _ => ((cu - h, cv + h - l * s), (0.0, -l)),
                }
            }
            Loop::Circle { center: (cu, cv), radius: r } => {
                let (s, c) = t.sin_cos();
                ((cu + r * c, cv + r * s), (-r * s, r * c))
            }
            Loop::Expr { u, v, params, .. } => {
                let env = Env::new(params).bind(Var::T, Jet2::var_u(t));
                let a = dsl::eval_env(u, &env)?;
                let b = dsl::eval_env(v, &env)?;
                ((a.val, b.val), (a.du, b.du))
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopReport {
    /// ∮ (2π)⁻¹ csc θ Θ.
    pub value: f64,
    /// The same integral with the (2√2π)⁻¹ normalization.
    pub value_sqrt2_normalization: f64,
    pub nearest_integer: f64,
    pub distance: f64,
    pub n_steps: usize,
    /// Endpoint mismatch in the chart modulo the declared periods.
    pub closure: f64,
    pub theta: f64,
}

/// Endpoint mismatch in the chart, reduced modulo the declared periods.
fn chart_gap(imm: &Immersion, p0: (f64, f64), p1: (f64, f64)) -> f64 {
    let reduce = |d: f64, dir: Direction| match imm.periods.iter().find(|p| p.dir == dir) {
        Some(p) => d - p.period * (d / p.period).round(),
        None => d,
    };
    reduce(p1.0 - p0.0, Direction::U).hypot(reduce(p1.1 - p0.1, Direction::V))
}

/// Composite-trapezoid integral of Ψ = (2π)⁻¹ csc θ Θ along a closed loop.
pub fn loop_integral_psi(imm: &Immersion, j: &ComplexStructure, lp: &Loop, n_steps: usize) -> Result<LoopReport> {
    check4(imm)?;
    if n_steps == 0 {
        return Err(GeomError::Params("n_steps must be positive".into()));
    }
    let pieces = lp.pieces(imm)?;
    let (t0, t1) = (pieces[0].0, pieces[pieces.len() - 1].1);
    let (p0, _) = lp.eval_on(t0, Some(0))?;
    let (p1, _) = lp.eval_on(t1, Some(pieces.len() - 1))?;
    let closure = chart_gap(imm, p0, p1);
    if !(closure <= tol::LOOP_CLOSURE) {
        return Err(GeomError::OpenLoop(closure));
    }
    let per = (n_steps / pieces.len()).max(1);
    let mut sum = 0.0;
    let mut theta = 0.0;
    for (k, (a, b)) in pieces.iter().enumerate() {
        let h = (b - a) / per as f64;
        let mut part = 0.0;
        for i in 0..=per {
            let t = a + i as f64 * h;
            let ((u, v), (du, dv)) = lp.eval_on(t, Some(k))?;
            if !imm.domain.contains(u, v) {
                return Err(GeomError::Domain { u, v });
            }
            let (pg, fr) = adapted_raw(imm, u, v, j)?;
            let c = theta_chart(&pg, &fr);
            let w = if i == 0 || i == per { 0.5 } else { 1.0 };
            part += w * (c[0] * du + c[1] * dv) / fr.theta.sin();
            theta = fr.theta;
        }
        sum += part * h;
    }
    let value = sum / (2.0 * PI);
    let nearest = value.round();
    Ok(LoopReport {
        value,
        value_sqrt2_normalization: value / std::f64::consts::SQRT_2,
        nearest_integer: nearest,
        distance: (value - nearest).abs(),
        n_steps,
        closure,
        theta,
    })
}

/// Λ and the parallelism of P at one point.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaSample {
    pub u: f64,
    pub v: f64,
    /// Λ(e₁, e₂) = <e₁, Pe₂> in the Gram–Schmidt frame.
    pub lambda_e12: f64,
    /// Coefficient of du∧dv.
    pub chart_coeff: f64,
    /// max over X, Y ∈ {e₁, e₂} of |(∇_X P)Y|.
    pub nabla_p: f64,
    /// max over frame triples of the cyclic sum defining dΛ(X, Y, Z).
    pub d_lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaForm {
    pub samples: Vec<LambdaSample>,
    pub form: TwoFormField,
    pub max_nabla_p: f64,
    pub max_d_lambda: f64,
    /// Smallest |Λ(e₁, e₂)|; positive exactly when Λ is nondegenerate.
    pub min_abs_lambda: f64,
    pub tolerance: f64,
}

/// P = T J T as a 4×4 matrix, T the orthogonal projection onto the tangent plane.
fn p_matrix(pg: &PointGeometry) -> Matrix4<f64> {
    let [e1, e2] = pg.tangent;
    let t = e1 * e1.transpose() + e2 * e2.transpose();
    t * pg.j.matrix() * t
}

pub fn lambda_at(imm: &Immersion, j: &ComplexStructure, u: f64, v: f64, step: f64) -> Result<LambdaSample> {
    check4(imm)?;
    let pg = geometry_raw(imm, u, v, j)?;
    let [e1, e2] = pg.tangent;
    let pm = p_matrix(&pg);
    let pat = |a: f64, b: f64| geometry_raw(imm, a, b, j).map(|g| p_matrix(&g));
    let du = diff_matrix(|h| pat(u + h, v), step)?;
    let dv = diff_matrix(|h| pat(u, v + h), step)?;
    let t = e1 * e1.transpose() + e2 * e2.transpose();
    let c = pg.coeffs;
    // (∇_X P)Y = T (D_X P) Y for tangent X, Y.
    let nabla: [Matrix4<f64>; 2] = [0, 1].map(|i| t * (du * c[i][0] + dv * c[i][1]));
    let es = [e1, e2];
    let mut nabla_p: f64 = 0.0;
    for n in &nabla {
        for y in &es {
            nabla_p = nabla_p.max((n * y).norm());
        }
    }
    let term = |x: usize, y: usize, z: usize| es[x].dot(&(nabla[z] * es[y]));
    let mut d_lambda: f64 = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let s = (term(x, y, z) + term(y, z, x) + term(z, x, y)) / 3.0;
                d_lambda = d_lambda.max(s.abs());
            }
        }
    }
    let xu = jets::v4(&pg.jet.xu);
    let xv = jets::v4(&pg.jet.xv);
    Ok(LambdaSample {
        u,
        v,
        lambda_e12: e1.dot(&(pm * e2)),
        chart_coeff: xu.dot(&(pm * xv)),
        nabla_p,
        d_lambda,
    })
}

/// Λ(X, Y) = <X, PY> on the grid, with dΛ by circulation and the pointwise
/// ∇P = 0 check behind dΛ = 0.
pub fn lambda_form(imm: &Immersion, j: &ComplexStructure, grid: &Grid) -> Result<LambdaForm> {
    check4(imm)?;
    let step = form_step(&imm.domain, grid);
    let samples: Vec<LambdaSample> = grid
        .nodes(&imm.domain)
        .into_iter()
        .map(|(u, v)| lambda_at(imm, j, u, v, step))
        .collect::<Result<_>>()?;
    let form = TwoFormField {
        domain: imm.domain,
        grid: grid.clone(),
        cells: samples.iter().map(|s| (s.u, s.v, s.chart_coeff)).collect(),
    };
    let max_nabla_p = samples.iter().map(|s| s.nabla_p).fold(0.0, f64::max);
    let max_d_lambda = samples.iter().map(|s| s.d_lambda).fold(0.0, f64::max);
    let min_abs_lambda = samples.iter().map(|s| s.lambda_e12.abs()).fold(f64::INFINITY, f64::min);
    Ok(LambdaForm {
        samples,
        form,
        max_nabla_p,
        max_d_lambda,
        min_abs_lambda,
        tolerance: tol::NABLA_P,
    })
}
