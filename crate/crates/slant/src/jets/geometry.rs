use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector2};
use serde::Serialize;

use super::{v4, Grid, Immersion, Jet};
use crate::cxstruct::{ComplexStructure, OrientationClass};
use crate::error::{GeomError, Result};
use crate::exterior::{complete_normal, wedge2, TwoVector, Vec4};
use crate::tol;

pub const WIRTINGER_DIRECTIONS: usize = 16;

/// Frames, fundamental forms, curvatures and the splitting of J at one point.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub u: f64,
    pub v: f64,
    pub point: Vec4,
    pub jet: Jet,
    /// e1 = x_u/|x_u|, e2 from Gram–Schmidt on x_v.
    pub tangent: [Vec4; 2],
    /// e3, e4 completing a positive basis of E⁴.
    pub normal: [Vec4; 2],
    /// e_i = Σ_a coeffs[i][a] x_a with x_0 = x_u, x_1 = x_v.
    pub coeffs: [[f64; 2]; 2],
    /// h(e_i, e_j) as ambient vectors.
    pub hvec: [[Vec4; 2]; 2],
    /// h[r][i][j] = <h(e_i, e_j), e_{r+3}>.
    pub h: [[[f64; 2]; 2]; 2],
    pub mean_curvature: Vec4,
    pub gauss: f64,
    pub normal_curvature: f64,
    /// arccos <Je1, e2> in [0, π].
    pub alpha: f64,
    /// Wirtinger angle of e1.
    pub wirtinger: f64,
    pub wirtinger_samples: [f64; WIRTINGER_DIRECTIONS],
    /// P: tangent → tangent.
    pub p: Matrix2<f64>,
    /// F: tangent → normal.
    pub big_f: Matrix2<f64>,
    /// t: normal → tangent.
    pub t: Matrix2<f64>,
    /// f: normal → normal.
    pub f: Matrix2<f64>,
    pub j: ComplexStructure,
}

/// (e₁, e₂) from Gram–Schmidt on (x_u, x_v), with e_i = Σ_a c[i][a] x_a.
pub fn tangent_frame(jet: &Jet) -> ([Vec4; 2], [[f64; 2]; 2]) {
    let xu = v4(&jet.xu);
    let xv = v4(&jet.xv);
    let nu = xu.norm();
    let e1 = xu / nu;
    let w = xv - e1 * e1.dot(&xv);
    let nw = w.norm();
    let e2 = w / nw;
    // e2 = (x_v − <x_v, e1> e1)/|w| = −<x_v,e1>/(|x_u||w|) x_u + x_v/|w|
    let c = [
        [1.0 / nu, 0.0],
        [-e1.dot(&xv) / (nu * nw), 1.0 / nw],
    ];
    ([e1, e2], c)
}

impl PointGeometry {
    fn assemble(
        u: f64,
        v: f64,
        jet: Jet,
        j: &ComplexStructure,
        tangent: [Vec4; 2],
        normal: [Vec4; 2],
        coeffs: [[f64; 2]; 2],
    ) -> Self {
        let second = [
            [v4(&jet.xuu), v4(&jet.xuv)],
            [v4(&jet.xuv), v4(&jet.xvv)],
        ];
        let normal_part = |x: Vec4| x - tangent[0] * tangent[0].dot(&x) - tangent[1] * tangent[1].dot(&x);
        let mut hvec = [[Vec4::zeros(); 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                let mut acc = Vec4::zeros();
                for a in 0..2 {
                    for b in 0..2 {
                        acc += second[a][b] * (coeffs[i][a] * coeffs[k][b]);
                    }
                }
                hvec[i][k] = normal_part(acc);
            }
        }
        let sym = (hvec[0][1] + hvec[1][0]) * 0.5;
        hvec[0][1] = sym;
        hvec[1][0] = sym;
        let mut h = [[[0.0; 2]; 2]; 2];
        for (r, hr) in h.iter_mut().enumerate() {
            for i in 0..2 {
                for k in 0..2 {
                    hr[i][k] = hvec[i][k].dot(&normal[r]);
                }
            }
        }
        let mean_curvature = (hvec[0][0] + hvec[1][1]) * 0.5;
        let gauss = gauss_of(&h);
        let normal_curvature = normal_curvature_of(&h);

        let frame = [tangent[0], tangent[1], normal[0], normal[1]];
        let m = Matrix4::from_fn(|a, b| frame[a].dot(&j.apply(&frame[b])));
        let p = Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        let big_f = Matrix2::new(m[(2, 0)], m[(2, 1)], m[(3, 0)], m[(3, 1)]);
        let t = Matrix2::new(m[(0, 2)], m[(0, 3)], m[(1, 2)], m[(1, 3)]);
        let f = Matrix2::new(m[(2, 2)], m[(2, 3)], m[(3, 2)], m[(3, 3)]);
        let alpha = m[(1, 0)].clamp(-1.0, 1.0).acos();
        let mut samples = [0.0; WIRTINGER_DIRECTIONS];
        for (k, s) in samples.iter_mut().enumerate() {
            let phi = PI * k as f64 / WIRTINGER_DIRECTIONS as f64;
            let x = Vector2::new(phi.cos(), phi.sin());
            *s = (p * x).norm().min(1.0).acos();
        }
        PointGeometry {
            u,
            v,
            point: v4(&jet.x),
            jet,
            tangent,
            normal,
            coeffs,
            hvec,
            h,
            mean_curvature,
            gauss,
            normal_curvature,
            alpha,
            wirtinger: samples[0],
            wirtinger_samples: samples,
            p,
            big_f,
            t,
            f,
            j: *j,
        }
    }

    pub fn frame(&self) -> [Vec4; 4] {
        [self.tangent[0], self.tangent[1], self.normal[0], self.normal[1]]
    }

    /// [[P, t], [F, f]]: J in the basis (e1, e2, e3, e4).
    pub fn block_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                m[(a, b)] = self.p[(a, b)];
                m[(a, b + 2)] = self.t[(a, b)];
                m[(a + 2, b)] = self.big_f[(a, b)];
                m[(a + 2, b + 2)] = self.f[(a, b)];
            }
        }
        m
    }

    /// Plücker image e1∧e2 of the oriented tangent plane.
    pub fn gauss_vector(&self) -> TwoVector {
        wedge2(&self.tangent[0], &self.tangent[1])
    }

    pub fn mean_curvature_norm(&self) -> f64 {
        self.mean_curvature.norm()
    }

    /// |G − εG^D| with ε = +1 for J in the minus class and −1 for the plus
    /// class; vanishes on surfaces slant for J.
    pub fn curvature_identity_residual(&self) -> f64 {
        let eps = match self.j.class() {
            OrientationClass::Minus => 1.0,
            OrientationClass::Plus => -1.0,
        };
        (self.gauss - eps * self.normal_curvature).abs()
    }

    /// Matrix of A_{e_{r+3}} in the tangent basis.
    pub fn shape_matrix(&self, r: usize) -> Matrix2<f64> {
        let h = &self.h[r];
        Matrix2::new(h[0][0], h[0][1], h[1][0], h[1][1])
    }

    /// A_ξ for ξ given by its (e3, e4) coordinates.
    pub fn shape_operator(&self, xi: &Vector2<f64>) -> Matrix2<f64> {
        self.shape_matrix(0) * xi[0] + self.shape_matrix(1) * xi[1]
    }

    /// Wirtinger angle of the tangent direction cos φ e1 + sin φ e2.
    pub fn wirtinger_at(&self, phi: f64) -> f64 {
        let x = Vector2::new(phi.cos(), phi.sin());
        (self.p * x).norm().min(1.0).acos()
    }

    /// Same point, tangent frame rotated by `a` and normal frame by `b`.
    pub fn rotated(&self, a: f64, b: f64) -> Self {
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        let [e1, e2] = self.tangent;
        let [e3, e4] = self.normal;
        let tangent = [e1 * ca + e2 * sa, -e1 * sa + e2 * ca];
        let normal = [e3 * cb + e4 * sb, -e3 * sb + e4 * cb];
        let c = self.coeffs;
        let coeffs = [
            [ca * c[0][0] + sa * c[1][0], ca * c[0][1] + sa * c[1][1]],
            [-sa * c[0][0] + ca * c[1][0], -sa * c[0][1] + ca * c[1][1]],
        ];
        PointGeometry::assemble(self.u, self.v, self.jet.clone(), &self.j, tangent, normal, coeffs)
    }

    /// Same point with the chart orientation reversed (e2 ↦ −e2, e4 ↦ −e4).
    pub fn reflected(&self) -> Self {
        let tangent = [self.tangent[0], -self.tangent[1]];
        let normal = [self.normal[0], -self.normal[1]];
        let c = self.coeffs;
        let coeffs = [c[0], [-c[1][0], -c[1][1]]];
        PointGeometry::assemble(self.u, self.v, self.jet.clone(), &self.j, tangent, normal, coeffs)
    }

    /// Orientation (±1) of the J-adapted frame (e1, e2', e3', e4') relative to
    /// the positive frame: e2' = sec θ Pe1 for proper slant points, e3' and e4'
    /// the normalized F-images. `None` at complex points.
    pub fn slant_frame_orientation(&self) -> Option<f64> {
        let theta = self.wirtinger;
        if theta < tol::DEGENERATE_ANGLE {
            return None;
        }
        let e1 = self.tangent[0];
        let e2 = if (theta - FRAC_PI_2).abs() < tol::DEGENERATE_ANGLE {
            self.tangent[1]
        } else {
            self.tangent[1] * self.p[(1, 0)].signum()
        };
        let f1 = self.j.apply(&e1);
        let f2 = self.j.apply(&e2);
        let tan = |x: Vec4| e1 * e1.dot(&x) + self.tangent[1] * self.tangent[1].dot(&x);
        let e3 = f1 - tan(f1);
        let e4 = f2 - tan(f2);
        let d = Matrix4::from_columns(&[e1, e2, e3, e4]).determinant();
        Some(d.signum())
    }
}

pub(crate) fn gauss_of(h: &[[[f64; 2]; 2]; 2]) -> f64 {
    let [a, b] = h;
    a[0][0] * a[1][1] - a[0][1] * a[0][1] + b[0][0] * b[1][1] - b[0][1] * b[0][1]
}

pub(crate) fn normal_curvature_of(h: &[[[f64; 2]; 2]; 2]) -> f64 {
    let [a, b] = h;
    a[0][0] * b[0][1] + a[0][1] * b[1][1] - a[0][1] * b[0][0] - a[1][1] * b[0][1]
}

pub fn point_geometry(imm: &Immersion, u: f64, v: f64, j: &ComplexStructure) -> Result<PointGeometry> {
    if imm.ambient_dim != 4 {
        return Err(GeomError::AmbientDim {
            got: imm.ambient_dim,
            expected: 4,
        });
    }
    let jet = imm.jet_at(u, v)?;
    Ok(geometry_from_jet(u, v, jet, j))
}

pub(crate) fn geometry_from_jet(u: f64, v: f64, jet: Jet, j: &ComplexStructure) -> PointGeometry {
    let (tangent, coeffs) = tangent_frame(&jet);
    let normal = complete_normal(&tangent[0], &tangent[1]);
    PointGeometry::assemble(u, v, jet, j, tangent, normal, coeffs)
}

/// Frame of a proper slant point: e2 = sec θ Pe1, e3 = csc θ Fe1, e4 = csc θ Fe2.
#[derive(Clone, Debug)]
pub struct AdaptedSlantFrame {
    pub theta: f64,
    pub frame: [Vec4; 4],
    /// e2 of this frame equals `sign` times the chart-oriented e2.
    pub sign: f64,
    /// Sign of det(e1, e2, e3, e4).
    pub orientation: f64,
    /// h[r][i][j] in this frame.
    pub h: [[[f64; 2]; 2]; 2],
    pub gauss: f64,
    pub normal_curvature: f64,
}

impl AdaptedSlantFrame {
    pub fn orthonormality_error(&self) -> f64 {
        let mut e: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let d = self.frame[a].dot(&self.frame[b]) - if a == b { 1.0 } else { 0.0 };
                e = e.max(d.abs());
            }
        }
        e
    }

    /// Max deviation from te3 = −sin θ e1, te4 = −sin θ e2, fe3 = −cos θ e4,
    /// fe4 = cos θ e3.
    pub fn identity_error(&self, j: &ComplexStructure) -> f64 {
        let [e1, e2, e3, e4] = self.frame;
        let (s, c) = self.theta.sin_cos();
        let tan = |x: Vec4| e1 * e1.dot(&x) + e2 * e2.dot(&x);
        let nor = |x: Vec4| e3 * e3.dot(&x) + e4 * e4.dot(&x);
        let j3 = j.apply(&e3);
        let j4 = j.apply(&e4);
        [
            (tan(j3) + e1 * s).norm(),
            (tan(j4) + e2 * s).norm(),
            (nor(j3) + e4 * c).norm(),
            (nor(j4) - e3 * c).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn adapted_frame(pg: &PointGeometry) -> Result<AdaptedSlantFrame> {
    let theta = pg.wirtinger;
    if theta < tol::DEGENERATE_ANGLE {
        return Err(GeomError::DegenerateAngle {
            theta,
            kind: "complex (holomorphic tangent plane)",
        });
    }
    if (theta - FRAC_PI_2).abs() < tol::DEGENERATE_ANGLE {
        return Err(GeomError::DegenerateAngle {
            theta,
            kind: "totally real (P vanishes)",
        });
    }
    let (s, c) = theta.sin_cos();
    let [e1, e2c] = pg.tangent;
    let j = &pg.j;
    let tan = |x: Vec4| e1 * e1.dot(&x) + e2c * e2c.dot(&x);
    let je1 = j.apply(&e1);
    let pe1 = tan(je1);
    let e2 = pe1 / c;
    let e3 = (je1 - pe1) / s;
    let je2 = j.apply(&e2);
    let e4 = (je2 - tan(je2)) / s;
    let sign = pg.p[(1, 0)].signum();

    let hv = |i: usize, k: usize| {
        let si = if i == 1 { sign } else { 1.0 };
        let sk = if k == 1 { sign } else { 1.0 };
        pg.hvec[i][k] * (si * sk)
    };
    let mut h = [[[0.0; 2]; 2]; 2];
    for (r, n) in [e3, e4].iter().enumerate() {
        for i in 0..2 {
            for k in 0..2 {
                h[r][i][k] = hv(i, k).dot(n);
            }
        }
    }
    let frame = [e1, e2, e3, e4];
    let orientation = Matrix4::from_columns(&frame).determinant().signum();
    Ok(AdaptedSlantFrame {
        theta,
        frame,
        sign,
        orientation,
        gauss: gauss_of(&h),
        normal_curvature: normal_curvature_of(&h),
        h,
    })
}

/// Wirtinger-angle statistics over a grid and the sampled tangent directions.
#[derive(Clone, Debug, Serialize)]
pub struct WirtingerStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_mean: f64,
    pub samples: usize,
    pub slant: bool,
    pub angle: Option<f64>,
    /// No sampled direction with θ = 0.
    pub purely_real: bool,
    pub tolerance: f64,
}

fn stats_from(thetas: &[f64], alphas: &[f64]) -> WirtingerStats {
    let min = thetas.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = thetas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = thetas.iter().sum::<f64>() / thetas.len() as f64;
    let amin = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    let amax = alphas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let amean = alphas.iter().sum::<f64>() / alphas.len() as f64;
    let spread = max - min;
    let slant = spread <= tol::SLANT_SPREAD;
    WirtingerStats {
        min,
        max,
        mean,
        spread,
        alpha_min: amin,
        alpha_max: amax,
        alpha_mean: amean,
        samples: thetas.len(),
        slant,
        angle: if slant { Some(mean) } else { None },
        purely_real: min > 1e-9,
        tolerance: tol::SLANT_SPREAD,
    }
}

pub fn wirtinger_field(imm: &Immersion, grid: &Grid, j: &ComplexStructure) -> Result<WirtingerStats> {
    let mut thetas = Vec::with_capacity(grid.len() * WIRTINGER_DIRECTIONS);
    let mut alphas = Vec::with_capacity(grid.len());
    for (u, v) in grid.nodes(&imm.domain) {
        let pg = point_geometry(imm, u, v, j)?;
        thetas.extend_from_slice(&pg.wirtinger_samples);
        alphas.push(pg.alpha);
    }
    Ok(stats_from(&thetas, &alphas))
}

/// Wirtinger statistics for a surface in E^{2m} under an arbitrary complex
/// structure given as a matrix.
pub fn wirtinger_field_general(imm: &Immersion, grid: &Grid, j: &DMatrix<f64>) -> Result<WirtingerStats> {
    let n = imm.ambient_dim;
    if j.nrows() != n || j.ncols() != n {
        return Err(GeomError::AmbientDim {
            got: j.nrows(),
            expected: n,
        });
    }
    let mut thetas = Vec::new();
    let mut alphas = Vec::new();
    for (u, v) in grid.nodes(&imm.domain) {
        let jet = imm.jet_at(u, v)?;
        let e1: DVector<f64> = jet.xu.normalize();
        let w = &jet.xv - &e1 * e1.dot(&jet.xv);
        let e2 = w.normalize();
        let je1 = j * &e1;
        alphas.push(je1.dot(&e2).clamp(-1.0, 1.0).acos());
        for k in 0..WIRTINGER_DIRECTIONS {
            let phi = PI * k as f64 / WIRTINGER_DIRECTIONS as f64;
            let x = &e1 * phi.cos() + &e2 * phi.sin();
            let jx = j * &x;
            let p = Vector2::new(jx.dot(&e1), jx.dot(&e2));
            thetas.push(p.norm().min(1.0).acos());
        }
    }
    Ok(stats_from(&thetas, &alphas))
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorChecks {
    /// max |A_{Fe1}e2 − A_{Fe2}e1|.
    pub a_f_symmetry: f64,
    /// Eigenvalues of every A_ξ symmetric about 0 (both traces vanish).
    pub austere: bool,
    pub austere_residual: f64,
    /// max |A_{fξ}X + A_ξ(PX)|; vanishes iff F is parallel.
    pub parallel_f_residual: f64,
    /// max |P² + cos²θ I|.
    pub q_residual: f64,
    pub tolerance: f64,
}

pub fn slant_operator_checks(imm: &Immersion, grid: &Grid, j: &ComplexStructure) -> Result<OperatorChecks> {
    let mut a_f: f64 = 0.0;
    let mut aust: f64 = 0.0;
    let mut par: f64 = 0.0;
    let mut q: f64 = 0.0;
    for (u, v) in grid.nodes(&imm.domain) {
        let pg = point_geometry(imm, u, v, j)?;
        let fe1 = Vector2::new(pg.big_f[(0, 0)], pg.big_f[(1, 0)]);
        let fe2 = Vector2::new(pg.big_f[(0, 1)], pg.big_f[(1, 1)]);
        let x1 = Vector2::new(1.0, 0.0);
        let x2 = Vector2::new(0.0, 1.0);
        a_f = a_f.max((pg.shape_operator(&fe1) * x2 - pg.shape_operator(&fe2) * x1).norm());
        aust = aust.max(pg.shape_matrix(0).trace().abs()).max(pg.shape_matrix(1).trace().abs());
        for xi in [x1, x2] {
            let fxi = pg.f * xi;
            for x in [x1, x2] {
                let r = pg.shape_operator(&fxi) * x + pg.shape_operator(&xi) * (pg.p * x);
                par = par.max(r.norm());
            }
        }
        let c2 = pg.wirtinger.cos().powi(2);
        q = q.max((pg.p * pg.p + Matrix2::identity() * c2).amax());
    }
    Ok(OperatorChecks {
        a_f_symmetry: a_f,
        austere: aust < 1e-8,
        austere_residual: aust,
        parallel_f_residual: par,
        q_residual: q,
        tolerance: 1e-8,
    })
}
