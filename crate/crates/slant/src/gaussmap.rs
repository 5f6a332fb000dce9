//! The Gauss map ν = e₁∧e₂ into G(2,4) ≅ S²₊(1/√2) × S²₋(1/√2), circle
//! fitting of its two projections, and recovery of the complex structures
//! for which a surface is slant.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::Serialize;

use crate::cxstruct::{structure_from_zeta, wirtinger_of_alpha, ComplexStructure, OrientationClass};
use crate::error::{GeomError, Result};
use crate::exterior::{project_pm, wedge2, TwoVector};
use crate::jets::{self, Grid, Immersion};
use crate::tol;

#[derive(Clone, Debug, Serialize)]
pub struct GaussSample {
    pub u: f64,
    pub v: f64,
    pub nu: TwoVector,
    pub nu_plus: TwoVector,
    pub nu_minus: TwoVector,
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

/// ν at a chart point, without the domain check (used for differencing).
fn nu_raw(imm: &Immersion, u: f64, v: f64) -> Result<TwoVector> {
    let jet = imm.eval_raw(u, v)?;
    jets::check_immersion(&jet, u, v)?;
    let ([e1, e2], _) = jets::tangent_frame(&jet);
    Ok(wedge2(&e1, &e2))
}

pub fn gauss_sample(imm: &Immersion, u: f64, v: f64) -> Result<GaussSample> {
    check4(imm)?;
    if !imm.domain.contains(u, v) {
        return Err(GeomError::Domain { u, v });
    }
    let nu = nu_raw(imm, u, v)?;
    let (p, m) = project_pm(&nu);
    Ok(GaussSample {
        u,
        v,
        nu,
        nu_plus: p,
        nu_minus: m,
    })
}

pub fn gauss_field(imm: &Immersion, grid: &Grid) -> Result<Vec<GaussSample>> {
    grid.nodes(&imm.domain)
        .into_iter()
        .map(|(u, v)| gauss_sample(imm, u, v))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CircleClass {
    Singleton,
    Circle,
    NotCircular,
}

/// Thresholds for `fit_circle`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitThresholds {
    /// All points within this distance of their mean ⇒ singleton.
    pub singleton_spread: f64,
    /// RMS plane residual below this times √n ⇒ circle.
    pub circle_residual: f64,
}

impl Default for FitThresholds {
    fn default() -> Self {
        FitThresholds {
            singleton_spread: tol::SINGLETON_SPREAD,
            circle_residual: tol::CIRCLE_RESIDUAL,
        }
    }
}

/// Least-squares plane <axis, x> = offset through points of S²(1/√2).
#[derive(Clone, Debug, Serialize)]
pub struct CircleFit {
    pub center_axis: [f64; 3],
    pub offset: f64,
    pub residual: f64,
    /// Largest distance of a point from the mean.
    pub spread: f64,
    /// Angular extent of the sampled arc (2π minus the largest gap).
    pub arc_extent: f64,
    pub classification: CircleClass,
    pub points: usize,
}

pub fn fit_circle(points: &[Vector3<f64>], thr: &FitThresholds) -> Result<CircleFit> {
    let n = points.len();
    if n < 3 {
        return Err(GeomError::InsufficientSamples { need: 3, got: n });
    }
    let mean = points.iter().fold(Vector3::zeros(), |a, p| a + p) / n as f64;
    let spread = points.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max);
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n as f64;
    let eig = SymmetricEigen::new(cov);
    let imin = eig.eigenvalues.imin();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(imin).into();
    axis.normalize_mut();
    let mut offset = axis.dot(&mean);
    if singleton(spread, thr) {
        // The plane is undetermined; point the axis at the cluster instead.
        axis = mean.normalize();
        offset = axis.dot(&mean);
    } else if offset < 0.0 {
        axis = -axis;
        offset = -offset;
    }
    let residual = (points.iter().map(|p| (axis.dot(p) - offset).powi(2)).sum::<f64>() / n as f64).sqrt();
    let classification = if singleton(spread, thr) {
        CircleClass::Singleton
    } else if residual < thr.circle_residual * (n as f64).sqrt() {
        CircleClass::Circle
    } else {
        CircleClass::NotCircular
    };
    Ok(CircleFit {
        center_axis: axis.into(),
        offset,
        residual,
        spread,
        arc_extent: arc_extent(points, &axis, offset),
        classification,
        points: n,
    })
}

fn singleton(spread: f64, thr: &FitThresholds) -> bool {
    spread < thr.singleton_spread
}

fn arc_extent(points: &[Vector3<f64>], axis: &Vector3<f64>, offset: f64) -> f64 {
    let center = axis * offset;
    let helper = if axis[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let b1 = (helper - axis * axis.dot(&helper)).normalize();
    let b2 = axis.cross(&b1);
    let mut ang: Vec<f64> = points
        .iter()
        .filter_map(|p| {
            let d = p - center;
            let (x, y) = (d.dot(&b1), d.dot(&b2));
            if x.hypot(y) < 1e-12 {
                None
            } else {
                Some(y.atan2(x))
            }
        })
        .collect();
    if ang.len() < 2 {
        return 0.0;
    }
    ang.sort_by(|a, b| a.total_cmp(b));
    let mut gap = ang[0] + 2.0 * PI - ang[ang.len() - 1];
    for w in ang.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    2.0 * PI - gap
}

#[derive(Clone, Debug, Serialize)]
pub struct DetectedStructure {
    pub structure: ComplexStructure,
    /// α_J on the oriented tangent planes, in [0, π].
    pub alpha: f64,
    /// min(α, π − α).
    pub wirtinger: f64,
    /// Largest |<ζ_J, ν> − cos α| over the samples.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassDetection {
    pub class: OrientationClass,
    pub fit: CircleFit,
    pub structures: Vec<DetectedStructure>,
    /// Singleton image: slant for every structure of this class.
    pub every_structure: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionCase {
    /// Not slant for any compatible structure.
    None,
    /// Slant for every structure of at least one class.
    Infinite,
    Two,
    Four,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlantDetection {
    pub plus: ClassDetection,
    pub minus: ClassDetection,
    pub doubly_slant: bool,
    pub case: DetectionCase,
    pub samples: usize,
}

impl SlantDetection {
    pub fn structures(&self) -> impl Iterator<Item = &DetectedStructure> {
        self.plus.structures.iter().chain(self.minus.structures.iter())
    }

    pub fn count(&self) -> usize {
        self.plus.structures.len() + self.minus.structures.len()
    }
}

fn detected(zeta: &TwoVector, nus: &[TwoVector]) -> Result<[DetectedStructure; 2]> {
    let j = structure_from_zeta(zeta)?;
    let z = j.zeta();
    let cs: Vec<f64> = nus.iter().map(|n| z.dot(n)).collect();
    let c = (cs.iter().sum::<f64>() / cs.len() as f64).clamp(-1.0, 1.0);
    let residual = cs.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
    let alpha = c.acos();
    let mk = |j: ComplexStructure, a: f64| DetectedStructure {
        structure: j,
        alpha: a,
        wirtinger: wirtinger_of_alpha(a),
        residual,
    };
    Ok([mk(j, alpha), mk(j.negated(), PI - alpha)])
}

fn detect_class(class: OrientationClass, samples: &[GaussSample], thr: &FitThresholds) -> Result<ClassDetection> {
    let pts: Vec<Vector3<f64>> = samples
        .iter()
        .map(|s| match class {
            OrientationClass::Plus => s.nu_plus.eta_plus(),
            OrientationClass::Minus => s.nu_minus.eta_minus(),
        })
        .collect();
    let nus: Vec<TwoVector> = samples.iter().map(|s| s.nu).collect();
    let fit = fit_circle(&pts, thr)?;
    let axis = Vector3::from(fit.center_axis) * SQRT_2;
    let zeta = match class {
        OrientationClass::Plus => TwoVector::from_eta_plus(&axis),
        OrientationClass::Minus => TwoVector::from_eta_minus(&axis),
    };
    let (structures, every) = match fit.classification {
        CircleClass::NotCircular => (Vec::new(), false),
        CircleClass::Circle => (detected(&zeta, &nus)?.to_vec(), false),
        CircleClass::Singleton => (detected(&zeta, &nus)?.to_vec(), true),
    };
    Ok(ClassDetection {
        class,
        fit,
        structures,
        every_structure: every,
    })
}

pub const MIN_DETECTION_SAMPLES: usize = 100;

pub fn detect_slant_structures(imm: &Immersion, grid: &Grid) -> Result<SlantDetection> {
    detect_with(imm, grid, &FitThresholds::default())
}

pub fn detect_with(imm: &Immersion, grid: &Grid, thr: &FitThresholds) -> Result<SlantDetection> {
    check4(imm)?;
    if grid.len() < MIN_DETECTION_SAMPLES {
        return Err(GeomError::InsufficientSamples {
            need: MIN_DETECTION_SAMPLES,
            got: grid.len(),
        });
    }
    let samples = gauss_field(imm, grid)?;
    let plus = detect_class(OrientationClass::Plus, &samples, thr)?;
    let minus = detect_class(OrientationClass::Minus, &samples, thr)?;
    let doubly_slant = !plus.structures.is_empty() && !minus.structures.is_empty();
    let case = if plus.every_structure || minus.every_structure {
        DetectionCase::Infinite
    } else {
        match plus.structures.len() + minus.structures.len() {
            0 => DetectionCase::None,
            2 => DetectionCase::Two,
            _ => DetectionCase::Four,
        }
    };
    Ok(SlantDetection {
        plus,
        minus,
        doubly_slant,
        case,
        samples: samples.len(),
    })
}

/// Both sides of det(ν±)_* = ½(G ± G^D) at one point.
#[derive(Clone, Debug, Serialize)]
pub struct GaussJacobian {
    pub u: f64,
    pub v: f64,
    pub det_plus: f64,
    pub det_minus: f64,
    pub gauss: f64,
    pub normal_curvature: f64,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

/// Largest differencing step for the Gauss-map Jacobians.
pub const JACOBIAN_MAX_STEP: f64 = 1e-3;

/// Jacobian determinants of ν± at interior grid nodes. Partials of the
/// η-coordinates come from Richardson-extrapolated central differences with
/// step min(grid spacing, `step` or `JACOBIAN_MAX_STEP`), and are converted to
/// area ratios with √(EG − F²).
pub fn gauss_jacobians(imm: &Immersion, grid: &Grid, step: Option<f64>) -> Result<Vec<GaussJacobian>> {
    check4(imm)?;
    let (hu, hv) = grid.spacing(&imm.domain);
    let h = step.unwrap_or(JACOBIAN_MAX_STEP);
    let (hu, hv) = (h.min(hu), h.min(hv));
    let j_any = crate::cxstruct::j1();
    let mut out = Vec::new();
    for (u, v) in grid.interior_nodes(&imm.domain) {
        let jet = imm.jet_at(u, v)?;
        let (e, f, g) = jet.gram();
        let area = (e * g - f * f).sqrt();
        let pg = jets::point_geometry(imm, u, v, &j_any)?;
        let eta = |a: f64, b: f64| -> Result<[Vector3<f64>; 2]> {
            let n = nu_raw(imm, a, b)?;
            Ok([n.eta_plus(), n.eta_minus()])
        };
        let diff = |du: f64, dv: f64, h: f64| -> Result<[Vector3<f64>; 2]> {
            let d = |h: f64| -> Result<[Vector3<f64>; 2]> {
                let p = eta(u + du * h, v + dv * h)?;
                let m = eta(u - du * h, v - dv * h)?;
                Ok([(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)])
            };
            let a = d(h)?;
            let b = d(h / 2.0)?;
            Ok([(b[0] * 4.0 - a[0]) / 3.0, (b[1] * 4.0 - a[1]) / 3.0])
        };
        let du = diff(1.0, 0.0, hu)?;
        let dv = diff(0.0, 1.0, hv)?;
        let c = eta(u, v)?;
        let np = c[0].normalize();
        let nm = c[1].normalize();
        let det_plus = np.dot(&du[0].cross(&dv[0])) / area;
        let det_minus = -nm.dot(&du[1].cross(&dv[1])) / area;
        let (gg, gd) = (pg.gauss, pg.normal_curvature);
        out.push(GaussJacobian {
            u,
            v,
            det_plus,
            det_minus,
            gauss: gg,
            normal_curvature: gd,
            residual_plus: (det_plus - 0.5 * (gg + gd)).abs(),
            residual_minus: (det_minus - 0.5 * (gg - gd)).abs(),
        });
    }
    Ok(out)
}
