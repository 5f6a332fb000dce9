//! Parametrized surfaces with exact 2-jets, and the per-point geometry built
//! from them.

pub mod catalog;
mod geometry;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DVector, Vector4};
use serde::{Deserialize, Serialize};

use crate::dsl::{eval_jet2, Expr, ImmersionConfig};
use crate::error::{GeomError, Result};
use crate::tol;

pub use geometry::{
    adapted_frame, point_geometry, tangent_frame, slant_operator_checks, wirtinger_field, wirtinger_field_general,
    AdaptedSlantFrame, OperatorChecks, PointGeometry, WirtingerStats, WIRTINGER_DIRECTIONS,
};
pub(crate) use geometry::geometry_from_jet;

/// Position with first and second partials of a chart at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub x: DVector<f64>,
    pub xu: DVector<f64>,
    pub xv: DVector<f64>,
    pub xuu: DVector<f64>,
    pub xuv: DVector<f64>,
    pub xvv: DVector<f64>,
}

impl Jet {
    pub fn zeros(n: usize) -> Self {
        let z = DVector::zeros(n);
        Jet {
            x: z.clone(),
            xu: z.clone(),
            xv: z.clone(),
            xuu: z.clone(),
            xuv: z.clone(),
            xvv: z,
        }
    }

    /// Build from per-component arrays (value, u, v, uu, uv, vv).
    pub fn from_components(c: &[[f64; 6]]) -> Self {
        let n = c.len();
        let col = |k: usize| DVector::from_iterator(n, c.iter().map(|r| r[k]));
        Jet {
            x: col(0),
            xu: col(1),
            xv: col(2),
            xuu: col(3),
            xuv: col(4),
            xvv: col(5),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Image under a linear map of the ambient space.
    pub fn map_linear(&self, m: &nalgebra::DMatrix<f64>) -> Jet {
        Jet {
            x: m * &self.x,
            xu: m * &self.xu,
            xv: m * &self.xv,
            xuu: m * &self.xuu,
            xuv: m * &self.xuv,
            xvv: m * &self.xvv,
        }
    }

    pub fn gram(&self) -> (f64, f64, f64) {
        (
            self.xu.dot(&self.xu),
            self.xu.dot(&self.xv),
            self.xv.dot(&self.xv),
        )
    }

    pub fn max_abs_diff(&self, o: &Jet) -> f64 {
        [
            (&self.x, &o.x),
            (&self.xu, &o.xu),
            (&self.xv, &o.xv),
            (&self.xuu, &o.xuu),
            (&self.xuv, &o.xuv),
            (&self.xvv, &o.xvv),
        ]
        .iter()
        .map(|(a, b)| (*a - *b).amax())
        .fold(0.0, f64::max)
    }
}

pub(crate) fn v4(x: &DVector<f64>) -> Vector4<f64> {
    Vector4::new(x[0], x[1], x[2], x[3])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl Domain {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Self {
        Domain {
            u: (u0, u1),
            v: (v0, v1),
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let su = 1e-12 * (self.u.1 - self.u.0).abs().max(1.0);
        let sv = 1e-12 * (self.v.1 - self.v.0).abs().max(1.0);
        u >= self.u.0 - su && u <= self.u.1 + su && v >= self.v.0 - sv && v <= self.v.1 + sv
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u.0 + self.u.1), 0.5 * (self.v.0 + self.v.1))
    }
}

/// Uniform node grid including the domain edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub nu: usize,
    pub nv: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { nu: 64, nv: 64 }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.nu, self.nv)
    }
}

impl Grid {
    pub fn new(nu: usize, nv: usize) -> Self {
        Grid { nu, nv }
    }

    /// "64x64" or "64".
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || GeomError::Params(format!("grid '{s}' (expected NxM with N, M >= 2)"));
        let (a, b) = match s.split_once(['x', 'X']) {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let nu: usize = a.trim().parse().map_err(|_| bad())?;
        let nv: usize = b.trim().parse().map_err(|_| bad())?;
        if nu < 2 || nv < 2 {
            return Err(bad());
        }
        Ok(Grid { nu, nv })
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, d: &Domain) -> (f64, f64) {
        (
            (d.u.1 - d.u.0) / (self.nu - 1) as f64,
            (d.v.1 - d.v.0) / (self.nv - 1) as f64,
        )
    }

    pub fn node(&self, d: &Domain, i: usize, j: usize) -> (f64, f64) {
        let (hu, hv) = self.spacing(d);
        let u = if i + 1 == self.nu { d.u.1 } else { d.u.0 + i as f64 * hu };
        let v = if j + 1 == self.nv { d.v.1 } else { d.v.0 + j as f64 * hv };
        (u, v)
    }

    /// Nodes in row-major order: index = i * nv + j, i along u.
    pub fn nodes(&self, d: &Domain) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nu {
            for j in 0..self.nv {
                out.push(self.node(d, i, j));
            }
        }
        out
    }

    /// Nodes not on the domain boundary.
    pub fn interior_nodes(&self, d: &Domain) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.nu.saturating_sub(1) {
            for j in 1..self.nv.saturating_sub(1) {
                out.push(self.node(d, i, j));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    U,
    V,
}

/// A chart direction along which the immersion closes up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Period {
    pub dir: Direction,
    pub period: f64,
}

pub type ChartFn = Arc<dyn Fn(f64, f64) -> Jet + Send + Sync>;

#[derive(Clone)]
pub enum Chart {
    /// Closed-form position and derivatives.
    Analytic(ChartFn),
    /// One expression per ambient coordinate, differentiated by jet arithmetic.
    Expr(Vec<Expr>),
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Analytic(_) => write!(f, "Chart::Analytic"),
            Chart::Expr(e) => f
                .debug_tuple("Chart::Expr")
                .field(&e.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Immersion {
    pub id: String,
    pub ambient_dim: usize,
    pub chart: Chart,
    pub domain: Domain,
    pub params: BTreeMap<String, f64>,
    pub periods: Vec<Period>,
}

impl Immersion {
    pub fn analytic<F>(id: &str, ambient_dim: usize, domain: Domain, f: F) -> Self
    where
        F: Fn(f64, f64) -> Jet + Send + Sync + 'static,
    {
        Immersion {
            id: id.to_string(),
            ambient_dim,
            chart: Chart::Analytic(Arc::new(f)),
            domain,
            params: BTreeMap::new(),
            periods: Vec::new(),
        }
    }

    pub fn from_config(cfg: &ImmersionConfig) -> Result<Self> {
        cfg.validate().map_err(GeomError::Params)?;
        let comps = cfg.parse_components()?;
        let [[u0, u1], [v0, v1]] = cfg.domain;
        let periods = cfg
            .periods
            .iter()
            .map(|p| Period {
                dir: if p.var == "u" { Direction::U } else { Direction::V },
                period: p.period,
            })
            .collect();
        let imm = Immersion {
            id: cfg.name.clone(),
            ambient_dim: cfg.ambient_dim,
            chart: Chart::Expr(comps),
            domain: Domain::new(u0, u1, v0, v1),
            params: cfg.params.clone(),
            periods,
        };
        // Surface unbound parameters and evaluation errors at load time.
        let (uc, vc) = imm.domain.center();
        imm.eval_raw(uc, vc)?;
        Ok(imm)
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_periods(mut self, periods: Vec<Period>) -> Self {
        self.periods = periods;
        self
    }

    /// Evaluate without domain or immersion checks (used for differencing
    /// just outside grid edges).
    pub fn eval_raw(&self, u: f64, v: f64) -> Result<Jet> {
        match &self.chart {
            Chart::Analytic(f) => Ok(f(u, v)),
            Chart::Expr(es) => {
                let mut rows = Vec::with_capacity(es.len());
                for e in es {
                    let j = eval_jet2(e, u, v, &self.params)?;
                    rows.push([j.val, j.du, j.dv, j.duu, j.duv, j.dvv]);
                }
                Ok(Jet::from_components(&rows))
            }
        }
    }

    pub fn jet_at(&self, u: f64, v: f64) -> Result<Jet> {
        if !self.domain.contains(u, v) {
            return Err(GeomError::Domain { u, v });
        }
        let jet = self.eval_raw(u, v)?;
        check_immersion(&jet, u, v)?;
        Ok(jet)
    }

    pub fn position(&self, u: f64, v: f64) -> Result<DVector<f64>> {
        Ok(self.eval_raw(u, v)?.x)
    }
}

pub(crate) fn check_immersion(jet: &Jet, u: f64, v: f64) -> Result<()> {
    let (e, f, g) = jet.gram();
    let gram = e * g - f * f;
    if !gram.is_finite() || gram <= tol::IMMERSION_GRAM {
        return Err(GeomError::NotImmersion { u, v, gram });
    }
    Ok(())
}

/// Richardson-extrapolated central difference, fourth order in h.
pub fn richardson<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Richardson difference of a vector-valued function.
pub fn richardson_vec<F>(f: F, x: f64, h: f64) -> Result<DVector<f64>>
where
    F: Fn(f64) -> Result<DVector<f64>>,
{
    let d = |h: f64| -> Result<DVector<f64>> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

/// Finite-difference 2-jet of an immersion (test oracle only).
pub fn jet_by_differences(imm: &Immersion, u: f64, v: f64, h: f64) -> Result<Jet> {
    let pos = |a: f64, b: f64| imm.position(a, b);
    let x = pos(u, v)?;
    let xu = richardson_vec(|a| pos(a, v), u, h)?;
    let xv = richardson_vec(|b| pos(u, b), v, h)?;
    let second = |dir: u8| -> Result<DVector<f64>> {
        let d2 = |h: f64| -> Result<DVector<f64>> {
            Ok(match dir {
                0 => (pos(u + h, v)? - &x * 2.0 + pos(u - h, v)?) / (h * h),
                1 => (pos(u, v + h)? - &x * 2.0 + pos(u, v - h)?) / (h * h),
                _ => {
                    (pos(u + h, v + h)? - pos(u + h, v - h)? - pos(u - h, v + h)?
                        + pos(u - h, v - h)?)
                        / (4.0 * h * h)
                }
            })
        };
        Ok((d2(h / 2.0)? * 4.0 - d2(h)?) / 3.0)
    };
    Ok(Jet {
        xuu: second(0)?,
        xvv: second(1)?,
        xuv: second(2)?,
        x,
        xu,
        xv,
    })
}
