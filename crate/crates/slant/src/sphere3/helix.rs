use nalgebra::Vector3;
use serde::Serialize;

use super::{cross4, qexp_pure, qmul};
use crate::error::{GeomError, Result};
use crate::exterior::Vec4;
use crate::jets::{Domain, Immersion, Jet};

/// f₁ = b, f₂ = a cos(ks + s₀), f₃ = a sin(ks + s₀) with k = −2/b.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HelixParams {
    pub a: f64,
    pub b: f64,
    pub s0: f64,
}

fn pure(v: Vector3<f64>) -> Vec4 {
    Vec4::new(0.0, v[0], v[1], v[2])
}

fn vec3(q: &Vec4) -> Vector3<f64> {
    Vector3::new(q[1], q[2], q[3])
}

impl HelixParams {
    pub fn new(a: f64, b: f64, s0: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && s0.is_finite()) {
            return Err(GeomError::Params("helix parameters must be finite".into()));
        }
        if (a * a + b * b - 1.0).abs() > 1e-12 {
            return Err(GeomError::Params(format!("helix needs a^2 + b^2 = 1, got {}", a * a + b * b)));
        }
        if b == 0.0 {
            return Err(GeomError::Params("helix needs b != 0 (k = -2/b)".into()));
        }
        Ok(HelixParams { a, b, s0 })
    }

    pub fn k(&self) -> f64 {
        -2.0 / self.b
    }

    fn phase(&self, s: f64) -> f64 {
        self.k() * s + self.s0
    }

    /// (f₁, f₂, f₃) at s.
    pub fn components(&self, s: f64) -> [f64; 3] {
        let (sn, cs) = self.phase(s).sin_cos();
        [self.b, self.a * cs, self.a * sn]
    }

    /// ω(s) = Σ f_i X_i, so that c′ = c·ω.
    pub fn omega(&self, s: f64) -> Vector3<f64> {
        Vector3::from(self.components(s))
    }

    pub fn omega_dot(&self, s: f64) -> Vector3<f64> {
        let (sn, cs) = self.phase(s).sin_cos();
        let ak = self.a * self.k();
        Vector3::new(0.0, -ak * sn, ak * cs)
    }

    pub fn curvature(&self) -> f64 {
        (self.a * self.k()).abs()
    }

    /// Unit principal normal direction ν in T₁S³ (n = c·ν).
    pub fn nu(&self, s: f64) -> Vector3<f64> {
        let kap = self.curvature();
        if kap == 0.0 {
            return Vector3::zeros();
        }
        self.omega_dot(s) / kap
    }

    /// c(s) with c(0) = 1: exp(s(ω(0) + ik/2))·exp(−iks/2).
    pub fn closed_form(&self, s: f64) -> Vec4 {
        let w0 = self.omega(0.0);
        let h = 0.5 * self.k();
        let a = qexp_pure(s * w0[0] + s * h, s * w0[1], s * w0[2]);
        let b = qexp_pure(-h * s, 0.0, 0.0);
        qmul(&a, &b)
    }

    /// c, c′, c″ from the closed form.
    pub fn closed_form_jet(&self, s: f64) -> [Vec4; 3] {
        let c = self.closed_form(s);
        let w = pure(self.omega(s));
        let wd = pure(self.omega_dot(s));
        let c1 = qmul(&c, &w);
        // c″ = c(ω² + ω′) and ω² = −1.
        let c2 = qmul(&c, &(wd - Vec4::new(1.0, 0.0, 0.0, 0.0)));
        [c, c1, c2]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FrenetSample {
    pub s: f64,
    pub position: [f64; 4],
    pub t: [f64; 4],
    pub n: [f64; 4],
    pub b: [f64; 4],
    pub kappa: f64,
    pub tau: f64,
    pub f: [f64; 3],
}

/// Sampled helix with Frenet data.
#[derive(Clone, Debug, Serialize)]
pub struct Curve3Sphere {
    pub params: HelixParams,
    pub samples: Vec<FrenetSample>,
    /// Uniform sample spacing.
    pub spacing: f64,
}

impl Curve3Sphere {
    pub fn positions(&self) -> Vec<Vec4> {
        self.samples.iter().map(|x| Vec4::from(x.position)).collect()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|x| (Vec4::from(x.position).norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// max |Σ f_i² − 1|.
    pub fn max_component_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|x| (x.f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// max |<b, X̃₁(c)> − a|.
    pub fn max_binormal_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|x| {
                let x1 = super::left_invariant_field(1, &Vec4::from(x.position));
                (Vec4::from(x.b).dot(&x1) - self.params.a).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Classical fourth-order integration of c′ = c·(f₁X₁ + f₂X₂ + f₃X₃) from
/// (s_start, c0) to s_end in `steps` equal steps, renormalizing each step.
pub fn integrate_left_invariant<F>(f: F, c0: Vec4, s_start: f64, s_end: f64, steps: usize) -> Vec4
where
    F: Fn(f64) -> [f64; 3],
{
    let steps = steps.max(1);
    let h = (s_end - s_start) / steps as f64;
    let rhs = |s: f64, c: &Vec4| {
        let w = f(s);
        qmul(c, &Vec4::new(0.0, w[0], w[1], w[2]))
    };
    let mut c = c0;
    for i in 0..steps {
        let s = s_start + i as f64 * h;
        let k1 = rhs(s, &c);
        let k2 = rhs(s + 0.5 * h, &(c + k1 * (0.5 * h)));
        let k3 = rhs(s + 0.5 * h, &(c + k2 * (0.5 * h)));
        let k4 = rhs(s + h, &(c + k3 * h));
        c += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        c /= c.norm();
    }
    c
}

/// Integrate the helix from c(0) = 1 and sample it uniformly over `s_range`
/// (`n_samples` ≥ 2 points, endpoints included). Integration step is at most
/// range/8192. Frenet data use the closed-form f_i at the integrated points.
pub fn helix(params: &HelixParams, s_range: (f64, f64), n_samples: usize) -> Result<Curve3Sphere> {
    let (s_a, s_b) = s_range;
    if n_samples < 2 || !(s_b > s_a) {
        return Err(GeomError::Params("helix sampling needs s1 > s0 and at least 2 samples".into()));
    }
    let max_step = (s_b - s_a) / 8192.0;
    let f = |s: f64| params.components(s);
    let substeps = |len: f64| ((len.abs() / max_step).ceil() as usize).max(1);
    let mut c = integrate_left_invariant(f, Vec4::new(1.0, 0.0, 0.0, 0.0), 0.0, s_a, substeps(s_a));
    let spacing = (s_b - s_a) / (n_samples - 1) as f64;
    let mut samples = Vec::with_capacity(n_samples);
    let mut s_prev = s_a;
    for i in 0..n_samples {
        let s = if i + 1 == n_samples { s_b } else { s_a + i as f64 * spacing };
        if i > 0 {
            c = integrate_left_invariant(f, c, s_prev, s, substeps(s - s_prev));
        }
        s_prev = s;
        samples.push(frenet_at(params, s, c));
    }
    Ok(Curve3Sphere {
        params: *params,
        samples,
        spacing,
    })
}

fn frenet_at(p: &HelixParams, s: f64, c: Vec4) -> FrenetSample {
    let w = p.omega(s);
    let kappa = p.curvature();
    let t = qmul(&c, &pure(w));
    let (n, b, tau) = if kappa == 0.0 {
        (Vec4::zeros(), Vec4::zeros(), 0.0)
    } else {
        let nu = p.nu(s);
        let bv = w.cross(&nu);
        // ν′ for ν = ω′/κ.
        let (sn, cs) = p.phase(s).sin_cos();
        let sg = (p.a * p.k()).signum();
        let nu_dot = Vector3::new(0.0, -cs, -sn) * (sg * p.k());
        let tau = bv.norm_squared() + nu_dot.dot(&bv);
        (qmul(&c, &pure(nu)), qmul(&c, &pure(bv)), tau)
    };
    FrenetSample {
        s,
        position: c.into(),
        t: t.into(),
        n: n.into(),
        b: b.into(),
        kappa,
        tau,
        f: p.components(s),
    }
}

/// Frenet data recomputed from sample positions alone.
#[derive(Clone, Debug, Serialize)]
pub struct StencilFrenet {
    pub s: Vec<f64>,
    pub kappa: Vec<f64>,
    pub tau: Vec<f64>,
    /// Binormal pairing <b, X̃₁(c)>.
    pub binormal_x1: Vec<f64>,
}

/// Five-point stencils on uniformly spaced samples: t = c′, κn = c″ + c,
/// b = the 4D cross product of (c, t, n), τ = <c‴, b>/κ.
pub fn stencil_frenet(curve: &Curve3Sphere) -> Result<StencilFrenet> {
    let p = curve.positions();
    let n = p.len();
    if n < 5 {
        return Err(GeomError::InsufficientSamples { need: 5, got: n });
    }
    let h = curve.spacing;
    let mut out = StencilFrenet {
        s: Vec::new(),
        kappa: Vec::new(),
        tau: Vec::new(),
        binormal_x1: Vec::new(),
    };
    for i in 2..n - 2 {
        let (m2, m1, x, p1, p2) = (p[i - 2], p[i - 1], p[i], p[i + 1], p[i + 2]);
        let d1 = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h);
        let d2 = (-m2 + m1 * 16.0 - x * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h);
        let d3 = (-m2 + m1 * 2.0 - p1 * 2.0 + p2) / (2.0 * h * h * h);
        let acc = d2 + x;
        let kappa = acc.norm();
        let t = d1.normalize();
        let nn = acc / kappa;
        let b = cross4(&x, &t, &nn);
        let b = b / b.norm();
        out.s.push(curve.samples[i].s);
        out.kappa.push(kappa);
        out.tau.push(d3.dot(&b) / kappa);
        out.binormal_x1.push(b.dot(&super::left_invariant_field(1, &x)));
    }
    Ok(out)
}

/// Helical cylinder f(s, t) = γ(t)·c(s) with γ(t) = cos t + sin t·w the
/// geodesic through 1 in direction w. `w` defaults to the principal normal
/// of c at s = 0 and must lie in the osculating plane span(c′(0), n(0)).
/// Chart (u, v) = (s, t) on [−0.8, 0.8] × [−1/2, 1/2]; the construction is
/// local and for a = 0.6, b = −0.8 it stops being immersive at s = ±π/3.
pub fn helical_cylinder(params: &HelixParams, w: Option<Vec4>) -> Result<Immersion> {
    if params.a * params.b >= 0.0 {
        return Err(GeomError::Params(format!(
            "helical cylinder needs ab < 0, got a = {}, b = {}",
            params.a, params.b
        )));
    }
    let t0 = params.omega(0.0);
    let n0 = params.nu(0.0);
    let w = match w {
        None => n0,
        Some(q) => {
            if q[0].abs() > 1e-12 || (q.norm() - 1.0).abs() > 1e-12 {
                return Err(GeomError::Params("geodesic direction must be a unit vector in T_1 S^3".into()));
            }
            let v = vec3(&q);
            let off = v - t0 * t0.dot(&v) - n0 * n0.dot(&v);
            if off.norm() > 1e-9 {
                return Err(GeomError::Params(
                    "geodesic direction must lie in the osculating plane of c at s = 0".into(),
                ));
            }
            if t0.dot(&v).abs() > 1.0 - 1e-9 {
                return Err(GeomError::Params("geodesic direction is tangent to c; surface degenerates".into()));
            }
            v
        }
    };
    let wq = pure(w);
    let p = *params;
    let imm = Immersion::analytic("helical-cylinder", 4, Domain::new(-0.8, 0.8, -0.5, 0.5), move |s, t| {
        let [c, c1, c2] = p.closed_form_jet(s);
        let (st, ct) = t.sin_cos();
        let one = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let g = one * ct + wq * st;
        let g1 = -one * st + wq * ct;
        let cols = [
            qmul(&g, &c),
            qmul(&g, &c1),
            qmul(&g1, &c),
            qmul(&g, &c2),
            qmul(&g1, &c1),
            -qmul(&g, &c),
        ];
        let rows: Vec<[f64; 6]> = (0..4)
            .map(|r| [cols[0][r], cols[1][r], cols[2][r], cols[3][r], cols[4][r], cols[5][r]])
            .collect();
        Jet::from_components(&rows)
    });
    Ok(imm)
}
