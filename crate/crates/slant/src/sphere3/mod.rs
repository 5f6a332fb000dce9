//! The unit quaternions S³ ⊂ E⁴: translations, left-invariant fields, the
//! involution φ, helices with axis X̃₁, helical cylinders and the flat ruled
//! surfaces that are slant for J₁.

mod helix;
pub mod ruled;

use nalgebra::{Matrix4, Quaternion};

use crate::error::{GeomError, Result};
use crate::exterior::Vec4;
use crate::jets::{Chart, Immersion};
use crate::tol;

pub use helix::{
    helical_cylinder, helix, integrate_left_invariant, stencil_frenet, Curve3Sphere, FrenetSample, HelixParams,
    StencilFrenet,
};

/// Quaternion a + ib + jc + kd stored as (a, b, c, d).
fn to_q(v: &Vec4) -> Quaternion<f64> {
    Quaternion::new(v[0], v[1], v[2], v[3])
}

fn from_q(q: &Quaternion<f64>) -> Vec4 {
    Vec4::new(q.w, q.i, q.j, q.k)
}

pub fn qmul(p: &Vec4, q: &Vec4) -> Vec4 {
    from_q(&(to_q(p) * to_q(q)))
}

pub fn qconj(p: &Vec4) -> Vec4 {
    Vec4::new(p[0], -p[1], -p[2], -p[3])
}

/// exp of a pure quaternion (0, x, y, z).
pub fn qexp_pure(x: f64, y: f64, z: f64) -> Vec4 {
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return Vec4::new(1.0, 0.0, 0.0, 0.0);
    }
    let s = r.sin() / r;
    Vec4::new(r.cos(), s * x, s * y, s * z)
}

/// A point of S³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuat(Vec4);

impl UnitQuat {
    pub fn new(v: Vec4) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > tol::UNIT {
            return Err(GeomError::NonUnit(n));
        }
        Ok(UnitQuat(v))
    }

    pub fn identity() -> Self {
        UnitQuat(Vec4::new(1.0, 0.0, 0.0, 0.0))
    }

    pub fn coords(&self) -> Vec4 {
        self.0
    }

    pub fn mul(&self, o: &UnitQuat) -> UnitQuat {
        UnitQuat(qmul(&self.0, &o.0))
    }

    pub fn inverse(&self) -> UnitQuat {
        UnitQuat(qconj(&self.0))
    }
}

pub fn left_translate(p: &UnitQuat, q: &UnitQuat) -> UnitQuat {
    p.mul(q)
}

pub fn right_translate(p: &UnitQuat, q: &UnitQuat) -> UnitQuat {
    q.mul(p)
}

/// Matrix of L_p: q ↦ pq (also its pushforward on tangent vectors).
pub fn left_matrix(p: &Vec4) -> Matrix4<f64> {
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    Matrix4::new(a, -b, -c, -d, b, a, -d, c, c, d, a, -b, d, -c, b, a)
}

/// Matrix of R_p: q ↦ qp.
pub fn right_matrix(p: &Vec4) -> Matrix4<f64> {
    let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
    Matrix4::new(a, -b, -c, -d, b, a, d, -c, c, -d, a, b, d, c, -b, a)
}

/// X₁, X₂, X₃ = i, j, k in T₁S³.
pub fn x_basis(i: usize) -> Vec4 {
    let mut v = Vec4::zeros();
    v[i] = 1.0;
    v
}

/// Left-invariant field X̃_i(q) = q·X_i, i ∈ {1, 2, 3}.
pub fn left_invariant_field(i: usize, q: &Vec4) -> Vec4 {
    qmul(q, &x_basis(i))
}

/// Right-invariant field q ↦ X_i·q.
pub fn right_invariant_field(i: usize, q: &Vec4) -> Vec4 {
    qmul(&x_basis(i), q)
}

/// φ(a, b, c, d) = (a, b, d, c).
pub fn phi(v: &Vec4) -> Vec4 {
    Vec4::new(v[0], v[1], v[3], v[2])
}

pub fn phi_matrix() -> Matrix4<f64> {
    Matrix4::new(1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.)
}

/// φ∘f as an immersion.
pub fn phi_compose(imm: &Immersion) -> Result<Immersion> {
    if imm.ambient_dim != 4 {
        return Err(GeomError::AmbientDim {
            got: imm.ambient_dim,
            expected: 4,
        });
    }
    let mut out = match &imm.chart {
        Chart::Expr(es) => {
            let mut o = imm.clone();
            o.chart = Chart::Expr(vec![es[0].clone(), es[1].clone(), es[3].clone(), es[2].clone()]);
            o
        }
        Chart::Analytic(f) => {
            let f = f.clone();
            let m = nalgebra::DMatrix::from_fn(4, 4, |r, c| phi_matrix()[(r, c)]);
            Immersion::analytic("", 4, imm.domain, move |u, v| f(u, v).map_linear(&m))
                .with_periods(imm.periods.clone())
                .with_params(imm.params.clone())
        }
    };
    out.id = format!("phi({})", imm.id);
    Ok(out)
}

/// The vector x with <x, y> = det[a, b, c, y] for every y.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let mut x = Vec4::zeros();
    for (i, xi) in x.iter_mut().enumerate() {
        let m = Matrix4::from_columns(&[*a, *b, *c, x_basis(i)]);
        *xi = m.determinant();
    }
    x
}

/// Position, orthonormal tangent frame and positive unit normal ξ in S³ of a
/// spherical surface; (f, e₁, e₂, ξ) is a positive basis of E⁴.
pub fn spherical_frame(imm: &Immersion, u: f64, v: f64) -> Result<(Vec4, [Vec4; 2], Vec4)> {
    if imm.ambient_dim != 4 {
        return Err(GeomError::AmbientDim {
            got: imm.ambient_dim,
            expected: 4,
        });
    }
    let j = imm.jet_at(u, v)?;
    let f = crate::jets::v4(&j.x);
    let xu = crate::jets::v4(&j.xu);
    let xv = crate::jets::v4(&j.xv);
    let e1 = xu.normalize();
    let e2 = (xv - e1 * e1.dot(&xv)).normalize();
    let xi = cross4(&f, &e1, &e2).normalize();
    Ok((f, [e1, e2], xi))
}

/// Spherical Gauss maps (g₊, g₋) at a point, as vectors in T₁S³:
/// g₊ = (L_{φ(f)})⁻¹ φ(ξ), g₋ = (L_f)⁻¹ ξ.
pub fn spherical_gauss_maps(imm: &Immersion, u: f64, v: f64) -> Result<(Vec4, Vec4)> {
    let (f, _, xi) = spherical_frame(imm, u, v)?;
    let gp = qmul(&qconj(&phi(&f)), &phi(&xi));
    let gm = qmul(&qconj(&f), &xi);
    Ok((gp, gm))
}

/// Largest |(|f| − 1)| over the nodes of a grid.
pub fn sphere_deviation(imm: &Immersion, grid: &crate::jets::Grid) -> Result<f64> {
    let mut m: f64 = 0.0;
    for (u, v) in grid.nodes(&imm.domain) {
        let x = imm.position(u, v)?;
        m = m.max((x.norm() - 1.0).abs());
    }
    Ok(m)
}
