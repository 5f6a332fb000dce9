//! Compatible complex structures on E⁴, their dual 2-vectors ζ_J, orientation
//! classes and the angle a complex structure makes with an oriented plane.

use std::f64::consts::SQRT_2;
use std::fmt;

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::exterior::{hodge_star, j0_block, project_pm, OrientedPlane, TwoVector, Vec4, PAIRS};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationClass {
    Plus,
    Minus,
}

impl fmt::Display for OrientationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrientationClass::Plus => write!(f, "plus"),
            OrientationClass::Minus => write!(f, "minus"),
        }
    }
}

/// J with J² = −I and JᵀJ = I.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexStructure {
    matrix: Matrix4<f64>,
    zeta: TwoVector,
    class: OrientationClass,
}

impl Serialize for ComplexStructure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<[f64; 4]> = (0..4)
            .map(|r| [self.matrix[(r, 0)], self.matrix[(r, 1)], self.matrix[(r, 2)], self.matrix[(r, 3)]])
            .collect();
        let mut st = ser.serialize_struct("ComplexStructure", 3)?;
        st.serialize_field("matrix", &rows)?;
        st.serialize_field("zeta", &self.zeta.0)?;
        st.serialize_field("class", &self.class)?;
        st.end()
    }
}

impl ComplexStructure {
    pub fn new(matrix: Matrix4<f64>) -> Result<Self> {
        let sq = matrix * matrix + Matrix4::identity();
        let orth = matrix.transpose() * matrix - Matrix4::identity();
        let e_sq = sq.amax();
        let e_orth = orth.amax();
        if !(e_sq <= tol::STRUCTURE) || !(e_orth <= tol::STRUCTURE) {
            return Err(GeomError::InvalidStructure(format!(
                "|J^2 + I| = {e_sq:e}, |J^T J - I| = {e_orth:e}"
            )));
        }
        let zeta = zeta_from_matrix(&matrix);
        let star = hodge_star(&zeta);
        let plus = (zeta - star).norm();
        let minus = (zeta + star).norm();
        let class = if plus <= minus {
            OrientationClass::Plus
        } else {
            OrientationClass::Minus
        };
        Ok(ComplexStructure {
            matrix,
            zeta,
            class,
        })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn zeta(&self) -> TwoVector {
        self.zeta
    }

    pub fn class(&self) -> OrientationClass {
        self.class
    }

    pub fn apply(&self, x: &Vec4) -> Vec4 {
        self.matrix * x
    }

    /// Ω_J(X, Y) = <X, JY>.
    pub fn kaehler(&self, x: &Vec4, y: &Vec4) -> f64 {
        x.dot(&(self.matrix * y))
    }

    pub fn negated(&self) -> Self {
        ComplexStructure {
            matrix: -self.matrix,
            zeta: -self.zeta,
            class: self.class,
        }
    }

    pub fn max_abs_diff(&self, o: &ComplexStructure) -> f64 {
        (self.matrix - o.matrix).amax()
    }
}

fn zeta_from_matrix(m: &Matrix4<f64>) -> TwoVector {
    let mut c = [0.0; 6];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        c[k] = -m[(i, j)];
    }
    TwoVector(c)
}

/// (ζ_J)_ij = −<ε_i, Jε_j>.
pub fn zeta_of(j: &ComplexStructure) -> TwoVector {
    j.zeta
}

/// Inverse of `zeta_of` on the radius-√2 spheres of ∧²₊ and ∧²₋.
pub fn structure_from_zeta(zeta: &TwoVector) -> Result<ComplexStructure> {
    let n = zeta.norm();
    if (n - SQRT_2).abs() > tol::ZETA {
        return Err(GeomError::InvalidZeta(format!("norm {n}, expected sqrt(2)")));
    }
    let (p, m) = project_pm(zeta);
    let mixed = p.norm().min(m.norm());
    if mixed > tol::ZETA {
        return Err(GeomError::InvalidZeta(format!(
            "mixed type: self-dual part {}, anti-self-dual part {}",
            p.norm(),
            m.norm()
        )));
    }
    // Snap onto the pure eigenspace and the exact sphere before inverting.
    let pure = if p.norm() >= m.norm() { p } else { m };
    let pure = pure.scale(SQRT_2 / pure.norm());
    let matrix = -pure.to_matrix();
    ComplexStructure::new(matrix)
}

/// α_J(V) = arccos <Je₁, e₂> in [0, π].
pub fn alpha_of_plane(j: &ComplexStructure, v: &OrientedPlane) -> f64 {
    let c = j.apply(&v.e1()).dot(&v.e2());
    c.clamp(-1.0, 1.0).acos()
}

/// min(α, π − α).
pub fn wirtinger_of_alpha(alpha: f64) -> f64 {
    alpha.min(std::f64::consts::PI - alpha)
}

pub fn wirtinger_of_plane(j: &ComplexStructure, v: &OrientedPlane) -> f64 {
    wirtinger_of_alpha(alpha_of_plane(j, v))
}

/// (J_V⁺, J_V⁻): the structures of each class for which V is holomorphic.
pub fn j_v_plus_minus(v: &OrientedPlane) -> Result<(ComplexStructure, ComplexStructure)> {
    let (p, m) = project_pm(&v.plucker());
    Ok((
        structure_from_zeta(&p.scale(2.0))?,
        structure_from_zeta(&m.scale(2.0))?,
    ))
}

fn from_images(images: [[f64; 4]; 4]) -> Matrix4<f64> {
    // images[c] = J ε_c, stored as columns.
    Matrix4::from_fn(|r, c| images[c][r])
}

/// J₀(a₁, a₂, b₁, b₂) = (−b₁, −b₂, a₁, a₂).
pub fn j0() -> ComplexStructure {
    ComplexStructure::new(from_images([
        [0., 0., 1., 0.],
        [0., 0., 0., 1.],
        [-1., 0., 0., 0.],
        [0., -1., 0., 0.],
    ]))
    .expect("J0 valid")
}

/// J₁(a, b, c, d) = (−b, a, −d, c).
pub fn j1() -> ComplexStructure {
    ComplexStructure::new(from_images([
        [0., 1., 0., 0.],
        [-1., 0., 0., 0.],
        [0., 0., 0., 1.],
        [0., 0., -1., 0.],
    ]))
    .expect("J1 valid")
}

/// J₁⁻(a, b, c, d) = (−b, a, d, −c).
pub fn j1_minus() -> ComplexStructure {
    ComplexStructure::new(from_images([
        [0., 1., 0., 0.],
        [-1., 0., 0., 0.],
        [0., 0., 0., -1.],
        [0., 0., 1., 0.],
    ]))
    .expect("J1m valid")
}

/// J₂(a, b, c, d) = (b, −a, −d, c).
pub fn j2() -> ComplexStructure {
    ComplexStructure::new(from_images([
        [0., -1., 0., 0.],
        [1., 0., 0., 0.],
        [0., 0., 0., 1.],
        [0., 0., -1., 0.],
    ]))
    .expect("J2 valid")
}

/// J_α = cos α J₀ + sin α J₁⁻.
pub fn j_alpha(alpha: f64) -> ComplexStructure {
    let (s, c) = alpha.sin_cos();
    let m = j0().matrix * c + j1_minus().matrix * s;
    ComplexStructure::new(m).expect("J_alpha valid")
}

/// J₁⁻ on E^{2m} with m even: (a, b) ↦ (−a₂, a₁, …, b₂, −b₁, …).
pub fn j1_minus_2m(dim: usize) -> DMatrix<f64> {
    let m = dim / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for p in (0..m).step_by(2) {
        // a-block: (a_p, a_{p+1}) -> (-a_{p+1}, a_p)
        j[(p, p + 1)] = -1.0;
        j[(p + 1, p)] = 1.0;
        // b-block: (b_p, b_{p+1}) -> (b_{p+1}, -b_p)
        j[(m + p, m + p + 1)] = 1.0;
        j[(m + p + 1, m + p)] = -1.0;
    }
    j
}

/// J_α = cos α J₀ + sin α J₁⁻ on E^{4k}.
pub fn j_alpha_2m(dim: usize, alpha: f64) -> Result<DMatrix<f64>> {
    if dim % 4 != 0 || dim == 0 {
        return Err(GeomError::Unsupported(format!(
            "J_alpha needs dimension divisible by 4, got {dim}"
        )));
    }
    let (s, c) = alpha.sin_cos();
    Ok(j0_block(dim) * c + j1_minus_2m(dim) * s)
}

/// Radians as a number, "pi" or "pi/<n>".
fn parse_angle(text: &str) -> Option<f64> {
    let t = text.trim();
    if t == "pi" {
        return Some(std::f64::consts::PI);
    }
    if let Some(d) = t.strip_prefix("pi/") {
        return d.trim().parse::<f64>().ok().map(|d| std::f64::consts::PI / d);
    }
    t.parse().ok()
}

/// Look up a structure by id: "J0", "J1", "J1m", "J2", "Jalpha:<radians>",
/// each optionally prefixed with "-". Angles may be written "pi/<n>".
pub fn by_id(id: &str) -> Result<ComplexStructure> {
    let id = id.trim();
    if let Some(rest) = id.strip_prefix('-') {
        return by_id(rest).map(|j| j.negated());
    }
    if let Some(rest) = id.strip_prefix('+') {
        return by_id(rest);
    }
    match id {
        "J0" => Ok(j0()),
        "J1" => Ok(j1()),
        "J1m" => Ok(j1_minus()),
        "J2" => Ok(j2()),
        _ => {
            if let Some(a) = id.strip_prefix("Jalpha:") {
                let alpha = parse_angle(a).ok_or_else(|| GeomError::Params(format!("bad angle in '{id}'")))?;
                if !alpha.is_finite() {
                    return Err(GeomError::Params(format!("bad angle in '{id}'")));
                }
                Ok(j_alpha(alpha))
            } else {
                Err(GeomError::Unknown(format!("complex structure '{id}'")))
            }
        }
    }
}

/// Named structures with their negatives and a few members of the J_α family.
pub fn standard_structures() -> Vec<(String, ComplexStructure)> {
    let mut out = Vec::new();
    for id in ["J0", "J1", "J1m", "J2"] {
        let j = by_id(id).expect("named");
        out.push((id.to_string(), j));
        out.push((format!("-{id}"), j.negated()));
    }
    for (name, a) in [
        ("pi/6", std::f64::consts::FRAC_PI_6),
        ("pi/4", std::f64::consts::FRAC_PI_4),
        ("pi/3", std::f64::consts::FRAC_PI_3),
    ] {
        out.push((format!("Jalpha:{name}"), j_alpha(a)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::eta;

    #[test]
    fn named_classes() {
        assert_eq!(j1().class(), OrientationClass::Plus);
        assert_eq!(j2().class(), OrientationClass::Minus);
        assert_eq!(j0().class(), OrientationClass::Minus);
        assert_eq!(j1_minus().class(), OrientationClass::Minus);
    }

    #[test]
    fn j1_zeta() {
        let z = zeta_of(&j1());
        assert!(z.max_abs_diff(&TwoVector([1., 0., 0., 0., 0., 1.])) < 1e-15);
        assert!(z.max_abs_diff(&eta(1).scale(SQRT_2)) < 1e-15);
    }

    #[test]
    fn eta5_inverts_to_j0() {
        let j = structure_from_zeta(&eta(5).scale(SQRT_2)).unwrap();
        assert!(j.max_abs_diff(&j0()) < 1e-15);
    }

    #[test]
    fn rejects_mixed() {
        let z = (eta(1) + eta(4)).scale(1.0);
        assert!(structure_from_zeta(&z).is_err());
        assert!(structure_from_zeta(&eta(1)).is_err());
    }

    #[test]
    fn ids() {
        assert!(by_id("-J2").unwrap().max_abs_diff(&j2().negated()) < 1e-15);
        assert!(by_id("Jalpha:0").unwrap().max_abs_diff(&j0()) < 1e-15);
        assert!(by_id("J9").is_err());
        assert!(by_id("Jalpha:x").is_err());
    }

    #[test]
    fn j_alpha_2m_is_complex() {
        for dim in [4, 8] {
            let j = j_alpha_2m(dim, 0.7).unwrap();
            let e = &j * &j + DMatrix::identity(dim, dim);
            assert!(e.amax() < 1e-14);
        }
        let m4 = j1_minus_2m(4);
        let direct = j1_minus();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m4[(r, c)], direct.matrix()[(r, c)]);
            }
        }
    }
}
