//! Exterior algebra of E^4, the Hodge star and the splitting of bivectors into
//! self-dual and anti-self-dual parts. A small dense facility for
//! `∧^{2k} E^{2m}` (2m <= 8, k <= 2) covers the Kaehler-form pairings.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::tol;

pub type Vec4 = Vector4<f64>;

/// Index pairs of the basis 2-vectors, in serialization order (12,13,14,23,24,34).
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Element of ∧²E⁴ in the basis ε_i∧ε_j, i<j.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TwoVector(pub [f64; 6]);

impl TwoVector {
    pub const ZERO: TwoVector = TwoVector([0.0; 6]);

    pub fn new(c: [f64; 6]) -> Self {
        TwoVector(c)
    }

    /// ε_i∧ε_j for 0-based indices; antisymmetric in (i, j).
    pub fn basis(i: usize, j: usize) -> Self {
        let mut c = [0.0; 6];
        if i == j {
            return TwoVector(c);
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS.iter().position(|&p| p == (a, b)).expect("index < 4");
        c[k] = sign;
        TwoVector(c)
    }

    pub fn coords(&self) -> [f64; 6] {
        self.0
    }

    /// Coefficient of ε_i∧ε_j (antisymmetric in the indices).
    pub fn component(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let k = PAIRS.iter().position(|&p| p == (a, b)).expect("index < 4");
        sign * self.0[k]
    }

    pub fn dot(&self, o: &TwoVector) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        TwoVector(self.0.map(|x| x * s))
    }

    pub fn hodge(&self) -> Self {
        hodge_star(self)
    }

    /// <*ξ, ξ>; vanishes exactly on decomposable 2-vectors.
    pub fn star_pairing(&self) -> f64 {
        self.hodge().dot(self)
    }

    pub fn is_decomposable(&self) -> bool {
        let n2 = self.dot(self);
        self.star_pairing().abs() <= tol::DECOMPOSABLE * n2.max(f64::MIN_POSITIVE)
    }

    /// Coordinates in the η-basis (η₁ … η₆).
    pub fn to_eta(&self) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.dot(&eta(k + 1));
        }
        out
    }

    pub fn from_eta(e: [f64; 6]) -> Self {
        let mut acc = TwoVector::ZERO;
        for (k, x) in e.iter().enumerate() {
            acc = acc + eta(k + 1).scale(*x);
        }
        acc
    }

    /// (η₁, η₂, η₃) coordinates: the self-dual part as a 3-vector.
    pub fn eta_plus(&self) -> Vector3<f64> {
        let e = self.to_eta();
        Vector3::new(e[0], e[1], e[2])
    }

    /// (η₄, η₅, η₆) coordinates: the anti-self-dual part as a 3-vector.
    pub fn eta_minus(&self) -> Vector3<f64> {
        let e = self.to_eta();
        Vector3::new(e[3], e[4], e[5])
    }

    pub fn from_eta_plus(x: &Vector3<f64>) -> Self {
        TwoVector::from_eta([x[0], x[1], x[2], 0.0, 0.0, 0.0])
    }

    pub fn from_eta_minus(x: &Vector3<f64>) -> Self {
        TwoVector::from_eta([0.0, 0.0, 0.0, x[0], x[1], x[2]])
    }

    /// The antisymmetric matrix with entries ξ_ij.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[(i, j)] = self.0[k];
            m[(j, i)] = -self.0[k];
        }
        m
    }

    pub fn max_abs_diff(&self, o: &TwoVector) -> f64 {
        self.0
            .iter()
            .zip(o.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for TwoVector {
    type Output = TwoVector;
    fn add(self, o: TwoVector) -> TwoVector {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0.iter()) {
            *x += y;
        }
        TwoVector(c)
    }
}

impl Sub for TwoVector {
    type Output = TwoVector;
    fn sub(self, o: TwoVector) -> TwoVector {
        self + (-o)
    }
}

impl Neg for TwoVector {
    type Output = TwoVector;
    fn neg(self) -> TwoVector {
        TwoVector(self.0.map(|x| -x))
    }
}

impl Mul<f64> for TwoVector {
    type Output = TwoVector;
    fn mul(self, s: f64) -> TwoVector {
        self.scale(s)
    }
}

/// η_k, 1-based: η₁…η₃ span the +1 eigenspace of *, η₄…η₆ the −1 eigenspace.
pub fn eta(k: usize) -> TwoVector {
    match k {
        1 => TwoVector([S, 0.0, 0.0, 0.0, 0.0, S]),
        2 => TwoVector([0.0, S, 0.0, 0.0, -S, 0.0]),
        3 => TwoVector([0.0, 0.0, S, S, 0.0, 0.0]),
        4 => TwoVector([S, 0.0, 0.0, 0.0, 0.0, -S]),
        5 => TwoVector([0.0, S, 0.0, 0.0, S, 0.0]),
        6 => TwoVector([0.0, 0.0, S, -S, 0.0, 0.0]),
        _ => panic!("eta index {k} out of range 1..=6"),
    }
}

pub fn wedge2(x: &Vec4, y: &Vec4) -> TwoVector {
    let mut c = [0.0; 6];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        c[k] = x[i] * y[j] - x[j] * y[i];
    }
    TwoVector(c)
}

/// Defined by <*ξ, η> ε₁∧ε₂∧ε₃∧ε₄ = ξ∧η.
pub fn hodge_star(xi: &TwoVector) -> TwoVector {
    let c = xi.0;
    TwoVector([c[5], -c[4], c[3], c[2], -c[1], c[0]])
}

/// (π₊ξ, π₋ξ) with π± = ½(ξ ± *ξ).
pub fn project_pm(xi: &TwoVector) -> (TwoVector, TwoVector) {
    let s = hodge_star(xi);
    ((*xi + s).scale(0.5), (*xi - s).scale(0.5))
}

/// Oriented 2-plane of E⁴ with a positive orthonormal basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedPlane {
    basis: [Vec4; 2],
    plucker: TwoVector,
}

impl OrientedPlane {
    pub fn new(e1: Vec4, e2: Vec4) -> Result<Self> {
        let err = (e1.norm_squared() - 1.0)
            .abs()
            .max((e2.norm_squared() - 1.0).abs())
            .max(e1.dot(&e2).abs());
        if !err.is_finite() || err > tol::ORTHONORMAL {
            return Err(GeomError::InvalidPlane(format!(
                "basis not orthonormal (error {err:e})"
            )));
        }
        Ok(OrientedPlane {
            basis: [e1, e2],
            plucker: wedge2(&e1, &e2),
        })
    }

    /// Gram–Schmidt on (x, y), keeping the orientation of the ordered pair.
    pub fn from_span(x: &Vec4, y: &Vec4) -> Result<Self> {
        let nx = x.norm();
        if nx < 1e-300 {
            return Err(GeomError::InvalidPlane("zero first vector".into()));
        }
        let e1 = x / nx;
        let w = y - e1 * e1.dot(y);
        let nw = w.norm();
        if nw <= 1e-12 * y.norm().max(1e-300) {
            return Err(GeomError::InvalidPlane("vectors are parallel".into()));
        }
        OrientedPlane::new(e1, w / nw)
    }

    pub fn basis(&self) -> [Vec4; 2] {
        self.basis
    }

    pub fn e1(&self) -> Vec4 {
        self.basis[0]
    }

    pub fn e2(&self) -> Vec4 {
        self.basis[1]
    }

    pub fn plucker(&self) -> TwoVector {
        self.plucker
    }

    pub fn reversed(&self) -> Self {
        OrientedPlane {
            basis: [self.basis[1], self.basis[0]],
            plucker: -self.plucker,
        }
    }

    /// Rotate the basis inside the plane; the Plücker image is unchanged.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let [e1, e2] = self.basis;
        OrientedPlane {
            basis: [e1 * c + e2 * s, -e1 * s + e2 * c],
            plucker: self.plucker,
        }
    }

    /// Orthonormal (e3, e4) with (e1, e2, e3, e4) positively oriented.
    pub fn complement_basis(&self) -> [Vec4; 2] {
        let [e1, e2] = self.basis;
        let [e3, e4] = complete_normal(&e1, &e2);
        [e3, e4]
    }

    pub fn complement(&self) -> OrientedPlane {
        let [e3, e4] = self.complement_basis();
        OrientedPlane {
            basis: [e3, e4],
            plucker: wedge2(&e3, &e4),
        }
    }
}

/// Deterministic orthonormal completion of an orthonormal pair to a positive
/// basis of E⁴: the canonical vectors with the largest residuals are
/// orthogonalized in turn, then e4 is flipped if needed.
pub fn complete_normal(e1: &Vec4, e2: &Vec4) -> [Vec4; 2] {
    let mut cands: Vec<(f64, Vec4)> = (0..4)
        .map(|i| {
            let mut r = Vec4::zeros();
            r[i] = 1.0;
            let r = r - e1 * e1.dot(&r) - e2 * e2.dot(&r);
            (r.norm(), r)
        })
        .collect();
    cands.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let e3 = cands[0].1 / cands[0].0;
    let mut e4 = Vec4::zeros();
    for (_, r) in cands.iter().skip(1) {
        let w = r - e3 * e3.dot(r);
        let w = w - e1 * e1.dot(&w) - e2 * e2.dot(&w);
        if w.norm() > 1e-6 {
            e4 = w.normalize();
            break;
        }
    }
    let m = Matrix4::from_columns(&[*e1, *e2, e3, e4]);
    if m.determinant() < 0.0 {
        e4 = -e4;
    }
    [e3, e4]
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Ordered index sets of size `k` from `0..n`, lexicographic.
pub fn index_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Dense element of ∧^{2k} E^{2m}, 2m <= 8, k <= 2.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiVector2k {
    dim: usize,
    degree: usize,
    coords: Vec<f64>,
}

fn check_size(dim: usize, degree: usize) -> Result<()> {
    if dim % 2 != 0 || dim == 0 || dim > 8 {
        return Err(GeomError::Unsupported(format!(
            "ambient dimension {dim} (need even, <= 8)"
        )));
    }
    if degree % 2 != 0 || degree == 0 || degree > 4 || degree > dim {
        return Err(GeomError::Unsupported(format!(
            "degree {degree} (need 2 or 4, <= dimension)"
        )));
    }
    Ok(())
}

impl MultiVector2k {
    pub fn from_coords(dim: usize, degree: usize, coords: Vec<f64>) -> Result<Self> {
        check_size(dim, degree)?;
        let n = binomial(dim, degree);
        if coords.len() != n {
            return Err(GeomError::Unsupported(format!(
                "expected {n} coordinates, got {}",
                coords.len()
            )));
        }
        Ok(MultiVector2k { dim, degree, coords })
    }

    /// X₁∧…∧X_{2k}; coordinates are the maximal minors.
    pub fn wedge(vectors: &[DVector<f64>]) -> Result<Self> {
        let degree = vectors.len();
        let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
        check_size(dim, degree)?;
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(GeomError::Unsupported("vectors of mixed dimension".into()));
        }
        let coords = index_sets(dim, degree)
            .iter()
            .map(|rows| {
                DMatrix::from_fn(degree, degree, |r, c| vectors[c][rows[r]]).determinant()
            })
            .collect();
        Ok(MultiVector2k { dim, degree, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, o: &MultiVector2k) -> f64 {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree));
        self.coords.iter().zip(&o.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// All permutations of `0..n` with their signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            let s = if inv % 2 == 0 { 1.0 } else { -1.0 };
            (p, s)
        })
        .collect()
}

/// Ω^k(X₁,…,X_{2k}) through the signed permutation sum divided by (2k)!,
/// where `omega` holds the form as Ω(X, Y) = Xᵀ·omega·Y.
pub fn omega_power_pairing(omega: &DMatrix<f64>, vectors: &[DVector<f64>]) -> Result<f64> {
    let n = vectors.len();
    if n == 0 || n % 2 != 0 {
        return Err(GeomError::Unsupported(format!(
            "need an even, positive number of vectors (got {n})"
        )));
    }
    if n > 4 {
        return Err(GeomError::Unsupported(format!(
            "k = {} exceeds the supported k <= 2",
            n / 2
        )));
    }
    let dim = omega.nrows();
    if omega.ncols() != dim || dim > 8 || vectors.iter().any(|v| v.len() != dim) {
        return Err(GeomError::Unsupported("form/vector dimension mismatch".into()));
    }
    let gram = DMatrix::from_fn(n, n, |a, b| vectors[a].dot(&(omega * &vectors[b])));
    let mut total = 0.0;
    for (p, s) in signed_permutations(n) {
        let mut prod = s;
        for pair in p.chunks(2) {
            prod *= gram[(pair[0], pair[1])];
        }
        total += prod;
    }
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    Ok(total / fact)
}

/// Block complex structure J₀(a, b) = (−b, a) on E^{2m} as a matrix.
pub fn j0_block(dim: usize) -> DMatrix<f64> {
    let m = dim / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..m {
        j[(i + m, i)] = 1.0;
        j[(i, i + m)] = -1.0;
    }
    j
}

/// Kaehler form Ω₀(X, Y) = <X, J₀Y> of the block structure, as a matrix.
pub fn kaehler_form_j0(dim: usize) -> DMatrix<f64> {
    j0_block(dim)
}

/// ζ̂₀ in ∧^{2k}E^{2m}: coordinates (−1)^k Ω₀^k(ε_I).
pub fn zeta_hat(dim: usize, degree: usize) -> Result<MultiVector2k> {
    check_size(dim, degree)?;
    let omega = kaehler_form_j0(dim);
    let k = degree / 2;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let coords = index_sets(dim, degree)
        .iter()
        .map(|idx| {
            let vs: Vec<DVector<f64>> = idx
                .iter()
                .map(|&i| {
                    let mut e = DVector::zeros(dim);
                    e[i] = 1.0;
                    e
                })
                .collect();
            omega_power_pairing(&omega, &vs).map(|x| sign * x)
        })
        .collect::<Result<Vec<f64>>>()?;
    MultiVector2k::from_coords(dim, degree, coords)
}

/// <ζ̂₀, V> by coordinate pairing in the ambient E^{2m}, 2m = `dim`.
pub fn zeta_hat_pairing(v: &MultiVector2k, dim: usize) -> Result<f64> {
    if v.dim() != dim {
        return Err(GeomError::Unsupported(format!(
            "multivector lives in dimension {}, not {dim}",
            v.dim()
        )));
    }
    Ok(zeta_hat(dim, v.degree())?.dot(v))
}

/// Orthonormal 2k-frame in E^{2m} spanning a plane of slant angle α for the
/// block structure: pairs (ε_{2i}, cos α J₀ε_{2i} + sin α ε_{2i+1}), i < k.
pub fn slant_plane_frame(dim: usize, k: usize, alpha: f64) -> Result<Vec<DVector<f64>>> {
    check_size(dim, 2 * k)?;
    if 4 * k > dim {
        return Err(GeomError::Unsupported(format!(
            "a {}-plane of constant slant needs dim >= {}, got {dim}",
            2 * k,
            4 * k
        )));
    }
    let m = dim / 2;
    let e = |i: usize| {
        let mut x = DVector::zeros(dim);
        x[i] = 1.0;
        x
    };
    let (s, c) = alpha.sin_cos();
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        out.push(e(2 * i));
        out.push(e(2 * i + m) * c + e(2 * i + 1) * s);
    }
    Ok(out)
}

/// μ_k = 2^k k! / (2k)!.
pub fn mu(k: usize) -> f64 {
    let kf: f64 = (1..=k).map(|i| i as f64).product();
    let k2f: f64 = (1..=2 * k).map(|i| i as f64).product();
    2f64.powi(k as i32) * kf / k2f
}
