//! Named fixture surfaces with closed-form 2-jets.
//!
//! Ids may carry inline parameters: `"ex2.4:k=2"`, `"helical-cylinder:a=0.6,b=-0.8"`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use serde::Serialize;

use super::{Direction, Domain, Immersion, Jet, Period};
use crate::cxstruct::{self, ComplexStructure};
use crate::error::{GeomError, Result};
use crate::exterior::j0_block;
use crate::sphere3;

const TAU: f64 = 2.0 * PI;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub ambient_dim: usize,
    pub params: &'static [(&'static str, f64)],
    /// Structure under which the surface is slant, with `{alpha}` standing
    /// for the `alpha` parameter. `None` when no standard structure applies.
    pub structure: Option<&'static str>,
    /// How the structure was matched to the printed angle.
    pub convention: &'static str,
}

impl CatalogEntry {
    pub fn defaults(&self) -> BTreeMap<String, f64> {
        self.params.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    /// Resolved structure id for the given parameters.
    pub fn structure_id(&self, params: &BTreeMap<String, f64>) -> Option<String> {
        self.structure.map(|s| {
            let a = params.get("alpha").copied().unwrap_or(FRAC_PI_4);
            s.replace("{alpha}", &format!("{a}"))
        })
    }

    /// The slant structure on E⁴, if the entry is four-dimensional.
    pub fn structure4(&self, params: &BTreeMap<String, f64>) -> Result<Option<ComplexStructure>> {
        if self.ambient_dim != 4 {
            return Ok(None);
        }
        self.structure_id(params).map(|s| cxstruct::by_id(&s)).transpose()
    }

    /// The slant structure as a matrix in the entry's ambient dimension.
    pub fn structure_matrix(&self, params: &BTreeMap<String, f64>) -> Result<Option<DMatrix<f64>>> {
        if self.ambient_dim == 4 {
            return Ok(self.structure4(params)?.map(|j| {
                let m = j.matrix();
                DMatrix::from_fn(4, 4, |r, c| m[(r, c)])
            }));
        }
        match self.id {
            "ex2.7" => Ok(Some(j0_block(8))),
            "ex2.8" => {
                let a = params.get("alpha").copied().unwrap_or(FRAC_PI_4);
                cxstruct::j_alpha_2m(8, a).map(Some)
            }
            _ => Ok(None),
        }
    }
}

const fn entry(
    id: &'static str,
    summary: &'static str,
    ambient_dim: usize,
    params: &'static [(&'static str, f64)],
    structure: Option<&'static str>,
    convention: &'static str,
) -> CatalogEntry {
    CatalogEntry {
        id,
        summary,
        ambient_dim,
        params,
        structure,
        convention,
    }
}

static ENTRIES: &[CatalogEntry] = &[
    entry(
        "ex2.1",
        "slant plane (u cos a, u sin a, v, 0)",
        4,
        &[("alpha", FRAC_PI_4)],
        Some("J0"),
        "block J0; angle alpha",
    ),
    entry(
        "ex2.2",
        "complex curve z2 = z1^2 for block J0, viewed through J_alpha",
        4,
        &[("alpha", FRAC_PI_4)],
        Some("Jalpha:{alpha}"),
        "J_alpha = cos a J0 + sin a J1m; angle alpha",
    ),
    entry(
        "ex2.3",
        "(e^{ku} cos u cos v, e^{ku} sin u cos v, e^{ku} cos u sin v, e^{ku} sin u sin v)",
        4,
        &[("k", 1.0)],
        Some("J0"),
        "block J0",
    ),
    entry(
        "ex2.4",
        "(u, k cos v, v, k sin v)",
        4,
        &[("k", 1.0)],
        Some("J0"),
        "block J0; angle arccos(1/sqrt(1+k^2))",
    ),
    entry(
        "ex2.5",
        "(-k s sin u, g(s), k s cos u, h(s)) with (g, h) a circle of radius R",
        4,
        &[("k", 1.0), ("R", 1.0)],
        Some("J0"),
        "block J0; measured cos alpha = -k/sqrt(1+k^2), Wirtinger angle arccos(k/sqrt(1+k^2))",
    ),
    entry(
        "ex2.6",
        "(p v sin u, p v cos u, v sin qu, v cos qu)",
        4,
        &[("p", 1.0), ("q", 2.0)],
        Some("J1"),
        "interleaved J1; cos alpha = (p^2+q)/sqrt((p^2+q^2)(p^2+1)); complex when p = q = 1",
    ),
    entry(
        "ex2.7",
        "(u, w) slice of the corrected 4-fold (u, v, c sin w, c sin z, kw, kz, c cos w, c cos z), c = sqrt(1-k^2)",
        8,
        &[("k", 0.5)],
        None,
        "block J0 on E^8; cos alpha = k",
    ),
    entry(
        "ex2.8",
        "complex curve (z, z^2/2, z^3/3, 0) in C^4 viewed through J_alpha",
        8,
        &[("alpha", FRAC_PI_4)],
        None,
        "J_alpha = cos a J0 + sin a J1m on E^8; angle alpha",
    ),
    entry(
        "ex3.1-whitney",
        "Whitney sphere (x1, x2, 2 x0 x1, 2 x0 x2) in spherical coordinates",
        4,
        &[],
        Some("J0"),
        "block J0; totally real",
    ),
    entry(
        "ex3.2",
        "(u, v, k cos v, k sin v)",
        4,
        &[("k", 1.0)],
        Some("J1"),
        "slant for +-J1 and +-J2",
    ),
    entry(
        "sphere",
        "round sphere of radius r in E^3",
        4,
        &[("r", 1.0)],
        None,
        "not slant for any structure",
    ),
    entry(
        "catenoid-e3",
        "(cosh v cos u, cosh v sin u, v, 0)",
        4,
        &[],
        None,
        "minimal, not slant for any structure",
    ),
    entry(
        "torus",
        "flat torus (cos u, sin u, cos v, sin v)/sqrt(2)",
        4,
        &[],
        Some("J1"),
        "interleaved J1; totally real",
    ),
    entry(
        "s2-geodesic",
        "totally geodesic S^2 (cos u cos v, sin u cos v, sin v, 0) in S^3",
        4,
        &[],
        None,
        "not slant",
    ),
    entry(
        "holo-j1",
        "(u, v, u^2 - v^2, 2uv), holomorphic for J1",
        4,
        &[],
        Some("J1"),
        "interleaved J1; complex",
    ),
    entry(
        "helical-cylinder",
        "gamma(t) c(s) with c the helix of axis X1 and k = -2/b",
        4,
        &[("a", 0.6), ("b", -0.8), ("s0", 0.0)],
        Some("J1m"),
        "J1m; angle arccos(a)",
    ),
    entry(
        "cylinder",
        "cylinder over a circular helix of pitch angle beta",
        4,
        &[("beta", 0.6)],
        Some("J1"),
        "interleaved J1; angle beta",
    ),
    entry(
        "cone",
        "circular cone of half-angle psi in the hyperplane x4 = 0",
        4,
        &[("psi", 0.5)],
        Some("J1"),
        "interleaved J1; angle pi/2 - psi",
    ),
    entry(
        "tandev",
        "tangent developable of a circular helix of radius r and pitch h",
        4,
        &[("r", 1.0), ("h", 0.5)],
        Some("J1"),
        "interleaved J1; angle atan(h/r)",
    ),
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn lookup(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| GeomError::Unknown(format!("catalog entry '{id}'")))
}

/// Parse "a=1,b=-0.5".
pub fn parse_params(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| GeomError::Params(format!("expected name=value, got '{item}'")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| GeomError::Params(format!("bad value in '{item}'")))?;
        if !val.is_finite() {
            return Err(GeomError::Params(format!("non-finite value in '{item}'")));
        }
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}

/// Split "id:k=v,..." into the id and its inline parameters.
pub fn parse_spec(spec: &str) -> Result<(String, BTreeMap<String, f64>)> {
    match spec.split_once(':') {
        Some((id, rest)) => Ok((id.trim().to_string(), parse_params(rest)?)),
        None => Ok((spec.trim().to_string(), BTreeMap::new())),
    }
}

/// Defaults overridden by inline parameters, then by `overrides`.
pub fn resolve(spec: &str, overrides: &BTreeMap<String, f64>) -> Result<(&'static CatalogEntry, BTreeMap<String, f64>)> {
    let (id, inline) = parse_spec(spec)?;
    let e = lookup(&id)?;
    let mut params = e.defaults();
    for (k, v) in inline.iter().chain(overrides.iter()) {
        if !params.contains_key(k) {
            return Err(GeomError::Params(format!(
                "'{}' has no parameter '{k}' (known: {})",
                e.id,
                e.params.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            )));
        }
        params.insert(k.clone(), *v);
    }
    Ok((e, params))
}

pub fn build(spec: &str, overrides: &BTreeMap<String, f64>) -> Result<Immersion> {
    let (e, p) = resolve(spec, overrides)?;
    let imm = construct(e.id, &p)?;
    Ok(imm.with_params(p))
}

/// (f, f', f'') in u times (g, g', g'') in v.
/// Orthonormal tangent 4-frame of the full ex2.7 four-fold at angles (w, z),
/// in the slant-adapted order (x_u, x_w, x_v, x_z): x_w = sec θ P x_u and
/// x_z = sec θ P x_v.
pub fn ex27_frame(k: f64, w: f64, z: f64) -> Result<[nalgebra::DVector<f64>; 4]> {
    if !(k > 0.0 && k < 1.0) {
        return Err(GeomError::Params(format!("'ex2.7' needs 0 < k < 1, got {k}")));
    }
    let c = (1.0 - k * k).sqrt();
    let e = |i: usize| {
        let mut x = nalgebra::DVector::zeros(8);
        x[i] = 1.0;
        x
    };
    let (sw, cw) = w.sin_cos();
    let (sz, cz) = z.sin_cos();
    let xw = e(2) * (c * cw) + e(4) * k - e(6) * (c * sw);
    let xz = e(3) * (c * cz) + e(5) * k - e(7) * (c * sz);
    Ok([e(0), xw, e(1), xz])
}

fn prod(f: [f64; 3], g: [f64; 3]) -> [f64; 6] {
    [
        f[0] * g[0],
        f[1] * g[0],
        f[0] * g[1],
        f[2] * g[0],
        f[1] * g[1],
        f[0] * g[2],
    ]
}

const ONE: [f64; 3] = [1.0, 0.0, 0.0];
const ZERO6: [f64; 6] = [0.0; 6];

fn lin(x: f64) -> [f64; 3] {
    [x, 1.0, 0.0]
}

fn sin3(w: f64, x: f64) -> [f64; 3] {
    let (s, c) = (w * x).sin_cos();
    [s, w * c, -w * w * s]
}

fn cos3(w: f64, x: f64) -> [f64; 3] {
    let (s, c) = (w * x).sin_cos();
    [c, -w * s, -w * w * c]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn get(p: &BTreeMap<String, f64>, k: &str) -> f64 {
    p[k]
}

fn positive(id: &str, name: &str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(GeomError::Params(format!("'{id}' needs {name} > 0, got {x}")))
    }
}

fn construct(id: &str, p: &BTreeMap<String, f64>) -> Result<Immersion> {
    let sq = Domain::new(-1.0, 1.0, -1.0, 1.0);
    let per_u = vec![Period {
        dir: Direction::U,
        period: TAU,
    }];
    let per_v = vec![Period {
        dir: Direction::V,
        period: TAU,
    }];
    let imm = match id {
        "ex2.1" => {
            let a = get(p, "alpha");
            let (s, c) = a.sin_cos();
            Immersion::analytic(id, 4, sq, move |u, v| {
                Jet::from_components(&[prod(lin(u), [c, 0.0, 0.0]), prod(lin(u), [s, 0.0, 0.0]), prod(ONE, lin(v)), ZERO6])
            })
        }
        "ex2.2" => Immersion::analytic(id, 4, sq, |u, v| {
            Jet::from_components(&[
                [u, 1.0, 0.0, 0.0, 0.0, 0.0],
                [u * u - v * v, 2.0 * u, -2.0 * v, 2.0, 0.0, -2.0],
                [v, 0.0, 1.0, 0.0, 0.0, 0.0],
                [2.0 * u * v, 2.0 * v, 2.0 * u, 0.0, 2.0, 0.0],
            ])
        }),
        "ex2.3" => {
            let k = get(p, "k");
            positive(id, "k", k)?;
            Immersion::analytic(id, 4, Domain::new(-0.5, 0.5, 0.0, TAU), move |u, v| {
                let e = (k * u).exp();
                let (su, cu) = u.sin_cos();
                let a = [
                    e * cu,
                    e * (k * cu - su),
                    e * ((k * k - 1.0) * cu - 2.0 * k * su),
                ];
                let b = [
                    e * su,
                    e * (k * su + cu),
                    e * ((k * k - 1.0) * su + 2.0 * k * cu),
                ];
                Jet::from_components(&[
                    prod(a, cos3(1.0, v)),
                    prod(b, cos3(1.0, v)),
                    prod(a, sin3(1.0, v)),
                    prod(b, sin3(1.0, v)),
                ])
            })
            .with_periods(per_v)
        }
        "ex2.4" => {
            let k = get(p, "k");
            positive(id, "k", k)?;
            Immersion::analytic(id, 4, Domain::new(-1.0, 1.0, 0.0, TAU), move |u, v| {
                Jet::from_components(&[
                    prod(lin(u), ONE),
                    prod(ONE, scale3(cos3(1.0, v), k)),
                    prod(ONE, lin(v)),
                    prod(ONE, scale3(sin3(1.0, v), k)),
                ])
            })
            .with_periods(per_v)
        }
        "ex2.5" => {
            let k = get(p, "k");
            let r = get(p, "R");
            positive(id, "k", k)?;
            positive(id, "R", r)?;
            Immersion::analytic(id, 4, Domain::new(0.0, TAU, 0.5, 1.5), move |u, s| {
                let w = 1.0 / r;
                Jet::from_components(&[
                    prod(scale3(sin3(1.0, u), -1.0), scale3(lin(s), k)),
                    prod(ONE, scale3(cos3(w, s), r)),
                    prod(cos3(1.0, u), scale3(lin(s), k)),
                    prod(ONE, scale3(sin3(w, s), r)),
                ])
            })
            .with_periods(per_u)
        }
        "ex2.6" => {
            let pp = get(p, "p");
            let q = get(p, "q");
            if pp == 0.0 || q == 0.0 {
                return Err(GeomError::Params("'ex2.6' needs nonzero p and q".into()));
            }
            Immersion::analytic(id, 4, Domain::new(0.0, TAU, 0.5, 1.5), move |u, v| {
                Jet::from_components(&[
                    prod(sin3(1.0, u), scale3(lin(v), pp)),
                    prod(cos3(1.0, u), scale3(lin(v), pp)),
                    prod(sin3(q, u), lin(v)),
                    prod(cos3(q, u), lin(v)),
                ])
            })
            .with_periods(per_u)
        }
        "ex2.7" => {
            let k = get(p, "k");
            if !(k > 0.0 && k < 1.0) {
                return Err(GeomError::Params(format!("'ex2.7' needs 0 < k < 1, got {k}")));
            }
            let c = (1.0 - k * k).sqrt();
            Immersion::analytic(id, 8, Domain::new(-1.0, 1.0, 0.0, TAU), move |u, w| {
                Jet::from_components(&[
                    prod(lin(u), ONE),
                    ZERO6,
                    prod(ONE, scale3(sin3(1.0, w), c)),
                    ZERO6,
                    prod(ONE, scale3(lin(w), k)),
                    ZERO6,
                    prod(ONE, scale3(cos3(1.0, w), c)),
                    [c, 0.0, 0.0, 0.0, 0.0, 0.0],
                ])
            })
            .with_periods(per_v)
        }
        "ex2.8" => Immersion::analytic(id, 8, sq, |u, v| {
            Jet::from_components(&[
                [u, 1.0, 0.0, 0.0, 0.0, 0.0],
                [0.5 * (u * u - v * v), u, -v, 1.0, 0.0, -1.0],
                [(u * u * u - 3.0 * u * v * v) / 3.0, u * u - v * v, -2.0 * u * v, 2.0 * u, -2.0 * v, -2.0 * u],
                ZERO6,
                [v, 0.0, 1.0, 0.0, 0.0, 0.0],
                [u * v, v, u, 0.0, 1.0, 0.0],
                [(3.0 * u * u * v - v * v * v) / 3.0, 2.0 * u * v, u * u - v * v, 2.0 * v, 2.0 * u, -2.0 * v],
                ZERO6,
            ])
        }),
        "ex3.1-whitney" => Immersion::analytic(id, 4, Domain::new(0.0, TAU, 0.2, PI - 0.2), |u, v| {
            Jet::from_components(&[
                prod(cos3(1.0, u), sin3(1.0, v)),
                prod(sin3(1.0, u), sin3(1.0, v)),
                prod(cos3(1.0, u), sin3(2.0, v)),
                prod(sin3(1.0, u), sin3(2.0, v)),
            ])
        })
        .with_periods(per_u),
        "ex3.2" => {
            let k = get(p, "k");
            positive(id, "k", k)?;
            Immersion::analytic(id, 4, Domain::new(-1.0, 1.0, 0.0, TAU), move |u, v| {
                Jet::from_components(&[
                    prod(lin(u), ONE),
                    prod(ONE, lin(v)),
                    prod(ONE, scale3(cos3(1.0, v), k)),
                    prod(ONE, scale3(sin3(1.0, v), k)),
                ])
            })
            .with_periods(per_v)
        }
        "sphere" => {
            let r = get(p, "r");
            positive(id, "r", r)?;
            Immersion::analytic(id, 4, Domain::new(0.0, TAU, 0.3, PI - 0.3), move |u, v| {
                Jet::from_components(&[
                    prod(cos3(1.0, u), scale3(sin3(1.0, v), r)),
                    prod(sin3(1.0, u), scale3(sin3(1.0, v), r)),
                    prod(ONE, scale3(cos3(1.0, v), r)),
                    ZERO6,
                ])
            })
            .with_periods(per_u)
        }
        "catenoid-e3" => Immersion::analytic(id, 4, Domain::new(0.0, TAU, -1.0, 1.0), |u, v| {
            let ch = [v.cosh(), v.sinh(), v.cosh()];
            Jet::from_components(&[prod(cos3(1.0, u), ch), prod(sin3(1.0, u), ch), prod(ONE, lin(v)), ZERO6])
        })
        .with_periods(per_u),
        "torus" => {
            let s = FRAC_1_SQRT_2;
            Immersion::analytic(id, 4, Domain::new(0.0, TAU, 0.0, TAU), move |u, v| {
                Jet::from_components(&[
                    prod(scale3(cos3(1.0, u), s), ONE),
                    prod(scale3(sin3(1.0, u), s), ONE),
                    prod(ONE, scale3(cos3(1.0, v), s)),
                    prod(ONE, scale3(sin3(1.0, v), s)),
                ])
            })
            .with_periods(vec![per_u[0].clone(), per_v[0].clone()])
        }
        "s2-geodesic" => Immersion::analytic(id, 4, Domain::new(0.0, TAU, -1.2, 1.2), |u, v| {
            Jet::from_components(&[
                prod(cos3(1.0, u), cos3(1.0, v)),
                prod(sin3(1.0, u), cos3(1.0, v)),
                prod(ONE, sin3(1.0, v)),
                ZERO6,
            ])
        })
        .with_periods(per_u),
        "holo-j1" => Immersion::analytic(id, 4, sq, |u, v| {
            Jet::from_components(&[
                [u, 1.0, 0.0, 0.0, 0.0, 0.0],
                [v, 0.0, 1.0, 0.0, 0.0, 0.0],
                [u * u - v * v, 2.0 * u, -2.0 * v, 2.0, 0.0, -2.0],
                [2.0 * u * v, 2.0 * v, 2.0 * u, 0.0, 2.0, 0.0],
            ])
        }),
        "helical-cylinder" => {
            let hp = sphere3::HelixParams::new(get(p, "a"), get(p, "b"), get(p, "s0"))?;
            sphere3::helical_cylinder(&hp, None)?
        }
        "cylinder" => sphere3::ruled::cylinder(get(p, "beta"))?,
        "cone" => sphere3::ruled::cone(get(p, "psi"))?,
        "tandev" => sphere3::ruled::tangent_developable(get(p, "r"), get(p, "h"))?,
        other => return Err(GeomError::Unknown(format!("catalog entry '{other}'"))),
    };
    let mut imm = imm;
    imm.id = id.to_string();
    Ok(imm)
}
