//! Flat ruled surfaces in the hyperplane x₄ = 0 (or ruled along ε₄) that are
//! slant for J₁: cylinders over circular helices, circular cones and tangent
//! developables of circular helices.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{GeomError, Result};
use crate::jets::{Direction, Domain, Immersion, Jet, Period};

fn check(name: &str, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(GeomError::Params(format!("degenerate generator: {name}")))
    }
}

/// s closes up after 2π; for the cylinder only up to a translation along ε₃,
/// which leaves every invariant unchanged.
fn s_period() -> Period {
    Period {
        dir: Direction::U,
        period: 2.0 * PI,
    }
}

/// {c(s) + t ε₄} over the helix c(s) = (sin β cos s, sin β sin s, s cos β) of
/// pitch angle β; slant angle β for J₁.
pub fn cylinder(beta: f64) -> Result<Immersion> {
    check("cylinder needs 0 < beta < pi/2", beta > 0.0 && beta < FRAC_PI_2)?;
    let (sb, cb) = beta.sin_cos();
    Ok(Immersion::analytic("cylinder", 4, Domain::new(0.0, 2.0 * PI, -1.0, 1.0), move |s, t| {
        let (ss, cs) = s.sin_cos();
        Jet::from_components(&[
            [sb * cs, -sb * ss, 0.0, -sb * cs, 0.0, 0.0],
            [sb * ss, sb * cs, 0.0, -sb * ss, 0.0, 0.0],
            [s * cb, cb, 0.0, 0.0, 0.0, 0.0],
            [t, 0.0, 1.0, 0.0, 0.0, 0.0],
        ])
    })
    .with_periods(vec![s_period()]))
}

/// {t c(s)} with c(s) = (sin ψ cos s, sin ψ sin s, cos ψ, 0); slant angle
/// π/2 − ψ for J₁.
pub fn cone(psi: f64) -> Result<Immersion> {
    check("cone needs 0 < psi < pi/2", psi > 0.0 && psi < FRAC_PI_2)?;
    let (sp, cp) = psi.sin_cos();
    Ok(Immersion::analytic("cone", 4, Domain::new(0.0, 2.0 * PI, 0.5, 1.5), move |s, t| {
        let (ss, cs) = s.sin_cos();
        Jet::from_components(&[
            [t * sp * cs, -t * sp * ss, sp * cs, -t * sp * cs, -sp * ss, 0.0],
            [t * sp * ss, t * sp * cs, sp * ss, -t * sp * ss, sp * cs, 0.0],
            [t * cp, 0.0, cp, 0.0, 0.0, 0.0],
            [0.0; 6],
        ])
    })
    .with_periods(vec![s_period()]))
}

/// {c(s) + t c′(s)} for the unit-speed helix c(s) = (r cos(s/L), r sin(s/L),
/// h s/L, 0), L = √(r² + h²), t ∈ [1/2, 3/2]; slant angle atan(h/r) for J₁.
pub fn tangent_developable(r: f64, h: f64) -> Result<Immersion> {
    check("tangent developable needs r > 0 and h > 0", r > 0.0 && h > 0.0)?;
    let l = (r * r + h * h).sqrt();
    let w = 1.0 / l;
    Ok(Immersion::analytic("tandev", 4, Domain::new(0.0, 2.0 * PI, 0.5, 1.5), move |s, t| {
        let (sn, cs) = (w * s).sin_cos();
        // c, c′, c″, c‴ per component.
        let c = [
            [r * cs, -r * w * sn, -r * w * w * cs, r * w * w * w * sn],
            [r * sn, r * w * cs, -r * w * w * sn, -r * w * w * w * cs],
            [h * s * w, h * w, 0.0, 0.0],
            [0.0; 4],
        ];
        let rows: Vec<[f64; 6]> = c
            .iter()
            .map(|k| [k[0] + t * k[1], k[1] + t * k[2], k[1], k[2] + t * k[3], k[2], 0.0])
            .collect();
        Jet::from_components(&rows)
    }))
}
