//! Numerical thresholds shared across modules.

/// Decomposability: |<*xi, xi>| <= DECOMPOSABLE * |xi|^2.
pub const DECOMPOSABLE: f64 = 1e-9;

/// Orthonormality of user-supplied plane bases.
pub const ORTHONORMAL: f64 = 1e-12;

/// J^2 = -I and J^T J = I, entrywise.
pub const STRUCTURE: f64 = 1e-12;

/// Norm and purity of a 2-vector handed to the zeta inverse.
pub const ZETA: f64 = 1e-9;

/// Gram determinant below which a chart point is not an immersion.
pub const IMMERSION_GRAM: f64 = 1e-12;

/// Angle spread over a grid below which a surface is declared slant.
pub const SLANT_SPREAD: f64 = 1e-6;

/// Distance from 0 or pi/2 at which the adapted frame is refused.
pub const DEGENERATE_ANGLE: f64 = 1e-6;

/// Circle-fit classification defaults.
pub const SINGLETON_SPREAD: f64 = 1e-7;
pub const CIRCLE_RESIDUAL: f64 = 1e-6;

/// Unit quaternion tolerance.
pub const UNIT: f64 = 1e-12;

/// Loop closure tolerance (ambient endpoint mismatch).
pub const LOOP_CLOSURE: f64 = 1e-9;

/// Agreement of the two evaluations of Θ.
pub const THETA_DUAL: f64 = 1e-6;

/// Pointwise |∇P| on slant surfaces.
pub const NABLA_P: f64 = 1e-6;

/// |G − εG^D| on slant surfaces (ε = ±1 by orientation class).
pub const CURVATURE_IDENTITY: f64 = 1e-7;

/// |det dν± − ½(G ± G^D)|; the differencing path dominates.
pub const GAUSS_JACOBIAN: f64 = 1e-4;

/// Connection-form identities: antisymmetry, Weingarten, normal relation, symmetry.
pub const CONNECTION_ANTISYMMETRY: f64 = 1e-8;
pub const CONNECTION_WEINGARTEN: f64 = 1e-6;
pub const CONNECTION_NORMAL: f64 = 1e-6;
pub const CONNECTION_SYMMETRY: f64 = 1e-7;

/// Largest cell value of dΘ and dΛ.
pub const D_THETA: f64 = 1e-5;

/// Distance of a period-loop integral of Ψ from the nearest integer.
pub const PERIOD_INTEGRAL: f64 = 1e-4;

/// |∮Ψ| over a contractible loop.
pub const CONTRACTIBLE_INTEGRAL: f64 = 1e-6;

/// Agreement between a detected structure and an independent Wirtinger run.
pub const DETECTION_VERIFY: f64 = 1e-6;
