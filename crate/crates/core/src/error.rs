use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range {range}")]
    Range { what: &'static str, value: f64, range: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),

    #[error("xi undefined: |q| = {q} must be below kappa = {kappa}")]
    XiUndefined { q: f64, kappa: f64 },

    #[error("outside allowed q region: |xi| = {xi} must be below theta = {theta}")]
    OutsideQRegion { xi: f64, theta: f64 },

    #[error("triangle inequality violated for sides ({0}, {1}, {2})")]
    TriangleInequality(f64, f64, f64),

    #[error(
        "kappa~ = {0}, kappa1 = {1}, kappa2 = {2} lie outside the stripe |kappa1 - kappa2| < kappa~ < kappa1 + kappa2"
    )]
    OutsideStripe(f64, f64, f64),

    #[error("degenerate triangle: area {area} is below the floor {floor}")]
    DegenerateTriangle { area: f64, floor: f64 },

    #[error("degenerate direction: vector has zero length")]
    DegenerateDirection,

    #[error("circles do not intersect: no single-twisted solution")]
    EmptySupport,

    #[error("degenerate constraint Jacobian: |det| = {det}")]
    DegenerateJacobian { det: f64 },

    #[error("quadrature did not converge: last estimate {estimate}, previous {previous}")]
    NoConvergence { estimate: f64, previous: f64 },
}
