use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    #[error("point ({x}, {y}) lies outside the closed unit disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("invalid chord frame: {0}")]
    InvalidFrame(&'static str),

    #[error("lines are parallel (|sin(gamma1 - gamma2)| = {sin_diff:e})")]
    Parallel { sin_diff: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate}, error {error:e})"
    )]
    QuadratureNonConvergence { estimate: f64, error: f64, subdivisions: usize },

    #[error("rejection sampler gave up after {attempts} attempts with {accepted} accepted")]
    IterationCap { attempts: u64, accepted: u64 },

    #[error("frame too close to the domain boundary for step {step:e}")]
    FrameNearBoundary { step: f64 },
}
