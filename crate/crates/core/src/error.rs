use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix (det = {0:e})")]
    SingularMatrix(f64),

    #[error("vector lives in {vector} but action requested for {param}")]
    ModelMismatch { vector: String, param: String },

    #[error("quadrature did not converge: value {value:e}, error estimate {err:e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        err: f64,
        subdivisions: usize,
    },

    #[error("analytic continuation has a pole: s + {j} + 1 = 0 for s = {s_re}{s_im:+}i")]
    RegularizationPole { s_re: f64, s_im: f64, j: usize },

    #[error("kernel evaluated on a diagonal: {0}")]
    SingularPoint(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("moment system ill-conditioned: condition number {0:e}")]
    IllConditioned(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("divergent pairing: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
