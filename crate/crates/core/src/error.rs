use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "grid {n_theta}x{n_phi} cannot resolve quartic products at bandlimit {bandlimit} \
         (need n_theta >= {min_theta} and n_phi >= {min_phi})"
    )]
    QuadratureCapacity {
        bandlimit: usize,
        n_theta: usize,
        n_phi: usize,
        min_theta: usize,
        min_phi: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid shape mismatch: plan expects {expected_theta}x{expected_phi}, field is {got_theta}x{got_phi}")]
    GridShape {
        expected_theta: usize,
        expected_phi: usize,
        got_theta: usize,
        got_phi: usize,
    },

    #[error("bandlimit mismatch: plan supports degree <= {plan}, field has degree <= {field}")]
    Bandlimit { plan: usize, field: usize },

    #[error("invalid harmonic index (l={l}, m={m})")]
    InvalidIndex { l: i64, m: i64 },

    #[error("direct Wigner evaluation is limited to bandlimit <= {max}, got {got}")]
    OracleBandlimit { max: usize, got: usize },

    #[error("operator composition with {count} factors is not supported (single operators only)")]
    UnsupportedComposition { count: usize },

    #[error("degree {degree} has no representation for subgroup {subgroup}")]
    NoDecomposition { subgroup: String, degree: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Prox(#[from] crate::optim::ProxError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
