use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundary(String),

    #[error("enumeration would exceed {cap} branchings along one path")]
    BranchCapExceeded { cap: usize },

    #[error(
        "contour quadrature did not converge after {nodes} nodes \
         (last relative change {last_change:.3e}, tolerance {tol:.1e})"
    )]
    NonConvergence { nodes: usize, last_change: f64, tol: f64 },

    #[error("contour quadrature left an imaginary residue {residue:.3e} (value {value:.6e})")]
    ImaginaryResidue { residue: f64, value: f64 },

    #[error("loss of precision: integrand magnitude {max_integrand:.3e} vs result {result:.3e}")]
    PrecisionLoss { max_integrand: f64, result: f64 },

    #[error("boundary profiles disagree at the corner: chi(0) = {chi0}, psi(0) = {psi0}")]
    IncompatibleCorner { chi0: f64, psi0: f64 },

    #[error("noise intensity is negative ({value:.3e}) at ({x}, {y})")]
    NegativeIntensity { x: f64, y: f64, value: f64 },

    #[error("covariance matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("telegraph solution too close to zero ({value:.3e}) at ({x}, {y})")]
    DegenerateProfile { x: f64, y: f64, value: f64 },

    #[error("exact identity violated: {name} residual {residual:.3e} exceeds {tol:.1e}")]
    IdentityViolation {
        name: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("nonzero conditional mean {mean:.3e} in vertex case {case}")]
    NonzeroConditionalMean { case: &'static str, mean: f64 },

    #[error("point ({x}, {y}) lies outside the window")]
    OutOfWindow { x: f64, y: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
