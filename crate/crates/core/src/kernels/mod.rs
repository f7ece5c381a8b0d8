//! Continuum and discrete Riemann functions.

pub mod continuum;
pub mod contour;
pub mod convergence;
pub mod discrete;

pub use continuum::{
    continuum_contour, riemann_continuum, riemann_continuum_deriv, riemann_truncated, ContinuumKernel, KernelJet,
};
pub use contour::{Contour, ContourValue, QuadratureOptions};
pub use convergence::{multi_indices, verify_kernel_convergence, ConvergenceReport, ConvergenceRow};
pub use discrete::{discrete_contour, riemann_discrete_quadrature, KernelTable, RecurrenceCoefficients};
