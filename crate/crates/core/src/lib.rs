//! Energy-preserving continuous-stage Runge–Kutta integrators for
//! Hamiltonian systems `ẏ = S∇H(y)`.
//!
//! A method is fully determined by a constant `s × s` rational matrix `M`.
//! The crate offers an exact audit layer over `M` (energy preservation,
//! simplifying assumptions, B-series order, stage spectra) and a floating
//! point integrator with Picard and simplified-Newton stage solvers,
//! including a decoupled solve that splits the linear system into `s`
//! independent blocks when the stage matrix has real distinct eigenvalues.

pub mod bseries;
pub mod cli;
pub mod exact;
pub mod harness;
pub mod integrator;
pub mod spectral;
pub mod tableau;

pub use bseries::{order_of, RootedTree};
pub use exact::{Rational, RationalMatrix, RationalPoly};
pub use integrator::{
    integrate, step_newton, step_picard, HamiltonianSystem, IntegratorError, SolveMode,
    SolverConfig, StageSolution, Trajectory,
};
pub use spectral::{parallelizable, SpectralReport};
pub use tableau::{
    audit, make_avf, make_avf_collocation, make_bnonconst4, make_parallel4, make_parallel6,
    make_parallel6_preset, CsrkTableau,
};
