//! Floating-point time stepping with any CSRK tableau.
//!
//! The stage polynomial `Y_τ` is represented by its values at `c₀ = 0`
//! (pinned to `y₀`) and at the stage nodes `c₁..c_s`. The nonlinear stage
//! equations
//!
//! ```text
//! Φ_i(Y) = Y_i - y₀ - h ∫₀¹ A(c_i, ζ) f(Y_ζ) dζ = 0
//! ```
//!
//! are solved either by fixed-point iteration or by simplified Newton with
//! iteration matrix `I - h E ⊗ J₀`. When `E` has real distinct eigenvalues,
//! `E = T Λ T⁻¹` splits each Newton solve into `s` independent systems
//! `(I - hλ_k J₀) w_k = r_k` that run on a worker pool.

pub mod quadrature;
pub mod scheme;
pub mod system;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use log::{debug, info};
use nalgebra::{DMatrix, DVector, LU};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::spectral::{
    decompose_with_eigenvalues, default_stage_nodes, poly_roots, vev_matrix, EigenDecomposition,
    SpectralError, DEFAULT_SPECTRAL_TOL,
};
use crate::tableau::CsrkTableau;

pub use quadrature::{gauss_nodes_weights, GaussRule, MAX_GAUSS_NODES};
pub use scheme::Scheme;
pub use system::{canonical_structure, HamiltonianSystem};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITERS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Decoupled,
    Coupled,
    Picard,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Decoupled => "decoupled",
            SolveMode::Coupled => "coupled",
            SolveMode::Picard => "picard",
        })
    }
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "decoupled" => Ok(SolveMode::Decoupled),
            "coupled" => Ok(SolveMode::Coupled),
            "picard" => Ok(SolveMode::Picard),
            other => Err(format!("unknown solver mode '{other}'")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StageSolution {
    /// `Y_{c₁} .. Y_{c_s}`
    pub stage_values: Vec<DVector<f64>>,
    pub y1: DVector<f64>,
    pub iterations: usize,
    /// Last update norm divided by `1 + ‖y₀‖`.
    pub final_residual: f64,
    pub used_mode: SolveMode,
}

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("stage iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<StageSolution>,
    },
    #[error("simplified Newton iteration matrix is singular")]
    SingularIterationMatrix,
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<IntegratorError>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub quad_nodes: usize,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub mode: SolveMode,
    /// `c₁..c_s`; shifted Legendre zeros when absent.
    pub stage_nodes: Option<Vec<f64>>,
    pub worker_count: usize,
}

/// Smallest Gauss rule that integrates every stage integral exactly when
/// `H` is a polynomial of total degree `degree`.
pub fn exact_quadrature_nodes(s: usize, degree: usize) -> usize {
    (s - 1 + s * degree.saturating_sub(1) + 1).div_ceil(2).max(1)
}

impl SolverConfig {
    /// `2s + 2` quadrature nodes, decoupled Newton on `s` workers.
    pub fn for_tableau(t: &CsrkTableau) -> Self {
        let s = t.degree();
        Self {
            quad_nodes: 2 * s + 2,
            newton_tol: DEFAULT_NEWTON_TOL,
            max_newton_iters: DEFAULT_MAX_ITERS,
            mode: SolveMode::Decoupled,
            stage_nodes: None,
            worker_count: s,
        }
    }

    /// Switches to the exact node count when the system declares a
    /// polynomial degree.
    pub fn with_exact_quadrature(mut self, t: &CsrkTableau, sys: &HamiltonianSystem) -> Self {
        if let Some(d) = sys.poly_degree() {
            self.quad_nodes = exact_quadrature_nodes(t.degree(), d);
        }
        self
    }

    pub fn with_mode(mut self, mode: SolveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.newton_tol = tol;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_count = workers;
        self
    }

    pub fn with_quad_nodes(mut self, q: usize) -> Self {
        self.quad_nodes = q;
        self
    }

    pub fn resolved_stage_nodes(&self, s: usize) -> Vec<f64> {
        self.stage_nodes.clone().unwrap_or_else(|| default_stage_nodes(s))
    }

    pub fn validate(&self, s: usize) -> Result<(), IntegratorError> {
        let bad = |m: String| Err(IntegratorError::InvalidConfig(m));
        if !(1..=MAX_GAUSS_NODES).contains(&self.quad_nodes) {
            return bad(format!("quad_nodes must be in 1..={MAX_GAUSS_NODES}, got {}", self.quad_nodes));
        }
        if !(self.newton_tol > 0.0 && self.newton_tol.is_finite()) {
            return bad(format!("newton_tol must be positive, got {}", self.newton_tol));
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be at least 1".into());
        }
        if self.worker_count == 0 {
            return bad("worker_count must be at least 1".into());
        }
        if let Some(nodes) = &self.stage_nodes {
            if nodes.len() != s {
                return bad(format!("expected {s} stage nodes, got {}", nodes.len()));
            }
            if nodes.iter().any(|&c| !(c > 0.0 && c <= 1.0)) {
                return bad("stage nodes must lie in (0, 1]".into());
            }
            crate::spectral::validate_nodes(nodes)?;
        }
        Ok(())
    }
}

enum Factorization {
    Decoupled(Vec<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>),
    Coupled(LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

/// Coefficients, eigenbasis and worker pool for repeated steps with one
/// tableau and configuration.
pub struct Stepper {
    scheme: Scheme,
    cfg: SolverConfig,
    mode: SolveMode,
    decomposition: Option<EigenDecomposition>,
    pool: Option<rayon::ThreadPool>,
}

impl Stepper {
    pub fn new(t: &CsrkTableau, cfg: &SolverConfig) -> Result<Self, IntegratorError> {
        let s = t.degree();
        cfg.validate(s)?;
        let scheme = Scheme::new(t, &cfg.resolved_stage_nodes(s), cfg.quad_nodes)?;
        let mut mode = cfg.mode;
        let mut decomposition = None;
        if mode == SolveMode::Decoupled {
            let char_poly = vev_matrix(t).char_poly().expect("square");
            let eigenvalues = poly_roots(&char_poly);
            match decompose_with_eigenvalues(&scheme.e, &eigenvalues, DEFAULT_SPECTRAL_TOL) {
                Ok(d) => decomposition = Some(d),
                Err(SpectralError::ComplexSpectrum { .. }) => {
                    info!("{}: stage spectrum is not real and distinct, using the coupled solve", t.name());
                    mode = SolveMode::Coupled;
                }
                Err(e) => return Err(e.into()),
            }
        }
        let pool = if mode == SolveMode::Decoupled && cfg.worker_count > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.worker_count)
                    .build()
                    .map_err(|e| IntegratorError::InvalidConfig(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(Self {
            scheme,
            cfg: cfg.clone(),
            mode,
            decomposition,
            pool,
        })
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// Mode actually used, after any fallback from `Decoupled`.
    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn decomposition(&self) -> Option<&EigenDecomposition> {
        self.decomposition.as_ref()
    }

    fn quad_states(&self, y0: &DVector<f64>, stages: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let l = &self.scheme.interp;
        (0..self.scheme.quad_len())
            .map(|q| {
                let mut y = y0 * l[(q, 0)];
                for (j, yj) in stages.iter().enumerate() {
                    y.axpy(l[(q, j + 1)], yj, 1.0);
                }
                y
            })
            .collect()
    }

    fn field_values(&self, sys: &HamiltonianSystem, y0: &DVector<f64>, stages: &[DVector<f64>]) -> Vec<DVector<f64>> {
        self.quad_states(y0, stages).iter().map(|y| sys.field(y)).collect()
    }

    /// `y₀ + h ∫ A(c_i, ζ) f(Y_ζ) dζ` for each stage.
    fn stage_map(&self, y0: &DVector<f64>, h: f64, fvals: &[DVector<f64>]) -> Vec<DVector<f64>> {
        let w = &self.scheme.stage_weights;
        (0..self.scheme.s)
            .map(|i| {
                let mut g = DVector::zeros(y0.len());
                for (q, fq) in fvals.iter().enumerate() {
                    g.axpy(w[(i, q)], fq, 1.0);
                }
                y0 + g * h
            })
            .collect()
    }

    fn output(&self, y0: &DVector<f64>, h: f64, fvals: &[DVector<f64>]) -> DVector<f64> {
        let mut g = DVector::zeros(y0.len());
        for (bq, fq) in self.scheme.output_weights.iter().zip(fvals) {
            g.axpy(*bq, fq, 1.0);
        }
        y0 + g * h
    }

    /// `Φ(Y)`
    pub fn residual(
        &self,
        sys: &HamiltonianSystem,
        y0: &DVector<f64>,
        h: f64,
        stages: &[DVector<f64>],
    ) -> Vec<DVector<f64>> {
        let fvals = self.field_values(sys, y0, stages);
        self.stage_map(y0, h, &fvals)
            .into_iter()
            .zip(stages)
            .map(|(g, y)| y - g)
            .collect()
    }

    fn solution(
        &self,
        sys: &HamiltonianSystem,
        y0: &DVector<f64>,
        h: f64,
        stages: Vec<DVector<f64>>,
        iterations: usize,
        final_residual: f64,
    ) -> StageSolution {
        let fvals = self.field_values(sys, y0, &stages);
        StageSolution {
            y1: self.output(y0, h, &fvals),
            stage_values: stages,
            iterations,
            final_residual,
            used_mode: self.mode,
        }
    }

    pub fn step(&self, sys: &HamiltonianSystem, y0: &DVector<f64>, h: f64) -> Result<StageSolution, IntegratorError> {
        sys.check_dim(y0)?;
        match self.mode {
            SolveMode::Picard => self.step_picard(sys, y0, h),
            _ => self.step_newton(sys, y0, h),
        }
    }

    fn step_picard(&self, sys: &HamiltonianSystem, y0: &DVector<f64>, h: f64) -> Result<StageSolution, IntegratorError> {
        let scale = 1.0 + y0.norm();
        let threshold = self.cfg.newton_tol * scale;
        let mut stages = vec![y0.clone(); self.scheme.s];
        let mut tracker = ConvergenceTracker::default();
        for it in 1..=self.cfg.max_newton_iters {
            let fvals = self.field_values(sys, y0, &stages);
            let next = self.stage_map(y0, h, &fvals);
            let delta = block_distance(&next, &stages);
            let previous = std::mem::replace(&mut stages, next);
            match tracker.observe(delta, threshold) {
                Verdict::Converged => return Ok(self.solution(sys, y0, h, stages, it, delta / scale)),
                Verdict::Continue => {}
                Verdict::Diverged => {
                    let best = if delta.is_finite() { stages } else { previous };
                    return Err(self.no_convergence(sys, y0, h, best, it, tracker.best / scale));
                }
            }
        }
        Err(self.no_convergence(sys, y0, h, stages, self.cfg.max_newton_iters, tracker.best / scale))
    }

    fn step_newton(&self, sys: &HamiltonianSystem, y0: &DVector<f64>, h: f64) -> Result<StageSolution, IntegratorError> {
        let scale = 1.0 + y0.norm();
        let threshold = self.cfg.newton_tol * scale;
        let j0 = sys.jacobian(y0);
        let factors = self.factor(&j0, h)?;
        let mut stages = vec![y0.clone(); self.scheme.s];
        let mut best = (f64::INFINITY, stages.clone());
        let mut tracker = ConvergenceTracker::default();
        for it in 1..=self.cfg.max_newton_iters {
            let rhs: Vec<DVector<f64>> = self.residual(sys, y0, h, &stages).into_iter().map(|r| -r).collect();
            let rho = self.solve(&factors, &rhs)?;
            for (y, r) in stages.iter_mut().zip(&rho) {
                *y += r;
            }
            let norm = block_norm(&rho);
            if norm < best.0 {
                best = (norm, stages.clone());
            }
            match tracker.observe(norm, threshold) {
                Verdict::Converged => return Ok(self.solution(sys, y0, h, stages, it, norm / scale)),
                Verdict::Continue => {}
                Verdict::Diverged => return Err(self.no_convergence(sys, y0, h, best.1, it, best.0 / scale)),
            }
        }
        debug!("Newton stalled at update norm {:e}", best.0);
        Err(self.no_convergence(sys, y0, h, best.1, self.cfg.max_newton_iters, best.0 / scale))
    }

    fn no_convergence(
        &self,
        sys: &HamiltonianSystem,
        y0: &DVector<f64>,
        h: f64,
        stages: Vec<DVector<f64>>,
        iterations: usize,
        residual: f64,
    ) -> IntegratorError {
        IntegratorError::NoConvergence {
            iterations,
            residual,
            best: Box::new(self.solution(sys, y0, h, stages, iterations, residual)),
        }
    }

    fn factor(&self, j0: &DMatrix<f64>, h: f64) -> Result<Factorization, IntegratorError> {
        let n = j0.nrows();
        match &self.decomposition {
            Some(d) if self.mode == SolveMode::Decoupled => {
                let build = |lambda: &f64| {
                    let lu = (DMatrix::identity(n, n) - j0 * (h * lambda)).lu();
                    lu.is_invertible().then_some(lu)
                };
                let lus: Option<Vec<_>> = self.run(|| d.eigenvalues.par_iter().map(build).collect());
                lus.map(Factorization::Decoupled).ok_or(IntegratorError::SingularIterationMatrix)
            }
            _ => {
                let s = self.scheme.s;
                let e = &self.scheme.e;
                let k = DMatrix::from_fn(s * n, s * n, |r, c| {
                    let (i, a) = (r / n, r % n);
                    let (j, b) = (c / n, c % n);
                    let id = if r == c { 1.0 } else { 0.0 };
                    id - h * e[(i, j)] * j0[(a, b)]
                });
                let lu = k.lu();
                if lu.is_invertible() {
                    Ok(Factorization::Coupled(lu))
                } else {
                    Err(IntegratorError::SingularIterationMatrix)
                }
            }
        }
    }

    fn solve(&self, factors: &Factorization, rhs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>, IntegratorError> {
        let s = self.scheme.s;
        match factors {
            Factorization::Decoupled(lus) => {
                let d = self.decomposition.as_ref().expect("decoupled mode has an eigenbasis");
                let transformed = mix(&d.t_inv, rhs);
                let solved: Option<Vec<DVector<f64>>> = self.run(|| {
                    lus.par_iter()
                        .zip(transformed.par_iter())
                        .map(|(lu, r)| lu.solve(r))
                        .collect()
                });
                let solved = solved.ok_or(IntegratorError::SingularIterationMatrix)?;
                Ok(mix(&d.t, &solved))
            }
            Factorization::Coupled(lu) => {
                let n = rhs[0].len();
                let stacked = DVector::from_iterator(s * n, rhs.iter().flat_map(|r| r.iter().copied()));
                let x = lu.solve(&stacked).ok_or(IntegratorError::SingularIterationMatrix)?;
                Ok((0..s).map(|i| x.rows(i * n, n).into_owned()).collect())
            }
        }
    }

    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}

/// `(P ⊗ I) x` for block vectors, accumulated in a fixed order.
fn mix(p: &DMatrix<f64>, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
    (0..p.nrows())
        .map(|i| {
            let mut acc = DVector::zeros(x[0].len());
            for (k, xk) in x.iter().enumerate() {
                acc.axpy(p[(i, k)], xk, 1.0);
            }
            acc
        })
        .collect()
}

fn block_norm(x: &[DVector<f64>]) -> f64 {
    x.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

fn block_distance(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_squared()).sum::<f64>().sqrt()
}

enum Verdict {
    Converged,
    Continue,
    Diverged,
}

/// Stops on `‖update‖ ≤ threshold`; gives up when the update grows on two
/// consecutive iterations or is not finite.
struct ConvergenceTracker {
    previous: f64,
    growth: usize,
    best: f64,
}

impl Default for ConvergenceTracker {
    fn default() -> Self {
        Self {
            previous: f64::INFINITY,
            growth: 0,
            best: f64::INFINITY,
        }
    }
}

impl ConvergenceTracker {
    fn observe(&mut self, norm: f64, threshold: f64) -> Verdict {
        if !norm.is_finite() {
            return Verdict::Diverged;
        }
        self.best = self.best.min(norm);
        if norm <= threshold {
            return Verdict::Converged;
        }
        self.growth = if norm > self.previous { self.growth + 1 } else { 0 };
        self.previous = norm;
        if self.growth >= 2 {
            Verdict::Diverged
        } else {
            Verdict::Continue
        }
    }
}

/// `Φ(Y)` for the given stage values.
pub fn stage_residual(
    t: &CsrkTableau,
    sys: &HamiltonianSystem,
    y0: &DVector<f64>,
    h: f64,
    stages: &[DVector<f64>],
    cfg: &SolverConfig,
) -> Result<Vec<DVector<f64>>, IntegratorError> {
    sys.check_dim(y0)?;
    if stages.len() != t.degree() || stages.iter().any(|y| y.len() != y0.len()) {
        return Err(IntegratorError::InvalidConfig("stage values have the wrong shape".into()));
    }
    Ok(Stepper::new(t, cfg)?.residual(sys, y0, h, stages))
}

/// One step by fixed-point iteration `Y ← y₀ + h ∫ A f(Y)`.
pub fn step_picard(
    t: &CsrkTableau,
    sys: &HamiltonianSystem,
    y0: &DVector<f64>,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StageSolution, IntegratorError> {
    let cfg = cfg.clone().with_mode(SolveMode::Picard);
    Stepper::new(t, &cfg)?.step(sys, y0, h)
}

/// One simplified-Newton step; `Picard` in `cfg` is read as `Decoupled`.
pub fn step_newton(
    t: &CsrkTableau,
    sys: &HamiltonianSystem,
    y0: &DVector<f64>,
    h: f64,
    cfg: &SolverConfig,
) -> Result<StageSolution, IntegratorError> {
    let mut cfg = cfg.clone();
    if cfg.mode == SolveMode::Picard {
        cfg.mode = SolveMode::Decoupled;
    }
    Stepper::new(t, &cfg)?.step(sys, y0, h)
}

/// Value at `tau` of the degree-`s` polynomial through `(0, y₀)` and
/// `(c_i, Y_i)`.
pub fn eval_stage_polynomial(nodes: &[f64], y0: &DVector<f64>, stages: &[DVector<f64>], tau: f64) -> DVector<f64> {
    let all: Vec<f64> = std::iter::once(0.0).chain(nodes.iter().copied()).collect();
    let values: Vec<&DVector<f64>> = std::iter::once(y0).chain(stages.iter()).collect();
    let mut out = DVector::zeros(y0.len());
    for (j, &cj) in all.iter().enumerate() {
        let lj: f64 = all
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &ck)| (tau - ck) / (cj - ck))
            .product();
        out.axpy(lj, values[j], 1.0);
    }
    out
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub h: f64,
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub energies: Vec<f64>,
    pub total_iterations: usize,
    pub mode: SolveMode,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub total_newton_iters: usize,
    pub mode: SolveMode,
    pub wall_time_ms: f64,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory contains y0")
    }

    /// `|H(y_k) - H(y₀)|`
    pub fn energy_drift(&self) -> Vec<f64> {
        let h0 = self.energies[0];
        self.energies.iter().map(|e| (e - h0).abs()).collect()
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.energy_drift().into_iter().fold(0.0, f64::max)
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            steps: self.steps(),
            total_newton_iters: self.total_iterations,
            mode: self.mode,
            wall_time_ms: self.wall_time_ms,
        }
    }

    /// `step,t,y_1..y_N,H,H_drift` with every float in `{:.17e}`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states[0].len();
        let mut header = vec!["step".to_string(), "t".to_string()];
        header.extend((1..=n).map(|i| format!("y_{i}")));
        header.push("H".into());
        header.push("H_drift".into());
        writeln!(w, "{}", header.join(","))?;
        let drift = self.energy_drift();
        for (k, y) in self.states.iter().enumerate() {
            write!(w, "{k},{:.17e}", self.times[k])?;
            for v in y.iter() {
                write!(w, ",{v:.17e}")?;
            }
            writeln!(w, ",{:.17e},{:.17e}", self.energies[k], drift[k])?;
        }
        Ok(())
    }
}

/// `n_steps` steps of size `h` from `y0`.
pub fn integrate(
    t: &CsrkTableau,
    sys: &HamiltonianSystem,
    y0: &DVector<f64>,
    h: f64,
    n_steps: usize,
    cfg: &SolverConfig,
) -> Result<Trajectory, IntegratorError> {
    sys.check_dim(y0)?;
    if !h.is_finite() {
        return Err(IntegratorError::InvalidConfig(format!("step size {h} is not finite")));
    }
    let start = Instant::now();
    let stepper = Stepper::new(t, cfg)?;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut energies = Vec::with_capacity(n_steps + 1);
    states.push(y0.clone());
    energies.push(sys.hamiltonian(y0));
    let mut total = 0;
    for k in 0..n_steps {
        let sol = stepper
            .step(sys, &states[k], h)
            .map_err(|e| IntegratorError::StepFailed { step: k + 1, source: Box::new(e) })?;
        total += sol.iterations;
        energies.push(sys.hamiltonian(&sol.y1));
        states.push(sol.y1);
    }
    Ok(Trajectory {
        h,
        times: (0..=n_steps).map(|k| k as f64 * h).collect(),
        states,
        energies,
        total_iterations: total,
        mode: stepper.mode(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::{make_avf, make_avf_collocation, make_parallel4};
    use crate::exact::int;

    fn oscillator() -> HamiltonianSystem {
        HamiltonianSystem::new(canonical_structure(1), |y| 0.5 * y.norm_squared(), |y| y.clone())
            .unwrap()
            .with_hessian(|_| DMatrix::identity(2, 2), &DVector::from_vec(vec![0.1, 0.2]))
            .unwrap()
            .with_poly_degree(2)
    }

    fn y0() -> DVector<f64> {
        DVector::from_vec(vec![1.0, 0.0])
    }

    #[test]
    fn exact_quadrature_counts() {
        assert_eq!(exact_quadrature_nodes(3, 3), 5);
        assert_eq!(exact_quadrature_nodes(1, 2), 1);
        assert_eq!(exact_quadrature_nodes(2, 0), 1);
    }

    #[test]
    fn zero_step_is_identity() {
        let t = make_parallel4(&int(1)).unwrap();
        let cfg = SolverConfig::for_tableau(&t);
        let sol = step_newton(&t, &oscillator(), &y0(), 0.0, &cfg).unwrap();
        assert_eq!(sol.y1, y0());
        assert_eq!(sol.iterations, 1);
        let sol = step_picard(&t, &oscillator(), &y0(), 0.0, &cfg).unwrap();
        assert_eq!(sol.y1, y0());
        assert_eq!(sol.iterations, 1);
        let r = stage_residual(&t, &oscillator(), &y0(), 0.0, &vec![y0(); 3], &cfg).unwrap();
        assert!(r.iter().all(|v| v.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn avf_is_midpoint_on_oscillator() {
        let t = make_avf();
        let h = 0.1;
        let cfg = SolverConfig::for_tableau(&t).with_tol(1e-15);
        let sol = step_newton(&t, &oscillator(), &y0(), h, &cfg).unwrap();
        // Midpoint: y1 = (I - hS/2)⁻¹ (I + hS/2) y0.
        let a = h / 2.0;
        let d = 1.0 + a * a;
        let want = DVector::from_vec(vec![(1.0 - a * a) / d, -2.0 * a / d]);
        assert!((&sol.y1 - &want).amax() < 1e-15);
        assert!((sol.y1.norm() - 1.0).abs() < 1e-13);
        // The midpoint stage is the exact stage solution.
        let stage = (&y0() + &want) * 0.5 + (&want - &y0()) * (cfg.resolved_stage_nodes(1)[0] - 0.5);
        let r = stage_residual(&t, &oscillator(), &y0(), h, &[stage], &cfg).unwrap();
        assert!(r[0].amax() < 1e-13);
    }

    #[test]
    fn modes_agree() {
        let t = make_parallel4(&int(1)).unwrap();
        let sys = oscillator();
        let base = SolverConfig::for_tableau(&t).with_tol(1e-14);
        let dec = step_newton(&t, &sys, &y0(), 0.1, &base).unwrap();
        assert_eq!(dec.used_mode, SolveMode::Decoupled);
        let cou = step_newton(&t, &sys, &y0(), 0.1, &base.clone().with_mode(SolveMode::Coupled)).unwrap();
        let pic = step_picard(&t, &sys, &y0(), 0.1, &base).unwrap();
        assert!((&dec.y1 - &cou.y1).amax() < 1e-13);
        assert!((&dec.y1 - &pic.y1).amax() < 1e-13);
    }

    #[test]
    fn complex_spectrum_falls_back_to_coupled() {
        let t = make_avf_collocation(2).unwrap();
        let sol = step_newton(&t, &oscillator(), &y0(), 0.1, &SolverConfig::for_tableau(&t)).unwrap();
        assert_eq!(sol.used_mode, SolveMode::Coupled);
    }

    #[test]
    fn y1_matches_stage_polynomial() {
        let t = make_avf_collocation(3).unwrap();
        let cfg = SolverConfig::for_tableau(&t).with_tol(1e-15);
        let sol = step_newton(&t, &oscillator(), &y0(), 0.2, &cfg).unwrap();
        let end = eval_stage_polynomial(&cfg.resolved_stage_nodes(3), &y0(), &sol.stage_values, 1.0);
        assert!((end - &sol.y1).amax() < 1e-13);
    }

    #[test]
    fn picard_diverges_on_large_step() {
        let t = make_avf();
        let cfg = SolverConfig::for_tableau(&t);
        let err = step_picard(&t, &oscillator(), &y0(), 50.0, &cfg).unwrap_err();
        assert!(matches!(err, IntegratorError::NoConvergence { .. }));
    }

    #[test]
    fn invalid_configs() {
        let t = make_avf_collocation(2).unwrap();
        let mut cfg = SolverConfig::for_tableau(&t);
        cfg.stage_nodes = Some(vec![0.5, 0.5]);
        assert!(step_newton(&t, &oscillator(), &y0(), 0.1, &cfg).is_err());
        let cfg = SolverConfig::for_tableau(&t).with_quad_nodes(0);
        assert!(matches!(cfg.validate(2), Err(IntegratorError::InvalidConfig(_))));
        let cfg = SolverConfig::for_tableau(&t).with_tol(0.0);
        assert!(cfg.validate(2).is_err());
    }

    #[test]
    fn empty_trajectory_and_csv() {
        let t = make_avf();
        let traj = integrate(&t, &oscillator(), &y0(), 0.1, 0, &SolverConfig::for_tableau(&t)).unwrap();
        assert_eq!(traj.states, vec![y0()]);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,t,y_1,y_2,H,H_drift\n0,"));
    }
}
