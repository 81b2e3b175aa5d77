//! Benchmark problems and numerical studies: energy drift, empirical
//! convergence order, the cost-normalized efficiency comparison against the
//! fourth-order AVF collocation method, and decoupled-solve speedup.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, parse_rational, Rational, RationalMatrix};
use crate::integrator::{
    canonical_structure, integrate, HamiltonianSystem, IntegratorError, SolveMode, SolverConfig,
    Trajectory,
};
use crate::tableau::{
    make_avf, make_avf_collocation, make_bnonconst4, make_parallel4, make_parallel6,
    parallel6_preset_params, CsrkTableau, TableauError,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("errors reached the round-off floor or stopped decreasing: {errors:?}")]
    DegenerateFit { errors: Vec<f64> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unknown problem '{0}'")]
    UnknownProblem(String),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
}

pub type ExactSolution = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub system: HamiltonianSystem,
    pub y0: DVector<f64>,
    /// Typical step size; references are computed at `reference_h / 64`.
    pub reference_h: f64,
    pub t_end: f64,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("y0", &self.y0.as_slice())
            .field("reference_h", &self.reference_h)
            .field("t_end", &self.t_end)
            .finish()
    }
}

impl BenchmarkProblem {
    pub fn initial_energy(&self) -> f64 {
        self.system.hamiltonian(&self.y0)
    }
}

fn vector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// `H = (q² + p²)/2`, `y₀ = (1, 0)`.
pub fn oscillator() -> BenchmarkProblem {
    let y0 = vector(&[1.0, 0.0]);
    let system = HamiltonianSystem::new(canonical_structure(1), |y| 0.5 * y.norm_squared(), |y| y.clone())
        .expect("canonical structure")
        .with_hessian(|_| DMatrix::identity(2, 2), &y0)
        .expect("consistent Hessian")
        .with_poly_degree(2);
    BenchmarkProblem {
        name: "oscillator".into(),
        system,
        y0,
        reference_h: 0.1,
        t_end: 1.0,
        exact: Some(Arc::new(|t| vector(&[t.cos(), -t.sin()]))),
    }
}

/// `H = p²/2 - cos q`, `y₀ = (1, 0)`.
pub fn pendulum() -> BenchmarkProblem {
    let y0 = vector(&[1.0, 0.0]);
    let system = HamiltonianSystem::new(
        canonical_structure(1),
        |y| 0.5 * y[1] * y[1] - y[0].cos(),
        |y| vector(&[y[0].sin(), y[1]]),
    )
    .expect("canonical structure")
    .with_hessian(|y| DMatrix::from_row_slice(2, 2, &[y[0].cos(), 0.0, 0.0, 1.0]), &y0)
    .expect("consistent Hessian");
    BenchmarkProblem {
        name: "pendulum".into(),
        system,
        y0,
        reference_h: 0.1,
        t_end: 1.0,
        exact: None,
    }
}

/// Two-body problem `H = |p|²/2 - 1/|q|` on the circular orbit
/// `q = (1, 0)`, `p = (0, 1)`.
pub fn kepler() -> BenchmarkProblem {
    let y0 = vector(&[1.0, 0.0, 0.0, 1.0]);
    let system = HamiltonianSystem::new(
        canonical_structure(2),
        |y| 0.5 * (y[2] * y[2] + y[3] * y[3]) - 1.0 / y[0].hypot(y[1]),
        |y| {
            let r3 = y[0].hypot(y[1]).powi(3);
            vector(&[y[0] / r3, y[1] / r3, y[2], y[3]])
        },
    )
    .expect("canonical structure")
    .with_hessian(
        |y| {
            let r2 = y[0] * y[0] + y[1] * y[1];
            let r3 = r2 * r2.sqrt();
            let r5 = r3 * r2;
            let mut h = DMatrix::identity(4, 4);
            h[(0, 0)] = 1.0 / r3 - 3.0 * y[0] * y[0] / r5;
            h[(1, 1)] = 1.0 / r3 - 3.0 * y[1] * y[1] / r5;
            h[(0, 1)] = -3.0 * y[0] * y[1] / r5;
            h[(1, 0)] = h[(0, 1)];
            h
        },
        &vector(&[0.9, 0.2, 0.1, 1.1]),
    )
    .expect("consistent Hessian");
    BenchmarkProblem {
        name: "kepler".into(),
        system,
        y0,
        reference_h: 0.05,
        t_end: 1.0,
        exact: Some(Arc::new(|t| vector(&[t.cos(), t.sin(), -t.sin(), t.cos()]))),
    }
}

/// `H = |p|²/2 + |q|²/2 + q₁²q₂ - q₂³/3`, `q = (0, 0.1)`, `p = (0.5, 0)`.
pub fn henon_heiles() -> BenchmarkProblem {
    let y0 = vector(&[0.0, 0.1, 0.5, 0.0]);
    let system = HamiltonianSystem::new(
        canonical_structure(2),
        |y| {
            let (q1, q2) = (y[0], y[1]);
            0.5 * (y[2] * y[2] + y[3] * y[3]) + 0.5 * (q1 * q1 + q2 * q2) + q1 * q1 * q2 - q2 * q2 * q2 / 3.0
        },
        |y| {
            let (q1, q2) = (y[0], y[1]);
            vector(&[q1 + 2.0 * q1 * q2, q2 + q1 * q1 - q2 * q2, y[2], y[3]])
        },
    )
    .expect("canonical structure")
    .with_hessian(
        |y| {
            let mut h = DMatrix::identity(4, 4);
            h[(0, 0)] = 1.0 + 2.0 * y[1];
            h[(1, 1)] = 1.0 - 2.0 * y[1];
            h[(0, 1)] = 2.0 * y[0];
            h[(1, 0)] = 2.0 * y[0];
            h
        },
        &vector(&[0.1, 0.2, 0.3, 0.4]),
    )
    .expect("consistent Hessian")
    .with_poly_degree(3);
    BenchmarkProblem {
        name: "henon-heiles".into(),
        system,
        y0,
        reference_h: 0.05,
        t_end: 1.0,
        exact: None,
    }
}

/// Chain of `n` unit masses with springs to the walls and to each
/// neighbour; `N = 2n`, quadratic `H` with constant Hessian.
pub fn spring_chain(n: usize) -> BenchmarkProblem {
    assert!(n >= 1, "chain needs at least one mass");
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 2.0;
        if i + 1 < n {
            k[(i, i + 1)] = -1.0;
            k[(i + 1, i)] = -1.0;
        }
    }
    let mut hess = DMatrix::zeros(2 * n, 2 * n);
    hess.view_mut((0, 0), (n, n)).copy_from(&k);
    hess.view_mut((n, n), (n, n)).fill_with_identity();
    let hess = Arc::new(hess);
    let (hh, hg, hx) = (hess.clone(), hess.clone(), hess.clone());
    let y0 = DVector::from_fn(2 * n, |i, _| if i < n { ((i + 1) as f64 / n as f64).sin() } else { 0.0 });
    let system = HamiltonianSystem::new(
        canonical_structure(n),
        move |y| 0.5 * y.dot(&(&*hh * y)),
        move |y| &*hg * y,
    )
    .expect("canonical structure")
    .with_hessian(move |_| (*hx).clone(), &y0)
    .expect("consistent Hessian")
    .with_poly_degree(2);
    BenchmarkProblem {
        name: format!("spring-chain-{n}"),
        system,
        y0,
        reference_h: 0.05,
        t_end: 1.0,
        exact: None,
    }
}

pub fn builtin_problems() -> Vec<BenchmarkProblem> {
    vec![oscillator(), pendulum(), kepler(), henon_heiles()]
}

pub const PROBLEM_NAMES: [&str; 4] = ["oscillator", "pendulum", "kepler", "henon-heiles"];

pub fn problem_by_name(name: &str) -> Result<BenchmarkProblem, HarnessError> {
    match name {
        "oscillator" => Ok(oscillator()),
        "pendulum" => Ok(pendulum()),
        "kepler" => Ok(kepler()),
        "henon-heiles" => Ok(henon_heiles()),
        other => Err(HarnessError::UnknownProblem(other.to_string())),
    }
}

/// Method family plus parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum MethodSpec {
    Avf,
    AvfCollocation { s: usize },
    Parallel4 { theta: Rational },
    Parallel6 { a: Rational, c: Rational, gamma_shift: Rational },
    Bnonconst4,
}

pub const METHOD_NAMES: [&str; 5] = ["avf", "avf-collocation", "parallel4", "parallel6", "bnonconst4"];

impl MethodSpec {
    pub fn parallel6_preset() -> Self {
        let (a, c, gamma_shift) = parallel6_preset_params();
        MethodSpec::Parallel6 { a, c, gamma_shift }
    }

    pub fn slug(&self) -> &'static str {
        match self {
            MethodSpec::Avf => "avf",
            MethodSpec::AvfCollocation { .. } => "avf-collocation",
            MethodSpec::Parallel4 { .. } => "parallel4",
            MethodSpec::Parallel6 { .. } => "parallel6",
            MethodSpec::Bnonconst4 => "bnonconst4",
        }
    }

    pub fn build(&self) -> Result<CsrkTableau, TableauError> {
        match self {
            MethodSpec::Avf => Ok(make_avf()),
            MethodSpec::AvfCollocation { s } => make_avf_collocation(*s),
            MethodSpec::Parallel4 { theta } => make_parallel4(theta),
            MethodSpec::Parallel6 { a, c, gamma_shift } => make_parallel6(a, c, gamma_shift),
            MethodSpec::Bnonconst4 => Ok(make_bnonconst4()),
        }
    }
}

/// Consistent but non-symmetric `M = [[4, -5], [-6, 10]]`; not
/// energy-preserving.
pub fn make_nonsymmetric_control() -> CsrkTableau {
    CsrkTableau::new("control", RationalMatrix::from_i64_rows(&[&[4, -5], &[-6, 10]]))
        .expect("square matrix")
}

/// `<problem>_<method>_<h>.csv`
pub fn output_filename(problem: &str, method: &str, h: f64) -> String {
    format!("{problem}_{method}_{h}.csv")
}

/// Configuration used by the studies: tight tolerance, exact quadrature
/// for polynomial problems and `2s + 2` nodes otherwise.
pub fn study_config(t: &CsrkTableau, prob: &BenchmarkProblem, tol: f64) -> SolverConfig {
    SolverConfig::for_tableau(t)
        .with_exact_quadrature(t, &prob.system)
        .with_tol(tol)
}

/// `max_k |H(y_k) - H(y₀)|` over `n_steps` steps.
pub fn energy_drift(
    t: &CsrkTableau,
    prob: &BenchmarkProblem,
    h: f64,
    n_steps: usize,
    cfg: &SolverConfig,
) -> Result<f64, HarnessError> {
    Ok(integrate(t, &prob.system, &prob.y0, h, n_steps, cfg)?.max_energy_drift())
}

/// Solution at `t_end`: exact when known, else the sixth-order AVF
/// collocation method at step `reference_h / 64`.
pub fn reference_solution(prob: &BenchmarkProblem, t_end: f64) -> Result<DVector<f64>, HarnessError> {
    if let Some(exact) = &prob.exact {
        return Ok(exact(t_end));
    }
    let t = make_avf_collocation(3)?;
    let n = (t_end / (prob.reference_h / 64.0)).ceil().max(1.0) as usize;
    let cfg = SolverConfig::for_tableau(&t).with_tol(1e-15).with_quad_nodes(16);
    let traj = integrate(&t, &prob.system, &prob.y0, t_end / n as f64, n, &cfg)?;
    Ok(traj.final_state().clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderMeasurement {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Least-squares slope of `log error` against `log h`.
pub fn fit_slope(h: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Global error at `prob.t_end` for each step size and the fitted slope.
/// Every `h` must divide `t_end` (to within rounding).
pub fn measure_order(
    t: &CsrkTableau,
    prob: &BenchmarkProblem,
    h_list: &[f64],
    cfg: &SolverConfig,
) -> Result<OrderMeasurement, HarnessError> {
    if h_list.len() < 4 {
        return Err(HarnessError::InvalidInput("need at least four step sizes".into()));
    }
    let reference = reference_solution(prob, prob.t_end)?;
    let mut errors = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let steps = (prob.t_end / h).round();
        if !(h > 0.0) || (steps * h - prob.t_end).abs() > 1e-9 * prob.t_end {
            return Err(HarnessError::InvalidInput(format!("step {h} does not divide t_end {}", prob.t_end)));
        }
        let traj = integrate(t, &prob.system, &prob.y0, prob.t_end / steps, steps as usize, cfg)?;
        errors.push((traj.final_state() - &reference).norm());
    }
    let floor = 100.0 * f64::EPSILON * (1.0 + reference.norm());
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    if errors.iter().any(|&e| !(e > floor)) || !decreasing {
        return Err(HarnessError::DegenerateFit { errors });
    }
    Ok(OrderMeasurement {
        slope: fit_slope(h_list, &errors),
        h: h_list.to_vec(),
        errors,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyStudy {
    pub theta: f64,
    pub h: f64,
    /// Error of eight order-4 family steps of size `h`.
    pub err_new: f64,
    /// Error of one AVF collocation (`s = 2`) step of size `8h`.
    pub err_avf: f64,
    pub ratio: f64,
    /// `(60θ + 1) / 4096`
    pub predicted_ratio: f64,
    /// Same comparison with four steps against one step of size `4h`.
    pub ratio_4x: f64,
    /// `(60θ + 1) / 256`
    pub predicted_ratio_4x: f64,
}

/// Cost-normalized comparison of the order-4 family member `θ` with
/// the AVF collocation method of the same order.
pub fn efficiency_study(theta: &Rational, prob: &BenchmarkProblem, h: f64) -> Result<EfficiencyStudy, HarnessError> {
    let new = make_parallel4(theta)?;
    let avf = make_avf_collocation(2)?;
    let run = |t: &CsrkTableau, step: f64, n: usize| -> Result<f64, HarnessError> {
        let cfg = study_config(t, prob, 1e-15).with_mode(SolveMode::Coupled);
        let traj = integrate(t, &prob.system, &prob.y0, step, n, &cfg)?;
        let reference = reference_solution(prob, n as f64 * step)?;
        Ok((traj.final_state() - reference).norm())
    };
    let err_new = run(&new, h, 8)?;
    let err_avf = run(&avf, 8.0 * h, 1)?;
    let ratio_4x = run(&new, h, 4)? / run(&avf, 4.0 * h, 1)?;
    let amplification = 60.0 * crate::exact::to_f64(theta) + 1.0;
    Ok(EfficiencyStudy {
        theta: crate::exact::to_f64(theta),
        h,
        err_new,
        err_avf,
        ratio: err_new / err_avf,
        predicted_ratio: amplification / 4096.0,
        ratio_4x,
        predicted_ratio_4x: amplification / 256.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpeedupRow {
    pub workers: usize,
    pub wall_time_ms: f64,
    /// Wall time of the first row divided by this row's.
    pub speedup: f64,
    /// Final state bitwise equal to the first row's.
    pub identical: bool,
}

/// Wall time of a decoupled run for each worker count.
pub fn measure_parallel_speedup(
    t: &CsrkTableau,
    prob: &BenchmarkProblem,
    h: f64,
    n_steps: usize,
    worker_counts: &[usize],
) -> Result<Vec<SpeedupRow>, HarnessError> {
    if worker_counts.is_empty() {
        return Err(HarnessError::InvalidInput("no worker counts given".into()));
    }
    let mut rows: Vec<SpeedupRow> = Vec::new();
    let mut first: Option<(f64, Trajectory)> = None;
    for &workers in worker_counts {
        let cfg = study_config(t, prob, 1e-12).with_workers(workers);
        let start = Instant::now();
        let traj = integrate(t, &prob.system, &prob.y0, h, n_steps, &cfg)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let (base_ms, base) = first.get_or_insert_with(|| (ms, traj.clone()));
        rows.push(SpeedupRow {
            workers,
            wall_time_ms: ms,
            speedup: *base_ms / ms,
            identical: base.states == traj.states,
        });
    }
    Ok(rows)
}

/// Parses `p/q`, an integer or a decimal into an exact rational.
pub fn parse_exact(text: &str) -> Result<Rational, HarnessError> {
    parse_rational(text).map_err(|e| HarnessError::InvalidInput(e.to_string()))
}

/// `θ = 1`
pub fn default_theta() -> Rational {
    int(1)
}
