//! Command-line front end: `audit`, `spectrum`, `order`, `integrate` and
//! `bench`.
//!
//! Exit status is 0 on success, 2 for usage errors (including invalid method
//! parameters) and 1 for computational failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bseries::{tree_table, MAX_TREE_ORDER};
use crate::exact::{fmt_rational, parse_rational, Rational};
use crate::harness::{
    efficiency_study, energy_drift, measure_order, measure_parallel_speedup, output_filename,
    problem_by_name, spring_chain, study_config, MethodSpec,
};
use crate::integrator::{integrate, SolveMode, SolverConfig};
use crate::spectral::{parallelizable, DEFAULT_SPECTRAL_TOL};
use crate::tableau::{audit, parallel6_preset_params, CsrkTableau, TableauError, AUDIT_MAX_ORDER};

#[derive(Debug, Parser)]
#[command(name = "csrk", version, about = "Energy-preserving continuous-stage Runge-Kutta methods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact audit of a tableau: symmetry, simplifying assumptions, order.
    Audit {
        #[command(flatten)]
        method: MethodArgs,
        /// Highest tree order checked.
        #[arg(long, default_value_t = AUDIT_MAX_ORDER)]
        max_order: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exact V^-1 E V, its characteristic polynomial, eigenvalues and the
    /// decoupling verdict.
    Spectrum {
        #[command(flatten)]
        method: MethodArgs,
        /// Tolerance on imaginary parts and eigenvalue gaps.
        #[arg(long, default_value_t = DEFAULT_SPECTRAL_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Per-tree order conditions as CSV: tree, order, sigma, e, phi, defect.
    Order {
        #[command(flatten)]
        method: MethodArgs,
        /// Highest tree order listed.
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
    /// Integrate a builtin problem; writes `<problem>_<method>_<h>.csv` and
    /// a JSON sidecar into the output directory.
    Integrate {
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Step size.
        #[arg(long)]
        h: f64,
        /// Number of steps.
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Numerical studies: convergence order, efficiency ratio, energy
    /// drift, decoupled-solve speedup.
    Bench {
        #[arg(long, value_enum)]
        study: Study,
        #[command(flatten)]
        method: MethodArgs,
        #[arg(long, value_enum, default_value_t = ProblemArg::Oscillator)]
        problem: ProblemArg,
        /// Step size (efficiency, drift, speedup).
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        /// Steps (drift, speedup).
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Comma-separated step sizes for the order study.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        h_list: Vec<f64>,
        /// Comma-separated worker counts for the speedup study.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        worker_list: Vec<usize>,
        /// Masses in the spring chain used by the speedup study.
        #[arg(long, default_value_t = 150)]
        chain: usize,
        #[command(flatten)]
        solver: SolverArgs,
        /// Directory for a JSON summary; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodName {
    Avf,
    AvfCollocation,
    Parallel4,
    Parallel6,
    Bnonconst4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Oscillator,
    Pendulum,
    Kepler,
    HenonHeiles,
}

impl ProblemArg {
    fn name(self) -> &'static str {
        match self {
            ProblemArg::Oscillator => "oscillator",
            ProblemArg::Pendulum => "pendulum",
            ProblemArg::Kepler => "kepler",
            ProblemArg::HenonHeiles => "henon-heiles",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Order,
    Efficiency,
    Drift,
    Speedup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Decoupled,
    Coupled,
    Picard,
}

impl From<ModeArg> for SolveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Decoupled => SolveMode::Decoupled,
            ModeArg::Coupled => SolveMode::Coupled,
            ModeArg::Picard => SolveMode::Picard,
        }
    }
}

fn exact_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Clone, Debug, Args)]
pub struct MethodArgs {
    /// Method family.
    #[arg(long, value_enum, required_unless_present = "tableau")]
    method: Option<MethodName>,
    /// Read M from a JSON file `{"s": .., "M": [[num, den], ..]}` instead.
    #[arg(long, conflicts_with = "method")]
    tableau: Option<PathBuf>,
    /// Degree of the AVF collocation method.
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Order-4 family parameter, exact (`p/q`, integer or decimal).
    #[arg(long, value_parser = exact_arg, default_value = "1")]
    theta: Rational,
    /// Order-6 family parameter `a`.
    #[arg(long, value_parser = exact_arg)]
    a: Option<Rational>,
    /// Order-6 family parameter `c`.
    #[arg(long, value_parser = exact_arg)]
    c: Option<Rational>,
    /// Amount subtracted from the order-6 Gram entry `γ`.
    #[arg(long, value_parser = exact_arg)]
    gamma_shift: Option<Rational>,
}

impl MethodArgs {
    fn spec(&self) -> Option<MethodSpec> {
        let (a0, c0, g0) = parallel6_preset_params();
        Some(match self.method? {
            MethodName::Avf => MethodSpec::Avf,
            MethodName::AvfCollocation => MethodSpec::AvfCollocation { s: self.s },
            MethodName::Parallel4 => MethodSpec::Parallel4 { theta: self.theta.clone() },
            MethodName::Parallel6 => MethodSpec::Parallel6 {
                a: self.a.clone().unwrap_or(a0),
                c: self.c.clone().unwrap_or(c0),
                gamma_shift: self.gamma_shift.clone().unwrap_or(g0),
            },
            MethodName::Bnonconst4 => MethodSpec::Bnonconst4,
        })
    }

    fn slug(&self) -> String {
        match (self.spec(), &self.tableau) {
            (Some(spec), _) => spec.slug().to_string(),
            (None, Some(path)) => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            (None, None) => "tableau".into(),
        }
    }

    fn build(&self) -> Result<CsrkTableau, CliError> {
        if let Some(path) = &self.tableau {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            return CsrkTableau::from_json(self.slug(), &value).map_err(usage);
        }
        self.spec().expect("clap requires a method").build().map_err(usage)
    }
}

#[derive(Clone, Debug, Args)]
pub struct SolverArgs {
    /// Gauss nodes for the stage integrals [default: exact count for
    /// polynomial problems, else 2s + 2].
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// Newton (or Picard) tolerance.
    #[arg(long, default_value_t = crate::integrator::DEFAULT_NEWTON_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Decoupled)]
    mode: ModeArg,
    /// Worker threads for the decoupled solve [default: s].
    #[arg(long)]
    workers: Option<usize>,
}

impl SolverArgs {
    fn config(&self, t: &CsrkTableau, prob: &crate::harness::BenchmarkProblem) -> SolverConfig {
        let mut cfg = study_config(t, prob, self.tol).with_mode(self.mode.into());
        if let Some(q) = self.quad_nodes {
            cfg.quad_nodes = q;
        }
        if let Some(w) = self.workers {
            cfg.worker_count = w;
        }
        cfg
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    /// The reader of stdout went away; not reported.
    BrokenPipe,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 1,
            CliError::BrokenPipe => 0,
        }
    }
}

fn usage(e: TableauError) -> CliError {
    CliError::Usage(e.to_string())
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn io_err(e: std::io::Error) -> CliError {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return CliError::BrokenPipe;
    }
    CliError::Compute(e.to_string())
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return e.exit_code();
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let (kind, msg) = match &e {
                CliError::Usage(m) => ("usage", m),
                CliError::Compute(m) => ("computation", m),
                CliError::BrokenPipe => return 0,
            };
            let _ = writeln!(stderr, "{}", json!({ "error": kind, "message": msg }));
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Audit { method, max_order, format } => cmd_audit(&method, max_order, format, out),
        Command::Spectrum { method, tol, format } => cmd_spectrum(&method, tol, format, out),
        Command::Order { method, max_order } => cmd_order(&method, max_order, out),
        Command::Integrate { method, problem, h, steps, solver, out: dir } => {
            cmd_integrate(&method, problem, h, steps, &solver, &dir, out)
        }
        Command::Bench { .. } => cmd_bench(command, out),
    }
}

fn cmd_audit(method: &MethodArgs, max_order: usize, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let t = method.build()?;
    let report = audit(&t, max_order).map_err(usage)?;
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).map_err(compute)?;
            v["method"] = json!(t.name());
            v["s"] = json!(t.degree());
            v["symmetric"] = json!(report.energy_preserving);
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(compute)?).map_err(io_err)?;
        }
        Format::Text => {
            writeln!(out, "method: {}", t.name()).map_err(io_err)?;
            writeln!(out, "s: {}", t.degree()).map_err(io_err)?;
            writeln!(out, "M:\n{}", t.matrix()).map_err(io_err)?;
            writeln!(out, "symmetric: {}", report.energy_preserving).map_err(io_err)?;
            writeln!(out, "consistent: {}", report.consistent).map_err(io_err)?;
            writeln!(out, "C(eta) holds up to eta = {}", report.satisfied_c_eta).map_err(io_err)?;
            writeln!(out, "order: {}", report.algebraic_order).map_err(io_err)?;
            for c in &report.details {
                writeln!(out, "  {:<16} {}", c.name, if c.passed { "pass" } else { "fail" }).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

fn cmd_spectrum(method: &MethodArgs, tol: f64, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let t = method.build()?;
    let rep = parallelizable(&t, tol);
    let vev: Vec<Vec<String>> = (0..t.degree())
        .map(|i| rep.vev.row(i).iter().map(fmt_rational).collect())
        .collect();
    let coeffs: Vec<String> = rep.char_poly.coeffs().iter().map(fmt_rational).collect();
    let eig: Vec<[f64; 2]> = rep.eigenvalues.iter().map(|z| [z.re, z.im]).collect();
    match format {
        Format::Json => {
            let v = json!({
                "method": t.name(),
                "vev": vev,
                "char_poly": coeffs,
                "eigenvalues": eig,
                "real_distinct": rep.real_distinct,
                "condition_estimate": rep.condition_estimate,
                "closed_form_real_distinct": rep.closed_form_real_distinct,
                "tol": tol,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(compute)?).map_err(io_err)?;
        }
        Format::Text => {
            writeln!(out, "method: {}", t.name()).map_err(io_err)?;
            writeln!(out, "V^-1 E V:\n{}", rep.vev).map_err(io_err)?;
            writeln!(out, "characteristic polynomial (ascending): {}", coeffs.join(", ")).map_err(io_err)?;
            for z in &rep.eigenvalues {
                writeln!(out, "  lambda = {:+.15e} {:+.3e}i", z.re, z.im).map_err(io_err)?;
            }
            if let Some(c) = rep.condition_estimate {
                writeln!(out, "condition of T: {c:.6e}").map_err(io_err)?;
            }
            if let Some(cf) = rep.closed_form_real_distinct {
                writeln!(out, "closed-form verdict: {cf}").map_err(io_err)?;
            }
            writeln!(out, "real_distinct={}", rep.real_distinct).map_err(io_err)?;
        }
    }
    Ok(())
}

fn cmd_order(method: &MethodArgs, max_order: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if max_order == 0 || max_order > MAX_TREE_ORDER {
        return Err(CliError::Usage(format!("--max-order must be in 1..={MAX_TREE_ORDER}")));
    }
    let t = method.build()?;
    let table = tree_table(&t, max_order).map_err(compute)?;
    writeln!(out, "tree,order,sigma,e,phi,defect").map_err(io_err)?;
    for row in table {
        writeln!(
            out,
            "\"{}\",{},{},{},{},{}",
            row.tree,
            row.tree.order(),
            fmt_rational(&row.sigma),
            fmt_rational(&row.exact_flow),
            fmt_rational(&row.weight),
            fmt_rational(&row.defect())
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn check_step(h: f64) -> Result<(), CliError> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--h must be positive, got {h}")))
    }
}

fn cmd_integrate(
    method: &MethodArgs,
    problem: ProblemArg,
    h: f64,
    steps: usize,
    solver: &SolverArgs,
    dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    check_step(h)?;
    let t = method.build()?;
    let prob = problem_by_name(problem.name()).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = solver.config(&t, &prob);
    cfg.validate(t.degree()).map_err(|e| CliError::Usage(e.to_string()))?;
    let traj = integrate(&t, &prob.system, &prob.y0, h, steps, &cfg).map_err(compute)?;
    fs::create_dir_all(dir).map_err(io_err)?;
    let csv_path = dir.join(output_filename(&prob.name, &method.slug(), h));
    let file = fs::File::create(&csv_path).map_err(io_err)?;
    traj.write_csv(std::io::BufWriter::new(file)).map_err(io_err)?;
    let sidecar = csv_path.with_extension("json");
    fs::write(&sidecar, serde_json::to_string_pretty(&traj.diagnostics()).map_err(compute)?).map_err(io_err)?;
    writeln!(out, "wrote {}", csv_path.display()).map_err(io_err)?;
    writeln!(out, "max_energy_drift={:.6e}", traj.max_energy_drift()).map_err(io_err)?;
    writeln!(out, "mode={}", traj.mode).map_err(io_err)?;
    Ok(())
}

fn cmd_bench(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let Command::Bench { study, method, problem, h, steps, h_list, worker_list, chain, solver, out: dir } = command
    else {
        unreachable!("dispatched on Bench")
    };
    let prob = problem_by_name(problem.name()).map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = match study {
        Study::Order => {
            let t = method.build()?;
            let cfg = solver.config(&t, &prob);
            let m = measure_order(&t, &prob, &h_list, &cfg).map_err(compute)?;
            json!({ "study": "order", "method": t.name(), "problem": prob.name, "result": m })
        }
        Study::Efficiency => {
            check_step(h)?;
            let s = efficiency_study(&method.theta, &prob, h).map_err(compute)?;
            json!({ "study": "efficiency", "problem": prob.name, "result": s })
        }
        Study::Drift => {
            check_step(h)?;
            let t = method.build()?;
            let cfg = solver.config(&t, &prob);
            let d = energy_drift(&t, &prob, h, steps, &cfg).map_err(compute)?;
            json!({ "study": "drift", "method": t.name(), "problem": prob.name, "h": h, "steps": steps, "max_energy_drift": d })
        }
        Study::Speedup => {
            check_step(h)?;
            let t = method.build()?;
            let chain = spring_chain(chain.max(1));
            let rows = measure_parallel_speedup(&t, &chain, h, steps, &worker_list).map_err(compute)?;
            json!({ "study": "speedup", "method": t.name(), "problem": chain.name, "rows": rows })
        }
    };
    let text = serde_json::to_string_pretty(&summary).map_err(compute)?;
    match dir {
        Some(dir) => {
            fs::create_dir_all(&dir).map_err(io_err)?;
            let name = format!("bench_{}.json", summary["study"].as_str().unwrap_or("study"));
            let path = dir.join(name);
            fs::write(&path, text).map_err(io_err)?;
            writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
        }
        None => writeln!(out, "{text}").map_err(io_err)?,
    }
    Ok(())
}
