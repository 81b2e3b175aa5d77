//! Stage matrix `E`, its node-independent similarity form and the
//! real-distinct-eigenvalue test that decides whether the simplified Newton
//! system splits into `s` independent blocks.
//!
//! For stage nodes `c₁..c_s` (with `c₀ = 0` pinned to the step's start)
//!
//! ```text
//! E_ij = ∫₀¹ A(c_i, ζ) l_j(ζ) dζ
//! V⁻¹EV = diag(1, 1/2, …, 1/s) · M · [1/(i+j)]_{i,j=1..s}
//! ```
//!
//! where `V_ik = c_i^k`. The right-hand side does not involve the nodes, so
//! the spectrum of `E` is a property of the tableau alone.

use log::warn;
use nalgebra::{Complex, DMatrix};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{
    from_f64, int, lagrange_basis, poly_integrate_01, rat, to_f64, Rational, RationalMatrix,
    RationalPoly,
};
use crate::integrator::quadrature::gauss_nodes_weights;
use crate::tableau::CsrkTableau;

pub type Complex64 = Complex<f64>;

/// Default tolerance for the real/distinct classification.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-9;

/// Condition number of the eigenvector basis above which the decomposition
/// is flagged as ill-conditioned.
pub const ILL_CONDITIONED_LIMIT: f64 = 1e8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid stage nodes: {0}")]
    InvalidNodes(String),
    #[error("stage matrix has a complex or repeated spectrum")]
    ComplexSpectrum { eigenvalues: Vec<Complex64> },
    #[error("stage matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Exact `V⁻¹EV = diag(1/i) · M · [1/(i+j)]`.
pub fn vev_matrix(t: &CsrkTableau) -> RationalMatrix {
    let s = t.degree();
    let scale = RationalMatrix::diagonal(&(1..=s).map(|i| rat(1, i as i64)).collect::<Vec<_>>());
    let shifted_hilbert = RationalMatrix::from_fn(s, s, |i, j| rat(1, (i + j + 2) as i64));
    &(&scale * t.matrix()) * &shifted_hilbert
}

/// Zeros of the `s`-th shifted Legendre polynomial.
pub fn default_stage_nodes(s: usize) -> Vec<f64> {
    gauss_nodes_weights(s).nodes
}

pub fn validate_nodes(nodes: &[f64]) -> Result<(), SpectralError> {
    for (i, &c) in nodes.iter().enumerate() {
        if !c.is_finite() || c == 0.0 {
            return Err(SpectralError::InvalidNodes(format!("node {i} = {c} must be finite and nonzero")));
        }
        if nodes[..i].contains(&c) {
            return Err(SpectralError::InvalidNodes(format!("node {c} repeated")));
        }
    }
    Ok(())
}

/// Exact `E` for the given nodes (each taken at its exact binary value),
/// rounded to `f64` entrywise.
pub fn stage_matrix_e(t: &CsrkTableau, nodes: &[f64]) -> Result<DMatrix<f64>, SpectralError> {
    Ok(stage_matrix_e_exact(t, nodes)?.to_f64())
}

pub fn stage_matrix_e_exact(t: &CsrkTableau, nodes: &[f64]) -> Result<RationalMatrix, SpectralError> {
    let s = t.degree();
    if nodes.len() != s {
        return Err(SpectralError::InvalidNodes(format!(
            "expected {s} nodes, got {}",
            nodes.len()
        )));
    }
    validate_nodes(nodes)?;
    let exact_nodes: Vec<Rational> = nodes.iter().map(|&c| from_f64(c)).collect();
    let basis = lagrange_basis(&anchored(&exact_nodes))
        .map_err(|e| SpectralError::InvalidNodes(e.to_string()))?;
    let rows: Vec<RationalPoly> = exact_nodes.iter().map(|c| t.a_at_tau(c)).collect();
    Ok(RationalMatrix::from_fn(s, s, |i, j| {
        poly_integrate_01(&(&rows[i] * &basis[j + 1]))
    }))
}

/// `[0, c₁, …, c_s]`
pub(crate) fn anchored(nodes: &[Rational]) -> Vec<Rational> {
    std::iter::once(int(0)).chain(nodes.iter().cloned()).collect()
}

/// Roots of a polynomial with exact coefficients: companion-matrix
/// eigenvalues followed by a few Newton corrections on the polynomial itself.
/// Sorted by real part, then imaginary part.
pub fn poly_roots(p: &RationalPoly) -> Vec<Complex64> {
    let Some(n) = p.degree() else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let lead = p.coeff(n);
    let monic: Vec<f64> = (0..n).map(|k| to_f64(&(p.coeff(k) / &lead))).collect();
    let companion = DMatrix::from_fn(n, n, |i, j| {
        if i == n - 1 {
            -monic[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
    let coeffs: Vec<f64> = monic.iter().copied().chain(std::iter::once(1.0)).collect();
    for z in roots.iter_mut() {
        *z = polish_root(&coeffs, *z);
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

fn polish_root(coeffs: &[f64], mut z: Complex64) -> Complex64 {
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            d = d * z + p;
            p = p * z + c;
        }
        (p, d)
    };
    let (mut pz, _) = eval(z);
    for _ in 0..8 {
        let (p, d) = eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p / d;
        let (pc, _) = eval(cand);
        if pc.norm() < pz.norm() {
            z = cand;
            pz = pc;
        } else {
            break;
        }
    }
    // A real polynomial's real root can pick up a round-off imaginary part.
    if z.im != 0.0 {
        let re = Complex64::new(z.re, 0.0);
        if eval(re).0.norm() <= pz.norm() {
            z = re;
        }
    }
    z
}

/// `max |Im λ| < tol` and `min |λ_i - λ_j| > tol`.
pub fn is_real_distinct(eigenvalues: &[Complex64], tol: f64) -> bool {
    let real = eigenvalues.iter().all(|z| z.im.abs() < tol);
    let distinct = eigenvalues.iter().enumerate().all(|(i, a)| {
        eigenvalues[i + 1..].iter().all(|b| (a - b).norm() > tol)
    });
    real && distinct
}

/// `(1/6)·2^{2/3} + (5/24)·2^{1/3} + 1/4 ≈ 0.7770503941`: the order-4
/// family has three real distinct stage eigenvalues iff `θ` exceeds this.
pub fn parallel4_threshold() -> f64 {
    2f64.powf(2.0 / 3.0) / 6.0 + 5.0 / 24.0 * 2f64.cbrt() + 0.25
}

/// If `t` is a member of the order-4 family, its parameter `θ`.
pub fn parallel4_theta(t: &CsrkTableau) -> Option<Rational> {
    if t.degree() != 3 {
        return None;
    }
    let theta = -(&t.matrix()[(0, 0)] - int(4)) / int(300);
    let candidate = crate::tableau::make_parallel4(&theta).ok()?;
    (candidate.matrix() == t.matrix()).then_some(theta)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    #[serde(skip)]
    pub vev: RationalMatrix,
    #[serde(skip)]
    pub char_poly: RationalPoly,
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    pub real_distinct: bool,
    #[serde(skip)]
    pub transform_t: Option<DMatrix<f64>>,
    pub condition_estimate: Option<f64>,
    /// Closed-form verdict for the order-4 family, when applicable.
    pub closed_form_real_distinct: Option<bool>,
    pub tol: f64,
}

/// Eigenvalues of the exact `V⁻¹EV` (via its exact characteristic
/// polynomial) and the real-distinct verdict. When real and distinct, the
/// eigenvector basis of `E` at the default nodes is attached.
pub fn parallelizable(t: &CsrkTableau, tol: f64) -> SpectralReport {
    assert!(tol > 0.0, "tolerance must be positive");
    let vev = vev_matrix(t);
    let char_poly = vev.char_poly().expect("square");
    let eigenvalues = poly_roots(&char_poly);
    let real_distinct = is_real_distinct(&eigenvalues, tol);
    let closed_form_real_distinct =
        parallel4_theta(t).map(|theta| to_f64(&theta) > parallel4_threshold());
    if let Some(cf) = closed_form_real_distinct {
        if cf != real_distinct {
            warn!("numeric verdict {real_distinct} disagrees with closed form {cf} for {}", t.name());
        }
    }
    let (transform_t, condition_estimate) = if real_distinct {
        let e = stage_matrix_e(t, &default_stage_nodes(t.degree())).expect("default nodes are valid");
        match decompose_with_eigenvalues(&e, &eigenvalues, tol) {
            Ok(d) => (Some(d.t), Some(d.condition)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    SpectralReport {
        vev,
        char_poly,
        eigenvalues,
        real_distinct,
        transform_t,
        condition_estimate,
        closed_form_real_distinct,
        tol,
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Columns are unit eigenvectors, ordered like `eigenvalues`.
    pub t: DMatrix<f64>,
    pub t_inv: DMatrix<f64>,
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// 2-norm condition number of `t`.
    pub condition: f64,
    /// `‖T Λ T⁻¹ - E‖_F / ‖E‖_F`
    pub reconstruction_error: f64,
    /// Condition above [`ILL_CONDITIONED_LIMIT`] or reconstruction worse
    /// than the requested tolerance. Decoupled solves still converge but
    /// lose the per-iteration contraction of exact simplified Newton.
    pub ill_conditioned: bool,
}

/// `E = T diag(Λ) T⁻¹` over the reals, or `ComplexSpectrum`.
pub fn eigendecompose_e(e: &DMatrix<f64>, tol: f64) -> Result<EigenDecomposition, SpectralError> {
    if !e.is_square() {
        return Err(SpectralError::NotSquare(e.nrows(), e.ncols()));
    }
    let eig: Vec<Complex64> = e.clone().complex_eigenvalues().iter().copied().collect();
    decompose_with_eigenvalues(e, &eig, tol)
}

/// As [`eigendecompose_e`], with the eigenvalues supplied by the caller
/// (for instance as roots of an exact characteristic polynomial).
pub fn decompose_with_eigenvalues(
    e: &DMatrix<f64>,
    eig: &[Complex64],
    tol: f64,
) -> Result<EigenDecomposition, SpectralError> {
    if !e.is_square() {
        return Err(SpectralError::NotSquare(e.nrows(), e.ncols()));
    }
    let n = e.nrows();
    if eig.len() != n || !is_real_distinct(eig, tol) {
        return Err(SpectralError::ComplexSpectrum { eigenvalues: eig.to_vec() });
    }
    let mut lambdas: Vec<f64> = eig.iter().map(|z| z.re).collect();
    lambdas.sort_by(f64::total_cmp);

    let mut t = DMatrix::zeros(n, n);
    for (k, &lambda) in lambdas.iter().enumerate() {
        let v = null_vector(e, lambda);
        t.set_column(k, &v);
    }
    let complex = || SpectralError::ComplexSpectrum {
        eigenvalues: lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect(),
    };
    let t_inv = t.clone().try_inverse().ok_or_else(complex)?;
    let sv = t.singular_values();
    let condition = sv.max() / sv.min();
    let recon = &t * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambdas.clone())) * &t_inv;
    let reconstruction_error = (recon - e).norm() / e.norm().max(f64::MIN_POSITIVE);
    let ill_conditioned = condition > ILL_CONDITIONED_LIMIT || reconstruction_error > tol;
    if ill_conditioned {
        warn!(
            "stage eigenbasis is ill-conditioned (cond {condition:.3e}, reconstruction {reconstruction_error:.3e})"
        );
    }
    Ok(EigenDecomposition {
        t,
        t_inv,
        eigenvalues: lambdas,
        condition,
        reconstruction_error,
        ill_conditioned,
    })
}

/// Unit right singular vector of `E - λI` for its smallest singular value,
/// sign-normalized so the largest component is positive.
fn null_vector(e: &DMatrix<f64>, lambda: f64) -> nalgebra::DVector<f64> {
    let n = e.nrows();
    let shifted = e - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let mut v = v_t.row(k).transpose();
    let (imax, _) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("nonempty");
    if v[imax] < 0.0 {
        v = -v;
    }
    v
}
