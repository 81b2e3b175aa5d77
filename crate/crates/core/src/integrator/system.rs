use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::IntegratorError;

pub type ScalarFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// `ẏ = S∇H(y)` with constant skew-symmetric `S`.
#[derive(Clone)]
pub struct HamiltonianSystem {
    s_matrix: DMatrix<f64>,
    hamiltonian: ScalarFn,
    gradient: VectorFn,
    hessian: Option<MatrixFn>,
    poly_degree: Option<usize>,
}

impl fmt::Debug for HamiltonianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSystem")
            .field("dim", &self.dim())
            .field("has_hessian", &self.hessian.is_some())
            .field("poly_degree", &self.poly_degree)
            .finish()
    }
}

/// `[[0, I], [-I, 0]]` of size `2d`.
pub fn canonical_structure(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        if j == i + d {
            1.0
        } else if i == j + d {
            -1.0
        } else {
            0.0
        }
    })
}

impl HamiltonianSystem {
    pub fn new(
        s_matrix: DMatrix<f64>,
        hamiltonian: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Result<Self, IntegratorError> {
        if !s_matrix.is_square() || s_matrix.nrows() == 0 {
            return Err(IntegratorError::InvalidSystem(format!(
                "structure matrix must be square and nonempty, got {}x{}",
                s_matrix.nrows(),
                s_matrix.ncols()
            )));
        }
        let skew = (&s_matrix + s_matrix.transpose()).amax();
        if skew > 4.0 * f64::EPSILON * s_matrix.amax() {
            return Err(IntegratorError::InvalidSystem(format!(
                "structure matrix is not skew-symmetric (|S + S^T| = {skew:e})"
            )));
        }
        Ok(Self {
            s_matrix,
            hamiltonian: Arc::new(hamiltonian),
            gradient: Arc::new(gradient),
            hessian: None,
            poly_degree: None,
        })
    }

    /// Attaches an analytic Hessian after checking it against central
    /// differences of the gradient at `sample`.
    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
        sample: &DVector<f64>,
    ) -> Result<Self, IntegratorError> {
        self.check_dim(sample)?;
        let analytic = hessian(sample);
        if analytic.shape() != (self.dim(), self.dim()) {
            return Err(IntegratorError::InvalidSystem("Hessian has the wrong shape".into()));
        }
        let numeric = self.fd_hessian(sample);
        let scale = 1.0 + analytic.amax();
        let err = (&analytic - &numeric).amax();
        if err > 1e-5 * scale {
            return Err(IntegratorError::InvalidSystem(format!(
                "Hessian disagrees with finite differences of the gradient by {err:e}"
            )));
        }
        self.hessian = Some(Arc::new(hessian));
        Ok(self)
    }

    /// Total degree of `H` when it is a polynomial.
    pub fn with_poly_degree(mut self, degree: usize) -> Self {
        self.poly_degree = Some(degree);
        self
    }

    pub fn dim(&self) -> usize {
        self.s_matrix.nrows()
    }

    pub fn structure(&self) -> &DMatrix<f64> {
        &self.s_matrix
    }

    pub fn poly_degree(&self) -> Option<usize> {
        self.poly_degree
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn hamiltonian(&self, y: &DVector<f64>) -> f64 {
        (self.hamiltonian)(y)
    }

    pub fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        (self.gradient)(y)
    }

    /// `f(y) = S∇H(y)`
    pub fn field(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.s_matrix * self.gradient(y)
    }

    /// `S∇²H(y)`, analytic when available.
    pub fn jacobian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let hess = match &self.hessian {
            Some(h) => h(y),
            None => self.fd_hessian(y),
        };
        &self.s_matrix * hess
    }

    pub(crate) fn check_dim(&self, y: &DVector<f64>) -> Result<(), IntegratorError> {
        if y.len() != self.dim() {
            return Err(IntegratorError::InvalidConfig(format!(
                "state has dimension {}, system has {}",
                y.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Central differences of the gradient, step `√ε·(1 + |y_i|)`,
    /// symmetrized.
    fn fd_hessian(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut hess = DMatrix::zeros(n, n);
        let mut probe = y.clone();
        for j in 0..n {
            let step = f64::EPSILON.sqrt() * (1.0 + y[j].abs());
            probe[j] = y[j] + step;
            let plus = self.gradient(&probe);
            probe[j] = y[j] - step;
            let minus = self.gradient(&probe);
            probe[j] = y[j];
            hess.set_column(j, &((plus - minus) / (2.0 * step)));
        }
        (&hess + hess.transpose()) * 0.5
    }
}
