//! Per-tableau floating coefficients. Every array is evaluated exactly in
//! rational arithmetic at the binary values of the floating nodes and
//! weights, then rounded once.

use nalgebra::DMatrix;

use crate::exact::{from_f64, lagrange_basis, to_f64, Rational, RationalMatrix, RationalPoly};
use crate::spectral::{anchored, stage_matrix_e_exact, validate_nodes, SpectralError};
use crate::tableau::CsrkTableau;

use super::quadrature::gauss_nodes_weights;

#[derive(Clone, Debug)]
pub struct Scheme {
    pub s: usize,
    /// `c₁..c_s`
    pub stage_nodes: Vec<f64>,
    /// Quadrature nodes `ζ_q`.
    pub quad_nodes: Vec<f64>,
    /// `l_j(ζ_q)` for `j = 0..=s`, row `q`.
    pub interp: DMatrix<f64>,
    /// `w_q A(c_i, ζ_q)`, row `i`.
    pub stage_weights: DMatrix<f64>,
    /// `w_q B(ζ_q)`
    pub output_weights: Vec<f64>,
    /// `E_ij = ∫ A(c_i, ζ) l_j(ζ) dζ`, `j = 1..=s`.
    pub e: DMatrix<f64>,
    /// Exact `E` at the binary stage nodes.
    pub e_exact: RationalMatrix,
    /// `l_j(1)`, used to evaluate the stage polynomial at the end point.
    pub end_interp: Vec<f64>,
}

impl Scheme {
    pub fn new(t: &CsrkTableau, stage_nodes: &[f64], quad_nodes: usize) -> Result<Self, SpectralError> {
        let s = t.degree();
        let e_exact = stage_matrix_e_exact(t, stage_nodes)?;
        validate_nodes(stage_nodes)?;
        let rule = gauss_nodes_weights(quad_nodes);
        let exact_c: Vec<Rational> = stage_nodes.iter().map(|&c| from_f64(c)).collect();
        let basis = lagrange_basis(&anchored(&exact_c)).map_err(|e| SpectralError::InvalidNodes(e.to_string()))?;
        let zetas: Vec<Rational> = rule.nodes.iter().map(|&z| from_f64(z)).collect();
        let weights: Vec<Rational> = rule.weights.iter().map(|&w| from_f64(w)).collect();

        let interp = DMatrix::from_fn(quad_nodes, s + 1, |q, j| to_f64(&basis[j].eval(&zetas[q])));
        let a_rows: Vec<RationalPoly> = exact_c.iter().map(|c| t.a_at_tau(c)).collect();
        let stage_weights =
            DMatrix::from_fn(s, quad_nodes, |i, q| to_f64(&(&weights[q] * a_rows[i].eval(&zetas[q]))));
        let b = t.b_poly();
        let output_weights = (0..quad_nodes).map(|q| to_f64(&(&weights[q] * b.eval(&zetas[q])))).collect();
        let one = Rational::from_integer(1.into());
        let end_interp = basis.iter().map(|l| to_f64(&l.eval(&one))).collect();
        Ok(Self {
            s,
            stage_nodes: stage_nodes.to_vec(),
            quad_nodes: rule.nodes,
            interp,
            stage_weights,
            output_weights,
            e: e_exact.to_f64(),
            e_exact,
            end_interp,
        })
    }

    pub fn quad_len(&self) -> usize {
        self.quad_nodes.len()
    }
}
