//! Exact rational scalars, dense univariate polynomials and dense matrices.
//!
//! Everything in this module is exact: no floating point enters any
//! computation except through the explicit `to_f64` conversions at the edge.
//! Tableau construction, order auditing and the similarity form of the stage
//! matrix are all built on top of these types.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

/// `n/d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Rational) -> f64 {
    // BigRational::to_f64 is correctly rounded for huge numerators/denominators.
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64` (every finite double is dyadic).
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).expect("finite f64")
}

/// Parses `p/q`, an integer, or a decimal with optional exponent
/// (`1e-10`, `-0.25`, `3.5E2`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, AlgebraError> {
    let err = || AlgebraError::Parse(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Formats `p/q`, or `p` for integers.
pub fn fmt_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Dense polynomial in one variable; `coeffs[k]` multiplies `x^k`.
///
/// Canonical form has no trailing zero coefficient, so the zero polynomial is
/// the empty list and structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / int(k as i64 + 1)),
        );
        Self::new(coeffs)
    }

    /// `∫₀¹ p(x) dx`
    pub fn integrate_01(&self) -> Rational {
        poly_integrate_01(self)
    }
}

/// `∫₀¹ p(x) dx = Σ_k p_k / (k+1)`, exactly.
pub fn poly_integrate_01(p: &RationalPoly) -> Rational {
    p.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c / int(k as i64 + 1))
        .fold(Rational::zero(), |acc, x| acc + x)
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = fmt_rational(&c.abs());
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !c.abs().is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_row_major(
        rows: usize,
        cols: usize,
        entries: Vec<Rational>,
    ) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(AlgebraError::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(n, m, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("rectangular")
    }

    pub fn diagonal(diag: &[Rational]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Row vector times matrix.
    pub fn left_mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                v.iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (i, x)| acc + x * &self[(i, j)])
            })
            .collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        mat_inverse(self)
    }

    pub fn solve(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        mat_solve(self, rhs)
    }

    pub fn char_poly(&self) -> Result<RationalPoly, AlgebraError> {
        char_poly(self)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        RationalMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(Rational::zero(), |acc, k| acc + &self[(i, k)] * &rhs[(k, j)])
        })
    }
}

impl Add for &RationalMatrix {
    type Output = RationalMatrix;
    fn add(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalMatrix {
    type Output = RationalMatrix;
    fn sub(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(fmt_rational).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `H_ij = 1/(i+j-1)` with 1-based indices.
pub fn hilbert_matrix(s: usize) -> RationalMatrix {
    RationalMatrix::from_fn(s, s, |i, j| rat(1, (i + j + 1) as i64))
}

/// Solves `A X = B` by Gauss-Jordan elimination over the rationals.
///
/// Pivoting only needs an exact nonzero test; the first nonzero entry in the
/// column is taken, preferring the one with the smallest height to keep
/// intermediate numerators short.
pub fn mat_solve(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "solve needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if a.rows != b.rows {
        return Err(AlgebraError::DimensionMismatch(format!(
            "lhs has {} rows, rhs has {}",
            a.rows, b.rows
        )));
    }
    let n = a.rows;
    let m = b.cols;
    let mut lhs: Vec<Vec<Rational>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs: Vec<Vec<Rational>> = (0..n).map(|i| b.row(i).to_vec()).collect();

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !lhs[r][col].is_zero())
            .min_by_key(|&r| height(&lhs[r][col]))
            .ok_or(AlgebraError::SingularMatrix)?;
        lhs.swap(col, pivot);
        rhs.swap(col, pivot);

        let inv = lhs[col][col].recip();
        for x in lhs[col].iter_mut() {
            *x *= &inv;
        }
        for x in rhs[col].iter_mut() {
            *x *= &inv;
        }
        let (pivot_lhs, pivot_rhs) = (lhs[col].clone(), rhs[col].clone());
        for r in 0..n {
            if r == col || lhs[r][col].is_zero() {
                continue;
            }
            let factor = lhs[r][col].clone();
            for (x, p) in lhs[r].iter_mut().zip(&pivot_lhs) {
                *x -= &factor * p;
            }
            for (x, p) in rhs[r].iter_mut().zip(&pivot_rhs) {
                *x -= &factor * p;
            }
        }
    }
    RationalMatrix::from_row_major(n, m, rhs.into_iter().flatten().collect())
}

pub fn mat_inverse(a: &RationalMatrix) -> Result<RationalMatrix, AlgebraError> {
    mat_solve(a, &RationalMatrix::identity(a.rows))
}

fn height(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Monic characteristic polynomial `det(λI - A)` by the Faddeev-LeVerrier
/// recursion, which only ever divides by the integers `1..=n`.
pub fn char_poly(a: &RationalMatrix) -> Result<RationalPoly, AlgebraError> {
    if !a.is_square() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "characteristic polynomial of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = RationalMatrix::zeros(n, n);
    for k in 1..=n {
        let shift = RationalMatrix::from_fn(n, n, |i, j| {
            if i == j {
                coeffs[n - k + 1].clone()
            } else {
                Rational::zero()
            }
        });
        mk = &(a * &mk) + &shift;
        let amk = a * &mk;
        coeffs[n - k] = -amk.trace() / int(k as i64);
    }
    Ok(RationalPoly::new(coeffs))
}

/// Lagrange basis `l_i(x) = Π_{j≠i} (x - x_j)/(x_i - x_j)` for distinct nodes.
pub fn lagrange_basis(nodes: &[Rational]) -> Result<Vec<RationalPoly>, AlgebraError> {
    let mut basis = Vec::with_capacity(nodes.len());
    for (i, xi) in nodes.iter().enumerate() {
        let mut p = RationalPoly::one();
        for (j, xj) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = xi - xj;
            if denom.is_zero() {
                return Err(AlgebraError::DimensionMismatch(format!(
                    "repeated interpolation node {}",
                    fmt_rational(xi)
                )));
            }
            let factor = RationalPoly::new(vec![-xj / &denom, denom.recip()]);
            p = &p * &factor;
        }
        basis.push(p);
    }
    Ok(basis)
}

/// Greatest common divisor helper exposed for tests of canonical form.
pub fn is_lowest_terms(x: &Rational) -> bool {
    x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> RationalMatrix {
        RationalMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(poly_integrate_01(&RationalPoly::from_i64(&[1])), int(1));
        assert_eq!(poly_integrate_01(&RationalPoly::from_i64(&[0, 1])), rat(1, 2));
        assert_eq!(poly_integrate_01(&RationalPoly::from_i64(&[0, 6, -6])), int(1));
        assert_eq!(poly_integrate_01(&RationalPoly::zero()), int(0));
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_matrix(1), m(&[&[(1, 1)]]));
        assert_eq!(hilbert_matrix(2), m(&[&[(1, 1), (1, 2)], &[(1, 2), (1, 3)]]));
        assert_eq!(
            hilbert_matrix(3),
            m(&[
                &[(1, 1), (1, 2), (1, 3)],
                &[(1, 2), (1, 3), (1, 4)],
                &[(1, 3), (1, 4), (1, 5)]
            ])
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(RationalMatrix::identity(3).inverse().unwrap(), RationalMatrix::identity(3));
        assert_eq!(
            hilbert_matrix(2).inverse().unwrap(),
            RationalMatrix::from_i64_rows(&[&[4, -6], &[-6, 12]])
        );
        assert_eq!(
            hilbert_matrix(3).inverse().unwrap(),
            RationalMatrix::from_i64_rows(&[&[9, -36, 30], &[-36, 192, -180], &[30, -180, 180]])
        );
    }

    #[test]
    fn singular_is_reported() {
        let a = RationalMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse(), Err(AlgebraError::SingularMatrix));
        let z = RationalMatrix::zeros(2, 2);
        assert_eq!(mat_solve(&z, &RationalMatrix::identity(2)), Err(AlgebraError::SingularMatrix));
    }

    #[test]
    fn solve_examples() {
        let b = RationalMatrix::from_i64_rows(&[&[1, 2, 3], &[4, 5, 6]]);
        assert_eq!(mat_solve(&RationalMatrix::identity(2), &b).unwrap(), b);
        assert_eq!(
            mat_solve(&hilbert_matrix(2), &RationalMatrix::identity(2)).unwrap(),
            RationalMatrix::from_i64_rows(&[&[4, -6], &[-6, 12]])
        );
        let d = RationalMatrix::from_i64_rows(&[&[2, 0], &[0, 4]]);
        assert_eq!(
            mat_solve(&d, &RationalMatrix::identity(2)).unwrap(),
            RationalMatrix::diagonal(&[rat(1, 2), rat(1, 4)])
        );
        assert!(matches!(
            mat_solve(&d, &RationalMatrix::identity(3)),
            Err(AlgebraError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(
            RationalMatrix::zeros(2, 2).char_poly().unwrap(),
            RationalPoly::from_i64(&[0, 0, 1])
        );
        let d = RationalMatrix::diagonal(&[int(1), rat(1, 2)]);
        assert_eq!(
            d.char_poly().unwrap(),
            RationalPoly::new(vec![rat(1, 2), rat(-3, 2), int(1)])
        );
    }

    #[test]
    fn hilbert_inverse_order_six() {
        // (H⁻¹)_nn = (2n - 1) C(2n - 2, n - 1)²
        let h = hilbert_matrix(6);
        let inv = h.inverse().unwrap();
        assert_eq!(&h * &inv, RationalMatrix::identity(6));
        assert_eq!(inv[(5, 5)], int(11 * 252 * 252));
        assert_eq!(inv[(0, 0)], int(36));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("1e-10").unwrap(), rat(1, 10_000_000_000));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("2.5E2").unwrap(), int(250));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn poly_display() {
        let p = RationalPoly::new(vec![rat(-1, 2), int(0), int(1)]);
        assert_eq!(p.to_string(), "x^2 - 1/2");
    }

    #[test]
    fn lagrange_interpolates_monomials() {
        let nodes = vec![int(0), rat(1, 3), rat(3, 4), int(1)];
        let basis = lagrange_basis(&nodes).unwrap();
        for (i, l) in basis.iter().enumerate() {
            for (j, x) in nodes.iter().enumerate() {
                assert_eq!(l.eval(x), if i == j { int(1) } else { int(0) });
            }
        }
        // Σ x_k^2 l_k(x) = x^2
        let sum = basis
            .iter()
            .zip(&nodes)
            .fold(RationalPoly::zero(), |acc, (l, x)| &acc + &l.scale(&(x * x)));
        assert_eq!(sum, RationalPoly::from_i64(&[0, 0, 1]));
        assert!(lagrange_basis(&[int(1), int(1)]).is_err());
    }

    #[test]
    fn canonical_forms() {
        let p = RationalPoly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(RationalPoly::new(vec![int(0)]).is_zero());
        assert!(is_lowest_terms(&rat(6, -8)));
    }
}
