//! Continuous-stage Runge-Kutta tableaux and their exact audits.
//!
//! A tableau of degree `s` is fixed by a constant `s×s` matrix `M`:
//!
//! ```text
//! A(τ, ζ) = [τ, τ²/2, …, τˢ/s] · M · [1, ζ, …, ζ^{s-1}]ᵀ
//! B(ζ)    = A(1, ζ)
//! C(τ)    = ∫₀¹ A(τ, ζ) dζ
//! ```
//!
//! Every τ-power in `A` has a positive exponent, so `A(0, ζ) = 0` holds by
//! construction.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bseries;
use crate::exact::{
    hilbert_matrix, int, mat_solve, poly_integrate_01, rat, AlgebraError, Rational,
    RationalMatrix, RationalPoly,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("malformed tableau JSON: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsrkTableau {
    name: String,
    m: RationalMatrix,
}

impl CsrkTableau {
    pub fn new(name: impl Into<String>, m: RationalMatrix) -> Result<Self, TableauError> {
        if !m.is_square() || m.rows() == 0 {
            return Err(TableauError::InvalidParameter(format!(
                "defining matrix must be square and nonempty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self { name: name.into(), m })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Polynomial degree `s` of `A` in τ.
    pub fn degree(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.m
    }

    /// `vᵀ = [1, 1/2, …, 1/s] · M`, the monomial coefficients of `B`.
    pub fn weight_vector(&self) -> Vec<Rational> {
        let h: Vec<Rational> = (1..=self.degree()).map(|k| rat(1, k as i64)).collect();
        self.m.left_mul_vec(&h)
    }

    pub fn b_poly(&self) -> RationalPoly {
        RationalPoly::new(self.weight_vector())
    }

    pub fn c_poly(&self) -> RationalPoly {
        self.b_poly().antiderivative()
    }

    /// `P_i(ζ)` for `i = 1..=s`, where `A(τ, ζ) = Σ τ^i P_i(ζ)`.
    pub fn a_tau_coefficients(&self) -> Vec<RationalPoly> {
        (0..self.degree())
            .map(|i| RationalPoly::new(self.m.row(i).to_vec()).scale(&rat(1, i as i64 + 1)))
            .collect()
    }

    /// Coefficient grid of `A`: entry `(a, b)` multiplies `τ^a ζ^b`,
    /// with `a = 0..=s` and `b = 0..s`. Row 0 is identically zero.
    pub fn a_coefficients(&self) -> RationalMatrix {
        let s = self.degree();
        RationalMatrix::from_fn(s + 1, s, |a, b| {
            if a == 0 {
                Rational::zero()
            } else {
                &self.m[(a - 1, b)] / int(a as i64)
            }
        })
    }

    /// `A(τ, ·)` as a polynomial in ζ for a fixed τ.
    pub fn a_at_tau(&self, tau: &Rational) -> RationalPoly {
        let s = self.degree();
        let mut tau_pow = Rational::one();
        let mut coeffs = vec![Rational::zero(); s];
        for i in 0..s {
            tau_pow *= tau;
            let w = &tau_pow / int(i as i64 + 1);
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += &w * &self.m[(i, j)];
            }
        }
        RationalPoly::new(coeffs)
    }

    /// `∫₀¹ A(τ, ζ) g(ζ) dζ` as a polynomial in τ.
    pub fn integrate_zeta(&self, g: &RationalPoly) -> RationalPoly {
        let s = self.degree();
        let moments: Vec<Rational> = (0..s)
            .map(|j| poly_integrate_01(&(&RationalPoly::monomial(Rational::one(), j) * g)))
            .collect();
        let mv = self.m.mul_vec(&moments);
        let mut coeffs = vec![Rational::zero(); s + 1];
        for (i, x) in mv.into_iter().enumerate() {
            coeffs[i + 1] = x / int(i as i64 + 1);
        }
        RationalPoly::new(coeffs)
    }

    /// `∫₀¹ w(τ) A(τ, ζ) dτ` as a polynomial in ζ.
    pub fn integrate_tau(&self, w: &RationalPoly) -> RationalPoly {
        let s = self.degree();
        let moments: Vec<Rational> = (0..s)
            .map(|i| {
                poly_integrate_01(&(&RationalPoly::monomial(Rational::one(), i + 1) * w))
                    / int(i as i64 + 1)
            })
            .collect();
        RationalPoly::new(self.m.left_mul_vec(&moments))
    }

    pub fn is_consistent(&self) -> bool {
        poly_integrate_01(&self.b_poly()).is_one()
    }

    /// `{"s": s, "M": [[num, den], …]}` with the `s²` entries in row-major
    /// order. Integers that do not fit in 64 bits are written as strings.
    pub fn to_json(&self) -> Value {
        let pair = |x: &Rational| json!([big_to_json(x.numer()), big_to_json(x.denom())]);
        json!({
            "s": self.degree(),
            "M": self.m.entries().iter().map(pair).collect::<Vec<_>>(),
        })
    }

    /// Inverse of [`CsrkTableau::to_json`]. `M` may also be nested as `s`
    /// rows of `s` pairs.
    pub fn from_json(name: impl Into<String>, value: &Value) -> Result<Self, TableauError> {
        let bad = |msg: &str| TableauError::Format(msg.to_string());
        let s = value
            .get("s")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing integer field \"s\""))? as usize;
        let raw = value
            .get("M")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing array field \"M\""))?;
        let nested = s > 0 && raw.len() == s && raw.iter().all(is_row_of_pairs);
        let pairs: Vec<&Value> = if nested {
            raw.iter()
                .flat_map(|r| r.as_array().into_iter().flatten())
                .collect()
        } else {
            raw.iter().collect()
        };
        if pairs.len() != s * s {
            return Err(bad(&format!("expected {} entries, found {}", s * s, pairs.len())));
        }
        let entries = pairs
            .into_iter()
            .map(|p| {
                let p = p.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("entry is not a [num, den] pair"))?;
                let n = json_to_big(&p[0]).ok_or_else(|| bad("numerator is not an integer"))?;
                let d = json_to_big(&p[1]).ok_or_else(|| bad("denominator is not an integer"))?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Ok(Rational::new(n, d))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, RationalMatrix::from_row_major(s, s, entries)?)
    }
}

fn is_row_of_pairs(v: &Value) -> bool {
    v.as_array()
        .is_some_and(|r| r.iter().all(|p| p.as_array().is_some_and(|p| p.len() == 2)))
}

fn big_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn json_to_big(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl fmt::Display for CsrkTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} (s = {})", self.name, self.degree())?;
        write!(f, "{}", self.m)
    }
}

/// The average vector field method: `s = 1`, `A(τ, ζ) = τ`.
pub fn make_avf() -> CsrkTableau {
    CsrkTableau::new("avf", RationalMatrix::from_i64_rows(&[&[1]])).expect("1x1")
}

/// AVF collocation of degree `s` (order `2s`): `M = H⁻¹` with `H` the Hilbert matrix.
pub fn make_avf_collocation(s: usize) -> Result<CsrkTableau, TableauError> {
    if !(1..=6).contains(&s) {
        return Err(TableauError::InvalidParameter(format!(
            "AVF collocation degree must be in 1..=6, got {s}"
        )));
    }
    let m = hilbert_matrix(s).inverse()?;
    CsrkTableau::new(format!("avf-collocation-{s}"), m)
}

/// `α₁ = -300 θ`
pub fn alpha1_from_theta(theta: &Rational) -> Rational {
    -theta * int(300)
}

/// The free Hilbert-block entry `α` of the order-4 family, `α = (1/α₁ + 7)/36`.
pub fn alpha_from_theta(theta: &Rational) -> Result<Rational, TableauError> {
    if theta.is_zero() {
        return Err(TableauError::InvalidParameter("theta must be nonzero".into()));
    }
    Ok((alpha1_from_theta(theta).recip() + int(7)) / int(36))
}

/// Degree-3, order-4 energy-preserving family with `B = 1`.
///
/// `θ = 0` corresponds to `α₁ = 0` and is rejected; `θ = -1/60` reproduces
/// the degree-3 AVF collocation matrix.
pub fn make_parallel4(theta: &Rational) -> Result<CsrkTableau, TableauError> {
    if theta.is_zero() {
        return Err(TableauError::InvalidParameter("theta must be nonzero".into()));
    }
    let a1 = alpha1_from_theta(theta);
    let i = |n: i64| int(n);
    let off1 = -(&a1 * i(6)) - i(6);
    let m = RationalMatrix::from_rows(vec![
        vec![&a1 + i(4), off1.clone(), &a1 * i(6)],
        vec![off1, &a1 * i(36) + i(12), -(&a1 * i(36))],
        vec![&a1 * i(6), -(&a1 * i(36)), &a1 * i(36)],
    ])?;
    CsrkTableau::new(format!("parallel4(theta={})", crate::exact::fmt_rational(theta)), m)
}

/// Degree-5, order-6 family with `B = 1`. Solves `G·M = I` where the
/// leading 3×5 block of `G` is Hilbert and the trailing 2×2 block holds
/// `α, β, γ`:
///
/// ```text
/// α = 1/7 - (1 + 7a²)/2800
/// β = 1/8 - (3 + ac)/4200
/// γ = 1/9 - (64 + c²)/44100 - gamma_shift
/// ```
///
/// With `gamma_shift = 0` the matrix `G` is singular for every `(a, c)`;
/// a small positive shift splits the resulting double zero of the inverse
/// stage spectrum into a real pair.
pub fn make_parallel6(
    a: &Rational,
    c: &Rational,
    gamma_shift: &Rational,
) -> Result<CsrkTableau, TableauError> {
    let g = parallel6_gram(a, c, gamma_shift);
    let m = mat_solve(&g, &RationalMatrix::identity(5))?;
    CsrkTableau::new(
        format!(
            "parallel6(a={}, c={}, gamma_shift={})",
            crate::exact::fmt_rational(a),
            crate::exact::fmt_rational(c),
            crate::exact::fmt_rational(gamma_shift)
        ),
        m,
    )
}

/// The symmetric matrix `G = M⁻¹` of the order-6 family.
pub fn parallel6_gram(a: &Rational, c: &Rational, gamma_shift: &Rational) -> RationalMatrix {
    let alpha = rat(1, 7) - (int(1) + int(7) * a * a) / int(2800);
    let beta = rat(1, 8) - (int(3) + a * c) / int(4200);
    let gamma = rat(1, 9) - (int(64) + c * c) / int(44100) - gamma_shift;
    let mut g = hilbert_matrix(5);
    g[(3, 3)] = alpha;
    g[(3, 4)] = beta.clone();
    g[(4, 3)] = beta;
    g[(4, 4)] = gamma;
    g
}

/// `δ = 18(21a - c)² - 10`; the reduced cubic of the order-6 family has three
/// real roots for `δ ∈ [0, 0.2144863035]`.
pub fn parallel6_delta(a: &Rational, c: &Rational) -> Rational {
    let d = int(21) * a - c;
    int(18) * &d * &d - int(10)
}

/// `(a, c, gamma_shift) = (1/12, 1, 10⁻¹⁰)`.
pub fn parallel6_preset_params() -> (Rational, Rational, Rational) {
    (rat(1, 12), int(1), rat(1, 10_000_000_000))
}

pub fn make_parallel6_preset() -> CsrkTableau {
    let (a, c, shift) = parallel6_preset_params();
    make_parallel6(&a, &c, &shift).expect("preset is nonsingular")
}

/// Degree-4, order-4 method with non-constant `B(ζ) = 2ζ`.
pub fn make_bnonconst4() -> CsrkTableau {
    let m = RationalMatrix::from_rows(vec![
        vec![rat(-6, 5), rat(72, 5), int(-36), int(24)],
        vec![rat(72, 5), rat(-144, 5), int(-48), int(72)],
        vec![int(-36), int(-48), int(720), int(-720)],
        vec![int(24), int(72), int(-720), int(720)],
    ])
    .expect("4x4");
    CsrkTableau::new("bnonconst4", m).expect("square")
}

/// `M = Mᵀ`, exactly.
pub fn check_energy_preserving(t: &CsrkTableau) -> bool {
    t.matrix().is_symmetric()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Simplifying {
    B,
    C,
    D,
}

impl fmt::Display for Simplifying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Simplifying::B => "B",
            Simplifying::C => "C",
            Simplifying::D => "D",
        };
        f.write_str(c)
    }
}

/// Evaluates the `k`-th identity of a simplifying assumption exactly:
///
/// - `B`: `∫ B(τ) C(τ)^{k-1} dτ = 1/k`
/// - `C`: `∫ A(τ,ζ) C(ζ)^{k-1} dζ = C(τ)^k / k` as polynomials in τ
/// - `D`: `∫ B(τ) C(τ)^{k-1} A(τ,ζ) dτ = B(ζ)/k · (1 - C(ζ)^k)` in ζ
pub fn check_simplifying(t: &CsrkTableau, kind: Simplifying, k: usize) -> bool {
    assert!(k >= 1, "simplifying assumptions are indexed from 1");
    let b = t.b_poly();
    let c = t.c_poly();
    let inv_k = rat(1, k as i64);
    match kind {
        Simplifying::B => poly_integrate_01(&(&b * &c.pow(k - 1))) == inv_k,
        Simplifying::C => t.integrate_zeta(&c.pow(k - 1)) == c.pow(k).scale(&inv_k),
        Simplifying::D => {
            let lhs = t.integrate_tau(&(&b * &c.pow(k - 1)));
            let rhs = (&b * &(&RationalPoly::one() - &c.pow(k))).scale(&inv_k);
            lhs == rhs
        }
    }
}

/// Largest `η ≤ limit` such that conditions `1..=η` of `kind` all hold.
pub fn satisfied_up_to(t: &CsrkTableau, kind: Simplifying, limit: usize) -> usize {
    (1..=limit)
        .take_while(|&k| check_simplifying(t, kind, k))
        .last()
        .unwrap_or(0)
}

/// Bushy-tree identity `∫ B C^{k-1} = 1/k`, necessary for energy
/// preservation of a consistent method.
pub fn bushy_condition(t: &CsrkTableau, k: usize) -> bool {
    check_simplifying(t, Simplifying::B, k)
}

/// Left side minus right side of the double-bush identity
///
/// ```text
/// p ∬ B(τ)C(τ)^{p-1} A(τ,ζ) C(ζ)^q - q ∬ B(τ)C(τ)^{q-1} A(τ,ζ) C(ζ)^p
///     = 1/(q+1) - 1/(p+1)
/// ```
pub fn double_bush_defect(t: &CsrkTableau, p: usize, q: usize) -> Rational {
    assert!(p >= 1 && q >= 1);
    let b = t.b_poly();
    let c = t.c_poly();
    let term = |x: usize, y: usize| -> Rational {
        // ∬ B(τ) C(τ)^{x-1} A(τ,ζ) C(ζ)^y dτ dζ
        let inner = t.integrate_zeta(&c.pow(y));
        poly_integrate_01(&(&(&b * &c.pow(x - 1)) * &inner))
    };
    let lhs = int(p as i64) * term(p, q) - int(q as i64) * term(q, p);
    let rhs = rat(1, q as i64 + 1) - rat(1, p as i64 + 1);
    lhs - rhs
}

pub fn double_bush_condition(t: &CsrkTableau, p: usize, q: usize) -> bool {
    double_bush_defect(t, p, q).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub energy_preserving: bool,
    pub consistent: bool,
    /// Largest η with C(1..=η) satisfied (searched up to `s + 2`).
    pub satisfied_c_eta: usize,
    /// Largest order ≤ the requested bound with all tree conditions satisfied.
    pub algebraic_order: usize,
    pub details: Vec<ConditionCheck>,
}

pub const AUDIT_MAX_ORDER: usize = 6;

/// Full exact audit: symmetry, consistency, simplifying assumptions and the
/// B-series order up to `max_order` (at most 6).
pub fn audit(t: &CsrkTableau, max_order: usize) -> Result<OrderReport, TableauError> {
    if max_order == 0 || max_order > AUDIT_MAX_ORDER {
        return Err(TableauError::InvalidParameter(format!(
            "audit order bound must be in 1..={AUDIT_MAX_ORDER}, got {max_order}"
        )));
    }
    let s = t.degree();
    let mut details = Vec::new();
    let energy_preserving = check_energy_preserving(t);
    let consistent = t.is_consistent();
    details.push(ConditionCheck { name: "M symmetric".into(), passed: energy_preserving });
    details.push(ConditionCheck { name: "consistent".into(), passed: consistent });
    for k in 1..=2 * s + 2 {
        details.push(ConditionCheck {
            name: format!("B({k})"),
            passed: check_simplifying(t, Simplifying::B, k),
        });
    }
    for k in 1..=s + 2 {
        details.push(ConditionCheck {
            name: format!("C({k})"),
            passed: check_simplifying(t, Simplifying::C, k),
        });
    }
    for k in 1..=s + 1 {
        details.push(ConditionCheck {
            name: format!("D({k})"),
            passed: check_simplifying(t, Simplifying::D, k),
        });
    }
    let algebraic_order = bseries::order_of(t, max_order)
        .map_err(|e| TableauError::InvalidParameter(e.to_string()))?;
    for p in 1..=max_order {
        let passed = bseries::trees_of_order(p)
            .iter()
            .all(|tree| bseries::elementary_weight(t, tree) == bseries::exact_flow_coeff(tree));
        details.push(ConditionCheck { name: format!("order-{p} trees"), passed });
    }
    Ok(OrderReport {
        energy_preserving,
        consistent,
        satisfied_c_eta: satisfied_up_to(t, Simplifying::C, s + 2),
        algebraic_order,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn avf_basics() {
        let t = make_avf();
        assert_eq!(t.matrix(), &RationalMatrix::from_i64_rows(&[&[1]]));
        assert_eq!(t.b_poly(), RationalPoly::one());
        assert_eq!(t.c_poly(), RationalPoly::from_i64(&[0, 1]));
        assert_eq!(make_avf_collocation(1).unwrap().matrix(), t.matrix());
    }

    #[test]
    fn collocation_degree_bounds() {
        assert!(make_avf_collocation(0).is_err());
        assert!(make_avf_collocation(7).is_err());
        assert!(make_avf_collocation(6).is_ok());
    }

    #[test]
    fn parallel4_matrix_at_theta_one() {
        let t = make_parallel4(&int(1)).unwrap();
        assert_eq!(
            t.matrix(),
            &RationalMatrix::from_i64_rows(&[
                &[-296, 1794, -1800],
                &[1794, -10788, 10800],
                &[-1800, 10800, -10800]
            ])
        );
        assert_eq!(t.weight_vector(), vec![int(1), int(0), int(0)]);
    }

    #[test]
    fn parallel4_rejects_zero_theta() {
        assert!(matches!(make_parallel4(&int(0)), Err(TableauError::InvalidParameter(_))));
        assert!(alpha_from_theta(&int(0)).is_err());
    }

    #[test]
    fn parallel4_recovers_collocation() {
        // α = 1/5 is the Hilbert entry, i.e. α₁ = 5, θ = -1/60.
        let theta = r("-1/60");
        assert_eq!(alpha_from_theta(&theta).unwrap(), rat(1, 5));
        assert_eq!(make_parallel4(&theta).unwrap().matrix(), make_avf_collocation(3).unwrap().matrix());
    }

    #[test]
    fn parallel4_weight_vector_any_theta() {
        for th in ["1", "1/2", "-3/7", "10", "273/4"] {
            let t = make_parallel4(&r(th)).unwrap();
            assert_eq!(t.weight_vector(), vec![int(1), int(0), int(0)], "theta {th}");
            assert!(check_energy_preserving(&t));
        }
    }

    #[test]
    fn parallel6_construction() {
        let (a, c, shift) = parallel6_preset_params();
        assert_eq!(parallel6_delta(&a, &c), rat(1, 8));
        let g = parallel6_gram(&a, &c, &int(0));
        assert_eq!(g.inverse(), Err(AlgebraError::SingularMatrix));
        assert!(matches!(
            make_parallel6(&a, &c, &int(0)),
            Err(TableauError::Algebra(AlgebraError::SingularMatrix))
        ));
        let t = make_parallel6(&a, &c, &shift).unwrap();
        let gm = &parallel6_gram(&a, &c, &shift) * t.matrix();
        assert_eq!(gm, RationalMatrix::identity(5));
        assert!(check_energy_preserving(&t));
        assert_eq!(t.weight_vector(), vec![int(1), int(0), int(0), int(0), int(0)]);
    }

    #[test]
    fn bnonconst4_properties() {
        let t = make_bnonconst4();
        assert_eq!(t.weight_vector(), vec![int(0), int(2), int(0), int(0)]);
        assert_eq!(t.b_poly(), RationalPoly::from_i64(&[0, 2]));
        assert!(check_energy_preserving(&t));
        assert!(t.is_consistent());
    }

    #[test]
    fn energy_preserving_examples() {
        assert!(check_energy_preserving(&make_avf_collocation(3).unwrap()));
        let t = CsrkTableau::new("ns", RationalMatrix::from_i64_rows(&[&[0, 1], &[0, 0]])).unwrap();
        assert!(!check_energy_preserving(&t));
    }

    #[test]
    fn simplifying_examples() {
        assert!(check_simplifying(&make_avf(), Simplifying::B, 1));
        assert!(check_simplifying(&make_avf_collocation(2).unwrap(), Simplifying::C, 2));
        assert!(!check_simplifying(&make_avf(), Simplifying::C, 2));
        assert_eq!(satisfied_up_to(&make_avf_collocation(3).unwrap(), Simplifying::C, 6), 3);
    }

    #[test]
    fn a_closed_forms() {
        // s = 2: τ((4 - 3τ) - 6(1 - τ)ζ)
        let a2 = make_avf_collocation(2).unwrap().a_coefficients();
        let want = RationalMatrix::from_i64_rows(&[&[0, 0], &[4, -6], &[-3, 6]]);
        assert_eq!(a2, want);
    }

    #[test]
    fn json_round_trip_and_nested_input() {
        let t = make_parallel6_preset();
        let back = CsrkTableau::from_json("x", &t.to_json()).unwrap();
        assert_eq!(back.matrix(), t.matrix());

        let nested = json!({"s": 2, "M": [[[4, 1], [-6, 1]], [[-6, 1], [12, 1]]]});
        let t2 = CsrkTableau::from_json("n", &nested).unwrap();
        assert_eq!(t2.matrix(), make_avf_collocation(2).unwrap().matrix());

        let flat = json!({"s": 1, "M": [[3, 6]]});
        assert_eq!(CsrkTableau::from_json("f", &flat).unwrap().matrix()[(0, 0)], rat(1, 2));

        assert!(CsrkTableau::from_json("bad", &json!({"s": 2, "M": [[1, 1]]})).is_err());
        assert!(CsrkTableau::from_json("bad", &json!({"s": 1, "M": [[1, 0]]})).is_err());
        assert!(CsrkTableau::from_json("bad", &json!({"M": []})).is_err());
    }

    #[test]
    fn audit_rejects_large_bound() {
        assert!(audit(&make_avf(), 7).is_err());
        assert!(audit(&make_avf(), 0).is_err());
    }

    #[test]
    fn audit_examples() {
        let rep = audit(&make_avf(), 6).unwrap();
        assert_eq!(rep.algebraic_order, 2);
        assert!(rep.energy_preserving && rep.consistent);
        assert_eq!(audit(&make_parallel4(&int(1)).unwrap(), 6).unwrap().algebraic_order, 4);
        let rep3 = audit(&make_avf_collocation(3).unwrap(), 6).unwrap();
        assert_eq!(rep3.algebraic_order, 6);
        assert_eq!(rep3.satisfied_c_eta, 3);
    }
}
