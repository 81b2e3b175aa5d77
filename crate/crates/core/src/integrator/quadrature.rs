//! Gauss-Legendre rules on `[0, 1]`.

use std::f64::consts::PI;

/// Largest supported number of nodes.
pub const MAX_GAUSS_NODES: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    /// Ascending nodes in `(0, 1)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `Σ w_k g(x_k)`
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// `q`-point Gauss-Legendre rule shifted to `[0, 1]`; exact for polynomials
/// of degree `≤ 2q - 1`. Panics unless `1 ≤ q ≤ 32`.
pub fn gauss_nodes_weights(q: usize) -> GaussRule {
    assert!(
        (1..=MAX_GAUSS_NODES).contains(&q),
        "Gauss rule size {q} outside 1..={MAX_GAUSS_NODES}"
    );
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    // Roots are symmetric; Newton on P_q from the Tricomi initial guess.
    for i in 0..q.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1, 1].
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[q - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    GaussRule { nodes, weights }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint() {
        let r = gauss_nodes_weights(1);
        assert_eq!(r.nodes, vec![0.5]);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point() {
        let r = gauss_nodes_weights(2);
        let d = 0.5 / 3f64.sqrt();
        assert!((r.nodes[0] - (0.5 - d)).abs() < 1e-15);
        assert!((r.nodes[1] - (0.5 + d)).abs() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
        assert!((r.weights[1] - 0.5).abs() < 1e-15);
        assert!((r.integrate(|x| x * x * x) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn exactness_up_to_degree_2q_minus_1() {
        for q in 1..=MAX_GAUSS_NODES {
            let r = gauss_nodes_weights(q);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14, "q={q}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            for k in 0..(2 * q).min(40) {
                let exact = 1.0 / (k as f64 + 1.0);
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-14, "q={q} k={k} err={}", got - exact);
            }
        }
    }

    #[test]
    #[should_panic]
    fn rejects_zero_nodes() {
        gauss_nodes_weights(0);
    }
}
