//! Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
//! Legendre polynomial, seeded with the Chebyshev-based asymptotic guess.

/// Nodes (ascending) and weights for the q-point rule.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1);
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        // initial guess for the i-th root (descending order)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(q, x);
        nodes[q - 1 - i] = x;
        weights[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_deriv(q: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    if q == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=q {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_known_values() {
        let (n, w) = gauss_legendre(2);
        let r = 1.0 / 3.0f64.sqrt();
        assert!((n[0] + r).abs() < 1e-15 && (n[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // q points are exact through degree 2q-1
        for q in [3usize, 5, 8, 12, 16] {
            let (n, w) = gauss_legendre(q);
            let d = 2 * q - 1;
            let val: f64 = n.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
            assert!(val.abs() < 1e-13, "odd power must vanish, q={q}");
            let d2 = 2 * q - 2;
            let val2: f64 = n.iter().zip(&w).map(|(x, w)| w * x.powi(d2 as i32)).sum();
            let exact = 2.0 / (d2 as f64 + 1.0);
            assert!((val2 - exact).abs() < 1e-13 * exact.abs().max(1.0), "q={q}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for q in 1..=20 {
            let (_, w) = gauss_legendre(q);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "q={q}: {s}");
        }
    }
}
