//! The mollified step and its exact derivatives. Every ramp shape in the
//! crate (plateaus, frequency cutoffs, pole-region masks) is built from
//!
//! ```text
//! h(u) = exp(-1/u) [u > 0],     psi(s) = h(1-s) / (h(1-s) + h(s)),
//! ```
//!
//! so all of them share one smoothness budget. `psi` is 1 for s <= 0 and
//! 0 for s >= 1.

/// h(u) = exp(-1/u) for u > 0, 0 otherwise.
pub fn exp_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// k-th derivative of `exp_step`. Writing v = 1/u, the derivatives are
/// h^(k)(u) = exp(-v) q_k(v) with q_0 = 1 and q_{k+1}(v) = v^2 (q_k - q_k').
pub fn exp_step_deriv(u: f64, k: u32) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if k == 0 {
        return exp_step(u);
    }
    let v = 1.0 / u;
    let e = (-v).exp();
    if e == 0.0 {
        return 0.0;
    }
    // q_k as coefficients in ascending powers of v
    let mut q = vec![1.0f64];
    for _ in 0..k {
        // r = q - q'
        let mut r = q.clone();
        for (i, c) in q.iter().enumerate().skip(1) {
            r[i - 1] -= (i as f64) * c;
        }
        // multiply by v^2
        let mut next = vec![0.0; r.len() + 2];
        for (i, c) in r.iter().enumerate() {
            next[i + 2] = *c;
        }
        q = next;
    }
    let mut poly = 0.0;
    for &c in q.iter().rev() {
        poly = poly * v + c;
    }
    e * poly
}

/// psi(s): smooth step descending from 1 (s <= 0) to 0 (s >= 1).
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let a = exp_step(1.0 - s);
        let b = exp_step(s);
        a / (a + b)
    }
}

/// Derivatives psi^(0), ..., psi^(k) at s.
///
/// Uses the quotient recurrence on psi * D = N with N(s) = h(1-s),
/// D(s) = h(1-s) + h(s); D is bounded away from 0 on [0, 1].
pub fn smooth_step_derivs(s: f64, k: u32) -> Vec<f64> {
    let k = k as usize;
    let mut out = vec![0.0; k + 1];
    if s <= 0.0 {
        out[0] = 1.0;
        return out;
    }
    if s >= 1.0 {
        return out;
    }
    let n_der: Vec<f64> = (0..=k)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * exp_step_deriv(1.0 - s, m as u32)
        })
        .collect();
    let d_der: Vec<f64> = (0..=k)
        .map(|m| n_der[m] + exp_step_deriv(s, m as u32))
        .collect();
    for m in 0..=k {
        let mut acc = n_der[m];
        for j in 0..m {
            acc -= binomial(m, j) * out[j] * d_der[m - j];
        }
        out[m] = acc / d_der[0];
    }
    out
}

pub fn smooth_step_deriv(s: f64, k: u32) -> f64 {
    smooth_step_derivs(s, k)[k as usize]
}

/// Binomial coefficient as f64 (exact for the orders used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_endpoints() {
        assert_eq!(smooth_step(-0.5), 1.0);
        assert_eq!(smooth_step(1.5), 0.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15); // symmetry point
    }

    #[test]
    fn exp_step_first_derivative_matches_formula() {
        // h'(u) = exp(-1/u)/u^2
        for &u in &[0.3, 0.7, 1.5] {
            let expect = (-1.0f64 / u).exp() / (u * u);
            assert!((exp_step_deriv(u, 1) - expect).abs() < 1e-14 * expect.abs());
        }
    }

    #[test]
    fn step_derivatives_match_finite_differences() {
        let eps = 1e-5;
        for &s in &[0.15, 0.4, 0.62, 0.9] {
            for k in 1..=4u32 {
                let d = smooth_step_deriv(s, k);
                let fd = (smooth_step_deriv(s + eps, k - 1) - smooth_step_deriv(s - eps, k - 1))
                    / (2.0 * eps);
                let scale = d.abs().max(fd.abs()).max(1.0);
                assert!(
                    (d - fd).abs() <= 1e-6 * scale,
                    "k={k} s={s}: {d} vs {fd}"
                );
            }
        }
    }

    #[test]
    fn no_nan_near_edges() {
        for &s in &[1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9] {
            for k in 0..=8u32 {
                assert!(smooth_step_deriv(s, k).is_finite());
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
