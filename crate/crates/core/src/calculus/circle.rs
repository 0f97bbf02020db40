//! Circle calculus for bounded operators with unit-circle spectrum, via
//! Fourier-Laurent series: Laurent polynomials are holomorphic on an annulus
//! around the circle, so the truncated series sits inside the holomorphic
//! calculus and converges spectrally for smooth periodic symbols. This is
//! the target of the Cayley transform: g(C(P)) = (g o C)(P).

use crate::linop::{identity, norm2, Operator};
use crate::{C64, CMatrix, Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct CircleResult {
    pub value: CMatrix,
    /// sum_{N < |n| <= 2N} |c_n| ||B^n|| plus a geometric remainder
    pub tail_bound: f64,
    pub truncation: usize,
}

/// g(B) = sum_{|n| <= N} c_n B^n for a smooth 2pi-periodic symbol given as
/// an evaluator on angles. Coefficients come from the trapezoid rule on 4N
/// samples (spectrally accurate for periodic smooth g); the reported tail
/// uses the computable band N < |n| <= 2N plus a geometric extrapolation.
pub fn apply_circle(
    g: &dyn Fn(f64) -> C64,
    b: &Operator,
    n_trunc: usize,
    tol: f64,
) -> Result<CircleResult> {
    let unit_dev = b
        .eigenvalues()
        .iter()
        .map(|l| (l.norm() - 1.0).abs())
        .fold(0.0f64, f64::max);
    if unit_dev > 1e-8 {
        return Err(Error::invalid(
            "circle operator",
            format!("spectrum off the unit circle by {unit_dev:.3e}"),
        ));
    }
    let min_mod = b
        .eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min);
    if min_mod <= 1e-8 {
        return Err(Error::SingularMatrix);
    }
    let n = n_trunc;
    let samples = 4 * n.max(1);
    // c_k for |k| <= 2N from one pass of samples
    let mut coeff = vec![C64::new(0.0, 0.0); 4 * n + 1];
    for s in 0..samples {
        let theta = 2.0 * PI * s as f64 / samples as f64;
        let gv = g(theta);
        for (idx, c) in coeff.iter_mut().enumerate() {
            let k = idx as isize - 2 * n as isize;
            *c += gv * C64::from_polar(1.0, -(k as f64) * theta);
        }
    }
    for c in &mut coeff {
        *c /= C64::new(samples as f64, 0.0);
    }
    let dim = b.dim();
    let b_inv = b
        .matrix()
        .clone()
        .lu()
        .solve(&identity(dim))
        .ok_or(Error::SingularMatrix)?;
    // powers B^k for k = -2N..2N with their norms
    let mut value = CMatrix::zeros(dim, dim);
    let mut tail = 0.0f64;
    let mut pos = identity(dim);
    let mut neg = identity(dim);
    let mut last_terms = 0.0f64;
    for k in 0..=(2 * n) {
        for (side, (mat, idx)) in [(&pos, 2 * n + k), (&neg, 2 * n - k)].into_iter().enumerate() {
            if k == 0 && side == 1 {
                continue;
            }
            let c = coeff[idx];
            let term = c.norm() * norm2(mat);
            if k <= n {
                value += mat * c;
            } else {
                tail += term;
            }
            if k >= 2 * n - 1 {
                last_terms = last_terms.max(term);
            }
        }
        pos = &pos * b.matrix();
        neg = &neg * &b_inv;
    }
    // geometric remainder from the outermost computed band
    tail += 4.0 * n as f64 * last_terms;
    if tail > tol {
        return Err(Error::LaurentTail { bound: tail, tol });
    }
    Ok(CircleResult {
        value,
        tail_bound: tail,
        truncation: n,
    })
}

/// The symbol of f under the inverse Cayley map: g(theta) = f(cot(theta/2)),
/// smooth on the circle and vanishing near theta = 0 for compactly
/// supported f.
pub fn cayley_symbol(f: &crate::funcs::SmoothFunction) -> impl Fn(f64) -> C64 + '_ {
    move |theta: f64| {
        let half = 0.5 * theta;
        let s = half.sin();
        if s.abs() < 1e-300 {
            return C64::new(0.0, 0.0);
        }
        f.eval_value(half.cos() / s)
    }
}
