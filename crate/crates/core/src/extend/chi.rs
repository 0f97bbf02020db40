//! The fixed frequency cutoff: smooth, even, identically 1 on [-1/2, 1/2]
//! and 0 outside [-1, 1]. The flat middle makes the dbar of the Fourier
//! extension vanish identically on the real axis, which removes the
//! quadrature singularity there.

use crate::funcs::step::{smooth_step, smooth_step_deriv};

#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffChi;

impl CutoffChi {
    pub fn value(self, t: f64) -> f64 {
        let a = t.abs();
        if a <= 0.5 {
            1.0
        } else if a >= 1.0 {
            0.0
        } else {
            smooth_step(2.0 * a - 1.0)
        }
    }

    pub fn deriv(self, t: f64) -> f64 {
        let a = t.abs();
        if a <= 0.5 || a >= 1.0 {
            0.0
        } else {
            2.0 * t.signum() * smooth_step_deriv(2.0 * a - 1.0, 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let chi = CutoffChi;
        assert_eq!(chi.value(0.0), 1.0);
        assert_eq!(chi.value(0.5), 1.0);
        assert_eq!(chi.value(-0.3), 1.0);
        assert_eq!(chi.value(1.0), 0.0);
        assert_eq!(chi.value(-2.0), 0.0);
        assert!(chi.value(0.75) > 0.0 && chi.value(0.75) < 1.0);
        assert_eq!(chi.value(0.75), chi.value(-0.75));
    }

    #[test]
    fn derivative_flat_and_odd() {
        let chi = CutoffChi;
        assert_eq!(chi.deriv(0.0), 0.0);
        assert_eq!(chi.deriv(0.4), 0.0);
        assert_eq!(chi.deriv(1.2), 0.0);
        assert_eq!(chi.deriv(0.7), -chi.deriv(-0.7));
        let eps = 1e-6;
        let fd = (chi.value(0.7 + eps) - chi.value(0.7 - eps)) / (2.0 * eps);
        assert!((chi.deriv(0.7) - fd).abs() < 1e-6);
    }
}
