//! Frequency grids and Fourier samples f^(xi) = ∫ f(x) e^{-i x xi} dx,
//! computed by composite Gauss-Legendre over the (compact) support. The
//! integrand is smooth and compactly supported, so the rule is spectrally
//! accurate once panels resolve the oscillation at the largest frequency.

use crate::funcs::SmoothFunction;
use crate::quad::gauss::gauss_legendre;
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct FrequencyGrid {
    pub xi_max: f64,
    pub dxi: f64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            xi_max: 200.0,
            dxi: 0.05,
        }
    }
}

impl FrequencyGrid {
    pub fn new(xi_max: f64, dxi: f64) -> Self {
        assert!(xi_max > 0.0 && dxi > 0.0);
        FrequencyGrid { xi_max, dxi }
    }

    /// Widen the default grid when the function has narrow features.
    /// Bump-type transforms decay like exp(-sqrt(w xi)) for feature width
    /// w (measured amplitude ~ 50 e^{-sqrt(w xi)}), so w*xi_max ~ 560
    /// pushes the boundary tail below ~3e-9.
    pub fn auto_for(f: &SmoothFunction) -> Self {
        let w = f.min_feature_width().max(1e-3);
        let needed = (560.0 / w).clamp(200.0, 2560.0);
        let xi_max = (needed / 50.0).ceil() * 50.0;
        FrequencyGrid {
            xi_max,
            dxi: 0.05,
        }
    }

    pub fn len(&self) -> usize {
        2 * (self.xi_max / self.dxi).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> usize {
        (self.len() - 1) / 2
    }

    pub fn xi(&self, j: usize) -> f64 {
        (j as isize - self.center() as isize) as f64 * self.dxi
    }
}

#[derive(Debug, Clone)]
pub struct FourierSamples {
    pub grid: FrequencyGrid,
    pub values: Vec<C64>,
    /// max |f^| on the outer 2% of the grid, and whether it exceeds the
    /// resolution threshold (the grid was too coarse for this function).
    pub tail_max: f64,
    pub tail_warning: bool,
}

/// Threshold above which the boundary tail is reported as unresolved.
pub const TAIL_THRESHOLD: f64 = 1e-8;

pub fn fourier_samples(f: &SmoothFunction, grid: FrequencyGrid) -> Result<FourierSamples> {
    let intervals = match f.support() {
        crate::funcs::Support::Unbounded => return Err(Error::NotCompactlySupported),
        crate::funcs::Support::Bounded(iv) => iv,
    };
    let m = grid.len();
    let mut values = vec![C64::new(0.0, 0.0); m];
    let order = 16;
    let (gl_nodes, gl_weights) = gauss_legendre(order);
    for (a, b) in intervals {
        let width = b - a;
        // keep the phase change per panel at the top frequency modest
        let panels = ((width * grid.xi_max / 8.0).ceil() as usize).max(4);
        let pw = width / panels as f64;
        for p in 0..panels {
            let lo = a + pw * p as f64;
            for (t, w) in gl_nodes.iter().zip(&gl_weights) {
                let x = lo + pw * 0.5 * (t + 1.0);
                let wf = f.eval_value(x) * C64::new(w * pw * 0.5, 0.0);
                if wf == C64::new(0.0, 0.0) {
                    continue;
                }
                // accumulate wf * exp(-i x xi_j) over the grid with a
                // geometric recurrence, re-anchored to limit drift
                let step = C64::from_polar(1.0, -x * grid.dxi);
                let mut cur = C64::from_polar(1.0, -x * grid.xi(0));
                for (j, slot) in values.iter_mut().enumerate() {
                    if j % 256 == 0 {
                        cur = C64::from_polar(1.0, -x * grid.xi(j));
                    }
                    *slot += wf * cur;
                    cur *= step;
                }
            }
        }
    }
    let edge = (m / 50).max(2);
    let tail_max = values[..edge]
        .iter()
        .chain(&values[m - edge..])
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    Ok(FourierSamples {
        grid,
        values,
        tail_max,
        tail_warning: tail_max > TAIL_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson, the method-independent oracle for plain integrals.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let l = simpson(f, a, m);
            let r = simpson(f, m, b);
            if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(f, a, m, l, tol / 2.0, depth - 1) + rec(f, m, b, r, tol / 2.0, depth - 1)
            }
        }
        let whole = simpson(f, a, b);
        rec(f, a, b, whole, tol, 40)
    }

    #[test]
    fn zero_frequency_is_the_integral() {
        let f = SmoothFunction::standard_bump(0.0, 1.0);
        let s = fourier_samples(&f, FrequencyGrid::default()).unwrap();
        let oracle = adaptive_simpson(&|x| f.eval_value(x).re, -1.0, 1.0, 1e-13);
        let got = s.values[s.grid.center()];
        assert!(got.im.abs() < 1e-12);
        assert!(
            (got.re - oracle).abs() <= 1e-10,
            "f^(0) = {} vs ∫f = {}",
            got.re,
            oracle
        );
    }

    #[test]
    fn odd_function_vanishes_at_zero() {
        // x * bump(x) is odd about 0
        let f = SmoothFunction::Polynomial {
            coeffs: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            window: Box::new(SmoothFunction::standard_bump(0.0, 1.0)),
        };
        let s = fourier_samples(&f, FrequencyGrid::default()).unwrap();
        assert!(s.values[s.grid.center()].norm() < 1e-12);
    }

    #[test]
    fn parseval() {
        let f = SmoothFunction::standard_bump(0.0, 1.0);
        let s = fourier_samples(&f, FrequencyGrid::default()).unwrap();
        let lhs: f64 = s.values.iter().map(|c| c.norm_sqr()).sum::<f64>() * s.grid.dxi
            / (2.0 * std::f64::consts::PI);
        let rhs = adaptive_simpson(&|x| f.eval_value(x).re.powi(2), -1.0, 1.0, 1e-13);
        assert!(
            (lhs - rhs).abs() <= 1e-6 * rhs,
            "parseval {lhs} vs {rhs}"
        );
    }

    #[test]
    fn tail_is_resolved_on_auto_grid_for_unit_bump() {
        let f = SmoothFunction::standard_bump(0.0, 1.0);
        let s = fourier_samples(&f, FrequencyGrid::auto_for(&f)).unwrap();
        assert!(!s.tail_warning, "tail {:.3e}", s.tail_max);
        assert!(s.tail_max < 1e-8);
    }

    #[test]
    fn narrow_bump_warns_on_default_grid_and_auto_widens() {
        let f = SmoothFunction::standard_bump(0.0, 0.25);
        let s = fourier_samples(&f, FrequencyGrid::default()).unwrap();
        assert!(s.tail_warning, "tail {:.3e}", s.tail_max);
        let auto = FrequencyGrid::auto_for(&f);
        assert!(auto.xi_max > 1000.0);
        let s2 = fourier_samples(&f, auto).unwrap();
        assert!(!s2.tail_warning, "tail {:.3e}", s2.tail_max);
    }
}
