//! Quadrature layout: a plane region symmetric about the real axis, tiled by
//! panels that refine geometrically toward y = 0, with a tensor
//! Gauss-Legendre rule on each panel. No node ever lies on the axis.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct QuadratureSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    /// integrate over |Im z| <= y_max
    pub y_max: f64,
    /// when > 0, skip |Im z| < y_gap and tile [y_gap, y_max] uniformly
    /// (integrands whose dbar vanishes identically near the axis)
    #[serde(default)]
    pub y_gap: f64,
    /// panels along x
    pub nx: usize,
    /// geometric levels per half-plane (y_gap = 0) or uniform y panels
    pub ny: usize,
    /// refinement ratio toward the axis
    pub ratio: f64,
    /// strip |Im z| below this is treated as zero
    pub y_min: f64,
    /// Gauss-Legendre order per panel axis
    pub order: usize,
    /// target tolerance for refinement loops
    pub tol: f64,
}

impl QuadratureSpec {
    /// Default single-variable layout over the given x-interval.
    pub fn default_plane(x_lo: f64, x_hi: f64) -> Self {
        QuadratureSpec {
            x_lo,
            x_hi,
            y_max: 1.0,
            y_gap: 0.0,
            nx: 16,
            ny: 12,
            ratio: 2.0,
            y_min: 1e-4,
            order: 8,
            tol: 1e-7,
        }
    }

    /// Default per-variable layout for two-variable integrals.
    pub fn default_pair(x_lo: f64, x_hi: f64) -> Self {
        QuadratureSpec {
            nx: 10,
            ny: 10,
            order: 6,
            ..Self::default_plane(x_lo, x_hi)
        }
    }

    /// Layout for integrands supported in y_gap <= |Im z| <= y_max.
    pub fn off_axis(x_lo: f64, x_hi: f64, y_gap: f64, y_max: f64) -> Self {
        QuadratureSpec {
            x_lo,
            x_hi,
            y_max,
            y_gap,
            nx: 24,
            ny: 16,
            ratio: 2.0,
            y_min: 0.0,
            order: 8,
            tol: 1e-7,
        }
    }

    /// y-panel boundaries for the upper half-plane, outermost first.
    pub fn y_panels(&self) -> Vec<(f64, f64)> {
        let mut panels = Vec::new();
        if self.y_gap > 0.0 {
            let h = (self.y_max - self.y_gap) / self.ny as f64;
            for j in 0..self.ny {
                let top = self.y_max - h * j as f64;
                panels.push((top - h, top));
            }
            return panels;
        }
        let mut top = self.y_max;
        for _ in 0..self.ny {
            let bottom = top / self.ratio;
            if bottom < self.y_min {
                if top > self.y_min {
                    panels.push((self.y_min.max(top / self.ratio), top));
                }
                break;
            }
            panels.push((bottom, top));
            top = bottom;
        }
        panels
    }

    pub fn refined(&self) -> QuadratureSpec {
        QuadratureSpec {
            nx: self.nx * 2,
            ny: self.ny + 2,
            ..*self
        }
    }

    pub fn coarsened(&self) -> QuadratureSpec {
        QuadratureSpec {
            nx: (self.nx / 2).max(2),
            ny: self.ny.saturating_sub(2).max(2),
            order: self.order.saturating_sub(2).max(4),
            ..*self
        }
    }

    pub fn node_count(&self) -> u64 {
        (2 * self.y_panels().len() * self.nx * self.order * self.order) as u64
    }
}
