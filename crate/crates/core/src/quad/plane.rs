//! Plane integrals of scalar-weight times matrix-field integrands over the
//! panel layout, with a fixed pairwise summation tree. Node counts reach
//! 1e4..1e6 and the integrands oscillate in sign, so the reduction order is
//! part of the contract: identical spec and inputs give bit-identical
//! results, and the tree never depends on the data.

use super::gauss::gauss_legendre;
use super::spec::QuadratureSpec;
use crate::{C64, CMatrix, Error, Result};

#[derive(Debug, Clone)]
pub struct PlaneIntegral {
    pub value: CMatrix,
    pub error_estimate: f64,
    pub node_count: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TraceRow {
    pub level: u32,
    pub nodes: u64,
    pub error_estimate: f64,
}

/// All quadrature nodes of a spec in their fixed enumeration order:
/// upper half before lower, outer y-panels first, x-panels left to right,
/// then the tensor Gauss points row-major.
pub fn nodes(spec: &QuadratureSpec) -> Vec<(C64, f64)> {
    let (gn, gw) = gauss_legendre(spec.order);
    let ypanels = spec.y_panels();
    let mut out = Vec::with_capacity(2 * ypanels.len() * spec.nx * spec.order * spec.order);
    let xw = (spec.x_hi - spec.x_lo) / spec.nx as f64;
    for half in [1.0f64, -1.0] {
        for &(ylo, yhi) in &ypanels {
            let yc = 0.5 * (ylo + yhi);
            let yh = 0.5 * (yhi - ylo);
            for px in 0..spec.nx {
                let xc = spec.x_lo + xw * (px as f64 + 0.5);
                let xh = 0.5 * xw;
                for iy in 0..spec.order {
                    let y = half * (yc + yh * gn[iy]);
                    for ix in 0..spec.order {
                        let x = xc + xh * gn[ix];
                        out.push((C64::new(x, y), gw[ix] * gw[iy] * xh * yh));
                    }
                }
            }
        }
    }
    out
}

/// Fixed pairwise-tree reduction over `n` leaves.
pub fn pairwise<T, F>(n: usize, zero: impl Fn() -> T, term: &mut F) -> T
where
    T: std::ops::Add<Output = T>,
    F: FnMut(usize) -> T,
{
    fn rec<T, F>(lo: usize, hi: usize, zero: &impl Fn() -> T, term: &mut F) -> T
    where
        T: std::ops::Add<Output = T>,
        F: FnMut(usize) -> T,
    {
        match hi - lo {
            0 => zero(),
            1 => term(lo),
            len => {
                let mid = lo + len / 2;
                rec(lo, mid, zero, term) + rec(mid, hi, zero, term)
            }
        }
    }
    rec(0, n, &zero, term)
}

/// Sum of weight * scalar(z) * field(z) over the node set, reduced pairwise.
pub fn weighted_field_sum(
    node_list: &[(C64, f64)],
    scalar: &dyn Fn(C64) -> C64,
    field: &mut dyn FnMut(usize, C64) -> CMatrix,
    dim: usize,
) -> CMatrix {
    pairwise(
        node_list.len(),
        || CMatrix::zeros(dim, dim),
        &mut |i| {
            let (z, w) = node_list[i];
            let s = scalar(z) * C64::new(w, 0.0);
            if s == C64::new(0.0, 0.0) {
                CMatrix::zeros(dim, dim)
            } else {
                field(i, z) * s
            }
        },
    )
}

/// ∫ w(z) M(z) L(dz) over the spec's region (no normalization factor).
///
/// The error estimate is the norm of the difference against one coarsening
/// step of the same layout.
pub fn integrate_plane(
    w: &dyn Fn(C64) -> C64,
    m: &dyn Fn(C64) -> CMatrix,
    dim: usize,
    spec: &QuadratureSpec,
) -> PlaneIntegral {
    let fine_nodes = nodes(spec);
    let fine = weighted_field_sum(&fine_nodes, w, &mut |_, z| m(z), dim);
    let coarse_spec = spec.coarsened();
    let coarse_nodes = nodes(&coarse_spec);
    let coarse = weighted_field_sum(&coarse_nodes, w, &mut |_, z| m(z), dim);
    let diff = crate::linop::norm2(&(&fine - &coarse));
    let floor = 1e-15 * (1.0 + crate::linop::norm2(&fine));
    PlaneIntegral {
        value: fine,
        error_estimate: diff.max(floor),
        node_count: (fine_nodes.len() + coarse_nodes.len()) as u64,
    }
}

/// Refine the layout (double x-panels, deepen the ladder) until the error
/// estimate reaches `tol` or the node budget is exhausted.
pub fn refine_until(
    task: &dyn Fn(&QuadratureSpec) -> Result<PlaneIntegral>,
    spec0: &QuadratureSpec,
    tol: f64,
    budget: u64,
) -> Result<(PlaneIntegral, Vec<TraceRow>)> {
    let mut spec = *spec0;
    let mut trace = Vec::new();
    let mut total_nodes = 0u64;
    for level in 0.. {
        let res = task(&spec)?;
        total_nodes += res.node_count;
        trace.push(TraceRow {
            level,
            nodes: res.node_count,
            error_estimate: res.error_estimate,
        });
        if res.error_estimate <= tol {
            return Ok((res, trace));
        }
        if total_nodes >= budget {
            return Err(Error::BudgetExhausted {
                budget,
                estimate: res.error_estimate,
                tol,
            });
        }
        spec = spec.refined();
    }
    unreachable!()
}
