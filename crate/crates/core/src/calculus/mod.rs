//! The functional calculus proper.
//!
//! Single-operator application is the Cauchy-Green representation
//! f(P) = (-1/pi) ∫ dbar f~(z) (z-P)^{-1} L(dz); several non-commuting
//! operators enter through the iterated form with one resolvent per
//! variable, with the composition order of the resolvents an explicit
//! argument. On top of that sit the pole-augmented calculus (functions with
//! non-trivial behaviour at infinity), the circle calculus reached through
//! the Cayley transform, generator recovery from an abstract homomorphism,
//! and the composition law g(f(P)) = (g o f)(P).

pub mod circle;
pub mod compose;
pub mod homo;

pub use circle::{apply_circle, CircleResult};
pub use compose::compose_calculus;
pub use homo::CalculusHomomorphism;

use crate::extend::{
    extend_fourier, extend_md, extend_pole, extend_taylor_default, DecayOrder, Extension1D,
    ExtensionMethod, FrequencyGrid, MdMethod,
};
use crate::funcs::{EFunction, SmoothFunction, TensorFunction};
use crate::linop::{identity, norm2, Operator, OperatorTuple};
use crate::quad::{
    integrate_multi, integrate_plane, refine_until, PlaneIntegral, QuadratureSpec,
    TensorTermFields, TraceRow,
};
use crate::{C64, CMatrix, Error, Result};
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Default)]
pub struct ApplyOptions {
    /// extension method; defaults to fourier
    pub taylor: bool,
    pub spec: Option<QuadratureSpec>,
    pub grid: Option<FrequencyGrid>,
}

impl ApplyOptions {
    pub fn taylor() -> Self {
        ApplyOptions {
            taylor: true,
            ..Default::default()
        }
    }

    fn method(&self) -> MdMethod {
        if self.taylor {
            MdMethod::Taylor
        } else {
            MdMethod::Fourier
        }
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub growth_c: f64,
    pub growth_n: f64,
    /// bound on the mass dropped in the |Im z| < y_cut strip
    pub neglected_strip: f64,
    pub node_count: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct CalculusResult {
    pub value: CMatrix,
    pub error_estimate: f64,
    pub method: ExtensionMethod,
    pub spec: QuadratureSpec,
    pub diagnostics: Diagnostics,
}

/// Memoized resolvent field for quadrature nodes (write-once per node).
pub fn cached_resolvent(p: &Operator) -> impl Fn(C64) -> CMatrix + '_ {
    let cache: RefCell<HashMap<(u64, u64), CMatrix>> = RefCell::new(HashMap::new());
    move |z: C64| {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(m) = cache.borrow().get(&key) {
            return m.clone();
        }
        let m = p
            .resolvent(z)
            .expect("quadrature nodes stay off the spectrum");
        cache.borrow_mut().insert(key, m.clone());
        m
    }
}

fn build_extension(f: &SmoothFunction, opts: &ApplyOptions) -> Result<Extension1D> {
    match opts.method() {
        MdMethod::Fourier => extend_fourier(f, opts.grid),
        MdMethod::Taylor => extend_taylor_default(f),
    }
}

fn check_decay(ext: &Extension1D, growth_n: f64) -> Result<()> {
    if let DecayOrder::Power(n) = ext.decay() {
        if (n as f64) < growth_n + 2.0 {
            return Err(Error::DecayGrowthMismatch {
                decay: n,
                growth: growth_n,
            });
        }
    }
    Ok(())
}

fn default_spec_for(ext: &Extension1D) -> QuadratureSpec {
    let (lo, hi) = ext.support_x();
    QuadratureSpec {
        y_max: ext.support_y().min(1.0),
        ..QuadratureSpec::default_plane(lo - 0.3, hi + 0.3)
    }
}

/// Bound on the dropped near-axis strip: sample sup_x |dbar| at the cut,
/// fit the local power, and integrate it against the fitted resolvent
/// growth C y^{-N} over [0, y_cut].
fn neglected_strip_bound(
    ext: &Extension1D,
    spec: &QuadratureSpec,
    growth_c: f64,
    growth_n: f64,
) -> f64 {
    let y_cut = spec.y_panels().last().map_or(0.0, |p| p.0);
    if y_cut <= 0.0 {
        return 0.0;
    }
    let s1 = ext.sup_dbar_on_line(y_cut * 0.9, 48);
    if s1 == 0.0 {
        return 0.0;
    }
    let s2 = ext.sup_dbar_on_line(y_cut * 0.45, 48).max(1e-320);
    let sigma = ((s1 / s2).ln() / 2.0f64.ln()).max(0.0);
    let expo = sigma - growth_n + 1.0;
    if expo <= 0.0 {
        return f64::INFINITY;
    }
    let x_range = spec.x_hi - spec.x_lo;
    2.0 * x_range * growth_c * s1 * y_cut.powf(1.0 - growth_n) / expo / PI
}

fn finish_single(
    integral: PlaneIntegral,
    ext: &Extension1D,
    spec: QuadratureSpec,
    growth_c: f64,
    growth_n: f64,
    mut warnings: Vec<String>,
) -> CalculusResult {
    let strip = neglected_strip_bound(ext, &spec, growth_c, growth_n);
    if !strip.is_finite() {
        warnings.push("neglected-strip bound did not converge".to_string());
    }
    CalculusResult {
        value: integral.value * C64::new(-1.0 / PI, 0.0),
        error_estimate: integral.error_estimate / PI + strip.min(f64::MAX),
        method: ext.method(),
        spec,
        diagnostics: Diagnostics {
            growth_c,
            growth_n,
            neglected_strip: strip,
            node_count: integral.node_count,
            warnings,
        },
    }
}

/// f(P) = (-1/pi) ∫ dbar f~(z) (z - P)^{-1} L(dz).
pub fn apply_single(
    f: &SmoothFunction,
    p: &Operator,
    opts: &ApplyOptions,
) -> Result<CalculusResult> {
    p.assert_real_spectrum()?;
    if f.support().is_empty() {
        return Ok(zero_result(p.dim(), opts));
    }
    let growth = p.fit_growth().clone();
    let ext = build_extension(f, opts)?;
    check_decay(&ext, growth.n)?;
    let spec = opts.spec.unwrap_or_else(|| default_spec_for(&ext));
    let field = cached_resolvent(p);
    let integral = integrate_plane(&|z| ext.dbar(z), &field, p.dim(), &spec);
    let warnings = extension_warnings(&ext);
    Ok(finish_single(integral, &ext, spec, growth.c, growth.n, warnings))
}

/// Like `apply_single` but refining the layout until the error estimate
/// reaches `tol` (or the node budget runs out).
pub fn apply_single_refined(
    f: &SmoothFunction,
    p: &Operator,
    opts: &ApplyOptions,
    tol: f64,
    budget: u64,
) -> Result<(CalculusResult, Vec<TraceRow>)> {
    p.assert_real_spectrum()?;
    if f.support().is_empty() {
        return Ok((zero_result(p.dim(), opts), Vec::new()));
    }
    let growth = p.fit_growth().clone();
    let ext = build_extension(f, opts)?;
    check_decay(&ext, growth.n)?;
    let spec0 = opts.spec.unwrap_or_else(|| default_spec_for(&ext));
    let field = cached_resolvent(p);
    // the 1/pi factor is applied at the end; refine against the scaled
    // tolerance
    let (integral, trace) = refine_until(
        &|spec| Ok(integrate_plane(&|z| ext.dbar(z), &field, p.dim(), spec)),
        &spec0,
        tol * PI,
        budget,
    )?;
    let mut spec_used = spec0;
    for _ in 1..trace.len() {
        spec_used = spec_used.refined();
    }
    let warnings = extension_warnings(&ext);
    Ok((
        finish_single(integral, &ext, spec_used, growth.c, growth.n, warnings),
        trace,
    ))
}

fn zero_result(dim: usize, opts: &ApplyOptions) -> CalculusResult {
    CalculusResult {
        value: CMatrix::zeros(dim, dim),
        error_estimate: 0.0,
        method: if opts.taylor {
            ExtensionMethod::Taylor
        } else {
            ExtensionMethod::Fourier
        },
        spec: QuadratureSpec::default_plane(-1.0, 1.0),
        diagnostics: Diagnostics {
            growth_c: 0.0,
            growth_n: 0.0,
            neglected_strip: 0.0,
            node_count: 0,
            warnings: Vec::new(),
        },
    }
}

fn extension_warnings(ext: &Extension1D) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Extension1D::Fourier(fe) = ext {
        if fe.tail_warning() {
            warnings.push(format!(
                "frequency grid tail above threshold at xi_max = {}",
                fe.grid().xi_max
            ));
        }
    }
    warnings
}

/// f(P_1, ..., P_m) with the standard composition order: the P_1-resolvent
/// leftmost.
pub fn apply_multi(
    f: &TensorFunction,
    t: &OperatorTuple,
    opts: &ApplyOptions,
) -> Result<CalculusResult> {
    let order: Vec<usize> = (0..t.len()).collect();
    apply_ordered(f, t, &order, opts)
}

/// f with an explicit composition order: `order[0]` is the variable whose
/// resolvent sits leftmost in the operator product.
pub fn apply_ordered(
    f: &TensorFunction,
    t: &OperatorTuple,
    order: &[usize],
    opts: &ApplyOptions,
) -> Result<CalculusResult> {
    let m = t.len();
    if f.arity != m || order.len() != m {
        return Err(Error::DimensionMismatch);
    }
    if m > 3 {
        return Err(Error::invalid(
            "operator tuple",
            "more than three variables is out of scope",
        ));
    }
    let growths: Vec<(f64, f64)> = t
        .ops()
        .iter()
        .map(|p| {
            let g = p.fit_growth();
            (g.c, g.n)
        })
        .collect();
    let md = extend_md(f, opts.method())?;
    for (_, exts) in &md.terms {
        for (j, e) in exts.iter().enumerate() {
            check_decay(e, growths[j].1)?;
        }
    }
    // one region per variable covering every term's factor support
    let specs: Vec<QuadratureSpec> = (0..m)
        .map(|j| {
            if let Some(spec) = opts.spec {
                return spec;
            }
            let hull = f.support_hull(j).unwrap_or((-1.0, 1.0));
            let y_max = md
                .terms
                .iter()
                .map(|(_, exts)| exts[j].support_y())
                .fold(0.0f64, f64::max)
                .min(1.0);
            QuadratureSpec {
                y_max,
                ..QuadratureSpec::default_pair(hull.0 - 0.7, hull.1 + 0.7)
            }
        })
        .collect();
    let fields: Vec<Box<dyn Fn(C64) -> CMatrix + '_>> = t
        .ops()
        .iter()
        .map(|p| Box::new(cached_resolvent(p)) as Box<dyn Fn(C64) -> CMatrix>)
        .collect();
    let field_refs: Vec<&dyn Fn(C64) -> CMatrix> = fields.iter().map(|b| b.as_ref()).collect();
    let dbar_closures: Vec<Vec<Box<dyn Fn(C64) -> C64 + '_>>> = md
        .terms
        .iter()
        .map(|(_, exts)| {
            exts.iter()
                .map(|e| {
                    let e = e.clone();
                    Box::new(move |z: C64| e.dbar(z)) as Box<dyn Fn(C64) -> C64>
                })
                .collect()
        })
        .collect();
    let terms: Vec<TensorTermFields> = md
        .terms
        .iter()
        .zip(&dbar_closures)
        .map(|((w, _), dc)| TensorTermFields {
            weight: *w,
            dbar: dc.iter().map(|b| b.as_ref()).collect(),
        })
        .collect();
    let integral = integrate_multi(&terms, &field_refs, order, &specs, t.dim())?;
    let scale = C64::new(-1.0 / PI, 0.0).powi(m as i32);
    // strip bound per variable, weighted by the other factors' dbar mass
    let mut strip = 0.0f64;
    for (j, spec) in specs.iter().enumerate() {
        for (w, exts) in &md.terms {
            let mut other = w.norm();
            for (jj, e) in exts.iter().enumerate() {
                if jj != j {
                    other *= e.sup_dbar_on_line(0.05, 24).max(1e-300) * 4.0;
                }
            }
            strip += other * neglected_strip_bound(&exts[j], spec, growths[j].0, growths[j].1);
        }
    }
    Ok(CalculusResult {
        value: integral.value * scale,
        error_estimate: integral.error_estimate / PI.powi(m as i32) + strip.min(f64::MAX),
        method: if opts.taylor {
            ExtensionMethod::Taylor
        } else {
            ExtensionMethod::Fourier
        },
        spec: specs[0],
        diagnostics: Diagnostics {
            growth_c: growths.iter().map(|g| g.0).fold(0.0, f64::max),
            growth_n: growths.iter().map(|g| g.1).fold(0.0, f64::max),
            neglected_strip: strip,
            node_count: integral.node_count,
            warnings: Vec::new(),
        },
    })
}

/// Iterated two-variable evaluation: the inner variable is applied first,
/// giving a matrix-valued function g(x_1) = f(x_1, P_2) (times an optional
/// middle factor A), then the outer single-operator pass integrates
/// (z_1 - P_1)^{-1} A f(x_1, P_2) against dbar of the outer extension.
/// Agrees with `apply_multi` on tensor functions.
pub fn apply_iterated(
    f: &TensorFunction,
    t: &OperatorTuple,
    middle: Option<&CMatrix>,
    opts: &ApplyOptions,
) -> Result<CalculusResult> {
    if f.arity != 2 || t.len() != 2 {
        return Err(Error::DimensionMismatch);
    }
    let dim = t.dim();
    let p1 = t.op(0);
    let growth1 = p1.fit_growth().clone();
    let a = middle.cloned().unwrap_or_else(|| identity(dim));

    // inner pass: phi_2(P_2) per term
    let mut inner_err = 0.0f64;
    let mut inner_nodes = 0u64;
    let mut rights: Vec<CMatrix> = Vec::with_capacity(f.terms.len());
    for term in &f.terms {
        let inner = apply_single(&term.factors[1], t.op(1), opts)?;
        inner_err += term.weight.norm() * inner.error_estimate;
        inner_nodes += inner.diagnostics.node_count;
        rights.push(&a * inner.value);
    }

    // outer pass: per term, pairwise over shared resolvent nodes
    let mut exts = Vec::with_capacity(f.terms.len());
    for term in &f.terms {
        let e = build_extension(&term.factors[0], opts)?;
        check_decay(&e, growth1.n)?;
        exts.push(e);
    }
    let spec = opts.spec.unwrap_or_else(|| {
        let hull = f.support_hull(0).unwrap_or((-1.0, 1.0));
        let y_max = exts
            .iter()
            .map(Extension1D::support_y)
            .fold(0.0f64, f64::max)
            .min(1.0);
        QuadratureSpec {
            y_max,
            ..QuadratureSpec::default_pair(hull.0 - 0.7, hull.1 + 0.7)
        }
    });
    let field = cached_resolvent(p1);
    let assemble = |spec: &QuadratureSpec| -> CMatrix {
        let node_list = crate::quad::nodes(spec);
        let r1: Vec<CMatrix> = node_list.iter().map(|&(z, _)| field(z)).collect();
        let mut total = CMatrix::zeros(dim, dim);
        for ((term, ext), right) in f.terms.iter().zip(&exts).zip(&rights) {
            let contrib = crate::quad::plane::weighted_field_sum(
                &node_list,
                &|z| ext.dbar(z),
                &mut |i, _| &r1[i] * right,
                dim,
            );
            total += contrib * term.weight;
        }
        total
    };
    let fine = assemble(&spec);
    let coarse = assemble(&spec.coarsened());
    let diff = norm2(&(&fine - &coarse));
    let outer_scale = norm2(&fine) / PI + 1.0;
    Ok(CalculusResult {
        value: fine * C64::new(1.0 / (PI * PI), 0.0),
        error_estimate: diff / (PI * PI) + inner_err * outer_scale,
        method: if opts.taylor {
            ExtensionMethod::Taylor
        } else {
            ExtensionMethod::Fourier
        },
        spec,
        diagnostics: Diagnostics {
            growth_c: growth1.c,
            growth_n: growth1.n,
            neglected_strip: 0.0,
            node_count: inner_nodes + 2 * spec.node_count(),
            warnings: Vec::new(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EPath {
    Exact,
    Integral,
}

/// The pole-augmented calculus f(P) = a0 + sum c (zeta - P)^{-k} + compact(P).
///
/// The exact path evaluates pole terms through the resolvent; the integral
/// path runs the Cauchy-Green integral against the assembled extension,
/// pole regions integrated over their bounded off-axis dbar supports.
pub fn apply_e(
    f: &EFunction,
    p: &Operator,
    path: EPath,
    opts: &ApplyOptions,
) -> Result<CalculusResult> {
    p.assert_real_spectrum()?;
    let n = p.dim();
    let has_compact = !f.compact.support().is_empty();
    let mut value = identity(n) * f.constant;
    let mut err = 0.0f64;
    let mut node_count = 0u64;
    let mut warnings = Vec::new();
    match path {
        EPath::Exact => {
            for term in &f.poles {
                let r = p.resolvent(term.zeta)?;
                let mut pw = identity(n);
                for _ in 0..term.order {
                    pw = pw * &r;
                }
                value += pw * term.coeff;
            }
            if has_compact {
                let res = apply_single(&f.compact, p, opts)?;
                value += &res.value;
                err += res.error_estimate;
                node_count += res.diagnostics.node_count;
                warnings.extend(res.diagnostics.warnings);
            }
        }
        EPath::Integral => {
            let growth = p.fit_growth().clone();
            let field = cached_resolvent(p);
            for term in &f.poles {
                let ext = extend_pole(term)?;
                let (lo, hi) = ext.support_x();
                let gap = ext.dbar_gap_y();
                let y_hi = ext.support_y();
                // two regions: the horizontal ramp band [gap, 2 gap] (finely
                // resolved in y) and the radial ramp above it
                let band = QuadratureSpec {
                    nx: ((hi - lo) / (0.5 * gap)).ceil().max(12.0) as usize,
                    ny: 8,
                    order: 8,
                    ..QuadratureSpec::off_axis(lo, hi, gap * (1.0 - 1e-12), 2.0 * gap)
                };
                let outer = QuadratureSpec {
                    nx: ((hi - lo) / 0.4).ceil().max(12.0) as usize,
                    ny: (((y_hi - 2.0 * gap) / 0.4).ceil().max(6.0)) as usize,
                    order: 8,
                    ..QuadratureSpec::off_axis(lo, hi, 2.0 * gap, y_hi)
                };
                for spec in [band, outer] {
                    let integral = integrate_plane(&|z| ext.dbar(z), &field, n, &spec);
                    value += integral.value * C64::new(-1.0 / PI, 0.0);
                    err += integral.error_estimate / PI;
                    node_count += integral.node_count;
                }
            }
            if has_compact {
                let ext = build_extension(&f.compact, opts)?;
                check_decay(&ext, growth.n)?;
                let spec = default_spec_for(&ext);
                let integral = integrate_plane(&|z| ext.dbar(z), &field, n, &spec);
                let res = finish_single(integral, &ext, spec, growth.c, growth.n, Vec::new());
                value += &res.value;
                err += res.error_estimate;
                node_count += res.diagnostics.node_count;
            }
        }
    }
    Ok(CalculusResult {
        value,
        error_estimate: err,
        method: if path == EPath::Exact {
            ExtensionMethod::PoleExact
        } else if opts.taylor {
            ExtensionMethod::Taylor
        } else {
            ExtensionMethod::Fourier
        },
        spec: QuadratureSpec::default_plane(-1.0, 1.0),
        diagnostics: Diagnostics {
            growth_c: 0.0,
            growth_n: 0.0,
            neglected_strip: 0.0,
            node_count,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::PoleTerm;
    use crate::rng;

    fn bump_at(c: f64, h: f64) -> SmoothFunction {
        SmoothFunction::standard_bump(c, h)
    }

    #[test]
    fn scalar_calculus_is_evaluation() {
        let lambda = 0.3;
        let p = Operator::from_real(&[&[lambda]]).unwrap();
        let f = bump_at(0.0, 1.0);
        let res = apply_single(&f, &p, &ApplyOptions::default()).unwrap();
        let expect = f.eval_value(lambda);
        let got = res.value[(0, 0)];
        assert!(
            (got - expect).norm() <= 1e-7,
            "{got} vs {expect} (err est {:.2e})",
            res.error_estimate
        );
    }

    #[test]
    fn plateau_over_spectrum_gives_identity() {
        let mut r = rng::seeded(31);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5)).unwrap();
        let (lo, hi) = p.spectrum_interval();
        let f = SmoothFunction::plateau(lo - 0.3, hi + 0.3, 0.5);
        let res = apply_single(&f, &p, &ApplyOptions::default()).unwrap();
        assert!(
            norm2(&(&res.value - identity(4))) <= 1e-6,
            "deviation {:.3e}",
            norm2(&(&res.value - identity(4)))
        );
    }

    #[test]
    fn off_spectrum_support_gives_zero() {
        let p = Operator::from_real(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        let f = bump_at(5.0, 0.8);
        let res = apply_single(&f, &p, &ApplyOptions::default()).unwrap();
        assert!(norm2(&res.value) <= 1e-6);
    }

    #[test]
    fn eigen_oracle_matches_on_symmetric() {
        let mut r = rng::seeded(33);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5)).unwrap();
        let f = bump_at(0.0, 1.2);
        let res = apply_single(&f, &p, &ApplyOptions::default()).unwrap();
        let oracle = p.eigen_oracle(&|x| f.eval_value(x), 1e6).unwrap();
        let dev = norm2(&(&res.value - &oracle));
        assert!(dev <= 1e-5, "deviation {dev:.3e}");
    }

    #[test]
    fn extension_methods_agree() {
        let mut r = rng::seeded(34);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.5)).unwrap();
        let f = bump_at(0.2, 1.1);
        let a = apply_single(&f, &p, &ApplyOptions::default()).unwrap();
        let b = apply_single(&f, &p, &ApplyOptions::taylor()).unwrap();
        assert!(norm2(&(&a.value - &b.value)) <= 1e-5);
    }

    #[test]
    fn tensor_law() {
        let mut r = rng::seeded(35);
        let p1 = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.2)).unwrap();
        let p2 = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.2)).unwrap();
        let phi1 = bump_at(0.0, 1.3);
        let phi2 = bump_at(0.3, 1.0);
        let f = TensorFunction::product(vec![phi1.clone(), phi2.clone()]).unwrap();
        let t = OperatorTuple::new(vec![p1.clone(), p2.clone()]).unwrap();
        let multi = apply_multi(&f, &t, &ApplyOptions::default()).unwrap();
        let a = apply_single(&phi1, &p1, &ApplyOptions::default()).unwrap();
        let b = apply_single(&phi2, &p2, &ApplyOptions::default()).unwrap();
        let prod = &a.value * &b.value;
        let dev = norm2(&(&multi.value - prod));
        assert!(dev <= 1e-5, "tensor law deviation {dev:.3e}");
    }

    #[test]
    fn ordered_identity_matches_multi_bitwise() {
        let p1 = Operator::from_real(&[&[0.4, 0.1], &[0.1, -0.3]]).unwrap();
        let p2 = Operator::from_real(&[&[0.9, 0.0], &[0.0, 0.1]]).unwrap();
        let f = TensorFunction::product(vec![bump_at(0.0, 1.0), bump_at(0.5, 1.0)]).unwrap();
        let t = OperatorTuple::new(vec![p1, p2]).unwrap();
        let a = apply_multi(&f, &t, &ApplyOptions::default()).unwrap();
        let b = apply_ordered(&f, &t, &[0, 1], &ApplyOptions::default()).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn swapped_order_is_reversed_product() {
        let mut r = rng::seeded(36);
        let p1 = Operator::new(rng::symmetric_gaussian(&mut r, 2, 1.0)).unwrap();
        let p2 = Operator::new(rng::symmetric_gaussian(&mut r, 2, 1.0)).unwrap();
        let phi1 = bump_at(0.0, 1.0);
        let phi2 = bump_at(0.2, 0.9);
        let f = TensorFunction::product(vec![phi1.clone(), phi2.clone()]).unwrap();
        let t = OperatorTuple::new(vec![p1.clone(), p2.clone()]).unwrap();
        let swapped = apply_ordered(&f, &t, &[1, 0], &ApplyOptions::default()).unwrap();
        let a = apply_single(&phi1, &p1, &ApplyOptions::default()).unwrap();
        let b = apply_single(&phi2, &p2, &ApplyOptions::default()).unwrap();
        let prod = &b.value * &a.value;
        assert!(norm2(&(&swapped.value - prod)) <= 1e-5);
    }

    #[test]
    fn diagonal_restriction() {
        let mut r = rng::seeded(37);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.2)).unwrap();
        let f = TensorFunction::product(vec![bump_at(0.0, 1.4), bump_at(0.2, 1.2)]).unwrap();
        let t = OperatorTuple::new(vec![p.clone(), p.clone()]).unwrap();
        let multi = apply_multi(&f, &t, &ApplyOptions::default()).unwrap();
        let diag = f.diagonal_restriction().unwrap();
        let single = apply_single(&diag, &p, &ApplyOptions::default()).unwrap();
        let dev = norm2(&(&multi.value - &single.value));
        assert!(dev <= 1e-5, "diagonal restriction deviation {dev:.3e}");
    }

    #[test]
    fn iterated_matches_multi_and_middle_factor() {
        let mut r = rng::seeded(38);
        let p1 = Operator::new(rng::symmetric_gaussian(&mut r, 2, 1.0)).unwrap();
        let p2 = Operator::new(rng::symmetric_gaussian(&mut r, 2, 1.0)).unwrap();
        let phi1 = bump_at(0.0, 1.0);
        let phi2 = bump_at(0.3, 1.0);
        let f = TensorFunction::product(vec![phi1.clone(), phi2.clone()]).unwrap();
        let t = OperatorTuple::new(vec![p1.clone(), p2.clone()]).unwrap();
        let multi = apply_multi(&f, &t, &ApplyOptions::default()).unwrap();
        let iter = apply_iterated(&f, &t, None, &ApplyOptions::default()).unwrap();
        assert!(norm2(&(&multi.value - &iter.value)) <= 1e-5);

        // with a middle factor: phi1(P1) A phi2(P2)
        let a = rng::gaussian(&mut r, 2);
        let with_a = apply_iterated(&f, &t, Some(&a), &ApplyOptions::default()).unwrap();
        let l = apply_single(&phi1, &p1, &ApplyOptions::default()).unwrap();
        let rr = apply_single(&phi2, &p2, &ApplyOptions::default()).unwrap();
        let expect = &l.value * &a * &rr.value;
        assert!(norm2(&(&with_a.value - expect)) <= 1e-5);
    }

    #[test]
    fn e_calculus_resolvent_example() {
        let p = Operator::from_real(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap();
        let zeta = C64::new(0.0, 1.0);
        let f = EFunction::omega(zeta).unwrap();
        let exact = apply_e(&f, &p, EPath::Exact, &ApplyOptions::default()).unwrap();
        let r = p.resolvent(zeta).unwrap();
        assert!(norm2(&(&exact.value - &r)) <= 1e-14);
        let integral = apply_e(&f, &p, EPath::Integral, &ApplyOptions::default()).unwrap();
        let dev = norm2(&(&integral.value - &r));
        assert!(dev <= 1e-4, "integral path deviation {dev:.3e}");
    }

    #[test]
    fn e_calculus_constant() {
        let p = Operator::from_real(&[&[0.3, 0.0], &[0.0, -0.4]]).unwrap();
        let f = EFunction::constant_fn(C64::new(0.25, -1.5));
        let res = apply_e(&f, &p, EPath::Exact, &ApplyOptions::default()).unwrap();
        assert_eq!(res.value, identity(2) * C64::new(0.25, -1.5));
        let res2 = apply_e(&f, &p, EPath::Integral, &ApplyOptions::default()).unwrap();
        assert_eq!(res2.value, identity(2) * C64::new(0.25, -1.5));
    }

    #[test]
    fn e_calculus_multiplicative() {
        let mut r = rng::seeded(39);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.2)).unwrap();
        let f1 = EFunction::omega(C64::new(0.0, 1.0)).unwrap();
        let f2 = EFunction::new(
            C64::new(0.0, 0.0),
            vec![PoleTerm {
                coeff: C64::new(1.0, 0.0),
                zeta: C64::new(0.0, 2.0),
                order: 1,
            }],
            bump_at(0.0, 1.0),
        )
        .unwrap();
        let opts = ApplyOptions::default();
        let lhs = apply_e(&f1.multiply(&f2), &p, EPath::Exact, &opts).unwrap();
        let a = apply_e(&f1, &p, EPath::Exact, &opts).unwrap();
        let b = apply_e(&f2, &p, EPath::Exact, &opts).unwrap();
        let dev = norm2(&(&lhs.value - &a.value * &b.value));
        assert!(dev <= 1e-6, "product law deviation {dev:.3e}");
    }
}
