//! One-variable almost-holomorphic extensions: evaluators for f~(z) and
//! dbar f~(z). Three constructions:
//!
//! * `fourier` — f~(z) = psi(Re z) (1/2pi) ∫ e^{i z xi} chi(<xi> Im z) f^(xi) dxi,
//!   with the flat cutoff `chi` and a real-direction plateau `psi` that pins
//!   the support near supp f. dbar comes from its own closed-form integrand
//!   (never from differencing f~).
//! * `taylor` — truncated Taylor column f~(x+iy) = theta(y/h) sum f^(k)(x)(iy)^k/k!,
//!   dbar in closed form, O(y^N) inside the strip.
//! * `pole` — exact extension of c (zeta - x)^(-k) masked off a neighbourhood
//!   of zeta; dbar is supported in a bounded region away from the axis.

use super::chi::CutoffChi;
use super::grid::{fourier_samples, FourierSamples, FrequencyGrid};
use crate::funcs::step::{smooth_step, smooth_step_deriv};
use crate::funcs::{PoleTerm, SmoothFunction};
use crate::{C64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionMethod {
    Fourier,
    Taylor,
    PoleExact,
}

/// How fast dbar f~ vanishes toward the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayOrder {
    /// Faster than any power (measured slope recorded separately).
    Superalgebraic,
    /// O(|Im z|^n).
    Power(u32),
    /// Identically zero inside |Im z| < y0.
    VanishesBelow(f64),
}

#[derive(Debug, Clone)]
pub struct FourierExtension {
    samples: FourierSamples,
    chi: CutoffChi,
    /// real-direction cutoff and its plateau parameters
    psi: SmoothFunction,
    supp: (f64, f64),
    outer_margin: f64,
}

#[derive(Debug, Clone)]
pub struct TaylorExtension {
    f: SmoothFunction,
    n: u32,
    h: f64,
    chi: CutoffChi,
    supp: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct PoleExtension {
    pub coeff: C64,
    pub zeta: C64,
    pub order: u32,
    /// dbar-free strip: |Im z| <= y_flat
    pub y_flat: f64,
    /// mask ramps: a(y) ramps over |y| in [y_flat, 2 y_flat],
    /// b(r) ramps over r in [r_inner, r_inner + 1]
    pub r_inner: f64,
}

#[derive(Debug, Clone)]
pub enum Extension1D {
    Fourier(FourierExtension),
    Taylor(TaylorExtension),
    Pole(PoleExtension),
}

/// Default real-direction cutoff margins: psi = 1 within `inner` of supp f,
/// 0 beyond `outer` (so the extension vanishes identically at distance
/// >= outer from the support).
pub const PSI_INNER: f64 = 0.05;
pub const PSI_OUTER: f64 = 0.2;

pub fn extend_fourier(f: &SmoothFunction, grid: Option<FrequencyGrid>) -> Result<Extension1D> {
    extend_fourier_with_margins(f, grid, PSI_INNER, PSI_OUTER)
}

pub fn extend_fourier_with_margins(
    f: &SmoothFunction,
    grid: Option<FrequencyGrid>,
    inner: f64,
    outer: f64,
) -> Result<Extension1D> {
    assert!(outer > inner && inner >= 0.0);
    let supp = f
        .support()
        .hull()
        .ok_or(Error::NotCompactlySupported)?;
    let grid = grid.unwrap_or_else(|| FrequencyGrid::auto_for(f));
    let samples = fourier_samples(f, grid)?;
    let psi = SmoothFunction::plateau(supp.0 - inner, supp.1 + inner, outer - inner);
    Ok(Extension1D::Fourier(FourierExtension {
        samples,
        chi: CutoffChi,
        psi,
        supp,
        outer_margin: outer,
    }))
}

pub fn extend_taylor(f: &SmoothFunction, n: u32, h: f64) -> Result<Extension1D> {
    assert!(h > 0.0);
    if let Some(avail) = f.max_derivative_order() {
        if n + 1 > avail {
            return Err(Error::DerivativeOrder {
                requested: n + 1,
                available: avail,
            });
        }
    }
    let supp = f
        .support()
        .hull()
        .ok_or(Error::NotCompactlySupported)?;
    Ok(Extension1D::Taylor(TaylorExtension {
        f: f.clone(),
        n,
        h,
        chi: CutoffChi,
        supp,
    }))
}

/// Taylor extension with the default order N = 8 and a strip half-width
/// tied to the narrowest feature of f. The strip must stay well inside the
/// scale on which f varies: the dbar remainder is f^(N+1)(x) (iy)^N / N!,
/// and high derivatives of bump-type functions blow up like w^{-(N+1)} with
/// sharp localization near the support edge, so h ~ 0.15 w keeps that term
/// negligible against the smooth ramp term.
pub fn extend_taylor_default(f: &SmoothFunction) -> Result<Extension1D> {
    let n = match f.max_derivative_order() {
        Some(k) if k < 9 => k.saturating_sub(1),
        _ => 8,
    };
    let w = f.min_feature_width();
    extend_taylor(f, n, (0.15 * w).max(0.13))
}

pub fn extend_pole(term: &PoleTerm) -> Result<Extension1D> {
    if term.zeta.im == 0.0 {
        return Err(Error::PoleOnRealAxis { im: term.zeta.im });
    }
    Ok(Extension1D::Pole(PoleExtension {
        coeff: term.coeff,
        zeta: term.zeta,
        order: term.order,
        y_flat: term.zeta.im.abs() / 3.0,
        r_inner: 2.0 * term.zeta.norm() + 1.0,
    }))
}

impl Extension1D {
    pub fn method(&self) -> ExtensionMethod {
        match self {
            Extension1D::Fourier(_) => ExtensionMethod::Fourier,
            Extension1D::Taylor(_) => ExtensionMethod::Taylor,
            Extension1D::Pole(_) => ExtensionMethod::PoleExact,
        }
    }

    pub fn decay(&self) -> DecayOrder {
        match self {
            Extension1D::Fourier(_) => DecayOrder::Superalgebraic,
            Extension1D::Taylor(t) => DecayOrder::Power(t.n),
            Extension1D::Pole(p) => DecayOrder::VanishesBelow(p.y_flat),
        }
    }

    /// x-interval outside which the extension vanishes identically.
    pub fn support_x(&self) -> (f64, f64) {
        match self {
            Extension1D::Fourier(f) => {
                (f.supp.0 - f.outer_margin, f.supp.1 + f.outer_margin)
            }
            Extension1D::Taylor(t) => t.supp,
            Extension1D::Pole(p) => (-(p.r_inner + 1.0), p.r_inner + 1.0),
        }
    }

    /// |Im z| beyond which the extension vanishes identically.
    pub fn support_y(&self) -> f64 {
        match self {
            Extension1D::Fourier(_) => 1.0,
            Extension1D::Taylor(t) => t.h,
            Extension1D::Pole(p) => p.r_inner + 1.0,
        }
    }

    /// |Im z| below which the dbar integrand vanishes identically
    /// (pole extensions only; for the others dbar decays but is nonzero).
    pub fn dbar_gap_y(&self) -> f64 {
        match self {
            Extension1D::Pole(p) => p.y_flat,
            _ => 0.0,
        }
    }

    pub fn value(&self, z: C64) -> C64 {
        match self {
            Extension1D::Fourier(f) => f.value(z),
            Extension1D::Taylor(t) => t.value(z),
            Extension1D::Pole(p) => p.value(z),
        }
    }

    pub fn dbar(&self, z: C64) -> C64 {
        match self {
            Extension1D::Fourier(f) => f.dbar(z),
            Extension1D::Taylor(t) => t.dbar(z),
            Extension1D::Pole(p) => p.dbar(z),
        }
    }

    /// The raw extension before the real-direction cutoff (Fourier only;
    /// other methods return `value`). Used for measuring the off-support
    /// decay of the underlying construction.
    pub fn value_uncut(&self, z: C64) -> C64 {
        match self {
            Extension1D::Fourier(f) => f.check(z),
            _ => self.value(z),
        }
    }

    /// sup over a line Im z = y of |dbar f~|, sampled on nx points across
    /// the x-support plus margins.
    pub fn sup_dbar_on_line(&self, y: f64, nx: usize) -> f64 {
        let (lo, hi) = self.support_x();
        let mut best = 0.0f64;
        for i in 0..=nx {
            let x = lo + (hi - lo) * i as f64 / nx as f64;
            best = best.max(self.dbar(C64::new(x, y)).norm());
        }
        best
    }
}

impl FourierExtension {
    /// The raw Fourier extension (before the real-direction cutoff).
    fn check(&self, z: C64) -> C64 {
        let y = z.im;
        if y.abs() >= 1.0 {
            return C64::new(0.0, 0.0);
        }
        let chi = self.chi;
        self.band_sum(z, band_hi(y, self.samples.grid.xi_max), |xi| {
            let g = (1.0 + xi * xi).sqrt();
            C64::new(chi.value(g * y), 0.0)
        })
    }

    fn dbar_check(&self, z: C64) -> C64 {
        let y = z.im;
        if y == 0.0 || y.abs() >= 1.0 {
            return C64::new(0.0, 0.0);
        }
        // chi'(<xi> y) is supported on 1/2 <= <xi>|y| <= 1
        let hi = band_hi(y, self.samples.grid.xi_max);
        let lo2 = 1.0 / (2.0 * y.abs());
        if lo2 * lo2 - 1.0 > self.samples.grid.xi_max * self.samples.grid.xi_max {
            return C64::new(0.0, 0.0);
        }
        let chi = self.chi;
        self.band_sum(z, hi, |xi| {
            let g = (1.0 + xi * xi).sqrt();
            let d = chi.deriv(g * y);
            if d == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, 0.5 * g * d)
            }
        })
    }

    /// (1/2pi) sum over |xi| <= xi_hi of e^{i z xi} w(xi) f^(xi) dxi,
    /// evaluated with a re-anchored geometric recurrence in xi.
    fn band_sum(&self, z: C64, xi_hi: f64, weight: impl Fn(f64) -> C64) -> C64 {
        let grid = &self.samples.grid;
        let m = grid.center();
        let k = (xi_hi / grid.dxi).floor() as usize;
        let (j0, j1) = (m - k.min(m), (m + k).min(grid.len() - 1));
        let step = (C64::new(0.0, 1.0) * z * C64::new(grid.dxi, 0.0)).exp();
        let mut cur = exp_iz_xi(z, grid.xi(j0));
        let mut acc = C64::new(0.0, 0.0);
        for j in j0..=j1 {
            if (j - j0) % 128 == 0 {
                cur = exp_iz_xi(z, grid.xi(j));
            }
            let w = weight(grid.xi(j));
            if w != C64::new(0.0, 0.0) {
                acc += w * self.samples.values[j] * cur;
            }
            cur *= step;
        }
        acc * C64::new(grid.dxi / (2.0 * std::f64::consts::PI), 0.0)
    }

    fn value(&self, z: C64) -> C64 {
        let psi = self.psi.eval_value(z.re).re;
        if psi == 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::new(psi, 0.0) * self.check(z)
    }

    fn dbar(&self, z: C64) -> C64 {
        let psi = self.psi.eval_value(z.re).re;
        let dpsi = self.psi.eval(z.re, 1).expect("plateau derivative").re;
        let mut acc = C64::new(0.0, 0.0);
        if psi != 0.0 {
            acc += C64::new(psi, 0.0) * self.dbar_check(z);
        }
        if dpsi != 0.0 {
            acc += C64::new(0.5 * dpsi, 0.0) * self.check(z);
        }
        acc
    }

    pub fn tail_warning(&self) -> bool {
        self.samples.tail_warning
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.samples.grid
    }
}

fn band_hi(y: f64, xi_max: f64) -> f64 {
    if y == 0.0 {
        return xi_max;
    }
    let s = 1.0 / (y * y) - 1.0;
    if s <= 0.0 {
        0.0
    } else {
        s.sqrt().min(xi_max)
    }
}

fn exp_iz_xi(z: C64, xi: f64) -> C64 {
    // e^{i z xi} = e^{-y xi} (cos(x xi) + i sin(x xi))
    C64::from_polar((-z.im * xi).exp(), z.re * xi)
}

impl TaylorExtension {
    fn column(&self, x: f64, y: f64) -> (C64, C64) {
        // (sum_{k<=N} f^(k)(x)(iy)^k/k!, remainder term f^(N+1)(x)(iy)^N/N!)
        let derivs = self
            .f
            .eval_derivs(x, self.n + 1)
            .expect("derivative order validated at construction");
        let iy = C64::new(0.0, y);
        let mut acc = C64::new(0.0, 0.0);
        let mut pw = C64::new(1.0, 0.0);
        let mut fact = 1.0f64;
        for k in 0..=self.n as usize {
            acc += derivs[k] * pw * C64::new(1.0 / fact, 0.0);
            if k == self.n as usize {
                break;
            }
            pw *= iy;
            fact *= (k + 1) as f64;
        }
        let rem = derivs[self.n as usize + 1] * pw * C64::new(1.0 / fact, 0.0);
        (acc, rem)
    }

    fn value(&self, z: C64) -> C64 {
        let theta = self.chi.value(z.im / self.h);
        if theta == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if z.re < self.supp.0 || z.re > self.supp.1 {
            return C64::new(0.0, 0.0);
        }
        let (s, _) = self.column(z.re, z.im);
        C64::new(theta, 0.0) * s
    }

    fn dbar(&self, z: C64) -> C64 {
        if z.re < self.supp.0 || z.re > self.supp.1 {
            return C64::new(0.0, 0.0);
        }
        let u = z.im / self.h;
        let theta = self.chi.value(u);
        let dtheta = self.chi.deriv(u);
        if theta == 0.0 && dtheta == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let (s, rem) = self.column(z.re, z.im);
        let mut acc = C64::new(0.0, 0.0);
        if theta != 0.0 {
            acc += C64::new(0.5 * theta, 0.0) * rem;
        }
        if dtheta != 0.0 {
            acc += C64::new(0.0, 0.5 * dtheta / self.h) * s;
        }
        acc
    }
}

impl PoleExtension {
    /// mask: 1 on {|Im z| <= y_flat} ∪ {|z| >= r_inner + 1}, 0 near zeta.
    fn mask(&self, z: C64) -> f64 {
        let a = 1.0 - CutoffChi.value(z.im / (2.0 * self.y_flat));
        if a == 0.0 {
            return 1.0;
        }
        let b = smooth_step(z.norm() - self.r_inner);
        1.0 - a * b
    }

    fn kernel(&self, z: C64) -> C64 {
        self.coeff * (self.zeta - z).powi(-(self.order as i32))
    }

    fn value(&self, z: C64) -> C64 {
        let rho = self.mask(z);
        if rho == 0.0 {
            return C64::new(0.0, 0.0);
        }
        self.kernel(z) * C64::new(rho, 0.0)
    }

    fn dbar(&self, z: C64) -> C64 {
        // dbar(rho * kernel) = kernel * dbar rho away from zeta, and rho
        // kills a neighbourhood of zeta entirely.
        let s_y = 2.0 * self.y_flat;
        let a = 1.0 - CutoffChi.value(z.im / s_y);
        let da = C64::new(0.0, -0.5 / s_y * CutoffChi.deriv(z.im / s_y));
        let r = z.norm();
        let b = smooth_step(r - self.r_inner);
        let db = if r == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.5 * smooth_step_deriv(r - self.r_inner, 1), 0.0) * z / C64::new(r, 0.0)
        };
        let drho = -(da * C64::new(b, 0.0) + C64::new(a, 0.0) * db);
        if drho == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        self.kernel(z) * drho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extend::least_squares_slope;
    use crate::funcs::PoleTerm;

    fn unit_bump() -> SmoothFunction {
        SmoothFunction::standard_bump(0.0, 1.0)
    }

    #[test]
    fn fourier_restriction_and_axis_dbar() {
        let f = unit_bump();
        let ext = extend_fourier(&f, None).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=100 {
            let x = -0.99 + 1.98 * i as f64 / 100.0;
            let d = (ext.value(C64::new(x, 0.0)) - f.eval_value(x)).norm();
            worst = worst.max(d);
            assert_eq!(ext.dbar(C64::new(x, 0.0)), C64::new(0.0, 0.0));
        }
        assert!(worst <= 1e-8, "restriction error {worst:.3e}");
    }

    #[test]
    fn fourier_vanishes_above_strip() {
        let ext = extend_fourier(&unit_bump(), None).unwrap();
        assert_eq!(ext.value(C64::new(0.2, 1.0)), C64::new(0.0, 0.0));
        assert_eq!(ext.value(C64::new(0.0, -1.3)), C64::new(0.0, 0.0));
    }

    #[test]
    fn fourier_vanishes_off_support_after_cutoff() {
        let ext = extend_fourier(&unit_bump(), None).unwrap();
        for &x in &[1.21, 1.5, -2.0] {
            assert_eq!(ext.value(C64::new(x, 0.1)), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn taylor_restriction_exact() {
        let f = unit_bump();
        let ext = extend_taylor(&f, 8, 1.0).unwrap();
        for i in 0..=50 {
            let x = -0.99 + 1.98 * i as f64 / 50.0;
            assert_eq!(ext.value(C64::new(x, 0.0)), f.eval_value(x));
        }
    }

    #[test]
    fn taylor_exact_for_polynomials_in_flat_region() {
        // window flat on [-0.5, 0.5]; inside, f is the polynomial x^2 - 0.25
        let f = SmoothFunction::Polynomial {
            coeffs: vec![C64::new(-0.25, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            window: Box::new(SmoothFunction::plateau(-0.5, 0.5, 0.5)),
        };
        let ext = extend_taylor(&f, 4, 0.6).unwrap();
        for &x in &[-0.3, 0.0, 0.2] {
            for &y in &[0.05, -0.2, 0.29] {
                // |y| <= h/2 keeps theta flat; truncated Taylor of a
                // degree-2 polynomial at order 4 is exact
                assert!(
                    ext.dbar(C64::new(x, y)).norm() < 1e-15,
                    "x={x} y={y}"
                );
            }
        }
    }

    #[test]
    fn taylor_needs_derivatives() {
        let tab = SmoothFunction::Tabulated(crate::funcs::TabulatedSmooth {
            x0: -1.0,
            dx: 0.1,
            derivs: vec![vec![C64::new(0.0, 0.0); 21]; 4],
        });
        assert!(extend_taylor(&tab, 8, 0.5).is_err());
        assert!(extend_taylor(&tab, 2, 0.5).is_ok());
    }

    #[test]
    fn cross_method_agreement_near_axis() {
        let f = unit_bump();
        let fo = extend_fourier(&f, None).unwrap();
        let ta = extend_taylor(&f, 8, 1.0).unwrap();
        let scale: f64 = (0..=8).map(|k| f.sup_abs_deriv(k).unwrap()).fold(0.0, f64::max);
        let mut sup = 0.0f64;
        for i in 0..=60 {
            let x = -0.95 + 1.9 * i as f64 / 60.0;
            for &y in &[0.05, -0.05] {
                sup = sup.max((fo.value(C64::new(x, y)) - ta.value(C64::new(x, y))).norm());
            }
        }
        assert!(sup <= 1e-4 * scale, "sup {sup:.3e} scale {scale:.3e}");
    }

    #[test]
    fn pole_extension_basics() {
        let term = PoleTerm {
            coeff: C64::new(2.0, -1.0),
            zeta: C64::new(0.5, 1.5),
            order: 2,
        };
        let ext = extend_pole(&term).unwrap();
        // real axis: mask is 1, exact kernel
        let x = 0.3;
        let expect = term.coeff * (term.zeta - C64::new(x, 0.0)).powi(-2);
        assert_eq!(ext.value(C64::new(x, 0.0)), expect);
        // at the pole: cut off
        assert_eq!(ext.value(term.zeta), C64::new(0.0, 0.0));
        // dbar vanishes in the flat strip
        for &x in &[-1.0, 0.0, 2.0] {
            for &y in &[0.0, 0.3, -0.49] {
                assert_eq!(ext.dbar(C64::new(x, y)), C64::new(0.0, 0.0), "x={x} y={y}");
            }
        }
        // dbar is nonzero somewhere in the mask ramp
        assert!(ext.dbar(C64::new(0.5, 0.8)).norm() > 0.0);
    }

    #[test]
    fn fourier_dbar_decay_slope() {
        // least-squares slope of log2 sup_x |dbar| vs log2 y over dyadic
        // y = 2^-4 .. 2^-9; needs a grid reaching past <xi> = 512. The
        // transform decays like e^{-sqrt(h xi)}, so the slope grows with
        // the bump width; halfwidth 2.5 sits near 5 over this range.
        let f = SmoothFunction::standard_bump(0.0, 2.5);
        let ext =
            extend_fourier(&f, Some(FrequencyGrid::new(550.0, 0.05))).unwrap();
        let mut pts = Vec::new();
        for k in 4..=9 {
            let y = 2.0f64.powi(-k);
            let s = ext.sup_dbar_on_line(y, 160);
            assert!(s > 0.0, "k={k}");
            pts.push((-(k as f64), s.log2()));
        }
        let slope = least_squares_slope(&pts);
        assert!(slope >= 4.0, "fourier decay slope {slope:.2}");
    }

    #[test]
    fn taylor_dbar_decay_slope() {
        let f = unit_bump();
        let ext = extend_taylor(&f, 8, 1.0).unwrap();
        let mut pts = Vec::new();
        for k in 4..=9 {
            let y = 2.0f64.powi(-k);
            let s = ext.sup_dbar_on_line(y, 160);
            pts.push((-(k as f64), s.log2()));
        }
        let slope = least_squares_slope(&pts);
        assert!((slope - 8.0).abs() < 0.2, "taylor decay slope {slope:.2}");
        // per-step slope is the clean N = 8 for the Taylor strip
        for w in pts.windows(2) {
            let step = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!(step >= 4.0, "per-step {step:.2}");
        }
    }

    #[test]
    fn off_support_decay_before_cutoff() {
        // Eq-style vanishing off the support for the raw extension
        let f = unit_bump();
        let ext = extend_fourier(&f, Some(FrequencyGrid::new(550.0, 0.05))).unwrap();
        let x0 = 1.25; // distance 0.25 from supp
        let mut pts = Vec::new();
        for k in 4..=8 {
            let y = 2.0f64.powi(-k);
            let v = ext.value_uncut(C64::new(x0, y)).norm();
            if v == 0.0 {
                continue;
            }
            pts.push((-(k as f64), v.log2()));
        }
        assert!(pts.len() >= 4);
        let slope = least_squares_slope(&pts);
        assert!(slope >= 4.0, "off-support decay slope {slope:.2}");
    }
}
