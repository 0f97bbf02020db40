//! Symbolic trees of compactly supported smooth functions on the line, with
//! exact derivatives of every order via closed-form chain and product rules.
//! The closed family (rather than black-box evaluators) is what lets the
//! Taylor extension and the composition machinery work without numerical
//! differentiation noise.

use super::step::{binomial, smooth_step_derivs};
use crate::jsonfmt::complex_pair;
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

/// Support of a tree node: a finite union of bounded intervals, or the whole
/// line (pole kernels restricted to the reals never vanish).
#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Bounded(Vec<(f64, f64)>),
    Unbounded,
}

impl Support {
    pub fn empty() -> Self {
        Support::Bounded(Vec::new())
    }

    pub fn interval(a: f64, b: f64) -> Self {
        if a < b {
            Support::Bounded(vec![(a, b)])
        } else {
            Support::empty()
        }
    }

    /// Smallest interval containing the support, if bounded and non-empty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        match self {
            Support::Unbounded => None,
            Support::Bounded(iv) if iv.is_empty() => None,
            Support::Bounded(iv) => {
                let lo = iv.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = iv.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Support::Unbounded => true,
            Support::Bounded(iv) => iv.iter().any(|&(a, b)| a <= x && x <= b),
        }
    }

    pub fn distance(&self, x: f64) -> f64 {
        match self {
            Support::Unbounded => 0.0,
            Support::Bounded(iv) => iv
                .iter()
                .map(|&(a, b)| {
                    if x < a {
                        a - x
                    } else if x > b {
                        x - b
                    } else {
                        0.0
                    }
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn normalize(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        iv.retain(|&(a, b)| a < b);
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }

    pub fn union(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Unbounded, _) | (_, Support::Unbounded) => Support::Unbounded,
            (Support::Bounded(a), Support::Bounded(b)) => {
                let mut iv = a.clone();
                iv.extend_from_slice(b);
                Support::Bounded(Self::normalize(iv))
            }
        }
    }

    pub fn intersect(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Unbounded, s) => s.clone(),
            (s, Support::Unbounded) => s.clone(),
            (Support::Bounded(xs), Support::Bounded(ys)) => {
                let mut iv = Vec::new();
                for &(a, b) in xs {
                    for &(c, d) in ys {
                        let lo = a.max(c);
                        let hi = b.min(d);
                        if lo < hi {
                            iv.push((lo, hi));
                        }
                    }
                }
                Support::Bounded(Self::normalize(iv))
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Support::Bounded(iv) if iv.is_empty())
    }
}

/// Tabulated values and derivatives on a uniform grid; evaluation between
/// grid points is the local Taylor polynomial from the nearest node.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TabulatedSmooth {
    pub x0: f64,
    pub dx: f64,
    /// derivs[k][i] = k-th derivative at x0 + i*dx; order K = derivs.len()-1.
    #[serde(with = "tab_values")]
    pub derivs: Vec<Vec<C64>>,
}

mod tab_values {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        rows: &[Vec<C64>],
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<Vec<[f64; 2]>> = rows
            .iter()
            .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        raw.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Vec<Vec<C64>>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(de)?;
        Ok(raw
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect())
    }
}

impl TabulatedSmooth {
    pub fn order(&self) -> u32 {
        (self.derivs.len() as u32).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.derivs.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn span(&self) -> (f64, f64) {
        (self.x0, self.x0 + self.dx * (self.len().saturating_sub(1)) as f64)
    }

    fn eval_derivs(&self, x: f64, k: u32) -> Result<Vec<C64>> {
        let kk = self.order();
        if k > kk {
            return Err(Error::DerivativeOrder {
                requested: k,
                available: kk,
            });
        }
        let (lo, hi) = self.span();
        let mut out = vec![C64::new(0.0, 0.0); k as usize + 1];
        if x < lo || x > hi || self.is_empty() {
            return Ok(out);
        }
        let i = (((x - self.x0) / self.dx).round() as usize).min(self.len() - 1);
        let t = x - (self.x0 + self.dx * i as f64);
        for m in 0..=k as usize {
            // Taylor from the node using the stored higher derivatives
            let mut acc = C64::new(0.0, 0.0);
            let mut tp = 1.0;
            let mut fact = 1.0;
            for j in 0..=(kk as usize - m) {
                acc += self.derivs[m + j][i] * C64::new(tp / fact, 0.0);
                tp *= t;
                fact *= (j + 1) as f64;
            }
            out[m] = acc;
        }
        Ok(out)
    }
}

/// Expression tree over compactly supported smooth functions.
///
/// Complex-valued in general (scales, pole kernels, polynomial
/// coefficients may be complex); the classical test functions are real.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SmoothFunction {
    /// exp(-1/(1-t^2)) on |t| < 1 with t = (x-center)/halfwidth, else 0.
    StandardBump { center: f64, halfwidth: f64 },
    /// 1 on [a, b], 0 outside [a-ramp, b+ramp], mollified-step ramps.
    Plateau { a: f64, b: f64, ramp: f64 },
    /// p(x) * window(x); the window keeps the product compactly supported.
    Polynomial {
        #[serde(with = "crate::jsonfmt::complex_vec")]
        coeffs: Vec<C64>,
        window: Box<SmoothFunction>,
    },
    /// (zeta - x)^(-order) restricted to the reals; Im zeta != 0.
    PoleKernel {
        #[serde(with = "complex_pair")]
        zeta: C64,
        order: u32,
    },
    Product {
        left: Box<SmoothFunction>,
        right: Box<SmoothFunction>,
    },
    Sum { terms: Vec<SmoothFunction> },
    Scale {
        #[serde(with = "complex_pair")]
        factor: C64,
        inner: Box<SmoothFunction>,
    },
    Tabulated(TabulatedSmooth),
}

impl SmoothFunction {
    pub fn standard_bump(center: f64, halfwidth: f64) -> Self {
        assert!(halfwidth > 0.0, "bump halfwidth must be positive");
        SmoothFunction::StandardBump { center, halfwidth }
    }

    pub fn plateau(a: f64, b: f64, ramp: f64) -> Self {
        assert!(a <= b && ramp > 0.0, "plateau needs a <= b and ramp > 0");
        SmoothFunction::Plateau { a, b, ramp }
    }

    pub fn pole_kernel(zeta: C64, order: u32) -> Result<Self> {
        if zeta.im == 0.0 {
            return Err(Error::PoleOnRealAxis { im: zeta.im });
        }
        assert!(order >= 1, "pole order must be at least 1");
        Ok(SmoothFunction::PoleKernel { zeta, order })
    }

    pub fn zero() -> Self {
        SmoothFunction::Sum { terms: Vec::new() }
    }

    pub fn scale(factor: C64, inner: SmoothFunction) -> Self {
        SmoothFunction::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    /// Pointwise product; support is the intersection of the supports.
    pub fn multiply(f: SmoothFunction, g: SmoothFunction) -> SmoothFunction {
        SmoothFunction::Product {
            left: Box::new(f),
            right: Box::new(g),
        }
    }

    pub fn sum(terms: Vec<SmoothFunction>) -> SmoothFunction {
        SmoothFunction::Sum { terms }
    }

    /// Value of the k-th derivative at x; zero outside the support.
    pub fn eval(&self, x: f64, k: u32) -> Result<C64> {
        Ok(*self.eval_derivs(x, k)?.last().unwrap())
    }

    pub fn eval_value(&self, x: f64) -> C64 {
        // order 0 never exceeds a tabulated order
        self.eval(x, 0).expect("order-0 evaluation cannot fail")
    }

    /// All derivatives of order 0..=k at x.
    pub fn eval_derivs(&self, x: f64, k: u32) -> Result<Vec<C64>> {
        let kk = k as usize;
        match self {
            SmoothFunction::StandardBump { center, halfwidth } => {
                Ok(bump_derivs(x, *center, *halfwidth, kk))
            }
            SmoothFunction::Plateau { a, b, ramp } => Ok(plateau_derivs(x, *a, *b, *ramp, kk)),
            SmoothFunction::Polynomial { coeffs, window } => {
                let w = window.eval_derivs(x, k)?;
                let mut out = vec![C64::new(0.0, 0.0); kk + 1];
                for (m, slot) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..=m {
                        acc += C64::new(binomial(m, j), 0.0)
                            * poly_deriv_at(coeffs, x, j)
                            * w[m - j];
                    }
                    *slot = acc;
                }
                Ok(out)
            }
            SmoothFunction::PoleKernel { zeta, order } => {
                // d^m/dx^m (zeta - x)^(-n) = n(n+1)...(n+m-1) (zeta - x)^(-n-m)
                let n = *order as i32;
                let base = *zeta - C64::new(x, 0.0);
                let mut out = Vec::with_capacity(kk + 1);
                let mut rising = 1.0f64;
                for m in 0..=kk {
                    out.push(C64::new(rising, 0.0) * base.powi(-(n + m as i32)));
                    rising *= (n as f64) + m as f64;
                }
                Ok(out)
            }
            SmoothFunction::Product { left, right } => {
                let a = left.eval_derivs(x, k)?;
                let b = right.eval_derivs(x, k)?;
                let mut out = vec![C64::new(0.0, 0.0); kk + 1];
                for (m, slot) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..=m {
                        acc += C64::new(binomial(m, j), 0.0) * a[j] * b[m - j];
                    }
                    *slot = acc;
                }
                Ok(out)
            }
            SmoothFunction::Sum { terms } => {
                let mut out = vec![C64::new(0.0, 0.0); kk + 1];
                for t in terms {
                    for (slot, v) in out.iter_mut().zip(t.eval_derivs(x, k)?) {
                        *slot += v;
                    }
                }
                Ok(out)
            }
            SmoothFunction::Scale { factor, inner } => {
                let mut v = inner.eval_derivs(x, k)?;
                for s in &mut v {
                    *s *= *factor;
                }
                Ok(v)
            }
            SmoothFunction::Tabulated(tab) => tab.eval_derivs(x, k),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            SmoothFunction::StandardBump { center, halfwidth } => {
                Support::interval(center - halfwidth, center + halfwidth)
            }
            SmoothFunction::Plateau { a, b, ramp } => Support::interval(a - ramp, b + ramp),
            SmoothFunction::Polynomial { window, .. } => window.support(),
            SmoothFunction::PoleKernel { .. } => Support::Unbounded,
            SmoothFunction::Product { left, right } => {
                left.support().intersect(&right.support())
            }
            SmoothFunction::Sum { terms } => terms
                .iter()
                .fold(Support::empty(), |acc, t| acc.union(&t.support())),
            SmoothFunction::Scale { factor, inner } => {
                if *factor == C64::new(0.0, 0.0) {
                    Support::empty()
                } else {
                    inner.support()
                }
            }
            SmoothFunction::Tabulated(tab) => {
                let (lo, hi) = tab.span();
                Support::interval(lo, hi)
            }
        }
    }

    /// Highest derivative order that can be evaluated; `None` = unbounded.
    pub fn max_derivative_order(&self) -> Option<u32> {
        match self {
            SmoothFunction::Tabulated(tab) => Some(tab.order()),
            SmoothFunction::Polynomial { window, .. } => window.max_derivative_order(),
            SmoothFunction::Product { left, right } => min_opt(
                left.max_derivative_order(),
                right.max_derivative_order(),
            ),
            SmoothFunction::Sum { terms } => terms
                .iter()
                .fold(None, |acc, t| min_opt(acc, t.max_derivative_order())),
            SmoothFunction::Scale { inner, .. } => inner.max_derivative_order(),
            _ => None,
        }
    }

    /// Rough scale of the narrowest feature, used to size frequency grids.
    pub fn min_feature_width(&self) -> f64 {
        match self {
            SmoothFunction::StandardBump { halfwidth, .. } => *halfwidth,
            SmoothFunction::Plateau { ramp, .. } => *ramp,
            SmoothFunction::Polynomial { window, .. } => window.min_feature_width(),
            SmoothFunction::PoleKernel { zeta, .. } => zeta.im.abs(),
            SmoothFunction::Product { left, right } => {
                left.min_feature_width().min(right.min_feature_width())
            }
            SmoothFunction::Sum { terms } => terms
                .iter()
                .map(SmoothFunction::min_feature_width)
                .fold(f64::INFINITY, f64::min),
            SmoothFunction::Scale { inner, .. } => inner.min_feature_width(),
            SmoothFunction::Tabulated(tab) => {
                let (lo, hi) = tab.span();
                let span = (hi - lo).max(tab.dx);
                // feature size from the ratio of the function to its slope
                let mut vmax = 0.0f64;
                let mut dmax = 0.0f64;
                for i in 0..tab.len() {
                    vmax = vmax.max(tab.derivs[0][i].norm());
                    if tab.derivs.len() > 1 {
                        dmax = dmax.max(tab.derivs[1][i].norm());
                    }
                }
                if dmax == 0.0 {
                    span
                } else {
                    (vmax / dmax).clamp(4.0 * tab.dx, span)
                }
            }
        }
    }

    /// True when every leaf is structurally real-valued on the real axis.
    pub fn is_real_valued(&self) -> bool {
        match self {
            SmoothFunction::StandardBump { .. } | SmoothFunction::Plateau { .. } => true,
            SmoothFunction::Polynomial { coeffs, window } => {
                coeffs.iter().all(|c| c.im == 0.0) && window.is_real_valued()
            }
            SmoothFunction::PoleKernel { .. } => false,
            SmoothFunction::Product { left, right } => {
                left.is_real_valued() && right.is_real_valued()
            }
            SmoothFunction::Sum { terms } => terms.iter().all(SmoothFunction::is_real_valued),
            SmoothFunction::Scale { factor, inner } => factor.im == 0.0 && inner.is_real_valued(),
            SmoothFunction::Tabulated(tab) => tab
                .derivs
                .iter()
                .all(|row| row.iter().all(|c| c.im == 0.0)),
        }
    }

    /// Sampled sup of |f^(k)| over the support (513 points per interval).
    pub fn sup_abs_deriv(&self, k: u32) -> Result<f64> {
        let sup = match self.support() {
            Support::Unbounded => return Err(Error::NotCompactlySupported),
            Support::Bounded(iv) => iv,
        };
        let mut best = 0.0f64;
        for (a, b) in sup {
            for i in 0..=512 {
                let x = a + (b - a) * i as f64 / 512.0;
                best = best.max(self.eval(x, k)?.norm());
            }
        }
        Ok(best)
    }
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// p(x), p'(x), ... for a polynomial in ascending coefficients.
fn poly_deriv_at(coeffs: &[C64], x: f64, j: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(j) {
        let mut fall = 1.0f64;
        for d in 0..j {
            fall *= (i - d) as f64;
        }
        acc += c * C64::new(fall * x.powi((i - j) as i32), 0.0);
    }
    acc
}

/// Derivatives of the standard bump B(t) = exp(-1/(1-t^2)).
///
/// B^(k)(t) = B(t) p_k(t) / (1-t^2)^(2k) with p_0 = 1 and
/// p_{k+1} = p_k' (1-t^2)^2 + 4k t (1-t^2) p_k - 2t p_k.
fn bump_derivs(x: f64, center: f64, halfwidth: f64, k: usize) -> Vec<C64> {
    let t = (x - center) / halfwidth;
    let u = 1.0 - t * t;
    let mut out = vec![C64::new(0.0, 0.0); k + 1];
    if u <= 0.0 || 1.0 / u > 700.0 {
        return out;
    }
    let b = (-1.0 / u).exp();
    // q = (1-t^2) as a polynomial in t
    let q = [1.0, 0.0, -1.0];
    let mut p = vec![1.0f64];
    let mut hscale = 1.0;
    for m in 0..=k {
        let pk = horner(&p, t);
        out[m] = C64::new(b * pk / u.powi(2 * m as i32) / hscale, 0.0);
        hscale *= halfwidth;
        if m == k {
            break;
        }
        // p_{m+1} = p' q^2 + 4 m t q p - 2 t p
        let dp = poly_diff(&p);
        let q2 = poly_mul(&q, &q);
        let mut next = poly_mul(&dp, &q2);
        let tq = poly_mul(&[0.0, 4.0 * m as f64], &q);
        next = poly_add(&next, &poly_mul(&tq, &p));
        next = poly_add(&next, &poly_mul(&[0.0, -2.0], &p));
        p = next;
    }
    out
}

/// Derivatives of the plateau: psi((a-x)/ramp) * psi((x-b)/ramp).
fn plateau_derivs(x: f64, a: f64, b: f64, ramp: f64, k: usize) -> Vec<C64> {
    let sl = (a - x) / ramp;
    let sr = (x - b) / ramp;
    let mut out = vec![C64::new(0.0, 0.0); k + 1];
    if sl >= 1.0 || sr >= 1.0 {
        return out;
    }
    if sl <= 0.0 && sr <= 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let dl = smooth_step_derivs(sl, k as u32);
    let dr = smooth_step_derivs(sr, k as u32);
    // chain-rule scales: d/dx of sl is -1/ramp, of sr is +1/ramp
    let fl: Vec<f64> = dl
        .iter()
        .enumerate()
        .map(|(m, v)| v * (-1.0f64 / ramp).powi(m as i32))
        .collect();
    let fr: Vec<f64> = dr
        .iter()
        .enumerate()
        .map(|(m, v)| v * (1.0f64 / ramp).powi(m as i32))
        .collect();
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..=m {
            acc += binomial(m, j) * fl[j] * fr[m - j];
        }
        *slot = C64::new(acc, 0.0);
    }
    out
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_diff(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}
