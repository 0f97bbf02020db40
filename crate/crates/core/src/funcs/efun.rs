//! The multiplication-closed algebra of functions
//!
//! ```text
//! f(x) = a0 + sum_j c_j (zeta_j - x)^(-k_j) + compact(x)
//! ```
//!
//! with Im zeta_j != 0 and a compactly supported smooth remainder. This is
//! the smallest multiplication-closed family containing the resolvent
//! kernels omega_z(x) = 1/(z - x) and the compactly supported smooth
//! functions, and it is exactly what the extended calculus, generator
//! recovery and composition need.

use super::smooth::{SmoothFunction, Support, TabulatedSmooth};
use super::step::binomial;
use crate::jsonfmt::complex_pair;
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PoleTerm {
    #[serde(with = "complex_pair")]
    pub coeff: C64,
    #[serde(with = "complex_pair")]
    pub zeta: C64,
    pub order: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EFunction {
    /// Value at infinity (the constant term of the asymptotic expansion).
    #[serde(with = "complex_pair")]
    pub constant: C64,
    pub poles: Vec<PoleTerm>,
    pub compact: SmoothFunction,
}

impl EFunction {
    pub fn new(constant: C64, poles: Vec<PoleTerm>, compact: SmoothFunction) -> Result<Self> {
        for p in &poles {
            if p.zeta.im == 0.0 {
                return Err(Error::PoleOnRealAxis { im: p.zeta.im });
            }
            if p.order == 0 {
                return Err(Error::invalid("pole term", "order must be at least 1"));
            }
        }
        match compact.support() {
            Support::Unbounded => Err(Error::NotCompactlySupported),
            Support::Bounded(_) => Ok(EFunction {
                constant,
                poles: Self::merge_poles(poles),
                compact,
            }),
        }
    }

    pub fn constant_fn(a0: C64) -> Self {
        EFunction {
            constant: a0,
            poles: Vec::new(),
            compact: SmoothFunction::zero(),
        }
    }

    pub fn from_compact(f: SmoothFunction) -> Result<Self> {
        Self::new(C64::new(0.0, 0.0), Vec::new(), f)
    }

    /// omega_z(x) = 1/(z - x).
    pub fn omega(z: C64) -> Result<Self> {
        Self::new(
            C64::new(0.0, 0.0),
            vec![PoleTerm {
                coeff: C64::new(1.0, 0.0),
                zeta: z,
                order: 1,
            }],
            SmoothFunction::zero(),
        )
    }

    /// x * omega_z(x) = x/(z - x) = -1 + z * omega_z(x).
    pub fn x_omega(z: C64) -> Result<Self> {
        Self::new(
            C64::new(-1.0, 0.0),
            vec![PoleTerm {
                coeff: z,
                zeta: z,
                order: 1,
            }],
            SmoothFunction::zero(),
        )
    }

    pub fn eval(&self, x: f64, k: u32) -> Result<C64> {
        let mut acc = if k == 0 {
            self.constant
        } else {
            C64::new(0.0, 0.0)
        };
        for p in &self.poles {
            // d^k/dx^k (zeta-x)^(-n) = n(n+1)..(n+k-1)(zeta-x)^(-n-k)
            let n = p.order as i32;
            let mut rising = 1.0f64;
            for m in 0..k {
                rising *= (n as f64) + m as f64;
            }
            acc += p.coeff
                * C64::new(rising, 0.0)
                * (p.zeta - C64::new(x, 0.0)).powi(-(n + k as i32));
        }
        acc += self.compact.eval(x, k)?;
        Ok(acc)
    }

    pub fn eval_value(&self, x: f64) -> C64 {
        self.eval(x, 0).expect("order-0 evaluation cannot fail")
    }

    /// Asymptotic coefficients a_0..a_n of f(x) ~ sum a_k x^(-k): the
    /// constant plus the geometric-series expansion of each pole term,
    /// (zeta-x)^(-m) = (-1)^m sum_{k>=m} C(k-1, m-1) zeta^(k-m) x^(-k).
    pub fn asymptotic_coeffs(&self, n: u32) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); n as usize + 1];
        out[0] = self.constant;
        for p in &self.poles {
            let m = p.order as usize;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for k in m..=n as usize {
                out[k] += p.coeff
                    * C64::new(sign * binomial(k - 1, m - 1), 0.0)
                    * p.zeta.powi((k - m) as i32);
            }
        }
        out
    }

    /// Pointwise product, reduced back into the algebra. Distinct poles
    /// recombine by partial fractions; coincident poles raise the order;
    /// pole x compact and compact x compact products fold into the compact
    /// part (the pole kernel is smooth on the reals).
    pub fn multiply(&self, other: &EFunction) -> EFunction {
        let mut poles: Vec<PoleTerm> = Vec::new();
        let mut compact_terms: Vec<SmoothFunction> = Vec::new();

        // constant x constant
        let constant = self.constant * other.constant;

        // constant x poles
        for p in &other.poles {
            poles.push(PoleTerm {
                coeff: self.constant * p.coeff,
                ..*p
            });
        }
        for p in &self.poles {
            poles.push(PoleTerm {
                coeff: other.constant * p.coeff,
                ..*p
            });
        }

        // constant x compact
        if self.constant != C64::new(0.0, 0.0) {
            compact_terms.push(SmoothFunction::scale(self.constant, other.compact.clone()));
        }
        if other.constant != C64::new(0.0, 0.0) {
            compact_terms.push(SmoothFunction::scale(other.constant, self.compact.clone()));
        }

        // pole x pole
        for p in &self.poles {
            for q in &other.poles {
                poles.extend(pole_product(p, q));
            }
        }

        // pole x compact
        for p in &self.poles {
            compact_terms.push(SmoothFunction::multiply(
                SmoothFunction::scale(
                    p.coeff,
                    SmoothFunction::PoleKernel {
                        zeta: p.zeta,
                        order: p.order,
                    },
                ),
                other.compact.clone(),
            ));
        }
        for q in &other.poles {
            compact_terms.push(SmoothFunction::multiply(
                SmoothFunction::scale(
                    q.coeff,
                    SmoothFunction::PoleKernel {
                        zeta: q.zeta,
                        order: q.order,
                    },
                ),
                self.compact.clone(),
            ));
        }

        // compact x compact
        compact_terms.push(SmoothFunction::multiply(
            self.compact.clone(),
            other.compact.clone(),
        ));

        EFunction {
            constant,
            poles: Self::merge_poles(poles),
            compact: SmoothFunction::sum(compact_terms),
        }
    }

    fn merge_poles(poles: Vec<PoleTerm>) -> Vec<PoleTerm> {
        let mut merged: Vec<PoleTerm> = Vec::new();
        for p in poles {
            if let Some(slot) = merged
                .iter_mut()
                .find(|q| q.zeta == p.zeta && q.order == p.order)
            {
                slot.coeff += p.coeff;
            } else {
                merged.push(p);
            }
        }
        merged.retain(|p| p.coeff != C64::new(0.0, 0.0));
        merged.sort_by(|a, b| {
            (a.zeta.re, a.zeta.im, a.order)
                .partial_cmp(&(b.zeta.re, b.zeta.im, b.order))
                .unwrap()
        });
        merged
    }

    /// Real-valued on the axis: real constant, poles in conjugate pairs
    /// with conjugate coefficients, structurally real compact part.
    pub fn is_real_valued(&self) -> bool {
        if self.constant.im != 0.0 || !self.compact.is_real_valued() {
            return false;
        }
        let mut unmatched = self.poles.clone();
        while let Some(p) = unmatched.pop() {
            if let Some(i) = unmatched
                .iter()
                .position(|q| q.zeta == p.zeta.conj() && q.order == p.order)
            {
                let q = unmatched.remove(i);
                if (q.coeff - p.coeff.conj()).norm() > 1e-14 * p.coeff.norm().max(1.0) {
                    return false;
                }
            } else {
                return false;
            }
        }
        true
    }

    /// Radius R such that |f(x) - constant| < gap for all |x| > R.
    fn tail_radius(&self, gap: f64) -> f64 {
        let compact_r = self
            .compact
            .support()
            .hull()
            .map_or(0.0, |(a, b)| a.abs().max(b.abs()));
        let zmax = self
            .poles
            .iter()
            .map(|p| p.zeta.norm())
            .fold(0.0f64, f64::max);
        let csum: f64 = self.poles.iter().map(|p| p.coeff.norm()).sum();
        compact_r.max(zmax + 1.0 + csum / gap)
    }
}

/// Partial fractions for (zeta1-x)^(-j) (zeta2-x)^(-k).
///
/// With d = zeta2 - zeta1 and distinct poles:
///   coefficient of (zeta1-x)^(-p): (-1)^(j-p) C(k+j-p-1, j-p) d^(p-j-k)
///   coefficient of (zeta2-x)^(-q): (-1)^(k-q) C(j+k-q-1, k-q) (-d)^(q-j-k)
/// Coincident poles simply raise the order.
fn pole_product(p: &PoleTerm, q: &PoleTerm) -> Vec<PoleTerm> {
    let c = p.coeff * q.coeff;
    if p.zeta == q.zeta {
        return vec![PoleTerm {
            coeff: c,
            zeta: p.zeta,
            order: p.order + q.order,
        }];
    }
    let j = p.order as usize;
    let k = q.order as usize;
    let d = q.zeta - p.zeta;
    let mut out = Vec::with_capacity(j + k);
    for pp in 1..=j {
        let sign = if (j - pp) % 2 == 0 { 1.0 } else { -1.0 };
        let a = C64::new(sign * binomial(k + j - pp - 1, j - pp), 0.0)
            * d.powi(pp as i32 - (j + k) as i32);
        out.push(PoleTerm {
            coeff: c * a,
            zeta: p.zeta,
            order: pp as u32,
        });
    }
    for qq in 1..=k {
        let sign = if (k - qq) % 2 == 0 { 1.0 } else { -1.0 };
        let b = C64::new(sign * binomial(j + k - qq - 1, k - qq), 0.0)
            * (-d).powi(qq as i32 - (j + k) as i32);
        out.push(PoleTerm {
            coeff: c * b,
            zeta: q.zeta,
            order: qq as u32,
        });
    }
    out
}

/// Composition g(f(x)) tabulated with exact derivatives.
///
/// Requires f real-valued on the axis and g vanishing on a neighbourhood of
/// f's value at infinity, so the composite is compactly supported and
/// re-enters the compactly supported calculus. Derivatives to order `k_max`
/// come from Faa di Bruno with exact derivatives on both sides; the grid
/// spacing is 1/1024 of the covered width.
pub fn compose_smooth(g: &SmoothFunction, f: &EFunction, k_max: u32) -> Result<SmoothFunction> {
    if !f.is_real_valued() {
        return Err(Error::NotRealValued);
    }
    if let Some(avail) = g.max_derivative_order() {
        if k_max > avail {
            return Err(Error::DerivativeOrder {
                requested: k_max,
                available: avail,
            });
        }
    }
    let gsup = g.support();
    let a0 = f.constant;
    let gap = gsup.distance(a0.re);
    if gap <= 0.0 || gsup.contains(a0.re) {
        return Err(Error::CompositionSupport { a0 });
    }
    // Outside [-R, R] the value of f stays within `gap` of a0, hence outside
    // supp g, and the composite vanishes identically.
    let r = f.tail_radius(gap * 0.99);
    let n_cells = 1024usize;
    let lo = -r;
    let dx = 2.0 * r / n_cells as f64;
    let n_pts = n_cells + 1;
    let mut derivs = vec![vec![C64::new(0.0, 0.0); n_pts]; k_max as usize + 1];
    for i in 0..n_pts {
        let x = lo + dx * i as f64;
        let fx = f.eval(x, 0)?;
        if !gsup.contains(fx.re) && gsup.distance(fx.re) > 0.0 {
            continue;
        }
        let f_derivs: Vec<C64> = (0..=k_max).map(|m| f.eval(x, m)).collect::<Result<_>>()?;
        let g_derivs = g.eval_derivs(fx.re, k_max)?;
        let h = faa_di_bruno(&g_derivs, &f_derivs);
        for (m, row) in derivs.iter_mut().enumerate() {
            row[i] = h[m];
        }
    }
    Ok(SmoothFunction::Tabulated(TabulatedSmooth {
        x0: lo,
        dx,
        derivs,
    }))
}

/// h = g o f: h^(n) = sum_{k=1..n} g^(k)(f) B_{n,k}(f', f'', ...) via the
/// partial Bell polynomial recurrence.
fn faa_di_bruno(g_derivs: &[C64], f_derivs: &[C64]) -> Vec<C64> {
    let n_max = g_derivs.len() - 1;
    // bell[n][k] = B_{n,k}(f', .., f^(n-k+1))
    let mut bell = vec![vec![C64::new(0.0, 0.0); n_max + 1]; n_max + 1];
    bell[0][0] = C64::new(1.0, 0.0);
    for n in 1..=n_max {
        for k in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 1..=(n - k + 1) {
                acc += C64::new(binomial(n - 1, i - 1), 0.0) * f_derivs[i] * bell[n - i][k - 1];
            }
            bell[n][k] = acc;
        }
    }
    let mut out = vec![C64::new(0.0, 0.0); n_max + 1];
    out[0] = g_derivs[0];
    for n in 1..=n_max {
        let mut acc = C64::new(0.0, 0.0);
        for k in 1..=n {
            acc += g_derivs[k] * bell[n][k];
        }
        out[n] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn omega(im: f64) -> EFunction {
        EFunction::omega(C64::new(0.0, im)).unwrap()
    }

    #[test]
    fn pole_product_matches_direct_product() {
        // the partial-fraction reduction against pointwise evaluation
        let cases = vec![
            (omega(1.0), omega(2.0)),
            (omega(1.0), omega(1.0)),
            (
                EFunction::new(
                    C64::new(0.5, 0.0),
                    vec![PoleTerm {
                        coeff: C64::new(1.0, -0.5),
                        zeta: C64::new(0.3, 1.5),
                        order: 2,
                    }],
                    SmoothFunction::standard_bump(0.0, 1.0),
                )
                .unwrap(),
                EFunction::new(
                    C64::new(0.0, 0.0),
                    vec![PoleTerm {
                        coeff: C64::new(-2.0, 1.0),
                        zeta: C64::new(-0.4, -0.7),
                        order: 1,
                    }],
                    SmoothFunction::plateau(-0.5, 0.5, 0.25),
                )
                .unwrap(),
            ),
        ];
        let mut r = rng::seeded(3);
        for (f, g) in cases {
            let prod = f.multiply(&g);
            for _ in 0..10 {
                let x = rng::uniform_in(&mut r, -3.0, 3.0);
                let direct = f.eval_value(x) * g.eval_value(x);
                let reduced = prod.eval_value(x);
                assert!(
                    (direct - reduced).norm() <= 1e-12 * direct.norm().max(1.0),
                    "x={x}: {direct} vs {reduced}"
                );
            }
        }
    }

    #[test]
    fn coincident_poles_raise_order() {
        let f = omega(1.0);
        let p = f.multiply(&f);
        assert_eq!(p.poles.len(), 1);
        assert_eq!(p.poles[0].order, 2);
        assert_eq!(p.poles[0].coeff, C64::new(1.0, 0.0));
        assert_eq!(p.poles[0].zeta, C64::new(0.0, 1.0));
    }

    #[test]
    fn constant_one_is_identity() {
        let one = EFunction::constant_fn(C64::new(1.0, 0.0));
        let g = EFunction::new(
            C64::new(0.3, 0.0),
            vec![PoleTerm {
                coeff: C64::new(1.0, 2.0),
                zeta: C64::new(0.0, -1.0),
                order: 1,
            }],
            SmoothFunction::standard_bump(0.5, 0.8),
        )
        .unwrap();
        let p = one.multiply(&g);
        let mut r = rng::seeded(5);
        for _ in 0..10 {
            let x = rng::uniform_in(&mut r, -2.0, 2.0);
            assert!((p.eval_value(x) - g.eval_value(x)).norm() < 1e-13);
        }
    }

    #[test]
    fn multiply_associative_commutative() {
        let mut r = rng::seeded(17);
        let rand_e = |r: &mut rng::ChaCha8Rng| {
            let poles = (0..3)
                .map(|_| PoleTerm {
                    coeff: C64::new(
                        rng::uniform_in(r, -1.0, 1.0),
                        rng::uniform_in(r, -1.0, 1.0),
                    ),
                    zeta: C64::new(
                        rng::uniform_in(r, -1.0, 1.0),
                        rng::uniform_in(r, 0.3, 2.0),
                    ),
                    order: 1 + (rng::uniform_in(r, 0.0, 2.0) as u32),
                })
                .collect();
            EFunction::new(
                C64::new(rng::uniform_in(r, -1.0, 1.0), 0.0),
                poles,
                SmoothFunction::standard_bump(rng::uniform_in(r, -0.5, 0.5), 1.0),
            )
            .unwrap()
        };
        let f = rand_e(&mut r);
        let g = rand_e(&mut r);
        let h = rand_e(&mut r);
        let fg_h = f.multiply(&g).multiply(&h);
        let f_gh = f.multiply(&g.multiply(&h));
        let gf = g.multiply(&f);
        let fg = f.multiply(&g);
        for _ in 0..10 {
            let x = rng::uniform_in(&mut r, -3.0, 3.0);
            assert!((fg_h.eval_value(x) - f_gh.eval_value(x)).norm() < 1e-12);
            assert!((fg.eval_value(x) - gf.eval_value(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn asymptotic_expansion_bounds_tail() {
        // |f(x) - sum_{k<=N} a_k x^(-k)| <= C_N |x|^(-N-1) on 10 <= |x| <= 1000
        let f = EFunction::new(
            C64::new(0.7, 0.0),
            vec![
                PoleTerm {
                    coeff: C64::new(1.0, 0.0),
                    zeta: C64::new(0.5, 1.0),
                    order: 1,
                },
                PoleTerm {
                    coeff: C64::new(0.0, -2.0),
                    zeta: C64::new(-1.0, -2.0),
                    order: 2,
                },
            ],
            SmoothFunction::standard_bump(0.0, 2.0),
        )
        .unwrap();
        for n in 0..=3u32 {
            let coeffs = f.asymptotic_coeffs(n);
            // crude but rigorous constant for |x| >= 2 max|zeta|
            let c_n: f64 = f
                .poles
                .iter()
                .map(|p| p.coeff.norm() * p.zeta.norm().max(1.0).powi(n as i32 + 1))
                .sum::<f64>()
                * 2f64.powi(n as i32 + 3);
            for &x in &[10.0, -12.5, 31.0, 100.0, -316.0, 1000.0] {
                let mut s = C64::new(0.0, 0.0);
                for (k, a) in coeffs.iter().enumerate() {
                    s += a * C64::new(x, 0.0).powi(-(k as i32));
                }
                let diff = (f.eval_value(x) - s).norm();
                assert!(
                    diff <= c_n * x.abs().powi(-(n as i32) - 1),
                    "N={n} x={x}: diff {diff:.3e} bound {:.3e}",
                    c_n * x.abs().powi(-(n as i32) - 1)
                );
            }
        }
    }

    #[test]
    fn real_valued_detection() {
        let z = C64::new(0.2, 1.0);
        let real = EFunction::new(
            C64::new(0.0, 0.0),
            vec![
                PoleTerm {
                    coeff: C64::new(0.0, -0.5),
                    zeta: z,
                    order: 1,
                },
                PoleTerm {
                    coeff: C64::new(0.0, 0.5),
                    zeta: z.conj(),
                    order: 1,
                },
            ],
            SmoothFunction::zero(),
        )
        .unwrap();
        assert!(real.is_real_valued());
        assert!(!EFunction::omega(C64::new(0.0, 1.0)).unwrap().is_real_valued());
    }

    #[test]
    fn composition_plateau_value() {
        // f real with value 0 at infinity that passes through 1; g a plateau
        // around 1 vanishing near 0 -> h hits 1 where f does.
        let f = sym_pole_pair();
        // f(x) = 2x/(x^2+1): max value 1 at x = 1
        assert!((f.eval_value(1.0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        let g = SmoothFunction::plateau(0.9, 1.1, 0.05);
        let h = compose_smooth(&g, &f, 8).unwrap();
        assert!((h.eval_value(1.0) - C64::new(1.0, 0.0)).norm() < 1e-10);
        // far out, f is near 0 which is outside supp g
        assert_eq!(h.eval_value(40.0), C64::new(0.0, 0.0));
        assert!(h.support().hull().is_some());
    }

    #[test]
    fn composition_chain_rule_vs_finite_differences() {
        let f = sym_pole_pair();
        let g = SmoothFunction::plateau(0.4, 0.8, 0.1);
        let h = compose_smooth(&g, &f, 8).unwrap();
        let mut r = rng::seeded(23);
        for _ in 0..5 {
            let x = rng::uniform_in(&mut r, -3.0, 3.0);
            let eps = 1e-5;
            let fd = (h.eval_value(x + eps) - h.eval_value(x - eps)) / C64::new(2.0 * eps, 0.0);
            let exact = h.eval(x, 1).unwrap();
            let gf = g.eval(f.eval_value(x).re, 1).unwrap() * f.eval(x, 1).unwrap();
            let scale = exact.norm().max(1.0);
            assert!((exact - fd).norm() <= 1e-6 * scale, "{exact} vs fd {fd}");
            assert!((exact - gf).norm() <= 1e-8 * scale, "{exact} vs chain {gf}");
        }
    }

    #[test]
    fn composition_rejects_bad_targets() {
        let f = sym_pole_pair();
        // g not vanishing near a0 = 0
        let g = SmoothFunction::plateau(-0.1, 0.1, 0.05);
        assert!(matches!(
            compose_smooth(&g, &f, 4),
            Err(Error::CompositionSupport { .. })
        ));
        // f not real
        let fi = EFunction::omega(C64::new(0.0, 1.0)).unwrap();
        let g2 = SmoothFunction::plateau(0.9, 1.1, 0.05);
        assert!(matches!(
            compose_smooth(&g2, &fi, 4),
            Err(Error::NotRealValued)
        ));
    }

    /// f = omega_i + omega_{-i} = 2x/(x^2+1)... expanded in the pole family:
    /// 1/(i-x) + 1/(-i-x) = -2x/(x^2+1). Use the negated pair for +2x/(x^2+1).
    fn sym_pole_pair() -> EFunction {
        EFunction::new(
            C64::new(0.0, 0.0),
            vec![
                PoleTerm {
                    coeff: C64::new(-1.0, 0.0),
                    zeta: C64::new(0.0, 1.0),
                    order: 1,
                },
                PoleTerm {
                    coeff: C64::new(-1.0, 0.0),
                    zeta: C64::new(0.0, -1.0),
                    order: 1,
                },
            ],
            SmoothFunction::zero(),
        )
        .unwrap()
    }
}
