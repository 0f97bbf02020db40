//! Dense complex matrices as the operators of the calculus: resolvents,
//! spectra via Schur, real-spectrum certificates, temperate-growth profiles
//! for the resolvent, commutation tests, joint spectra of commuting tuples,
//! the Cayley transform, and the diagonalization oracle used as independent
//! ground truth.

use crate::rng;
use crate::{C64, CMatrix, Error, Result};
use std::sync::OnceLock;

/// Operator 2-norm (largest singular value).
pub fn norm2(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

#[derive(Debug, Clone)]
pub struct RealSpectrumCertificate {
    pub eigenvalues: Vec<f64>,
    pub max_imag: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct GrowthProfile {
    /// bound ||(x+iy - P)^{-1}|| <= c |y|^{-n} on the probe box
    pub c: f64,
    pub n: f64,
    pub fit_residual: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl GrowthProfile {
    pub fn bound(&self, y: f64) -> f64 {
        self.c * y.abs().powf(-self.n)
    }
}

struct EigenDecomp {
    vectors: CMatrix,
    inverse: CMatrix,
    cond: f64,
}

/// Square complex matrix with its Schur factorization cached at
/// construction. Immutable afterwards; lazy caches are write-once.
pub struct Operator {
    mat: CMatrix,
    schur_q: CMatrix,
    schur_t: CMatrix,
    eigenvalues: Vec<C64>,
    norm: f64,
    eigen: OnceLock<Option<EigenDecomp>>,
    growth: OnceLock<GrowthProfile>,
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.dim())
            .field("norm", &self.norm)
            .field("eigenvalues", &self.eigenvalues)
            .finish()
    }
}

impl Clone for Operator {
    fn clone(&self) -> Self {
        Operator {
            mat: self.mat.clone(),
            schur_q: self.schur_q.clone(),
            schur_t: self.schur_t.clone(),
            eigenvalues: self.eigenvalues.clone(),
            norm: self.norm,
            eigen: OnceLock::new(),
            growth: OnceLock::new(),
        }
    }
}

impl Operator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare);
        }
        if mat.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteMatrix);
        }
        let norm = norm2(&mat);
        let (schur_q, schur_t) = mat.clone().schur().unpack();
        let residual = norm2(&(&schur_q * &schur_t * schur_q.adjoint() - &mat));
        let bound = 1e-12 * norm.max(1e-30);
        if residual > bound {
            return Err(Error::SchurResidual { residual, bound });
        }
        let eigenvalues = (0..mat.nrows()).map(|i| schur_t[(i, i)]).collect();
        Ok(Operator {
            mat,
            schur_q,
            schur_t,
            eigenvalues,
            norm,
            eigen: OnceLock::new(),
            growth: OnceLock::new(),
        })
    }

    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mat = CMatrix::from_fn(n, rows[0].len(), |i, j| C64::new(rows[i][j], 0.0));
        Self::new(mat)
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        let n = entries.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i]
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn spectrum_interval(&self) -> (f64, f64) {
        let lo = self
            .eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .eigenvalues
            .iter()
            .map(|l| l.re)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// (z - P)^{-1} by pivoted LU, with a residual guard.
    pub fn resolvent(&self, z: C64) -> Result<CMatrix> {
        let scale = self.norm.max(1.0);
        let dist = self
            .eigenvalues
            .iter()
            .map(|l| (z - l).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= 1e-12 * scale {
            return Err(Error::SingularResolvent { z, dist });
        }
        let n = self.dim();
        let a = CMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { z } else { C64::new(0.0, 0.0) };
            d - self.mat[(i, j)]
        });
        let lu = a.clone().lu();
        let x = lu
            .solve(&identity(n))
            .ok_or(Error::SingularResolvent { z, dist })?;
        // Frobenius residual bound (upper bounds the 2-norm residual)
        let resid = (&a * &x - identity(n)).norm();
        let bound = 1e-10 * (a.norm() * x.norm()).max(1.0);
        if resid > bound {
            return Err(Error::ResolventResidual {
                residual: resid,
                bound,
            });
        }
        Ok(x)
    }

    /// Certify that the spectrum is real within 1e-9 * max(1, ||P||).
    pub fn assert_real_spectrum(&self) -> Result<RealSpectrumCertificate> {
        let tol = 1e-9 * self.norm.max(1.0);
        let mut max_imag = 0.0f64;
        for l in &self.eigenvalues {
            if l.im.abs() > tol {
                return Err(Error::SpectrumNotReal {
                    eigenvalue: *l,
                    im: l.im.abs(),
                    tol,
                });
            }
            max_imag = max_imag.max(l.im.abs());
        }
        let mut eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|l| l.re).collect();
        eigenvalues.sort_by(f64::total_cmp);
        Ok(RealSpectrumCertificate {
            eigenvalues,
            max_imag,
            tolerance: tol,
        })
    }

    /// Fit ||(x+iy-P)^{-1}|| <= C |y|^{-N} on x covering the spectrum +-1,
    /// y in {2^-1 .. 2^-12}. C is the envelope constant, so every fitted
    /// sample satisfies the bound; the least-squares residual is recorded.
    pub fn fit_growth(&self) -> &GrowthProfile {
        self.growth.get_or_init(|| {
            let (lo, hi) = self.spectrum_interval();
            let profile = fit_growth_on(self, (lo - 1.0, hi + 1.0), 1, 12);
            debug_assert!(profile.c.is_finite());
            profile
        })
    }

    /// Cayley transform B = 1 + 2i (P - i)^{-1}; spectrum moves to the unit
    /// circle and B - 1 is injective.
    pub fn cayley(&self) -> Result<Operator> {
        let i = C64::new(0.0, 1.0);
        let dist = self
            .eigenvalues
            .iter()
            .map(|l| (i - l).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= 1e-12 * self.norm.max(1.0) {
            return Err(Error::SingularResolvent { z: i, dist });
        }
        // (P - i)^{-1} = -(i - P)^{-1}
        let r = self.resolvent(i)?;
        Operator::new(identity(self.dim()) - r * C64::new(0.0, 2.0))
    }

    /// Inverse Cayley transform P = i (B + 1)(B - 1)^{-1}.
    pub fn inverse_cayley(&self) -> Result<Operator> {
        let n = self.dim();
        let bm1 = &self.mat - identity(n);
        let inv = bm1
            .clone()
            .lu()
            .solve(&identity(n))
            .ok_or(Error::SingularMatrix)?;
        let bp1 = &self.mat + identity(n);
        Operator::new(bp1 * inv * C64::new(0.0, 1.0))
    }

    fn eigen(&self) -> Option<&EigenDecomp> {
        self.eigen
            .get_or_init(|| {
                let (v, _lam) = eigenvectors_from_schur(&self.schur_q, &self.schur_t);
                let inv = v.clone().lu().solve(&identity(self.dim()))?;
                let cond = norm2(&v) * norm2(&inv);
                Some(EigenDecomp {
                    vectors: v,
                    inverse: inv,
                    cond,
                })
            })
            .as_ref()
    }

    pub fn eigenvector_condition(&self) -> Option<f64> {
        self.eigen().map(|e| e.cond)
    }

    /// Independent ground truth V f(Lambda) V^{-1} for diagonalizable P with
    /// real spectrum and eigenvector condition below `cond_limit`.
    pub fn eigen_oracle(&self, f: &dyn Fn(f64) -> C64, cond_limit: f64) -> Result<CMatrix> {
        self.assert_real_spectrum()?;
        let e = self.eigen().ok_or(Error::OracleDeclined {
            cond: f64::INFINITY,
            limit: cond_limit,
        })?;
        if e.cond > cond_limit {
            return Err(Error::OracleDeclined {
                cond: e.cond,
                limit: cond_limit,
            });
        }
        let n = self.dim();
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                f(self.eigenvalues[i].re)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(&e.vectors * d * &e.inverse)
    }
}

/// Fit the growth profile on a probe box; exposed for the disjoint-grid
/// invariant check.
pub fn fit_growth_on(p: &Operator, x_range: (f64, f64), k_lo: i32, k_hi: i32) -> GrowthProfile {
    let nx = 9;
    // probe abscissas: a coarse sweep plus the eigenvalue stations, where
    // the resolvent norm actually peaks
    let mut xs: Vec<f64> = (0..nx)
        .map(|i| x_range.0 + (x_range.1 - x_range.0) * i as f64 / (nx - 1) as f64)
        .collect();
    xs.extend(
        p.eigenvalues
            .iter()
            .map(|l| l.re)
            .filter(|x| *x >= x_range.0 && *x <= x_range.1),
    );
    let mut pts = Vec::new();
    let mut samples = Vec::new();
    for k in k_lo..=k_hi {
        let y = 2.0f64.powi(-k);
        let mut sup: f64 = 0.0;
        for &x in &xs {
            let r = p
                .resolvent(C64::new(x, y))
                .expect("probe stays off the spectrum");
            sup = sup.max(norm2(&r));
        }
        pts.push((y.ln(), sup.ln()));
        samples.push((y, sup));
    }
    let slope = crate::extend::least_squares_slope(&pts);
    let n = (-slope).max(0.0);
    let c = samples
        .iter()
        .map(|&(y, s)| s * y.powf(n))
        .fold(0.0f64, f64::max);
    let fit_residual = pts
        .iter()
        .map(|&(ly, ls)| (ls - (c.ln() - n * ly)).abs())
        .fold(0.0f64, f64::max);
    GrowthProfile {
        c,
        n,
        fit_residual,
        x_range,
        y_range: (2.0f64.powi(-k_hi), 2.0f64.powi(-k_lo)),
    }
}

/// Right eigenvectors of P = Q T Q^* by back-substitution on the triangular
/// factor; valid when P is diagonalizable (callers check the conditioning).
fn eigenvectors_from_schur(q: &CMatrix, t: &CMatrix) -> (CMatrix, Vec<C64>) {
    let n = t.nrows();
    let mut y = CMatrix::zeros(n, n);
    let scale = t.iter().fold(0.0f64, |a, c| a.max(c.norm())).max(1.0);
    for i in 0..n {
        let lam = t[(i, i)];
        y[(i, i)] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = C64::new(0.0, 0.0);
            for k in (j + 1)..=i {
                s += t[(j, k)] * y[(k, i)];
            }
            let mut denom = t[(j, j)] - lam;
            if denom.norm() < 1e-300_f64.max(f64::EPSILON * scale) {
                denom = C64::new(f64::EPSILON * scale, 0.0);
            }
            y[(j, i)] = -s / denom;
        }
        let col_norm = (0..n).map(|r| y[(r, i)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            y[(r, i)] /= C64::new(col_norm, 0.0);
        }
    }
    let v = q * &y;
    let lam = (0..n).map(|i| t[(i, i)]).collect();
    (v, lam)
}

/// Tuple of same-dimension operators with real-spectrum certificates.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    ops: Vec<Operator>,
    certificates: Vec<RealSpectrumCertificate>,
}

impl OperatorTuple {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::DimensionMismatch);
        }
        let n = ops[0].dim();
        if ops.iter().any(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch);
        }
        let certificates = ops
            .iter()
            .map(Operator::assert_real_spectrum)
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorTuple { ops, certificates })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn op(&self, j: usize) -> &Operator {
        &self.ops[j]
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn certificates(&self) -> &[RealSpectrumCertificate] {
        &self.certificates
    }

    /// Max pairwise commutator norm, and the commuting test at tolerance
    /// tol * max(1, ||P_i|| ||P_j||).
    pub fn max_commutator(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.ops.len() {
            for j in (i + 1)..self.ops.len() {
                let a = self.ops[i].matrix();
                let b = self.ops[j].matrix();
                let comm = a * b - b * a;
                let scale = (self.ops[i].norm() * self.ops[j].norm()).max(1.0);
                worst = worst.max(norm2(&comm) / scale);
            }
        }
        worst
    }

    pub fn is_commuting(&self, tol: f64) -> bool {
        self.max_commutator() <= tol
    }

    /// Joint spectrum of a commuting tuple: Schur-triangularize a random
    /// generic real linear combination, rotate every operator into that
    /// basis, check triangularity, and read matched diagonal tuples.
    /// Multiplicity is collapsed at tolerance 1e-8.
    pub fn joint_spectrum(&self) -> Result<Vec<Vec<f64>>> {
        const TRI_TOL: f64 = 1e-8;
        if !self.is_commuting(1e-10) {
            return Err(Error::NotCommuting {
                norm: self.max_commutator(),
            });
        }
        let n = self.dim();
        let mut last_residual = f64::INFINITY;
        for attempt in 0..3u32 {
            let mut r = rng::substream(0x6a73, &format!("joint-spectrum-{attempt}"));
            let mut combo = CMatrix::zeros(n, n);
            for p in &self.ops {
                let c = rng::uniform_in(&mut r, 0.25, 1.0)
                    * if rng::uniform_in(&mut r, 0.0, 1.0) < 0.5 {
                        -1.0
                    } else {
                        1.0
                    };
                combo += p.matrix() * C64::new(c, 0.0);
            }
            let (q, _t) = combo.schur().unpack();
            let rotated: Vec<CMatrix> = self
                .ops
                .iter()
                .map(|p| q.adjoint() * p.matrix() * &q)
                .collect();
            let mut residual = 0.0f64;
            for (p, m) in self.ops.iter().zip(&rotated) {
                let scale = p.norm().max(1.0);
                for i in 0..n {
                    for j in 0..i {
                        residual = residual.max(m[(i, j)].norm() / scale);
                    }
                }
            }
            last_residual = residual;
            if residual > TRI_TOL {
                continue;
            }
            let mut tuples: Vec<Vec<f64>> = (0..n)
                .map(|i| rotated.iter().map(|m| m[(i, i)].re).collect())
                .collect();
            tuples.sort_by(|a, b| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| !o.is_eq())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            tuples.dedup_by(|a, b| {
                a.iter()
                    .zip(b.iter())
                    .all(|(x, y)| (x - y).abs() <= TRI_TOL)
            });
            return Ok(tuples);
        }
        Err(Error::JointTriangularization {
            attempts: 3,
            residual: last_residual,
        })
    }

    /// Simultaneous-diagonalization oracle for commuting diagonalizable
    /// tuples: V diag(f(lambda_1i, ..., lambda_mi)) V^{-1}.
    pub fn eigen_oracle(&self, f: &dyn Fn(&[f64]) -> C64, cond_limit: f64) -> Result<CMatrix> {
        if !self.is_commuting(1e-10) {
            return Err(Error::NotCommuting {
                norm: self.max_commutator(),
            });
        }
        let n = self.dim();
        let mut r = rng::substream(0x6a74, "joint-diagonalize");
        let mut combo = CMatrix::zeros(n, n);
        for p in &self.ops {
            combo += p.matrix() * C64::new(rng::uniform_in(&mut r, 0.3, 1.1), 0.0);
        }
        let combo_op = Operator::new(combo)?;
        let e = combo_op.eigen().ok_or(Error::OracleDeclined {
            cond: f64::INFINITY,
            limit: cond_limit,
        })?;
        if e.cond > cond_limit {
            return Err(Error::OracleDeclined {
                cond: e.cond,
                limit: cond_limit,
            });
        }
        // rotate each operator; off-diagonal mass means the combination was
        // degenerate or the tuple not simultaneously diagonalizable
        let mut lambda = vec![vec![0.0f64; self.ops.len()]; n];
        for (j, p) in self.ops.iter().enumerate() {
            let d = &e.inverse * p.matrix() * &e.vectors;
            let scale = p.norm().max(1.0);
            for i in 0..n {
                for k in 0..n {
                    if i != k && d[(i, k)].norm() > 1e-7 * scale * e.cond {
                        return Err(Error::OracleDeclined {
                            cond: e.cond,
                            limit: cond_limit,
                        });
                    }
                }
                lambda[i][j] = d[(i, i)].re;
            }
        }
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                f(&lambda[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(&e.vectors * d * &e.inverse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: &[&[f64]]) -> Operator {
        Operator::from_real(rows).unwrap()
    }

    fn jordan2() -> Operator {
        op(&[&[0.0, 1.0], &[0.0, 0.0]])
    }

    #[test]
    fn resolvent_diagonal_closed_form() {
        let p = op(&[&[0.0, 0.0], &[0.0, 1.0]]);
        let r = p.resolvent(C64::new(0.0, 1.0)).unwrap();
        // (i - diag(0,1))^{-1} = diag(-i, -(1+i)/2)
        assert!((r[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[(1, 1)] - C64::new(-0.5, -0.5)).norm() < 1e-14);
        assert!(r[(0, 1)].norm() < 1e-15 && r[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn resolvent_scalar() {
        let p = op(&[&[0.0]]);
        let r = p.resolvent(C64::new(2.0, 0.0)).unwrap();
        assert!((r[(0, 0)] - C64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn resolvent_identity_check() {
        let mut r = rng::seeded(9);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 5, 2.0)).unwrap();
        let z = C64::new(0.0, 1.0);
        let w = C64::new(2.0, 3.0);
        let rz = p.resolvent(z).unwrap();
        let rw = p.resolvent(w).unwrap();
        let lhs = &rz - &rw;
        let rhs = &rz * &rw * (w - z);
        assert!(norm2(&(lhs - rhs)) <= 1e-10);
    }

    #[test]
    fn resolvent_near_eigenvalue_rejected() {
        let p = op(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            p.resolvent(C64::new(1.0, 0.0)),
            Err(Error::SingularResolvent { .. })
        ));
    }

    #[test]
    fn real_spectrum_certificates() {
        let mut r = rng::seeded(2);
        let sym = Operator::new(rng::symmetric_gaussian(&mut r, 4, 2.0)).unwrap();
        assert!(sym.assert_real_spectrum().is_ok());
        assert!(jordan2().assert_real_spectrum().is_ok());
        let rot = op(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        match rot.assert_real_spectrum() {
            Err(Error::SpectrumNotReal { eigenvalue, .. }) => {
                assert!((eigenvalue.im.abs() - 1.0).abs() < 1e-12)
            }
            other => panic!("expected non-real spectrum, got {other:?}"),
        }
    }

    #[test]
    fn growth_exponents() {
        let mut r = rng::seeded(3);
        let sym = Operator::new(rng::symmetric_gaussian(&mut r, 4, 2.0)).unwrap();
        let g = sym.fit_growth();
        assert!(
            g.n > 0.95 && g.n < 1.05,
            "symmetric growth exponent {}",
            g.n
        );
        let j2 = jordan2();
        let g2 = j2.fit_growth();
        assert!(g2.n > 1.9 && g2.n < 2.1, "jordan exponent {}", g2.n);
        // block diagonal of the two: the worse exponent wins
        let mut m = CMatrix::zeros(6, 6);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = sym.matrix()[(i, j)];
            }
        }
        m[(4, 5)] = C64::new(1.0, 0.0);
        let both = Operator::new(m).unwrap();
        let g3 = both.fit_growth();
        assert!(g3.n > 1.9 && g3.n < 2.1, "combined exponent {}", g3.n);
    }

    #[test]
    fn growth_bound_holds_on_fresh_grid() {
        let mut r = rng::seeded(4);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 5, 2.0)).unwrap();
        let g = p.fit_growth().clone();
        let (lo, hi) = p.spectrum_interval();
        for k in 2..=11 {
            let y = 1.5 * 2.0f64.powi(-k);
            for i in 0..7 {
                let x = lo - 0.8 + (hi - lo + 1.6) * i as f64 / 6.0;
                let nrm = norm2(&p.resolvent(C64::new(x, y)).unwrap());
                assert!(
                    nrm <= 1.05 * g.bound(y),
                    "y={y} x={x}: {nrm} > {}",
                    g.bound(y)
                );
            }
        }
    }

    #[test]
    fn commuting_tests() {
        let mut r = rng::seeded(5);
        let a = rng::symmetric_gaussian(&mut r, 3, 2.0);
        let poly = &a * &a + &a * C64::new(3.0, 0.0);
        let t = OperatorTuple::new(vec![
            Operator::new(a.clone()).unwrap(),
            Operator::new(poly).unwrap(),
        ])
        .unwrap();
        assert!(t.is_commuting(1e-12));

        let t2 = OperatorTuple::new(vec![
            Operator::new(a.clone()).unwrap(),
            Operator::new(identity(3)).unwrap(),
        ])
        .unwrap();
        assert!(t2.is_commuting(1e-14));

        // rotated projector pair does not commute
        let eps = 0.1f64;
        let u = op(&[&[eps.cos(), eps.sin()], &[-eps.sin(), eps.cos()]]);
        let proj = op(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let rotated = u.matrix().transpose() * proj.matrix() * u.matrix();
        let t3 = OperatorTuple::new(vec![proj, Operator::new(rotated).unwrap()]).unwrap();
        assert!(!t3.is_commuting(1e-6));
    }

    #[test]
    fn joint_spectrum_diagonal() {
        let p1 = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let p2 = Operator::diagonal(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]).unwrap();
        let t = OperatorTuple::new(vec![p1, p2]).unwrap();
        let js = t.joint_spectrum().unwrap();
        assert_eq!(js, vec![vec![0.0, 2.0], vec![1.0, 3.0]]);
    }

    #[test]
    fn joint_spectrum_repeated_operator() {
        let a = Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let t = OperatorTuple::new(vec![a.clone(), a]).unwrap();
        let js = t.joint_spectrum().unwrap();
        assert_eq!(js, vec![vec![0.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn joint_spectrum_jordan_identity() {
        let t = OperatorTuple::new(vec![
            jordan2(),
            Operator::new(identity(2)).unwrap(),
        ])
        .unwrap();
        let js = t.joint_spectrum().unwrap();
        assert_eq!(js.len(), 1);
        assert!((js[0][0] - 0.0).abs() < 1e-9 && (js[0][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_mapping_for_polynomial_tuples() {
        let mut r = rng::seeded(6);
        let a = rng::symmetric_gaussian(&mut r, 4, 2.0);
        let p1 = &a * &a;
        let p2 = &a * C64::new(2.0, 0.0) + identity(4) * C64::new(0.5, 0.0);
        let base = Operator::new(a).unwrap();
        let t = OperatorTuple::new(vec![
            Operator::new(p1).unwrap(),
            Operator::new(p2).unwrap(),
        ])
        .unwrap();
        let js = t.joint_spectrum().unwrap();
        let mut expected: Vec<Vec<f64>> = base
            .eigenvalues()
            .iter()
            .map(|l| vec![l.re * l.re, 2.0 * l.re + 0.5])
            .collect();
        expected.sort_by(|x, y| x[0].total_cmp(&y[0]));
        assert_eq!(js.len(), expected.len());
        for (got, want) in js.iter().zip(&expected) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 1e-8, "{g} vs {w}");
            }
        }
    }

    #[test]
    fn cayley_scalar_values() {
        let p = Operator::new(identity(2) * C64::new(2.0, 0.0)).unwrap();
        let b = p.cayley().unwrap();
        // C(2) = (2+i)/(2-i) = (3+4i)/5
        let expect = C64::new(0.6, 0.8);
        assert!((b.matrix()[(0, 0)] - expect).norm() < 1e-14);
        assert!((b.matrix()[(0, 0)].norm() - 1.0).abs() < 1e-14);

        let z = op(&[&[0.0]]);
        let bz = z.cayley().unwrap();
        assert!((bz.matrix()[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cayley_roundtrip_and_unit_spectrum() {
        let mut r = rng::seeded(7);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 2.0)).unwrap();
        let b = p.cayley().unwrap();
        for l in b.eigenvalues() {
            assert!((l.norm() - 1.0).abs() <= 1e-9);
        }
        let back = b.inverse_cayley().unwrap();
        assert!(norm2(&(back.matrix() - p.matrix())) <= 1e-10);
    }

    #[test]
    fn eigen_oracle_cases() {
        // constant 1 -> identity
        let mut r = rng::seeded(8);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 2.0)).unwrap();
        let one = p.eigen_oracle(&|_| C64::new(1.0, 0.0), 1e6).unwrap();
        assert!(norm2(&(one - identity(4))) < 1e-12);

        // plateau selecting one eigenvalue -> spectral projector
        let d = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let proj = d
            .eigen_oracle(&|x| C64::new(if (x - 1.0).abs() < 0.25 { 1.0 } else { 0.0 }, 0.0), 1e6)
            .unwrap();
        let expect = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(norm2(&(proj - expect)) < 1e-13);

        // non-diagonalizable input is declined
        assert!(matches!(
            jordan2().eigen_oracle(&|x| C64::new(x, 0.0), 1e6),
            Err(Error::OracleDeclined { .. })
        ));
    }

    #[test]
    fn tuple_eigen_oracle() {
        let p1 = Operator::diagonal(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let p2 = Operator::diagonal(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]).unwrap();
        let t = OperatorTuple::new(vec![p1, p2]).unwrap();
        let m = t
            .eigen_oracle(&|x: &[f64]| C64::new(x[0] + 10.0 * x[1], 0.0), 1e6)
            .unwrap();
        assert!((m[(0, 0)] - C64::new(20.0, 0.0)).norm() < 1e-10);
        assert!((m[(1, 1)] - C64::new(31.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn schur_residual_bound_up_to_16() {
        let mut r = rng::seeded(10);
        for n in [2usize, 5, 9, 16] {
            let m = rng::gaussian(&mut r, n);
            let p = Operator::new(m).unwrap(); // construction enforces the residual
            assert_eq!(p.dim(), n);
        }
    }

    #[test]
    fn resolvent_residual_up_to_16() {
        let mut r = rng::seeded(11);
        for n in [2usize, 4, 8, 16] {
            let p = Operator::new(rng::symmetric_gaussian(&mut r, n, 2.0)).unwrap();
            for &z in &[C64::new(0.3, 0.01), C64::new(-1.0, 1.0), C64::new(2.0, -0.05)] {
                p.resolvent(z).unwrap();
            }
        }
    }
}
