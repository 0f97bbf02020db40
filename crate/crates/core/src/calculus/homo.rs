//! Recovering a generator from an abstract functional-calculus
//! homomorphism. Any multiplicative map Op from the pole algebra into the
//! matrices with Op(omega_z) nonsingular determines an operator
//!
//! ```text
//! P = Op(x omega_z) Op(omega_z)^{-1},      x omega_z = -1 + z omega_z,
//! ```
//!
//! independent of the choice of z off the axis, and then Op(f) = f(P) on the
//! whole algebra.

use super::{apply_e, ApplyOptions, EPath};
use crate::funcs::{EFunction, PoleTerm, SmoothFunction};
use crate::linop::{identity, norm2, Operator};
use crate::rng;
use crate::{C64, CMatrix, Error, Result};

pub struct CalculusHomomorphism<'a> {
    op: Box<dyn Fn(&EFunction) -> Result<CMatrix> + 'a>,
    pub provenance: String,
    dim: usize,
}

#[derive(Debug, Clone)]
pub struct RegistrationReport {
    /// worst multiplicativity defect over the random pairs
    pub multiplicativity: f64,
    /// smallest singular value of Op(omega_i), scaled
    pub omega_regularity: f64,
}

impl<'a> CalculusHomomorphism<'a> {
    pub fn new(
        dim: usize,
        provenance: impl Into<String>,
        op: impl Fn(&EFunction) -> Result<CMatrix> + 'a,
    ) -> Self {
        CalculusHomomorphism {
            op: Box::new(op),
            provenance: provenance.into(),
            dim,
        }
    }

    /// Built from an operator through the exact pole-calculus path.
    pub fn from_operator_exact(p: &'a Operator) -> Self {
        Self::new(p.dim(), "operator/exact", move |f| {
            Ok(apply_e(f, p, EPath::Exact, &ApplyOptions::default())?.value)
        })
    }

    /// Built from an operator through the Cauchy-Green integral path.
    pub fn from_operator_integral(p: &'a Operator) -> Self {
        Self::new(p.dim(), "operator/integral", move |f| {
            Ok(apply_e(f, p, EPath::Integral, &ApplyOptions::default())?.value)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, f: &EFunction) -> Result<CMatrix> {
        let m = (self.op)(f)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch);
        }
        Ok(m)
    }

    /// Registration checks: multiplicativity on 5 seeded random pairs and
    /// nonsingularity of Op(omega_i).
    pub fn validate(&self, seed: u64, tol: f64) -> Result<RegistrationReport> {
        let mut r = rng::substream(seed, "homomorphism-registration");
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let f1 = random_efunction(&mut r);
            let f2 = random_efunction(&mut r);
            let lhs = self.apply(&f1.multiply(&f2))?;
            let rhs = self.apply(&f1)? * self.apply(&f2)?;
            let scale = norm2(&rhs).max(1.0);
            worst = worst.max(norm2(&(&lhs - &rhs)) / scale);
        }
        if worst > tol {
            return Err(Error::invalid(
                "homomorphism",
                format!("multiplicativity defect {worst:.3e} exceeds {tol:.3e}"),
            ));
        }
        let zi = C64::new(0.0, 1.0);
        let om = self.apply(&EFunction::omega(zi)?)?;
        let sv = om.clone().svd(false, false);
        let smin = sv.singular_values.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if smin <= 1e-12 {
            return Err(Error::HomomorphismSingular { z: zi });
        }
        Ok(RegistrationReport {
            multiplicativity: worst,
            omega_regularity: smin,
        })
    }

    /// P = Op(x omega_z) Op(omega_z)^{-1}.
    pub fn recover(&self, z: C64) -> Result<CMatrix> {
        if z.im == 0.0 {
            return Err(Error::PoleOnRealAxis { im: 0.0 });
        }
        let om = self.apply(&EFunction::omega(z)?)?;
        let xom = self.apply(&EFunction::x_omega(z)?)?;
        let inv = om
            .clone()
            .lu()
            .solve(&identity(self.dim))
            .ok_or(Error::HomomorphismSingular { z })?;
        Ok(xom * inv)
    }

    /// Recover at two distinct points and verify the z-independence of the
    /// result. Returns the first recovery.
    pub fn recover_checked(&self, z1: C64, z2: C64, tol: f64) -> Result<CMatrix> {
        let p1 = self.recover(z1)?;
        let p2 = self.recover(z2)?;
        let diff = norm2(&(&p1 - &p2));
        if diff > tol {
            return Err(Error::ZDependence { diff, tol });
        }
        Ok(p1)
    }
}

fn random_efunction(r: &mut rng::ChaCha8Rng) -> EFunction {
    let poles = (0..2)
        .map(|_| PoleTerm {
            coeff: C64::new(rng::uniform_in(r, -1.0, 1.0), rng::uniform_in(r, -1.0, 1.0)),
            zeta: C64::new(
                rng::uniform_in(r, -1.0, 1.0),
                rng::uniform_in(r, 0.5, 2.0) * if rng::uniform_in(r, 0.0, 1.0) < 0.5 { -1.0 } else { 1.0 },
            ),
            order: 1,
        })
        .collect();
    EFunction::new(
        C64::new(rng::uniform_in(r, -1.0, 1.0), 0.0),
        poles,
        SmoothFunction::zero(),
    )
    .expect("poles stay off the axis")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_recovery_is_algebraic() {
        let p = Operator::diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let h = CalculusHomomorphism::from_operator_exact(&p);
        h.validate(7, 1e-10).unwrap();
        let rec = h.recover(C64::new(0.0, 1.0)).unwrap();
        assert!(norm2(&(&rec - p.matrix())) <= 1e-10);
    }

    #[test]
    fn z_independence_exact() {
        let mut r = rng::seeded(51);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 3, 1.5)).unwrap();
        let h = CalculusHomomorphism::from_operator_exact(&p);
        let rec = h
            .recover_checked(C64::new(0.0, 1.0), C64::new(2.0, 3.0), 1e-8)
            .unwrap();
        assert!(norm2(&(&rec - p.matrix())) <= 1e-10);
    }

    #[test]
    fn degenerate_homomorphism_rejected() {
        let zero = CalculusHomomorphism::new(2, "zero map", |_f| Ok(CMatrix::zeros(2, 2)));
        assert!(zero.validate(1, 1e-8).is_err());
    }
}
