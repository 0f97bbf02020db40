//! The composition law g(f(P)) = (g o f)(P) for f in the pole algebra
//! (real-valued on the axis) and compactly supported smooth g vanishing
//! near f's value at infinity. Both sides are computed and returned: the
//! left through f(P) as a new operator, the right through the tabulated
//! composite.

use super::{apply_e, apply_single, ApplyOptions, EPath};
use crate::funcs::{compose_smooth, EFunction, SmoothFunction};
use crate::linop::Operator;
use crate::{CMatrix, Error, Result};

#[derive(Debug, Clone)]
pub struct CompositionPair {
    /// g applied to the operator f(P)
    pub outer_of_inner: CMatrix,
    /// the composite g o f applied to P
    pub composite: CMatrix,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

pub fn compose_calculus(
    g: &SmoothFunction,
    f: &EFunction,
    p: &Operator,
    opts: &ApplyOptions,
) -> Result<CompositionPair> {
    if !f.is_real_valued() {
        return Err(Error::NotRealValued);
    }
    // left side: f(P) through the exact pole path, certified, then g of it
    let fp = apply_e(f, p, EPath::Exact, opts)?;
    let fp_op = Operator::new(fp.value)?;
    fp_op.assert_real_spectrum()?;
    let lhs = apply_single(g, &fp_op, opts)?;
    // right side: the tabulated composite applied to P
    let h = compose_smooth(g, f, 8)?;
    let rhs = apply_single(&h, p, opts)?;
    Ok(CompositionPair {
        outer_of_inner: lhs.value,
        composite: rhs.value,
        lhs_error: lhs.error_estimate + fp.error_estimate,
        rhs_error: rhs.error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::PoleTerm;
    use crate::linop::norm2;
    use crate::rng;
    use crate::C64;

    /// f(x) = 2x/(x^2+1) in the pole family, real on the axis, a0 = 0.
    fn mobius_pair() -> EFunction {
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

    #[test]
    fn zero_outer_gives_zero_pair() {
        let p = Operator::from_real(&[&[0.5, 0.0], &[0.0, -0.25]]).unwrap();
        let g = SmoothFunction::zero();
        let pair = compose_calculus(&g, &mobius_pair(), &p, &ApplyOptions::default()).unwrap();
        assert_eq!(norm2(&pair.outer_of_inner), 0.0);
        assert_eq!(norm2(&pair.composite), 0.0);
    }

    #[test]
    fn matches_eigen_oracle_on_symmetric() {
        let mut r = rng::seeded(61);
        let p = Operator::new(rng::symmetric_gaussian(&mut r, 4, 1.5)).unwrap();
        let f = mobius_pair();
        let g = SmoothFunction::standard_bump(0.6, 0.35);
        let pair = compose_calculus(&g, &f, &p, &ApplyOptions::default()).unwrap();
        let oracle = p
            .eigen_oracle(
                &|x| {
                    let fx = f.eval_value(x).re;
                    g.eval_value(fx)
                },
                1e6,
            )
            .unwrap();
        let dl = norm2(&(&pair.outer_of_inner - &oracle));
        let dr = norm2(&(&pair.composite - &oracle));
        let dd = norm2(&(&pair.outer_of_inner - &pair.composite));
        assert!(dl <= 1e-5, "lhs vs oracle {dl:.3e}");
        assert!(dr <= 1e-5, "rhs vs oracle {dr:.3e}");
        assert!(dd <= 1e-4, "lhs vs rhs {dd:.3e}");
    }

    #[test]
    fn rejects_non_vanishing_target() {
        let p = Operator::from_real(&[&[0.0]]).unwrap();
        let g = SmoothFunction::plateau(-0.2, 0.2, 0.1); // covers a0 = 0
        assert!(matches!(
            compose_calculus(&g, &mobius_pair(), &p, &ApplyOptions::default()),
            Err(Error::CompositionSupport { .. })
        ));
    }
}
