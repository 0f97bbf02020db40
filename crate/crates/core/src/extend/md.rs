//! Multivariable extensions of finite sums of tensor products. Each variable
//! lives in exactly one factor, so the mixed dbar derivative
//! dbar_1 ... dbar_m factorizes as the product of the one-variable dbar's.

use super::ext1d::Extension1D;
use crate::funcs::TensorFunction;
use crate::{C64, Result};

pub struct ExtensionMD {
    pub arity: usize,
    pub terms: Vec<(C64, Vec<Extension1D>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdMethod {
    Fourier,
    Taylor,
}

pub fn extend_md(f: &TensorFunction, method: MdMethod) -> Result<ExtensionMD> {
    let mut terms = Vec::with_capacity(f.terms.len());
    for t in &f.terms {
        // a term with an empty-support factor is identically zero
        if t.factors.iter().any(|f| f.support().is_empty()) {
            continue;
        }
        let mut exts = Vec::with_capacity(t.factors.len());
        for factor in &t.factors {
            let ext = match method {
                MdMethod::Fourier => super::ext1d::extend_fourier(factor, None)?,
                MdMethod::Taylor => super::ext1d::extend_taylor_default(factor)?,
            };
            exts.push(ext);
        }
        terms.push((t.weight, exts));
    }
    Ok(ExtensionMD {
        arity: f.arity,
        terms,
    })
}

impl ExtensionMD {
    pub fn value(&self, z: &[C64]) -> C64 {
        debug_assert_eq!(z.len(), self.arity);
        let mut acc = C64::new(0.0, 0.0);
        for (w, exts) in &self.terms {
            let mut prod = *w;
            for (e, &zj) in exts.iter().zip(z) {
                prod *= e.value(zj);
                if prod == C64::new(0.0, 0.0) {
                    break;
                }
            }
            acc += prod;
        }
        acc
    }

    /// Mixed derivative dbar_{z_1} ... dbar_{z_m} f~ — the product of the
    /// factor dbar's, term by term.
    pub fn mixed_dbar(&self, z: &[C64]) -> C64 {
        debug_assert_eq!(z.len(), self.arity);
        let mut acc = C64::new(0.0, 0.0);
        for (w, exts) in &self.terms {
            let mut prod = *w;
            for (e, &zj) in exts.iter().zip(z) {
                prod *= e.dbar(zj);
                if prod == C64::new(0.0, 0.0) {
                    break;
                }
            }
            acc += prod;
        }
        acc
    }

    /// Scalar dbar field of variable `var` within term `term`.
    pub fn factor_dbar(&self, term: usize, var: usize, z: C64) -> C64 {
        self.terms[term].1[var].dbar(z)
    }
}
