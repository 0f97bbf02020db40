//! Finite sums of tensor products of one-variable test functions. The
//! multivariable calculus is defined on these; density makes the restriction
//! lossless for testing purposes.

use super::smooth::{SmoothFunction, Support};
use crate::jsonfmt::complex_pair;
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorTerm {
    #[serde(with = "complex_pair")]
    pub weight: C64,
    pub factors: Vec<SmoothFunction>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TensorFunction {
    pub arity: usize,
    pub terms: Vec<TensorTerm>,
}

impl TensorFunction {
    /// Single tensor product of m factors with unit weight.
    pub fn product(factors: Vec<SmoothFunction>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("tensor function", "arity must be >= 1"));
        }
        Ok(TensorFunction {
            arity: factors.len(),
            terms: vec![TensorTerm {
                weight: C64::new(1.0, 0.0),
                factors,
            }],
        })
    }

    pub fn new(arity: usize, terms: Vec<TensorTerm>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::invalid("tensor function", "arity must be >= 1"));
        }
        if terms.iter().any(|t| t.factors.len() != arity) {
            return Err(Error::invalid(
                "tensor function",
                "every term must have one factor per variable",
            ));
        }
        Ok(TensorFunction { arity, terms })
    }

    pub fn add(&self, other: &TensorFunction) -> Result<TensorFunction> {
        if self.arity != other.arity {
            return Err(Error::DimensionMismatch);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TensorFunction::new(self.arity, terms)
    }

    pub fn eval(&self, x: &[f64]) -> Result<C64> {
        if x.len() != self.arity {
            return Err(Error::DimensionMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            let mut prod = t.weight;
            for (f, &xi) in t.factors.iter().zip(x) {
                prod *= f.eval(xi, 0)?;
            }
            acc += prod;
        }
        Ok(acc)
    }

    /// Per-variable support hull across all terms.
    pub fn support_hull(&self, var: usize) -> Option<(f64, f64)> {
        let mut acc = Support::empty();
        for t in &self.terms {
            acc = acc.union(&t.factors[var].support());
        }
        acc.hull()
    }

    /// Restriction to the diagonal x1 = x2 (arity 2), as a one-variable
    /// function: sum_t w_t f_{t,1} * f_{t,2}.
    pub fn diagonal_restriction(&self) -> Result<SmoothFunction> {
        if self.arity != 2 {
            return Err(Error::DimensionMismatch);
        }
        Ok(SmoothFunction::sum(
            self.terms
                .iter()
                .map(|t| {
                    SmoothFunction::scale(
                        t.weight,
                        SmoothFunction::multiply(t.factors[0].clone(), t.factors[1].clone()),
                    )
                })
                .collect(),
        ))
    }
}
