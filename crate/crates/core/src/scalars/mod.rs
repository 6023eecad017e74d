//! Exact coefficient arithmetic.
//!
//! Two coefficient rings are used throughout the engine: plain rationals for
//! numeric codifferentials, and rational functions in named parameters for
//! deformations and symbolic matrix display. Both implement [`Scalar`], so the
//! coderivation algebra and the linear algebra are written once.

mod parse;
mod poly;
mod ratfun;
mod rational;

use std::fmt;

use thiserror::Error;

pub use parse::{parse_rational_expr, parse_scalar, ScalarParser};
pub use poly::{Monomial, ParamPoly, Params};
pub use ratfun::RatFun;
pub use rational::{format_rational, int, parse_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("denominator vanishes at the given point")]
    Pole,
    #[error("no binding for parameter `{0}`")]
    MissingBinding(String),
    #[error("parameter lists differ: [{left}] vs [{right}]")]
    ParamMismatch { left: String, right: String },
    #[error("duplicate parameter name `{0}`")]
    DuplicateParam(String),
    #[error("value is not a rational constant: {0}")]
    NotConstant(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// A coefficient field with exact arithmetic.
///
/// `inv` returns `None` exactly for zero. Equality is semantic: two rational
/// functions compare equal when their cross-multiplied difference vanishes.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: Rational) -> Self;
    /// The value as a rational constant, if it is one.
    fn to_rational(&self) -> Option<Rational>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    fn scale(&self, r: &Rational) -> Self {
        self.mul(&Self::from_rational(r.clone()))
    }

    fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|r| r == int(1))
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            None
        } else {
            Some(num_traits::Inv::inv(self))
        }
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}
