//! Coefficient field `Q(x1..xn)` with its commuting derivations.

mod gcd;
mod poly;
mod ratfun;

use thiserror::Error;

pub use gcd::gcd;
pub use poly::{Monomial, MultiPoly, MAX_VARS};
pub use ratfun::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
}
