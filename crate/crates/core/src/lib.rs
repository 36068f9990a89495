//! q-analogue Euler-Barnes numbers, polynomials and zeta functions.
//!
//! The crate evaluates the q-Euler (Frobenius-Euler) numbers and polynomials
//! of arbitrary order, the q-Hurwitz, q-Riemann and Barnes-type multiple
//! q-zeta functions, character-twisted q-Euler numbers and the q-l-function.
//! Closed forms are evaluated exactly over the rationals whenever `q` and `u`
//! are rational; every infinite series is summed in floating arithmetic with
//! a rigorous geometric tail bound.
//!
//! | module | contents |
//! |--------|----------|
//! | [`qcore`] | scalars, contexts, the q-bracket, certified summation |
//! | [`classical`] | Bernoulli, Euler and Frobenius-Euler numbers |
//! | [`qeuler`] | q-Euler numbers/polynomials, characters, EGF oracles |
//! | [`zeta`] | q-zeta evaluators and their special values |
//! | [`cli`] | the `qzeta` command-line front end and verification suites |

pub mod classical;
pub mod cli;
pub mod error;
pub mod qcore;
pub mod qeuler;
pub mod zeta;

pub use error::{QError, Result};
pub use qcore::{q_bracket, CertifiedValue, ExactScalar, Mode, QContext, Scalar, TailPolicy};
