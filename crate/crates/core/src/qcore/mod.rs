//! Scalar kernels: the q-bracket, exact q-powers, geometric sums and the
//! certified summation engine shared by every series in the crate.

mod certified;
mod context;
mod scalar;
pub(crate) mod series;

pub use certified::{format_bound, CertifiedValue};
pub use context::{Mode, QContext, TailPolicy, DEFAULT_PRECISION_BITS, TERM_CAP};
pub use scalar::{ApproxScalar, ExactScalar, Scalar, GUARD_BITS, MIN_PRECISION_BITS};

use crate::error::{QError, Result};

/// `[x]_q = (1 - q^x) / (1 - q)`.
///
/// Exact in exact mode, where `q^x` must be rational (integer exponent after
/// simplification against the context's stored q-power).
pub fn q_bracket(x: &Scalar, ctx: &QContext) -> Result<Scalar> {
    if ctx.mode() == Mode::Exact && !x.is_exact() {
        return Err(QError::domain("q-bracket argument must be rational in exact mode"));
    }
    let x = ctx.lift(x);
    let one = Scalar::one();
    let qx = ctx.qpow(&x).map_err(|e| match e {
        QError::NonRepresentable(_) => QError::domain(format!(
            "[x]_q with x = {x} is irrational in exact mode; use certified mode"
        )),
        other => other,
    })?;
    (&one - &qx).checked_div(&(&one - ctx.q()))
}

/// Exact `q^x` for rational `q` in (0,1).
///
/// Only integer exponents are representable; fractional exponents must be
/// simplified by the caller (for example `(q^d)^(a/d)` to `q^a`) before
/// reaching here.
pub fn qpow_exact(q: &ExactScalar, x: &ExactScalar) -> Result<ExactScalar> {
    if q.signum() <= 0 || *q >= ExactScalar::one() {
        return Err(QError::domain("q must satisfy 0<q<1 in exact mode"));
    }
    match x.to_i64() {
        Some(k) => q.pow(k),
        None => Err(QError::NonRepresentable(format!("q^({x}) is not rational for q = {q}"))),
    }
}

/// `a / (1 - ratio)`, the value of `sum_{m>=0} a * ratio^m`.
pub fn geometric_sum(a: &Scalar, ratio: &Scalar) -> Result<Scalar> {
    let below_one = match ratio {
        Scalar::Exact(r) => r.abs() < ExactScalar::one(),
        Scalar::Approx(r) => r.abs_upper() < 1.0,
    };
    if !below_one {
        return Err(QError::domain(format!(
            "geometric ratio must satisfy |ratio|<1, got {ratio}"
        )));
    }
    a.checked_div(&(&Scalar::one() - ratio))
}

/// Upper bound `first / (1 - ratio)` for a tail dominated by a geometric
/// series with first omitted term of modulus `first_omitted_magnitude`.
pub fn tail_bound_geometric(first_omitted_magnitude: f64, ratio_magnitude: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&ratio_magnitude) {
        return Err(QError::domain(format!(
            "tail ratio must lie in [0,1), got {ratio_magnitude}"
        )));
    }
    if first_omitted_magnitude < 0.0 || first_omitted_magnitude.is_nan() {
        return Err(QError::domain("first omitted magnitude must be nonnegative"));
    }
    if first_omitted_magnitude == 0.0 {
        return Ok(0.0);
    }
    Ok(first_omitted_magnitude / (1.0 - ratio_magnitude))
}
