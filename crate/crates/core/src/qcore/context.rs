use rug::ops::Pow;
use rug::{Complex, Float};

use super::scalar::{ApproxScalar, ExactScalar, Scalar, GUARD_BITS, MIN_PRECISION_BITS};
use crate::error::{QError, Result};

/// Default precision tag, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Hard cap on the number of terms any certified summation may use.
pub const TERM_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Rational q, u and integer q-power exponents; closed forms are exact.
    Exact,
    /// Floating evaluation with guard bits and rigorous truncation bounds.
    Certified,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Certified => "certified",
        }
    }
}

/// How far a certified summation runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailPolicy {
    /// Sum until the certified tail is at most this value.
    TargetBound(f64),
    /// Sum exactly this many terms and report whatever bound results.
    FixedTerms(u64),
}

impl TailPolicy {
    /// `2^-(precision_bits/2)`.
    pub fn default_for(precision_bits: u32) -> Self {
        TailPolicy::TargetBound(2f64.powi(-((precision_bits / 2) as i32)))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TailPolicy::TargetBound(b) if !(b > 0.0 && b.is_finite()) => Err(QError::domain(format!(
                "target bound must be a positive finite number, got {b}"
            ))),
            TailPolicy::FixedTerms(0) => Err(QError::domain("fixed term count must be positive")),
            TailPolicy::FixedTerms(n) if n > TERM_CAP => Err(QError::domain(format!(
                "fixed term count {n} exceeds the cap of {TERM_CAP}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Parameter bundle threaded through every evaluation.
///
/// In exact mode the deformation parameter is stored as `q_base^q_scale` so
/// that `(q^d)^(a/d)` can be simplified to `q^a` before any power is taken.
#[derive(Clone, Debug)]
pub struct QContext {
    q_base: Scalar,
    q_scale: u32,
    q: Scalar,
    u: Scalar,
    mode: Mode,
    precision_bits: u32,
    truncation: TailPolicy,
}

impl QContext {
    pub fn exact(q: ExactScalar, u: ExactScalar) -> Result<Self> {
        if q.signum() <= 0 || q >= ExactScalar::one() {
            return Err(QError::domain("q must satisfy 0<q<1 in exact mode"));
        }
        if u.abs() >= ExactScalar::one() {
            return Err(QError::domain("u must satisfy |u|<1"));
        }
        Ok(QContext {
            q_base: Scalar::Exact(q.clone()),
            q_scale: 1,
            q: Scalar::Exact(q),
            u: Scalar::Exact(u),
            mode: Mode::Exact,
            precision_bits: DEFAULT_PRECISION_BITS,
            truncation: TailPolicy::default_for(DEFAULT_PRECISION_BITS),
        })
    }

    /// Certified-approx context; `q` and `u` may be complex.
    pub fn certified(q: Scalar, u: Scalar, precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(QError::domain(format!(
                "precision_bits must be at least {MIN_PRECISION_BITS}"
            )));
        }
        let q = Scalar::Approx(q.to_approx(precision_bits));
        let u = Scalar::Approx(u.to_approx(precision_bits));
        let work = precision_bits + GUARD_BITS;
        let q_abs = Float::with_val(work, q.as_approx().unwrap().value().abs_ref());
        if q_abs.is_zero() || q_abs >= 1 {
            return Err(QError::domain("q must satisfy 0<|q|<1"));
        }
        let u_abs = Float::with_val(work, u.as_approx().unwrap().value().abs_ref());
        if u_abs >= 1 {
            return Err(QError::domain("u must satisfy |u|<1"));
        }
        Ok(QContext {
            q_base: q.clone(),
            q_scale: 1,
            q,
            u,
            mode: Mode::Certified,
            precision_bits,
            truncation: TailPolicy::default_for(precision_bits),
        })
    }

    /// Builds a context in the requested mode from parsed scalars.
    pub fn new(q: Scalar, u: Scalar, mode: Mode, precision_bits: u32) -> Result<Self> {
        match mode {
            Mode::Exact => {
                let (Scalar::Exact(q), Scalar::Exact(u)) = (q, u) else {
                    return Err(QError::domain("exact mode requires rational q and u"));
                };
                QContext::exact(q, u)?.with_precision(precision_bits)
            }
            Mode::Certified => QContext::certified(q, u, precision_bits),
        }
    }

    /// Changes the precision used by series evaluation (and, in certified
    /// mode, by every operation). Resets the tail policy to the default for
    /// the new precision.
    pub fn with_precision(&self, precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(QError::domain(format!(
                "precision_bits must be at least {MIN_PRECISION_BITS}"
            )));
        }
        match self.mode {
            Mode::Exact => {
                let mut ctx = self.clone();
                ctx.precision_bits = precision_bits;
                ctx.truncation = TailPolicy::default_for(precision_bits);
                Ok(ctx)
            }
            Mode::Certified => QContext::certified(self.q.clone(), self.u.clone(), precision_bits),
        }
    }

    pub fn with_policy(&self, policy: TailPolicy) -> Result<Self> {
        policy.validate()?;
        let mut ctx = self.clone();
        ctx.truncation = policy;
        Ok(ctx)
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn u(&self) -> &Scalar {
        &self.u
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn working_bits(&self) -> u32 {
        self.precision_bits + GUARD_BITS
    }

    pub fn truncation(&self) -> TailPolicy {
        self.truncation
    }

    /// Brings a caller-supplied scalar into this context's field.
    pub fn lift(&self, x: &Scalar) -> Scalar {
        match self.mode {
            Mode::Exact => x.clone(),
            Mode::Certified => Scalar::Approx(x.to_approx(self.precision_bits)),
        }
    }

    /// The same parameters evaluated in certified-approx mode.
    pub fn to_certified(&self) -> Result<Self> {
        let ctx = QContext::certified(self.q.clone(), self.u.clone(), self.precision_bits)?;
        ctx.with_policy(self.truncation)
    }

    /// `q^k` for an integer `k`.
    pub fn qpow_int(&self, k: i64) -> Result<Scalar> {
        let scale = i64::from(self.q_scale);
        self.q_base.powi(k * scale)
    }

    /// `q^x`. Exact mode simplifies the exponent against the stored
    /// `q_base^q_scale` form first and fails if the result is still
    /// fractional; certified mode uses the principal branch.
    pub fn qpow(&self, x: &Scalar) -> Result<Scalar> {
        match self.mode {
            Mode::Exact => {
                let Scalar::Exact(x) = x else {
                    return Err(QError::NonRepresentable(
                        "complex q-power exponent in exact mode".into(),
                    ));
                };
                let e = x * &ExactScalar::integer(i64::from(self.q_scale));
                let Scalar::Exact(base) = &self.q_base else {
                    unreachable!("exact context stores an exact q")
                };
                super::qpow_exact(base, &e).map(Scalar::Exact)
            }
            Mode::Certified => {
                if let Some(k) = x.as_exact().and_then(ExactScalar::to_i64) {
                    return self.qpow_int(k);
                }
                let work = self.working_bits();
                let q = self.q.to_complex(work);
                let x = x.to_complex(work);
                let z = Complex::with_val(work, (&q).pow(&x));
                Ok(Scalar::Approx(ApproxScalar::from_complex(z, self.precision_bits)))
            }
        }
    }

    /// The context with `q` replaced by `q^d`.
    pub fn with_q_power(&self, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(QError::domain("q-power multiplier must be positive"));
        }
        let mut ctx = self.clone();
        match self.mode {
            Mode::Exact => {
                ctx.q_scale = self.q_scale * d;
                ctx.q = self.q.powi(i64::from(d))?;
            }
            Mode::Certified => {
                ctx.q = self.q.powi(i64::from(d))?;
                ctx.q_base = ctx.q.clone();
                ctx.q_scale = 1;
            }
        }
        Ok(ctx)
    }

    /// The context with `u` replaced (validated against |u|<1).
    pub fn with_u(&self, u: Scalar) -> Result<Self> {
        if u.abs_lower() >= 1.0 {
            return Err(QError::domain("u must satisfy |u|<1"));
        }
        if let (Mode::Exact, Some(e)) = (self.mode, u.as_exact()) {
            if e.abs() >= ExactScalar::one() {
                return Err(QError::domain("u must satisfy |u|<1"));
            }
        }
        let mut ctx = self.clone();
        ctx.u = self.lift(&u);
        if self.mode == Mode::Exact && !ctx.u.is_exact() {
            return Err(QError::domain("exact mode requires a rational u"));
        }
        Ok(ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactScalar {
        ExactScalar::new(n, d).unwrap()
    }

    #[test]
    fn exact_context_validates_q_and_u() {
        assert!(QContext::exact(r(1, 2), r(1, 3)).is_ok());
        let err = QContext::exact(r(3, 2), r(1, 3)).unwrap_err();
        assert_eq!(err, QError::Domain("q must satisfy 0<q<1 in exact mode".into()));
        assert!(QContext::exact(r(0, 1), r(1, 3)).is_err());
        assert!(QContext::exact(r(1, 2), r(-1, 1)).is_err());
        assert!(QContext::exact(r(1, 2), r(0, 1)).is_ok());
    }

    #[test]
    fn certified_context_accepts_complex_parameters() {
        let q = Scalar::parse("0.3+0.4i", 64).unwrap();
        let u = Scalar::parse("-0.5i", 64).unwrap();
        let ctx = QContext::certified(q, u, 64).unwrap();
        assert_eq!(ctx.mode(), Mode::Certified);
        let q = Scalar::parse("0.6+0.8i", 64).unwrap();
        assert!(QContext::certified(q, Scalar::zero(), 64).is_err());
        assert!(QContext::certified(Scalar::zero(), Scalar::zero(), 64).is_err());
    }

    #[test]
    fn q_power_rescaling_simplifies_exponents() {
        let ctx = QContext::exact(r(1, 2), r(1, 3)).unwrap();
        let ctx3 = ctx.with_q_power(3).unwrap();
        assert_eq!(ctx3.q(), &Scalar::ratio(1, 8).unwrap());
        // (q^3)^(2/3) = q^2
        let v = ctx3.qpow(&Scalar::ratio(2, 3).unwrap()).unwrap();
        assert_eq!(v, Scalar::ratio(1, 4).unwrap());
        assert!(matches!(
            ctx.qpow(&Scalar::ratio(1, 2).unwrap()),
            Err(QError::NonRepresentable(_))
        ));
    }

    #[test]
    fn policy_validation() {
        assert!(TailPolicy::TargetBound(0.0).validate().is_err());
        assert!(TailPolicy::FixedTerms(0).validate().is_err());
        assert!(TailPolicy::FixedTerms(TERM_CAP + 1).validate().is_err());
        assert_eq!(TailPolicy::default_for(128), TailPolicy::TargetBound(2f64.powi(-64)));
    }
}
