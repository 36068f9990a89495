//! Certified summation of weighted q-bracket series
//!
//! ```text
//!   sum_{N >= start} C(N + shift, r - 1) * chi(N) * u^N * base(N + x)^(-s)
//! ```
//!
//! where `base` is either the q-bracket `[.]_q` or the plain argument (the
//! q = 1 series). Every zeta-type function and every generating-function
//! coefficient oracle in the crate reduces to this shape.
//!
//! Tail bound: for N >= M the base lies in an annulus `[L, U]` whose edges
//! depend only on |q|^M |q^x|, so `|base^(-s)| <= B`. Consecutive weights
//! grow by at most `(M + shift + 1) / (M + shift + 2 - r)`, so the tail is
//! dominated by a geometric series with ratio `|u|` times that factor.

use std::f64::consts::PI;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};

use super::certified::CertifiedValue;
use super::context::{TailPolicy, TERM_CAP};
use super::scalar::{abs_lower, abs_upper, ApproxScalar, GUARD_BITS};
use super::tail_bound_geometric;
use crate::error::{QError, Result};

/// Relative inflation applied to every f64 bound computation.
const BOUND_SLACK: f64 = 1.0 + 1e-9;

#[derive(Clone, Debug)]
pub(crate) enum Base {
    /// `[N + x]_q`.
    QBracket(Complex),
    /// `N + x` (the q = 1 series); requires real `x > 0`.
    Classical,
}

#[derive(Clone, Debug)]
pub(crate) struct Series {
    pub base: Base,
    pub u: Complex,
    pub s: Complex,
    pub x: Complex,
    pub start: u64,
    pub order: u32,
    pub weight_shift: i64,
    pub twist: Option<Vec<Complex>>,
}

impl Series {
    /// `sum_{N>=0} C(N + r - 1, r - 1) u^N base(N + x)^(-s)`.
    pub fn regrouped(base: Base, u: Complex, s: Complex, x: Complex, order: u32) -> Self {
        Series {
            base,
            u,
            s,
            x,
            start: 0,
            order,
            weight_shift: i64::from(order) - 1,
            twist: None,
        }
    }
}

struct TailModel {
    u_abs: f64,
    sigma: f64,
    tau: f64,
    // q-bracket data
    q_abs: f64,
    qx_abs: f64,
    one_minus_q_lo: f64,
    one_minus_q_hi: f64,
    real_positive: bool,
    // classical data
    x_re: f64,
    classical: bool,
}

impl TailModel {
    fn weight(&self, series: &Series, m: u64) -> f64 {
        if series.order <= 1 {
            return 1.0;
        }
        let top = m as i64 + series.weight_shift;
        if top < 0 {
            return 0.0;
        }
        let w = Integer::from(Integer::binomial_u(top as u32, series.order - 1));
        w.to_f64() * BOUND_SLACK
    }

    fn weight_ratio(&self, series: &Series, m: u64) -> Option<f64> {
        if series.order <= 1 {
            return Some(1.0);
        }
        let num = m as f64 + series.weight_shift as f64 + 1.0;
        let den = m as f64 + series.weight_shift as f64 + 2.0 - f64::from(series.order);
        (den >= 1.0).then(|| num / den * BOUND_SLACK)
    }

    /// Bound on the modulus of everything omitted from index `m` onwards.
    fn tail(&self, series: &Series, m: u64) -> Option<f64> {
        if self.u_abs == 0.0 {
            return (m > 0).then_some(0.0);
        }
        let w = self.weight(series, m);
        let rho_w = self.weight_ratio(series, m)?;
        let (log_b, rho_b) = if self.classical {
            let base = m as f64 + self.x_re;
            if base <= 0.0 {
                return None;
            }
            if self.sigma >= 0.0 {
                (-self.sigma * base.ln(), 1.0)
            } else {
                let grow = ((base + 1.0) / base).powf(-self.sigma);
                (-self.sigma * base.ln(), grow * BOUND_SLACK)
            }
        } else {
            let t = self.q_abs.powf(m as f64) * self.qx_abs * BOUND_SLACK;
            if t >= 1.0 {
                return None;
            }
            let lower = (1.0 - t) / self.one_minus_q_hi;
            let upper = if self.real_positive {
                1.0 / self.one_minus_q_lo
            } else {
                (1.0 + t) / self.one_minus_q_lo
            };
            let log_b = (-self.sigma * lower.ln()).max(-self.sigma * upper.ln());
            let arg = if self.real_positive { 0.0 } else { self.tau.abs() * PI };
            (log_b + arg, 1.0)
        };
        let ratio = self.u_abs * rho_w * rho_b;
        if ratio >= 1.0 {
            return None;
        }
        let log_first = w.ln() + m as f64 * self.u_abs.ln() + log_b;
        if !log_first.is_finite() && log_first > 0.0 {
            return None;
        }
        let first = log_first.exp().max(f64::MIN_POSITIVE) * BOUND_SLACK;
        tail_bound_geometric(first, ratio).ok().map(|b| b * BOUND_SLACK)
    }
}

fn integer_exponent(s: &Complex) -> Option<i32> {
    if !s.imag().is_zero() || !s.real().is_integer() {
        return None;
    }
    s.real().to_i32_saturating().filter(|k| k.unsigned_abs() < (1 << 30))
}

/// Neumaier summation on one real component.
struct Compensated {
    sum: Float,
    carry: Float,
}

impl Compensated {
    fn new(work: u32) -> Self {
        Compensated {
            sum: Float::new(work),
            carry: Float::new(work),
        }
    }

    fn add(&mut self, x: &Float) {
        let work = self.sum.prec();
        let t = Float::with_val(work, &self.sum + x);
        if self.sum.clone().abs() >= x.clone().abs() {
            self.carry += Float::with_val(work, &self.sum - &t) + x;
        } else {
            self.carry += Float::with_val(work, x - &t) + &self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.carry)
    }
}

/// Sums `series` under `policy`, returning the value tagged at `precision_bits`.
pub(crate) fn sum(series: &Series, policy: TailPolicy, precision_bits: u32) -> Result<CertifiedValue> {
    policy.validate()?;
    let work = precision_bits + GUARD_BITS;
    let one = Complex::with_val(work, 1);

    let (qx, one_minus_q_inv, model) = match &series.base {
        Base::QBracket(q) => {
            let qx = Complex::with_val(work, q.pow(&series.x));
            let one_minus_q = Complex::with_val(work, &one - q);
            let real_positive =
                q.imag().is_zero() && *q.real() > 0 && series.x.imag().is_zero() && *series.x.real() >= 0;
            let model = TailModel {
                u_abs: abs_upper(&series.u),
                sigma: series.s.real().to_f64(),
                tau: series.s.imag().to_f64(),
                q_abs: abs_upper(q),
                qx_abs: abs_upper(&qx),
                one_minus_q_lo: abs_lower(&one_minus_q),
                one_minus_q_hi: abs_upper(&one_minus_q),
                real_positive,
                x_re: 0.0,
                classical: false,
            };
            (Some(qx), Some(Complex::with_val(work, one_minus_q.recip_ref())), model)
        }
        Base::Classical => {
            if !series.x.imag().is_zero() || *series.x.real() <= 0 {
                return Err(QError::domain("the q=1 series requires real x > 0"));
            }
            let model = TailModel {
                u_abs: abs_upper(&series.u),
                sigma: series.s.real().to_f64(),
                tau: series.s.imag().to_f64(),
                q_abs: 0.0,
                qx_abs: 0.0,
                one_minus_q_lo: 1.0,
                one_minus_q_hi: 1.0,
                real_positive: true,
                x_re: series.x.real().to_f64_round(Round::Down),
                classical: true,
            };
            (None, None, model)
        }
    };

    let int_exp = integer_exponent(&series.s).map(|k| -k);
    let neg_s = Complex::with_val(work, -&series.s);
    let start = series.start;
    let start_i32 = i32::try_from(start).map_err(|_| QError::domain("series start too large"))?;
    let mut u_pow = Complex::with_val(work, series.u.clone().pow(start_i32));
    let mut q_pow = match &series.base {
        Base::QBracket(q) => Some(Complex::with_val(work, q.clone().pow(start_i32))),
        Base::Classical => None,
    };

    let mut re = Compensated::new(work);
    let mut im = Compensated::new(work);
    let mut abs_sum = 0.0f64;
    let mut n = start;

    let stop_after = match policy {
        TailPolicy::FixedTerms(k) => Some(start + k),
        TailPolicy::TargetBound(_) => None,
    };

    let tail = loop {
        let chi = match &series.twist {
            Some(values) => {
                let v = &values[(n % values.len() as u64) as usize];
                (!v.is_zero()).then_some(v)
            }
            None => Some(&one),
        };
        if let Some(chi) = chi {
            let base = match (&qx, &one_minus_q_inv, &q_pow) {
                (Some(qx), Some(inv), Some(qn)) => {
                    let qxn = Complex::with_val(work, qx * qn);
                    Complex::with_val(work, Complex::with_val(work, &one - &qxn) * inv)
                }
                _ => Complex::with_val(work, &series.x + Integer::from(n)),
            };
            let power = if base.is_zero() {
                match int_exp {
                    Some(0) => one.clone(),
                    Some(k) if k > 0 => Complex::with_val(work, 0),
                    _ => {
                        return Err(QError::domain(
                            "series hits a zero q-bracket with Re(s) >= 0 (x must satisfy Re(x) > 0)",
                        ))
                    }
                }
            } else {
                match int_exp {
                    Some(k) => Complex::with_val(work, (&base).pow(k)),
                    None => Complex::with_val(work, (&base).pow(&neg_s)),
                }
            };
            let mut term = Complex::with_val(work, &u_pow * &power);
            term *= chi;
            if series.order > 1 {
                let top = n as i64 + series.weight_shift;
                let w = if top < 0 {
                    Integer::new()
                } else {
                    Integer::from(Integer::binomial_u(top as u32, series.order - 1))
                };
                term *= w;
            }
            abs_sum += abs_upper(&term);
            re.add(term.real());
            im.add(term.imag());
        }

        n += 1;
        u_pow *= &series.u;
        if let (Some(qn), Base::QBracket(q)) = (q_pow.as_mut(), &series.base) {
            *qn *= q;
        }
        let used = n - start;

        match (policy, stop_after) {
            (TailPolicy::FixedTerms(k), Some(end)) if n >= end => {
                break model.tail(series, n).ok_or_else(|| {
                    QError::Truncation(format!("{k} terms are too few to certify the tail of this series"))
                })?;
            }
            (TailPolicy::TargetBound(target), _) => {
                if let Some(t) = model.tail(series, n) {
                    if t <= target {
                        break t;
                    }
                }
                if used >= TERM_CAP {
                    return Err(QError::Truncation(format!(
                        "target bound {target:e} not reached within {TERM_CAP} terms"
                    )));
                }
            }
            _ => {}
        }
    };

    let value = Complex::with_val(work, (re.total(), im.total()));
    let used = n - start;
    let ulp = 2f64.powi(-(work as i32) + 8);
    let rounding = (abs_sum * (used as f64 + 64.0) + abs_upper(&value)) * ulp;
    Ok(CertifiedValue::new(
        ApproxScalar::from_complex(value, precision_bits),
        tail + rounding,
        used,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(work: u32, re: f64) -> Complex {
        Complex::with_val(work, re)
    }

    #[test]
    fn geometric_series_with_zero_exponent() {
        let w = 160;
        let q = Complex::with_val(w, rug::Rational::from((1, 2)));
        let u = Complex::with_val(w, rug::Rational::from((1, 3)));
        let s = Series::regrouped(Base::QBracket(q), u, c(w, 0.0), c(w, 1.0), 1);
        let v = sum(&s, TailPolicy::TargetBound(1e-30), 128).unwrap();
        assert!((v.value().re_f64() - 1.5).abs() < 1e-15);
        assert!(v.tail_bound() <= 1e-30);
        let exact = crate::qcore::Scalar::ratio(3, 2).unwrap();
        assert!(v.brackets(&exact));
    }

    #[test]
    fn fixed_terms_near_the_unit_circle() {
        let w = 96;
        let q = Complex::with_val(w, (0.0, 0.999));
        let u = Complex::with_val(w, 0.5);
        let s = Series::regrouped(Base::QBracket(q), u, c(w, 2.0), c(w, 1.0), 1);
        // certifiable, but only loosely
        let v = sum(&s, TailPolicy::FixedTerms(1), 64).unwrap();
        assert!(v.tail_bound() > 1e3);
        let tight = sum(&s, TailPolicy::FixedTerms(400), 64).unwrap();
        assert!(tight.tail_bound() < v.tail_bound());
        assert!(v.distance(&tight) <= v.tail_bound());
    }

    #[test]
    fn fixed_terms_too_few_for_weight_growth_is_an_error() {
        let w = 96;
        let q = Complex::with_val(w, 0.5);
        let u = Complex::with_val(w, 0.9);
        let s = Series::regrouped(Base::QBracket(q), u, c(w, 2.0), c(w, 1.0), 3);
        assert!(matches!(
            sum(&s, TailPolicy::FixedTerms(1), 64),
            Err(QError::Truncation(_))
        ));
        assert!(sum(&s, TailPolicy::FixedTerms(200), 64).is_ok());
    }

    #[test]
    fn classical_series_needs_positive_x() {
        let w = 96;
        let s = Series::regrouped(Base::Classical, c(w, 0.5), c(w, 2.0), c(w, 0.0), 1);
        assert!(sum(&s, TailPolicy::TargetBound(1e-10), 64).is_err());
    }
}
