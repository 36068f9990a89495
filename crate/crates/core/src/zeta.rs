//! q-analogue Hurwitz, Riemann and Barnes-type multiple zeta functions, and
//! the q-l-function.
//!
//! For |u| < 1 every defining series converges geometrically for all complex
//! `s`, so evaluation is plain certified summation; no continuation is needed.
//! Non-integer powers use the principal branch, which is unambiguous for real
//! `q` in (0,1) and real `x > 0` because every q-bracket is then positive.
//!
//! At `s = -n` the functions interpolate the q-Euler numbers and
//! polynomials, and [`zeta_special_value`] / [`l_q_special_value`] return
//! those values through the finite closed forms of [`crate::qeuler`].

use rug::Complex;

use crate::error::{QError, Result};
use crate::qcore::series::{self, Base, Series};
use crate::qcore::{CertifiedValue, ExactScalar, Mode, QContext, Scalar, TailPolicy};
use crate::qeuler::{
    generalized_q_euler, q_euler_higher, q_euler_polynomial, q_toward_one, DirichletCharacter, LimitReport, LimitRow,
    Support,
};

/// A fully specified zeta-type evaluation.
#[derive(Clone, Debug)]
pub struct ZetaQuery {
    pub s: Scalar,
    /// Shift `x`; `None` selects the Riemann-type series over positive indices.
    pub x: Option<Scalar>,
    pub r: u32,
    pub twist: Option<DirichletCharacter>,
    pub ctx: QContext,
}

impl ZetaQuery {
    pub fn new(s: Scalar, ctx: QContext) -> Self {
        ZetaQuery {
            s,
            x: None,
            r: 1,
            twist: None,
            ctx,
        }
    }

    pub fn with_x(mut self, x: Scalar) -> Self {
        self.x = Some(x);
        self
    }

    pub fn with_order(mut self, r: u32) -> Self {
        self.r = r;
        self
    }

    pub fn with_twist(mut self, chi: DirichletCharacter) -> Self {
        self.twist = Some(chi);
        self
    }

    pub fn evaluate(&self) -> Result<CertifiedValue> {
        if self.r == 0 {
            return Err(QError::domain("order r must be at least 1"));
        }
        match (&self.twist, &self.x) {
            (Some(_), _) if self.r != 1 => Err(QError::domain("a twisted query requires r = 1")),
            (Some(_), Some(_)) => Err(QError::domain("a twisted query sums from n = 1 and takes no x")),
            (Some(chi), None) => l_q(&self.s, chi, &self.ctx),
            (None, Some(x)) => zeta_q_multiple(&self.s, x, self.r, &self.ctx),
            (None, None) if self.r == 1 => zeta_q_riemann(&self.s, &self.ctx),
            (None, None) => zeta_q_riemann_multiple(&self.s, self.r, &self.ctx),
        }
    }
}

fn complex_params(ctx: &QContext) -> (u32, Complex, Complex) {
    let work = ctx.working_bits();
    (work, ctx.q().to_complex(work), ctx.u().to_complex(work))
}

fn positive_shift(x: &Scalar) -> Result<()> {
    let positive = match x {
        Scalar::Exact(e) => e.signum() > 0,
        Scalar::Approx(a) => a.re_f64() > 0.0 || (a.re_f64() == 0.0 && *a.value().real() > 0),
    };
    if positive {
        Ok(())
    } else {
        Err(QError::domain(format!("x must satisfy Re(x) > 0, got {x}")))
    }
}

fn run(series: &Series, ctx: &QContext) -> Result<CertifiedValue> {
    series::sum(series, ctx.truncation(), ctx.precision_bits())
}

/// `zeta_q(u|s,x) = sum_{n>=0} u^n / [n+x]_q^s`.
pub fn zeta_q_hurwitz(s: &Scalar, x: &Scalar, ctx: &QContext) -> Result<CertifiedValue> {
    zeta_q_multiple(s, x, 1, ctx)
}

/// `zeta_{r,q}(u|s,x) = sum_{n_1..n_r>=0} u^{n_1+..+n_r} / [x+n_1+..+n_r]_q^s`,
/// summed as `sum_N C(N+r-1, r-1) u^N / [x+N]_q^s`.
pub fn zeta_q_multiple(s: &Scalar, x: &Scalar, r: u32, ctx: &QContext) -> Result<CertifiedValue> {
    if r == 0 {
        return Err(QError::domain("order r must be at least 1"));
    }
    positive_shift(x)?;
    let (work, q, u) = complex_params(ctx);
    let series = Series::regrouped(Base::QBracket(q), u, s.to_complex(work), x.to_complex(work), r);
    run(&series, ctx)
}

/// `zeta_q(u|s) = sum_{l>=1} u^l / [l]_q^s`.
pub fn zeta_q_riemann(s: &Scalar, ctx: &QContext) -> Result<CertifiedValue> {
    zeta_q_riemann_multiple(s, 1, ctx)
}

/// `zeta_{r,q}(u|s) = sum_{n_1..n_r>=1} u^{n_1+..+n_r} / [n_1+..+n_r]_q^s`,
/// summed directly as `sum_{N>=r} C(N-1, r-1) u^N / [N]_q^s`.
pub fn zeta_q_riemann_multiple(s: &Scalar, r: u32, ctx: &QContext) -> Result<CertifiedValue> {
    if r == 0 {
        return Err(QError::domain("order r must be at least 1"));
    }
    let (work, q, u) = complex_params(ctx);
    let series = Series {
        base: Base::QBracket(q),
        u,
        s: s.to_complex(work),
        x: Complex::with_val(work, 0),
        start: u64::from(r),
        order: r,
        weight_shift: -1,
        twist: None,
    };
    run(&series, ctx)
}

/// `l_q(s, chi) = sum_{n>=1} chi(n) u^n / [n]_q^s`.
pub fn l_q(s: &Scalar, chi: &DirichletCharacter, ctx: &QContext) -> Result<CertifiedValue> {
    let (work, q, u) = complex_params(ctx);
    let series = Series {
        base: Base::QBracket(q),
        u,
        s: s.to_complex(work),
        x: Complex::with_val(work, 0),
        start: 1,
        order: 1,
        weight_shift: 0,
        twist: Some(chi.values().iter().map(|v| v.to_complex(work)).collect()),
    };
    run(&series, ctx)
}

/// `zeta_{r,q}(u|-n,x) = (1-u)^{-r} H^{(r)}_{n,q}(u^-1, x)`, from the finite
/// closed form (the convolution form when r = 1).
pub fn zeta_special_value(n: u32, x: &Scalar, r: u32, ctx: &QContext) -> Result<Scalar> {
    let numbers = if r == 1 {
        q_euler_polynomial(n, x, ctx)?
    } else {
        q_euler_higher(n, r, x, ctx)?
    };
    let scale = (&Scalar::one() - ctx.u()).powi(-i64::from(r))?;
    Ok(&scale * &numbers)
}

/// `l_q(-n, chi) = H_{n,chi,q}(u^-1) / (1-u)` with the m >= 1 support.
pub fn l_q_special_value(n: u32, chi: &DirichletCharacter, ctx: &QContext) -> Result<Scalar> {
    let numbers = generalized_q_euler(n, chi, Support::FromOne, ctx)?;
    numbers.checked_div(&(&Scalar::one() - ctx.u()))
}

/// Two certified evaluations of one quantity.
#[derive(Clone, Debug)]
pub struct ShiftCheck {
    /// `u^r zeta_{r,q}(u|s,r)`
    pub lhs: CertifiedValue,
    /// `sum_{N>=r} C(N-1,r-1) u^N / [N]_q^s`
    pub rhs: CertifiedValue,
    pub delta: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares the shifted Hurwitz-type evaluation of `zeta_{r,q}(u|s)` with
/// the direct sum over positive indices.
pub fn zeta_multiple_shift_check(s: &Scalar, r: u32, ctx: &QContext) -> Result<ShiftCheck> {
    let shifted = zeta_q_multiple(s, &Scalar::integer(i64::from(r)), r, ctx)?;
    let lhs = shifted.scaled(&ctx.u().powi(i64::from(r))?);
    let rhs = zeta_q_riemann_multiple(s, r, ctx)?;
    let delta = lhs.distance(&rhs);
    let bound = lhs.tail_bound() + rhs.tail_bound();
    Ok(ShiftCheck {
        pass: delta <= bound,
        lhs,
        rhs,
        delta,
        bound,
    })
}

/// The q = 1 series `sum_N C(N+r-1, r-1) u^N / (x+N)^s`; `x` must be real and positive.
pub fn classical_multiple_zeta(
    s: &Scalar,
    x: &Scalar,
    r: u32,
    u: &Scalar,
    precision_bits: u32,
    policy: TailPolicy,
) -> Result<CertifiedValue> {
    if r == 0 {
        return Err(QError::domain("order r must be at least 1"));
    }
    if u.abs_lower() >= 1.0 {
        return Err(QError::domain("u must satisfy |u|<1"));
    }
    let work = precision_bits + crate::qcore::GUARD_BITS;
    let series = Series::regrouped(
        Base::Classical,
        u.to_complex(work),
        s.to_complex(work),
        x.to_complex(work),
        r,
    );
    series::sum(&series, policy, precision_bits)
}

/// Follows `zeta_{r,q_k}(u|s,x)` along `q_k = 1 - 2^-k` and reports its
/// deviation from the q = 1 series. Passes when the last deviation is at
/// most the first divided by `required_decay` (deviations below the combined
/// certified bounds count as zero).
#[allow(clippy::too_many_arguments)]
pub fn q_to_1_limit_check(
    s: &Scalar,
    x: &Scalar,
    r: u32,
    u: &Scalar,
    ks: &[u32],
    precision_bits: u32,
    policy: TailPolicy,
    required_decay: f64,
) -> Result<LimitReport> {
    let limit = classical_multiple_zeta(s, x, r, u, precision_bits, policy)?;
    let rows = ks
        .iter()
        .map(|&k| {
            let q = Scalar::Exact(q_toward_one(k)?);
            let ctx = QContext::new(
                q,
                u.clone(),
                if u.is_exact() { Mode::Exact } else { Mode::Certified },
                precision_bits,
            )
            .or_else(|_| {
                QContext::certified(
                    Scalar::Exact(q_toward_one(k).expect("k checked")),
                    u.clone(),
                    precision_bits,
                )
            })?
            .with_policy(policy)?;
            let value = zeta_q_multiple(s, x, r, &ctx)?;
            let deviation = Scalar::Approx(value.value().clone()).sub(&Scalar::Approx(limit.value().clone()));
            let bound = value.tail_bound() + limit.tail_bound();
            Ok(LimitRow {
                k,
                value: Scalar::Approx(value.value().clone()),
                deviation: if deviation.abs_upper() <= bound {
                    Scalar::Exact(ExactScalar::zero())
                } else {
                    deviation
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitReport::build(
        Scalar::Approx(limit.value().clone()),
        rows,
        required_decay,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d).unwrap()
    }

    fn ctx() -> QContext {
        QContext::exact(ExactScalar::new(1, 2).unwrap(), ExactScalar::new(1, 3).unwrap())
            .unwrap()
            .with_policy(TailPolicy::TargetBound(1e-30))
            .unwrap()
    }

    #[test]
    fn hurwitz_examples() {
        let c = ctx();
        let v = zeta_q_hurwitz(&Scalar::zero(), &Scalar::integer(1), &c).unwrap();
        assert!(v.brackets(&s(3, 2)));
        let v = zeta_q_hurwitz(&Scalar::integer(-1), &Scalar::integer(1), &c).unwrap();
        assert!(v.brackets(&s(9, 5)));
        let v = zeta_q_hurwitz(&Scalar::integer(2), &Scalar::integer(1), &c).unwrap();
        // 1.19983569083923495731151347786617179402... (mpmath, 400 terms at 300 bits)
        let golden: Scalar = Scalar::parse("1.1998356908392349573115134778661717940", 128).unwrap();
        assert!(v.distance_to(&golden) < 1e-36 + v.tail_bound());
        assert!(zeta_q_hurwitz(&Scalar::one(), &Scalar::zero(), &c).is_err());
    }

    #[test]
    fn riemann_examples() {
        let c = ctx();
        assert!(zeta_q_riemann(&Scalar::integer(-1), &c).unwrap().brackets(&s(3, 5)));
        assert!(zeta_q_riemann(&Scalar::zero(), &c).unwrap().brackets(&s(1, 2)));
        let zero_u = QContext::exact(ExactScalar::new(1, 2).unwrap(), ExactScalar::zero()).unwrap();
        let v = zeta_q_riemann(&Scalar::integer(3), &zero_u).unwrap();
        assert!(v.brackets(&Scalar::zero()));
        assert_eq!(v.value().re_f64(), 0.0);
    }

    #[test]
    fn multiple_examples() {
        let c = ctx();
        let a = zeta_q_multiple(&Scalar::integer(2), &Scalar::integer(1), 1, &c).unwrap();
        let b = zeta_q_hurwitz(&Scalar::integer(2), &Scalar::integer(1), &c).unwrap();
        assert_eq!(a, b);
        let v = zeta_q_multiple(&Scalar::integer(-1), &Scalar::integer(1), 2, &c).unwrap();
        assert!(v.brackets(&s(153, 50)));
    }

    #[test]
    fn special_value_examples() {
        let c = ctx();
        assert_eq!(zeta_special_value(0, &Scalar::integer(1), 1, &c).unwrap(), s(3, 2));
        assert_eq!(zeta_special_value(1, &Scalar::integer(1), 1, &c).unwrap(), s(9, 5));
        assert_eq!(zeta_special_value(1, &Scalar::integer(1), 2, &c).unwrap(), s(153, 50));
    }

    #[test]
    fn shift_examples() {
        let c = ctx();
        let check = zeta_multiple_shift_check(&Scalar::integer(-1), 1, &c).unwrap();
        assert!(check.pass);
        assert!(check.lhs.brackets(&s(3, 5)) && check.rhs.brackets(&s(3, 5)));
        let check = zeta_multiple_shift_check(&Scalar::zero(), 1, &c).unwrap();
        assert!(check.lhs.brackets(&s(1, 2)) && check.rhs.brackets(&s(1, 2)));
        let check = zeta_multiple_shift_check(&Scalar::integer(2), 2, &c).unwrap();
        assert!(check.pass, "{check:?}");
    }

    #[test]
    fn l_function_examples() {
        let c = ctx();
        let chi4 = DirichletCharacter::quadratic_mod4();
        let chi1 = DirichletCharacter::principal(1).unwrap();
        assert!(l_q(&Scalar::zero(), &chi4, &c).unwrap().brackets(&s(3, 10)));
        assert_eq!(l_q_special_value(0, &chi4, &c).unwrap(), s(3, 10));
        assert_eq!(l_q_special_value(1, &chi1, &c).unwrap(), s(3, 5));
        assert_eq!(l_q_special_value(0, &chi1, &c).unwrap(), s(1, 2));
        assert!(l_q(&Scalar::zero(), &chi1, &c).unwrap().brackets(&s(1, 2)));
        let v = l_q(&Scalar::integer(-1), &chi4, &c).unwrap();
        assert!(v.brackets(&s(51, 185)));
        assert_eq!(l_q_special_value(1, &chi4, &c).unwrap(), s(51, 185));
        for k in -3..=3 {
            let a = l_q(&Scalar::integer(k), &chi1, &c).unwrap();
            let b = zeta_q_riemann(&Scalar::integer(k), &c).unwrap();
            assert!(a.distance(&b) <= a.tail_bound() + b.tail_bound());
        }
    }

    #[test]
    fn query_dispatch() {
        let c = ctx();
        let q = ZetaQuery::new(Scalar::integer(-1), c.clone())
            .with_x(Scalar::integer(1))
            .with_order(2);
        assert!(q.evaluate().unwrap().brackets(&s(153, 50)));
        let twisted = ZetaQuery::new(Scalar::zero(), c.clone()).with_twist(DirichletCharacter::quadratic_mod4());
        assert!(twisted.evaluate().unwrap().brackets(&s(3, 10)));
        assert!(twisted.clone().with_order(2).evaluate().is_err());
        assert!(twisted.with_x(Scalar::one()).evaluate().is_err());
        assert!(ZetaQuery::new(Scalar::integer(-1), c)
            .evaluate()
            .unwrap()
            .brackets(&s(3, 5)));
    }

    #[test]
    fn limit_series_value() {
        let v = classical_multiple_zeta(
            &Scalar::integer(2),
            &Scalar::integer(1),
            1,
            &s(1, 3),
            128,
            TailPolicy::TargetBound(1e-30),
        )
        .unwrap();
        // 3 Li_2(1/3) = 1.09863968993119046285023889299278829140...
        let golden = Scalar::parse("1.0986396899311904628502388929927882914", 128).unwrap();
        assert!(v.distance_to(&golden) < 1e-36 + v.tail_bound());
    }

    #[test]
    fn limit_decay() {
        for r in [1, 2] {
            let report = q_to_1_limit_check(
                &Scalar::integer(2),
                &Scalar::integer(1),
                r,
                &s(1, 3),
                &(4..=12).collect::<Vec<_>>(),
                128,
                TailPolicy::TargetBound(1e-30),
                16.0,
            )
            .unwrap();
            assert!(report.pass, "r={r}");
        }
        let flat = q_to_1_limit_check(
            &Scalar::integer(2),
            &Scalar::integer(1),
            2,
            &Scalar::zero(),
            &[4, 12],
            128,
            TailPolicy::TargetBound(1e-30),
            16.0,
        )
        .unwrap();
        assert!(flat.pass);
        assert!(flat.rows.iter().all(|r| r.deviation.is_zero()));
    }

    #[test]
    fn complex_parameters_are_certified() {
        let q = Scalar::parse("0.4+0.3i", 96).unwrap();
        let u = Scalar::parse("0.2-0.3i", 96).unwrap();
        let c = QContext::certified(q, u, 96)
            .unwrap()
            .with_policy(TailPolicy::TargetBound(1e-20))
            .unwrap();
        let x = Scalar::integer(1);
        let sv = Scalar::parse("1.5+0.5i", 96).unwrap();
        let v = zeta_q_hurwitz(&sv, &x, &c).unwrap();
        let doubled = c.with_policy(TailPolicy::FixedTerms(2 * v.terms_used())).unwrap();
        let w = zeta_q_hurwitz(&sv, &x, &doubled).unwrap();
        assert!(v.distance(&w) <= v.tail_bound());
        // special value through the certified closed form
        let n3 = zeta_q_hurwitz(&Scalar::integer(-3), &x, &c).unwrap();
        let closed = zeta_special_value(3, &x, 1, &c).unwrap();
        assert!(n3.distance_to(&closed) <= n3.tail_bound() + 1e-20);
    }
}
