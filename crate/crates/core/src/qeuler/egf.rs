use rug::Integer;

use crate::error::{QError, Result};
use crate::qcore::Scalar;

/// A truncated exponential generating function `sum_{n<=N} c_n t^n / n!`.
#[derive(Clone, Debug, PartialEq)]
pub struct EgfSeries {
    coeffs: Vec<Scalar>,
}

pub(crate) fn binomial(n: u32, k: u32) -> Scalar {
    Scalar::Exact(Integer::from(Integer::binomial_u(n, k)).into())
}

impl EgfSeries {
    pub fn new(coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(QError::domain("an EGF needs at least the constant coefficient"));
        }
        Ok(EgfSeries { coeffs })
    }

    /// `e^{c t}` to the given order.
    pub fn exp(c: &Scalar, order: usize) -> Result<Self> {
        let coeffs = (0..=order).map(|n| c.powi(n as i64)).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Option<&Scalar> {
        self.coeffs.get(n)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        EgfSeries {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        EgfSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        EgfSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// `F(c t)`: coefficient n is multiplied by `c^n`.
    pub fn dilate(&self, c: &Scalar) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| Ok(a * &c.powi(n as i64)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(EgfSeries { coeffs })
    }

    /// Product of EGFs: `c_n = sum_k C(n,k) a_k b_{n-k}`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|n| {
                (0..=n).fold(Scalar::zero(), |acc, k| {
                    let term = &binomial(n as u32, k as u32) * &(&self.coeffs[k] * &other.coeffs[n - k]);
                    &acc + &term
                })
            })
            .collect();
        EgfSeries { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(raw: &[(i64, i64)]) -> EgfSeries {
        EgfSeries::new(raw.iter().map(|&(a, b)| Scalar::ratio(a, b).unwrap()).collect()).unwrap()
    }

    #[test]
    fn exponentials_multiply_by_adding_rates() {
        let a = Scalar::ratio(1, 2).unwrap();
        let b = Scalar::ratio(-1, 3).unwrap();
        let lhs = EgfSeries::exp(&a, 8).unwrap().mul(&EgfSeries::exp(&b, 8).unwrap());
        let rhs = EgfSeries::exp(&(&a + &b), 8).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatched_orders_truncate() {
        let a = series(&[(1, 1), (2, 1), (3, 1)]);
        let b = series(&[(1, 1), (1, 1)]);
        assert_eq!(a.mul(&b).order(), 1);
        assert_eq!(a.add(&b).order(), 1);
        assert!(EgfSeries::new(vec![]).is_err());
    }

    #[test]
    fn dilation_of_exponential() {
        let c = Scalar::ratio(2, 3).unwrap();
        let d = Scalar::ratio(3, 5).unwrap();
        let lhs = EgfSeries::exp(&c, 6).unwrap().dilate(&d).unwrap();
        assert_eq!(lhs, EgfSeries::exp(&(&c * &d), 6).unwrap());
    }

    fn coeffs() -> impl Strategy<Value = EgfSeries> {
        prop::collection::vec((-20i64..20, 1i64..9), 6).prop_map(|v| series(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn product_is_commutative(a in coeffs(), b in coeffs()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn product_is_associative(a in coeffs(), b in coeffs(), c in coeffs()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }
}
