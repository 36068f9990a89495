use rug::Complex;
use serde_json::{json, Value};

use super::scalar::{abs_upper, ApproxScalar, Scalar};

/// An approximate value with a rigorous error bound.
///
/// `tail_bound` covers the truncation error of the series plus a rounding
/// allowance for the working-precision arithmetic that produced `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedValue {
    value: ApproxScalar,
    tail_bound: f64,
    terms_used: u64,
}

impl CertifiedValue {
    pub(crate) fn new(value: ApproxScalar, tail_bound: f64, terms_used: u64) -> Self {
        debug_assert!(tail_bound >= 0.0);
        CertifiedValue {
            value,
            tail_bound,
            terms_used,
        }
    }

    pub fn value(&self) -> &ApproxScalar {
        &self.value
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn terms_used(&self) -> u64 {
        self.terms_used
    }

    /// `|value - x|`, evaluated with 64 bits beyond the working precision.
    pub fn distance_to(&self, x: &Scalar) -> f64 {
        let work = self.value.working_bits() + 64;
        let target = x.to_complex(work);
        let diff = Complex::with_val(work, self.value.value() - &target);
        abs_upper(&diff)
    }

    /// Whether `x` lies within `tail_bound` of the value.
    pub fn brackets(&self, x: &Scalar) -> bool {
        self.distance_to(x) <= self.tail_bound
    }

    /// `|self - other|`.
    pub fn distance(&self, other: &CertifiedValue) -> f64 {
        self.distance_to(&Scalar::Approx(other.value.clone()))
    }

    /// Multiplies value and bound by a constant factor.
    pub fn scaled(&self, factor: &Scalar) -> CertifiedValue {
        let work = self.value.working_bits();
        let f = factor.to_complex(work);
        let v = Complex::with_val(work, self.value.value() * &f);
        let rounding = abs_upper(&v) * 2f64.powi(-(work as i32) + 2);
        CertifiedValue {
            value: ApproxScalar::from_complex(v, self.value.precision_bits()),
            tail_bound: self.tail_bound * abs_upper(&f) * (1.0 + 1e-12) + rounding,
            terms_used: self.terms_used,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": Scalar::Approx(self.value.clone()).to_json(),
            "tail_bound": format_bound(self.tail_bound),
            "terms_used": self.terms_used,
            "mode": "certified",
        })
    }
}

/// Decimal rendering used for every bound in serialized output.
pub fn format_bound(b: f64) -> String {
    if b == 0.0 {
        "0".to_string()
    } else {
        format!("{b:.6e}")
    }
}
