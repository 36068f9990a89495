//! Bernoulli, Euler and Frobenius-Euler numbers: the q -> 1 reference points.
//!
//! Conventions follow the exponential generating functions
//!
//! ```text
//!   t / (e^t - 1)           = sum B_n t^n / n!      (B_1 = -1/2)
//!   2 / (e^t + 1)           = sum E_n t^n / n!      (E_1 = -1/2, not secant numbers)
//!   (1 - u) / (e^t - u)     = sum H_n(u) t^n / n!   (H_n(-1) = E_n)
//! ```
//!
//! Each sequence is produced by its O(n^2) recurrence and memoized in a
//! process-wide table that only ever grows. [`series_coefficients`] is an
//! independent route through power-series inversion, used as an oracle.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use rug::Integer;
use serde::Serialize;

use crate::error::{QError, Result};
use crate::qcore::ExactScalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Bernoulli,
    Euler,
    FrobeniusEuler(ExactScalar),
}

/// A memoized prefix `values[0..=n]` of one of the classical sequences.
#[derive(Clone, Debug)]
pub struct SequenceTable {
    kind: SequenceKind,
    values: Vec<ExactScalar>,
}

impl SequenceTable {
    pub fn new(kind: SequenceKind) -> Result<Self> {
        if let SequenceKind::FrobeniusEuler(u) = &kind {
            if *u == ExactScalar::one() {
                return Err(QError::domain("Frobenius-Euler numbers are undefined at u = 1"));
            }
        }
        Ok(SequenceTable {
            kind,
            values: vec![ExactScalar::one()],
        })
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Extends the table through index `n`; existing entries are untouched.
    pub fn extend_to(&mut self, n: usize) {
        while self.values.len() <= n {
            let next = self.next_value();
            self.values.push(next);
        }
    }

    fn next_value(&self) -> ExactScalar {
        let n = self.values.len() as u32;
        match &self.kind {
            // sum_{k=0}^{n} C(n+1,k) B_k = 0
            SequenceKind::Bernoulli => {
                let acc = weighted_prefix(&self.values, n + 1);
                let scale = ExactScalar::integer(-1)
                    .checked_div(&ExactScalar::integer(i64::from(n) + 1))
                    .expect("n + 1 > 0");
                &acc * &scale
            }
            // 2 E_n + sum_{k<n} C(n,k) E_k = 0
            SequenceKind::Euler => {
                let acc = weighted_prefix(&self.values, n);
                &acc * &ExactScalar::new(-1, 2).expect("nonzero")
            }
            // (u - 1) H_n = sum_{k<n} C(n,k) H_k
            SequenceKind::FrobeniusEuler(u) => {
                let acc = weighted_prefix(&self.values, n);
                acc.checked_div(&(u - &ExactScalar::one()))
                    .expect("u != 1 checked at construction")
            }
        }
    }
}

/// `sum_{k < len} C(top, k) values[k]`.
fn weighted_prefix(values: &[ExactScalar], top: u32) -> ExactScalar {
    values.iter().enumerate().fold(ExactScalar::zero(), |acc, (k, v)| {
        let c = ExactScalar::from_integer(Integer::from(Integer::binomial_u(top, k as u32)));
        &acc + &(&c * v)
    })
}

type Cache = RwLock<HashMap<SequenceKind, SequenceTable>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn lookup(kind: SequenceKind, n: usize) -> Result<ExactScalar> {
    if let Some(table) = cache().read().expect("cache poisoned").get(&kind) {
        if let Some(v) = table.values.get(n) {
            return Ok(v.clone());
        }
    }
    let mut guard = cache().write().expect("cache poisoned");
    let table = match guard.get_mut(&kind) {
        Some(t) => t,
        None => guard.entry(kind.clone()).or_insert(SequenceTable::new(kind)?),
    };
    table.extend_to(n);
    Ok(table.values[n].clone())
}

/// `B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> ExactScalar {
    lookup(SequenceKind::Bernoulli, n).expect("Bernoulli table cannot fail")
}

/// `E_n`, the coefficients of `2/(e^t+1)`.
pub fn euler_number(n: usize) -> ExactScalar {
    lookup(SequenceKind::Euler, n).expect("Euler table cannot fail")
}

/// `H_n(u)`, the coefficients of `(1-u)/(e^t-u)`.
pub fn frobenius_euler(n: usize, u: &ExactScalar) -> Result<ExactScalar> {
    lookup(SequenceKind::FrobeniusEuler(u.clone()), n)
}

/// Coefficients `a_0..=a_order` (of `t^n/n!`) of the defining generating
/// function, obtained by inverting a truncated power series.
pub fn series_coefficients(kind: &SequenceKind, order: usize) -> Result<Vec<ExactScalar>> {
    // The generating function is 1 / D(t) with D an explicit series.
    let mut factorial = vec![ExactScalar::one()];
    for k in 1..=order + 1 {
        let prev = factorial[k - 1].clone();
        factorial.push(&prev * &ExactScalar::integer(k as i64));
    }
    let recip = |k: usize| factorial[k].recip().expect("k! > 0");
    let denominator: Vec<ExactScalar> = match kind {
        // (e^t - 1)/t = sum t^k / (k+1)!
        SequenceKind::Bernoulli => (0..=order).map(|k| recip(k + 1)).collect(),
        // (e^t + 1)/2
        SequenceKind::Euler => (0..=order)
            .map(|k| {
                let half = ExactScalar::new(1, 2).expect("nonzero");
                let c = &recip(k) * &half;
                if k == 0 {
                    ExactScalar::one()
                } else {
                    c
                }
            })
            .collect(),
        // (e^t - u)/(1 - u)
        SequenceKind::FrobeniusEuler(u) => {
            let one = ExactScalar::one();
            if *u == one {
                return Err(QError::domain("Frobenius-Euler numbers are undefined at u = 1"));
            }
            let norm = (&one - u).recip()?;
            (0..=order)
                .map(|k| if k == 0 { ExactScalar::one() } else { &recip(k) * &norm })
                .collect()
        }
    };
    // 1/D by the usual triangular solve; D[0] = 1 in all three cases.
    let mut inverse: Vec<ExactScalar> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n == 0 {
            inverse.push(ExactScalar::one());
            continue;
        }
        let mut acc = ExactScalar::zero();
        for k in 1..=n {
            acc = &acc + &(&denominator[k] * &inverse[n - k]);
        }
        inverse.push(-acc);
    }
    Ok(inverse
        .into_iter()
        .enumerate()
        .map(|(n, c)| &c * &factorial[n])
        .collect())
}

/// One row of the Bernoulli-Euler identity audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub n: usize,
    #[serde(serialize_with = "as_string")]
    pub lhs: ExactScalar,
    #[serde(serialize_with = "as_string")]
    pub rhs: ExactScalar,
    pub equal: bool,
}

fn as_string<S: serde::Serializer>(x: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Compares `H_n(-1)` with `sum_{k=0}^{n} C(n+1,k) 2^k B_k` for every
/// `n <= n_max`. The identity is reported, not asserted; it does not hold
/// for n = 1 under the conventions above.
pub fn bernoulli_euler_identity_audit(n_max: usize) -> Vec<AuditRow> {
    let minus_one = ExactScalar::integer(-1);
    (0..=n_max)
        .map(|n| {
            let lhs = frobenius_euler(n, &minus_one).expect("u = -1 is valid");
            let rhs = (0..=n).fold(ExactScalar::zero(), |acc, k| {
                let c = Integer::from(Integer::binomial_u(n as u32 + 1, k as u32));
                let two_k = Integer::from(Integer::u_pow_u(2, k as u32));
                let term = &ExactScalar::from_integer(c * two_k) * &bernoulli(k);
                &acc + &term
            });
            AuditRow {
                n,
                equal: lhs == rhs,
                lhs,
                rhs,
            }
        })
        .collect()
}
