use std::fs;
use std::path::Path;

use rug::Integer;
use serde_json::{json, Value};

use crate::error::{QError, Result};
use crate::qcore::{Scalar, DEFAULT_PRECISION_BITS};

/// Tolerance for the axiom checks on approximate (complex) character values.
const APPROX_TOLERANCE: f64 = 1e-9;

/// A Dirichlet character given by its value table on residues `0..d`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCharacter {
    modulus: u32,
    values: Vec<Scalar>,
}

fn gcd(a: u32, b: u32) -> u32 {
    Integer::from(a)
        .gcd(&Integer::from(b))
        .to_u32()
        .expect("gcd of u32 fits")
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn approx_eq(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => a.sub(b).abs_upper() <= APPROX_TOLERANCE,
    }
}

fn fail(axiom: &'static str, detail: String) -> QError {
    QError::InvalidCharacter { axiom, detail }
}

impl DirichletCharacter {
    /// Validates a value table against the character axioms.
    pub fn new(values: Vec<Scalar>) -> Result<Self> {
        let d = u32::try_from(values.len())
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| fail("modulus", "a character needs at least one value".into()))?;
        let units: Vec<u32> = (0..d).filter(|&a| gcd(a, d) == 1).collect();

        for a in 0..d {
            let is_unit = gcd(a, d) == 1;
            if values[a as usize].is_zero() == is_unit {
                return Err(fail(
                    "support",
                    format!(
                        "chi({a}) must be {} since gcd({a},{d}) = {}",
                        if is_unit { "nonzero" } else { "zero" },
                        gcd(a, d)
                    ),
                ));
            }
        }
        let one_index = (1 % d) as usize;
        if !approx_eq(&values[one_index], &Scalar::one()) {
            return Err(fail(
                "normalization",
                format!("chi(1) must be 1, got {}", values[one_index]),
            ));
        }
        for &a in &units {
            for &b in &units {
                let ab = ((u64::from(a) * u64::from(b)) % u64::from(d)) as usize;
                let prod = values[a as usize].mul(&values[b as usize]);
                if !approx_eq(&values[ab], &prod) {
                    return Err(fail(
                        "multiplicativity",
                        format!("chi({a}*{b} mod {d}) = {} but chi({a})*chi({b}) = {prod}", values[ab]),
                    ));
                }
            }
        }
        // Exponent of the unit group: lcm of the element orders.
        let exponent = units.iter().fold(1u32, |acc, &a| {
            let mut order = 1u32;
            let mut power = a % d.max(1);
            while d > 1 && power != 1 {
                power = ((u64::from(power) * u64::from(a)) % u64::from(d)) as u32;
                order += 1;
            }
            lcm(acc, order)
        });
        for &a in &units {
            let v = values[a as usize].powi(i64::from(exponent))?;
            if !approx_eq(&v, &Scalar::one()) {
                return Err(fail("root-of-unity", format!("chi({a})^{exponent} must be 1, got {v}")));
            }
        }
        Ok(DirichletCharacter { modulus: d, values })
    }

    /// The principal character modulo `d`.
    pub fn principal(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(fail("modulus", "modulus must be positive".into()));
        }
        Self::new(
            (0..d)
                .map(|a| if gcd(a, d) == 1 { Scalar::one() } else { Scalar::zero() })
                .collect(),
        )
    }

    /// The quadratic character modulo 3: (0, 1, -1).
    pub fn quadratic_mod3() -> Self {
        Self::new(vec![Scalar::zero(), Scalar::one(), Scalar::integer(-1)]).expect("valid built-in character")
    }

    /// The quadratic character modulo 4: (0, 1, 0, -1).
    pub fn quadratic_mod4() -> Self {
        Self::new(vec![Scalar::zero(), Scalar::one(), Scalar::zero(), Scalar::integer(-1)])
            .expect("valid built-in character")
    }

    /// `builtin:mod1`, `builtin:mod3` or `builtin:mod4`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name.strip_prefix("builtin:").unwrap_or(name) {
            "mod1" => Self::principal(1),
            "mod3" => Ok(Self::quadratic_mod3()),
            "mod4" => Ok(Self::quadratic_mod4()),
            other => Err(QError::Parse(format!(
                "unknown built-in character `{other}` (expected mod1, mod3 or mod4)"
            ))),
        }
    }

    /// Parses `{"modulus": d, "values": [...]}`.
    pub fn from_json(value: &Value) -> Result<Self> {
        let modulus = value
            .get("modulus")
            .and_then(Value::as_u64)
            .ok_or_else(|| QError::Parse("character JSON needs an integer `modulus`".into()))?;
        let raw = value
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| QError::Parse("character JSON needs a `values` array".into()))?;
        if raw.len() as u64 != modulus {
            return Err(fail(
                "modulus",
                format!("{} values given for modulus {modulus}", raw.len()),
            ));
        }
        let values = raw
            .iter()
            .map(|v| Scalar::from_json(v, DEFAULT_PRECISION_BITS))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| QError::Parse(format!("character file is not valid JSON: {e}")))?;
        Self::from_json(&value)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| QError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// A built-in name or a path to a JSON file.
    pub fn resolve(spec: &str) -> Result<Self> {
        if spec.starts_with("builtin:") {
            Self::builtin(spec)
        } else {
            Self::load(Path::new(spec))
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// `chi(n)`, extended periodically.
    pub fn value(&self, n: i64) -> &Scalar {
        let d = i64::from(self.modulus);
        &self.values[n.rem_euclid(d) as usize]
    }

    pub fn is_principal_mod1(&self) -> bool {
        self.modulus == 1
    }

    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.modulus,
            "values": self.values.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for name in ["builtin:mod1", "builtin:mod3", "builtin:mod4"] {
            DirichletCharacter::builtin(name).unwrap();
        }
        assert!(DirichletCharacter::builtin("builtin:mod5").is_err());
        assert_eq!(DirichletCharacter::quadratic_mod4().value(7), &Scalar::integer(-1));
        assert_eq!(DirichletCharacter::principal(6).unwrap().value(5), &Scalar::one());
    }

    fn axiom_of(text: &str) -> &'static str {
        match DirichletCharacter::from_json_str(text) {
            Err(QError::InvalidCharacter { axiom, .. }) => axiom,
            other => panic!("expected an axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn loader_names_the_violated_axiom() {
        assert_eq!(axiom_of(r#"{"modulus": 4, "values": ["0","1","1","-1"]}"#), "support");
        assert_eq!(axiom_of(r#"{"modulus": 3, "values": ["0","-1","1"]}"#), "normalization");
        assert_eq!(
            axiom_of(r#"{"modulus": 3, "values": ["0","1","1/2"]}"#),
            "multiplicativity"
        );
        assert_eq!(axiom_of(r#"{"modulus": 3, "values": ["0","1"]}"#), "modulus");
    }

    #[test]
    fn complex_quartic_character_mod5() {
        // 2 generates (Z/5)^*: chi(2) = i, chi(4) = -1, chi(3) = -i.
        let text = r#"{"modulus": 5, "values": ["0", "1", {"re": "0", "im": "1"}, {"re": "0", "im": "-1"}, "-1"]}"#;
        let chi = DirichletCharacter::from_json_str(text).unwrap();
        assert_eq!(chi.modulus(), 5);
        assert_eq!(chi.value(4), &Scalar::integer(-1));
        let back = DirichletCharacter::from_json(&chi.to_json()).unwrap();
        assert_eq!(back.modulus(), 5);
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(DirichletCharacter::from_json_str("{"), Err(QError::Parse(_))));
        assert!(matches!(
            DirichletCharacter::from_json_str(r#"{"values": []}"#),
            Err(QError::Parse(_))
        ));
    }
}
