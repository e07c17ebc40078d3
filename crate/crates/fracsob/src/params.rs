//! Norm parameters: smoothness order, integrability exponent, weight
//! selection, and their admissibility rules.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Integrability exponent. The supremum case is its own variant — it is
/// never encoded as a large float, and all formulas branch on it
/// explicitly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParams { reason: format!("p = {p} must be a finite real >= 1") })
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(*p),
            Exponent::Infinity => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::finite(p).map_err(|e| D::Error::custom(e.to_string())),
            Raw::Str(s) if s == "inf" => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(D::Error::custom(format!("bad exponent '{s}' (number or \"inf\")"))),
        }
    }
}

/// Which weight multiplies the integrand.
///
/// `Classical` is the unweighted Gagliardo/Fourier form; `Ultra` inserts
/// the polynomial weight `1 + |x|^(n + p*beta)` (or `1 + |x|^(n + beta)`
/// in the supremum case) that characterizes the heavier-tailed space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Classical,
    Ultra,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightMode::Classical => write!(f, "classical"),
            WeightMode::Ultra => write!(f, "ultra"),
        }
    }
}

/// Parameter bundle for the fractional norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    /// Smoothness order; positive. Difference-quotient norms further
    /// require `beta < 1` (checked per operation).
    pub beta: f64,
    pub p: Exponent,
    /// Ambient dimension, 1 or 2.
    pub n: usize,
    pub weight_mode: WeightMode,
}

impl NormParams {
    pub fn new(beta: f64, p: Exponent, n: usize, weight_mode: WeightMode) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams { reason: format!("beta = {beta} must be positive") });
        }
        if n == 0 || n > 2 {
            return Err(Error::InvalidParams { reason: format!("dimension {n} not supported") });
        }
        Ok(NormParams { beta, p, n, weight_mode })
    }

    /// Difference-quotient norms need `beta` strictly inside `(0, 1)`.
    pub fn require_fractional(&self) -> Result<()> {
        if self.beta > 0.0 && self.beta < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams { reason: "beta must be in (0,1)".into() })
        }
    }

    pub fn require_finite_p(&self) -> Result<f64> {
        self.p.value().ok_or(Error::InvalidParams {
            reason: "p = inf not supported by this operation (use the supremum form)".into(),
        })
    }

    /// Exponent of `|x|` in the ultra weight: `n + p*beta` for finite
    /// `p`, `n + beta` for the supremum case.
    pub fn ultra_weight_power(&self) -> f64 {
        match self.p {
            Exponent::Finite(p) => self.n as f64 + p * self.beta,
            Exponent::Infinity => self.n as f64 + self.beta,
        }
    }

    /// Weight evaluated at a point (squared radius passed in, so hot
    /// loops can reuse it).
    pub fn weight_from_rsq(&self, rsq: f64) -> f64 {
        match self.weight_mode {
            WeightMode::Classical => 1.0,
            WeightMode::Ultra => 1.0 + rsq.powf(0.5 * self.ultra_weight_power()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_a_distinct_variant_not_a_big_float() {
        let p = Exponent::Infinity;
        assert!(!p.is_finite());
        assert_eq!(p.value(), None);
        assert_eq!(serde_json::to_string(&p).unwrap(), "\"inf\"");
        let back: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(back, Exponent::Infinity);
    }

    #[test]
    fn finite_exponent_round_trips_through_json() {
        let p: Exponent = serde_json::from_str("1.5").unwrap();
        assert_eq!(p, Exponent::Finite(1.5));
        assert_eq!(serde_json::to_string(&p).unwrap(), "1.5");
    }

    #[test]
    fn exponents_below_one_are_rejected() {
        assert!(Exponent::finite(0.99).is_err());
        assert!(Exponent::finite(f64::NAN).is_err());
        assert!(serde_json::from_str::<Exponent>("0.5").is_err());
    }

    #[test]
    fn fractional_range_is_enforced_per_operation() {
        let p = NormParams::new(1.5, Exponent::Finite(2.0), 1, WeightMode::Classical).unwrap();
        let err = p.require_fractional().unwrap_err();
        assert_eq!(err.to_string(), "invalid parameters: beta must be in (0,1)");
        let ok = NormParams::new(0.5, Exponent::Finite(2.0), 1, WeightMode::Classical).unwrap();
        assert!(ok.require_fractional().is_ok());
    }

    #[test]
    fn ultra_weight_power_branches_on_the_exponent() {
        let fin = NormParams::new(0.5, Exponent::Finite(2.0), 1, WeightMode::Ultra).unwrap();
        assert!((fin.ultra_weight_power() - 2.0).abs() < 1e-15); // 1 + 2*0.5
        let sup = NormParams::new(0.5, Exponent::Infinity, 1, WeightMode::Ultra).unwrap();
        assert!((sup.ultra_weight_power() - 1.5).abs() < 1e-15); // 1 + 0.5
    }

    #[test]
    fn classical_weight_is_identically_one() {
        let p = NormParams::new(0.3, Exponent::Finite(2.0), 2, WeightMode::Classical).unwrap();
        assert_eq!(p.weight_from_rsq(17.3), 1.0);
        let u = NormParams::new(0.3, Exponent::Finite(2.0), 2, WeightMode::Ultra).unwrap();
        assert!(u.weight_from_rsq(0.0) == 1.0); // 1 + 0^w
        assert!(u.weight_from_rsq(4.0) > 1.0);
    }
}
