//! Norm reports: the value (or a divergence verdict) together with the
//! discretization metadata needed to reproduce and refine it.

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::{Exponent, NormParams, WeightMode};

/// A measured norm, or the evidence that it does not stabilize.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormValue {
    Finite(f64),
    /// The value kept growing across truncation or refinement
    /// doublings; `growth_per_doubling` is the last observed ratio.
    Divergent { growth_per_doubling: f64 },
}

impl NormValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            NormValue::Finite(v) => Some(*v),
            NormValue::Divergent { .. } => None,
        }
    }

    pub fn expect_finite(&self) -> Result<f64> {
        self.finite().ok_or(Error::InvalidParams { reason: "value is divergent".into() })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, NormValue::Divergent { .. })
    }
}

// Standalone `NormValue`s (lattice tables, weighted suprema) serialize as
// the bare number, with divergence as a one-entry map carrying the growth
// evidence — the same reading as the inlined fields of `NormReport`.
impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            NormValue::Finite(v) => s.serialize_f64(*v),
            NormValue::Divergent { growth_per_doubling } => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("divergent", growth_per_doubling)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl<'de> serde::de::Visitor<'de> for Visitor {
            type Value = NormValue;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or {\"divergent\": growth}")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<NormValue, E> {
                Ok(NormValue::Finite(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<NormValue, E> {
                Ok(NormValue::Finite(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<NormValue, E> {
                Ok(NormValue::Finite(v as f64))
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<NormValue, A::Error> {
                let (key, growth): (String, f64) = map
                    .next_entry()?
                    .ok_or_else(|| serde::de::Error::custom("empty verdict map"))?;
                if key == "divergent" {
                    Ok(NormValue::Divergent { growth_per_doubling: growth })
                } else {
                    Err(serde::de::Error::custom(format!("unknown verdict key: {key}")))
                }
            }
        }
        d.deserialize_any(Visitor)
    }
}

/// Witness pair for supremum-type seminorms: the first maximal pair in
/// row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Result of a norm evaluation.
///
/// `error_estimate` is the difference between the reported value and
/// the same quantity on the once-coarsened grid (two-level estimate);
/// `puncture` is the absolute radius excluded around the diagonal for
/// pair sums (zero for single-sum and spectral quantities).
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub value: NormValue,
    pub beta: f64,
    pub p: Exponent,
    pub weight_mode: WeightMode,
    pub h: f64,
    pub puncture: f64,
    pub error_estimate: f64,
    /// For combined norms: the `(lp^p + seminorm^p)^(1/p)` reading next
    /// to the canonical additive one.
    pub p_power_value: Option<f64>,
    /// Additive decomposition of a combined norm, when applicable.
    pub lp_part: Option<f64>,
    pub seminorm_part: Option<f64>,
    /// Maximizing pair for supremum-type seminorms.
    pub witness: Option<PairWitness>,
}

impl NormReport {
    pub fn new(value: NormValue, params: &NormParams, h: f64, puncture: f64, error_estimate: f64) -> Self {
        NormReport {
            value,
            beta: params.beta,
            p: params.p,
            weight_mode: params.weight_mode,
            h,
            puncture,
            error_estimate,
            p_power_value: None,
            lp_part: None,
            seminorm_part: None,
            witness: None,
        }
    }

    /// The finite value, or an error if the verdict is divergence.
    pub fn finite_value(&self) -> Result<f64> {
        self.value.expect_finite()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl Serialize for NormReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NormReport", 12)?;
        match self.value {
            NormValue::Finite(v) => st.serialize_field("value", &v)?,
            NormValue::Divergent { growth_per_doubling } => {
                st.serialize_field("value", "divergent")?;
                st.serialize_field("divergence_growth", &growth_per_doubling)?;
            }
        }
        st.serialize_field("beta", &self.beta)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("weight_mode", &self.weight_mode)?;
        st.serialize_field("h", &self.h)?;
        st.serialize_field("puncture", &self.puncture)?;
        st.serialize_field("error_estimate", &self.error_estimate)?;
        if let Some(v) = self.p_power_value {
            st.serialize_field("p_power_value", &v)?;
        }
        if let Some(v) = self.lp_part {
            st.serialize_field("lp_part", &v)?;
        }
        if let Some(v) = self.seminorm_part {
            st.serialize_field("seminorm_part", &v)?;
        }
        if let Some(w) = &self.witness {
            st.serialize_field("witness", w)?;
        }
        st.end()
    }
}

impl<'de> Deserialize<'de> for NormReport {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            value: serde_json::Value,
            divergence_growth: Option<f64>,
            beta: f64,
            p: Exponent,
            weight_mode: WeightMode,
            h: f64,
            puncture: f64,
            error_estimate: f64,
            p_power_value: Option<f64>,
            lp_part: Option<f64>,
            seminorm_part: Option<f64>,
            witness: Option<PairWitness>,
        }
        let raw = Raw::deserialize(d)?;
        let value = match &raw.value {
            serde_json::Value::Number(n) => {
                NormValue::Finite(n.as_f64().ok_or_else(|| D::Error::custom("bad number"))?)
            }
            serde_json::Value::String(s) if s == "divergent" => NormValue::Divergent {
                growth_per_doubling: raw.divergence_growth.unwrap_or(f64::INFINITY),
            },
            other => return Err(D::Error::custom(format!("bad value field: {other}"))),
        };
        Ok(NormReport {
            value,
            beta: raw.beta,
            p: raw.p,
            weight_mode: raw.weight_mode,
            h: raw.h,
            puncture: raw.puncture,
            error_estimate: raw.error_estimate,
            p_power_value: raw.p_power_value,
            lp_part: raw.lp_part,
            seminorm_part: raw.seminorm_part,
            witness: raw.witness,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> NormParams {
        NormParams::new(0.5, Exponent::Finite(2.0), 1, WeightMode::Ultra).unwrap()
    }

    #[test]
    fn finite_reports_serialize_the_number() {
        let r = NormReport::new(NormValue::Finite(1.25), &params(), 0.015625, 0.015625, 1e-3);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"value\":1.25"));
        assert!(json.contains("\"weight_mode\":\"ultra\""));
        assert!(json.contains("\"p\":2.0"));
        let back: NormReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn divergent_reports_carry_the_growth_evidence() {
        let r = NormReport::new(
            NormValue::Divergent { growth_per_doubling: 1.9 },
            &params(),
            0.1,
            0.0,
            0.0,
        );
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"value\":\"divergent\""));
        assert!(json.contains("\"divergence_growth\":1.9"));
        let back: NormReport = serde_json::from_str(&json).unwrap();
        assert!(back.value.is_divergent());
        assert!(back.finite_value().is_err());
    }

    #[test]
    fn optional_fields_appear_only_when_set() {
        let mut r = NormReport::new(NormValue::Finite(2.0), &params(), 0.1, 0.1, 0.0);
        assert!(!serde_json::to_string(&r).unwrap().contains("p_power_value"));
        r.p_power_value = Some(1.5);
        r.witness =
            Some(PairWitness { xi: vec![0.0], eta: vec![1.0] });
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"p_power_value\":1.5"));
        assert!(json.contains("\"witness\""));
        let back: NormReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
