use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ShearIndex;

/// `(s, p, q)` selecting `b^{s,q}_p` or `f^{s,q}_p`. `q` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
    #[serde(with = "ext_real")]
    pub q: f64,
}

impl SpaceParams {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        let par = SpaceParams { s, p, q };
        par.validate()?;
        Ok(par)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::param("s", format!("{} is not finite", self.s)));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::param("p", format!("{} not in (0, inf)", self.p)));
        }
        if !(self.q > 0.0) {
            return Err(Error::param("q", format!("{} not in (0, inf]", self.q)));
        }
        Ok(())
    }

    /// Exponent of `|Q|` in `||e_Q|| = |Q|^{-s+1/p-1/2}`.
    pub fn canonical_exponent(&self) -> f64 {
        -self.s + 1.0 / self.p - 0.5
    }

    /// Canonical weight `u_Q = ||e_Q||`.
    pub fn canonical_weight(&self) -> WeightSeq {
        WeightSeq::Power {
            exponent: self.canonical_exponent(),
        }
    }

    /// Constant `C` of the quasi-triangle inequality
    /// `||s + t|| <= C (||s|| + ||t||)` for the b and f norms.
    pub fn quasi_triangle_constant(&self) -> f64 {
        (1.0 / self.p.min(self.q) - 1.0).max(0.0).exp2()
    }
}

/// Positive weights `u_Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSeq {
    /// `u_Q = |Q|^exponent` (coarse cubes have `|Q| = 1`).
    Power { exponent: f64 },
    /// Tabulated weights; every index used must be present.
    Explicit { values: BTreeMap<ShearIndex, f64> },
}

impl WeightSeq {
    pub fn power(exponent: f64) -> Self {
        WeightSeq::Power { exponent }
    }

    pub fn explicit(values: BTreeMap<ShearIndex, f64>) -> Result<Self> {
        if let Some((q, w)) = values.iter().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::param("weight", format!("u = {w} at {q} is not positive")));
        }
        Ok(WeightSeq::Explicit { values })
    }

    pub fn value(&self, idx: &ShearIndex) -> Result<f64> {
        match self {
            WeightSeq::Power { exponent } => Ok(idx.measure_pow(*exponent)),
            WeightSeq::Explicit { values } => values
                .get(idx)
                .copied()
                .ok_or_else(|| Error::param("weight", format!("no weight for {idx}"))),
        }
    }
}

/// Serialize `f64` allowing `+inf` as the string `"inf"`.
pub mod ext_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() && *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => parse(&t).map_err(de::Error::custom),
        }
    }

    pub fn parse(t: &str) -> Result<f64, String> {
        match t.trim() {
            "inf" | "infinity" | "Inf" | "INF" => Ok(f64::INFINITY),
            other => other.parse::<f64>().map_err(|e| format!("`{other}`: {e}")),
        }
    }
}

pub use ext_real::parse as parse_ext_real;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SpaceParams::new(0.0, 0.0, 1.0).is_err());
        assert!(SpaceParams::new(0.0, f64::INFINITY, 1.0).is_err());
        assert!(SpaceParams::new(0.0, 1.0, f64::INFINITY).is_ok());
        assert!(SpaceParams::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn canonical_weight_of_single_cube() {
        let par = SpaceParams::new(0.5, 2.0, 1.0).unwrap();
        let q = ShearIndex::cone(1, 1, vec![0], vec![0, 0]).unwrap();
        // |Q| = 1/8, exponent -0.5 + 0.5 - 0.5 = -0.5
        let u = par.canonical_weight().value(&q).unwrap();
        assert!((u - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn infinite_q_round_trips_through_json() {
        let par = SpaceParams::new(1.0, 2.0, f64::INFINITY).unwrap();
        let text = serde_json::to_string(&par).unwrap();
        assert!(text.contains("\"inf\""));
        let back: SpaceParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, par);
    }
}
