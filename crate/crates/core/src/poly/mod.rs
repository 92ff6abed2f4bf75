//! Exact multivariate polynomial algebra over the integers.
//!
//! - [`Polynomial`]: sparse canonical polynomial with `BigInt` coefficients
//! - [`PolyMap`]: tuple of polynomials, a map `Z^a -> Z^b`
//! - [`Metrics`]: degree, coefficient norm, max/mean monomial counts
//!
//! Serialized forms carry coefficients as decimal strings so that values of
//! any size survive JSON unchanged.

mod expr;
mod map;
mod monomial;
mod polynomial;

pub(crate) use expr::{describe, tokenize, ExprParser, Spanned, Token};
pub use map::{Metrics, PolyMap};
pub use monomial::Monomial;
pub use polynomial::{canonicalize, Polynomial};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One serialized term: `{"c": "<decimal>", "e": [e1, ..., ea]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub c: String,
    pub e: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyMapRecord {
    pub domain: usize,
    pub codomain: usize,
    pub components: Vec<Vec<TermRecord>>,
}

fn terms_to_records(p: &Polynomial) -> Vec<TermRecord> {
    p.terms()
        .iter()
        .map(|(m, c)| TermRecord {
            c: c.to_string(),
            e: m.exponents().to_vec(),
        })
        .collect()
}

fn records_to_poly(num_vars: usize, records: &[TermRecord]) -> Result<Polynomial, Error> {
    let raw = records
        .iter()
        .map(|r| {
            let c: BigInt = r
                .c
                .parse()
                .map_err(|_| Error::Serialization(format!("bad decimal coefficient `{}`", r.c)))?;
            Ok((Monomial::new(r.e.clone()), c))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    canonicalize(num_vars, raw)
}

impl From<&PolyMap> for PolyMapRecord {
    fn from(map: &PolyMap) -> Self {
        PolyMapRecord {
            domain: map.domain_dim(),
            codomain: map.codomain_dim(),
            components: map.components().iter().map(terms_to_records).collect(),
        }
    }
}

impl TryFrom<PolyMapRecord> for PolyMap {
    type Error = Error;

    fn try_from(rec: PolyMapRecord) -> Result<Self, Error> {
        if rec.components.len() != rec.codomain {
            return Err(Error::dims(
                "serialized map codomain",
                rec.codomain,
                rec.components.len(),
            ));
        }
        let components = rec
            .components
            .iter()
            .map(|terms| records_to_poly(rec.domain, terms))
            .collect::<Result<Vec<_>, Error>>()?;
        PolyMap::new(rec.domain, components)
    }
}

impl Serialize for PolyMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyMapRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = PolyMapRecord::deserialize(d)?;
        PolyMap::try_from(rec).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        terms_to_records(self).serialize(s)
    }
}

/// A bare term list carries no variable count; it is taken from the first
/// term (the empty list reads back as the zero polynomial in no variables).
impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        let num_vars = records.first().map(|r| r.e.len()).unwrap_or(0);
        records_to_poly(num_vars, &records).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polymap_json_shape() {
        let p = Polynomial::parse("-x1 + 123456789012345678901234567890*x2^2", &["x1", "x2"])
            .unwrap();
        let map = PolyMap::new(2, vec![p]).unwrap();
        let json = serde_json::to_value(&map).unwrap();
        assert_eq!(json["domain"], 2);
        assert_eq!(json["codomain"], 1);
        assert_eq!(
            json["components"][0][0]["c"],
            "123456789012345678901234567890"
        );
        assert_eq!(json["components"][0][0]["e"], serde_json::json!([0, 2]));
        let back: PolyMap = serde_json::from_value(json).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn rejects_bad_records() {
        let bad_len = r#"{"domain":2,"codomain":1,"components":[[{"c":"1","e":[1]}]]}"#;
        assert!(serde_json::from_str::<PolyMap>(bad_len).is_err());
        let bad_c = r#"{"domain":1,"codomain":1,"components":[[{"c":"1.5","e":[1]}]]}"#;
        assert!(serde_json::from_str::<PolyMap>(bad_c).is_err());
        let bad_count = r#"{"domain":1,"codomain":2,"components":[[]]}"#;
        assert!(serde_json::from_str::<PolyMap>(bad_count).is_err());
    }

    #[test]
    fn noncanonical_input_is_canonicalized() {
        let json = r#"{"domain":1,"codomain":1,"components":[[{"c":"2","e":[1]},{"c":"-2","e":[1]},{"c":"4","e":[0]}]]}"#;
        let map: PolyMap = serde_json::from_str(json).unwrap();
        assert_eq!(map.component(0), &Polynomial::constant(1, 4));
    }
}
