//! `{"n": 2, "terms": [{"exp": [2, 1], "coeff": "3/4"}, …]}` with exact rational
//! coefficient strings, terms in graded-lex order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{MultiIndex, Polynomial};
use crate::scalar::{format_rational, parse_rational};
use crate::ExactPolynomial;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

impl From<&ExactPolynomial> for PolynomialJson {
    fn from(p: &ExactPolynomial) -> Self {
        PolynomialJson {
            n: p.dimension(),
            terms: p
                .terms()
                .map(|(e, c)| TermJson {
                    exp: e.entries().to_vec(),
                    coeff: format_rational(c),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolynomialJson> for ExactPolynomial {
    type Error = Error;

    fn try_from(json: &PolynomialJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for t in &json.terms {
            if t.coeff.contains(['.', 'e', 'E']) {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {:?} must be an exact rational p/q",
                    t.coeff
                )));
            }
            let c = parse_rational(&t.coeff)
                .ok_or_else(|| Error::InvalidArgument(format!("bad coefficient {:?}", t.coeff)))?;
            terms.push((MultiIndex::new(t.exp.clone()), c));
        }
        Ok(Polynomial::from_terms(json.n, terms)?)
    }
}

impl Serialize for ExactPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = PolynomialJson::deserialize(d)?;
        ExactPolynomial::try_from(&json).map_err(serde::de::Error::custom)
    }
}

impl ExactPolynomial {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
