//! Exact checking of the polynomial identities
//! `v − s₁(r − xᵀx) − s₂ = εxᵀx` and `−∇vᵀf − t₁(r − xᵀx) − t₂ = εxᵀx`,
//! where each `sᵢ`, `tᵢ` is a list of polynomials whose squares are summed.

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::VectorField;
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::scalar::{format_rational, parse_rational};
use crate::ExactPolynomial;

pub const SOS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate {
    pub v: ExactPolynomial,
    pub epsilon: BigRational,
    pub r: BigRational,
    pub s1: Vec<ExactPolynomial>,
    pub s2: Vec<ExactPolynomial>,
    pub t1: Vec<ExactPolynomial>,
    pub t2: Vec<ExactPolynomial>,
}

impl SosCertificate {
    pub fn dimension(&self) -> usize {
        self.v.dimension()
    }

    fn validate(&self) -> Result<()> {
        if !self.epsilon.is_positive() || !self.r.is_positive() {
            return Err(Error::InvalidArgument(
                "epsilon and r must be positive".into(),
            ));
        }
        let n = self.dimension();
        let lists = [
            ("s1", &self.s1),
            ("s2", &self.s2),
            ("t1", &self.t1),
            ("t2", &self.t2),
        ];
        for (name, list) in lists {
            if let Some(p) = list.iter().find(|p| p.dimension() != n) {
                return Err(Error::InvalidArgument(format!(
                    "{name} entry has dimension {} but v has {n}",
                    p.dimension()
                )));
            }
        }
        Ok(())
    }
}

/// File form: the certificate together with the vector field it refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCertificateDocument {
    pub schema_version: u32,
    pub vector_field: Vec<String>,
    pub v: ExactPolynomial,
    pub epsilon: String,
    pub r: String,
    #[serde(default)]
    pub s1: Vec<ExactPolynomial>,
    #[serde(default)]
    pub s2: Vec<ExactPolynomial>,
    #[serde(default)]
    pub t1: Vec<ExactPolynomial>,
    #[serde(default)]
    pub t2: Vec<ExactPolynomial>,
}

impl SosCertificateDocument {
    pub fn new(certificate: &SosCertificate, vector_field: &VectorField) -> Self {
        SosCertificateDocument {
            schema_version: SOS_SCHEMA_VERSION,
            vector_field: vector_field
                .components()
                .iter()
                .map(ToString::to_string)
                .collect(),
            v: certificate.v.clone(),
            epsilon: format_rational(&certificate.epsilon),
            r: format_rational(&certificate.r),
            s1: certificate.s1.clone(),
            s2: certificate.s2.clone(),
            t1: certificate.t1.clone(),
            t2: certificate.t2.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.schema_version != SOS_SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization is infallible")
    }

    pub fn into_parts(self) -> Result<(SosCertificate, VectorField)> {
        let rational = |name: &str, s: &str| {
            parse_rational(s)
                .ok_or_else(|| Error::InvalidArgument(format!("{name} = {s:?} is not a rational")))
        };
        let certificate = SosCertificate {
            epsilon: rational("epsilon", &self.epsilon)?,
            r: rational("r", &self.r)?,
            v: self.v,
            s1: self.s1,
            s2: self.s2,
            t1: self.t1,
            t2: self.t2,
        };
        certificate.validate()?;
        let field = VectorField::parse(&self.vector_field)?;
        Ok((certificate, field))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SosVerdict {
    pub holds: bool,
    /// `v − s₁(r − xᵀx) − s₂ − εxᵀx`.
    pub value_residual: ExactPolynomial,
    /// `−∇vᵀf − t₁(r − xᵀx) − t₂ − εxᵀx`.
    pub decay_residual: ExactPolynomial,
}

/// Expands both identities in exact arithmetic. `f` must be polynomial.
pub fn check_sos_certificate(cert: &SosCertificate, f: &VectorField) -> Result<SosVerdict> {
    cert.validate()?;
    let n = cert.dimension();
    if f.dimension() != n {
        return Err(Error::InvalidArgument(format!(
            "vector field has dimension {} but v has {n}",
            f.dimension()
        )));
    }
    let f = f.to_polynomials()?;
    let norm = Polynomial::squared_norm(n);
    let ball = Polynomial::constant(n, cert.r.clone()) - norm.clone();
    let margin = norm.scalar_mul(&cert.epsilon);
    let sos = |list: &[ExactPolynomial]| Polynomial::sum_of_squares(n, list);

    let value_residual =
        cert.v.clone() - sos(&cert.s1)? * ball.clone() - sos(&cert.s2)? - margin.clone();
    let mut flow = Polynomial::zero(n);
    for (i, fi) in f.iter().enumerate() {
        flow = flow + cert.v.diff(i)? * fi.clone();
    }
    let decay_residual = -flow - sos(&cert.t1)? * ball - sos(&cert.t2)? - margin;
    Ok(SosVerdict {
        holds: value_residual.is_zero() && decay_residual.is_zero(),
        value_residual,
        decay_residual,
    })
}
