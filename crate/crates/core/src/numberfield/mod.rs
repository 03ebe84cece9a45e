//! Number fields, exact element arithmetic, CM detection and Minkowski
//! embeddings.

pub mod cm;
pub mod compositum;
pub mod element;
pub mod field;
pub mod lattice;

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use cm::{detect_cm, CmStructure};
pub use compositum::{adjoin_i, adjoin_sqrt, compositum_multiquadratic, rationals};
pub use element::FieldElement;
pub use field::{BasisOrigin, NumberField};

use crate::arith::{format_rational, parse_rational, IntPoly};
use crate::error::{Error, Result};

/// Field description file: `{"label", "min_poly", "integral_basis"}` with
/// coefficients constant-term first and rationals as `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldDescription {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub min_poly: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral_basis: Option<Vec<Vec<String>>>,
}

impl FieldDescription {
    pub fn of(field: &NumberField) -> Self {
        FieldDescription {
            label: Some(field.label().to_string()),
            min_poly: field.min_poly().coeffs().iter().map(|c| c.to_string()).collect(),
            integral_basis: Some(field.integral_basis().iter().map(|r| r.iter().map(format_rational).collect()).collect()),
        }
    }

    pub fn build(&self) -> Result<Arc<NumberField>> {
        let coeffs = self
            .min_poly
            .iter()
            .map(|s| s.trim().parse::<BigInt>().map_err(|_| Error::InvalidArgument(format!("bad coefficient {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let basis = match &self.integral_basis {
            None => None,
            Some(rows) => Some(
                rows.iter()
                    .map(|r| {
                        r.iter()
                            .map(|s| parse_rational(s).ok_or_else(|| Error::InvalidArgument(format!("bad rational {s:?}"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        NumberField::with_label(IntPoly::new(coeffs), basis, self.label.clone())
    }
}

/// Named fields used by the command line and the demo.
pub fn preset(name: &str) -> Result<Arc<NumberField>> {
    match name {
        "q" => Ok(rationals()),
        "gaussian" | "qi" => NumberField::with_label(IntPoly::from_i64(&[1, 0, 1]), None, Some("Q(i)".into())),
        "qsqrt-5" => NumberField::with_label(IntPoly::from_i64(&[5, 0, 1]), None, Some("Q(√-5)".into())),
        "qsqrt-23" => NumberField::with_label(IntPoly::from_i64(&[6, -1, 1]), None, Some("Q(√-23)".into())),
        "qsqrt5" => compositum_multiquadratic(&[5]),
        "qi-sqrt5" => compositum_multiquadratic(&[-1, 5]),
        other => Err(Error::InvalidArgument(format!("unknown field preset {other:?}"))),
    }
}
