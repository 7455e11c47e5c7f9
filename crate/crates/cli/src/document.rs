//! Versioned JSON documents wrapping one sequence spec.

use serde::{Deserialize, Serialize};

use kproj_core::seq::{SequenceSpec, SequenceView};
use kproj_core::Scalar;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// Scalars live in `Q(ζ_L)`; 1 means the rationals.
    pub cyclotomic_order: u32,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            cyclotomic_order: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub field: FieldConfig,
    /// Declared radix; must agree with the body when both have one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub body: SequenceSpec,
}

impl SpecDocument {
    pub fn new(name: &str, description: &str, field_order: u32, body: SequenceSpec) -> Self {
        let k = body.radix().ok();
        SpecDocument {
            version: FORMAT_VERSION,
            name: Some(name.to_string()),
            description: Some(description.to_string()),
            field: FieldConfig {
                cyclotomic_order: field_order,
            },
            k,
            body,
        }
    }

    /// Parses and validates, reporting the JSON path of schema errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: SpecDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Schema(format!(
                "at `{path}` (line {}, column {}): {inner}",
                inner.line(),
                inner.column()
            ))
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Schema(format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                self.version
            )));
        }
        if self.field.cyclotomic_order == 0 {
            return Err(CliError::Schema("cyclotomic_order must be positive".into()));
        }
        if let (Some(declared), Ok(actual)) = (self.k, self.body.radix()) {
            if declared != actual {
                return Err(CliError::Schema(format!(
                    "declared radix {declared} disagrees with the body radix {actual}"
                )));
            }
        }
        SequenceView::new(&self.body)?;
        Ok(())
    }

    pub fn radix(&self) -> Option<u32> {
        self.k.or_else(|| self.body.radix().ok())
    }

    /// Canonical bytes for hashing.
    pub fn body_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.body).expect("specs serialize")
    }

    /// Checks that `s` lies in the declared field.
    pub fn check_scalar(&self, index: u64, s: &Scalar) -> Result<(), CliError> {
        let l = self.field.cyclotomic_order;
        if !l.is_multiple_of(s.order()) {
            return Err(CliError::Schema(format!(
                "value {s} at index {index} is outside the declared field Q(zeta_{l})"
            )));
        }
        Ok(())
    }
}
