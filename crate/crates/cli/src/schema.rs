//! The JSON schemas shipped under `schemas/v1`, compiled once and used to
//! validate every input document before it is interpreted.

use std::sync::OnceLock;

use jsonschema::JSONSchema;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Quiver,
    Theory,
    Weight,
    AffineWeight,
    Slice,
    Envelope,
    Error,
    Diff,
}

impl Schema {
    pub const ALL: [Schema; 8] = [
        Schema::Quiver,
        Schema::Theory,
        Schema::Weight,
        Schema::AffineWeight,
        Schema::Slice,
        Schema::Envelope,
        Schema::Error,
        Schema::Diff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Quiver => "quiver",
            Schema::Theory => "theory",
            Schema::Weight => "weight",
            Schema::AffineWeight => "affine_weight",
            Schema::Slice => "slice",
            Schema::Envelope => "envelope",
            Schema::Error => "error",
            Schema::Diff => "diff",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Schema::Quiver => include_str!("../schemas/v1/quiver.schema.json"),
            Schema::Theory => include_str!("../schemas/v1/theory.schema.json"),
            Schema::Weight => include_str!("../schemas/v1/weight.schema.json"),
            Schema::AffineWeight => include_str!("../schemas/v1/affine_weight.schema.json"),
            Schema::Slice => include_str!("../schemas/v1/slice.schema.json"),
            Schema::Envelope => include_str!("../schemas/v1/envelope.schema.json"),
            Schema::Error => include_str!("../schemas/v1/error.schema.json"),
            Schema::Diff => include_str!("../schemas/v1/diff.schema.json"),
        }
    }

    fn compiled(self) -> &'static JSONSchema {
        static CELLS: [OnceLock<JSONSchema>; 8] = [const { OnceLock::new() }; 8];
        let index = Schema::ALL.iter().position(|&s| s == self).unwrap();
        CELLS[index].get_or_init(|| {
            let doc: Value = serde_json::from_str(self.source()).expect("shipped schema is valid JSON");
            JSONSchema::compile(&doc).expect("shipped schema compiles")
        })
    }

    /// Checks `doc` against the schema; the error lists every violation.
    pub fn validate(self, doc: &Value) -> Result<()> {
        let compiled = self.compiled();
        if let Err(errors) = compiled.validate(doc) {
            let messages: Vec<String> = errors
                .map(|e| {
                    let at = e.instance_path.to_string();
                    if at.is_empty() {
                        e.to_string()
                    } else {
                        format!("{at}: {e}")
                    }
                })
                .collect();
            return Err(CliError::Input(format!(
                "document does not match the {} schema: {}",
                self.name(),
                messages.join("; ")
            )));
        }
        Ok(())
    }
}
