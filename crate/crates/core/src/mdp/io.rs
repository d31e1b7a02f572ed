//! JSON instance documents.
//!
//! ```json
//! {
//!   "schemaVersion": "orlc.instance.v1",
//!   "generator": { "name": "random-tabular", "seed": 7, "params": { ... } },
//!   "instance": { "kind": "tabular", "states": 5, ..., "transitions": [[[...]]] }
//! }
//! ```
//!
//! Floats are written with shortest round-trip formatting, so documents
//! reload bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ContextualLinearMdp, TabularMdp};

pub const INSTANCE_SCHEMA_VERSION: &str = "orlc.instance.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub name: String,
    pub seed: u64,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    Tabular(TabularMdp),
    Contextual(ContextualLinearMdp),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceDocument {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorMeta>,
    pub instance: Instance,
}

impl InstanceDocument {
    pub fn new(instance: Instance, generator: Option<GeneratorMeta>) -> Self {
        Self { schema_version: INSTANCE_SCHEMA_VERSION.to_string(), generator, instance }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}
