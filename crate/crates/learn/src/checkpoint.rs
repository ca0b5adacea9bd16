//! Versioned JSON container for trained models.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{LearnError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Checkpoint<C, P> {
    pub schema_version: u32,
    pub kind: String,
    pub config: C,
    pub parameters: P,
}

impl<C: Serialize + DeserializeOwned, P: Serialize + DeserializeOwned> Checkpoint<C, P> {
    pub fn new(kind: impl Into<String>, config: C, parameters: P) -> Self {
        Checkpoint {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            config,
            parameters,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| LearnError::Checkpoint(e.to_string()))
    }

    /// Parse and check the schema version and, when given, the kind.
    pub fn from_json(s: &str, kind: Option<&str>) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| LearnError::Checkpoint(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(LearnError::Checkpoint(format!("unsupported schema version {}", c.schema_version)));
        }
        if let Some(k) = kind {
            if c.kind != k {
                return Err(LearnError::Checkpoint(format!("expected kind {k:?}, found {:?}", c.kind)));
            }
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| LearnError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path, kind: Option<&str>) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| LearnError::Checkpoint(format!("{}: {e}", path.display())))?;
        Self::from_json(&s, kind)
    }
}
