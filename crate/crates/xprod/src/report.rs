use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Machine-readable outcome of one command. Keys are emitted in a fixed
/// order and objects are sorted, so equal inputs give equal bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 over every input file and spec, in the order they were read.
    pub inputs_sha256: String,
    pub params: Value,
    pub result: Value,
    pub certificates: Value,
    pub margins: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }

    pub fn result_bool(&self, key: &str) -> Option<bool> {
        self.result.get(key).and_then(Value::as_bool)
    }
}

/// Length-prefixed `(name, bytes)` records.
#[derive(Clone, Debug, Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn add(&mut self, name: &str, bytes: &[u8]) {
        for part in [name.as_bytes(), bytes] {
            self.hasher.update((part.len() as u64).to_le_bytes());
            self.hasher.update(part);
        }
    }

    pub fn hex(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}
