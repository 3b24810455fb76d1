//! Versioned, checksummed JSON files.
//!
//! ```text
//! {
//!   "schema":  "<name>",
//!   "version": <u32>,
//!   "sha256":  "<hex digest of the compact JSON encoding of payload>",
//!   "payload": { ... }
//! }
//! ```
//!
//! The digest covers `serde_json::to_vec(&payload)` of the typed payload, so a
//! loader re-encodes what it parsed and compares digests. Floats round-trip
//! exactly (`float_roundtrip`), which keeps the digest stable.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<T> {
    schema: String,
    version: u32,
    sha256: String,
    payload: T,
}

pub fn digest<T: Serialize>(payload: &T) -> Result<String> {
    let bytes = serde_json::to_vec(payload)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Pretty-printed envelope text, newline terminated.
pub fn seal<T: Serialize>(schema: &str, version: u32, payload: &T) -> Result<String> {
    let envelope = Envelope {
        schema: schema.to_string(),
        version,
        sha256: digest(payload)?,
        payload,
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    Ok(text)
}

pub fn open<T: Serialize + DeserializeOwned>(text: &str, schema: &str, version: u32) -> Result<T> {
    let envelope: Envelope<T> = serde_json::from_str(text)?;
    if envelope.schema != schema {
        return Err(Error::Asset(format!(
            "expected schema {schema:?}, found {:?}",
            envelope.schema
        )));
    }
    if envelope.version != version {
        return Err(Error::Asset(format!(
            "{schema}: unsupported version {} (expected {version})",
            envelope.version
        )));
    }
    let actual = digest(&envelope.payload)?;
    if actual != envelope.sha256 {
        return Err(Error::Asset(format!(
            "{schema}: checksum mismatch (file says {}, payload hashes to {actual})",
            envelope.sha256
        )));
    }
    Ok(envelope.payload)
}
