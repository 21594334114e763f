//! Model file container.
//!
//! ```text
//! negclass-model
//! version <u32>
//! sha256 <hex digest of payload>
//! length <payload bytes>
//!
//! <JSON payload>
//! ```
//!
//! The payload is compact JSON of [`TrainedModel`]; floats are written in
//! shortest round-trip form and read back exactly.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::TrainedModel;
use crate::error::{ModelError, ModelResult};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "negclass-model";

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Serializes a model into its container bytes.
pub fn write_model(model: &TrainedModel) -> ModelResult<Vec<u8>> {
    let payload = serde_json::to_vec(model).map_err(|e| ModelError::Malformed(e.to_string()))?;
    let mut out = Vec::with_capacity(payload.len() + 128);
    write!(out, "{MAGIC}\nversion {FORMAT_VERSION}\nsha256 {}\nlength {}\n\n", sha256_hex(&payload), payload.len())
        .expect("write to Vec");
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Parses container bytes, checking version, length, and checksum before
/// decoding the payload.
pub fn read_model(bytes: &[u8]) -> ModelResult<TrainedModel> {
    let mut rest = bytes;
    let mut next_line = |what: &str| -> ModelResult<String> {
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| ModelError::Truncated(format!("header ends before {what}")))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| ModelError::Malformed(format!("{what} line is not UTF-8")))?
            .to_string();
        rest = &rest[end + 1..];
        Ok(line)
    };
    let magic = next_line("magic")?;
    if magic != MAGIC {
        return Err(ModelError::Malformed(format!("not a model file (starts with `{magic}`)")));
    }
    let field = |line: String, key: &str| -> ModelResult<String> {
        line.strip_prefix(key)
            .and_then(|v| v.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| ModelError::Malformed(format!("expected `{key}` header, got `{line}`")))
    };
    let version: u32 = field(next_line("version")?, "version")?
        .parse()
        .map_err(|_| ModelError::Malformed("version is not an integer".into()))?;
    if version != FORMAT_VERSION {
        return Err(ModelError::Version { found: version, supported: FORMAT_VERSION });
    }
    let expected = field(next_line("sha256")?, "sha256")?;
    let length: usize = field(next_line("length")?, "length")?
        .parse()
        .map_err(|_| ModelError::Malformed("length is not an integer".into()))?;
    if !next_line("payload separator")?.is_empty() {
        return Err(ModelError::Malformed("missing blank line after header".into()));
    }
    let payload = rest;
    if payload.len() < length {
        return Err(ModelError::Truncated(format!("payload has {} of {length} bytes", payload.len())));
    }
    if payload.len() > length {
        return Err(ModelError::Malformed(format!("{} trailing bytes after payload", payload.len() - length)));
    }
    let actual = sha256_hex(payload);
    if actual != expected {
        return Err(ModelError::Checksum { expected, actual });
    }
    serde_json::from_slice(payload).map_err(|e| ModelError::Malformed(e.to_string()))
}

pub fn save_model(model: &TrainedModel, path: impl AsRef<Path>) -> ModelResult<()> {
    let path = path.as_ref();
    let bytes = write_model(model)?;
    std::fs::write(path, bytes).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })
}

pub fn load_model(path: impl AsRef<Path>) -> ModelResult<TrainedModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ModelError::Io { path: path.to_path_buf(), source })?;
    read_model(&bytes)
}
