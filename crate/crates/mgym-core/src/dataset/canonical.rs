//! Canonical JSON rendering: object keys sorted lexicographically at every
//! level, no insignificant whitespace. Used wherever a stable byte form is
//! hashed (record content hashes, device fingerprints).

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};

/// Serialize any value to canonical JSON text.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| CoreError::serde("canonical json", e))?;
    let mut out = String::new();
    write_canonical(&v, &mut out);
    Ok(out)
}

/// Canonical form of an already-parsed JSON value.
pub fn canonical_value_string(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort_unstable();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                // Value::to_string on a string renders the quoted, escaped
                // JSON literal.
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push(':');
                write_canonical(&map[*key], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Hex SHA-256 of a string.
pub fn sha256_hex(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    hex::encode(hasher.finalize())
}

/// First 8 hex characters of the SHA-256 — the short content hash used in
/// record file names.
pub fn short_hash(text: &str) -> String {
    sha256_hex(text)[..8].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted_recursively() {
        let v = json!({"b": 1, "a": {"z": [1, 2, {"y": 0, "x": 1}], "a": null}});
        assert_eq!(
            canonical_value_string(&v),
            r#"{"a":{"a":null,"z":[1,2,{"x":1,"y":0}]},"b":1}"#
        );
    }

    #[test]
    fn insertion_order_does_not_matter() {
        let a = json!({"p": 1, "q": {"r": true, "s": "t"}});
        let b: Value = serde_json::from_str(r#"{"q": {"s": "t", "r": true}, "p": 1}"#).unwrap();
        assert_eq!(canonical_value_string(&a), canonical_value_string(&b));
    }

    #[test]
    fn strings_are_escaped() {
        let v = json!({"k\"ey": "va\nlue"});
        assert_eq!(canonical_value_string(&v), r#"{"k\"ey":"va\nlue"}"#);
    }

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(short_hash(""), "e3b0c442");
    }
}
