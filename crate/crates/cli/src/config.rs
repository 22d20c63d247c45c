//! Config-file loading and flag/file merging. A config file is one JSON
//! object; command-line flags take precedence over its keys.

use std::fs;
use std::path::Path;

use pansharp::{Error, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// The config file's top-level object, or an empty one without `--config`.
pub fn load(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text)? {
        Value::Object(map) => Ok(map),
        _ => Err(Error::Config(format!("{}: expected a JSON object", path.display()))),
    }
}

/// Rejects keys a flat-option command does not understand.
pub fn check_keys(file: &Map<String, Value>, known: &[&str]) -> Result<()> {
    match file.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(Error::Config(format!("unknown config key '{k}'"))),
        None => Ok(()),
    }
}

/// Flag value if given, else the file's value under `key`.
pub fn pick<T: DeserializeOwned>(flag: Option<T>, file: &Map<String, Value>, key: &str) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            serde_json::from_value(v.clone()).map(Some).map_err(|e| Error::Config(format!("config key '{key}': {e}")))
        }
    }
}

pub fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required option --{name}")))
}

/// Parses a lowercase enum name through its serde representation.
pub fn parse_name<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_value(Value::String(text.to_string()))
        .map_err(|_| Error::InvalidParameter(format!("unknown {what} '{text}'")))
}
