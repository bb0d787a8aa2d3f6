use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use treeshift::Error;

/// Failure of a subcommand, carrying the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    /// Errors raised while reading an input document are usage errors.
    pub fn input(err: Error) -> Self {
        if err.is_resource() {
            Failure::from(err)
        } else {
            Failure::usage(err.to_string())
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = if err.is_resource() {
            3
        } else if matches!(err, Error::Document(_)) {
            2
        } else {
            1
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// Result payload plus notes; `code` is nonzero for partial results such as
/// sampled entropy bounds.
pub struct Outcome {
    pub result: Value,
    pub diagnostics: Vec<String>,
    pub code: i32,
}

impl Outcome {
    pub fn ok(result: Value) -> Self {
        Outcome {
            result,
            diagnostics: Vec::new(),
            code: 0,
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.diagnostics.push(text.into());
    }
}

pub fn digest(input: &[u8]) -> String {
    hex::encode(Sha256::digest(input))
}

pub fn envelope(command: &str, input: &[u8], result: Value, diagnostics: Vec<String>) -> Value {
    let mut obj = Map::new();
    obj.insert("command".into(), command.into());
    obj.insert("input_digest".into(), digest(input).into());
    obj.insert("result".into(), round_floats(result));
    obj.insert("diagnostics".into(), diagnostics.into());
    obj.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    Value::Object(obj)
}

/// Round every non-integer number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounds_to_twelve_digits() {
        let v = round_floats(json!({"x": 0.609_377_863_331_026_4, "n": 3, "l": [1.0 / 3.0]}));
        assert_eq!(v.to_string(), r#"{"l":[0.333333333333],"n":3,"x":0.609377863331}"#);
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
