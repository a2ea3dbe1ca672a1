//! JSON documents with error paths.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at `{path}`: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

/// Parses `text`, reporting the JSON path of the first schema violation.
pub fn read_json<T: DeserializeOwned>(text: &str) -> Result<T, JsonError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| JsonError {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| JsonError { path: ".".into(), message: e.to_string() })?;
    Ok(value)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("document serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Deserialize)]
    #[allow(dead_code)]
    struct Doc {
        items: Vec<Item>,
    }

    #[derive(Debug, Deserialize)]
    #[allow(dead_code)]
    struct Item {
        question: String,
    }

    #[test]
    fn path_of_missing_field() {
        let e = read_json::<Doc>(r#"{"items":[{"question":"a"},{}]}"#).unwrap_err();
        assert_eq!(e.path, "items[1]");
        assert!(e.message.contains("question"));
        assert!(read_json::<Doc>("").is_err());
    }
}
