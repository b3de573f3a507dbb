//! JSON persistence for bodies, reports and sweep summaries.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::support_body::{SupportBody, DEFAULT_EPS_CONVEX};

pub const BODY_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BodyFile {
    version: u32,
    a0: f64,
    #[serde(default)]
    cos: Vec<f64>,
    #[serde(default)]
    sin: Vec<f64>,
}

/// Parses a body from JSON text; `path` only labels errors.
pub fn parse_body(text: &str, path: &Path) -> Result<SupportBody> {
    let file: BodyFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    if file.version != BODY_FORMAT_VERSION {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            column: 0,
            msg: format!("field `version`: unsupported value {}", file.version),
        });
    }
    let body = SupportBody::new(file.a0, file.cos, file.sin)?;
    body.validate_default(DEFAULT_EPS_CONVEX)?;
    Ok(body)
}

/// Reads and validates a body file.
pub fn load_body(path: impl AsRef<Path>) -> Result<SupportBody> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_body(&text, path)
}

pub fn body_to_json(body: &SupportBody) -> String {
    let file = BodyFile {
        version: BODY_FORMAT_VERSION,
        a0: body.a0(),
        cos: body.cos_coeffs().to_vec(),
        sin: body.sin_coeffs().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("body serializes")
}

pub fn save_body(body: &SupportBody, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &body_to_json(body))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("value serializes");
    write_text(path.as_ref(), &text)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support_body::random_body;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("body.json");
        for body in [
            SupportBody::disk(1.0),
            random_body(3, 6, 2.0).unwrap().translate([0.1, -1.0 / 3.0]),
        ] {
            save_body(&body, &path).unwrap();
            let back = load_body(&path).unwrap();
            assert_eq!(back.a0().to_bits(), body.a0().to_bits());
            for (a, b) in back.cos_coeffs().iter().zip(body.cos_coeffs()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
            for (a, b) in back.sin_coeffs().iter().zip(body.sin_coeffs()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
            assert_eq!(back, body);
        }
    }

    #[test]
    fn non_convex_file_is_rejected() {
        let err = parse_body(
            r#"{"version": 1, "a0": 1, "cos": [0, 0.5]}"#,
            Path::new("b.json"),
        );
        assert!(matches!(err, Err(Error::NotConvex { .. })), "{err:?}");
    }

    #[test]
    fn missing_sin_defaults_to_zero() {
        let body = parse_body(
            r#"{"version": 1, "a0": 1, "cos": [0, 0.2]}"#,
            Path::new("b.json"),
        )
        .unwrap();
        assert!(body.sin_coeffs().iter().all(|&s| s == 0.0));
        assert_eq!(body.cos_coeffs()[1], 0.2);
    }

    #[test]
    fn malformed_file_reports_position() {
        let err = parse_body(
            "{\n  \"version\": 1,\n  \"a0\": oops\n}",
            Path::new("b.json"),
        );
        match err {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_body(r#"{"version": 2, "a0": 1}"#, Path::new("b.json")),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_body(r#"{"version": 1, "a0": 1, "tan": []}"#, Path::new("b.json")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_body("/nonexistent/body.json"),
            Err(Error::Io { .. })
        ));
    }
}
