//! Instance files: `{"sigma": [[..],[..]], "mu": [..], "r": [[..],[..]], "name": ".."}`.

use std::path::Path;

use serde_json::Value;
use srbm2d::{Matrix2, SrbmData, Vector2};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub name: String,
    pub data: SrbmData,
}

pub fn load(path: &Path) -> Result<InstanceFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    parse(&text, &fallback).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str, fallback_name: &str) -> Result<InstanceFile, CliError> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Parse("top level must be an object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "sigma" | "mu" | "r" | "name") {
            return Err(CliError::Parse(format!("{key}: unknown field")));
        }
    }
    let field = |k: &str| obj.get(k).ok_or_else(|| CliError::Parse(format!("{k}: missing field")));
    let sigma = matrix(field("sigma")?, "sigma")?;
    let mu = vector(field("mu")?, "mu")?;
    let r = matrix(field("r")?, "r")?;
    let name = match obj.get("name") {
        None => fallback_name.to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(CliError::Parse("name: expected a string".into())),
    };
    Ok(InstanceFile {
        name,
        data: SrbmData::new(sigma, mu, r),
    })
}

fn number(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Parse(format!("{path}: expected a finite number")))
}

fn pair(v: &Value, path: &str) -> Result<[f64; 2], CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::Parse(format!("{path}: expected an array of 2 numbers")))?;
    if arr.len() != 2 {
        return Err(CliError::Parse(format!("{path}: expected 2 entries, found {}", arr.len())));
    }
    Ok([number(&arr[0], &format!("{path}[0]"))?, number(&arr[1], &format!("{path}[1]"))?])
}

fn vector(v: &Value, path: &str) -> Result<Vector2, CliError> {
    let [a, b] = pair(v, path)?;
    Ok(Vector2::new(a, b))
}

fn matrix(v: &Value, path: &str) -> Result<Matrix2, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::Parse(format!("{path}: expected a 2×2 array")))?;
    if rows.len() != 2 {
        return Err(CliError::Parse(format!("{path}: expected 2 rows, found {}", rows.len())));
    }
    let r0 = pair(&rows[0], &format!("{path}[0]"))?;
    let r1 = pair(&rows[1], &format!("{path}[1]"))?;
    Ok(Matrix2::from_rows([r0, r1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_identity() {
        let f = parse(r#"{"sigma": [[1, 0], [0, 1]], "mu": [-1, -1], "r": [[1, 0], [0, 1]]}"#, "id").unwrap();
        assert_eq!(f.name, "id");
        assert_eq!(f.data, SrbmData::identity());
    }

    #[test]
    fn reports_field_paths() {
        let bad = r#"{"sigma": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "mu": [-1, -1], "r": [[1, 0], [0, 1]]}"#;
        match parse(bad, "x") {
            Err(CliError::Parse(m)) => assert!(m.starts_with("sigma"), "{m}"),
            other => panic!("{other:?}"),
        }
        match parse(r#"{"sigma": [[1, 0], [0, 1]], "mu": [-1, "a"], "r": [[1, 0], [0, 1]]}"#, "x") {
            Err(CliError::Parse(m)) => assert!(m.starts_with("mu[1]"), "{m}"),
            other => panic!("{other:?}"),
        }
        match parse("{\n  \"sigma\": [[1, 0], [0, 1]],\n  oops\n}", "x") {
            Err(CliError::Parse(m)) => assert!(m.starts_with("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
