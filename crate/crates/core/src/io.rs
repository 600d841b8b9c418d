//! CSV matrices and instance files.

use std::io::Read;
use std::path::Path;

use crate::applications::Instance;
use crate::error::{ComaxError, Result};
use crate::numerics::Matrix;

/// Comma-separated rows; blank lines and lines starting with `#` are skipped.
pub fn read_csv_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ComaxError::InvalidInput(format!("csv: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        ComaxError::InvalidInput(format!("csv value {s:?} is not a finite number"))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix_csv<R: Read>(reader: R) -> Result<Matrix> {
    Matrix::from_rows(&read_csv_rows(reader)?)
}

/// Rows joined by newlines; values in shortest round-trip form.
pub fn matrix_to_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses an instance JSON. `A` or `Sigma` may be a list of rows, an
/// embedded CSV string, or a path to a CSV file relative to `base`.
pub fn parse_instance(text: &str, base: Option<&Path>) -> Result<Instance> {
    let mut value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ComaxError::InvalidInput(format!("instance json: {e}")))?;
    if let Some(obj) = value.as_object_mut() {
        for key in ["A", "Sigma"] {
            if let Some(serde_json::Value::String(s)) = obj.get(key) {
                let rows = if s.contains(',') || s.contains('\n') {
                    read_csv_rows(s.as_bytes())?
                } else {
                    let path = base.map_or_else(|| Path::new(s).to_path_buf(), |b| b.join(s));
                    let file = std::fs::File::open(&path).map_err(|e| {
                        ComaxError::InvalidInput(format!("{}: {e}", path.display()))
                    })?;
                    read_csv_rows(file)?
                };
                obj.insert(
                    key.into(),
                    serde_json::to_value(rows).expect("rows serialize"),
                );
            }
        }
    }
    serde_json::from_value(value).map_err(|e| ComaxError::InvalidInput(format!("instance: {e}")))
}

/// Reads an instance from `.json`, or a bare factor matrix from `.csv`
/// with sparsity `s`.
pub fn load_instance(path: &Path, s: Option<usize>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ComaxError::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut inst = if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        let a = read_matrix_csv(text.as_bytes())?;
        let n = a.cols();
        Instance::from_factor(&a, s.unwrap_or(n))
    } else {
        parse_instance(&text, path.parent())?
    };
    if let Some(s) = s {
        inst.s = s;
    }
    Ok(inst)
}

/// Instance JSON with `A` embedded as CSV text.
pub fn instance_to_json(inst: &Instance) -> String {
    let mut value = serde_json::to_value(inst).expect("instance serializes");
    if let (Some(obj), Some(a)) = (value.as_object_mut(), &inst.a) {
        obj.insert("A".into(), serde_json::Value::String(matrix_to_csv(a)));
    }
    let mut text = serde_json::to_string_pretty(&value).expect("json");
    text.push('\n');
    text
}
