//! Rendering of subcommand results as CSV or JSON.

use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::Failure;

/// Flat rows as CSV with a header line.
pub fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Resource(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Resource(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Failure::Resource(format!("csv: {e}")))
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Resource(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => csv_rows(rows),
        Format::Json => json(rows),
    }
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Resource(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Failure::Resource(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        q: u64,
        value: f64,
    }

    #[test]
    fn csv_has_header() {
        let s = csv_rows(&[Row { q: 3, value: 0.5 }, Row { q: 4, value: 1.0 }]).unwrap();
        assert_eq!(s, "q,value\n3,0.5\n4,1.0\n");
    }

    #[test]
    fn json_is_an_array() {
        let s = render(&[Row { q: 3, value: 0.5 }], Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v[0]["q"], 3);
    }
}
