//! Number formatting, CSV layout and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

/// Formats `x` with 17 significant digits so that it parses back to the
/// same `f64`. Positional notation for decimal exponents in `-5..=15`,
/// scientific otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 && x.is_sign_negative() {
            "-0.0".to_string()
        } else if x == 0.0 {
            "0.0".to_string()
        } else {
            x.to_string()
        };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..=15).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// CSV document: a manifest comment line, a header row and numeric rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new<M: Serialize>(manifest: &M, columns: &[&str]) -> Self {
        let json = serde_json::to_string(manifest).expect("manifest serializes");
        let mut text = format!("# manifest: {json}\n");
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    /// Row whose first cell is a label.
    pub fn labeled_row(&mut self, label: &str, values: &[f64], trailer: &str) {
        let _ = write!(self.text, "{label}");
        for &v in values {
            let _ = write!(self.text, ",{}", fmt_f64(v));
        }
        if !trailer.is_empty() {
            let _ = write!(self.text, ",{trailer}");
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `contents` to a temporary file beside `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
