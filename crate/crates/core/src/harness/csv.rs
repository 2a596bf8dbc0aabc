//! CSV output with a `#` metadata header.

use std::fmt::Write as _;

/// Toolkit version written into every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Eb/N0 convention stated in simulation and figure outputs.
pub const EBNO_CONVENTION: &str = "sigma^2 = 1/(2 R Eb/N0), unit average symbol energy, R in bits per real symbol";

/// Comma separated table; rows are LF terminated and numbers use `.`
/// decimals (Rust `Display`, shortest round-trip form).
#[derive(Debug, Clone)]
pub struct CsvTable {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// Starts a table whose metadata carries the version, command, config
    /// hash and seed.
    pub fn new(command: &str, config_hash: &str, seed: u64, header: &[&str]) -> Self {
        Self {
            meta: vec![
                ("mlpolar".into(), VERSION.into()),
                ("command".into(), command.into()),
                ("config_hash".into(), config_hash.into()),
                ("seed".into(), seed.to_string()),
            ],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} {v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Formats a float so that it parses back to the same value. Very small or
/// large magnitudes use exponent form.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_layout() {
        let mut t = CsvTable::new("fig1", "00ff", 7, &["x", "y"]);
        t.meta("note", "a b");
        t.push(vec![num(0.5), num(1e-20)]);
        let text = t.render();
        assert_eq!(
            text,
            format!("# mlpolar {VERSION}\n# command fig1\n# config_hash 00ff\n# seed 7\n# note a b\nx,y\n0.5,1e-20\n")
        );
        assert!(!text.contains('\r'));
        for x in [0.0, 1.5, 1e-5, 3.25e-7, -2e300, 123456.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
