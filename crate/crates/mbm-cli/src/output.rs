//! CSV emission with a reproducibility header.
//!
//! Every file starts with comment lines carrying the tool version and
//! the full resolved configuration (including the master seed and, for
//! coded runs, the code description). `replay` rebuilds the run from
//! those lines alone; reruns are byte-identical for any worker count, so
//! the worker count is deliberately not recorded.

use std::fmt::Write as _;

/// Numeric cell format: 9 significant digits, scientific, '.' radix,
/// locale-independent.
pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.8e}", x)
    }
}

/// A CSV document under construction.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(command: &str, config: &[(String, String)]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# mbm {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(buf, "# command = {command}");
        for (k, v) in config {
            let _ = writeln!(buf, "# {k} = {v}");
        }
        Csv { buf }
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn columns(&mut self, names: &[&str]) {
        let _ = writeln!(self.buf, "{}", names.join(","));
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Parses the `# key = value` header of a generated file, returning the
/// command name and the key/value pairs in file order.
pub fn parse_header(text: &str) -> Option<(String, Vec<(String, String)>)> {
    let mut command = None;
    let mut pairs = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.strip_prefix("# ") else {
            if line.starts_with('#') {
                continue;
            }
            break; // header ends at the first non-comment line
        };
        if rest.starts_with("mbm ") {
            continue;
        }
        if let Some((k, v)) = rest.split_once(" = ") {
            if k == "command" {
                command = Some(v.to_string());
            } else {
                pairs.push((k.to_string(), v.to_string()));
            }
        }
    }
    command.map(|c| (c, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrip() {
        let cfg = vec![
            ("nr".to_string(), "4".to_string()),
            ("seed".to_string(), "42".to_string()),
        ];
        let mut csv = Csv::new("pep", &cfg);
        csv.columns(&["a", "b"]);
        csv.row(&[fmt_f(1.0), fmt_f(0.5)]);
        let text = csv.finish();
        let (cmd, pairs) = parse_header(&text).unwrap();
        assert_eq!(cmd, "pep");
        assert_eq!(pairs, cfg);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f(0.14644660940672627), "1.46446609e-1");
        assert_eq!(fmt_f(1.0), "1.00000000e0");
    }
}
