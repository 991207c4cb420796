use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::CliResult;

/// 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with `#` comment lines echoing the subcommand, the effective
/// configuration and any notes.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(subcommand: &str, cfg: &ExperimentConfig, notes: &[String], columns: &[&str]) -> Self {
        let mut text = format!("# qlump {subcommand}\n");
        for line in cfg.to_toml().lines().filter(|l| !l.is_empty()) {
            let _ = writeln!(text, "# {line}");
        }
        for note in notes {
            let _ = writeln!(text, "# {note}");
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
        let x = std::f64::consts::PI / 3.0;
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
    }
}
