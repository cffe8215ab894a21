//! Output envelopes and CSV formatting.
//!
//! Every JSON artifact embeds the fully resolved atomic parameters, the
//! tool version, and the seed, so any output can be re-run from itself.
//! CSV uses '.' decimals, scientific notation with 17 significant digits,
//! and `\n` line endings.

use std::fs;
use std::io::Write;
use std::path::Path;

use lyjump_core::atom::AtomParams;
use serde::Serialize;

use crate::config::{ParamsSource, RunConfig};

pub const TOOL: &str = "lyjump";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolved parameters with unit-suffixed keys.
#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub gamma_rad_s: f64,
    pub delta2_rad_s: f64,
    pub delta3_rad_s: f64,
    pub delta4_rad_s: f64,
    pub omega_rad_s: f64,
    pub omega_l_rad_s: f64,
}

impl From<&AtomParams> for ParamsOut {
    fn from(p: &AtomParams) -> Self {
        Self {
            gamma_rad_s: p.gamma,
            delta2_rad_s: p.delta2,
            delta3_rad_s: p.delta3,
            delta4_rad_s: p.delta4,
            omega_rad_s: p.omega,
            omega_l_rad_s: p.omega_l,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: &'static str,
    pub seed: u64,
    pub params: ParamsOut,
    pub params_source: ParamsSource,
    pub warnings: Vec<String>,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(mode: &'static str, cfg: &RunConfig, result: T) -> Self {
        let warnings = cfg
            .params
            .regime_warnings()
            .iter()
            .map(|w| w.to_string())
            .collect();
        Self {
            tool: TOOL,
            version: VERSION,
            mode,
            seed: cfg.seed,
            params: (&cfg.params).into(),
            params_source: cfg.params_source.clone(),
            warnings,
            result,
        }
    }

    pub fn push_warning(&mut self, warning: String) {
        self.warnings.push(warning);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a CSV file: `# `-prefixed header lines, one column-name line, then
/// rows of [`sci`]-formatted values.
pub fn write_csv(
    path: &Path,
    header_lines: &[String],
    columns: &str,
    rows: impl Iterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    let mut buf = String::new();
    for line in header_lines {
        buf.push_str("# ");
        buf.push_str(line);
        buf.push('\n');
    }
    buf.push_str(columns);
    buf.push('\n');
    for row in rows {
        let mut first = true;
        for value in row {
            if !first {
                buf.push(',');
            }
            buf.push_str(&sci(value));
            first = false;
        }
        buf.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(buf.as_bytes())?;
    Ok(())
}

/// Standard CSV header block: tool/version/mode, compact params JSON, seed.
pub fn csv_header(mode: &str, cfg: &RunConfig) -> Vec<String> {
    let params: ParamsOut = (&cfg.params).into();
    vec![
        format!("{TOOL} {VERSION} {mode}"),
        format!(
            "params: {}",
            serde_json::to_string(&params).expect("params serialize")
        ),
        format!("seed: {}", cfg.seed),
    ]
}

pub fn write_json(path: &Path, text: &str) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_has_seventeen_digits_and_round_trips() {
        for x in [2.04e-10, 1.0, -3.5e8, 0.0, 1.066274202475074e-5] {
            let s = sci(x);
            assert!(s.contains('e'));
            assert!(s.contains('.'));
            let mantissa: String = s
                .split('e')
                .next()
                .unwrap()
                .chars()
                .filter(|c| c.is_ascii_digit())
                .collect();
            assert_eq!(mantissa.len(), 17, "{s}");
            // 17 significant digits round-trip f64 exactly.
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }
}
