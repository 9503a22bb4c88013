use std::io::Write;
use std::path::{Path, PathBuf};

use dimer_core::entanglement::{EsdEvent, EventKind};
use dimer_core::units::NS_PER_US;
use serde::Serialize;

use crate::error::CliError;

/// Version of every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Shortest representation that parses back to the same value. Independent
/// of locale; switches to exponent form for very small or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// Renders a CSV table of numbers with `\n` line endings.
pub fn csv_table<I>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    csv_records(
        header,
        rows.into_iter().map(|r| r.into_iter().map(num).collect()),
    )
}

/// Renders pre-formatted CSV fields with `\n` line endings.
pub fn csv_records<I>(header: &[&str], rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let wrap = |e: String| CliError::Usage(format!("csv encoding failed: {e}"));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| wrap(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| wrap(e.to_string()))?;
    }
    w.into_inner().map_err(|e| wrap(e.to_string()))
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("plain data serializes");
    v.push(b'\n');
    v
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// `run.csv` → `run.json`.
pub fn sidecar_for(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

#[derive(Debug, Clone, Serialize)]
pub struct EventRecord {
    pub kind: &'static str,
    pub time_us: f64,
    pub time_ns: f64,
    /// Whether bisection localized the crossing to the requested resolution.
    pub resolved: bool,
    pub bracket_us: [f64; 2],
}

impl From<&EsdEvent> for EventRecord {
    fn from(e: &EsdEvent) -> Self {
        Self {
            kind: match e.kind {
                EventKind::Death => "death",
                EventKind::Birth => "birth",
            },
            time_us: e.time,
            time_ns: e.time * NS_PER_US,
            resolved: e.resolved,
            bracket_us: [e.bracket.0, e.bracket.1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip_and_use_a_decimal_point() {
        for x in [0.0, -2500.0, 0.1, 1e-7, 1.0 / 3.0, 6.02e23, -0.0] {
            let s = num(x);
            assert!(!s.contains(','));
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_uses_unix_newlines() {
        let bytes = csv_table(&["a", "b"], vec![vec![1.0, 2.5], vec![-0.5, 1e-9]]).unwrap();
        assert_eq!(
            String::from_utf8(bytes).unwrap(),
            "a,b\n1.0,2.5\n-0.5,1e-9\n"
        );
    }
}
