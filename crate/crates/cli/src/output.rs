use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Error reported to the user, with the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;
pub const EXIT_TOO_LARGE: u8 = 5;

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<inputsel::Error> for Failure {
    fn from(e: inputsel::Error) -> Self {
        use inputsel::Error::*;
        let code = match e {
            InfeasibleTarget { .. } | InfeasibleConstraint { .. } | InfeasibleK { .. } => EXIT_INFEASIBLE,
            SingularLaplacian | GramianSingular | NotPositiveDefinite => EXIT_SINGULAR,
            InstanceTooLarge(_) => EXIT_TOO_LARGE,
            _ => EXIT_INVALID,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::invalid(format!("JSON: {e}"))
    }
}

/// Provenance embedded in every payload: the full invocation and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub invocation: String,
    pub seed: u64,
    pub version: &'static str,
}

impl Meta {
    pub fn new(seed: u64) -> Self {
        let args: Vec<String> = std::env::args()
            .enumerate()
            .map(|(i, a)| if i == 0 { "inputsel".to_string() } else { quote(&a) })
            .collect();
        Self { invocation: args.join(" "), seed, version: env!("CARGO_PKG_VERSION") }
    }

    /// Lines for `# ` comment headers of CSV payloads.
    pub fn header(&self) -> Vec<String> {
        vec![format!("invocation: {}", self.invocation), format!("seed: {}", self.seed), format!("version: {}", self.version)]
    }

    pub fn csv_header(&self) -> String {
        self.header().iter().map(|h| format!("# {h}\n")).collect()
    }
}

fn quote(arg: &str) -> String {
    if !arg.is_empty() && arg.chars().all(|c| c.is_ascii_alphanumeric() || "-_.,:/=+@".contains(c)) {
        arg.to_string()
    } else {
        format!("'{}'", arg.replace('\'', r"'\''"))
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON of `body` with a leading `meta` object; `body` must
/// serialize as a map.
pub fn json_document<T: Serialize>(meta: &Meta, body: &T) -> Result<String, Failure> {
    let mut text = serde_json::to_string_pretty(&Document { meta, body })?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::invalid(format!("stdout: {e}")))
        }
    }
}

/// `runs/x.csv` becomes `runs/x.aggregate.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}

/// Finite values only; JSON has no infinities.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// CSV cell for a float, keeping infinities readable.
pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Quotes a CSV cell when it contains separators.
pub fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
