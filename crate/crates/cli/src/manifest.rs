use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hamlab::io::sig12;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn read(path: &Path, e: std::io::Error) -> Self {
        CliError::usage(format!("cannot read {}: {e}", path.display()))
    }
}

impl From<hamlab::Error> for CliError {
    fn from(e: hamlab::Error) -> Self {
        let code = if e.is_resource_limit() { EXIT_RESOURCE } else { EXIT_USAGE };
        CliError { code, msg: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

/// Everything needed to reproduce a run. Thread count is left out: outputs
/// do not depend on it.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str, flags: &impl Serialize, seed: Option<u64>, inputs: Vec<PathBuf>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            flags: serde_json::to_value(flags).expect("flags serialize"),
            seed,
            inputs,
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}

pub enum Body {
    /// Tabular text; the manifest goes in as a leading `# manifest:` line.
    Table(String),
    /// A JSON report; the manifest goes in under a `manifest` key.
    Report(Value),
    /// A file in some module's own format, left untouched.
    Raw(String),
}

/// Writes `body` to `out` (plus a `.manifest.json` sidecar) or to stdout.
pub fn emit(mut manifest: RunManifest, out: Option<&Path>, body: Body) -> CliResult<()> {
    let sidecar = out.map(|p| {
        let mut s = p.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    });
    if let (Some(p), Some(s)) = (out, &sidecar) {
        manifest.outputs = vec![p.to_path_buf(), s.clone()];
    }
    let text = match body {
        Body::Table(t) => format!("# manifest: {}\n{t}", manifest.json()),
        Body::Report(mut v) => {
            round_floats(&mut v);
            if let Value::Object(m) = &mut v {
                m.insert("manifest".into(), serde_json::to_value(&manifest).expect("manifest serializes"));
            }
            serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
        }
        Body::Raw(t) => {
            if out.is_none() {
                eprintln!("# manifest: {}", manifest.json());
            }
            t
        }
    };
    match (out, sidecar) {
        (Some(p), Some(s)) => {
            write(p, &text)?;
            write(&s, &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"))
        }
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = sig12(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Joins fields with `sep`, floats at 12 significant digits.
pub fn row(fields: &[f64], sep: &str) -> String {
    fields.iter().map(|&x| sig12(x)).collect::<Vec<_>>().join(sep)
}
