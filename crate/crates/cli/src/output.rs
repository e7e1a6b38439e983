use std::io::Write;
use std::path::{Path, PathBuf};

use morrey_core::report::{round_sig, Format};
use morrey_core::{Error, SampledFunction};
use serde::Serialize;
use serde_json::Value;

use crate::args::Cli;
use crate::error::CliResult;

/// Writes `text` to `out`, or to standard output.
pub fn write_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())).into()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::data(format!("cannot write to standard output: {e}")).into()),
    }
}

/// Rounds every float in `v` to the report precision.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded numbers and a trailing newline.
pub fn json_text(value: &impl Serialize) -> CliResult<String> {
    let v = rounded(serde_json::to_value(value).map_err(Error::from)?);
    Ok(serde_json::to_string_pretty(&v).map_err(Error::from)? + "\n")
}

/// `t,value` CSV, or `{"t": [...], "value": [...]}`.
pub fn function_text(f: &SampledFunction, format: Format) -> CliResult<String> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            f.write_csv(&mut buf)?;
            Ok(String::from_utf8(buf).map_err(|e| Error::data(e.to_string()))?)
        }
        Format::Json => {
            let t: Vec<f64> = f.grid().nodes().collect();
            let doc = serde_json::json!({ "t": t, "value": f.values() });
            Ok(serde_json::to_string_pretty(&doc).map_err(Error::from)? + "\n")
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    invocation: &'a Cli,
    resolved: &'a Value,
}

fn manifest_path(cli: &Cli) -> Option<PathBuf> {
    cli.global.manifest.clone().or_else(|| {
        cli.global.out.as_ref().map(|out| {
            let mut name = out.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    })
}

/// Echoes the invocation and the fully resolved configuration.
pub fn write_manifest(cli: &Cli, resolved: &Value) -> CliResult<()> {
    let manifest = Manifest { tool: "morrey", version: env!("CARGO_PKG_VERSION"), invocation: cli, resolved };
    let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)? + "\n";
    match manifest_path(cli) {
        Some(path) => write_text(Some(&path), &text),
        None => std::io::stderr()
            .write_all(text.as_bytes())
            .map_err(|e| Error::data(format!("cannot write to standard error: {e}")).into()),
    }
}
