//! `--job FILE`: a JSON object naming the command and its flags, e.g.
//! `{"command": "verify-paper", "case": "main-ii", "n": 6}`.
//! It is turned back into arguments so clap validates it the same way.

use std::ffi::OsString;
use std::fmt;

use anyhow::Context;
use serde_json::Value;

#[derive(Debug)]
pub struct JobError(pub String);

impl fmt::Display for JobError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for JobError {}

fn bad(msg: String) -> anyhow::Error {
    JobError(msg).into()
}

/// Replaces `--job FILE` by the arguments it encodes. `None` if there is no `--job`.
pub fn expand(args: &[OsString]) -> anyhow::Result<Option<Vec<OsString>>> {
    let mut path = None;
    let mut rest = Vec::new();
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--job" {
            let p = it.next().ok_or_else(|| bad("--job needs a file".into()))?;
            path = Some(p.clone());
        } else if let Some(p) = s.strip_prefix("--job=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a.clone());
        }
    }
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading job file {}", path.to_string_lossy()))?;
    let job: Value = serde_json::from_str(&text).map_err(|e| bad(format!("job file is not JSON: {e}")))?;
    let mut out = vec![args.first().cloned().unwrap_or_else(|| "norm1lat".into())];
    out.extend(job_args(&job)?);
    out.extend(rest);
    Ok(Some(out))
}

pub fn job_args(job: &Value) -> anyhow::Result<Vec<OsString>> {
    let obj = job.as_object().ok_or_else(|| bad("job must be a JSON object".into()))?;
    let command = obj
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("job needs a string field \"command\"".into()))?;
    let mut out: Vec<OsString> = vec![command.replace('_', "-").into()];
    for (key, value) in obj {
        if key == "command" {
            continue;
        }
        if key == "job" {
            return Err(bad("jobs cannot nest".into()));
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let mut push = |v: &Value| -> anyhow::Result<()> {
            match v {
                Value::Null | Value::Bool(false) => {}
                Value::Bool(true) => out.push(flag.clone().into()),
                Value::String(s) => {
                    out.push(flag.clone().into());
                    out.push(s.into());
                }
                Value::Number(n) => {
                    out.push(flag.clone().into());
                    out.push(n.to_string().into());
                }
                _ => return Err(bad(format!("unsupported value for {key}"))),
            }
            Ok(())
        };
        match value {
            Value::Array(items) => items.iter().try_for_each(&mut push)?,
            v => push(v)?,
        }
    }
    Ok(out)
}
