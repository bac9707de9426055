//! Fixture corpus runner. Each case under `<dir>/cases/*.json` reads
//! `{"name", "provenance", "args": [...], "expect": {"exit": n, "json": {...}}}`; `{dir}` in an
//! argument expands to the corpus directory, and every key of `expect.json` must match the
//! command's JSON output exactly.

use std::path::Path;

use serde_json::{json, Value};

use crate::cmd::load;
use crate::{run, CliResult, Failure, Outcome, EXIT_DATA, EXIT_FALSE, EXIT_NOINPUT, EXIT_TRUE};

pub struct CaseResult {
    pub name: String,
    pub provenance: String,
    pub error: Option<String>,
}

pub fn run_case(dir: &Path, path: &Path) -> CliResult<CaseResult> {
    let case = load(path)?;
    let bad = |m: &str| Failure::new(EXIT_DATA, format!("{}: {m}", path.display()));
    let name = case.get("name").and_then(Value::as_str).ok_or_else(|| bad("at /name: expected a string"))?.to_string();
    let provenance = case
        .get("provenance")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("at /provenance: expected a string"))?
        .to_string();
    let args = case.get("args").and_then(Value::as_array).ok_or_else(|| bad("at /args: expected an array"))?;
    let mut argv = vec!["localg".to_string(), "--json".to_string()];
    for (i, a) in args.iter().enumerate() {
        let s = a.as_str().ok_or_else(|| bad(&format!("at /args/{i}: expected a string")))?;
        argv.push(s.replace("{dir}", &dir.display().to_string()));
    }
    let expect = case.get("expect").ok_or_else(|| bad("missing field \"expect\""))?;
    let exit = expect.get("exit").and_then(Value::as_i64).ok_or_else(|| bad("at /expect/exit: expected an integer"))?;
    let r = run(&argv);
    let mut error = None;
    if r.code as i64 != exit {
        error = Some(format!("exit {} (expected {exit}) {}", r.code, r.stderr.trim()));
    } else if let Some(Value::Object(want)) = expect.get("json") {
        let got = r.json.unwrap_or(Value::Null);
        for (k, v) in want {
            if got.get(k) != Some(v) {
                error = Some(format!("{k}: got {}, expected {v}", got.get(k).unwrap_or(&Value::Null)));
                break;
            }
        }
    }
    Ok(CaseResult { name, provenance, error })
}

pub fn verify(dir: &Path) -> CliResult<Outcome> {
    let cases_dir = dir.join("cases");
    let mut paths: Vec<_> = std::fs::read_dir(&cases_dir)
        .map_err(|e| Failure::new(EXIT_NOINPUT, format!("cannot read {}: {e}", cases_dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::new(EXIT_NOINPUT, format!("no fixture cases in {}", cases_dir.display())));
    }
    let mut table = Vec::new();
    let mut failed = Vec::new();
    for p in &paths {
        let r = run_case(dir, p)?;
        let status = match &r.error {
            None => format!("PASS  [{}]", r.provenance),
            Some(e) => {
                failed.push(r.name.clone());
                format!("FAIL  {e}  [{}]", r.provenance)
            }
        };
        table.push((r.name, status));
    }
    let json = json!({"total": paths.len(), "passed": paths.len() - failed.len(), "failed": failed});
    Ok(Outcome { code: if failed.is_empty() { EXIT_TRUE } else { EXIT_FALSE }, json, table, cert: None })
}
