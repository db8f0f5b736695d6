//! Run manifests and the `--check-manifest` validator.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use piterbarg_core::rate_study::RatePoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub started_at: String,
    pub finished_at: String,
    pub tool_version: String,
    pub results: Value,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, started_at: String, results: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            started_at,
            finished_at: now(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            results,
        }
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn required_results(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "estimate" => &["estimate", "budget"],
        "validate" => &["estimate", "corrected_estimate", "target", "tolerance", "status"],
        "plan" => &["budget"],
        "gap-decay" => &["report"],
        _ => return None,
    })
}

/// Checks a JSON manifest or a rate-study CSV table written by this tool.
/// Returns a short description on success.
pub fn check(text: &str) -> Result<String, String> {
    if text.trim_start().starts_with('{') {
        check_json(text)
    } else {
        check_csv(text)
    }
}

fn check_json(text: &str) -> Result<String, String> {
    let manifest: RunManifest = serde_json::from_str(text).map_err(|e| format!("not a run manifest: {e}"))?;
    let keys = required_results(&manifest.command).ok_or_else(|| format!("unknown command {:?}", manifest.command))?;
    for key in keys {
        if manifest.results.get(key).is_none() {
            return Err(format!("results.{key} missing for {}", manifest.command));
        }
    }
    for stamp in [&manifest.started_at, &manifest.finished_at] {
        chrono::DateTime::parse_from_rfc3339(stamp).map_err(|e| format!("bad timestamp {stamp:?}: {e}"))?;
    }
    // Numbers must survive a second serialization unchanged.
    let again: RunManifest = serde_json::from_str(&serde_json::to_string(&manifest).unwrap()).unwrap();
    if again != manifest {
        return Err("numeric fields do not round-trip".into());
    }
    Ok(format!("{} manifest", manifest.command))
}

fn check_csv(text: &str) -> Result<String, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty file")?;
    if header.trim() != RatePoint::CSV_HEADER {
        return Err(format!("unexpected CSV header {header:?}"));
    }
    let columns = RatePoint::CSV_HEADER.split(',').count();
    let mut rows = 0;
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(format!("row {}: expected {columns} fields, found {}", i + 1, fields.len()));
        }
        for f in fields {
            f.trim().parse::<f64>().map_err(|e| format!("row {}: {f:?}: {e}", i + 1))?;
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("CSV has no data rows".into());
    }
    Ok(format!("rate table with {rows} rows"))
}
