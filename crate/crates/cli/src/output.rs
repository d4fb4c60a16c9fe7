use std::fs;
use std::path::Path;

use clap::ValueEnum;
use eqstress::{io, Error, Framework64, Result, StressMatrix64};
use serde_json::Value;

use crate::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    /// The stress matrix when the command produces one, otherwise
    /// `key,value` rows of the scalar report fields.
    Csv,
    Human,
}

/// Everything a command produces.
pub struct Artifacts {
    pub report: Value,
    pub stress: Option<StressMatrix64>,
    pub framework: Option<Framework64>,
}

impl Artifacts {
    pub fn report(report: Value) -> Self {
        Self {
            report,
            stress: None,
            framework: None,
        }
    }
}

pub fn report_json(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Scalar leaves of the report, nested keys joined with dots.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        other => {
            if let Some(s) = scalar(other) {
                out.push((prefix.to_string(), s));
            }
        }
    }
}

fn human(report: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(map) = report {
        for (k, v) in map {
            let text = scalar(v).unwrap_or_else(|| v.to_string());
            s.push_str(&format!("{k}: {text}\n"));
        }
    }
    s
}

pub fn emit(a: &Artifacts, run: &RunConfig) -> Result<()> {
    if let Some(dir) = &run.out {
        fs::create_dir_all(dir).map_err(|e| Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        write(&dir.join("report.json"), &report_json(&a.report))?;
        if let Some(stress) = &a.stress {
            write(&dir.join("stress.csv"), &io::stress_to_csv(stress))?;
        }
        if let Some(f) = &a.framework {
            write(&dir.join("framework.json"), &(io::framework_to_json(f) + "\n"))?;
        }
    }
    let text = match run.format {
        Format::Json => report_json(&a.report),
        Format::Human => human(&a.report),
        Format::Csv => match &a.stress {
            Some(stress) => io::stress_to_csv(stress),
            None => {
                let mut rows = Vec::new();
                flatten("", &a.report, &mut rows);
                rows.iter().map(|(k, v)| format!("{k},{v}\n")).collect()
            }
        },
    };
    print!("{text}");
    Ok(())
}
