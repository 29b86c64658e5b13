use serde_json::{json, Value};

use crate::commands::RunOutput;
use crate::config::{Format, RunConfig};

pub const ARTIFACT: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

fn diagnostics(run: &RunOutput) -> Value {
    let jobs: Vec<Value> = run
        .jobs
        .iter()
        .map(|j| match &j.outcome {
            Ok(o) => json!({
                "eps": crate::commands::num(j.epsilon),
                "status": if j.ok() { "ok" } else { "check_failed" },
                "checks": o.checks.iter().map(|(name, held)| json!({ "name": name, "held": held })).collect::<Vec<_>>(),
            }),
            Err(e) => json!({ "eps": crate::commands::num(j.epsilon), "status": "error", "error": e }),
        })
        .collect();
    json!({ "artifact": ARTIFACT, "ok": run.ok(), "summary": run.summary.clone().unwrap_or(Value::Null), "jobs": jobs })
}

/// `# artifact` and `# config {...}` lines that open every CSV file.
pub fn header_comment(cfg: &RunConfig) -> String {
    format!("# {ARTIFACT}\n# config {}\n", cfg.echo())
}

pub fn render(cfg: &RunConfig, run: &RunOutput) -> String {
    match cfg.format {
        Format::Csv => {
            let mut out = header_comment(cfg);
            out.push_str(&run.csv_header);
            out.push('\n');
            for j in &run.jobs {
                match &j.outcome {
                    Ok(o) => o.csv_rows.iter().for_each(|r| {
                        out.push_str(r);
                        out.push('\n');
                    }),
                    Err(e) => out.push_str(&format!("# error eps={}: {}\n", skewho::spectrum::fmt17(j.epsilon), e.replace('\n', " "))),
                }
            }
            if let Some(s) = &run.summary {
                out.push_str(&format!("# summary {s}\n"));
            }
            out
        }
        Format::Json => {
            let results: Vec<Value> = run.jobs.iter().map(|j| j.outcome.as_ref().map_or(Value::Null, |o| o.result.clone())).collect();
            let doc = json!({ "config": cfg.echo(), "results": results, "diagnostics": diagnostics(run) });
            let mut s = serde_json::to_string_pretty(&doc).expect("report is always serializable");
            s.push('\n');
            s
        }
    }
}

/// One line per job for the terminal.
pub fn summary_lines(run: &RunOutput) -> Vec<String> {
    let mut lines: Vec<String> = run
        .jobs
        .iter()
        .map(|j| match &j.outcome {
            Ok(o) => {
                let failed: Vec<&str> = o.checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
                if failed.is_empty() {
                    format!("ok     eps={:e}", j.epsilon)
                } else {
                    format!("FAILED eps={:e} checks: {}", j.epsilon, failed.join(", "))
                }
            }
            Err(e) => format!("ERROR  eps={:e} {e}", j.epsilon),
        })
        .collect();
    if let Some(s) = &run.summary {
        lines.push(format!("summary {s}"));
    }
    lines
}
