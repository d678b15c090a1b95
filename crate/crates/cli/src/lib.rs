//! Scenario-driven front end for `hgdyn`.
//!
//! Exit codes: 0 pass, 1 fail, 2 validation or precondition error,
//! 3 window overflow.

pub mod commands;
pub mod report;
pub mod scenario;

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::commands::{run_command, Outcome};
use crate::report::{render, with_fields, Format};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hgdyn::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(hgdyn::Error::WindowOverflow { .. }) => 3,
            _ => 2,
        }
    }
}

pub struct Invocation<'a> {
    pub scenario: &'a Path,
    pub command: &'a str,
    pub args: &'a [String],
    pub format: Format,
    pub seed: u64,
}

pub struct Execution {
    pub output: String,
    pub exit_code: i32,
}

pub fn execute(inv: &Invocation) -> Result<Execution, CliError> {
    let loaded = scenario::load_file(inv.scenario)?;
    let out = run_command(&loaded, inv.command, inv.args, inv.seed)?;

    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let header = json!({
        "record": "header",
        "timestamp": timestamp,
        "scenario_hash": loaded.hash,
        "scenario": loaded.scenario,
        "command": inv.command,
        "args": inv.args,
        "seed": inv.seed,
    });

    let mut base = Map::new();
    base.insert("record".into(), json!("row"));
    base.insert("command".into(), json!(inv.command));
    base.insert("scenario_id".into(), json!(loaded.id()));
    base.insert("scenario_hash".into(), json!(loaded.hash));
    base.insert("convention".into(), json!(loaded.scenario.run.convention));
    base.insert("horizon".into(), json!(loaded.scenario.run.horizon));
    let verdict = out.outcome.label();
    let rows: Vec<Value> = out
        .rows
        .into_iter()
        .map(|payload| {
            let mut row = with_fields(&base, payload);
            row["verdict"] = json!(verdict);
            row
        })
        .collect();

    let output = render(Some(&header), &rows, inv.format)?;
    let exit_code = match out.outcome {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
    };
    Ok(Execution { output, exit_code })
}
