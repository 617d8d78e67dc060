//! Subcommand bodies. Each returns the text it would print and its exit
//! code so the binary stays a thin shell.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use rentdiv_core::{
    build_envy_graph, check_constraints, check_envy_free, combined_solve, format_decimal, format_exact,
    max_welfare_assignment, oracle_solve, utilities, validate_certificate, ConstraintViolation, Objective,
    OracleObjective, SolveError, SolveStatus,
};

use crate::files::{
    parse_instance, parse_result, read_file, render, result_json, FileError, NamedInstance, ResultParts,
};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn ok(exit_code: i32, stdout: String) -> Self {
        CommandOutput { exit_code, stdout, stderr: String::new() }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        CommandOutput { exit_code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

#[derive(Debug, thiserror::Error)]
enum CommandError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn load(path: &Path) -> Result<NamedInstance, FileError> {
    parse_instance(&read_file(path)?)
}

fn exit_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Solved => EXIT_SOLVED,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
    }
}

fn solve_value(path: &Path, objective: Objective, trace: bool) -> Result<(Value, SolveStatus), CommandError> {
    let named = load(path)?;
    log::info!("solving {} (n={}) for {}", path.display(), named.instance.n(), objective.name());
    let outcome = combined_solve(&named.instance, objective)?;
    log::debug!("{} trace steps", outcome.trace.event_count());
    let parts = ResultParts {
        status: outcome.status,
        objective: objective.name(),
        allocation: outcome.allocation.as_ref(),
        utilities: outcome.utilities.as_ref(),
        value: &outcome.objective_value,
        certificate: outcome.certificate.as_ref(),
        trace: trace.then_some(&outcome.trace),
    };
    Ok((result_json(&named, &parts), outcome.status))
}

/// Solves one instance file; exit 0 solved, 2 infeasible, 1 on errors.
pub fn cmd_solve(path: &Path, objective: Objective, trace: bool) -> CommandOutput {
    match solve_value(path, objective, trace) {
        Ok((value, status)) => CommandOutput::ok(exit_for(status), render(&value)),
        Err(e) => CommandOutput::error(e),
    }
}

type SolveResult = Result<(Value, SolveStatus), CommandError>;

/// Solves every `*.json` file in `dir` concurrently. The output maps file
/// names to results (or `{"error": ...}`); the exit code is the worst one.
pub fn cmd_solve_dir(dir: &Path, objective: Objective, trace: bool) -> CommandOutput {
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) => return CommandOutput::error(format!("cannot read {}: {e}", dir.display())),
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(String, SolveResult)> = files
        .par_iter()
        .map(|p| {
            (
                p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
                solve_value(p, objective, trace),
            )
        })
        .collect();
    let mut out = Map::new();
    let mut exit = EXIT_SOLVED;
    for (name, result) in results {
        match result {
            Ok((value, status)) => {
                if status == SolveStatus::Infeasible && exit == EXIT_SOLVED {
                    exit = EXIT_INFEASIBLE;
                }
                out.insert(name, value);
            }
            Err(e) => {
                exit = EXIT_ERROR;
                out.insert(name, json!({ "error": e.to_string() }));
            }
        }
    }
    CommandOutput::ok(exit, render(&Value::Object(out)))
}

fn violation_text(named: &NamedInstance, v: &ConstraintViolation) -> String {
    let room = |j: &usize| &named.rooms[*j];
    match v {
        ConstraintViolation::BelowLower { room: j, rent, bound } => {
            format!("room {} rent {} is below its lower bound {bound}", room(j), format_exact(rent))
        }
        ConstraintViolation::AboveUpper { room: j, rent, bound } => {
            format!("room {} rent {} is above its upper bound {bound}", room(j), format_exact(rent))
        }
        ConstraintViolation::OverBudget { agent, room: j, rent, budget } => {
            format!(
                "agent {} pays {} for room {} over a budget of {budget}",
                named.agents[*agent],
                format_exact(rent),
                room(j)
            )
        }
        ConstraintViolation::TotalMismatch { expected, actual } => {
            format!("rents sum to {}, not the total rent {}", format_exact(actual), format_exact(expected))
        }
    }
}

fn verify_value(instance_path: &Path, result_path: &Path) -> Result<(Value, bool), FileError> {
    let named = load(instance_path)?;
    let result = parse_result(&named, &read_file(result_path)?)?;
    let inst = &named.instance;
    let mut checks = Map::new();
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    match result.status.as_str() {
        "solved" => {
            let Some(alloc) = &result.allocation else {
                violations.push("a solved result needs an assignment and rents".to_string());
                return Ok((
                    json!({ "pass": false, "checks": checks, "violations": violations, "notes": notes }),
                    false,
                ));
            };
            let envy = check_envy_free(inst, alloc);
            for v in &envy {
                violations.push(format!(
                    "agent {} envies room {} by {}",
                    named.agents[v.agent],
                    named.rooms[v.room],
                    format_decimal(&v.gap)
                ));
            }
            checks.insert("envy_free".into(), json!(envy.is_empty()));
            let report = check_constraints(inst, alloc);
            checks.insert("bounds".into(), json!(report.bounds_ok));
            checks.insert("budgets".into(), json!(report.budgets_ok));
            checks.insert("total".into(), json!(report.total_ok));
            violations.extend(report.violations.iter().map(|v| violation_text(&named, v)));
            let recomputed = utilities(inst, alloc);
            let utilities_ok = result.utilities.as_ref().is_none_or(|u| *u == recomputed.0);
            if !utilities_ok {
                violations.push("reported utilities differ from valuations minus rents".to_string());
            }
            checks.insert("utilities".into(), json!(utilities_ok));
            let canonical = alloc.assignment == max_welfare_assignment(inst.valuations());
            checks.insert("canonical_assignment".into(), json!(canonical));
            if !canonical {
                notes.push(
                    "assignment is welfare-maximizing only if envy-free; it differs from the canonical one".to_string(),
                );
            }
        }
        "infeasible" => {
            let certificate_ok = match &result.certificate {
                None => {
                    violations.push("an infeasible result needs a certificate".to_string());
                    false
                }
                Some(cert) => match validate_certificate(inst, cert) {
                    Ok(()) => true,
                    Err(e) => {
                        violations.push(format!("certificate rejected: {e}"));
                        false
                    }
                },
            };
            checks.insert("certificate".into(), json!(certificate_ok));
        }
        other => violations.push(format!("unknown status {other:?}")),
    }
    let pass = violations.is_empty();
    Ok((json!({ "pass": pass, "checks": checks, "violations": violations, "notes": notes }), pass))
}

/// Re-checks a result file against its instance; exit 0 pass, 3 fail.
pub fn cmd_verify(instance_path: &Path, result_path: &Path) -> CommandOutput {
    match verify_value(instance_path, result_path) {
        Ok((value, pass)) => CommandOutput::ok(if pass { EXIT_SOLVED } else { EXIT_VERIFY_FAILED }, render(&value)),
        Err(e) => CommandOutput::error(e),
    }
}

fn oracle_value(path: &Path, objective: OracleObjective) -> Result<(Value, SolveStatus), CommandError> {
    let named = load(path)?;
    let outcome = oracle_solve(&named.instance, objective)?;
    let utilities = outcome.allocation.as_ref().map(|a| utilities(&named.instance, a));
    let parts = ResultParts {
        status: outcome.status,
        objective: objective.name(),
        allocation: outcome.allocation.as_ref(),
        utilities: utilities.as_ref(),
        value: &outcome.value,
        certificate: None,
        trace: None,
    };
    Ok((result_json(&named, &parts), outcome.status))
}

/// Answers by linear programming over every maximum-welfare assignment.
pub fn cmd_oracle(path: &Path, objective: OracleObjective) -> CommandOutput {
    match oracle_value(path, objective) {
        Ok((value, status)) => CommandOutput::ok(exit_for(status), render(&value)),
        Err(e) => CommandOutput::error(e),
    }
}

fn report_text(path: &Path, objective: Objective, dot: bool) -> Result<(String, SolveStatus), CommandError> {
    let named = load(path)?;
    let inst = &named.instance;
    let outcome = combined_solve(inst, objective)?;
    let mut text = String::new();
    let _ = writeln!(text, "objective: {}", objective.name());
    match (&outcome.allocation, &outcome.utilities) {
        (Some(alloc), Some(utilities)) => {
            let _ = writeln!(text, "status: solved");
            let width = named.agents.iter().chain(&named.rooms).map(String::len).max().unwrap_or(1).max(5);
            let _ = writeln!(text, "{:<width$}  {:<width$}  {:>24}  {:>24}", "agent", "room", "rent", "utility");
            for i in 0..inst.n() {
                let room = alloc.assignment.room(i);
                let _ = writeln!(
                    text,
                    "{:<width$}  {:<width$}  {:>24}  {:>24}",
                    named.agents[i],
                    named.rooms[room],
                    format_decimal(&alloc.rents[room]),
                    format_decimal(&utilities.0[i])
                );
            }
            let _ = writeln!(text, "min utility: {}", format_decimal(utilities.min()));
            let _ = writeln!(text, "spread: {}", format_decimal(&utilities.spread()));
            if dot {
                text.push_str(&build_envy_graph(inst, alloc).to_dot(Some(&named.rooms)));
            }
        }
        _ => {
            let _ = writeln!(text, "status: infeasible");
            if let Some(cert) = &outcome.certificate {
                let _ = writeln!(text, "certificate: {}", cert.kind.name());
                let _ = writeln!(text, "{}", cert.explanation);
            }
        }
    }
    Ok((text, outcome.status))
}

/// Human-readable table of the solution, optionally followed by the final
/// envy graph in DOT.
pub fn cmd_report(path: &Path, objective: Objective, dot: bool) -> CommandOutput {
    match report_text(path, objective, dot) {
        Ok((text, status)) => CommandOutput::ok(exit_for(status), text),
        Err(e) => CommandOutput::error(e),
    }
}
