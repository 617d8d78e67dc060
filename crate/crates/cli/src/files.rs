//! Instance and result files. Every number is a string holding an exact
//! decimal or `p/q` rational; bare JSON integers are accepted, floats are
//! not.

use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use rentdiv_core::{
    format_decimal, format_exact, parse_rational, Allocation, Assignment, Bound, CertificateKind, CertificateSnapshot,
    InfeasibilityCertificate, Instance, ObjectiveValue, Rational, RawInstance, RoomBounds, SolveStatus, Trace,
    UtilityVector,
};

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("invalid instance: {0}")]
    Invalid(#[from] rentdiv_core::ValidationError),
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Field { field: field.into(), message: message.into() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    agents: Option<Vec<String>>,
    rooms: Option<Vec<String>>,
    valuations: Vec<Vec<Value>>,
    total_rent: Value,
    lower_bounds: Option<Vec<Value>>,
    upper_bounds: Option<Vec<Value>>,
    budgets: Option<Vec<Vec<Value>>>,
}

/// A parsed instance together with its presentation names.
#[derive(Debug, Clone)]
pub struct NamedInstance {
    pub instance: Instance,
    pub agents: Vec<String>,
    pub rooms: Vec<String>,
}

impl NamedInstance {
    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn room_index(&self, name: &str) -> Option<usize> {
        self.rooms.iter().position(|r| r == name)
    }
}

fn number(value: &Value, field: &str) -> Result<Rational, FileError> {
    match value {
        Value::String(text) => parse_rational(text).map_err(|e| field_error(field, e.to_string())),
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            parse_rational(&n.to_string()).map_err(|e| field_error(field, e.to_string()))
        }
        Value::Number(n) => Err(field_error(field, format!("{n} is a float; write it as a string"))),
        other => Err(field_error(field, format!("expected a number string, found {other}"))),
    }
}

fn bound(value: &Value, field: &str, infinity: Bound) -> Result<Bound, FileError> {
    let text = value.as_str().map(str::trim);
    match (text, &infinity) {
        (Some("inf" | "+inf"), Bound::PosInf) => Ok(Bound::PosInf),
        (Some("-inf"), Bound::NegInf) => Ok(Bound::NegInf),
        (Some("inf" | "+inf" | "-inf"), _) => Err(field_error(field, "infinity points the wrong way")),
        _ => number(value, field).map(Bound::Finite),
    }
}

fn names(given: Option<Vec<String>>, n: usize, field: &str) -> Result<Vec<String>, FileError> {
    let names = given.unwrap_or_else(|| (1..=n).map(|k| k.to_string()).collect());
    if names.len() != n {
        return Err(field_error(field, format!("expected {n} names, found {}", names.len())));
    }
    if names.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(field_error(field, "names must be distinct"));
    }
    Ok(names)
}

pub fn parse_instance(text: &str) -> Result<NamedInstance, FileError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let n = file.valuations.len();
    let valuations = file
        .valuations
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, v)| number(v, &format!("valuations[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<Rational>>, _>>()?;
    let mut raw = RawInstance::new(valuations, number(&file.total_rent, "total_rent")?);
    if let Some(lower) = &file.lower_bounds {
        let lower = lower
            .iter()
            .enumerate()
            .map(|(j, v)| bound(v, &format!("lower_bounds[{j}]"), Bound::NegInf))
            .collect::<Result<_, _>>()?;
        raw = raw.lower_bounds(lower);
    }
    if let Some(upper) = &file.upper_bounds {
        let upper = upper
            .iter()
            .enumerate()
            .map(|(j, v)| bound(v, &format!("upper_bounds[{j}]"), Bound::PosInf))
            .collect::<Result<_, _>>()?;
        raw = raw.upper_bounds(upper);
    }
    if let Some(budgets) = &file.budgets {
        let budgets = budgets
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, v)| bound(v, &format!("budgets[{i}][{j}]"), Bound::PosInf)).collect()
            })
            .collect::<Result<_, _>>()?;
        raw = raw.budgets(budgets);
    }
    let instance = raw.validate()?;
    Ok(NamedInstance { agents: names(file.agents, n, "agents")?, rooms: names(file.rooms, n, "rooms")?, instance })
}

pub fn read_file(path: &std::path::Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io { path: path.display().to_string(), source })
}

fn exact_and_decimal(value: &Rational) -> Value {
    json!({ "exact": format_exact(value), "decimal": format_decimal(value) })
}

fn bound_text(bound: &Bound) -> Value {
    Value::String(bound.to_string())
}

fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Solved => "solved",
        SolveStatus::Infeasible => "infeasible",
    }
}

/// Result fields shared by the solver and the oracle.
pub struct ResultParts<'a> {
    pub status: SolveStatus,
    pub objective: &'a str,
    pub allocation: Option<&'a Allocation>,
    pub utilities: Option<&'a UtilityVector>,
    pub value: &'a ObjectiveValue,
    pub certificate: Option<&'a InfeasibilityCertificate>,
    pub trace: Option<&'a Trace>,
}

pub fn result_json(named: &NamedInstance, parts: &ResultParts<'_>) -> Value {
    let mut out = Map::new();
    out.insert("status".into(), json!(status_name(parts.status)));
    out.insert("objective".into(), json!(parts.objective));
    if let Some(alloc) = parts.allocation {
        let assignment: Map<String, Value> = (0..named.agents.len())
            .map(|i| (named.agents[i].clone(), json!(named.rooms[alloc.assignment.room(i)])))
            .collect();
        let rents: Map<String, Value> =
            alloc.rents.iter().enumerate().map(|(j, r)| (named.rooms[j].clone(), exact_and_decimal(r))).collect();
        out.insert("assignment".into(), Value::Object(assignment));
        out.insert("rents".into(), Value::Object(rents));
    }
    if let Some(utilities) = parts.utilities {
        let map: Map<String, Value> =
            utilities.0.iter().enumerate().map(|(i, u)| (named.agents[i].clone(), exact_and_decimal(u))).collect();
        out.insert("utilities".into(), Value::Object(map));
    }
    let value = match parts.value {
        ObjectiveValue::None => Value::Null,
        ObjectiveValue::Scalar(v) => exact_and_decimal(v),
        ObjectiveValue::Vector(vs) => Value::Array(vs.iter().map(exact_and_decimal).collect()),
        ObjectiveValue::Unbounded => json!("unbounded"),
    };
    out.insert("objective_value".into(), value);
    if let Some(cert) = parts.certificate {
        out.insert("certificate".into(), certificate_json(named, cert));
    }
    if let Some(trace) = parts.trace {
        out.insert("trace".into(), Value::Array(trace.log_lines().into_iter().map(Value::String).collect()));
    }
    Value::Object(out)
}

fn certificate_json(named: &NamedInstance, cert: &InfeasibilityCertificate) -> Value {
    let room_names = |rooms: &[usize]| rooms.iter().map(|&j| json!(named.rooms[j])).collect::<Vec<_>>();
    let mut out = Map::new();
    out.insert("kind".into(), json!(cert.kind.name()));
    out.insert("explanation".into(), json!(cert.explanation));
    if let Some(path) = &cert.witness_path {
        out.insert("witness_path".into(), Value::Array(room_names(path)));
    }
    if let Some(rooms) = &cert.witness_rooms {
        out.insert("witness_rooms".into(), Value::Array(room_names(rooms)));
    }
    if let Some(snap) = &cert.snapshot {
        let assignment: Map<String, Value> = (0..named.agents.len())
            .map(|i| (named.agents[i].clone(), json!(named.rooms[snap.assignment.room(i)])))
            .collect();
        let per_room = |values: Vec<Value>| -> Map<String, Value> { named.rooms.iter().cloned().zip(values).collect() };
        out.insert(
            "snapshot".into(),
            json!({
                "assignment": assignment,
                "rents": per_room(snap.rents.iter().map(|r| json!(format_exact(r))).collect()),
                "lower_bounds": per_room(snap.bounds.lower.iter().map(bound_text).collect()),
                "upper_bounds": per_room(snap.bounds.upper.iter().map(bound_text).collect()),
            }),
        );
    }
    Value::Object(out)
}

/// Serializes with sorted keys and a trailing newline.
pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    text
}

/// What a result file claims, decoded from its exact fields only.
#[derive(Debug, Clone)]
pub struct ParsedResult {
    pub status: String,
    pub allocation: Option<Allocation>,
    pub utilities: Option<Vec<Rational>>,
    pub certificate: Option<InfeasibilityCertificate>,
}

fn object<'a>(value: &'a Value, field: &str) -> Result<&'a Map<String, Value>, FileError> {
    value.as_object().ok_or_else(|| field_error(field, "expected an object"))
}

fn per_agent_room(named: &NamedInstance, value: &Value, field: &str) -> Result<Assignment, FileError> {
    let map = object(value, field)?;
    let n = named.agents.len();
    let mut room_of_agent = vec![usize::MAX; n];
    for (agent, room) in map {
        let i = named.agent_index(agent).ok_or_else(|| field_error(field, format!("unknown agent {agent:?}")))?;
        let room = room.as_str().ok_or_else(|| field_error(field, "room names are strings"))?;
        room_of_agent[i] =
            named.room_index(room).ok_or_else(|| field_error(field, format!("unknown room {room:?}")))?;
    }
    if room_of_agent.contains(&usize::MAX) {
        return Err(field_error(field, "every agent needs a room"));
    }
    Assignment::new(room_of_agent).map_err(|_| field_error(field, "two agents share a room"))
}

fn per_name<F>(names: &[String], value: &Value, field: &str, mut read: F) -> Result<Vec<Rational>, FileError>
where
    F: FnMut(&Value, &str) -> Result<Rational, FileError>,
{
    let map = object(value, field)?;
    names
        .iter()
        .map(|name| {
            let entry = map.get(name).ok_or_else(|| field_error(field, format!("missing entry {name:?}")))?;
            read(entry, &format!("{field}.{name}"))
        })
        .collect()
}

fn exact_entry(value: &Value, field: &str) -> Result<Rational, FileError> {
    match value.get("exact") {
        Some(exact) => number(exact, field),
        None => number(value, field),
    }
}

fn kind_from_name(name: &str) -> Option<CertificateKind> {
    [CertificateKind::BoundSumViolation, CertificateKind::EnvyPathViolation, CertificateKind::BudgetCapViolation]
        .into_iter()
        .find(|k| k.name() == name)
}

fn room_list(named: &NamedInstance, value: Option<&Value>, field: &str) -> Result<Option<Vec<usize>>, FileError> {
    let Some(value) = value else { return Ok(None) };
    let items = value.as_array().ok_or_else(|| field_error(field, "expected a list of rooms"))?;
    items
        .iter()
        .map(|v| {
            v.as_str()
                .and_then(|name| named.room_index(name))
                .ok_or_else(|| field_error(field, format!("unknown room {v}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn parse_certificate(named: &NamedInstance, value: &Value) -> Result<InfeasibilityCertificate, FileError> {
    let kind_name = value.get("kind").and_then(Value::as_str).unwrap_or_default();
    let kind = kind_from_name(kind_name)
        .ok_or_else(|| field_error("certificate.kind", format!("unknown kind {kind_name:?}")))?;
    let snapshot = match value.get("snapshot") {
        None => None,
        Some(snap) => {
            let assignment = per_agent_room(named, &snap["assignment"], "certificate.snapshot.assignment")?;
            let rents = per_name(&named.rooms, &snap["rents"], "certificate.snapshot.rents", number)?;
            let side = |key: &str, infinity: Bound| -> Result<Vec<Bound>, FileError> {
                let map = object(&snap[key], key)?;
                named
                    .rooms
                    .iter()
                    .map(|name| {
                        let field = format!("certificate.snapshot.{key}.{name}");
                        let entry = map.get(name).ok_or_else(|| field_error(&field, "missing"))?;
                        bound(entry, &field, infinity.clone())
                    })
                    .collect()
            };
            let bounds =
                RoomBounds { lower: side("lower_bounds", Bound::NegInf)?, upper: side("upper_bounds", Bound::PosInf)? };
            Some(CertificateSnapshot { assignment, rents, bounds })
        }
    };
    Ok(InfeasibilityCertificate {
        kind,
        witness_path: room_list(named, value.get("witness_path"), "certificate.witness_path")?,
        witness_rooms: room_list(named, value.get("witness_rooms"), "certificate.witness_rooms")?,
        explanation: value.get("explanation").and_then(Value::as_str).unwrap_or_default().to_string(),
        snapshot,
    })
}

pub fn parse_result(named: &NamedInstance, text: &str) -> Result<ParsedResult, FileError> {
    let value: Value = serde_json::from_str(text)?;
    let status =
        value.get("status").and_then(Value::as_str).ok_or_else(|| field_error("status", "missing status"))?.to_string();
    let allocation = match (value.get("assignment"), value.get("rents")) {
        (Some(a), Some(r)) => {
            let assignment = per_agent_room(named, a, "assignment")?;
            let rents = per_name(&named.rooms, r, "rents", exact_entry)?;
            Some(Allocation::new(assignment, rents))
        }
        (None, None) => None,
        _ => return Err(field_error("assignment", "assignment and rents come together")),
    };
    let utilities = match value.get("utilities") {
        Some(u) => Some(per_name(&named.agents, u, "utilities", exact_entry)?),
        None => None,
    };
    let certificate = match value.get("certificate") {
        Some(c) => Some(parse_certificate(named, c)?),
        None => None,
    };
    Ok(ParsedResult { status, allocation, utilities, certificate })
}
