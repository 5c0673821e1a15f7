//! Parameter-schema validation for benchmark configurations.
//!
//! Every benchmark declares a JSON Schema (draft 2020-12 style) describing
//! its configurable parameters. User-supplied configurations are validated
//! against the schema before dispatch; validation applies declared defaults
//! and reports **every** violated constraint rather than stopping at the
//! first.
//!
//! The validator implements the keyword subset the embedded schemas use:
//! `type`, `const`, `enum`, `minimum`, `maximum`, `required`, `default`,
//! `properties`, and `items`. Annotation keywords (`$id`, `$schema`,
//! `title`, `description`, `examples`) are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde_json::{Map, Value};

use crate::benchmarks::BenchmarkKind;
use crate::error::{CoreError, Result};

/// A benchmark parameter schema: a JSON Schema document restricted to the
/// keyword subset listed in the module docs.
#[derive(Debug, Clone)]
pub struct ParamSchema {
    document: Value,
}

/// One violated constraint, locating the offending value by a
/// `$`-rooted path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Joins violations into a single validation error.
pub fn violations_to_error(violations: &[SchemaViolation]) -> CoreError {
    let joined = violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ");
    CoreError::Validation(joined)
}

impl ParamSchema {
    /// Wraps a schema document. The document must be a JSON object.
    pub fn from_value(document: Value) -> Result<ParamSchema> {
        if !document.is_object() {
            return Err(CoreError::Validation(
                "schema document must be a JSON object".into(),
            ));
        }
        Ok(ParamSchema { document })
    }

    /// Parses a schema document from JSON text.
    pub fn from_str(text: &str) -> Result<ParamSchema> {
        let document: Value =
            serde_json::from_str(text).map_err(|e| CoreError::serde("param schema", e))?;
        ParamSchema::from_value(document)
    }

    /// The underlying schema document.
    pub fn document(&self) -> &Value {
        &self.document
    }

    /// The schema title, when present.
    pub fn title(&self) -> Option<&str> {
        self.document.get("title").and_then(Value::as_str)
    }

    /// The `benchmark_name` const this schema pins, when present.
    pub fn benchmark_name(&self) -> Option<&str> {
        self.document
            .get("properties")?
            .get("benchmark_name")?
            .get("const")?
            .as_str()
    }
}

/// Embedded schema text for a benchmark.
pub fn schema_json(kind: BenchmarkKind) -> &'static str {
    match kind {
        BenchmarkKind::Bseq => include_str!("../../schemas/bseq.schema.json"),
        BenchmarkKind::Eplg => include_str!("../../schemas/eplg.schema.json"),
        BenchmarkKind::Mirror => include_str!("../../schemas/mirror.schema.json"),
        BenchmarkKind::Clops => include_str!("../../schemas/clops.schema.json"),
        BenchmarkKind::QmlKernel => include_str!("../../schemas/qml_kernel.schema.json"),
        BenchmarkKind::LrQaoa => include_str!("../../schemas/lr_qaoa.schema.json"),
        BenchmarkKind::Wit => include_str!("../../schemas/wit.schema.json"),
        BenchmarkKind::Qft => include_str!("../../schemas/qft.schema.json"),
    }
}

/// Parsed schema for a benchmark (embedded at compile time).
pub fn schema_for(kind: BenchmarkKind) -> &'static ParamSchema {
    static SCHEMAS: OnceLock<BTreeMap<&'static str, ParamSchema>> = OnceLock::new();
    let map = SCHEMAS.get_or_init(|| {
        BenchmarkKind::ALL
            .into_iter()
            .map(|k| {
                let schema = ParamSchema::from_str(schema_json(k))
                    .expect("embedded schema must be valid JSON");
                (k.key(), schema)
            })
            .collect()
    });
    &map[kind.key()]
}

/// Validates `params` against `schema`.
///
/// On success returns the parameters with schema defaults filled in for
/// absent properties. On failure returns every violated constraint.
pub fn validate_params(
    schema: &ParamSchema,
    params: &Value,
) -> std::result::Result<Value, Vec<SchemaViolation>> {
    let filled = apply_defaults(schema.document(), params);
    let mut violations = Vec::new();
    check_node(schema.document(), &filled, "$", &mut violations);
    if violations.is_empty() {
        Ok(filled)
    } else {
        Err(violations)
    }
}

/// Identifies the benchmark a configuration addresses and validates it
/// against that benchmark's schema, returning the kind together with the
/// defaults-applied parameters.
pub fn validate_config(params: &Value) -> Result<(BenchmarkKind, Value)> {
    let name = params
        .get("benchmark_name")
        .and_then(Value::as_str)
        .ok_or_else(|| {
            CoreError::Validation("config is missing a string \"benchmark_name\" field".into())
        })?;
    let kind = BenchmarkKind::parse(name).ok_or_else(|| {
        CoreError::Validation(format!("unknown benchmark_name {name:?}"))
    })?;
    let validated =
        validate_params(schema_for(kind), params).map_err(|v| violations_to_error(&v))?;
    Ok((kind, validated))
}

/// Returns `params` with defaults from `schema`'s `properties` inserted
/// for absent keys. Non-object params are returned unchanged (the type
/// violation is reported by validation).
fn apply_defaults(schema: &Value, params: &Value) -> Value {
    let (Some(properties), Some(object)) = (
        schema.get("properties").and_then(Value::as_object),
        params.as_object(),
    ) else {
        return params.clone();
    };
    let mut filled: Map<String, Value> = object.clone();
    for (key, prop_schema) in properties {
        if filled.contains_key(key) {
            if let Some(existing) = object.get(key) {
                filled.insert(key.clone(), apply_defaults(prop_schema, existing));
            }
        } else if let Some(default) = prop_schema.get("default") {
            filled.insert(key.clone(), default.clone());
        }
    }
    Value::Object(filled)
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) => {
            if is_integer(n) {
                "integer"
            } else {
                "number"
            }
        }
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn is_integer(n: &serde_json::Number) -> bool {
    n.is_i64() || n.is_u64() || n.as_f64().is_some_and(|f| f.fract() == 0.0 && f.is_finite())
}

fn matches_type(expected: &str, value: &Value) -> bool {
    match expected {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.as_number().is_some_and(is_integer),
        "number" => value.is_number(),
        _ => false,
    }
}

fn push(violations: &mut Vec<SchemaViolation>, path: &str, message: String) {
    violations.push(SchemaViolation {
        path: path.to_string(),
        message,
    });
}

/// Recursively checks `value` against the schema node, appending every
/// violation found.
fn check_node(schema: &Value, value: &Value, path: &str, violations: &mut Vec<SchemaViolation>) {
    if let Some(expected) = schema.get("type").and_then(Value::as_str) {
        if !matches_type(expected, value) {
            push(
                violations,
                path,
                format!("expected {expected}, got {}", type_name(value)),
            );
            // Remaining keywords assume the declared type; deeper checks
            // on a mistyped value would only produce noise.
            return;
        }
    }

    if let Some(expected) = schema.get("const") {
        if value != expected {
            push(violations, path, format!("expected const {expected}, got {value}"));
        }
    }

    if let Some(choices) = schema.get("enum").and_then(Value::as_array) {
        if !choices.iter().any(|c| c == value) {
            let rendered = choices
                .iter()
                .map(Value::to_string)
                .collect::<Vec<_>>()
                .join(", ");
            push(violations, path, format!("{value} is not one of [{rendered}]"));
        }
    }

    if let (Some(minimum), Some(actual)) =
        (schema.get("minimum").and_then(Value::as_f64), value.as_f64())
    {
        if actual < minimum {
            push(violations, path, format!("{value} is below minimum {minimum}"));
        }
    }

    if let (Some(maximum), Some(actual)) =
        (schema.get("maximum").and_then(Value::as_f64), value.as_f64())
    {
        if actual > maximum {
            push(violations, path, format!("{value} is above maximum {maximum}"));
        }
    }

    if let (Some(required), Some(object)) = (
        schema.get("required").and_then(Value::as_array),
        value.as_object(),
    ) {
        for field in required.iter().filter_map(Value::as_str) {
            if !object.contains_key(field) {
                push(violations, path, format!("missing required field {field:?}"));
            }
        }
    }

    if let (Some(properties), Some(object)) = (
        schema.get("properties").and_then(Value::as_object),
        value.as_object(),
    ) {
        for (key, prop_schema) in properties {
            if let Some(member) = object.get(key) {
                check_node(prop_schema, member, &format!("{path}.{key}"), violations);
            }
        }
    }

    if let (Some(items), Some(elements)) = (schema.get("items"), value.as_array()) {
        for (i, element) in elements.iter().enumerate() {
            check_node(items, element, &format!("{path}[{i}]"), violations);
        }
    }
}
