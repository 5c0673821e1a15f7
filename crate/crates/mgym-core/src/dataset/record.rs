//! Benchmark result records and the dataset path layout.
//!
//! Records are stored one per file under the relative layout
//! `{source}/{version}/{provider}/{device}/{timestamp}_{benchmark-type}_{hash}.json`,
//! where `timestamp` is the collection time slugged to basic-format
//! ISO-8601 UTC (`%Y%m%dT%H%M%SZ`), `benchmark-type` is the benchmark's
//! kebab-case slug, and `hash` is the first 8 hex characters of the
//! SHA-256 of the canonical JSON of `{params, results, provenance}`.

use chrono::{DateTime, NaiveDateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::benchmarks::BenchmarkKind;
use crate::dataset::canonical::{canonical_value_string, short_hash};
use crate::dataset::schema::validate_config;
use crate::error::{CoreError, Result};

/// Default `source` path component for records produced by this engine.
pub const RECORD_SOURCE: &str = "metriq-gym";

/// Default `version` path component (benchmark-suite protocol version).
pub const RECORD_VERSION: &str = "v0.4";

/// Execution provenance stored with every record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Master seed the run was dispatched with.
    pub seed: u64,
    /// Version of the engine that produced the result.
    pub engine_version: String,
    /// Content hash of the device model the result was produced on.
    pub device_fingerprint: String,
}

impl Provenance {
    pub fn new(seed: u64, device_fingerprint: impl Into<String>) -> Provenance {
        Provenance {
            seed,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            device_fingerprint: device_fingerprint.into(),
        }
    }
}

/// One stored benchmark result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    /// Content hash over `{params, results, provenance}` (8 hex chars).
    pub id: String,
    /// Collection time (UTC, whole seconds).
    pub timestamp: DateTime<Utc>,
    pub source: String,
    pub version: String,
    pub provider: String,
    pub device: String,
    pub benchmark_name: String,
    /// Schema-validated parameters, defaults applied.
    pub params: Value,
    /// Metric map, including per-width breakdowns where applicable.
    pub results: Value,
    pub provenance: Provenance,
}

impl BenchmarkRecord {
    /// Builds a record from a validated configuration and its results.
    ///
    /// `params` must carry the `benchmark_name` field; it is validated
    /// against the benchmark's schema (defaults applied) and the record's
    /// `benchmark_name` is set from it. The content hash and sub-second
    /// timestamp truncation are applied here.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        timestamp: DateTime<Utc>,
        source: &str,
        version: &str,
        provider: &str,
        device: &str,
        params: Value,
        results: Value,
        provenance: Provenance,
    ) -> Result<BenchmarkRecord> {
        let (kind, validated) = validate_config(&params)?;
        let timestamp = timestamp
            .with_nanosecond(0)
            .expect("zero nanoseconds is always valid");
        let id = record_content_hash(&validated, &results, &provenance)?;
        let record = BenchmarkRecord {
            id,
            timestamp,
            source: source.to_string(),
            version: version.to_string(),
            provider: provider.to_string(),
            device: device.to_string(),
            benchmark_name: kind.config_name().to_string(),
            params: validated,
            results,
            provenance,
        };
        // Surfaces unsafe path components at construction time.
        record.relative_path()?;
        Ok(record)
    }

    /// The benchmark this record belongs to.
    pub fn benchmark_kind(&self) -> Result<BenchmarkKind> {
        BenchmarkKind::parse(&self.benchmark_name).ok_or_else(|| {
            CoreError::Dataset(format!(
                "record {} has unknown benchmark_name {:?}",
                self.id, self.benchmark_name
            ))
        })
    }

    /// Recomputes the content hash from the record's current fields.
    pub fn content_hash(&self) -> Result<String> {
        record_content_hash(&self.params, &self.results, &self.provenance)
    }

    /// The record's relative storage path.
    pub fn relative_path(&self) -> Result<String> {
        record_path(self)
    }

    /// Canonical JSON text of the whole record (stored byte form).
    pub fn canonical_json(&self) -> Result<String> {
        let value =
            serde_json::to_value(self).map_err(|e| CoreError::serde("benchmark record", e))?;
        Ok(canonical_value_string(&value))
    }

    /// Parses a record from JSON text and checks its internal consistency:
    /// schema-valid params, matching benchmark name, and matching content
    /// hash.
    pub fn from_json(text: &str) -> Result<BenchmarkRecord> {
        let record: BenchmarkRecord =
            serde_json::from_str(text).map_err(|e| CoreError::serde("benchmark record", e))?;
        record.validate()?;
        Ok(record)
    }

    /// Checks schema validity of `params`, name consistency, and that `id`
    /// matches the content hash.
    pub fn validate(&self) -> Result<()> {
        let (kind, _) = validate_config(&self.params)?;
        if kind.config_name() != self.benchmark_name {
            return Err(CoreError::Dataset(format!(
                "record {}: benchmark_name {:?} does not match params ({:?})",
                self.id,
                self.benchmark_name,
                kind.config_name()
            )));
        }
        let expected = self.content_hash()?;
        if expected != self.id {
            return Err(CoreError::Dataset(format!(
                "record {}: content hash mismatch (expected {})",
                self.id, expected
            )));
        }
        Ok(())
    }
}

/// Content hash: first 8 hex chars of SHA-256 over the canonical JSON of
/// `{params, results, provenance}`.
pub fn record_content_hash(
    params: &Value,
    results: &Value,
    provenance: &Provenance,
) -> Result<String> {
    let provenance =
        serde_json::to_value(provenance).map_err(|e| CoreError::serde("provenance", e))?;
    let body = serde_json::json!({
        "params": params,
        "results": results,
        "provenance": provenance,
    });
    Ok(short_hash(&canonical_value_string(&body)))
}

/// Timestamp slug used in file names: basic-format ISO-8601 UTC with
/// colons and dashes removed.
pub fn timestamp_slug(timestamp: &DateTime<Utc>) -> String {
    timestamp.format("%Y%m%dT%H%M%SZ").to_string()
}

/// Parses a timestamp slug back to a UTC datetime.
pub fn parse_timestamp_slug(slug: &str) -> Result<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(slug, "%Y%m%dT%H%M%SZ")
        .map(|naive| naive.and_utc())
        .map_err(|e| CoreError::Dataset(format!("bad timestamp slug {slug:?}: {e}")))
}

fn check_component(label: &str, value: &str) -> Result<()> {
    let safe = !value.is_empty()
        && !value.starts_with('.')
        && value
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    if safe {
        Ok(())
    } else {
        Err(CoreError::Dataset(format!(
            "record {label} {value:?} is not filesystem-safe \
             (want non-empty [A-Za-z0-9._-], not starting with '.')"
        )))
    }
}

/// Relative storage path for a record:
/// `{source}/{version}/{provider}/{device}/{timestamp}_{benchmark-type}_{hash}.json`.
pub fn record_path(record: &BenchmarkRecord) -> Result<String> {
    let kind = record.benchmark_kind()?;
    for (label, value) in [
        ("source", &record.source),
        ("version", &record.version),
        ("provider", &record.provider),
        ("device", &record.device),
    ] {
        check_component(label, value)?;
    }
    if record.id.len() != 8 || !record.id.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(CoreError::Dataset(format!(
            "record id {:?} is not an 8-hex-char content hash",
            record.id
        )));
    }
    Ok(format!(
        "{}/{}/{}/{}/{}_{}_{}.json",
        record.source,
        record.version,
        record.provider,
        record.device,
        timestamp_slug(&record.timestamp),
        kind.path_slug(),
        record.id
    ))
}

/// The components encoded in a record path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordPathParts {
    pub source: String,
    pub version: String,
    pub provider: String,
    pub device: String,
    pub timestamp: DateTime<Utc>,
    pub benchmark: BenchmarkKind,
    pub hash: String,
}

/// Inverts [`record_path`].
pub fn parse_record_path(path: &str) -> Result<RecordPathParts> {
    let bad = |why: &str| CoreError::Dataset(format!("bad record path {path:?}: {why}"));
    let parts: Vec<&str> = path.split('/').collect();
    let [source, version, provider, device, file] = parts.as_slice() else {
        return Err(bad("want source/version/provider/device/file"));
    };
    let stem = file
        .strip_suffix(".json")
        .ok_or_else(|| bad("file must end in .json"))?;
    let fields: Vec<&str> = stem.split('_').collect();
    let [slug, benchmark, hash] = fields.as_slice() else {
        return Err(bad("file stem must be {timestamp}_{benchmark-type}_{hash}"));
    };
    let timestamp = parse_timestamp_slug(slug)?;
    let benchmark = BenchmarkKind::parse(benchmark)
        .ok_or_else(|| bad(&format!("unknown benchmark type {benchmark:?}")))?;
    if hash.len() != 8 || !hash.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(bad("hash must be 8 hex chars"));
    }
    for (label, value) in [
        ("source", source),
        ("version", version),
        ("provider", provider),
        ("device", device),
    ] {
        check_component(label, value)?;
    }
    Ok(RecordPathParts {
        source: source.to_string(),
        version: version.to_string(),
        provider: provider.to_string(),
        device: device.to_string(),
        timestamp,
        benchmark,
        hash: hash.to_string(),
    })
}
