//! On-disk record store: atomic uploads, filtered scans, and export
//! bundles.
//!
//! Records live under a dataset root in the layout produced by
//! [`record_path`](crate::dataset::record::record_path). Writers are
//! atomic (temp file + rename in the destination directory), so the tree
//! never contains partially written files and concurrent writers of
//! distinct records cannot interfere.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::benchmarks::BenchmarkKind;
use crate::dataset::record::{parse_record_path, BenchmarkRecord, RecordPathParts};
use crate::error::{CoreError, Result};

/// Stores a record at its canonical path under `root`.
///
/// The write is atomic: content goes to a temp file in the destination
/// directory which is then renamed into place. Uploading the same record
/// twice is a no-op; a pre-existing file with *different* content at the
/// record's path (a short-hash collision or a tampered tree) is an error.
pub fn upload_record(root: &Path, record: &BenchmarkRecord) -> Result<PathBuf> {
    record.validate()?;
    let relative = record.relative_path()?;
    let path = root.join(&relative);
    let content = record.canonical_json()?;

    if path.exists() {
        let existing = fs::read_to_string(&path).map_err(|e| CoreError::io(path.display().to_string(), e))?;
        if existing == content {
            return Ok(path);
        }
        return Err(CoreError::Dataset(format!(
            "refusing to overwrite {relative}: existing file has different content"
        )));
    }

    let parent = path
        .parent()
        .ok_or_else(|| CoreError::Dataset(format!("record path {relative:?} has no parent")))?;
    fs::create_dir_all(parent).map_err(|e| CoreError::io(parent.display().to_string(), e))?;
    let mut temp = tempfile::Builder::new()
        .prefix(".upload-")
        .tempfile_in(parent)
        .map_err(|e| CoreError::io(parent.display().to_string(), e))?;
    temp.write_all(content.as_bytes())
        .and_then(|()| temp.flush())
        .map_err(|e| CoreError::io(path.display().to_string(), e))?;
    temp.persist(&path)
        .map_err(|e| CoreError::io(path.display().to_string(), e.error))?;
    Ok(path)
}

/// Scan filter; `None` fields match everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetFilter {
    pub provider: Option<String>,
    pub device: Option<String>,
    pub benchmark: Option<BenchmarkKind>,
    pub version: Option<String>,
}

impl DatasetFilter {
    pub fn matches(&self, parts: &RecordPathParts) -> bool {
        self.provider.as_deref().map_or(true, |p| p == parts.provider)
            && self.device.as_deref().map_or(true, |d| d == parts.device)
            && self.benchmark.map_or(true, |b| b == parts.benchmark)
            && self.version.as_deref().map_or(true, |v| v == parts.version)
    }
}

/// One successfully loaded record.
#[derive(Debug, Clone)]
pub struct ScannedRecord {
    /// Path relative to the dataset root.
    pub path: String,
    pub parts: RecordPathParts,
    pub record: BenchmarkRecord,
}

/// One file the scan could not accept, with the reason.
#[derive(Debug, Clone)]
pub struct ScanProblem {
    /// Path relative to the dataset root.
    pub path: String,
    pub error: String,
}

/// Scan outcome: valid records plus itemized problems. Problem files are
/// never silently skipped.
#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    pub records: Vec<ScannedRecord>,
    pub problems: Vec<ScanProblem>,
}

/// Walks the dataset tree under `root`, returning every record matching
/// `filter`, schema-revalidated on load.
///
/// `.json` files that fail — unparseable names, unreadable files, invalid
/// content, or fields inconsistent with their location — are itemized in
/// [`ScanReport::problems`]. Files whose parsed path does not match the
/// filter are outside the requested slice and are skipped silently;
/// non-`.json` files are ignored.
pub fn scan_dataset(root: &Path, filter: &DatasetFilter) -> Result<ScanReport> {
    if !root.is_dir() {
        return Err(CoreError::Dataset(format!(
            "dataset root {} does not exist",
            root.display()
        )));
    }
    let mut report = ScanReport::default();
    let walker = walkdir::WalkDir::new(root)
        .sort_by_file_name()
        .into_iter();
    for entry in walker {
        let entry = match entry {
            Ok(entry) => entry,
            Err(e) => {
                let path = e
                    .path()
                    .map(|p| relative_display(root, p))
                    .unwrap_or_else(|| root.display().to_string());
                report.problems.push(ScanProblem {
                    path,
                    error: format!("unreadable directory entry: {e}"),
                });
                continue;
            }
        };
        if !entry.file_type().is_file()
            || entry.path().extension().and_then(|e| e.to_str()) != Some("json")
        {
            continue;
        }
        let relative = relative_display(root, entry.path());
        match load_record(root, &relative, filter) {
            Ok(Some(scanned)) => report.records.push(scanned),
            Ok(None) => {}
            Err(e) => report.problems.push(ScanProblem {
                path: relative,
                error: e.to_string(),
            }),
        }
    }
    Ok(report)
}

fn relative_display(root: &Path, path: &Path) -> String {
    let relative = path.strip_prefix(root).unwrap_or(path);
    // Dataset paths are slash-separated by construction.
    relative
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn load_record(
    root: &Path,
    relative: &str,
    filter: &DatasetFilter,
) -> Result<Option<ScannedRecord>> {
    let parts = parse_record_path(relative)?;
    if !filter.matches(&parts) {
        return Ok(None);
    }
    let full = root.join(relative);
    let text = fs::read_to_string(&full).map_err(|e| CoreError::io(full.display().to_string(), e))?;
    let record = BenchmarkRecord::from_json(&text)?;
    let derived = record.relative_path()?;
    if derived != relative {
        return Err(CoreError::Dataset(format!(
            "record fields derive path {derived:?}, but file lives at {relative:?}"
        )));
    }
    Ok(Some(ScannedRecord {
        path: relative.to_string(),
        parts,
        record,
    }))
}

/// Machine-readable dataset bundle: the full record array plus a
/// per-platform index.
#[derive(Debug, Clone)]
pub struct ExportBundle {
    /// JSON array of all exported records.
    pub benchmarks: Value,
    /// JSON array of per-(provider, device) summaries.
    pub platforms: Value,
}

/// Builds the export bundle from scanned records.
pub fn export_bundle(records: &[ScannedRecord]) -> Result<ExportBundle> {
    let mut benchmark_array = Vec::with_capacity(records.len());
    for scanned in records {
        let mut value = serde_json::to_value(&scanned.record)
            .map_err(|e| CoreError::serde("benchmark record", e))?;
        value
            .as_object_mut()
            .expect("records serialize to objects")
            .insert("path".into(), json!(scanned.path));
        benchmark_array.push(value);
    }

    use std::collections::BTreeMap;
    use std::collections::BTreeSet;
    let mut platforms: BTreeMap<(String, String), (BTreeSet<String>, usize, String)> =
        BTreeMap::new();
    for scanned in records {
        let key = (scanned.parts.provider.clone(), scanned.parts.device.clone());
        let entry = platforms.entry(key).or_default();
        entry.0.insert(scanned.record.benchmark_name.clone());
        entry.1 += 1;
        let stamp = scanned.record.timestamp.to_rfc3339();
        if stamp > entry.2 {
            entry.2 = stamp;
        }
    }
    let platform_array: Vec<Value> = platforms
        .into_iter()
        .map(|((provider, device), (benchmarks, count, latest))| {
            json!({
                "provider": provider,
                "device": device,
                "benchmarks": benchmarks.into_iter().collect::<Vec<_>>(),
                "record_count": count,
                "latest_timestamp": latest,
            })
        })
        .collect();

    Ok(ExportBundle {
        benchmarks: Value::Array(benchmark_array),
        platforms: Value::Array(platform_array),
    })
}

/// Writes `benchmarks.json` and `platforms.json` into `dir` (created if
/// missing), atomically. Returns the two paths.
pub fn write_export_bundle(dir: &Path, bundle: &ExportBundle) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| CoreError::io(dir.display().to_string(), e))?;
    let benchmarks_path = dir.join("benchmarks.json");
    let platforms_path = dir.join("platforms.json");
    write_atomic(&benchmarks_path, &pretty(&bundle.benchmarks)?)?;
    write_atomic(&platforms_path, &pretty(&bundle.platforms)?)?;
    Ok((benchmarks_path, platforms_path))
}

fn pretty(value: &Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CoreError::serde("export bundle", e))?;
    text.push('\n');
    Ok(text)
}

fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let parent = path
        .parent()
        .ok_or_else(|| CoreError::Dataset(format!("{} has no parent", path.display())))?;
    let mut temp = tempfile::Builder::new()
        .prefix(".export-")
        .tempfile_in(parent)
        .map_err(|e| CoreError::io(parent.display().to_string(), e))?;
    temp.write_all(content.as_bytes())
        .and_then(|()| temp.flush())
        .map_err(|e| CoreError::io(path.display().to_string(), e))?;
    temp.persist(path).map_err(|e| CoreError::io(path.display().to_string(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::record::Provenance;
    use chrono::{TimeZone, Utc};
    use serde_json::json;

    fn record(provider: &str, device: &str, benchmark: &str, minute: u32) -> BenchmarkRecord {
        let params = match benchmark {
            "BSEQ" => json!({"benchmark_name": "BSEQ"}),
            "WIT" => json!({"benchmark_name": "WIT", "num_qubits": 7}),
            "QML Kernel" => json!({"benchmark_name": "QML Kernel", "num_qubits": 10}),
            "Mirror Circuits" => json!({"benchmark_name": "Mirror Circuits", "width": 4}),
            other => panic!("unsupported test benchmark {other}"),
        };
        BenchmarkRecord::new(
            Utc.with_ymd_and_hms(2026, 3, 5, 12, minute, 0).unwrap(),
            "metriq-gym",
            "v0.4",
            provider,
            device,
            params,
            json!({"value": minute}),
            Provenance::new(u64::from(minute), "cafe0123"),
        )
        .unwrap()
    }

    fn fixture_tree(root: &Path) -> usize {
        let mut count = 0;
        for (i, (provider, device)) in [("ibm", "fez"), ("ibm", "torino"), ("iqm", "garnet")]
            .into_iter()
            .enumerate()
        {
            for (j, benchmark) in ["BSEQ", "WIT", "QML Kernel", "Mirror Circuits"]
                .into_iter()
                .enumerate()
            {
                let r = record(provider, device, benchmark, (i * 10 + j) as u32);
                upload_record(root, &r).unwrap();
                count += 1;
            }
        }
        count
    }

    #[test]
    fn upload_creates_file_at_record_path() {
        let dir = tempfile::tempdir().unwrap();
        let r = record("ibm", "fez", "BSEQ", 1);
        let path = upload_record(dir.path(), &r).unwrap();
        assert!(path.exists());
        assert_eq!(path, dir.path().join(r.relative_path().unwrap()));
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, r.canonical_json().unwrap());
    }

    #[test]
    fn upload_is_idempotent_for_identical_content() {
        let dir = tempfile::tempdir().unwrap();
        let r = record("ibm", "fez", "BSEQ", 1);
        let first = upload_record(dir.path(), &r).unwrap();
        let second = upload_record(dir.path(), &r).unwrap();
        assert_eq!(first, second);
        let entries: Vec<_> = walkdir::WalkDir::new(dir.path())
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file())
            .collect();
        assert_eq!(entries.len(), 1);
    }

    #[test]
    fn upload_refuses_different_content_at_same_path() {
        let dir = tempfile::tempdir().unwrap();
        let r = record("ibm", "fez", "BSEQ", 1);
        upload_record(dir.path(), &r).unwrap();
        // Simulates a short-hash collision: same id, different results.
        let mut imposter = r.clone();
        imposter.results = json!({"value": 999});
        let stored = dir.path().join(imposter.relative_path().unwrap());
        assert!(stored.exists(), "collision test must target the same path");
        let err = upload_record(dir.path(), &imposter);
        assert!(err.is_err());
        // The imposter fails its own hash check before any I/O.
        assert!(err.unwrap_err().to_string().contains("hash"));
    }

    #[test]
    fn concurrent_writers_of_distinct_records_both_land() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let a = record("ibm", "fez", "BSEQ", 1);
        let b = record("ibm", "fez", "WIT", 2);
        let handles: Vec<_> = [a.clone(), b.clone()]
            .into_iter()
            .map(|r| {
                let root = root.clone();
                std::thread::spawn(move || upload_record(&root, &r).unwrap())
            })
            .collect();
        for handle in handles {
            handle.join().unwrap();
        }
        let report = scan_dataset(&root, &DatasetFilter::default()).unwrap();
        assert_eq!(report.records.len(), 2);
        assert!(report.problems.is_empty());
    }

    #[test]
    fn scan_filters_by_device_provider_benchmark_and_version() {
        let dir = tempfile::tempdir().unwrap();
        let total = fixture_tree(dir.path());
        assert_eq!(total, 12);

        let all = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        assert_eq!(all.records.len(), 12);
        assert!(all.problems.is_empty());

        let by_device = scan_dataset(
            dir.path(),
            &DatasetFilter {
                device: Some("torino".into()),
                ..DatasetFilter::default()
            },
        )
        .unwrap();
        assert_eq!(by_device.records.len(), 4);

        let by_provider = scan_dataset(
            dir.path(),
            &DatasetFilter {
                provider: Some("ibm".into()),
                ..DatasetFilter::default()
            },
        )
        .unwrap();
        assert_eq!(by_provider.records.len(), 8);

        let by_benchmark = scan_dataset(
            dir.path(),
            &DatasetFilter {
                benchmark: Some(BenchmarkKind::Wit),
                ..DatasetFilter::default()
            },
        )
        .unwrap();
        assert_eq!(by_benchmark.records.len(), 3);

        let by_version = scan_dataset(
            dir.path(),
            &DatasetFilter {
                version: Some("v9.9".into()),
                ..DatasetFilter::default()
            },
        )
        .unwrap();
        assert!(by_version.records.is_empty());
    }

    #[test]
    fn corrupted_files_are_itemized_not_skipped() {
        let dir = tempfile::tempdir().unwrap();
        fixture_tree(dir.path());
        let bad_dir = dir.path().join("metriq-gym/v0.4/ibm/fez");
        fs::write(
            bad_dir.join("20260305T120000Z_bseq_deadbeef.json"),
            "{not json",
        )
        .unwrap();
        fs::write(bad_dir.join("badname.json"), "{}").unwrap();
        // Non-JSON files are not dataset content and are ignored.
        fs::write(bad_dir.join("notes.txt"), "hi").unwrap();

        let report = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        assert_eq!(report.records.len(), 12);
        assert_eq!(report.problems.len(), 2);
        let paths: Vec<&str> = report.problems.iter().map(|p| p.path.as_str()).collect();
        assert!(paths
            .iter()
            .any(|p| p.ends_with("20260305T120000Z_bseq_deadbeef.json")));
        assert!(paths.iter().any(|p| p.ends_with("badname.json")));
    }

    #[test]
    fn misfiled_record_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let r = record("ibm", "fez", "BSEQ", 1);
        // Writes valid record content under the wrong device directory.
        let wrong = dir
            .path()
            .join("metriq-gym/v0.4/ibm/torino")
            .join(format!(
                "20260305T120100Z_bseq_{}.json",
                r.id
            ));
        fs::create_dir_all(wrong.parent().unwrap()).unwrap();
        fs::write(&wrong, r.canonical_json().unwrap()).unwrap();
        let report = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.problems.len(), 1);
        assert!(report.problems[0].error.contains("lives at"));
    }

    #[test]
    fn scan_on_missing_root_errors_and_empty_root_is_empty() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope");
        assert!(scan_dataset(&missing, &DatasetFilter::default()).is_err());
        let report = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        assert!(report.records.is_empty());
        assert!(report.problems.is_empty());
    }

    #[test]
    fn round_trip_upload_then_scan_returns_equal_record() {
        let dir = tempfile::tempdir().unwrap();
        let r = record("iqm", "garnet", "QML Kernel", 3);
        upload_record(dir.path(), &r).unwrap();
        let report = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].record, r);
        assert_eq!(report.records[0].parts.benchmark, BenchmarkKind::QmlKernel);
    }

    #[test]
    fn export_bundle_lists_records_and_platforms() {
        let dir = tempfile::tempdir().unwrap();
        fixture_tree(dir.path());
        let report = scan_dataset(dir.path(), &DatasetFilter::default()).unwrap();
        let bundle = export_bundle(&report.records).unwrap();
        assert_eq!(bundle.benchmarks.as_array().unwrap().len(), 12);
        let platforms = bundle.platforms.as_array().unwrap();
        assert_eq!(platforms.len(), 3);
        let first = &platforms[0];
        assert_eq!(first["provider"], json!("ibm"));
        assert_eq!(first["device"], json!("fez"));
        assert_eq!(first["record_count"], json!(4));
        assert_eq!(
            first["benchmarks"],
            json!(["BSEQ", "Mirror Circuits", "QML Kernel", "WIT"])
        );

        let out = dir.path().join("export");
        let (benchmarks_path, platforms_path) =
            write_export_bundle(&out, &bundle).unwrap();
        let reread: Value =
            serde_json::from_str(&fs::read_to_string(&benchmarks_path).unwrap()).unwrap();
        assert_eq!(reread.as_array().unwrap().len(), 12);
        assert!(platforms_path.exists());
    }
}
