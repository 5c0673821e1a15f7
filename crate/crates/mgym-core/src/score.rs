//! Composite scoring: width aggregation, baseline normalization,
//! effective widths, benchmark weights, and score-table assembly.
//!
//! A suite *series* declares, per benchmark, a metric, an evaluation
//! width grid (or a declared whole-device reference scale), and a
//! direction. Raw per-width values are combined with width-proportional
//! weights αᵢ = nᵢ/Σnⱼ at the level of the raw measurements, normalized
//! against the series' baseline device (parity = 100), and combined into
//! a single composite score with benchmark weights proportional to each
//! benchmark's effective width μ_b = Σnᵢ²/Σnᵢ. Missing data contributes
//! zero rather than renormalizing the remaining weights, so absences are
//! penalized instead of hidden.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{bseq, eplg};
use crate::error::{CoreError, Result};

/// Whether larger or smaller raw values indicate better performance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

/// One benchmark's entry in a series: metric, width grid or declared
/// reference scale, and direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesComponent {
    pub benchmark: String,
    pub metric: String,
    /// Evaluation width grid; empty when `n_ref` is declared instead.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub widths: Vec<usize>,
    /// Declared reference scale for whole-device benchmarks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ref: Option<f64>,
    pub direction: Direction,
}

impl SeriesComponent {
    /// Effective width μ_b: the declared reference scale when present,
    /// otherwise the width-weighted mean of the grid.
    pub fn effective_width(&self) -> Result<f64> {
        if let Some(n_ref) = self.n_ref {
            if n_ref <= 0.0 {
                return Err(CoreError::Scoring(format!(
                    "benchmark '{}' declares a non-positive reference scale",
                    self.benchmark
                )));
            }
            return Ok(n_ref);
        }
        effective_width(&self.widths)
    }
}

/// A suite version: baseline device plus the component list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub series: String,
    pub baseline_device: String,
    pub components: Vec<SeriesComponent>,
}

impl SeriesSpec {
    pub fn from_json(json: &str) -> Result<SeriesSpec> {
        let spec: SeriesSpec = serde_json::from_str(json)
            .map_err(|e| CoreError::Scoring(format!("invalid series spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(CoreError::Scoring("series declares no components".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.components {
            if !seen.insert(&c.benchmark) {
                return Err(CoreError::Scoring(format!(
                    "benchmark '{}' appears twice in the series",
                    c.benchmark
                )));
            }
            if c.widths.is_empty() && c.n_ref.is_none() {
                return Err(CoreError::Scoring(format!(
                    "benchmark '{}' declares neither widths nor n_ref",
                    c.benchmark
                )));
            }
            if c.widths.iter().any(|&n| n == 0) {
                return Err(CoreError::Scoring(format!(
                    "benchmark '{}' declares a zero width",
                    c.benchmark
                )));
            }
            c.effective_width()?;
        }
        Ok(())
    }

    pub fn component(&self, benchmark: &str) -> Option<&SeriesComponent> {
        self.components.iter().find(|c| c.benchmark == benchmark)
    }

    /// Benchmark weights w_b = μ_b / Σμ_c for this series.
    pub fn weights(&self) -> Result<BTreeMap<String, f64>> {
        let mut mu = BTreeMap::new();
        for c in &self.components {
            mu.insert(c.benchmark.clone(), c.effective_width()?);
        }
        benchmark_weights(&mu)
    }
}

/// One device's raw measurements for one benchmark.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BenchmarkMeasurement {
    /// A single whole-device raw value (e.g. a throughput figure).
    Scalar { value: f64 },
    /// Raw values keyed by circuit width.
    Widths { values: BTreeMap<usize, f64> },
    /// The entanglement benchmark's two metrics.
    Bseq {
        largest_component: f64,
        fraction_connected: f64,
    },
    /// Per-prefix-length error-per-layered-gate values.
    EplgByLength { values: BTreeMap<usize, f64> },
}

/// Per-device score row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceScore {
    pub device: String,
    /// Width-aggregated raw value v̄_b where a single aggregate exists.
    pub aggregates: BTreeMap<String, Option<f64>>,
    /// Baseline-normalized subscores BS_b (0 where data is missing).
    pub subscores: BTreeMap<String, f64>,
    /// Composite score Σ w_b · BS_b.
    pub metriq_score: f64,
}

/// The assembled table: weights, effective widths, and per-device rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreTable {
    pub series: String,
    pub baseline_device: String,
    pub effective_widths: BTreeMap<String, f64>,
    pub weights: BTreeMap<String, f64>,
    pub devices: Vec<DeviceScore>,
}

impl ScoreTable {
    pub fn device(&self, device: &str) -> Option<&DeviceScore> {
        self.devices.iter().find(|d| d.device == device)
    }
}

/// Width-proportional aggregation weights αᵢ = nᵢ / Σnⱼ.
pub fn width_weights(widths: &[usize]) -> Result<Vec<f64>> {
    if widths.is_empty() || widths.iter().any(|&n| n == 0) {
        return Err(CoreError::Scoring(
            "width weights need a non-empty list of positive widths".into(),
        ));
    }
    let total: f64 = widths.iter().map(|&n| n as f64).sum();
    Ok(widths.iter().map(|&n| n as f64 / total).collect())
}

/// Width-aggregated raw value Σ αᵢ·vᵢ.
pub fn width_aggregate(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(CoreError::Scoring(
            "width aggregate needs matching value and weight lengths".into(),
        ));
    }
    Ok(values.iter().zip(weights).map(|(v, a)| v * a).sum())
}

/// Baseline-normalized subscore: 100·v̄/v̄_base (higher_better) or
/// 100·v̄_base/v̄ (lower_better). Missing data or a zero denominator
/// yields 0, the missing-benchmark subscore.
pub fn baseline_normalize(value: Option<f64>, baseline: Option<f64>, direction: Direction) -> f64 {
    let (Some(v), Some(b)) = (value, baseline) else {
        return 0.0;
    };
    match direction {
        Direction::HigherBetter => {
            if b > 0.0 {
                100.0 * v / b
            } else {
                0.0
            }
        }
        Direction::LowerBetter => {
            if v > 0.0 {
                100.0 * b / v
            } else {
                0.0
            }
        }
    }
}

/// Effective width μ = Σnᵢ² / Σnᵢ of a width grid.
pub fn effective_width(widths: &[usize]) -> Result<f64> {
    if widths.is_empty() || widths.iter().any(|&n| n == 0) {
        return Err(CoreError::Scoring(
            "effective width needs a non-empty list of positive widths".into(),
        ));
    }
    let sum: f64 = widths.iter().map(|&n| n as f64).sum();
    let sum_sq: f64 = widths.iter().map(|&n| (n as f64).powi(2)).sum();
    Ok(sum_sq / sum)
}

/// Benchmark weights w_b = μ_b / Σμ_c, summing to 1.
pub fn benchmark_weights(mu: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    if mu.is_empty() {
        return Err(CoreError::Scoring("no effective widths supplied".into()));
    }
    if mu.values().any(|&m| m <= 0.0) {
        return Err(CoreError::Scoring(
            "effective widths must be positive".into(),
        ));
    }
    let total: f64 = mu.values().sum();
    Ok(mu.iter().map(|(b, &m)| (b.clone(), m / total)).collect())
}

/// Composite score Σ w_b · BS_b; benchmarks absent from `subscores`
/// contribute zero.
pub fn metriq_score(subscores: &BTreeMap<String, f64>, weights: &BTreeMap<String, f64>) -> f64 {
    weights
        .iter()
        .map(|(b, w)| w * subscores.get(b).copied().unwrap_or(0.0))
        .sum()
}

/// Width-aggregate a measurement against a component's grid. Missing
/// widths contribute a raw value of 0 — α is never renormalized.
fn aggregate_measurement(
    component: &SeriesComponent,
    measurement: &BenchmarkMeasurement,
) -> Result<Option<f64>> {
    match measurement {
        BenchmarkMeasurement::Scalar { value } => Ok(Some(*value)),
        BenchmarkMeasurement::Widths { values } => {
            if component.widths.is_empty() {
                // A whole-device component measured per-width: aggregate
                // over the measured widths themselves.
                let widths: Vec<usize> = values.keys().copied().collect();
                let weights = width_weights(&widths)?;
                let vals: Vec<f64> = values.values().copied().collect();
                return Ok(Some(width_aggregate(&vals, &weights)?));
            }
            let weights = width_weights(&component.widths)?;
            let vals: Vec<f64> = component
                .widths
                .iter()
                .map(|n| values.get(n).copied().unwrap_or(0.0))
                .collect();
            Ok(Some(width_aggregate(&vals, &weights)?))
        }
        BenchmarkMeasurement::Bseq { .. } | BenchmarkMeasurement::EplgByLength { .. } => Ok(None),
    }
}

/// Subscore for one component given the device's and baseline's
/// measurements. Any missing or incompatible data yields 0.
fn component_subscore(
    component: &SeriesComponent,
    device: Option<&BenchmarkMeasurement>,
    baseline: Option<&BenchmarkMeasurement>,
) -> Result<f64> {
    let (Some(device), Some(baseline)) = (device, baseline) else {
        return Ok(0.0);
    };
    match (device, baseline) {
        (
            BenchmarkMeasurement::Bseq {
                largest_component,
                fraction_connected,
            },
            BenchmarkMeasurement::Bseq {
                largest_component: base_lccs,
                fraction_connected: base_fraction,
            },
        ) => Ok(bseq::bseq_score_from_metrics(
            *largest_component,
            *fraction_connected,
            *base_lccs,
            *base_fraction,
        )
        .unwrap_or(0.0)),
        (
            BenchmarkMeasurement::EplgByLength { values },
            BenchmarkMeasurement::EplgByLength {
                values: base_values,
            },
        ) => Ok(eplg::eplg_score(values, base_values).unwrap_or(0.0)),
        (BenchmarkMeasurement::Bseq { .. }, _)
        | (_, BenchmarkMeasurement::Bseq { .. })
        | (BenchmarkMeasurement::EplgByLength { .. }, _)
        | (_, BenchmarkMeasurement::EplgByLength { .. }) => Ok(0.0),
        _ => {
            let v = aggregate_measurement(component, device)?;
            let b = aggregate_measurement(component, baseline)?;
            Ok(baseline_normalize(v, b, component.direction))
        }
    }
}

/// Raw measurements per device, per benchmark.
pub type MeasurementSet = BTreeMap<String, BTreeMap<String, BenchmarkMeasurement>>;

/// Assemble the score table from raw measurements. The baseline device
/// must be present in the measurement set.
pub fn score_table(spec: &SeriesSpec, measurements: &MeasurementSet) -> Result<ScoreTable> {
    spec.validate()?;
    let baseline = measurements.get(&spec.baseline_device).ok_or_else(|| {
        CoreError::Scoring(format!(
            "baseline device '{}' has no measurements",
            spec.baseline_device
        ))
    })?;
    let weights = spec.weights()?;
    let mut effective_widths = BTreeMap::new();
    for c in &spec.components {
        effective_widths.insert(c.benchmark.clone(), c.effective_width()?);
    }
    let mut devices = Vec::new();
    for (device_id, device_measurements) in measurements {
        let mut aggregates = BTreeMap::new();
        let mut subscores = BTreeMap::new();
        for c in &spec.components {
            let dev = device_measurements.get(&c.benchmark);
            let base = baseline.get(&c.benchmark);
            let aggregate = match dev {
                Some(m) => aggregate_measurement(c, m)?,
                None => None,
            };
            aggregates.insert(c.benchmark.clone(), aggregate);
            subscores.insert(c.benchmark.clone(), component_subscore(c, dev, base)?);
        }
        let composite = metriq_score(&subscores, &weights);
        devices.push(DeviceScore {
            device: device_id.clone(),
            aggregates,
            subscores,
            metriq_score: composite,
        });
    }
    Ok(ScoreTable {
        series: spec.series.clone(),
        baseline_device: spec.baseline_device.clone(),
        effective_widths,
        weights,
        devices,
    })
}

/// Assemble the table directly from precomputed subscores (e.g. published
/// results), normalizing each column so the baseline row reads 100.
pub fn score_table_from_subscores(
    spec: &SeriesSpec,
    subscores: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<ScoreTable> {
    spec.validate()?;
    let baseline = subscores.get(&spec.baseline_device).ok_or_else(|| {
        CoreError::Scoring(format!(
            "baseline device '{}' has no subscores",
            spec.baseline_device
        ))
    })?;
    let weights = spec.weights()?;
    let mut effective_widths = BTreeMap::new();
    for c in &spec.components {
        effective_widths.insert(c.benchmark.clone(), c.effective_width()?);
    }
    let mut devices = Vec::new();
    for (device_id, raw) in subscores {
        let mut normalized = BTreeMap::new();
        for c in &spec.components {
            let bs = match (raw.get(&c.benchmark), baseline.get(&c.benchmark)) {
                (Some(&v), Some(&b)) if b > 0.0 => 100.0 * v / b,
                _ => 0.0,
            };
            normalized.insert(c.benchmark.clone(), bs);
        }
        let composite = metriq_score(&normalized, &weights);
        devices.push(DeviceScore {
            device: device_id.clone(),
            aggregates: BTreeMap::new(),
            subscores: normalized,
            metriq_score: composite,
        });
    }
    Ok(ScoreTable {
        series: spec.series.clone(),
        baseline_device: spec.baseline_device.clone(),
        effective_widths,
        weights,
        devices,
    })
}

/// One device's published row: benchmark subscores plus the printed
/// composite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublishedDevice {
    pub subscores: BTreeMap<String, f64>,
    pub metriq_score: f64,
}

/// A published subscore table, used as a regression fixture and as the
/// cross-benchmark analytics input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PublishedScores {
    #[serde(default)]
    pub description: String,
    pub baseline_device: String,
    pub devices: BTreeMap<String, PublishedDevice>,
}

impl PublishedScores {
    pub fn from_json(json: &str) -> Result<PublishedScores> {
        serde_json::from_str(json)
            .map_err(|e| CoreError::Scoring(format!("invalid published-scores fixture: {e}")))
    }

    /// The raw subscore matrix, device → benchmark → value.
    pub fn subscore_matrix(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        self.devices
            .iter()
            .map(|(d, row)| (d.clone(), row.subscores.clone()))
            .collect()
    }
}

/// The default suite series spec shipped with the engine.
pub fn default_series() -> SeriesSpec {
    SeriesSpec::from_json(include_str!("../fixtures/series.json"))
        .expect("bundled series fixture is valid")
}

/// The published reference subscore table shipped with the engine.
pub fn published_reference_scores() -> PublishedScores {
    PublishedScores::from_json(include_str!("../fixtures/table1_subscores.json"))
        .expect("bundled published-scores fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example_spec() -> SeriesSpec {
        SeriesSpec {
            series: "worked-example".into(),
            baseline_device: "base".into(),
            components: vec![
                SeriesComponent {
                    benchmark: "bench_a".into(),
                    metric: "value".into(),
                    widths: vec![56],
                    n_ref: None,
                    direction: Direction::HigherBetter,
                },
                SeriesComponent {
                    benchmark: "bench_b".into(),
                    metric: "value".into(),
                    widths: vec![10, 20],
                    n_ref: None,
                    direction: Direction::HigherBetter,
                },
            ],
        }
    }

    #[test]
    fn width_weight_examples() {
        let w = width_weights(&[10, 20, 50, 100]).unwrap();
        let expected = [0.0556, 0.1111, 0.2778, 0.5556];
        for (a, e) in w.iter().zip(expected) {
            assert!((a - e).abs() < 1e-3, "{a} vs {e}");
        }
        assert_eq!(width_weights(&[42]).unwrap(), vec![1.0]);
        let w = width_weights(&[10, 20]).unwrap();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(width_weights(&[]).is_err());
    }

    #[test]
    fn width_aggregate_examples() {
        let w = width_weights(&[10, 20]).unwrap();
        let v = width_aggregate(&[0.88, 0.70], &w).unwrap();
        assert!((v - 0.76).abs() < 1e-12);
        let b = width_aggregate(&[0.82, 0.76], &w).unwrap();
        assert!((b - 0.78).abs() < 1e-12);
        let same = width_aggregate(&[0.5, 0.5, 0.5], &width_weights(&[1, 2, 3]).unwrap()).unwrap();
        assert!((same - 0.5).abs() < 1e-12);
    }

    #[test]
    fn baseline_normalize_examples() {
        let bs = baseline_normalize(Some(0.76), Some(0.78), Direction::HigherBetter);
        assert!((bs - 97.4359).abs() < 1e-3);
        assert_eq!(
            baseline_normalize(Some(0.5), Some(0.5), Direction::HigherBetter),
            100.0
        );
        let eplg = baseline_normalize(Some(1.64e-3), Some(4.88e-3), Direction::LowerBetter);
        assert!((eplg - 297.561).abs() < 0.05, "{eplg}");
        assert_eq!(baseline_normalize(None, Some(1.0), Direction::HigherBetter), 0.0);
        assert_eq!(baseline_normalize(Some(1.0), None, Direction::HigherBetter), 0.0);
        assert_eq!(
            baseline_normalize(Some(1.0), Some(0.0), Direction::HigherBetter),
            0.0
        );
        assert_eq!(
            baseline_normalize(Some(0.0), Some(1.0), Direction::LowerBetter),
            0.0
        );
    }

    #[test]
    fn effective_width_examples() {
        assert!((effective_width(&[10, 20, 50, 100]).unwrap() - 72.222).abs() < 1e-2);
        assert!((effective_width(&[10, 20]).unwrap() - 16.667).abs() < 1e-2);
        assert_eq!(effective_width(&[56]).unwrap(), 56.0);
    }

    #[test]
    fn benchmark_weight_examples() {
        let mut mu = BTreeMap::new();
        for (b, m) in [
            ("bseq", 100.0),
            ("eplg", 72.2222),
            ("mirror", 82.3529),
            ("clops", 100.0),
            ("qml_kernel", 35.4545),
            ("lr_qaoa", 72.2222),
            ("wit", 7.0),
            ("qft", 14.1818),
        ] {
            mu.insert(b.to_string(), m);
        }
        let total: f64 = mu.values().sum();
        assert!((total - 483.5).abs() < 0.5, "Σμ = {total}");
        let w = benchmark_weights(&mu).unwrap();
        assert!((w["bseq"] - 0.2069).abs() < 5e-4);
        assert!((w["eplg"] - 0.1494).abs() < 5e-4);
        assert!((w["mirror"] - 0.1703).abs() < 5e-4);
        assert!((w.values().sum::<f64>() - 1.0).abs() < 1e-12);

        let mut two = BTreeMap::new();
        two.insert("a".to_string(), 56.0);
        two.insert("b".to_string(), 16.667);
        let w = benchmark_weights(&two).unwrap();
        assert!((w["a"] - 0.771).abs() < 1e-3);
        assert!((w["b"] - 0.229).abs() < 1e-3);

        let mut equal = BTreeMap::new();
        for k in ["x", "y", "z", "w"] {
            equal.insert(k.to_string(), 13.0);
        }
        for v in benchmark_weights(&equal).unwrap().values() {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn metriq_score_examples() {
        let mut subscores = BTreeMap::new();
        subscores.insert("a".to_string(), 125.0);
        subscores.insert("b".to_string(), 97.4359);
        let mut weights = BTreeMap::new();
        weights.insert("a".to_string(), 0.77064);
        weights.insert("b".to_string(), 0.22936);
        let ms = metriq_score(&subscores, &weights);
        assert!((ms - 118.7).abs() < 0.1, "{ms}");

        let uniform: BTreeMap<String, f64> =
            weights.keys().map(|k| (k.clone(), 100.0)).collect();
        assert!((metriq_score(&uniform, &weights) - 100.0).abs() < 1e-9);

        // Dropping one benchmark to 0 lowers the composite by exactly its
        // weighted contribution.
        let mut dropped = subscores.clone();
        dropped.insert("b".to_string(), 0.0);
        let delta = ms - metriq_score(&dropped, &weights);
        assert!((delta - 0.22936 * 97.4359).abs() < 1e-9);
    }

    #[test]
    fn worked_example_end_to_end() {
        let spec = worked_example_spec();
        let mut measurements: MeasurementSet = BTreeMap::new();
        let mut base = BTreeMap::new();
        base.insert(
            "bench_a".to_string(),
            BenchmarkMeasurement::Scalar { value: 2.0 },
        );
        base.insert(
            "bench_b".to_string(),
            BenchmarkMeasurement::Widths {
                values: [(10, 0.82), (20, 0.76)].into_iter().collect(),
            },
        );
        measurements.insert("base".to_string(), base);
        let mut dev = BTreeMap::new();
        dev.insert(
            "bench_a".to_string(),
            BenchmarkMeasurement::Scalar { value: 2.5 },
        );
        dev.insert(
            "bench_b".to_string(),
            BenchmarkMeasurement::Widths {
                values: [(10, 0.88), (20, 0.70)].into_iter().collect(),
            },
        );
        measurements.insert("dev".to_string(), dev);

        let table = score_table(&spec, &measurements).unwrap();
        let dev_row = table.device("dev").unwrap();
        assert!((dev_row.subscores["bench_a"] - 125.0).abs() < 1e-9);
        assert!((dev_row.subscores["bench_b"] - 97.4359).abs() < 1e-3);
        assert!(
            (dev_row.metriq_score - 118.7).abs() < 0.1,
            "MS = {}",
            dev_row.metriq_score
        );
        let base_row = table.device("base").unwrap();
        assert!((base_row.metriq_score - 100.0).abs() < 1e-9);
        for bs in base_row.subscores.values() {
            assert!((bs - 100.0).abs() < 1e-9);
        }
        assert!((table.weights["bench_a"] - 0.771).abs() < 1e-3);
    }

    #[test]
    fn partial_width_grids_penalize_missing_widths() {
        let spec = worked_example_spec();
        let mut measurements: MeasurementSet = BTreeMap::new();
        let mut base = BTreeMap::new();
        base.insert(
            "bench_b".to_string(),
            BenchmarkMeasurement::Widths {
                values: [(10, 0.80), (20, 0.80)].into_iter().collect(),
            },
        );
        measurements.insert("base".to_string(), base);
        let mut dev = BTreeMap::new();
        // Only the width-10 entry: the width-20 slot contributes raw 0.
        dev.insert(
            "bench_b".to_string(),
            BenchmarkMeasurement::Widths {
                values: [(10, 0.90)].into_iter().collect(),
            },
        );
        measurements.insert("dev".to_string(), dev);
        let table = score_table(&spec, &measurements).unwrap();
        let dev_row = table.device("dev").unwrap();
        let expected = 100.0 * (0.90 / 3.0) / 0.80;
        assert!(
            (dev_row.subscores["bench_b"] - expected).abs() < 1e-9,
            "{} vs {expected}",
            dev_row.subscores["bench_b"]
        );
        // bench_a missing entirely on both → subscore 0.
        assert_eq!(dev_row.subscores["bench_a"], 0.0);
    }

    #[test]
    fn ranking_invariant_under_per_benchmark_rescale() {
        let spec = worked_example_spec();
        let build = |scale: f64| {
            let mut measurements: MeasurementSet = BTreeMap::new();
            for (name, a, b10, b20) in [
                ("base", 2.0, 0.82, 0.76),
                ("dev1", 2.5, 0.88, 0.70),
                ("dev2", 1.5, 0.60, 0.90),
            ] {
                let mut m = BTreeMap::new();
                m.insert(
                    "bench_a".to_string(),
                    BenchmarkMeasurement::Scalar { value: a * scale },
                );
                m.insert(
                    "bench_b".to_string(),
                    BenchmarkMeasurement::Widths {
                        values: [(10, b10), (20, b20)].into_iter().collect(),
                    },
                );
                measurements.insert(name.to_string(), m);
            }
            score_table(&spec, &measurements).unwrap()
        };
        let t1 = build(1.0);
        let t2 = build(7.3);
        for (d1, d2) in t1.devices.iter().zip(&t2.devices) {
            assert!((d1.metriq_score - d2.metriq_score).abs() < 1e-9);
            for (b, bs) in &d1.subscores {
                assert!((bs - d2.subscores[b]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn composite_is_convex_in_subscores() {
        let mut weights = BTreeMap::new();
        weights.insert("a".to_string(), 0.5);
        weights.insert("b".to_string(), 0.3);
        weights.insert("c".to_string(), 0.2);
        let mut subscores = BTreeMap::new();
        subscores.insert("a".to_string(), 140.0);
        subscores.insert("b".to_string(), 60.0);
        subscores.insert("c".to_string(), 95.0);
        let ms = metriq_score(&subscores, &weights);
        assert!(ms >= 60.0 && ms <= 140.0);
    }

    #[test]
    fn published_composites_reproduce_within_half_point() {
        let spec = default_series();
        let published = published_reference_scores();
        assert_eq!(published.devices.len(), 11);
        let table = score_table_from_subscores(&spec, &published.subscore_matrix()).unwrap();
        for (device, row) in &published.devices {
            let computed = table.device(device).unwrap();
            assert!(
                (computed.metriq_score - row.metriq_score).abs() < 0.5,
                "{device}: computed {} vs published {}",
                computed.metriq_score,
                row.metriq_score
            );
        }
        let baseline = table.device(&spec.baseline_device).unwrap();
        for (b, bs) in &baseline.subscores {
            assert!((bs - 100.0).abs() < 1e-9, "{b} baseline subscore {bs}");
        }
    }

    #[test]
    fn series_spec_round_trips_and_validates() {
        let json = r#"{
            "series": "v1",
            "baseline_device": "base",
            "components": [
                {"benchmark": "bseq", "metric": "bseq_score", "n_ref": 100, "direction": "higher_better"},
                {"benchmark": "eplg", "metric": "eplg", "widths": [10, 20, 50, 100], "direction": "lower_better"}
            ]
        }"#;
        let spec = SeriesSpec::from_json(json).unwrap();
        assert_eq!(spec.components.len(), 2);
        assert_eq!(spec.component("bseq").unwrap().effective_width().unwrap(), 100.0);
        let w = spec.weights().unwrap();
        assert!((w.values().sum::<f64>() - 1.0).abs() < 1e-12);

        let bad = r#"{"series": "v1", "baseline_device": "base", "components": [
            {"benchmark": "x", "metric": "m", "direction": "higher_better"}
        ]}"#;
        assert!(SeriesSpec::from_json(bad).is_err());
    }
}
