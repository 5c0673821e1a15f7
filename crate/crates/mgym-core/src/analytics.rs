//! Cross-benchmark analyses over device × benchmark score matrices:
//! Spearman rank correlation, principal-component analysis of z-scored
//! log-scores, and a log-linear ridge model evaluated with
//! leave-one-device-out cross-validation.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::score::ScoreTable;

/// Devices × benchmarks subscore matrix with a missing-value mask.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreMatrix {
    pub devices: Vec<String>,
    pub benchmarks: Vec<String>,
    /// `values[device][benchmark]`; `None` marks a missing entry.
    pub values: Vec<Vec<Option<f64>>>,
}

impl ScoreMatrix {
    /// Builds a matrix from per-device subscore maps (missing benchmarks
    /// simply absent from a device's map). Devices and benchmarks are
    /// sorted for determinism.
    pub fn from_subscores(map: &BTreeMap<String, BTreeMap<String, f64>>) -> ScoreMatrix {
        let mut benchmarks: Vec<String> = map
            .values()
            .flat_map(|row| row.keys().cloned())
            .collect();
        benchmarks.sort();
        benchmarks.dedup();
        let devices: Vec<String> = map.keys().cloned().collect();
        let values = devices
            .iter()
            .map(|d| benchmarks.iter().map(|b| map[d].get(b).copied()).collect())
            .collect();
        ScoreMatrix {
            devices,
            benchmarks,
            values,
        }
    }

    /// Builds a matrix from a computed score table. Zero subscores encode
    /// missing or failed measurements in score tables and become `None`.
    pub fn from_score_table(table: &ScoreTable) -> ScoreMatrix {
        let map: BTreeMap<String, BTreeMap<String, f64>> = table
            .devices
            .iter()
            .map(|score| {
                let row = score
                    .subscores
                    .iter()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(b, v)| (b.clone(), *v))
                    .collect();
                (score.device.clone(), row)
            })
            .collect();
        ScoreMatrix::from_subscores(&map)
    }

    pub fn benchmark_index(&self, benchmark: &str) -> Result<usize> {
        self.benchmarks
            .iter()
            .position(|b| b == benchmark)
            .ok_or_else(|| {
                CoreError::Analytics(format!("benchmark {benchmark:?} not in score matrix"))
            })
    }

    /// Number of devices missing a benchmark's value.
    pub fn missing_count(&self, benchmark_index: usize) -> usize {
        self.values
            .iter()
            .filter(|row| row[benchmark_index].is_none())
            .count()
    }

    /// Values of two benchmarks over the devices that measured both.
    pub fn pairwise_complete(&self, a: &str, b: &str) -> Result<(Vec<f64>, Vec<f64>)> {
        let (ia, ib) = (self.benchmark_index(a)?, self.benchmark_index(b)?);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for row in &self.values {
            if let (Some(x), Some(y)) = (row[ia], row[ib]) {
                xs.push(x);
                ys.push(y);
            }
        }
        Ok((xs, ys))
    }

    /// Rows complete (present **and strictly positive**, so the log
    /// transform applies) over the selected benchmarks. Returns the kept
    /// device names and their value rows in benchmark order.
    pub fn complete_case(&self, benchmarks: &[String]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let indices: Vec<usize> = benchmarks
            .iter()
            .map(|b| self.benchmark_index(b))
            .collect::<Result<_>>()?;
        let mut devices = Vec::new();
        let mut rows = Vec::new();
        for (device, row) in self.devices.iter().zip(&self.values) {
            let picked: Vec<f64> = indices.iter().filter_map(|&i| row[i]).collect();
            if picked.len() == indices.len() && picked.iter().all(|v| *v > 0.0) {
                devices.push(device.clone());
                rows.push(picked);
            }
        }
        Ok((devices, rows))
    }
}

/// Average (mean-of-tied) ranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // Positions start..=end share the mean of their 1-based ranks.
        let mean_rank = (start + end) as f64 / 2.0 + 1.0;
        for &i in &order[start..=end] {
            ranks[i] = mean_rank;
        }
        start = end + 1;
    }
    ranks
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(CoreError::Analytics(format!(
            "correlation needs two equal-length series of ≥ 3 values, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CoreError::Analytics(
            "correlation undefined for a zero-variance series".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation: the Pearson correlation of average-ranked
/// data (ties get their mean rank).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(CoreError::Analytics(format!(
            "spearman needs two equal-length series of ≥ 3 values, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

fn check_log_rows(rows: &[Vec<f64>], what: &str) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Err(CoreError::Analytics(format!("{what}: no rows")));
    };
    let k = first.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(CoreError::Analytics(format!(
                "{what}: row {i} has {} columns, expected {k}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(CoreError::Analytics(format!(
                "{what}: row {i} column {j} is {} (log transform needs strictly positive finite values)",
                row[j]
            )));
        }
    }
    Ok(k)
}

/// Per-component explained-variance fractions (descending) of the PCA of
/// z-scored log-scores over complete-case rows.
pub fn pca_explained_variance(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = check_log_rows(rows, "pca")?;
    let n = rows.len();
    if n < 3 || k < 2 {
        return Err(CoreError::Analytics(format!(
            "pca needs ≥ 3 complete rows and ≥ 2 columns, got {n}×{k}"
        )));
    }
    // ln, then z-score per column.
    let logs: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| row.iter().map(|v| v.ln()).collect())
        .collect();
    let mut z = DMatrix::<f64>::zeros(n, k);
    for j in 0..k {
        let column: Vec<f64> = logs.iter().map(|row| row[j]).collect();
        let mean = column.iter().sum::<f64>() / n as f64;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        if var == 0.0 {
            return Err(CoreError::Analytics(format!(
                "pca: column {j} has zero variance after log transform"
            )));
        }
        let std = var.sqrt();
        for i in 0..n {
            z[(i, j)] = (logs[i][j] - mean) / std;
        }
    }
    let covariance = (z.transpose() * &z) / (n as f64 - 1.0);
    let mut eigenvalues: Vec<f64> = covariance
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0))
        .collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(CoreError::Analytics("pca: zero total variance".into()));
    }
    Ok(eigenvalues.into_iter().map(|l| l / total).collect())
}

/// Fraction of variance explained by the first principal component.
pub fn pca_first_variance(rows: &[Vec<f64>]) -> Result<f64> {
    Ok(pca_explained_variance(rows)?[0])
}

/// Greedy column selection for the PCA: starting from all benchmarks,
/// drop the most-missing column while doing so grows the complete-case
/// data volume (rows × columns).
pub fn select_pca_columns(matrix: &ScoreMatrix) -> Result<Vec<String>> {
    let mut columns: Vec<String> = matrix.benchmarks.clone();
    loop {
        let volume = matrix.complete_case(&columns)?.1.len() * columns.len();
        let Some(worst) = columns
            .iter()
            .max_by_key(|b| {
                matrix
                    .benchmark_index(b)
                    .map(|i| matrix.missing_count(i))
                    .unwrap_or(0)
            })
            .cloned()
        else {
            return Ok(columns);
        };
        let worst_missing = matrix.missing_count(matrix.benchmark_index(&worst)?);
        if worst_missing == 0 || columns.len() <= 2 {
            return Ok(columns);
        }
        let candidate: Vec<String> = columns.iter().filter(|b| **b != worst).cloned().collect();
        let candidate_volume = matrix.complete_case(&candidate)?.1.len() * candidate.len();
        if candidate_volume > volume {
            columns = candidate;
        } else {
            return Ok(columns);
        }
    }
}

/// Leave-one-device-out R² of a log-linear ridge model.
///
/// Per fold, features and target are log-transformed and centered on the
/// training rows; ridge coefficients solve `(XᵀX + λI)β = Xᵀy` on the
/// centered training data and predict the held-out log target. R² pools
/// the held-out predictions against the full-sample mean log target.
pub fn ridge_loo_r2_log(x_rows: &[Vec<f64>], y: &[f64], lambda: f64) -> Result<f64> {
    let k = check_log_rows(x_rows, "ridge features")?;
    let n = x_rows.len();
    if y.len() != n {
        return Err(CoreError::Analytics(format!(
            "ridge: {n} feature rows but {} targets",
            y.len()
        )));
    }
    if n < 4 {
        return Err(CoreError::Analytics(format!(
            "ridge cross-validation needs ≥ 4 rows, got {n}"
        )));
    }
    if let Some(i) = y.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(CoreError::Analytics(format!(
            "ridge target row {i} is {} (log transform needs strictly positive finite values)",
            y[i]
        )));
    }
    if !(lambda >= 0.0) {
        return Err(CoreError::Analytics(format!("ridge λ must be ≥ 0, got {lambda}")));
    }

    let x_log: Vec<Vec<f64>> = x_rows
        .iter()
        .map(|row| row.iter().map(|v| v.ln()).collect())
        .collect();
    let y_log: Vec<f64> = y.iter().map(|v| v.ln()).collect();

    let mut predictions = vec![0.0; n];
    for held in 0..n {
        let train: Vec<usize> = (0..n).filter(|i| *i != held).collect();
        let m = train.len() as f64;
        let mut x_mean = vec![0.0; k];
        for &i in &train {
            for j in 0..k {
                x_mean[j] += x_log[i][j];
            }
        }
        for mean in &mut x_mean {
            *mean /= m;
        }
        let y_mean = train.iter().map(|&i| y_log[i]).sum::<f64>() / m;

        let mut xc = DMatrix::<f64>::zeros(train.len(), k);
        let mut yc = DVector::<f64>::zeros(train.len());
        for (r, &i) in train.iter().enumerate() {
            for j in 0..k {
                xc[(r, j)] = x_log[i][j] - x_mean[j];
            }
            yc[r] = y_log[i] - y_mean;
        }
        let gram = xc.transpose() * &xc + DMatrix::<f64>::identity(k, k) * lambda;
        let rhs = xc.transpose() * yc;
        let beta = gram.lu().solve(&rhs).ok_or_else(|| {
            CoreError::Analytics("ridge: singular system (increase λ)".into())
        })?;

        let mut prediction = y_mean;
        for j in 0..k {
            prediction += (x_log[held][j] - x_mean[j]) * beta[j];
        }
        predictions[held] = prediction;
    }

    let y_bar = y_log.iter().sum::<f64>() / n as f64;
    let ss_res: f64 = y_log
        .iter()
        .zip(&predictions)
        .map(|(t, p)| (t - p).powi(2))
        .sum();
    let ss_tot: f64 = y_log.iter().map(|t| (t - y_bar).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(CoreError::Analytics("ridge: zero-variance target".into()));
    }
    Ok(1.0 - ss_res / ss_tot)
}

/// One pairwise rank correlation.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationEntry {
    pub a: String,
    pub b: String,
    pub rho: f64,
    /// Number of devices that measured both benchmarks.
    pub n: usize,
}

/// PCA section of an analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct PcaReport {
    pub benchmarks: Vec<String>,
    pub devices: Vec<String>,
    pub explained_variance: Vec<f64>,
    pub first_component_fraction: f64,
}

/// Ridge model configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RidgeSpec {
    pub features: Vec<String>,
    pub target: String,
    pub lambda: f64,
}

/// The suite's default predictive model: connectivity, layer error, and
/// mirror-circuit quality predicting the QML kernel subscore, λ = 1.
pub fn default_ridge_spec() -> RidgeSpec {
    RidgeSpec {
        features: vec!["bseq".into(), "eplg".into(), "mirror".into()],
        target: "qml_kernel".into(),
        lambda: 1.0,
    }
}

/// Ridge section of an analysis report.
#[derive(Debug, Clone, Serialize)]
pub struct RidgeReport {
    pub spec: RidgeSpec,
    /// Devices included in the cross-validation.
    pub devices: Vec<String>,
    /// Devices excluded for missing or non-positive values, with reasons.
    pub excluded: Vec<String>,
    pub r2_log: f64,
}

/// Full cross-benchmark analysis of a score matrix.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub correlations: Vec<CorrelationEntry>,
    pub pca: PcaReport,
    pub ridge: RidgeReport,
}

impl AnalysisReport {
    /// The rank correlation of a benchmark pair (order-insensitive).
    pub fn correlation(&self, a: &str, b: &str) -> Option<&CorrelationEntry> {
        self.correlations
            .iter()
            .find(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
    }
}

/// Runs the full analysis: pairwise Spearman correlations, PCA over the
/// greedily selected complete-case submatrix, and the ridge model.
pub fn analyze_matrix(matrix: &ScoreMatrix, ridge: &RidgeSpec) -> Result<AnalysisReport> {
    let mut correlations = Vec::new();
    for (i, a) in matrix.benchmarks.iter().enumerate() {
        for b in matrix.benchmarks.iter().skip(i + 1) {
            let (xs, ys) = matrix.pairwise_complete(a, b)?;
            if xs.len() >= 3 {
                correlations.push(CorrelationEntry {
                    a: a.clone(),
                    b: b.clone(),
                    rho: spearman(&xs, &ys)?,
                    n: xs.len(),
                });
            }
        }
    }

    let pca_benchmarks = select_pca_columns(matrix)?;
    let (pca_devices, pca_rows) = matrix.complete_case(&pca_benchmarks)?;
    let explained = pca_explained_variance(&pca_rows)?;
    let pca = PcaReport {
        benchmarks: pca_benchmarks,
        devices: pca_devices,
        first_component_fraction: explained[0],
        explained_variance: explained,
    };

    let mut involved = ridge.features.clone();
    involved.push(ridge.target.clone());
    let (ridge_devices, ridge_rows) = matrix.complete_case(&involved)?;
    let excluded: Vec<String> = matrix
        .devices
        .iter()
        .filter(|d| !ridge_devices.contains(d))
        .cloned()
        .collect();
    let x_rows: Vec<Vec<f64>> = ridge_rows
        .iter()
        .map(|row| row[..ridge.features.len()].to_vec())
        .collect();
    let y: Vec<f64> = ridge_rows
        .iter()
        .map(|row| row[ridge.features.len()])
        .collect();
    let r2_log = ridge_loo_r2_log(&x_rows, &y, ridge.lambda)?;
    let ridge_report = RidgeReport {
        spec: ridge.clone(),
        devices: ridge_devices,
        excluded,
        r2_log,
    };

    Ok(AnalysisReport {
        correlations,
        pca,
        ridge: ridge_report,
    })
}
