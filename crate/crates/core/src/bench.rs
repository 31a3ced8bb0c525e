//! Synthetic data sets, AUC, and runners that compare the plain and
//! density-aware algorithms.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::ensemble::{bagged_scores, BaggingConfig};
use crate::error::{Error, Result};
use crate::rng::{child_rng, derive_seed};
use crate::stream::{stream_codisp, StreamConfig};
use crate::tree::AlgorithmKind;
use crate::DensityParams;

/// 730 samples of a sine wave of amplitude 50 and period 50, with a plateau
/// at 80 for `t` in `235..=254`. Index `i` holds `t = i + 1`.
pub fn gen_sine_anomaly() -> Vec<f64> {
    (1..=730)
        .map(|t| {
            if (235..=254).contains(&t) {
                80.0
            } else {
                50.0 * (2.0 * std::f64::consts::PI * (t as f64 - 30.0) / 50.0).sin()
            }
        })
        .collect()
}

/// Ten points in the plane: one tight cluster and two far points `a`, `b`.
pub fn ten_point_set() -> Dataset {
    Dataset::new(&[
        [-23.6, -2.0],
        [-12.1, 0.3],
        [0.0, 1.7],
        [-1.1, 1.2],
        [0.6, 1.0],
        [0.3, -0.3],
        [0.1, -0.7],
        [1.3, -0.8],
        [-0.7, -0.7],
        [-0.6, 0.1],
    ])
    .expect("valid literal")
}

/// Points with binary labels, `true` marking an anomaly.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub data: Dataset,
    pub labels: Vec<bool>,
}

impl LabeledDataset {
    pub fn new(data: Dataset, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != data.len() {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} points",
                labels.len(),
                data.len()
            )));
        }
        Ok(Self { data, labels })
    }

    pub fn anomalies(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }
}

/// `count` points of `scale * N(0, I) + shift`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianGroup {
    pub count: usize,
    pub scale: f64,
    pub shift: Vec<f64>,
    pub anomalous: bool,
}

/// A union of Gaussian groups in a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSpec {
    pub groups: Vec<GaussianGroup>,
}

impl ClusterSpec {
    /// `n` standard normal points in the plane, none labeled.
    pub fn gaussian(n: usize) -> Self {
        Self { groups: vec![GaussianGroup { count: n, scale: 1.0, shift: vec![0.0, 0.0], anomalous: false }] }
    }

    /// 100 standard normal points plus two labeled groups of 5 shifted by
    /// `-(5, 5)` and `+(5, 5)`.
    pub fn anomaly_clusters() -> Self {
        let group = |count, s: f64, anomalous| GaussianGroup { count, scale: 1.0, shift: vec![s, s], anomalous };
        Self { groups: vec![group(100, 0.0, false), group(5, -5.0, true), group(5, 5.0, true)] }
    }

    /// Two tight clusters of 100 points (`0.1 * N(0, I)` around `(1, 1)` and
    /// `(-1, -1)`) plus 40 labeled standard normal noise points.
    pub fn clusters_with_noise() -> Self {
        let cluster = |s: f64| GaussianGroup { count: 100, scale: 0.1, shift: vec![s, s], anomalous: false };
        Self {
            groups: vec![
                cluster(1.0),
                cluster(-1.0),
                GaussianGroup { count: 40, scale: 1.0, shift: vec![0.0, 0.0], anomalous: true },
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Samples a cluster spec. Groups are laid out in order.
pub fn gen_gaussian_clusters(spec: &ClusterSpec, seed: u64) -> Result<LabeledDataset> {
    let dim = spec.groups.first().map_or(0, |g| g.shift.len());
    if spec.groups.iter().any(|g| g.shift.len() != dim) {
        return Err(Error::InvalidParameter("cluster shifts differ in dimension".into()));
    }
    let mut rng = child_rng(seed, 0);
    let mut values = Vec::with_capacity(spec.len() * dim);
    let mut labels = Vec::with_capacity(spec.len());
    for g in &spec.groups {
        for _ in 0..g.count {
            values.extend(g.shift.iter().map(|&s| g.scale * rng.sample::<f64, _>(StandardNormal) + s));
            labels.push(g.anomalous);
        }
    }
    LabeledDataset::new(Dataset::from_flat(dim, values)?, labels)
}

/// Probability that a random anomaly outscores a random normal point, ties
/// counting one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidParameter("AUC needs both positive and negative labels".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("scores must be finite".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of 1-based ranks of the positives, tied groups sharing their mean rank.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j + 2) as f64 / 2.0;
        rank_sum += mean_rank * order[i..=j].iter().filter(|&&k| labels[k]).count() as f64;
        i = j + 1;
    }
    let (p, n) = (positives as f64, negatives as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Maps scores affinely onto `[0, 1]`. Constant input maps to all zeros.
pub fn min_max_normalize(scores: &[f64]) -> Vec<f64> {
    let Some((lo, hi)) = crate::dataset::min_max(scores) else {
        return Vec::new();
    };
    if lo == hi {
        return vec![0.0; scores.len()];
    }
    scores.iter().map(|s| (s - lo) / (hi - lo)).collect()
}

/// Labeled anomalies whose normalized score exceeds `threshold`.
pub fn detected_anomaly_count(scores: &[f64], labels: &[bool], threshold: f64) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if scores.len() != labels.len() {
        return Err(Error::InvalidParameter(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    Ok(min_max_normalize(scores)
        .iter()
        .zip(labels)
        .filter(|(&s, &l)| l && s > threshold)
        .count())
}

/// Replaces missing scores with the lowest present score so unsampled points
/// rank as normal.
pub fn fill_unscored(scores: &[Option<f64>]) -> Vec<f64> {
    let floor = scores.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 0.0 };
    scores.iter().map(|s| s.unwrap_or(floor)).collect()
}

/// One cell of a result table. `n` is the swept parameter: iterations for
/// detection counts, tree size for AUC, forest size for streaming runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub algorithm: AlgorithmKind,
    pub seed: u64,
    pub n: usize,
    pub metric: String,
    pub value: f64,
}

/// One point of a plot series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub x: f64,
    pub y: f64,
    pub series: String,
}

pub fn write_metrics<W: Write>(mut out: W, meta: &[(String, String)], rows: &[MetricRow]) -> std::io::Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "algorithm,seed,N,metric,value")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.algorithm, r.seed, r.n, r.metric, r.value)?;
    }
    Ok(())
}

pub fn write_plot<W: Write>(mut out: W, meta: &[(String, String)], rows: &[PlotRow]) -> std::io::Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}={v}")?;
    }
    writeln!(out, "x,y,series")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.x, r.y, r.series)?;
    }
    Ok(())
}

/// Bagged scores with unsampled points filled in.
pub fn scores_for(x: &Dataset, config: &BaggingConfig) -> Result<Vec<f64>> {
    Ok(fill_unscored(&bagged_scores(x, config)?))
}

fn run_seed(base: u64, run: usize) -> u64 {
    derive_seed(base, run as u64)
}

/// AUC of each algorithm at each tree size, one row per (algorithm, size, run).
/// Tree sizes above the data size are clamped to it.
pub fn auc_by_tree_size(
    data: &LabeledDataset,
    kinds: &[AlgorithmKind],
    tree_sizes: &[usize],
    iterations: usize,
    params: DensityParams,
    seed: u64,
    runs: usize,
) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for run in 0..runs {
        let s = run_seed(seed, run);
        for &size in tree_sizes {
            for &kind in kinds {
                let config = BaggingConfig::new(kind, size.min(data.data.len()), iterations).with_seed(s).with_params(params);
                let value = auc(&scores_for(&data.data, &config)?, &data.labels)?;
                rows.push(MetricRow { algorithm: kind, seed: s, n: size, metric: "auc".into(), value });
            }
        }
    }
    Ok(rows)
}

/// Number of labeled anomalies above a normalized threshold, per iteration count.
#[allow(clippy::too_many_arguments)]
pub fn detections_by_iterations(
    data: &LabeledDataset,
    kinds: &[AlgorithmKind],
    iterations: &[usize],
    sample_size: usize,
    threshold: f64,
    params: DensityParams,
    seed: u64,
    runs: usize,
) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for run in 0..runs {
        let s = run_seed(seed, run);
        for &n in iterations {
            for &kind in kinds {
                let config = BaggingConfig::new(kind, sample_size, n).with_seed(s).with_params(params);
                let scores = scores_for(&data.data, &config)?;
                let value = detected_anomaly_count(&scores, &data.labels, threshold)? as f64;
                rows.push(MetricRow { algorithm: kind, seed: s, n, metric: "detected".into(), value });
            }
        }
    }
    Ok(rows)
}

/// Streaming scores of the sine series as plot rows: the series itself and
/// one score curve per algorithm and forest size.
pub fn sine_plot(kinds: &[AlgorithmKind], forest_sizes: &[usize], params: DensityParams, seed: u64) -> Result<Vec<PlotRow>> {
    let series = gen_sine_anomaly();
    let mut rows: Vec<PlotRow> = series
        .iter()
        .enumerate()
        .map(|(i, &y)| PlotRow { x: (i + 1) as f64, y, series: "series".into() })
        .collect();
    for &kind in kinds {
        for &r in forest_sizes {
            let config = StreamConfig::new(kind, 4, 256, r).with_seed(seed).with_params(params);
            let scores = stream_codisp(&series, config)?;
            let name = format!("{kind}_r{r}");
            rows.extend(scores.iter().enumerate().map(|(i, &y)| PlotRow { x: (i + 1) as f64, y, series: name.clone() }));
        }
    }
    Ok(rows)
}

/// Bagged scores of a two-dimensional data set as plot rows: `x` is the point
/// id and `y` the min-max normalized score.
pub fn score_plot(x: &Dataset, kinds: &[AlgorithmKind], iterations: usize, sample_size: usize, params: DensityParams, seed: u64) -> Result<Vec<PlotRow>> {
    let mut rows = Vec::new();
    for &kind in kinds {
        let config = BaggingConfig::new(kind, sample_size, iterations).with_seed(seed).with_params(params);
        let scores = min_max_normalize(&scores_for(x, &config)?);
        rows.extend(scores.iter().enumerate().map(|(i, &y)| PlotRow { x: (i + 1) as f64, y, series: kind.to_string() }));
    }
    Ok(rows)
}
