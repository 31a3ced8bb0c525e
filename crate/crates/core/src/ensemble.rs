//! Bagged forests.
//!
//! Each of `N` iterations shuffles the point ids and cuts the first `k*s` of
//! them into `k = floor(n/s)` disjoint samples of size `s`, one tree per
//! sample. A point's score averages over the trees whose sample contained it.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::density::DensityParams;
use crate::error::{Error, Result};
use crate::rng::{child_rng, derive_seed};
use crate::score::{codisp_all, leaf_depths, score_from_depth, ScoreReport};
use crate::tree::{AlgorithmKind, Tree};

/// Trees built and scored per parallel batch by [`bagged_scores`].
const BATCH: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaggingConfig {
    pub kind: AlgorithmKind,
    pub params: DensityParams,
    pub sample_size: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl BaggingConfig {
    pub fn new(kind: AlgorithmKind, sample_size: usize, iterations: usize) -> Self {
        Self { kind, params: DensityParams::default(), sample_size, iterations, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_params(mut self, params: DensityParams) -> Self {
        self.params = params;
        self
    }

    /// Samples per iteration for a dataset of `n` points.
    pub fn samples_per_iteration(&self, n: usize) -> usize {
        n / self.sample_size.max(1)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.sample_size == 0 || self.sample_size > n {
            return Err(Error::InvalidParameter(format!(
                "sample size {} must be between 1 and {n}",
                self.sample_size
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be at least 1".into()));
        }
        if self.kind.is_isolation() && self.sample_size < 2 {
            return Err(Error::InvalidParameter("isolation scores need a sample size of at least 2".into()));
        }
        Ok(())
    }

    /// Tree samples in build order: iteration by iteration, `k` per iteration.
    pub fn samples(&self, n: usize) -> Result<Vec<Vec<usize>>> {
        self.validate(n)?;
        let k = self.samples_per_iteration(n);
        let shuffle_seed = derive_seed(self.seed, 0);
        let mut out = Vec::with_capacity(self.iterations * k);
        let mut ids: Vec<usize> = (0..n).collect();
        for iteration in 0..self.iterations {
            let mut rng = child_rng(shuffle_seed, iteration as u64);
            ids.shuffle(&mut rng);
            out.extend(ids.chunks_exact(self.sample_size).take(k).map(|c| {
                let mut c = c.to_vec();
                c.sort_unstable();
                c
            }));
        }
        Ok(out)
    }

    fn tree_seed(&self, index: usize) -> u64 {
        derive_seed(derive_seed(self.seed, 1), index as u64)
    }
}

/// A bagged forest with its per-point appearance counts.
#[derive(Debug, Clone)]
pub struct Forest {
    pub config: BaggingConfig,
    pub trees: Vec<Tree>,
    /// Number of trees whose sample contained each point.
    pub appearances: Vec<usize>,
}

pub fn bagged_forest(x: &Dataset, config: &BaggingConfig) -> Result<Forest> {
    let samples = config.samples(x.len())?;
    let mut appearances = vec![0; x.len()];
    for id in samples.iter().flatten() {
        appearances[*id] += 1;
    }
    let trees = samples
        .into_par_iter()
        .enumerate()
        .map(|(i, ids)| Tree::build_seeded(x, ids, config.kind, config.params, config.tree_seed(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest { config: *config, trees, appearances })
}

/// Per-tree contribution: CODISP for random cut trees, leaf depth for
/// isolation trees.
fn tree_values(tree: &Tree) -> Vec<(usize, f64)> {
    if tree.kind().is_isolation() {
        leaf_depths(tree).into_iter().map(|(id, d)| (id, d as f64)).collect()
    } else {
        codisp_all(tree)
    }
}

fn finish(config: &BaggingConfig, sums: Vec<f64>, counts: &[usize]) -> Result<Vec<Option<f64>>> {
    sums.into_iter()
        .zip(counts)
        .map(|(sum, &a)| {
            if a == 0 {
                return Ok(None);
            }
            let mean = sum / a as f64;
            if config.kind.is_isolation() {
                score_from_depth(mean, config.sample_size).map(Some)
            } else {
                Ok(Some(mean))
            }
        })
        .collect()
}

impl Forest {
    fn accumulate(&self, isolation: bool) -> Result<Vec<Option<f64>>> {
        if self.config.kind.is_isolation() != isolation {
            return Err(Error::InvalidParameter(format!(
                "score does not apply to {} forests",
                self.config.kind
            )));
        }
        let per_tree: Vec<Vec<(usize, f64)>> = self.trees.par_iter().map(tree_values).collect();
        let mut sums = vec![0.0; self.appearances.len()];
        for values in per_tree {
            for (id, v) in values {
                sums[id] += v;
            }
        }
        finish(&self.config, sums, &self.appearances)
    }

    /// Mean CODISP per point; `None` where no tree sampled the point.
    pub fn avg_codisp(&self) -> Result<Vec<Option<f64>>> {
        self.accumulate(false)
    }

    /// Path-length anomaly score per point from the mean leaf depth over the
    /// trees that sampled it.
    pub fn avg_anomaly_score(&self) -> Result<Vec<Option<f64>>> {
        self.accumulate(true)
    }

    /// The score that fits the forest's algorithm.
    pub fn scores(&self) -> Result<Vec<Option<f64>>> {
        self.accumulate(self.config.kind.is_isolation())
    }

    pub fn report(&self) -> Result<ScoreReport> {
        Ok(report(&self.config, self.trees.len(), self.scores()?))
    }
}

fn report(config: &BaggingConfig, trees: usize, scores: Vec<Option<f64>>) -> ScoreReport {
    let mut r = ScoreReport::new(config.kind, config.seed, trees, scores)
        .with_param("iterations", config.iterations)
        .with_param("sample_size", config.sample_size);
    if config.kind.is_weighted() {
        r = r.with_param("alpha", config.params.alpha);
    }
    r
}

/// Same scores as `bagged_forest(..).scores()` without keeping the trees.
pub fn bagged_scores(x: &Dataset, config: &BaggingConfig) -> Result<Vec<Option<f64>>> {
    let samples = config.samples(x.len())?;
    let mut sums = vec![0.0; x.len()];
    let mut counts = vec![0; x.len()];
    for (b, batch) in samples.chunks(BATCH).enumerate() {
        let per_tree = batch
            .par_iter()
            .enumerate()
            .map(|(i, ids)| {
                let tree = Tree::build_seeded(x, ids.clone(), config.kind, config.params, config.tree_seed(b * BATCH + i))?;
                Ok(tree_values(&tree))
            })
            .collect::<Result<Vec<_>>>()?;
        for values in per_tree {
            for (id, v) in values {
                sums[id] += v;
                counts[id] += 1;
            }
        }
    }
    finish(config, sums, &counts)
}

/// Runs [`bagged_scores`] and wraps the result with run metadata.
pub fn bagged_report(x: &Dataset, config: &BaggingConfig) -> Result<ScoreReport> {
    let trees = config.iterations * config.samples_per_iteration(x.len());
    Ok(report(config, trees, bagged_scores(x, config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::{average_path_length, codisp};

    fn line(n: usize) -> Dataset {
        Dataset::from_scalars(&(0..n).map(|i| (i * i) as f64).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn sample_layout() {
        let c = BaggingConfig::new(AlgorithmKind::Rrcf, 3, 5).with_seed(4);
        let samples = c.samples(10).unwrap();
        assert_eq!(samples.len(), 15);
        for iteration in samples.chunks(3) {
            let mut seen: Vec<usize> = iteration.iter().flatten().copied().collect();
            assert_eq!(seen.len(), 9);
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), 9);
        }
        let full = BaggingConfig::new(AlgorithmKind::Rrcf, 10, 2).samples(10).unwrap();
        assert!(full.iter().all(|s| s == &(0..10).collect::<Vec<_>>()));
        assert!(BaggingConfig::new(AlgorithmKind::Rrcf, 11, 1).samples(10).is_err());
        assert!(BaggingConfig::new(AlgorithmKind::Rrcf, 3, 0).samples(10).is_err());
    }

    #[test]
    fn appearance_total() {
        let x = line(10);
        let c = BaggingConfig::new(AlgorithmKind::Wrcf, 3, 5).with_seed(2);
        let f = bagged_forest(&x, &c).unwrap();
        assert_eq!(f.appearances.iter().sum::<usize>(), 5 * 3 * 3);
        assert_eq!(f.trees.len(), 15);
    }

    #[test]
    fn single_tree_average_is_codisp() {
        let x = line(7);
        let f = bagged_forest(&x, &BaggingConfig::new(AlgorithmKind::Rrcf, 7, 1).with_seed(5)).unwrap();
        let scores = f.avg_codisp().unwrap();
        for (id, s) in scores.iter().enumerate() {
            assert_eq!(s.unwrap(), codisp(&f.trees[0], id).unwrap());
        }
        assert!(f.avg_anomaly_score().is_err());
    }

    #[test]
    fn unsampled_points_are_null() {
        let x = line(10);
        let f = bagged_forest(&x, &BaggingConfig::new(AlgorithmKind::Rrcf, 4, 1).with_seed(1)).unwrap();
        let scores = f.avg_codisp().unwrap();
        assert_eq!(scores.iter().filter(|s| s.is_none()).count(), 2);
        assert_eq!(f.report().unwrap().scores, scores);
    }

    #[test]
    fn streaming_accumulation_matches_forest() {
        let x = line(30);
        for kind in AlgorithmKind::ALL {
            let c = BaggingConfig::new(kind, 8, 300).with_seed(11);
            assert_eq!(bagged_forest(&x, &c).unwrap().scores().unwrap(), bagged_scores(&x, &c).unwrap());
        }
    }

    #[test]
    fn weighted_isolation_scores_equal_on_symmetric_set() {
        let x = Dataset::from_scalars(&[0.0, 1.0, 6.0, 7.0]).unwrap();
        let f = bagged_forest(&x, &BaggingConfig::new(AlgorithmKind::Wif, 4, 200).with_seed(0)).unwrap();
        let s = f.avg_anomaly_score().unwrap();
        let expected = (-2.0 / average_path_length(4).unwrap()).exp2();
        assert!(s.iter().all(|v| v.unwrap() == expected));
    }
}
