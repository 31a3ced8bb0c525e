//! Path-length anomaly scores and collusive displacement.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{AlgorithmKind, NodeBody, NodeId, Tree};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// Average isolation-tree height `c(n)` for `n >= 2` points.
pub fn average_path_length(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("c(n) needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n)
}

/// `2^(-mean_depth / c(n))`.
pub fn score_from_depth(mean_depth: f64, n: usize) -> Result<f64> {
    Ok((-mean_depth / average_path_length(n)?).exp2())
}

/// Anomaly score of point `x` over a forest of isolation trees, each trained on
/// `n` points.
pub fn anomaly_score(trees: &[Tree], x: usize, n: usize) -> Result<f64> {
    let mut total = 0usize;
    let mut count = 0usize;
    for tree in trees {
        if let Some(leaf) = tree.leaf_of(x) {
            total += tree.depth(leaf)?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::PointNotFound(x));
    }
    score_from_depth(total as f64 / count as f64, n)
}

/// Sum of node depths.
pub fn model_complexity(tree: &Tree) -> usize {
    tree.depths().into_iter().flatten().sum()
}

/// Depth of the leaf holding each point, as `(point id, depth)` pairs.
pub fn leaf_depths(tree: &Tree) -> Vec<(usize, usize)> {
    let depths = tree.depths();
    tree.leaves()
        .flat_map(|(leaf, members)| {
            let d = depths[leaf].expect("leaf is live");
            members.iter().map(move |&m| (m, d))
        })
        .collect()
}

/// Collusive displacement of `x`: the largest ratio of sibling mass to node
/// mass over the leaf of `x` and its ancestors below the root.
///
/// A point whose leaf is the root has nothing to displace and scores 0.
pub fn codisp(tree: &Tree, x: usize) -> Result<f64> {
    let leaf = tree.leaf_of(x).ok_or(Error::PointNotFound(x))?;
    codisp_from_leaf(tree, leaf)
}

pub(crate) fn codisp_from_leaf(tree: &Tree, leaf: NodeId) -> Result<f64> {
    let mut best: f64 = 0.0;
    let mut node = leaf;
    while let Some(sibling) = tree.sibling(node)? {
        let ratio = tree.nodes[sibling].mass as f64 / tree.nodes[node].mass as f64;
        best = best.max(ratio);
        node = tree.nodes[node].parent.expect("node with a sibling has a parent");
    }
    Ok(best)
}

/// CODISP of every point in the tree, as `(point id, score)` pairs, in one
/// top-down pass.
pub fn codisp_all(tree: &Tree) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(tree.len());
    let mut stack: Vec<(NodeId, f64)> = tree.root().map(|r| (r, 0.0)).into_iter().collect();
    while let Some((id, best)) = stack.pop() {
        match &tree.nodes[id].body {
            NodeBody::Leaf(members) => out.extend(members.iter().map(|&m| (m, best))),
            NodeBody::Internal { left, right, .. } => {
                let (l, r) = (tree.nodes[*left].mass as f64, tree.nodes[*right].mass as f64);
                stack.push((*right, best.max(l / r)));
                stack.push((*left, best.max(r / l)));
            }
        }
    }
    out
}

/// CODISP straight from its definition: for every node `D` holding `x` below
/// the root, drop `D` from every node of the tree and add up how much closer
/// to the root the remaining points get, divided by `|D|`.
///
/// Works on the set family of the tree and is quadratic or worse. Intended as
/// a reference for checking [`codisp`].
pub fn codisp_displacement_oracle(tree: &Tree, x: usize) -> Result<f64> {
    let family = tree.node_sets();
    let root_set = family.iter().max_by_key(|s| s.len()).ok_or(Error::PointNotFound(x))?.clone();
    if !root_set.contains(&x) {
        return Err(Error::PointNotFound(x));
    }
    let mut best: f64 = 0.0;
    for d in family.iter().filter(|s| s.contains(&x) && s.len() < root_set.len()) {
        let displaced = displacement(&family, d);
        best = best.max(displaced as f64 / d.len() as f64);
    }
    Ok(best)
}

/// Total depth decrease of the points outside `d` when `d` is removed.
pub fn displacement(family: &BTreeSet<Vec<usize>>, d: &[usize]) -> usize {
    let depth_in = |fam: &BTreeSet<Vec<usize>>, y: usize| fam.iter().filter(|s| s.contains(&y)).count() - 1;
    let reduced: BTreeSet<Vec<usize>> = family
        .iter()
        .map(|s| s.iter().copied().filter(|m| !d.contains(m)).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect();
    let outside: BTreeSet<usize> = family.iter().flatten().copied().filter(|m| !d.contains(m)).collect();
    outside.into_iter().map(|y| depth_in(family, y) - depth_in(&reduced, y)).sum()
}

/// Per-point scores of one run with the metadata needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub algorithm: AlgorithmKind,
    pub seed: u64,
    pub trees: usize,
    /// Extra `(name, value)` parameters echoed into the output.
    pub params: Vec<(String, String)>,
    /// Score per point, indexed by 0-based point id. `None` for points no tree saw.
    pub scores: Vec<Option<f64>>,
}

impl ScoreReport {
    pub fn new(algorithm: AlgorithmKind, seed: u64, trees: usize, scores: Vec<Option<f64>>) -> Self {
        Self { algorithm, seed, trees, params: Vec::new(), scores }
    }

    pub fn with_param(mut self, name: &str, value: impl ToString) -> Self {
        self.params.push((name.to_string(), value.to_string()));
        self
    }

    fn metadata(&self) -> Vec<(String, String)> {
        let mut meta = vec![
            ("algorithm".to_string(), self.algorithm.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("trees".to_string(), self.trees.to_string()),
        ];
        meta.extend(self.params.iter().cloned());
        meta.push(("version".to_string(), env!("CARGO_PKG_VERSION").to_string()));
        meta
    }

    /// `#`-prefixed metadata, then `point_id,score` rows with 1-based ids.
    /// Unscored points have an empty score field.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in self.metadata() {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "point_id,score")?;
        for (i, s) in self.scores.iter().enumerate() {
            match s {
                Some(s) => writeln!(out, "{},{}", i + 1, s)?,
                None => writeln!(out, "{},", i + 1)?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let meta: serde_json::Map<String, serde_json::Value> =
            self.metadata().into_iter().map(|(k, v)| (k, serde_json::Value::String(v))).collect();
        let points: Vec<serde_json::Value> = self
            .scores
            .iter()
            .enumerate()
            .map(|(i, s)| serde_json::json!({ "point_id": i + 1, "score": s }))
            .collect();
        serde_json::json!({ "metadata": meta, "scores": points })
    }
}
