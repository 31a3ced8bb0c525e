//! Streaming random cut trees: point deletion and insertion, shingling, and
//! sliding-window CODISP over a scalar time series.
//!
//! A series `x_1..x_n` is embedded as shingles `s_t = (x_t, .., x_{t+h-1})`.
//! Window `W_i` holds shingles `s_i..s_{i+w-1}`. Every tree of the window
//! forest is built once on `W_1` and then moved forward by deleting `s_i` and
//! inserting `s_{i+w}`. A shingle's score is its CODISP averaged over the
//! trees of each window that contains it, then over those windows.

use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::{BoundingBox, Points};
use crate::density::{interval_count, radius, DensityParams};
use crate::error::{Error, Result};
use crate::rng::{child_rng, TreeRng};
use crate::score::codisp_all;
use crate::tree::{axis_at_offset, AlgorithmKind, Node, NodeBody, NodeId, SplitSampler, Tree};

impl Tree {
    /// Removes one occurrence of point `id`. The emptied leaf and its parent
    /// disappear and the sibling takes the parent's place.
    pub fn delete_point<P: Points + ?Sized>(&mut self, points: &P, id: usize) -> Result<()> {
        let leaf = self
            .find_leaf(points, id)
            .or_else(|| self.leaf_of(id))
            .ok_or(Error::PointNotFound(id))?;
        let NodeBody::Leaf(members) = &mut self.nodes[leaf].body else {
            unreachable!("find_leaf returns leaves");
        };
        let pos = members.iter().position(|&m| m == id).ok_or(Error::PointNotFound(id))?;
        members.remove(pos);

        if !members.is_empty() {
            let bbox = BoundingBox::of(points, members.iter().copied())?;
            self.nodes[leaf].mass -= 1;
            self.nodes[leaf].bbox = bbox;
            self.refresh_ancestors(self.nodes[leaf].parent);
            return Ok(());
        }

        let Some(parent) = self.nodes[leaf].parent else {
            self.release(leaf);
            self.root = None;
            return Ok(());
        };
        let sibling = self.sibling(leaf)?.expect("leaf with a parent has a sibling");
        let grand = self.nodes[parent].parent;
        self.nodes[sibling].parent = grand;
        match grand {
            None => self.root = Some(sibling),
            Some(g) => {
                let is_left = matches!(self.nodes[g].body, NodeBody::Internal { left, .. } if left == parent);
                self.set_child(g, is_left, sibling);
            }
        }
        self.release(leaf);
        self.release(parent);
        self.refresh_ancestors(grand);
        Ok(())
    }

    /// Recomputes mass and bounding box from the children, walking to the root.
    fn refresh_ancestors(&mut self, mut node: Option<NodeId>) {
        while let Some(id) = node {
            if let Some((l, r)) = self.nodes[id].children() {
                self.nodes[id].mass = self.nodes[l].mass + self.nodes[r].mass;
                self.nodes[id].bbox = self.nodes[l].bbox.union(&self.nodes[r].bbox);
            }
            node = self.nodes[id].parent;
        }
    }

    /// Inserts point `id`.
    ///
    /// At each node a cut is drawn uniformly over the edge lengths of the box
    /// enlarged by the new point. If the cut falls outside the node's own box
    /// on the drawn axis, the point is split off right there under a new
    /// parent. Otherwise the node's existing cut routes the point one level
    /// down and the process repeats. Density-aware trees reject drawn cuts
    /// that land in dense windows of the node's values plus the new one.
    pub fn insert_point<P, R>(&mut self, points: &P, id: usize, rng: &mut R) -> Result<()>
    where
        P: Points + ?Sized,
        R: Rng + ?Sized,
    {
        let y = points.point(id);
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch { index: id, expected: self.dim, found: y.len() });
        }
        let Some(mut node) = self.root else {
            let leaf = self.alloc(Node { parent: None, mass: 1, bbox: BoundingBox::point(y), body: NodeBody::Leaf(vec![id]) });
            self.root = Some(leaf);
            return Ok(());
        };
        let mut values = Vec::new();
        loop {
            let bbox = self.nodes[node].bbox.clone();
            let mut enlarged = bbox.clone();
            enlarged.extend(y);
            let total = enlarged.total_edge_length();

            if total == 0.0 {
                // Exact duplicate of a point-box; an internal node never has one.
                self.nodes[node].mass += 1;
                if let NodeBody::Leaf(members) = &mut self.nodes[node].body {
                    members.push(id);
                }
                return Ok(());
            }

            let (axis, cut) = self.draw_insert_cut(points, node, &enlarged, y, &mut values, rng);
            let outside = cut < bbox.min[axis] || cut > bbox.max[axis];

            if outside || (self.nodes[node].is_leaf() && bbox.is_point()) {
                self.split_off(node, id, y, axis, cut, enlarged);
                return Ok(());
            }
            self.nodes[node].mass += 1;
            self.nodes[node].bbox = enlarged;
            match self.nodes[node].body {
                NodeBody::Internal { axis, split, left, right } => {
                    node = if y[axis] < split { left } else { right };
                }
                NodeBody::Leaf(ref mut members) => {
                    // Isolation-tree leaf spanning several distinct points.
                    members.push(id);
                    return Ok(());
                }
            }
        }
    }

    fn draw_insert_cut<P, R>(
        &mut self,
        points: &P,
        node: NodeId,
        enlarged: &BoundingBox,
        y: &[f64],
        values: &mut Vec<f64>,
        rng: &mut R,
    ) -> (usize, f64)
    where
        P: Points + ?Sized,
        R: Rng + ?Sized,
    {
        let total = enlarged.total_edge_length();
        let draw = |rng: &mut R| {
            let r = rng.random_range(0.0..total);
            let axis = axis_at_offset(enlarged, r);
            let before: f64 = (0..axis).map(|q| enlarged.length(q)).sum();
            let cut = (enlarged.min[axis] + (r - before)).clamp(enlarged.min[axis], enlarged.max[axis]);
            (axis, cut)
        };
        let SplitSampler::DensityAware(params) = self.splitter.sampler else {
            return draw(rng);
        };
        let members = self.members(node).expect("live node");
        let DensityParams { alpha, max_retries } = params;
        let mut candidate = draw(rng);
        for _ in 0..max_retries {
            let (axis, cut) = candidate;
            values.clear();
            values.extend(members.iter().map(|&m| points.point(m)[axis]));
            values.push(y[axis]);
            let eps = radius(values).expect("non-empty");
            if interval_count(values, eps, cut) < alpha as usize {
                return candidate;
            }
            self.stats.retries += 1;
            candidate = draw(rng);
        }
        self.stats.fallbacks += 1;
        candidate
    }

    /// Puts a new parent above `node` with the leaf `{id}` as its other child.
    fn split_off(&mut self, node: NodeId, id: usize, y: &[f64], axis: usize, cut: f64, enlarged: BoundingBox) {
        let (lo, hi) = (self.nodes[node].bbox.min[axis], self.nodes[node].bbox.max[axis]);
        let y_left = y[axis] < lo;
        let split = if y_left {
            if y[axis] < cut && cut <= lo { cut } else { lo }
        } else if hi < cut && cut <= y[axis] {
            cut
        } else {
            y[axis]
        };
        let parent = self.nodes[node].parent;
        let mass = self.nodes[node].mass + 1;
        let leaf = self.alloc(Node { parent: None, mass: 1, bbox: BoundingBox::point(y), body: NodeBody::Leaf(vec![id]) });
        let (left, right) = if y_left { (leaf, node) } else { (node, leaf) };
        let branch = self.alloc(Node { parent, mass, bbox: enlarged, body: NodeBody::Internal { axis, split, left, right } });
        self.nodes[leaf].parent = Some(branch);
        self.nodes[node].parent = Some(branch);
        match parent {
            None => self.root = Some(branch),
            Some(p) => {
                let is_left = matches!(self.nodes[p].body, NodeBody::Internal { left, .. } if left == node);
                self.set_child(p, is_left, branch);
            }
        }
        self.stats.splits += 1;
    }
}

/// All `n - h + 1` shingles of a series.
pub fn shingle(series: &[f64], h: usize) -> Result<Vec<Vec<f64>>> {
    if h == 0 || h > series.len() {
        return Err(Error::InvalidParameter(format!(
            "shingle size {h} must be between 1 and the series length {}",
            series.len()
        )));
    }
    Ok(series.windows(h).map(<[f64]>::to_vec).collect())
}

/// Online shingler: feed scalars, get each shingle as soon as it is complete.
#[derive(Debug, Clone)]
pub struct ShingleStream {
    h: usize,
    buffer: VecDeque<f64>,
}

impl ShingleStream {
    pub fn new(h: usize) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("shingle size must be at least 1".into()));
        }
        Ok(Self { h, buffer: VecDeque::with_capacity(h) })
    }

    pub fn push(&mut self, x: f64) -> Option<Vec<f64>> {
        if self.buffer.len() == self.h {
            self.buffer.pop_front();
        }
        self.buffer.push_back(x);
        (self.buffer.len() == self.h).then(|| self.buffer.iter().copied().collect())
    }
}

/// Shingles currently referenced by the window trees, addressed by a global
/// 0-based shingle id.
#[derive(Debug, Clone)]
pub struct ShingleStore {
    dim: usize,
    /// Id of the row at `values[0..dim]`.
    base: usize,
    /// Rows before this id are dead and dropped lazily.
    first: usize,
    values: Vec<f64>,
}

impl ShingleStore {
    pub fn new(dim: usize) -> Self {
        Self { dim, base: 0, first: 0, values: Vec::new() }
    }

    /// Number of shingles ever pushed; also the id of the next one.
    pub fn next_id(&self) -> usize {
        self.base + self.values.len() / self.dim
    }

    pub fn push(&mut self, row: &[f64]) -> usize {
        let id = self.next_id();
        self.values.extend_from_slice(row);
        id
    }

    /// Forgets every shingle with an id below `id`.
    pub fn evict_before(&mut self, id: usize) {
        self.first = self.first.max(id.min(self.next_id()));
        let dead = self.first - self.base;
        if dead * 2 > self.values.len() / self.dim {
            self.values.drain(..dead * self.dim);
            self.base = self.first;
        }
    }
}

impl Points for ShingleStore {
    fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, id: usize) -> &[f64] {
        debug_assert!(id >= self.first, "shingle {id} was evicted");
        let start = (id - self.base) * self.dim;
        &self.values[start..start + self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamConfig {
    pub kind: AlgorithmKind,
    pub params: DensityParams,
    pub shingle: usize,
    pub window: usize,
    pub forest_size: usize,
    pub seed: u64,
}

impl StreamConfig {
    pub fn new(kind: AlgorithmKind, shingle: usize, window: usize, forest_size: usize) -> Self {
        Self { kind, params: DensityParams::default(), shingle, window, forest_size, seed: 0 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_params(mut self, params: DensityParams) -> Self {
        self.params = params;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.is_isolation() {
            return Err(Error::InvalidParameter(format!("streaming needs a random cut tree, not {}", self.kind)));
        }
        for (name, v) in [("shingle", self.shingle), ("window", self.window), ("forest size", self.forest_size)] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// A finalized per-shingle score. `t` is the 1-based index of the shingle's
/// first series value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShingleScore {
    pub t: usize,
    pub codisp: f64,
}

/// Sliding-window forest that scores shingles online.
#[derive(Debug, Clone)]
pub struct WindowForest {
    config: StreamConfig,
    shingler: ShingleStream,
    store: ShingleStore,
    trees: Vec<(Tree, TreeRng)>,
    /// Sum of per-window mean CODISP and window count, for shingles from
    /// `pending_first` on.
    pending: VecDeque<(f64, usize)>,
    pending_first: usize,
}

impl WindowForest {
    pub fn new(config: StreamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            shingler: ShingleStream::new(config.shingle)?,
            store: ShingleStore::new(config.shingle),
            trees: Vec::new(),
            pending: VecDeque::new(),
            pending_first: 0,
        })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    pub fn trees(&self) -> impl Iterator<Item = &Tree> {
        self.trees.iter().map(|(t, _)| t)
    }

    pub fn store(&self) -> &ShingleStore {
        &self.store
    }

    /// Feeds one series value. Returns the scores finalized by it.
    pub fn push(&mut self, x: f64) -> Result<Vec<ShingleScore>> {
        let Some(row) = self.shingler.push(x) else {
            return Ok(Vec::new());
        };
        let id = self.store.push(&row);
        self.pending.push_back((0.0, 0));
        let w = self.config.window;
        if id + 1 < w {
            return Ok(Vec::new());
        }
        if id + 1 == w {
            self.build_first_window()?;
        } else {
            self.advance(id)?;
        }
        self.score_window();
        // The window starting at shingle `id + 1 - w` is the last one covering it.
        self.store.evict_before(id + 1 - w);
        Ok(self.drain_until(id + 2 - w))
    }

    /// Ends the stream and returns every score not yet finalized.
    pub fn finish(mut self) -> Result<Vec<ShingleScore>> {
        let n = self.store.next_id();
        if n < self.config.window {
            return Err(Error::InvalidParameter(format!(
                "window {} exceeds the {n} shingles in the stream",
                self.config.window
            )));
        }
        Ok(self.drain_until(n))
    }

    fn build_first_window(&mut self) -> Result<()> {
        let config = self.config;
        let ids: Vec<usize> = (0..config.window).collect();
        let store = &self.store;
        self.trees = (0..config.forest_size)
            .into_par_iter()
            .map(|k| {
                let mut rng = child_rng(config.seed, k as u64);
                let tree = Tree::build(store, ids.clone(), config.kind.splitter(config.params), &mut rng)?;
                Ok((tree, rng))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    fn advance(&mut self, newest: usize) -> Result<()> {
        let oldest = newest - self.config.window;
        let store = &self.store;
        self.trees.par_iter_mut().try_for_each(|(tree, rng)| {
            tree.delete_point(store, oldest)?;
            tree.insert_point(store, newest, rng)
        })
    }

    fn score_window(&mut self) {
        let per_tree: Vec<Vec<(usize, f64)>> = self.trees.par_iter().map(|(t, _)| codisp_all(t)).collect();
        let first = self.pending_first;
        let mut sums = vec![0.0; self.pending.len()];
        for scores in &per_tree {
            for &(id, s) in scores {
                sums[id - first] += s;
            }
        }
        let window_start = self.store.next_id() - self.config.window;
        let r = self.trees.len() as f64;
        for (offset, slot) in self.pending.iter_mut().enumerate().skip(window_start - first) {
            slot.0 += sums[offset] / r;
            slot.1 += 1;
        }
    }

    fn drain_until(&mut self, end: usize) -> Vec<ShingleScore> {
        let mut out = Vec::new();
        while self.pending_first < end {
            let Some((sum, count)) = self.pending.pop_front() else { break };
            out.push(ShingleScore { t: self.pending_first + 1, codisp: if count == 0 { 0.0 } else { sum / count as f64 } });
            self.pending_first += 1;
        }
        out
    }
}

/// Aggregated CODISP of every shingle of a series, indexed from 0 (shingle
/// `t = index + 1`).
pub fn stream_codisp(series: &[f64], config: StreamConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let n_shingles = shingle(series, config.shingle)?.len();
    if config.window > n_shingles {
        return Err(Error::InvalidParameter(format!(
            "window {} exceeds the {n_shingles} shingles of the series",
            config.window
        )));
    }
    let mut forest = WindowForest::new(config)?;
    let mut scores = Vec::with_capacity(n_shingles);
    for &x in series {
        scores.extend(forest.push(x)?.into_iter().map(|s| s.codisp));
    }
    scores.extend(forest.finish()?.into_iter().map(|s| s.codisp));
    Ok(scores)
}

/// Number of windows covering shingle `j` (1-based) among `n` shingles.
pub fn covering_windows(j: usize, n: usize, w: usize) -> usize {
    j.min(w).min(n + 1 - j).min(n + 1 - w)
}
