//! Binary partition trees.
//!
//! A tree is built by repeatedly cutting a node's members on one axis `q` at a
//! split value `p`: members with `x_q < p` go left, the rest go right. The four
//! algorithms differ only in how `q` and `p` are drawn:
//!
//! | kind | axis law            | split sampler |
//! |------|---------------------|---------------|
//! | IF   | uniform             | ordinary      |
//! | WIF  | uniform             | density-aware |
//! | RRCF | length-proportional | ordinary      |
//! | WRCF | length-proportional | density-aware |
//!
//! Isolation trees stop as soon as a node is a singleton or the drawn axis is
//! constant on the node. Random cut trees only stop on singletons or on nodes
//! whose points are all identical, which then form one multiset leaf.
//!
//! Nodes live in an arena and refer to each other by [`NodeId`]. Internal nodes
//! cache their mass (number of points, with multiplicity) and bounding box so
//! that streaming updates and scoring never have to rescan a subtree.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{BoundingBox, Points};
use crate::density::{self, DensityParams};
use crate::error::{Error, Result};

pub type NodeId = usize;

/// Draws after which an empty-sided split value gives up on the current axis.
const MAX_EMPTY_SPLITS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionCutLaw {
    /// Every axis with probability `1/d`.
    Uniform,
    /// Axis `q` with probability `l_q / sum(l)`.
    LengthProportional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SplitSampler {
    /// Uniform on `[min, max]` of the chosen axis.
    Ordinary,
    /// Uniform on `[min, max]`, rejecting values inside dense windows.
    DensityAware(DensityParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    If,
    Wif,
    Rrcf,
    Wrcf,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [Self::If, Self::Wif, Self::Rrcf, Self::Wrcf];

    pub fn law(self) -> DimensionCutLaw {
        match self {
            Self::If | Self::Wif => DimensionCutLaw::Uniform,
            Self::Rrcf | Self::Wrcf => DimensionCutLaw::LengthProportional,
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(self, Self::Wif | Self::Wrcf)
    }

    /// Isolation-forest family (scored by path length) rather than random cut.
    pub fn is_isolation(self) -> bool {
        self.law() == DimensionCutLaw::Uniform
    }

    pub fn splitter(self, params: DensityParams) -> Splitter {
        let sampler = if self.is_weighted() {
            SplitSampler::DensityAware(params)
        } else {
            SplitSampler::Ordinary
        };
        Splitter { law: self.law(), sampler }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::If => "if",
            Self::Wif => "wif",
            Self::Rrcf => "rrcf",
            Self::Wrcf => "wrcf",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "if" => Ok(Self::If),
            "wif" => Ok(Self::Wif),
            "rrcf" => Ok(Self::Rrcf),
            "wrcf" => Ok(Self::Wrcf),
            other => Err(Error::InvalidParameter(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Axis law plus split sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Splitter {
    pub law: DimensionCutLaw,
    pub sampler: SplitSampler,
}

impl Splitter {
    pub fn kind(&self) -> AlgorithmKind {
        match (self.law, self.sampler) {
            (DimensionCutLaw::Uniform, SplitSampler::Ordinary) => AlgorithmKind::If,
            (DimensionCutLaw::Uniform, SplitSampler::DensityAware(_)) => AlgorithmKind::Wif,
            (DimensionCutLaw::LengthProportional, SplitSampler::Ordinary) => AlgorithmKind::Rrcf,
            (DimensionCutLaw::LengthProportional, SplitSampler::DensityAware(_)) => AlgorithmKind::Wrcf,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeBody {
    /// Member point ids. More than one id means duplicates, or an isolation
    /// tree node that stopped on a constant axis.
    Leaf(Vec<usize>),
    Internal {
        axis: usize,
        split: f64,
        left: NodeId,
        right: NodeId,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub(crate) parent: Option<NodeId>,
    pub(crate) mass: usize,
    pub(crate) bbox: BoundingBox,
    pub(crate) body: NodeBody,
}

impl Node {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    /// Number of points under the node, counting duplicates.
    pub fn mass(&self) -> usize {
        self.mass
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn body(&self) -> &NodeBody {
        &self.body
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.body, NodeBody::Leaf(_))
    }

    pub fn children(&self) -> Option<(NodeId, NodeId)> {
        match self.body {
            NodeBody::Internal { left, right, .. } => Some((left, right)),
            NodeBody::Leaf(_) => None,
        }
    }
}

/// Split bookkeeping collected while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub splits: u64,
    /// Rejected density-aware draws.
    pub retries: u64,
    pub fallbacks: u64,
}

#[derive(Debug, Clone)]
pub struct Tree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) live: Vec<bool>,
    pub(crate) free: Vec<NodeId>,
    pub(crate) root: Option<NodeId>,
    pub(crate) splitter: Splitter,
    pub(crate) dim: usize,
    pub(crate) seed: Option<u64>,
    pub(crate) stats: BuildStats,
}

/// Draws an axis from a bounding box under the given law.
pub fn choose_dimension<R: Rng + ?Sized>(
    bbox: &BoundingBox,
    law: DimensionCutLaw,
    rng: &mut R,
) -> Result<usize> {
    let d = bbox.dim();
    match law {
        DimensionCutLaw::Uniform => {
            if d == 0 {
                return Err(Error::DegenerateBox);
            }
            Ok(rng.random_range(0..d))
        }
        DimensionCutLaw::LengthProportional => {
            let total = bbox.total_edge_length();
            if total <= 0.0 {
                return Err(Error::DegenerateBox);
            }
            Ok(axis_at_offset(bbox, rng.random_range(0.0..total)))
        }
    }
}

/// Axis whose segment contains `offset` when the side lengths are laid end to
/// end. Zero-length axes are never returned.
pub(crate) fn axis_at_offset(bbox: &BoundingBox, offset: f64) -> usize {
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for q in 0..bbox.dim() {
        let len = bbox.length(q);
        if len > 0.0 {
            cumulative += len;
            last_positive = q;
            if offset < cumulative {
                return q;
            }
        }
    }
    last_positive
}

/// Partitions ids into `x_q < p` and `x_q >= p`.
pub fn split<P: Points + ?Sized>(points: &P, ids: &[usize], axis: usize, p: f64) -> (Vec<usize>, Vec<usize>) {
    ids.iter().partition(|&&id| points.point(id)[axis] < p)
}

fn draw_split<R: Rng + ?Sized>(
    values: &[f64],
    lo: f64,
    hi: f64,
    sampler: SplitSampler,
    stats: &mut BuildStats,
    rng: &mut R,
) -> f64 {
    match sampler {
        SplitSampler::Ordinary => rng.random_range(lo..=hi),
        SplitSampler::DensityAware(params) => {
            let draw = density::sample_with_bounds(values, lo, hi, params, rng);
            stats.retries += draw.retries as u64;
            stats.fallbacks += draw.fallback as u64;
            draw.value
        }
    }
}

impl Tree {
    /// Builds a tree over the points with the given ids.
    pub fn build<P, R>(points: &P, ids: Vec<usize>, splitter: Splitter, rng: &mut R) -> Result<Self>
    where
        P: Points + ?Sized,
        R: Rng + ?Sized,
    {
        let mut tree = Self::empty(points.dim(), splitter);
        if ids.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut values = Vec::new();
        // (members, parent, goes left)
        let mut stack: Vec<(Vec<usize>, Option<NodeId>, bool)> = vec![(ids, None, false)];
        while let Some((members, parent, is_left)) = stack.pop() {
            let bbox = BoundingBox::of(points, members.iter().copied())?;
            let cut = if members.len() > 1 {
                tree.find_cut(points, &members, &bbox, &mut values, rng)
            } else {
                None
            };
            let mass = members.len();
            let id = match cut {
                None => tree.alloc(Node { parent, mass, bbox, body: NodeBody::Leaf(members) }),
                Some((axis, split_value, left, right)) => {
                    tree.stats.splits += 1;
                    let id = tree.alloc(Node {
                        parent,
                        mass,
                        bbox,
                        body: NodeBody::Internal { axis, split: split_value, left: NodeId::MAX, right: NodeId::MAX },
                    });
                    stack.push((right, Some(id), false));
                    stack.push((left, Some(id), true));
                    id
                }
            };
            match parent {
                None => tree.root = Some(id),
                Some(parent) => tree.set_child(parent, is_left, id),
            }
        }
        Ok(tree)
    }

    /// Builds a tree over every point of a dataset with a seeded generator.
    pub fn build_seeded<P: Points + ?Sized>(points: &P, ids: Vec<usize>, kind: AlgorithmKind, params: DensityParams, seed: u64) -> Result<Self> {
        let mut rng = crate::rng::rng_from_seed(seed);
        let mut tree = Self::build(points, ids, kind.splitter(params), &mut rng)?;
        tree.seed = Some(seed);
        Ok(tree)
    }

    /// Picks `(axis, p)` and the two member lists, or `None` when the node
    /// becomes a leaf.
    fn find_cut<P, R>(
        &mut self,
        points: &P,
        members: &[usize],
        bbox: &BoundingBox,
        values: &mut Vec<f64>,
        rng: &mut R,
    ) -> Option<(usize, f64, Vec<usize>, Vec<usize>)>
    where
        P: Points + ?Sized,
        R: Rng + ?Sized,
    {
        if bbox.is_point() {
            return None;
        }
        let mut axis_draws = 0;
        loop {
            let axis = choose_dimension(bbox, self.splitter.law, rng).ok()?;
            let (lo, hi) = (bbox.min[axis], bbox.max[axis]);
            if lo == hi {
                // Only reachable under the uniform law: the drawn axis is constant.
                return None;
            }
            values.clear();
            values.extend(members.iter().map(|&id| points.point(id)[axis]));
            for _ in 0..MAX_EMPTY_SPLITS {
                let p = draw_split(values, lo, hi, self.splitter.sampler, &mut self.stats, rng);
                if p > lo {
                    let (left, right) = split(points, members, axis, p);
                    if !left.is_empty() && !right.is_empty() {
                        return Some((axis, p, left, right));
                    }
                }
            }
            axis_draws += 1;
            if axis_draws >= MAX_EMPTY_SPLITS {
                // Cutting at the maximum always leaves both sides non-empty.
                let (left, right) = split(points, members, axis, hi);
                return Some((axis, hi, left, right));
            }
        }
    }

    pub(crate) fn empty(dim: usize, splitter: Splitter) -> Self {
        Self {
            nodes: Vec::new(),
            live: Vec::new(),
            free: Vec::new(),
            root: None,
            splitter,
            dim,
            seed: None,
            stats: BuildStats::default(),
        }
    }

    pub(crate) fn alloc(&mut self, node: Node) -> NodeId {
        if let Some(id) = self.free.pop() {
            self.nodes[id] = node;
            self.live[id] = true;
            id
        } else {
            self.nodes.push(node);
            self.live.push(true);
            self.nodes.len() - 1
        }
    }

    pub(crate) fn release(&mut self, id: NodeId) {
        self.live[id] = false;
        self.nodes[id].body = NodeBody::Leaf(Vec::new());
        self.free.push(id);
    }

    pub(crate) fn set_child(&mut self, parent: NodeId, is_left: bool, child: NodeId) {
        if let NodeBody::Internal { left, right, .. } = &mut self.nodes[parent].body {
            if is_left {
                *left = child;
            } else {
                *right = child;
            }
        }
    }

    pub fn splitter(&self) -> Splitter {
        self.splitter
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.splitter.kind()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn stats(&self) -> BuildStats {
        self.stats
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    /// Number of points in the tree, counting duplicates.
    pub fn len(&self) -> usize {
        self.root.map_or(0, |r| self.nodes[r].mass)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        match self.live.get(id) {
            Some(true) => Ok(&self.nodes[id]),
            _ => Err(Error::NodeNotFound(id)),
        }
    }

    /// Ids of live nodes in depth-first order from the root.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack: Vec<NodeId> = self.root.into_iter().collect();
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Some((l, r)) = self.nodes[id].children() {
                stack.push(r);
                stack.push(l);
            }
        }
        out
    }

    /// Leaves with their members, depth first.
    pub fn leaves(&self) -> impl Iterator<Item = (NodeId, &[usize])> + '_ {
        self.node_ids().into_iter().filter_map(move |id| match &self.nodes[id].body {
            NodeBody::Leaf(members) => Some((id, members.as_slice())),
            NodeBody::Internal { .. } => None,
        })
    }

    /// Member ids under a node, in left-to-right leaf order.
    pub fn members(&self, id: NodeId) -> Result<Vec<usize>> {
        self.node(id)?;
        let mut out = Vec::with_capacity(self.nodes[id].mass);
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            match &self.nodes[n].body {
                NodeBody::Leaf(members) => out.extend_from_slice(members),
                NodeBody::Internal { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        Ok(out)
    }

    pub fn sibling(&self, id: NodeId) -> Result<Option<NodeId>> {
        let parent = self.node(id)?.parent;
        Ok(parent.and_then(|p| self.nodes[p].children()).map(|(l, r)| if l == id { r } else { l }))
    }

    /// Number of edges between a node and the root.
    pub fn depth(&self, id: NodeId) -> Result<usize> {
        let mut node = self.node(id)?;
        let mut depth = 0;
        while let Some(parent) = node.parent {
            node = &self.nodes[parent];
            depth += 1;
        }
        Ok(depth)
    }

    /// Depth of every live node, indexed by node id (dead slots hold `None`).
    pub fn depths(&self) -> Vec<Option<usize>> {
        let mut depths = vec![None; self.nodes.len()];
        let mut stack: Vec<(NodeId, usize)> = self.root.map(|r| (r, 0)).into_iter().collect();
        while let Some((id, d)) = stack.pop() {
            depths[id] = Some(d);
            if let Some((l, r)) = self.nodes[id].children() {
                stack.push((l, d + 1));
                stack.push((r, d + 1));
            }
        }
        depths
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().flatten().max().unwrap_or(0)
    }

    /// Leaf holding `id`, found by replaying the cuts on the point's coordinates.
    pub fn find_leaf<P: Points + ?Sized>(&self, points: &P, id: usize) -> Option<NodeId> {
        let x = points.point(id);
        let mut node = self.root?;
        loop {
            match &self.nodes[node].body {
                NodeBody::Internal { axis, split, left, right } => {
                    node = if x[*axis] < *split { *left } else { *right };
                }
                NodeBody::Leaf(members) => return members.contains(&id).then_some(node),
            }
        }
    }

    /// Leaf holding `id`, found by scanning the leaves.
    pub fn leaf_of(&self, id: usize) -> Option<NodeId> {
        self.leaves().find(|(_, members)| members.contains(&id)).map(|(leaf, _)| leaf)
    }

    /// The tree as a family of member sets, each sorted. Two trees with the same
    /// family are the same tree in the set-theoretic sense.
    pub fn node_sets(&self) -> BTreeSet<Vec<usize>> {
        self.node_ids()
            .into_iter()
            .map(|id| {
                let mut m = self.members(id).expect("live node");
                m.sort_unstable();
                m
            })
            .collect()
    }

    /// Ordered structure including cut values, independent of arena layout.
    pub fn shape(&self) -> Option<TreeShape> {
        self.root.map(|r| self.shape_of(r))
    }

    fn shape_of(&self, id: NodeId) -> TreeShape {
        let node = &self.nodes[id];
        match &node.body {
            NodeBody::Leaf(members) => {
                let mut m = members.clone();
                m.sort_unstable();
                TreeShape::Leaf(m)
            }
            NodeBody::Internal { axis, split, left, right } => TreeShape::Internal {
                axis: *axis,
                split_bits: split.to_bits(),
                mass: node.mass,
                bbox_bits: node.bbox.min.iter().chain(&node.bbox.max).map(|v| v.to_bits()).collect(),
                children: Box::new((self.shape_of(*left), self.shape_of(*right))),
            },
        }
    }

    /// Checks every structural invariant against the point coordinates.
    pub fn validate<P: Points + ?Sized>(&self, points: &P) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(msg));
        let Some(root) = self.root else {
            return Ok(());
        };
        if self.nodes[root].parent.is_some() {
            return fail("root has a parent".into());
        }
        let mut seen = 0;
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            seen += 1;
            if !self.live[id] {
                return fail(format!("node {id} is reachable but released"));
            }
            let node = &self.nodes[id];
            let members = self.members(id)?;
            if members.is_empty() || members.len() != node.mass {
                return fail(format!("node {id} mass {} but {} members", node.mass, members.len()));
            }
            let bbox = BoundingBox::of(points, members.iter().copied())?;
            if bbox != node.bbox {
                return fail(format!("node {id} caches a stale bounding box"));
            }
            match &node.body {
                NodeBody::Leaf(_) => {
                    if self.splitter.law == DimensionCutLaw::LengthProportional && !bbox.is_point() {
                        return fail(format!("random cut leaf {id} holds distinct points"));
                    }
                }
                NodeBody::Internal { axis, split, left, right } => {
                    for (child, is_left) in [(*left, true), (*right, false)] {
                        if self.nodes.get(child).and_then(|c| c.parent) != Some(id) {
                            return fail(format!("child {child} of {id} does not point back"));
                        }
                        for m in self.members(child)? {
                            if (points.point(m)[*axis] < *split) != is_left {
                                return fail(format!("point {m} is on the wrong side of node {id}"));
                            }
                        }
                        stack.push(child);
                    }
                    let total = self.nodes[*left].mass + self.nodes[*right].mass;
                    if total != node.mass {
                        return fail(format!("children of {id} do not partition it"));
                    }
                }
            }
        }
        let live = self.live.iter().filter(|&&l| l).count();
        if live != seen {
            return fail(format!("{live} live nodes but {seen} reachable"));
        }
        Ok(())
    }

    /// Debug document: one entry per node with members, cut and children.
    /// Axes are numbered from 1.
    pub fn to_json(&self) -> serde_json::Value {
        let depths = self.depths();
        let nodes: Vec<serde_json::Value> = self
            .node_ids()
            .into_iter()
            .map(|id| {
                let node = &self.nodes[id];
                let mut members = self.members(id).expect("live node");
                members.sort_unstable();
                let (axis, split, children) = match node.body {
                    NodeBody::Internal { axis, split, left, right } => {
                        (Some(axis + 1), Some(split), vec![left, right])
                    }
                    NodeBody::Leaf(_) => (None, None, vec![]),
                };
                serde_json::json!({
                    "id": id,
                    "depth": depths[id],
                    "members": members,
                    "axis": axis,
                    "split": split,
                    "children": children,
                })
            })
            .collect();
        serde_json::json!({
            "algorithm": self.kind(),
            "seed": self.seed,
            "root": self.root,
            "nodes": nodes,
        })
    }
}

/// Arena-independent view of a tree used for structural comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeShape {
    Leaf(Vec<usize>),
    Internal {
        axis: usize,
        split_bits: u64,
        mass: usize,
        bbox_bits: Vec<u64>,
        children: Box<(TreeShape, TreeShape)>,
    },
}
