//! Density measure and density-aware split sampling.
//!
//! For a projection `Y` with `n` values the radius is
//! `eps = (max Y - min Y) / (2 (n - 1))` (zero for a single value). The count
//! `f(p) = |[p - eps, p + eps) ∩ Y|` is piecewise constant in `p`: each value
//! `y` contributes on the half-open piece `(y - eps, y + eps]`. `mu0(Y)` is the
//! largest `f(p) / n` over `p ∈ [min Y, max Y]`, and `mu(X)` averages `mu0`
//! over the axes.
//!
//! The density-aware sampler draws `p` uniformly on `[min Y, max Y]` and
//! rejects draws with `f(p) >= alpha`. The rejected set has measure below
//! `(max Y - min Y) / alpha`, so the expected number of retries is small.

use rand::Rng;

use crate::dataset::{min_max, Dataset, Projection};
use crate::error::{Error, Result};

/// Default cap on rejected draws before sampling the good set directly.
pub const DEFAULT_MAX_RETRIES: u32 = 64;

/// Relative slack applied when comparing a gap between two values against the
/// window width `2 eps`. Gaps within this factor of the width count as equal
/// to it, which puts them outside the half-open window.
pub const BOUNDARY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DensityParams {
    pub alpha: u32,
    pub max_retries: u32,
}

impl DensityParams {
    pub fn new(alpha: u32) -> Result<Self> {
        Self::with_retries(alpha, DEFAULT_MAX_RETRIES)
    }

    pub fn with_retries(alpha: u32, max_retries: u32) -> Result<Self> {
        if alpha < 2 {
            return Err(Error::InvalidParameter(format!("alpha must be >= 2, got {alpha}")));
        }
        if max_retries < 1 {
            return Err(Error::InvalidParameter("max_retries must be >= 1".into()));
        }
        Ok(Self { alpha, max_retries })
    }
}

impl Default for DensityParams {
    fn default() -> Self {
        Self { alpha: 2, max_retries: DEFAULT_MAX_RETRIES }
    }
}

/// Result of one density-aware draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitDraw {
    pub value: f64,
    /// Number of rejected uniform draws.
    pub retries: u32,
    /// Whether the draw came from the exact good-set fallback.
    pub fallback: bool,
}

/// Radius of a multiset of reals.
pub fn radius(values: &[f64]) -> Result<f64> {
    let (lo, hi) = min_max(values).ok_or(Error::EmptyDataset)?;
    Ok(radius_from(lo, hi, values.len()))
}

fn radius_from(lo: f64, hi: f64, n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        (hi - lo) / (2.0 * (n - 1) as f64)
    }
}

/// `|I(p, eps) ∩ Y|` counting multiplicity; `I` is `[p - eps, p + eps)`, or `{p}`
/// when `eps = 0`.
pub fn interval_count(values: &[f64], eps: f64, p: f64) -> usize {
    if eps > 0.0 {
        let (lower, upper) = (p - eps, p + eps);
        values.iter().filter(|&&y| y >= lower && y < upper).count()
    } else {
        values.iter().filter(|&&y| y == p).count()
    }
}

/// Largest number of values inside one window of the density measure.
fn max_window_count(values: &[f64]) -> usize {
    let Some((lo, hi)) = min_max(values) else {
        return 0;
    };
    if lo == hi {
        return values.len();
    }
    let width = 2.0 * radius_from(lo, hi, values.len());
    let limit = width * (1.0 - BOUNDARY_RTOL);
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // The maximum is attained by a window whose left edge sits on a value.
    let mut best = 0;
    let mut end = 0;
    for start in 0..sorted.len() {
        end = end.max(start);
        while end < sorted.len() && sorted[end] - sorted[start] < limit {
            end += 1;
        }
        best = best.max(end - start);
    }
    best
}

/// Density measure of a multiset of reals.
pub fn mu0(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(max_window_count(values) as f64 / values.len() as f64)
}

/// Density measure of a dataset: the mean of `mu0` over its axes.
pub fn mu(x: &Dataset) -> f64 {
    let d = crate::dataset::Points::dim(x);
    let sum: f64 = (0..d)
        .map(|q| mu0(&x.project(q).expect("axis in range").values).expect("dataset is non-empty"))
        .sum();
    sum / d as f64
}

/// One constant piece `(start, end]` of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountPiece {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// Piecewise-constant decomposition of `f` between its first and last
/// breakpoints. Outside that range `f` is zero.
pub fn count_profile(values: &[f64], eps: f64) -> Vec<CountPiece> {
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * values.len());
    for &y in values {
        events.push((y - eps, 1));
        events.push((y + eps, -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut pieces = Vec::new();
    let mut count: i64 = 0;
    let mut i = 0;
    while i < events.len() {
        let at = events[i].0;
        while i < events.len() && events[i].0 == at {
            count += events[i].1;
            i += 1;
        }
        if let Some(&(next, _)) = events.get(i) {
            pieces.push(CountPiece { start: at, end: next, count: count as usize });
        }
    }
    pieces
}

/// Clipped pieces of `[min Y, max Y]` with their counts.
fn clipped_pieces(values: &[f64], lo: f64, hi: f64, eps: f64) -> impl Iterator<Item = CountPiece> {
    count_profile(values, eps).into_iter().filter_map(move |piece| {
        let start = piece.start.max(lo);
        let end = piece.end.min(hi);
        (end > start).then_some(CountPiece { start, end, count: piece.count })
    })
}

/// Lebesgue measure of `{p ∈ [min Y, max Y] : f(p) >= alpha}`.
pub fn bad_set_measure(values: &[f64], alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::InvalidParameter(format!("alpha must be >= 2, got {alpha}")));
    }
    let (lo, hi) = min_max(values).ok_or(Error::EmptyDataset)?;
    if lo == hi {
        return Err(Error::ConstantProjection);
    }
    let eps = radius_from(lo, hi, values.len());
    Ok(clipped_pieces(values, lo, hi, eps)
        .filter(|piece| piece.count >= alpha as usize)
        .map(|piece| piece.end - piece.start)
        .fold(0.0, |total, len| total + len))
}

/// Draws a split value uniformly from `[min Y, max Y]` conditioned on
/// `f(p) < alpha`.
pub fn sample_split_density_aware<R: Rng + ?Sized>(
    values: &[f64],
    params: DensityParams,
    rng: &mut R,
) -> Result<SplitDraw> {
    let (lo, hi) = min_max(values).ok_or(Error::EmptyDataset)?;
    if lo == hi {
        return Err(Error::ConstantProjection);
    }
    Ok(sample_with_bounds(values, lo, hi, params, rng))
}

/// Sampler body for callers that already know `min Y < max Y`.
pub(crate) fn sample_with_bounds<R: Rng + ?Sized>(
    values: &[f64],
    lo: f64,
    hi: f64,
    params: DensityParams,
    rng: &mut R,
) -> SplitDraw {
    let eps = radius_from(lo, hi, values.len());
    let alpha = params.alpha as usize;
    let mut retries = 0;
    while retries < params.max_retries {
        let p = rng.random_range(lo..=hi);
        if interval_count(values, eps, p) < alpha {
            return SplitDraw { value: p, retries, fallback: false };
        }
        retries += 1;
    }
    SplitDraw { value: sample_good_set(values, lo, hi, eps, alpha, rng), retries, fallback: true }
}

/// Uniform draw from the exact complement of the bad set.
fn sample_good_set<R: Rng + ?Sized>(
    values: &[f64],
    lo: f64,
    hi: f64,
    eps: f64,
    alpha: usize,
    rng: &mut R,
) -> f64 {
    let good: Vec<CountPiece> =
        clipped_pieces(values, lo, hi, eps).filter(|piece| piece.count < alpha).collect();
    let total: f64 = good.iter().map(|piece| piece.end - piece.start).sum();
    for _ in 0..16 {
        let mut r = rng.random_range(0.0..total);
        let piece = good
            .iter()
            .find(|piece| {
                let len = piece.end - piece.start;
                if r < len {
                    true
                } else {
                    r -= len;
                    false
                }
            })
            .unwrap_or(&good[good.len() - 1]);
        let p = (piece.start + r).min(piece.end);
        if interval_count(values, eps, p) < alpha {
            return p;
        }
    }
    // Rounding kept landing on a piece boundary; take the middle of the widest piece.
    let widest = good
        .iter()
        .max_by(|a, b| (a.end - a.start).total_cmp(&(b.end - b.start)))
        .expect("the good set has positive measure");
    0.5 * (widest.start + widest.end)
}

impl Projection {
    pub fn radius(&self) -> Result<f64> {
        radius(&self.values)
    }

    pub fn interval_count(&self, p: f64) -> usize {
        let eps = if self.values.is_empty() { 0.0 } else { radius(&self.values).unwrap_or(0.0) };
        interval_count(&self.values, eps, p)
    }

    pub fn mu0(&self) -> Result<f64> {
        mu0(&self.values)
    }

    pub fn bad_set_measure(&self, alpha: u32) -> Result<f64> {
        bad_set_measure(&self.values, alpha)
    }
}
