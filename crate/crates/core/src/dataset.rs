//! Multisets of points in R^d, axis projections and bounding boxes.
//!
//! Axes are 0-based here. The CLI translates to the 1-based numbering users see.

use serde::Serialize;

use crate::error::{Error, Result};

/// Read access to point coordinates by id. Trees store ids only and look
/// coordinates up through this trait.
pub trait Points {
    fn dim(&self) -> usize;
    fn point(&self, id: usize) -> &[f64];
}

/// A finite multiset of d-dimensional points, stored row-major.
///
/// Duplicates are allowed. Every coordinate is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let dim = first.as_ref().len();
        if dim == 0 {
            return Err(Error::InvalidParameter("points need at least one coordinate".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (index, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { index, expected: dim, found: row.len() });
            }
            if let Some(axis) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index, axis });
            }
            values.extend_from_slice(row);
        }
        Ok(Self { dim, values })
    }

    /// Builds a dataset from row-major values.
    pub fn from_flat(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("points need at least one coordinate".into()));
        }
        if values.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                index: values.len() / dim,
                expected: dim,
                found: values.len() % dim,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim, axis: pos % dim });
        }
        Ok(Self { dim, values })
    }

    /// One-dimensional dataset from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn ids(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// The q-th coordinates of every point, duplicates preserved.
    pub fn project(&self, axis: usize) -> Result<Projection> {
        self.check_axis(axis)?;
        Ok(Projection {
            axis,
            values: self.iter().map(|p| p[axis]).collect(),
        })
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::of(self, self.ids()).expect("dataset is never empty")
    }

    /// Applies `x -> a*x + b` to every coordinate.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::from_flat(self.dim, self.values.iter().map(|v| scale * v + shift).collect())
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(())
    }
}

impl Points for Dataset {
    fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, id: usize) -> &[f64] {
        &self.values[id * self.dim..(id + 1) * self.dim]
    }
}

/// Coordinates of a dataset along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub axis: usize,
    pub values: Vec<f64>,
}

impl Projection {
    pub fn new(axis: usize, values: Vec<f64>) -> Self {
        Self { axis, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_max(&self) -> Option<(f64, f64)> {
        min_max(&self.values)
    }
}

pub(crate) fn min_max(values: &[f64]) -> Option<(f64, f64)> {
    let (&first, rest) = values.split_first()?;
    Some(rest.iter().fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))))
}

/// Smallest closed axis-aligned box containing a set of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    /// Box of a single point.
    pub fn point(p: &[f64]) -> Self {
        Self { min: p.to_vec(), max: p.to_vec() }
    }

    /// Box of the points with the given ids.
    pub fn of<P: Points + ?Sized>(points: &P, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut ids = ids.into_iter();
        let first = ids.next().ok_or(Error::EmptyDataset)?;
        let mut bbox = Self::point(points.point(first));
        for id in ids {
            bbox.extend(points.point(id));
        }
        Ok(bbox)
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn extend(&mut self, p: &[f64]) {
        for ((lo, hi), &v) in self.min.iter_mut().zip(self.max.iter_mut()).zip(p) {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            min: self.min.iter().zip(&other.min).map(|(a, b)| a.min(*b)).collect(),
            max: self.max.iter().zip(&other.max).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.max[axis] - self.min[axis]
    }

    pub fn lengths(&self) -> Vec<f64> {
        (0..self.dim()).map(|q| self.length(q)).collect()
    }

    /// Sum of the side lengths.
    pub fn total_edge_length(&self) -> f64 {
        (0..self.dim()).map(|q| self.length(q)).sum()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(q, &v)| self.min[q] <= v && v <= self.max[q])
    }

    pub fn is_point(&self) -> bool {
        self.min == self.max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_one() -> Dataset {
        Dataset::new(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [10.0, 0.0], [11.0, 0.0], [12.0, 0.0]])
            .unwrap()
    }

    #[test]
    fn projection_keeps_duplicates() {
        assert_eq!(example_one().project(1).unwrap().values, vec![0.0; 6]);
        let single = Dataset::new(&[[3.0, 7.0]]).unwrap();
        assert_eq!(single.project(0).unwrap().values, vec![3.0]);
        let dup = Dataset::new(&[[1.0, 2.0], [1.0, 5.0]]).unwrap();
        assert_eq!(dup.project(0).unwrap().values, vec![1.0, 1.0]);
    }

    #[test]
    fn projection_rejects_bad_axis() {
        assert_eq!(
            example_one().project(2),
            Err(Error::AxisOutOfRange { axis: 2, dim: 2 })
        );
    }

    #[test]
    fn boxes() {
        let b = example_one().bounding_box();
        assert_eq!((b.min.clone(), b.max.clone()), (vec![0.0, 0.0], vec![12.0, 0.0]));
        assert_eq!(b.lengths(), vec![12.0, 0.0]);
        assert_eq!(b.total_edge_length(), 12.0);

        let p = Dataset::new(&[[5.0, 5.0]]).unwrap().bounding_box();
        assert_eq!(p.lengths(), vec![0.0, 0.0]);
        assert_eq!(p.total_edge_length(), 0.0);

        let b = Dataset::new(&[[0.0, 1.0], [2.0, 3.0]]).unwrap().bounding_box();
        assert_eq!((b.min.clone(), b.max.clone()), (vec![0.0, 1.0], vec![2.0, 3.0]));
        assert_eq!(b.total_edge_length(), 4.0);
    }

    #[test]
    fn ingestion_rejects_bad_input() {
        let empty: [[f64; 2]; 0] = [];
        assert_eq!(Dataset::new(&empty), Err(Error::EmptyDataset));
        assert_eq!(
            Dataset::new(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::DimensionMismatch { index: 1, expected: 2, found: 1 })
        );
        assert_eq!(
            Dataset::new(&[[1.0, f64::NAN]]),
            Err(Error::NonFinite { index: 0, axis: 1 })
        );
        assert!(Dataset::from_flat(2, vec![1.0, f64::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn projection_has_one_value_per_point(
            rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 3), 1..40)
        ) {
            let x = Dataset::new(&rows).unwrap();
            for q in 0..3 {
                prop_assert_eq!(x.project(q).unwrap().len(), x.len());
            }
        }

        #[test]
        fn box_is_affine_covariant(
            rows in prop::collection::vec(prop::collection::vec(-1e3..1e3f64, 2), 1..40),
            a in 0.01..10.0f64,
            b in -100.0..100.0f64,
        ) {
            let x = Dataset::new(&rows).unwrap();
            let bx = x.bounding_box();
            let by = x.affine(a, b).unwrap().bounding_box();
            for q in 0..2 {
                prop_assert!((by.min[q] - (a * bx.min[q] + b)).abs() <= 1e-9 * (1.0 + by.min[q].abs()));
                prop_assert!((by.max[q] - (a * bx.max[q] + b)).abs() <= 1e-9 * (1.0 + by.max[q].abs()));
            }
        }

        #[test]
        fn edge_length_zero_iff_identical(
            rows in prop::collection::vec(prop::collection::vec(-3i32..3, 2), 1..6)
        ) {
            let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let x = Dataset::new(&rows).unwrap();
            let total = x.bounding_box().total_edge_length();
            prop_assert!(total >= 0.0);
            let identical = rows.iter().all(|r| r == &rows[0]);
            prop_assert_eq!(total == 0.0, identical);
        }
    }
}
