//! Geometric substrate: point clouds, simplices, Delaunay triangulations,
//! circumspheres, Voronoi cell vertices and PCA plane fitting.
//!
//! Points are stored as `[f64; 3]` regardless of the ambient dimension; a
//! two-dimensional cloud keeps `z = 0` for every point.

mod circumsphere;
mod delaunay;
mod pca;
mod predicates;
mod voronoi;

use smallvec::SmallVec;

use crate::error::{Result, TopoError};

pub use circumsphere::{circumsphere, circumsphere_gradient, circumsphere_of, Circumsphere};
pub use delaunay::delaunay;
pub(crate) use delaunay::triangulate;
pub use pca::{affine_rank, lift_2to3, pca_3to2, PcaFrame};
pub use voronoi::voronoi_cell_vertices;

/// A point in two or three dimensions. Two-dimensional points have `z = 0`.
pub type Point = [f64; 3];

/// Points closer than this are treated as duplicates.
pub const DEDUP_TOLERANCE: f64 = 1e-12;

/// Systems whose condition number exceeds this are declared degenerate.
pub const CONDITION_LIMIT: f64 = 1e12;

/// An ordered set of points in ℝ² or ℝ³ with stable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Point>,
}

impl PointCloud {
    /// Builds a cloud of the given ambient dimension (2 or 3). For `dim == 2`
    /// the z coordinate of every point must be zero.
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(TopoError::InvalidInput(format!("ambient dimension must be 2 or 3, got {dim}")));
        }
        for (i, p) in points.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(TopoError::InvalidInput(format!("point {i} has a non-finite coordinate")));
            }
            if dim == 2 && p[2] != 0.0 {
                return Err(TopoError::InvalidInput(format!("point {i} of a planar cloud has z = {}", p[2])));
            }
        }
        Ok(Self { dim, points })
    }

    pub fn from_2d(points: &[[f64; 2]]) -> Result<Self> {
        Self::new(2, points.iter().map(|p| [p[0], p[1], 0.0]).collect())
    }

    pub fn from_3d(points: Vec<Point>) -> Result<Self> {
        Self::new(3, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The sub-cloud made of the given indices, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointCloud {
        PointCloud { dim: self.dim, points: indices.iter().map(|&i| self.points[i]).collect() }
    }

    /// Returns a copy with `extra` appended.
    pub fn extended(&self, extra: &[Point]) -> PointCloud {
        let mut points = self.points.clone();
        points.extend_from_slice(extra);
        PointCloud { dim: self.dim, points }
    }

    /// Multiplies every coordinate by `factor`.
    pub fn scaled(&self, factor: f64) -> PointCloud {
        PointCloud { dim: self.dim, points: self.points.iter().map(|p| scale(*p, factor)).collect() }
    }

    /// Indices of the points that survive deduplication within
    /// [`DEDUP_TOLERANCE`]; the first occurrence of each cluster is kept.
    pub fn unique_indices(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.points.len()).collect();
        order.sort_by(|&a, &b| self.points[a][0].total_cmp(&self.points[b][0]).then(a.cmp(&b)));
        let mut duplicate = vec![false; self.points.len()];
        for (pos, &i) in order.iter().enumerate() {
            if duplicate[i] {
                continue;
            }
            for &j in &order[pos + 1..] {
                if self.points[j][0] - self.points[i][0] > DEDUP_TOLERANCE {
                    break;
                }
                if !duplicate[j] && dist(self.points[i], self.points[j]) <= DEDUP_TOLERANCE {
                    // the lower index survives
                    duplicate[i.max(j)] = true;
                    if duplicate[i] {
                        break;
                    }
                }
            }
        }
        (0..self.points.len()).filter(|&i| !duplicate[i]).collect()
    }

    /// Largest pairwise distance; zero for fewer than two points.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.max(dist(self.points[i], self.points[j]));
            }
        }
        best
    }
}

/// A simplex given by its sorted, strictly increasing vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[usize; 4]>);

impl Simplex {
    /// Sorts the vertices; fails on repeated vertices or an empty list.
    pub fn new(vertices: &[usize]) -> Result<Self> {
        let mut v: SmallVec<[usize; 4]> = vertices.iter().copied().collect();
        v.sort_unstable();
        if v.is_empty() || v.windows(2).any(|w| w[0] == w[1]) {
            return Err(TopoError::InvalidInput(format!(
                "simplex vertices must be distinct and non-empty: {vertices:?}"
            )));
        }
        Ok(Self(v))
    }

    pub(crate) fn from_sorted(v: SmallVec<[usize; 4]>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn vertex(v: usize) -> Self {
        Self(smallvec::smallvec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Topological dimension (vertex count minus one).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The codimension-one faces, each obtained by dropping one vertex in turn.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n)
            .map(move |skip| Simplex(self.0.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()))
    }

    /// Every non-empty face, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u32..(1 << n))
            .map(|mask| Simplex((0..n).filter(|b| mask & (1 << b) != 0).map(|b| self.0[b]).collect()))
            .collect()
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub(crate) fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[inline]
pub fn dist2(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    dist2(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_sorts_and_rejects_repeats() {
        assert_eq!(Simplex::new(&[3, 1, 2]).unwrap().vertices(), &[1, 2, 3]);
        assert!(Simplex::new(&[1, 1]).is_err());
        assert!(Simplex::new(&[]).is_err());
    }

    #[test]
    fn facets_and_faces() {
        let s = Simplex::new(&[0, 1, 2]).unwrap();
        let facets: Vec<_> = s.facets().collect();
        assert_eq!(facets.len(), 3);
        assert_eq!(s.faces().len(), 7);
        assert_eq!(Simplex::vertex(4).facets().count(), 0);
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let cloud =
            PointCloud::from_3d(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1e-13], [1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(cloud.unique_indices(), vec![0, 1]);
    }

    #[test]
    fn planar_cloud_rejects_z() {
        assert!(PointCloud::new(2, vec![[0.0, 0.0, 1.0]]).is_err());
        assert!(PointCloud::from_3d(vec![[f64::NAN, 0.0, 0.0]]).is_err());
    }
}
