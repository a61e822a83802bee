//! Incremental Bowyer–Watson Delaunay triangulation in two and three
//! dimensions.
//!
//! The convex hull is closed off with ghost cells that share a vertex at
//! infinity, so points outside the current hull are inserted the same way as
//! interior ones. Ghost cells keep the infinite vertex in their last slot
//! and are oriented so that `orient(facet, x) > 0` exactly when `x` sees the
//! facet from outside.

use rustc_hash::FxHashMap;

use smallvec::SmallVec;

use super::predicates::{in_facet_sphere, in_sphere, orient};
use super::{dist, dist2, dot, sub, Point, PointCloud, Simplex};
use crate::error::{Result, TopoError};

const INF: usize = usize::MAX;

#[derive(Clone)]
struct Cell {
    v: [usize; 4],
    alive: bool,
    /// Cached circumcentre and squared radius for the float filter; NaN for
    /// ghosts and for cells whose centre could not be computed.
    center: Point,
    r2: f64,
}

struct Triangulation<'a> {
    dim: usize,
    pts: &'a [Point],
    cells: Vec<Cell>,
    dead: usize,
}

impl<'a> Triangulation<'a> {
    fn new(dim: usize, pts: &'a [Point]) -> Self {
        Self { dim, pts, cells: Vec::new(), dead: 0 }
    }

    fn is_ghost(&self, c: &Cell) -> bool {
        c.v[self.dim] == INF
    }

    fn push(&mut self, v: [usize; 4]) {
        let mut cell = Cell { v, alive: true, center: [f64::NAN; 3], r2: f64::NAN };
        if v[self.dim] != INF {
            let pts: SmallVec<[Point; 4]> = v[..=self.dim].iter().map(|&i| self.pts[i]).collect();
            if let Ok(cs) = super::circumsphere::circumsphere_of(&pts) {
                cell.center = cs.center;
                cell.r2 = cs.radius_sq;
            }
        }
        self.cells.push(cell);
    }

    fn conflicts(&self, c: &Cell, q: usize) -> bool {
        let d = self.dim;
        let p = self.pts[q];
        if !self.is_ghost(c) {
            if c.r2.is_finite() {
                let d2 = dist2(p, c.center);
                if d2 > 4.0 * c.r2 {
                    return false;
                }
                if d2 < 0.25 * c.r2 {
                    return true;
                }
            }
            let mut cell = [[0.0; 3]; 4];
            for k in 0..=d {
                cell[k] = self.pts[c.v[k]];
            }
            return in_sphere(d, &cell[..=d], &c.v[..=d], p, q);
        }
        let mut facet = [[0.0; 3]; 4];
        for k in 0..d {
            facet[k] = self.pts[c.v[k]];
        }
        facet[d] = p;
        let o = orient(d, &facet[..=d]);
        if o != 0.0 {
            return o > 0.0;
        }
        in_facet_sphere(d, &facet[..d], &c.v[..d], p, q)
    }

    fn insert(&mut self, q: usize) -> Result<()> {
        let d = self.dim;
        let cavity: Vec<usize> =
            (0..self.cells.len()).filter(|&i| self.cells[i].alive && self.conflicts(&self.cells[i], q)).collect();
        if cavity.is_empty() {
            return Err(TopoError::DegenerateInput(format!("point {q} conflicts with no cell")));
        }
        let mut facet_count: FxHashMap<SmallVec<[usize; 3]>, u32> = FxHashMap::default();
        for &ci in &cavity {
            for k in 0..=d {
                *facet_count.entry(facet_key(&self.cells[ci].v, d, k)).or_default() += 1;
            }
        }
        let mut created = Vec::new();
        for &ci in &cavity {
            let v = self.cells[ci].v;
            for k in 0..=d {
                if facet_count[&facet_key(&v, d, k)] == 1 {
                    let mut nv = v;
                    nv[k] = q;
                    created.push(nv);
                }
            }
        }
        for &ci in &cavity {
            self.cells[ci].alive = false;
        }
        self.dead += cavity.len();
        for v in created {
            self.push(v);
        }
        if self.dead > self.cells.len() / 2 {
            self.cells.retain(|c| c.alive);
            self.dead = 0;
        }
        Ok(())
    }

    fn finite_cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.cells.iter().filter(move |c| c.alive && !self.is_ghost(c)).map(move |c| &c.v[..=self.dim])
    }
}

fn facet_key(v: &[usize; 4], dim: usize, skip: usize) -> SmallVec<[usize; 3]> {
    let mut key: SmallVec<[usize; 3]> = (0..=dim).filter(|&k| k != skip).map(|k| v[k]).collect();
    key.sort_unstable();
    key
}

/// Picks `dim + 1` affinely independent points, spreading them as far as
/// possible: the first point, the point farthest from it, the point farthest
/// from that line and (in 3D) the point farthest from that plane.
fn initial_simplex(dim: usize, pts: &[Point]) -> Result<Vec<usize>> {
    let a = 0;
    let b = (0..pts.len()).max_by(|&i, &j| dist2(pts[a], pts[i]).total_cmp(&dist2(pts[a], pts[j]))).unwrap();
    let diam = dist(pts[a], pts[b]);
    if diam == 0.0 {
        return Err(TopoError::DegenerateInput("all points coincide".into()));
    }
    let ab = sub(pts[b], pts[a]);
    let line_dist = |p: Point| {
        let ap = sub(p, pts[a]);
        let t = dot(ap, ab) / dot(ab, ab);
        dist2(ap, super::scale(ab, t)).sqrt()
    };
    let c = (0..pts.len()).max_by(|&i, &j| line_dist(pts[i]).total_cmp(&line_dist(pts[j]))).unwrap();
    if line_dist(pts[c]) <= 1e-12 * diam {
        return Err(TopoError::DegenerateInput("points are collinear".into()));
    }
    if dim == 2 {
        if orient(2, &[pts[a], pts[b], pts[c]]) == 0.0 {
            return Err(TopoError::DegenerateInput("points are collinear".into()));
        }
        return Ok(vec![a, b, c]);
    }
    let n = super::cross(ab, sub(pts[c], pts[a]));
    let nn = dot(n, n).sqrt();
    let plane_dist = |p: Point| dot(sub(p, pts[a]), n).abs() / nn;
    let e = (0..pts.len()).max_by(|&i, &j| plane_dist(pts[i]).total_cmp(&plane_dist(pts[j]))).unwrap();
    if plane_dist(pts[e]) <= 1e-12 * diam || orient(3, &[pts[a], pts[b], pts[c], pts[e]]) == 0.0 {
        return Err(TopoError::DegenerateInput("points are coplanar".into()));
    }
    Ok(vec![a, b, c, e])
}

/// Delaunay triangulation of points given by their coordinates, returning
/// maximal cells as index tuples into `pts`. Points must be distinct.
pub(crate) fn triangulate(dim: usize, pts: &[Point]) -> Result<Vec<SmallVec<[usize; 4]>>> {
    if pts.len() < dim + 1 {
        return Err(TopoError::DegenerateInput(format!("{} points cannot span {dim} dimensions", pts.len())));
    }
    let init = initial_simplex(dim, pts)?;
    let mut tri = Triangulation::new(dim, pts);
    let mut first = [INF; 4];
    first[..=dim].copy_from_slice(&init);
    let mut cell_pts = [[0.0; 3]; 4];
    for k in 0..=dim {
        cell_pts[k] = pts[first[k]];
    }
    if orient(dim, &cell_pts[..=dim]) < 0.0 {
        first.swap(0, 1);
    }
    tri.push(first);
    for k in 0..=dim {
        let mut ghost = [INF; 4];
        let mut facet_pts = [[0.0; 3]; 4];
        let mut m = 0;
        for j in 0..=dim {
            if j != k {
                ghost[m] = first[j];
                facet_pts[m] = pts[first[j]];
                m += 1;
            }
        }
        facet_pts[dim] = pts[first[k]];
        // the opposite vertex is inside, so it must test negative
        if orient(dim, &facet_pts[..=dim]) > 0.0 {
            ghost.swap(0, 1);
        }
        tri.push(ghost);
    }
    for q in 0..pts.len() {
        if !init.contains(&q) {
            tri.insert(q)?;
        }
    }
    Ok(tri.finite_cells().map(|c| c.iter().copied().collect()).collect())
}

/// Maximal simplices of the Delaunay triangulation of `cloud`.
///
/// Points within [`DEDUP_TOLERANCE`](super::DEDUP_TOLERANCE) of an earlier point are dropped before
/// triangulating, so they appear in no simplex. Exactly co-spherical
/// configurations are split deterministically by point index.
pub fn delaunay(cloud: &PointCloud) -> Result<Vec<Simplex>> {
    let keep = cloud.unique_indices();
    let pts: Vec<Point> = keep.iter().map(|&i| cloud.point(i)).collect();
    let cells = triangulate(cloud.dim(), &pts)?;
    let mut out: Vec<Simplex> = cells
        .into_iter()
        .map(|c| {
            let mut v: SmallVec<[usize; 4]> = c.iter().map(|&i| keep[i]).collect();
            v.sort_unstable();
            Simplex::from_sorted(v)
        })
        .collect();
    out.sort();
    Ok(out)
}
