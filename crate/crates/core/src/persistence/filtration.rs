use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use super::{AttributionEntries, FilteredComplex};
use crate::error::{Result, TopoError};
use crate::geometry::{
    affine_rank, circumsphere_of, dist2, dot, pca_3to2, sub, triangulate, Circumsphere, Point, PointCloud, Simplex,
};

/// Every face of every simplex in `simplices`, sorted.
pub fn closure(simplices: &[Simplex]) -> Vec<Simplex> {
    let unique: FxHashSet<Simplex> = simplices.iter().flat_map(|s| s.faces()).collect();
    let mut all: Vec<Simplex> = unique.into_iter().collect();
    all.sort_unstable();
    all
}

/// Lower-star filtration: each simplex takes the largest value among its
/// vertices, and remembers which vertex attains it (lowest index on ties).
pub fn lower_star_filtration(complex: &[Simplex], vertex_values: &[f64]) -> Result<FilteredComplex> {
    let mut entries = Vec::with_capacity(complex.len());
    let mut argmax = Vec::with_capacity(complex.len());
    for s in complex {
        let mut best = None::<(usize, f64)>;
        for &v in s.vertices() {
            let f = *vertex_values.get(v).ok_or(TopoError::MissingVertexValue(v))?;
            // vertices are ascending, so a strict comparison keeps the lowest index
            if best.is_none_or(|(_, b)| f > b) {
                best = Some((v, f));
            }
        }
        let (v, f) = best.unwrap();
        entries.push((s.clone(), f));
        argmax.push(v);
    }
    FilteredComplex::with_attribution(entries, Some(AttributionEntries::LowerStar(argmax)))
}

/// Alpha filtration of a cloud: the Delaunay complex with each simplex valued
/// at its squared alpha radius.
///
/// A simplex whose smallest circumsphere is empty of the opposite vertices of
/// its cofaces enters at its squared circumradius; otherwise it enters with
/// its cheapest coface. Clouds that do not span their ambient space are
/// triangulated inside their affine hull, so a planar set in 3D or two points
/// still get a filtration; values always use the original coordinates.
/// Points repeating an earlier point are left out.
pub fn alpha_filtration(cloud: &PointCloud) -> Result<FilteredComplex> {
    let keep = cloud.unique_indices();
    if keep.is_empty() {
        return Err(TopoError::InvalidInput("empty point cloud".into()));
    }
    let pts: Vec<Point> = keep.iter().map(|&i| cloud.point(i)).collect();
    let span = (0..3)
        .map(|k| {
            let (lo, hi) =
                pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
            hi - lo
        })
        .fold(0.0, f64::max);
    if !(3.0 * span * span).is_finite() {
        return Err(TopoError::DegenerateInput(format!("coordinate span {span:e} overflows squared distances")));
    }
    let rank = affine_rank(&pts).min(cloud.dim());
    let cells: Vec<SmallVec<[usize; 4]>> = match rank {
        0 => vec![SmallVec::from_slice(&[0])],
        1 => {
            // order along the principal direction and connect neighbours
            let dir = pts.iter().copied().max_by(|a, b| dist2(*a, pts[0]).total_cmp(&dist2(*b, pts[0]))).unwrap();
            let axis = sub(dir, pts[0]);
            let mut order: Vec<usize> = (0..pts.len()).collect();
            let t = |i: usize| dot(sub(pts[i], pts[0]), axis);
            order.sort_by(|&a, &b| t(a).total_cmp(&t(b)).then(a.cmp(&b)));
            order.windows(2).map(SmallVec::from_slice).collect()
        }
        r if r == cloud.dim() => triangulate(cloud.dim(), &pts)?,
        _ => {
            let (_, flat) = pca_3to2(&PointCloud::from_3d(pts.clone())?)?;
            let flat: Vec<Point> = flat.iter().map(|v| [v[0], v[1], 0.0]).collect();
            triangulate(2, &flat)?
        }
    };
    let cells: Vec<Simplex> = cells
        .into_iter()
        .map(|c| Simplex::new(&c.iter().map(|&i| keep[i]).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    alpha_from_cells(cloud.points(), &cells)
}

/// Downward propagation of alpha values over the closure of `cells`.
pub(crate) fn alpha_from_cells(points: &[Point], cells: &[Simplex]) -> Result<FilteredComplex> {
    let all = closure(cells);
    let index: FxHashMap<&Simplex, usize> = all.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let n = all.len();
    let mut value = vec![f64::NAN; n];
    let mut source: Vec<usize> = (0..n).collect();
    let mut spheres: Vec<Option<Circumsphere>> = vec![None; n];
    let coords = |s: &Simplex| -> SmallVec<[Point; 4]> { s.vertices().iter().map(|&v| points[v]).collect() };
    let sphere = |i: usize, spheres: &mut Vec<Option<Circumsphere>>| -> Result<Circumsphere> {
        if spheres[i].is_none() {
            spheres[i] = Some(circumsphere_of(&coords(&all[i]))?);
        }
        Ok(spheres[i].unwrap())
    };
    let top = all.iter().map(|s| s.dim()).max().unwrap_or(0);
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for (i, s) in all.iter().enumerate() {
        by_dim[s.dim()].push(i);
    }
    for d in (1..=top).rev() {
        for &i in &by_dim[d] {
            if value[i].is_nan() {
                value[i] = sphere(i, &mut spheres)?.radius_sq;
            }
            if d < 2 {
                continue;
            }
            let s = &all[i];
            for (k, f) in s.facets().enumerate() {
                let fi = index[&f];
                if !value[fi].is_nan() {
                    if value[i] < value[fi] {
                        value[fi] = value[i];
                        source[fi] = source[i];
                    }
                    continue;
                }
                // facets() drops vertex k, so vertex k is the opposite one
                let opposite = points[s.vertices()[k]];
                let cs = sphere(fi, &mut spheres)?;
                if dist2(opposite, cs.center) < cs.radius_sq {
                    value[fi] = value[i];
                    source[fi] = source[i];
                }
            }
        }
    }
    for &i in &by_dim[0] {
        value[i] = 0.0;
    }
    // Squared radii of a Gabriel face and its coface can tie mathematically
    // yet round apart; pull such faces down so the order stays monotone.
    for d in (1..=top).rev() {
        for &i in &by_dim[d] {
            for f in all[i].facets() {
                let fi = index[&f];
                if value[fi] > value[i] {
                    value[fi] = value[i];
                    source[fi] = source[i];
                }
            }
        }
    }
    let sources: Vec<Simplex> = source.iter().map(|&i| all[i].clone()).collect();
    let entries: Vec<(Simplex, f64)> = all.iter().cloned().zip(value).collect();
    FilteredComplex::with_attribution(entries, Some(AttributionEntries::Alpha(sources)))
}
