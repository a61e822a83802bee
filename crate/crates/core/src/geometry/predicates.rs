//! Exact orientation and in-sphere predicates with symbolic tie-breaking.
//!
//! Signs come from adaptive exact arithmetic. When a query point is exactly
//! co-spherical with a cell, the tie is resolved by perturbing the lifted
//! height of every point by `ε^(index+1)` for an infinitesimal `ε`, so the
//! outcome only depends on vertex indices and exact orientations. The lowest
//! index carries the dominant perturbation.

use robust::{Coord, Coord3D};

use super::{cross, sub, Point};

#[inline]
fn c2(p: Point) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: Point) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Sign of the orientation of `d + 1` points (d = 2 or 3). Positive for
/// counter-clockwise triangles and for tetrahedra with `robust::orient3d > 0`.
pub(crate) fn orient(dim: usize, pts: &[Point]) -> f64 {
    match dim {
        2 => robust::orient2d(c2(pts[0]), c2(pts[1]), c2(pts[2])),
        3 => robust::orient3d(c3(pts[0]), c3(pts[1]), c3(pts[2]), c3(pts[3])),
        _ => unreachable!("orientation only defined for 2 and 3 dimensions"),
    }
}

/// Raw in-sphere value of `q` against a positively oriented cell: positive
/// inside, negative outside, zero when co-spherical.
fn insphere_raw(dim: usize, cell: &[Point], q: Point) -> f64 {
    match dim {
        2 => robust::incircle(c2(cell[0]), c2(cell[1]), c2(cell[2]), c2(q)),
        3 => robust::insphere(c3(cell[0]), c3(cell[1]), c3(cell[2]), c3(cell[3]), c3(q)),
        _ => unreachable!(),
    }
}

/// Whether `q` (with index `q_index`) lies strictly inside the circumsphere
/// of the positively oriented cell `cell` (vertex indices `idx`), after
/// symbolic perturbation.
pub(crate) fn in_sphere(dim: usize, cell: &[Point], idx: &[usize], q: Point, q_index: usize) -> bool {
    let s = insphere_raw(dim, cell, q);
    if s > 0.0 {
        return true;
    }
    if s < 0.0 {
        return false;
    }
    // Raising point v's lifted height by ε_v shifts the conflict value by
    // λ_v(q)·ε_v for cell vertices and by −ε_q for the query itself, where
    // λ_v(q) is the barycentric coordinate of q, with the sign of the
    // orientation of the cell with v replaced by q.
    let mut order: Vec<usize> = (0..=dim).collect();
    order.sort_by_key(|&k| idx[k]);
    let mut pts = [[0.0; 3]; 4];
    for &k in &order {
        if idx[k] > q_index {
            return false;
        }
        pts[..=dim].copy_from_slice(&cell[..=dim]);
        pts[k] = q;
        let o = orient(dim, &pts[..=dim]);
        if o != 0.0 {
            return o > 0.0;
        }
    }
    false
}

/// Tie-aware in-circle test inside a hull facet's own affine hull: is `q`
/// (coplanar with the facet) strictly inside the facet's circumsphere?
/// `facet` holds `dim` points.
pub(crate) fn in_facet_sphere(dim: usize, facet: &[Point], idx: &[usize], q: Point, q_index: usize) -> bool {
    match dim {
        2 => {
            // Segment: strictly between the endpoints along the dominant axis.
            let (a, b) = (facet[0], facet[1]);
            let axis = if (b[0] - a[0]).abs() >= (b[1] - a[1]).abs() { 0 } else { 1 };
            let (lo, hi) = if a[axis] < b[axis] { (a[axis], b[axis]) } else { (b[axis], a[axis]) };
            q[axis] > lo && q[axis] < hi
        }
        3 => {
            // Any sphere through the triangle meets its plane in the
            // triangle's circumcircle, so lift the test with an off-plane apex.
            let (a, b, c) = (facet[0], facet[1], facet[2]);
            let n = cross(sub(b, a), sub(c, a));
            let mut apex = [a[0] + n[0], a[1] + n[1], a[2] + n[2]];
            if orient(3, &[a, b, c, apex]) == 0.0 {
                // n underflowed or rounded into the plane; push further out
                apex = [a[0] + n[0] * 1e3, a[1] + n[1] * 1e3, a[2] + n[2] * 1e3];
            }
            let mut cell = [a, b, c, apex];
            let o = orient(3, &cell);
            if o < 0.0 {
                cell.swap(0, 1);
            }
            let s = insphere_raw(3, &cell, q);
            if s > 0.0 {
                return true;
            }
            if s < 0.0 {
                return false;
            }
            // Co-circular tie: barycentric signs inside the plane, measured
            // through the orientation with the apex.
            let tri = [cell[0], cell[1], cell[2]];
            let tri_idx = if o < 0.0 { [idx[1], idx[0], idx[2]] } else { [idx[0], idx[1], idx[2]] };
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&k| tri_idx[k]);
            for &k in &order {
                if tri_idx[k] > q_index {
                    return false;
                }
                let mut t = tri;
                t[k] = q;
                let o = orient(3, &[t[0], t[1], t[2], cell[3]]);
                if o != 0.0 {
                    return o > 0.0;
                }
            }
            false
        }
        _ => unreachable!(),
    }
}
