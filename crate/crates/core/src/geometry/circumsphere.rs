use super::{add, cross, dist2, dot, scale, sub, Point, PointCloud, Simplex, CONDITION_LIMIT};
use crate::error::{Result, TopoError};

/// The smallest sphere through the vertices of a simplex, centred in the
/// simplex's affine hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circumsphere {
    pub center: Point,
    pub radius_sq: f64,
    /// Affine weights of the centre with respect to the vertices (they sum
    /// to one). Only the first `k + 1` entries are meaningful.
    pub weights: [f64; 4],
    /// Aspect-based condition estimate `L^k / (k! · vol_k)`, where `L` is
    /// the longest edge. Grows without bound as the simplex flattens.
    pub condition: f64,
}

/// Circumsphere of a simplex of `cloud`.
pub fn circumsphere(s: &Simplex, cloud: &PointCloud) -> Result<Circumsphere> {
    let pts: Vec<Point> = s.vertices().iter().map(|&v| cloud.point(v)).collect();
    circumsphere_of(&pts)
}

/// Circumsphere of 1 to 4 affinely independent points.
pub fn circumsphere_of(pts: &[Point]) -> Result<Circumsphere> {
    let cs = circumsphere_unchecked(pts)?;
    if !(cs.condition <= CONDITION_LIMIT) {
        return Err(TopoError::DegenerateSimplex(cs.condition));
    }
    Ok(cs)
}

fn longest_edge_sq(pts: &[Point]) -> f64 {
    let mut l: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            l = l.max(dist2(pts[i], pts[j]));
        }
    }
    l
}

fn circumsphere_unchecked(pts: &[Point]) -> Result<Circumsphere> {
    match pts.len() {
        1 => Ok(Circumsphere { center: pts[0], radius_sq: 0.0, weights: [1.0, 0.0, 0.0, 0.0], condition: 1.0 }),
        2 => {
            let l2 = dist2(pts[0], pts[1]);
            if l2 == 0.0 {
                return Err(TopoError::DegenerateSimplex(f64::INFINITY));
            }
            Ok(Circumsphere {
                center: scale(add(pts[0], pts[1]), 0.5),
                radius_sq: l2 / 4.0,
                weights: [0.5, 0.5, 0.0, 0.0],
                condition: 1.0,
            })
        }
        3 => {
            let a = sub(pts[1], pts[0]);
            let b = sub(pts[2], pts[0]);
            let n = cross(a, b);
            let n2 = dot(n, n);
            let l = longest_edge_sq(pts).sqrt();
            let condition = if n2 > 0.0 { l * l / n2.sqrt() } else { f64::INFINITY };
            if !(n2 > 0.0) {
                return Err(TopoError::DegenerateSimplex(condition));
            }
            let (a2, b2) = (dot(a, a), dot(b, b));
            let num = cross(sub(scale(b, a2), scale(a, b2)), n);
            let offset = scale(num, 0.5 / n2);
            let center = add(pts[0], offset);
            // barycentric weights from sub-triangle areas (signed along n)
            let w1 = dot(cross(offset, b), n) / n2;
            let w2 = dot(cross(a, offset), n) / n2;
            Ok(Circumsphere {
                center,
                radius_sq: dot(offset, offset),
                weights: [1.0 - w1 - w2, w1, w2, 0.0],
                condition,
            })
        }
        4 => {
            let a = sub(pts[1], pts[0]);
            let b = sub(pts[2], pts[0]);
            let c = sub(pts[3], pts[0]);
            let det = dot(a, cross(b, c));
            let l = longest_edge_sq(pts).sqrt();
            let condition = if det != 0.0 { l * l * l / det.abs() } else { f64::INFINITY };
            if det == 0.0 {
                return Err(TopoError::DegenerateSimplex(condition));
            }
            let num =
                add(add(scale(cross(b, c), dot(a, a)), scale(cross(c, a), dot(b, b))), scale(cross(a, b), dot(c, c)));
            let offset = scale(num, 0.5 / det);
            let center = add(pts[0], offset);
            let w1 = dot(offset, cross(b, c)) / det;
            let w2 = dot(a, cross(offset, c)) / det;
            let w3 = dot(a, cross(b, offset)) / det;
            Ok(Circumsphere {
                center,
                radius_sq: dot(offset, offset),
                weights: [1.0 - w1 - w2 - w3, w1, w2, w3],
                condition,
            })
        }
        n => Err(TopoError::InvalidInput(format!("circumsphere needs 1 to 4 points, got {n}"))),
    }
}

/// Gradient of the squared circumradius with respect to each vertex:
/// `∂r²/∂p_j = 2 w_j (p_j − c)` where `w` are the affine weights of the centre.
pub fn circumsphere_gradient(pts: &[Point]) -> Result<Vec<Point>> {
    let cs = circumsphere_unchecked(pts)?;
    Ok(pts.iter().enumerate().map(|(j, &p)| scale(sub(p, cs.center), 2.0 * cs.weights[j])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equidistance_error(pts: &[Point], cs: &Circumsphere) -> f64 {
        pts.iter().map(|&p| (dist2(p, cs.center) - cs.radius_sq).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn unit_edge() {
        let cs = circumsphere_of(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(cs.radius_sq, 0.25);
    }

    #[test]
    fn right_triangle_matches_thales() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let cs = circumsphere_of(&pts).unwrap();
        // hypotenuse midpoint, and the 2x2 equidistance system
        // 2x = 1, 2y = 1 gives the same centre
        assert!((cs.radius_sq - 0.5).abs() < 1e-15);
        assert!(dist2(cs.center, [0.5, 0.5, 0.0]) < 1e-30);
    }

    #[test]
    fn regular_tetrahedron() {
        let h = 1.0 / (2.0 * 2f64.sqrt());
        let pts = [[0.5, 0.0, -h], [-0.5, 0.0, -h], [0.0, 0.5, h], [0.0, -0.5, h]];
        // edge length 1
        assert!((dist2(pts[0], pts[2]) - 1.0).abs() < 1e-15);
        let cs = circumsphere_of(&pts).unwrap();
        assert!((cs.radius_sq - 3.0 / 8.0).abs() < 1e-12);
        assert!(equidistance_error(&pts, &cs) <= 1e-9 * (1.0 + cs.radius_sq));
    }

    #[test]
    fn degenerate_inputs() {
        let collinear = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert!(matches!(circumsphere_of(&collinear), Err(TopoError::DegenerateSimplex(_))));
        let coplanar = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        assert!(matches!(circumsphere_of(&coplanar), Err(TopoError::DegenerateSimplex(_))));
        let nearly = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 1e-14, 0.0]];
        assert!(circumsphere_of(&nearly).is_err());
    }

    #[test]
    fn weights_reproduce_centre() {
        let pts = [[0.1, 0.2, 0.3], [1.0, 0.1, -0.2], [0.3, 0.9, 0.1], [0.2, 0.4, 1.1]];
        for k in 2..=4 {
            let cs = circumsphere_of(&pts[..k]).unwrap();
            let mut c = [0.0; 3];
            for j in 0..k {
                c = add(c, scale(pts[j], cs.weights[j]));
            }
            assert!(dist2(c, cs.center) < 1e-24, "k = {k}");
            assert!(equidistance_error(&pts[..k], &cs) < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let pts = [[0.1, 0.2, 0.3], [1.0, 0.1, -0.2], [0.3, 0.9, 0.1], [0.2, 0.4, 1.1]];
        let h = 1e-6;
        for k in 2..=4 {
            let g = circumsphere_gradient(&pts[..k]).unwrap();
            for j in 0..k {
                for axis in 0..3 {
                    let mut plus = pts;
                    let mut minus = pts;
                    plus[j][axis] += h;
                    minus[j][axis] -= h;
                    let fd = (circumsphere_of(&plus[..k]).unwrap().radius_sq
                        - circumsphere_of(&minus[..k]).unwrap().radius_sq)
                        / (2.0 * h);
                    assert!(
                        (fd - g[j][axis]).abs() < 1e-7 * (1.0 + fd.abs()),
                        "k={k} j={j} axis={axis}: fd {fd} vs {}",
                        g[j][axis]
                    );
                }
            }
        }
    }
}
