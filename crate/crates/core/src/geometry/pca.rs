use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::{add, dot, scale, sub, Point, PointCloud};
use crate::error::{Result, TopoError};

/// Relative eigenvalue threshold below which a principal direction is
/// considered absent.
const RANK_TOLERANCE: f64 = 1e-12;

/// A plane through `origin` spanned by two orthonormal directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcaFrame {
    pub origin: Point,
    pub basis: [Point; 2],
    /// Covariance eigenvalues along the two basis directions, descending.
    pub explained_variance: [f64; 2],
}

impl PcaFrame {
    /// Coordinates of `p − origin` in the basis.
    pub fn project(&self, p: Point) -> [f64; 2] {
        let d = sub(p, self.origin);
        [dot(d, self.basis[0]), dot(d, self.basis[1])]
    }

    /// Unit normal of the plane.
    pub fn normal(&self) -> Point {
        super::cross(self.basis[0], self.basis[1])
    }
}

/// Eigen-decomposition of the covariance about the centroid: eigenvalues
/// descending, with matching unit eigenvectors whose largest-magnitude
/// component is positive.
fn principal_axes(points: &[Point]) -> ([f64; 3], [Point; 3]) {
    let n = points.len() as f64;
    let mut mean = [0.0; 3];
    for &p in points {
        mean = add(mean, p);
    }
    mean = scale(mean, 1.0 / n);
    let mut cov = Matrix3::<f64>::zeros();
    for &p in points {
        let d = Vector3::from(sub(p, mean));
        cov += d * d.transpose();
    }
    cov /= n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (slot, &k) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        let mut v = [col[0], col[1], col[2]];
        let big = (0..3).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
        if v[big] < 0.0 {
            v = scale(v, -1.0);
        }
        values[slot] = eig.eigenvalues[k].max(0.0);
        vectors[slot] = v;
    }
    (values, vectors)
}

/// Number of principal directions with variance above `1e-12` times the
/// largest (0 for a single repeated point).
pub fn affine_rank(points: &[Point]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let (values, _) = principal_axes(points);
    if values[0] <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > RANK_TOLERANCE * values[0]).count()
}

/// Fits a plane to a neighbourhood by PCA and projects onto it.
///
/// The basis holds the two leading covariance eigenvectors; the frame is
/// anchored at the first point so that [`lift_2to3`] inverts the projection
/// exactly on the plane.
pub fn pca_3to2(neighborhood: &PointCloud) -> Result<(PcaFrame, Vec<[f64; 2]>)> {
    let pts = neighborhood.points();
    if pts.len() < 3 {
        return Err(TopoError::RankDeficient(0.0));
    }
    let (values, vectors) = principal_axes(pts);
    let ratio = if values[0] > 0.0 { values[1] / values[0] } else { 0.0 };
    if !(ratio >= RANK_TOLERANCE) {
        return Err(TopoError::RankDeficient(ratio));
    }
    let frame =
        PcaFrame { origin: pts[0], basis: [vectors[0], vectors[1]], explained_variance: [values[0], values[1]] };
    let projected = pts.iter().map(|&p| frame.project(p)).collect();
    Ok((frame, projected))
}

/// Maps plane coordinates back to 3D: `origin + v.x·u₁ + v.y·u₂`.
pub fn lift_2to3(v2: [f64; 2], frame: &PcaFrame) -> Point {
    add(frame.origin, add(scale(frame.basis[0], v2[0]), scale(frame.basis[1], v2[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dist;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lift_examples() {
        let frame = PcaFrame {
            origin: [1.0, 1.0, 1.0],
            basis: [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            explained_variance: [1.0, 1.0],
        };
        assert_eq!(lift_2to3([0.0, 0.0], &frame), [1.0, 1.0, 1.0]);
        assert_eq!(lift_2to3([1.0, 0.0], &frame), [1.0, 2.0, 1.0]);
    }

    #[test]
    fn flat_points_keep_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point> = (0..12).map(|_| [rng.random(), rng.random(), 0.0]).collect();
        let cloud = PointCloud::from_3d(pts.clone()).unwrap();
        let (frame, proj) = pca_3to2(&cloud).unwrap();
        assert!(frame.normal()[2].abs() > 1.0 - 1e-10);
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let d2 = ((proj[i][0] - proj[j][0]).powi(2) + (proj[i][1] - proj[j][1]).powi(2)).sqrt();
                assert!((d2 - dist(pts[i], pts[j])).abs() < 1e-10);
            }
            assert!(dist(lift_2to3(proj[i], &frame), pts[i]) < 1e-10);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<Point> = (0..20).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let (frame, _) = pca_3to2(&PointCloud::from_3d(pts).unwrap()).unwrap();
        let [u1, u2] = frame.basis;
        assert!((dot(u1, u1) - 1.0).abs() < 1e-10);
        assert!((dot(u2, u2) - 1.0).abs() < 1e-10);
        assert!(dot(u1, u2).abs() < 1e-10);
        assert!(frame.explained_variance[0] >= frame.explained_variance[1]);
    }

    #[test]
    fn collinear_is_rank_deficient() {
        let cloud =
            PointCloud::from_3d(vec![[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [3.0, 3.0, 3.0]]).unwrap();
        assert!(matches!(pca_3to2(&cloud), Err(TopoError::RankDeficient(_))));
        assert_eq!(affine_rank(cloud.points()), 1);
        assert_eq!(affine_rank(&[[0.5; 3], [0.5; 3]]), 0);
    }

    #[test]
    fn noisy_plane_residual_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 30;
        let pts: Vec<Point> =
            (0..n).map(|_| [rng.random(), rng.random(), 0.001 * (rng.random::<f64>() - 0.5)]).collect();
        let (frame, proj) = pca_3to2(&PointCloud::from_3d(pts.clone()).unwrap()).unwrap();
        // oracle: the residual of each point is its distance to the plane,
        // i.e. |(p − origin)·normal| with the normal from the third eigenvector
        let (_, vectors) = principal_axes(&pts);
        for (p, v) in pts.iter().zip(&proj) {
            let residual = dist(*p, lift_2to3(*v, &frame));
            let oracle = dot(sub(*p, frame.origin), vectors[2]).abs();
            assert!((residual - oracle).abs() < 1e-12);
            assert!(residual <= 0.001 * (n as f64).sqrt());
        }
    }
}
