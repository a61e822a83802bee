//! Deterministic test inputs shared by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, PointCloud, Simplex};
use crate::persistence::{closure, lower_star_filtration, FilteredComplex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Corners of the unit square, counter-clockwise from the origin.
pub fn unit_square() -> PointCloud {
    PointCloud::from_2d(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
}

/// `n` equally spaced points on the unit circle.
pub fn circle(n: usize) -> PointCloud {
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_2d(&pts).unwrap()
}

/// Vertices of a regular tetrahedron with unit edges.
pub fn regular_tetrahedron() -> PointCloud {
    let h = 1.0 / (2.0 * 2f64.sqrt());
    PointCloud::from_3d(vec![[0.5, 0.0, -h], [-0.5, 0.0, -h], [0.0, 0.5, h], [0.0, -0.5, h]]).unwrap()
}

/// `n` points drawn uniformly on the unit sphere.
pub fn sphere(n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts = (0..n)
        .map(|_| loop {
            let p: Point = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
            let n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            if n2 > 1e-6 && n2 <= 1.0 {
                let s = 1.0 / n2.sqrt();
                break [p[0] * s, p[1] * s, p[2] * s];
            }
        })
        .collect();
    PointCloud::from_3d(pts).unwrap()
}

/// An `nx × ny` unit grid in the `z = 0` plane, stored as a 3D cloud.
pub fn planar_grid(nx: usize, ny: usize) -> PointCloud {
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            pts.push([i as f64, j as f64, 0.0]);
        }
    }
    PointCloud::from_3d(pts).unwrap()
}

/// `n` uniform points in the unit square or cube.
pub fn random_cloud(dim: usize, n: usize, seed: u64) -> PointCloud {
    let mut r = rng(seed);
    let pts = (0..n)
        .map(|_| {
            let mut p = [r.random(), r.random(), 0.0];
            if dim == 3 {
                p[2] = r.random();
            }
            p
        })
        .collect();
    PointCloud::new(dim, pts).unwrap()
}

/// A random complex on `n` vertices: every vertex, plus random edges,
/// triangles and tetrahedra, closed under faces.
pub fn random_complex(n: usize, rng: &mut impl Rng) -> Vec<Simplex> {
    let mut maximal: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();
    let extra = rng.random_range(0..=2 * n);
    for _ in 0..extra {
        let size = rng.random_range(2..=4usize).min(n);
        if size < 2 {
            break;
        }
        let mut v: Vec<usize> = Vec::new();
        while v.len() < size {
            let x = rng.random_range(0..n);
            if !v.contains(&x) {
                v.push(x);
            }
        }
        maximal.push(Simplex::new(&v).unwrap());
    }
    closure(&maximal)
}

/// A random lower-star filtration on at most `max_vertices` vertices. Values
/// are drawn from a small grid so that ties are common.
pub fn random_lower_star(max_vertices: usize, rng: &mut impl Rng) -> FilteredComplex {
    let n = rng.random_range(1..=max_vertices);
    let complex = random_complex(n, rng);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(0..6) as f64 / 4.0).collect();
    lower_star_filtration(&complex, &values).unwrap()
}

/// Seven rim vertices in a cycle coned off by vertex 7. The targets give
/// one long loop, born when the rim closes at 0.4 and filled when the apex
/// enters at 0.95; the start has the apex low, so the loop is missing.
pub fn cycle_problem(supv_weight: f64) -> crate::optimizer::ToyProblem {
    let mut cells = Vec::new();
    for i in 0..7 {
        let j = (i + 1) % 7;
        cells.push(Simplex::new(&[i, j, 7]).unwrap());
    }
    let targets = vec![0.1, 0.3, 0.15, 0.35, 0.2, 0.4, 0.25, 0.95];
    let initial = vec![0.9, 0.05, 0.8, 0.1, 0.7, 0.0, 0.85, 0.2];
    crate::optimizer::ToyProblem::new(&cells, targets, supv_weight).and_then(|p| p.with_initial(initial)).unwrap()
}
