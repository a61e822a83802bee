use topokit::fixtures;
use topokit::geometry::{dist, PointCloud};
use topokit::lpvi::{lpvi, Branch, LpviConfig};
use topokit::metrics::topo_diff;
use topokit::par::Execution;

fn reverify(cloud: &PointCloud, cfg: &LpviConfig) -> (usize, usize, usize) {
    let (out, report) = lpvi(cloud, cfg).unwrap();
    assert_eq!(&out.points()[..cloud.len()], cloud.points());
    assert_eq!(out.len(), cloud.len() + report.points_added);
    assert_eq!(report.accepted_3d + report.fallback_2d + report.skipped, report.neighborhoods.len());

    let mut centers: Vec<usize> = report.neighborhoods.iter().map(|r| r.center).collect();
    centers.dedup();
    assert_eq!(centers.len(), report.neighborhoods.len());
    assert!(centers.windows(2).all(|w| w[0] < w[1]));

    let mut added = 0;
    for rec in &report.neighborhoods {
        let c = cloud.point(rec.center);
        let radius = rec.neighbors.iter().map(|&n| dist(c, cloud.point(n))).fold(0.0, f64::max);
        assert_eq!(radius, rec.radius);
        for p in &rec.candidates {
            assert!(dist(*p, c) <= cfg.locality_factor * radius * (1.0 + 1e-12));
        }
        match rec.branch {
            Branch::Voronoi3d => {
                let mut idx = vec![rec.center];
                idx.extend(&rec.neighbors);
                let s = 1.0 / radius;
                let x = cloud.subset(&idx).scaled(s);
                let xs: Vec<_> = rec.candidates.iter().map(|p| [p[0] * s, p[1] * s, p[2] * s]).collect();
                assert!(topo_diff(&x, &x.extended(&xs)).unwrap() < cfg.tau);
            }
            Branch::Plane2d => {
                let frame = rec.frame.as_ref().unwrap();
                let n = frame.normal();
                let mut idx = vec![rec.center];
                idx.extend(&rec.neighbors);
                let diam = cloud.subset(&idx).diameter();
                for p in &rec.added {
                    let off = [p[0] - frame.origin[0], p[1] - frame.origin[1], p[2] - frame.origin[2]];
                    let h = off[0] * n[0] + off[1] * n[1] + off[2] * n[2];
                    assert!(h.abs() <= 1e-9 * diam.max(1.0), "off-plane by {h}");
                }
            }
            Branch::Skipped => assert!(rec.added.is_empty()),
        }
        added += rec.added.len();
    }
    assert_eq!(added, report.points_added);
    for (i, p) in out.points()[cloud.len()..].iter().enumerate() {
        for q in &out.points()[cloud.len() + i + 1..] {
            assert!(dist(*p, *q) > 1e-9);
        }
    }
    (report.accepted_3d, report.fallback_2d, report.skipped)
}

#[test]
fn sphere_fixture_reverifies() {
    let cloud = fixtures::sphere(200, 7);
    let cfg = LpviConfig::default();
    let counts = reverify(&cloud, &cfg);
    eprintln!("sphere: {counts:?}");
    assert!(counts.0 + counts.1 > 0);
}

#[test]
fn random_clouds_reverify() {
    for seed in 0..4 {
        let cloud = fixtures::random_cloud(3, 60, seed);
        let cfg = LpviConfig { k: 10, k_prime: 5, ..LpviConfig::default() };
        reverify(&cloud, &cfg);
    }
}

#[test]
fn runs_are_identical_across_modes_and_repeats() {
    let cloud = fixtures::sphere(200, 7);
    let seq = LpviConfig { execution: Execution::Sequential, ..LpviConfig::default() };
    let par = LpviConfig { execution: Execution::Parallel, ..LpviConfig::default() };
    let a = lpvi(&cloud, &seq).unwrap();
    assert_eq!(a, lpvi(&cloud, &par).unwrap());
    assert_eq!(a, lpvi(&cloud, &par).unwrap());
}

#[test]
fn planar_grid_and_collinear_line() {
    let grid = fixtures::planar_grid(10, 10);
    let (_, r) = lpvi(&grid, &LpviConfig::default()).unwrap();
    assert_eq!(r.fallback_2d, r.neighborhoods.len());

    let line = PointCloud::from_3d((0..20).map(|i| [i as f64, 2.0 * i as f64, 0.5]).collect()).unwrap();
    let (out, r) = lpvi(&line, &LpviConfig::default()).unwrap();
    assert_eq!(r.skipped, 20);
    assert_eq!(out.len(), 20);
}
