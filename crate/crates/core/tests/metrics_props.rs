use rand::Rng;
use topokit::fixtures;
use topokit::metrics::{
    bottleneck, brute_force_diagram_distance, injective_matching_cost, topo_diff, total_persistence, wasserstein,
    DiagramPointRef,
};
use topokit::persistence::{alpha_filtration, compute_persistence, lower_star_filtration, PersistenceDiagram};

fn random_diagram(rng: &mut impl Rng, max_points: usize, dims: usize) -> PersistenceDiagram {
    let mut t = Vec::new();
    for dim in 0..dims {
        for _ in 0..rng.random_range(0..=max_points) {
            let b: f64 = rng.random_range(0.0..1.0);
            t.push((dim, b, b + rng.random_range(0.0..1.0)));
        }
    }
    PersistenceDiagram::from_triples(&t)
}

#[test]
fn wasserstein_and_bottleneck_match_brute_force() {
    let mut rng = fixtures::rng(17);
    for trial in 0..500 {
        let a = random_diagram(&mut rng, 6, 2);
        let b = random_diagram(&mut rng, 6, 2);
        let w = wasserstein(&a, &b, 2.0).unwrap();
        let wb = brute_force_diagram_distance(&a, &b, 2.0).unwrap();
        assert!((w - wb).abs() <= 1e-9, "trial {trial}: {w} vs {wb}");
        let q = 1.0 + (trial % 3) as f64;
        let wq = wasserstein(&a, &b, q).unwrap();
        assert!((wq - brute_force_diagram_distance(&a, &b, q).unwrap()).abs() <= 1e-9);
        let bn = bottleneck(&a, &b).unwrap();
        let bb = brute_force_diagram_distance(&a, &b, f64::INFINITY).unwrap();
        assert!((bn - bb).abs() <= 1e-9, "trial {trial}: {bn} vs {bb}");
    }
}

#[test]
fn metric_axioms() {
    let mut rng = fixtures::rng(23);
    for _ in 0..200 {
        let a = random_diagram(&mut rng, 5, 2);
        let b = random_diagram(&mut rng, 5, 2);
        let c = random_diagram(&mut rng, 5, 2);
        for f in [
            |x: &PersistenceDiagram, y: &PersistenceDiagram| wasserstein(x, y, 2.0).unwrap(),
            |x: &PersistenceDiagram, y: &PersistenceDiagram| bottleneck(x, y).unwrap(),
        ] {
            assert_eq!(f(&a, &a), 0.0);
            assert!((f(&a, &b) - f(&b, &a)).abs() <= 1e-12);
            assert!(f(&a, &c) <= f(&a, &b) + f(&b, &c) + 1e-9);
        }
    }
}

#[test]
fn lower_star_bottleneck_stability() {
    let mut rng = fixtures::rng(31);
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let complex = fixtures::random_complex(n, &mut rng);
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let g: Vec<f64> = f.iter().map(|x| x + rng.random_range(-0.2..0.2)).collect();
        let cap = f.iter().chain(&g).copied().fold(f64::MIN, f64::max);
        let df = compute_persistence(&lower_star_filtration(&complex, &f).unwrap()).unwrap();
        let dg = compute_persistence(&lower_star_filtration(&complex, &g).unwrap()).unwrap();
        // essential bars are compared through their births: cap both at the same level
        let sup = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let d = bottleneck(&df.capped(cap + 10.0), &dg.capped(cap + 10.0)).unwrap();
        assert!(d <= sup + 1e-12, "{d} > {sup}");
    }
}

#[test]
fn total_persistence_is_all_to_diagonal_cost() {
    let mut rng = fixtures::rng(41);
    let empty = PersistenceDiagram::from_triples(&[]);
    for _ in 0..100 {
        let d = random_diagram(&mut rng, 6, 1);
        for q in [1.0, 2.0, 3.0] {
            let w = wasserstein(&d, &empty, q).unwrap();
            // each point travels to its projection at cost 2·(pers/2)^q
            let expected = 2f64.powf(1.0 - q) * total_persistence(&d, q);
            assert!((w.powf(q) - expected).abs() <= 1e-9 * (1.0 + expected));
        }
        let tp1 = total_persistence(&d, 1.0);
        assert!(total_persistence(&d, 2.0) <= tp1 * tp1 + 1e-12);
    }
}

/// Exhaustive oracle over injections from gt's off-diagonal points into pred
/// (with diagonal targets when pred runs short).
fn brute_injective(pred: &[(f64, f64)], gt: &[(f64, f64)]) -> f64 {
    fn rec(pred: &[(f64, f64)], gt: &[(f64, f64)], i: usize, used: &mut Vec<bool>, diag_left: usize) -> f64 {
        if i == gt.len() {
            return 0.0;
        }
        let g = gt[i];
        let mut best = f64::INFINITY;
        for j in 0..pred.len() {
            if !used[j] {
                used[j] = true;
                let c = (g.0 - pred[j].0).powi(2) + (g.1 - pred[j].1).powi(2);
                best = best.min(c + rec(pred, gt, i + 1, used, diag_left));
                used[j] = false;
            }
        }
        if diag_left > 0 {
            best = best.min((g.1 - g.0).powi(2) / 2.0 + rec(pred, gt, i + 1, used, diag_left - 1));
        }
        best
    }
    let pad = gt.len().saturating_sub(pred.len());
    rec(pred, gt, 0, &mut vec![false; pred.len()], pad)
}

#[test]
fn injective_matching_matches_exhaustive_oracle() {
    let mut rng = fixtures::rng(53);
    for trial in 0..300 {
        let (ng, np) = if trial < 100 { (3, 5) } else { (rng.random_range(0..5), rng.random_range(0..5)) };
        let gt: Vec<(f64, f64)> = (0..ng)
            .map(|_| {
                let b = rng.random_range(0.0..1.0);
                (b, b + rng.random_range(0.01..1.0))
            })
            .collect();
        let pred: Vec<(f64, f64)> = (0..np)
            .map(|_| {
                let b = rng.random_range(0.0..1.0);
                (b, b + rng.random_range(0.0..1.0))
            })
            .collect();
        let to_dg =
            |v: &[(f64, f64)]| PersistenceDiagram::from_triples(&v.iter().map(|&(b, d)| (0, b, d)).collect::<Vec<_>>());
        let m = injective_matching_cost(&to_dg(&pred), &to_dg(&gt));
        assert!((m.cost - brute_injective(&pred, &gt)).abs() < 1e-12, "trial {trial}");
        // injective on sources and on real targets
        assert_eq!(m.pairs.len(), gt.len());
        let mut targets: Vec<_> = m
            .pairs
            .iter()
            .filter_map(|(_, t)| match t {
                DiagramPointRef::A(j) => Some(*j),
                _ => None,
            })
            .collect();
        let before = targets.len();
        targets.sort();
        targets.dedup();
        assert_eq!(targets.len(), before);
    }
}

#[test]
fn injective_cost_bounds_wasserstein() {
    // The matching induced by an injection is one admissible Wasserstein
    // transport once unmatched predictions go to the diagonal.
    let mut rng = fixtures::rng(59);
    for _ in 0..300 {
        let gt = random_diagram(&mut rng, 4, 1).without_diagonal();
        let pred = random_diagram(&mut rng, 5, 1);
        let m = injective_matching_cost(&pred, &gt);
        let matched: Vec<usize> = m
            .pairs
            .iter()
            .filter_map(|(_, t)| match t {
                DiagramPointRef::A(j) => Some(*j),
                _ => None,
            })
            .collect();
        let unmatched = PersistenceDiagram {
            pairs: (0..pred.pairs.len()).filter(|j| !matched.contains(j)).map(|j| pred.pairs[j].clone()).collect(),
            max_value: pred.max_value,
        };
        let w = wasserstein(&pred, &gt, 2.0).unwrap();
        assert!(w * w <= m.cost + total_persistence(&unmatched, 2.0) + 1e-9);
    }
    // the reverse ordering fails: one long gt bar against one short prediction
    let gt = PersistenceDiagram::from_triples(&[(0, 0.0, 10.0)]);
    let pred = PersistenceDiagram::from_triples(&[(0, 0.0, 0.1)]);
    let w = wasserstein(&pred, &gt, 2.0).unwrap();
    assert!(injective_matching_cost(&pred, &gt).cost > w * w);
}

#[test]
fn topo_diff_examples() {
    let square = fixtures::unit_square();
    assert_eq!(topo_diff(&square, &square).unwrap(), 0.0);

    let with_center = square.extended(&[[0.5, 0.5, 0.0]]);
    let v = topo_diff(&square, &with_center).unwrap();
    assert!(v > 0.0);
    let da = compute_persistence(&alpha_filtration(&square).unwrap()).unwrap();
    let db = compute_persistence(&alpha_filtration(&with_center).unwrap()).unwrap();
    let cap = da.max_value.max(db.max_value);
    let low = |d: &PersistenceDiagram| PersistenceDiagram {
        pairs: d.capped(cap).pairs.into_iter().filter(|p| p.dim <= 1).collect(),
        max_value: cap,
    };
    let oracle = brute_force_diagram_distance(&low(&da), &low(&db), 2.0).unwrap();
    assert!((v - oracle).abs() < 1e-12);

    let tet = fixtures::regular_tetrahedron();
    let c =
        tet.points().iter().fold([0.0; 3], |acc, p| [acc[0] + p[0] / 4.0, acc[1] + p[1] / 4.0, acc[2] + p[2] / 4.0]);
    let v = topo_diff(&tet, &tet.extended(&[c])).unwrap();
    assert!(v < 0.5, "tetrahedron centroid topo_diff {v}");
}
