//! Distances and matchings between persistence diagrams.
//!
//! Diagrams are compared one homology dimension at a time. Each point may be
//! matched to a point of the other diagram or to its own projection on the
//! diagonal. [`wasserstein`] sums the per-dimension distances, while
//! [`bottleneck`] takes their maximum.

mod hungarian;

pub use hungarian::assign;

use crate::error::{Result, TopoError};
use crate::geometry::PointCloud;
use crate::persistence::{alpha_filtration, compute_persistence, PersistenceDiagram};

/// Largest per-dimension diagram size accepted by the brute-force oracle.
pub const BRUTE_FORCE_MAX_POINTS: usize = 6;

/// A point of one of two diagrams, or the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagramPointRef {
    A(usize),
    B(usize),
    Diagonal,
}

/// Matched pairs with their total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub pairs: Vec<(DiagramPointRef, DiagramPointRef)>,
    pub cost: f64,
}

type Pt = (f64, f64);

fn points_by_dim(d: &PersistenceDiagram) -> Result<Vec<Vec<Pt>>> {
    let mut out: Vec<Vec<Pt>> = Vec::new();
    for p in &d.pairs {
        if !p.death.is_finite() || !p.birth.is_finite() {
            return Err(TopoError::UncappedInfiniteBar);
        }
        if out.len() <= p.dim {
            out.resize(p.dim + 1, Vec::new());
        }
        out[p.dim].push((p.birth, p.death));
    }
    Ok(out)
}

fn pair_dims(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<Vec<(Vec<Pt>, Vec<Pt>)>> {
    let mut pa = points_by_dim(a)?;
    let mut pb = points_by_dim(b)?;
    let n = pa.len().max(pb.len());
    pa.resize(n, Vec::new());
    pb.resize(n, Vec::new());
    Ok(pa.into_iter().zip(pb).collect())
}

fn lq_cost(x: Pt, y: Pt, q: f64) -> f64 {
    (x.0 - y.0).abs().powf(q) + (x.1 - y.1).abs().powf(q)
}

/// Transport cost from a point to its diagonal projection `((b+d)/2, (b+d)/2)`.
fn lq_diag(x: Pt, q: f64) -> f64 {
    2.0 * ((x.1 - x.0).abs() / 2.0).powf(q)
}

fn linf_cost(x: Pt, y: Pt) -> f64 {
    (x.0 - y.0).abs().max((x.1 - y.1).abs())
}

fn linf_diag(x: Pt) -> f64 {
    (x.1 - x.0).abs() / 2.0
}

/// Square cost matrix over `A ∪ diag(B)` × `B ∪ diag(A)`.
fn augmented(a: &[Pt], b: &[Pt], pair: impl Fn(Pt, Pt) -> f64, diag: impl Fn(Pt) -> f64) -> Vec<Vec<f64>> {
    let (n, m) = (a.len(), b.len());
    let mut c = vec![vec![0.0; n + m]; n + m];
    for i in 0..n {
        for j in 0..m {
            c[i][j] = pair(a[i], b[j]);
        }
        for k in 0..n {
            c[i][m + k] = if k == i { diag(a[i]) } else { f64::INFINITY };
        }
    }
    for l in 0..m {
        for j in 0..m {
            c[n + l][j] = if j == l { diag(b[l]) } else { f64::INFINITY };
        }
    }
    c
}

fn wasserstein_power(a: &[Pt], b: &[Pt], q: f64) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let c = augmented(a, b, |x, y| lq_cost(x, y, q), |x| lq_diag(x, q));
    let cols = assign(&c);
    cols.iter().enumerate().map(|(i, &j)| c[i][j]).sum()
}

/// q-Wasserstein distance, computed exactly per homology dimension and
/// summed over dimensions. The ground cost is `|Δb|^q + |Δd|^q`.
pub fn wasserstein(da: &PersistenceDiagram, db: &PersistenceDiagram, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(TopoError::InvalidInput(format!("q must be a finite real ≥ 1, got {q}")));
    }
    Ok(pair_dims(da, db)?.iter().map(|(a, b)| wasserstein_power(a, b, q).powf(1.0 / q)).sum())
}

/// Whether a perfect matching exists using only pairs of cost `≤ limit`.
fn perfect_matching_within(c: &[Vec<f64>], limit: f64) -> bool {
    let n = c.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(i: usize, c: &[Vec<f64>], limit: f64, seen: &mut [bool], match_col: &mut [Option<usize>]) -> bool {
        for j in 0..c.len() {
            if c[i][j] <= limit && !seen[j] {
                seen[j] = true;
                if match_col[j].is_none_or(|k| augment(k, c, limit, seen, match_col)) {
                    match_col[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|i| augment(i, c, limit, &mut vec![false; n], &mut match_col))
}

fn bottleneck_dim(a: &[Pt], b: &[Pt]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let c = augmented(a, b, linf_cost, linf_diag);
    let mut candidates: Vec<f64> = c.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_within(&c, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck distance: the smallest achievable largest L∞ displacement,
/// maximised over homology dimensions.
pub fn bottleneck(da: &PersistenceDiagram, db: &PersistenceDiagram) -> Result<f64> {
    Ok(pair_dims(da, db)?.iter().map(|(a, b)| bottleneck_dim(a, b)).fold(0.0, f64::max))
}

/// Exhaustive minimum over all partial injections `A → B` (the rest of both
/// sides going to the diagonal). `q = ∞` gives the bottleneck distance.
pub fn brute_force_diagram_distance(da: &PersistenceDiagram, db: &PersistenceDiagram, q: f64) -> Result<f64> {
    let dims = pair_dims(da, db)?;
    for (a, b) in &dims {
        let big = a.len().max(b.len());
        if big > BRUTE_FORCE_MAX_POINTS {
            return Err(TopoError::DiagramTooLarge(big, BRUTE_FORCE_MAX_POINTS));
        }
    }
    let bottleneck = q == f64::INFINITY;
    let mut total: f64 = 0.0;
    for (a, b) in &dims {
        let mut best = f64::INFINITY;
        let mut used = vec![false; b.len()];
        let mut chosen: Vec<Option<usize>> = Vec::with_capacity(a.len());
        enumerate(a.len(), &mut used, &mut chosen, &mut |assignment, used| {
            let mut parts = Vec::with_capacity(a.len() + b.len());
            for (i, t) in assignment.iter().enumerate() {
                parts.push(match t {
                    Some(j) if bottleneck => linf_cost(a[i], b[*j]),
                    Some(j) => lq_cost(a[i], b[*j], q),
                    None if bottleneck => linf_diag(a[i]),
                    None => lq_diag(a[i], q),
                });
            }
            for (j, &u) in used.iter().enumerate() {
                if !u {
                    parts.push(if bottleneck { linf_diag(b[j]) } else { lq_diag(b[j], q) });
                }
            }
            let c = if bottleneck { parts.into_iter().fold(0.0, f64::max) } else { parts.into_iter().sum() };
            best = best.min(c);
        });
        total = if bottleneck { total.max(best) } else { total + best.powf(1.0 / q) };
    }
    Ok(total)
}

/// Receives each complete assignment and the mask of used columns.
type Visitor<'a> = dyn FnMut(&[Option<usize>], &[bool]) + 'a;

fn enumerate(n: usize, used: &mut Vec<bool>, chosen: &mut Vec<Option<usize>>, visit: &mut Visitor<'_>) {
    if chosen.len() == n {
        visit(chosen, used);
        return;
    }
    chosen.push(None);
    enumerate(n, used, chosen, visit);
    chosen.pop();
    for j in 0..used.len() {
        if !used[j] {
            used[j] = true;
            chosen.push(Some(j));
            enumerate(n, used, chosen, visit);
            chosen.pop();
            used[j] = false;
        }
    }
}

/// k-th total persistence `Σ (death − birth)^k`. Essential bars make it
/// infinite.
pub fn total_persistence(d: &PersistenceDiagram, k: f64) -> f64 {
    d.pairs.iter().map(|p| p.persistence().powf(k)).sum()
}

/// Cheapest injection from the off-diagonal points of `gt` into `pred`, per
/// dimension, under the cost `(Δbirth)² + (Δdeath)²`.
///
/// When `pred` has too few points in some dimension, [`DiagramPointRef::Diagonal`]
/// targets are added; sending `(b, d)` there costs `(d − b)² / 2`, the squared
/// distance to its diagonal projection. Sources are `B` (indices into
/// `gt.pairs`), targets are `A` (indices into `pred.pairs`) or the diagonal.
pub fn injective_matching_cost(pred: &PersistenceDiagram, gt: &PersistenceDiagram) -> Matching {
    let max_dim = pred.max_dim().max(gt.max_dim());
    let mut pairs = Vec::new();
    let mut cost = 0.0;
    for dim in 0..=max_dim {
        let sources: Vec<usize> =
            (0..gt.pairs.len()).filter(|&i| gt.pairs[i].dim == dim && gt.pairs[i].death > gt.pairs[i].birth).collect();
        if sources.is_empty() {
            continue;
        }
        let targets: Vec<usize> = (0..pred.pairs.len()).filter(|&j| pred.pairs[j].dim == dim).collect();
        let pad = sources.len().saturating_sub(targets.len());
        let c: Vec<Vec<f64>> = sources
            .iter()
            .map(|&i| {
                let g = &gt.pairs[i];
                let mut row: Vec<f64> = targets
                    .iter()
                    .map(|&j| {
                        let p = &pred.pairs[j];
                        (g.birth - p.birth).powi(2) + (g.death - p.death).powi(2)
                    })
                    .collect();
                row.extend(std::iter::repeat_n((g.death - g.birth).powi(2) / 2.0, pad));
                row
            })
            .collect();
        let cols = assign(&c);
        for (r, &col) in cols.iter().enumerate() {
            cost += c[r][col];
            let target = if col < targets.len() { DiagramPointRef::A(targets[col]) } else { DiagramPointRef::Diagonal };
            pairs.push((DiagramPointRef::B(sources[r]), target));
        }
    }
    Matching { pairs, cost }
}

/// Topological change caused by adding points: the sum over homology
/// dimensions 0 and 1 of the 2-Wasserstein distance between the alpha
/// diagrams of `x` and `x_hat`. Essential bars of both diagrams are capped at
/// the larger of the two complexes' maximal filtration values.
pub fn topo_diff(x: &PointCloud, x_hat: &PointCloud) -> Result<f64> {
    let da = compute_persistence(&alpha_filtration(x)?)?;
    let db = compute_persistence(&alpha_filtration(x_hat)?)?;
    topo_diff_of_diagrams(&da, &db)
}

pub(crate) fn topo_diff_of_diagrams(da: &PersistenceDiagram, db: &PersistenceDiagram) -> Result<f64> {
    let cap = da.max_value.max(db.max_value);
    let keep = |d: &PersistenceDiagram| PersistenceDiagram {
        pairs: d.capped(cap).pairs.into_iter().filter(|p| p.dim <= 1).collect(),
        max_value: cap,
    };
    wasserstein(&keep(da), &keep(db), 2.0)
}
