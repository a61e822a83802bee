//! Local persistent Voronoi interpolation: densify a point cloud with
//! Voronoi vertices of small neighbourhoods, keeping only additions that
//! barely change the neighbourhood's persistence diagram, and falling back to
//! a 2D Voronoi construction in a fitted plane otherwise.

use crate::error::{Result, TopoError};
use crate::geometry::{dist, dist2, lift_2to3, pca_3to2, voronoi_cell_vertices, PcaFrame, Point, PointCloud};
use crate::metrics::topo_diff;
use crate::par::Execution;

/// Added points closer than this to an earlier addition are dropped.
pub const ADDED_DEDUP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpviConfig {
    /// Neighbours of the 3D branch.
    pub k: usize,
    /// Neighbours of the planar branch.
    pub k_prime: usize,
    /// Acceptance threshold on the neighbourhood's topo_diff, measured on
    /// the neighbourhood rescaled so its k-th neighbour lies at distance 1.
    pub tau: f64,
    /// Candidates farther than this many k-th neighbour distances from the
    /// centre are discarded.
    pub locality_factor: f64,
    pub execution: Execution,
}

impl Default for LpviConfig {
    fn default() -> Self {
        Self { k: 16, k_prime: 8, tau: 0.5, locality_factor: 2.0, execution: Execution::default() }
    }
}

impl LpviConfig {
    fn validate(&self) -> Result<()> {
        if self.k_prime < 3 || self.k < self.k_prime {
            return Err(TopoError::InvalidInput(format!("need k ≥ k' ≥ 3, got k = {}, k' = {}", self.k, self.k_prime)));
        }
        if !(self.tau > 0.0) || !(self.locality_factor > 0.0) {
            return Err(TopoError::InvalidInput("tau and locality factor must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Voronoi3d,
    Plane2d,
    Skipped,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Voronoi3d => "3d",
            Branch::Plane2d => "2d",
            Branch::Skipped => "skipped",
        })
    }
}

/// What happened around one centre.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodRecord {
    pub center: usize,
    pub branch: Branch,
    /// Neighbours of the branch that decided (K for 3D, K′ otherwise).
    pub neighbors: Vec<usize>,
    /// Distance from the centre to the last of `neighbors`.
    pub radius: f64,
    /// Candidates proposed by the deciding branch.
    pub candidates: Vec<Point>,
    /// Candidates that survived deduplication against earlier additions.
    pub added: Vec<Point>,
    /// topo_diff of the 3D attempt, if one was made.
    pub topo_diff: Option<f64>,
    /// Fitted plane of the planar branch.
    pub frame: Option<PcaFrame>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpviReport {
    pub accepted_3d: usize,
    pub fallback_2d: usize,
    pub skipped: usize,
    pub points_added: usize,
    pub neighborhoods: Vec<NeighborhoodRecord>,
}

/// The `k` nearest neighbours of `center`, nearest first, ties by index.
pub fn knn(cloud: &PointCloud, center: usize, k: usize) -> Result<Vec<usize>> {
    let m = cloud.len();
    if k >= m {
        return Err(TopoError::KTooLarge { k, available: m.saturating_sub(1) });
    }
    let c = cloud.point(center);
    let mut others: Vec<(f64, usize)> =
        (0..m).filter(|&i| i != center).map(|i| (dist2(c, cloud.point(i)), i)).collect();
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k > 0 && k < others.len() {
        others.select_nth_unstable_by(k - 1, order);
    }
    others.truncate(k);
    others.sort_by(order);
    Ok(others.into_iter().map(|(_, i)| i).collect())
}

fn local_cloud(cloud: &PointCloud, center: usize, neighbors: &[usize]) -> PointCloud {
    let mut idx = Vec::with_capacity(neighbors.len() + 1);
    idx.push(center);
    idx.extend_from_slice(neighbors);
    cloud.subset(&idx)
}

/// Tries the 3D branch, then the planar one. Depends only on the cloud, the
/// centre and the configuration.
fn evaluate(cloud: &PointCloud, l: usize, cfg: &LpviConfig) -> Result<NeighborhoodRecord> {
    let center = cloud.point(l);
    let neighbors = knn(cloud, l, cfg.k)?;
    let radius = dist(center, cloud.point(*neighbors.last().unwrap()));
    let local = local_cloud(cloud, l, &neighbors);
    let mut attempt = None;
    if radius > 0.0 {
        if let Ok(cands) = voronoi_cell_vertices(&local, 0, Some(cfg.locality_factor * radius)) {
            let s = 1.0 / radius;
            let scaled_cands: Vec<Point> = cands.iter().map(|p| [p[0] * s, p[1] * s, p[2] * s]).collect();
            let x = local.scaled(s);
            let td = topo_diff(&x, &x.extended(&scaled_cands))?;
            if td < cfg.tau {
                return Ok(NeighborhoodRecord {
                    center: l,
                    branch: Branch::Voronoi3d,
                    neighbors,
                    radius,
                    candidates: cands,
                    added: Vec::new(),
                    topo_diff: Some(td),
                    frame: None,
                });
            }
            attempt = Some(td);
        }
    }

    let neighbors = knn(cloud, l, cfg.k_prime)?;
    let radius = dist(center, cloud.point(*neighbors.last().unwrap()));
    let skipped = |neighbors: Vec<usize>, frame| NeighborhoodRecord {
        center: l,
        branch: Branch::Skipped,
        neighbors,
        radius,
        candidates: Vec::new(),
        added: Vec::new(),
        topo_diff: attempt,
        frame,
    };
    let local = local_cloud(cloud, l, &neighbors);
    let Ok((frame, flat)) = pca_3to2(&local) else {
        return Ok(skipped(neighbors, None));
    };
    let flat_cloud = PointCloud::from_2d(&flat)?;
    let Ok(cands) = voronoi_cell_vertices(&flat_cloud, 0, Some(cfg.locality_factor * radius)) else {
        return Ok(skipped(neighbors, Some(frame)));
    };
    let candidates = cands.iter().map(|v| lift_2to3([v[0], v[1]], &frame)).collect();
    Ok(NeighborhoodRecord {
        center: l,
        branch: Branch::Plane2d,
        neighbors,
        radius,
        candidates,
        added: Vec::new(),
        topo_diff: attempt,
        frame: Some(frame),
    })
}

/// Densifies `cloud` by local Voronoi interpolation.
///
/// Centres are visited in index order, skipping points already covered by an
/// accepted neighbourhood. Around each centre the Voronoi vertices of its
/// site within the K-neighbourhood are proposed; if adding them changes the
/// neighbourhood's diagrams by less than `tau`, they are kept and the
/// neighbours marked as covered. Otherwise the K′-neighbourhood is projected
/// onto its PCA plane, the planar Voronoi vertices of the centre are lifted
/// back and kept. Returns the original points followed by the additions.
///
/// Neighbourhoods are evaluated speculatively in parallel but committed in
/// index order, so the result does not depend on the execution mode.
pub fn lpvi(cloud: &PointCloud, cfg: &LpviConfig) -> Result<(PointCloud, LpviReport)> {
    cfg.validate()?;
    if cloud.dim() != 3 {
        return Err(TopoError::InvalidInput("LPVI needs a 3D cloud".into()));
    }
    let m = cloud.len();
    if m < cfg.k + 1 {
        return Err(TopoError::CloudTooSmall { points: m, needed: cfg.k + 1 });
    }
    let chunk = match cfg.execution {
        Execution::Sequential => 1,
        Execution::Parallel => 4 * rayon_threads(),
    };
    let mut visited = vec![false; m];
    let mut report = LpviReport::default();
    let mut added: Vec<Point> = Vec::new();
    let mut next = 0;
    while next < m {
        let batch: Vec<usize> = (next..m).filter(|&i| !visited[i]).take(chunk).collect();
        let Some(&last) = batch.last() else { break };
        next = last + 1;
        let results = cfg.execution.map(&batch, |&l| evaluate(cloud, l, cfg));
        for (&l, rec) in batch.iter().zip(results) {
            if visited[l] {
                continue;
            }
            let mut rec = rec?;
            match rec.branch {
                Branch::Voronoi3d => report.accepted_3d += 1,
                Branch::Plane2d => report.fallback_2d += 1,
                Branch::Skipped => report.skipped += 1,
            }
            if rec.branch != Branch::Skipped {
                visited[l] = true;
                for &n in &rec.neighbors {
                    visited[n] = true;
                }
            }
            for &p in &rec.candidates {
                if added.iter().all(|&q| dist(p, q) > ADDED_DEDUP_TOLERANCE) {
                    added.push(p);
                    rec.added.push(p);
                }
            }
            report.neighborhoods.push(rec);
        }
    }
    report.points_added = added.len();
    Ok((cloud.extended(&added), report))
}

#[cfg(feature = "parallel")]
fn rayon_threads() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn rayon_threads() -> usize {
    1
}
