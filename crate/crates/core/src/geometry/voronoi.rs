use super::{circumsphere, delaunay, dist, Point, PointCloud};
use crate::error::Result;

/// Vertices of the Voronoi region of `site`: circumcentres of the Delaunay
/// cells incident to it.
///
/// Unbounded cells contribute only the finite vertices they share with
/// bounded ones. When `max_distance` is given, vertices farther than that from
/// the site are dropped. Vertices closer than `1e-9` to an earlier one are
/// merged.
pub fn voronoi_cell_vertices(cloud: &PointCloud, site: usize, max_distance: Option<f64>) -> Result<Vec<Point>> {
    let cells = delaunay(cloud)?;
    let center = cloud.point(site);
    let mut out: Vec<Point> = Vec::new();
    for s in cells.iter().filter(|s| s.vertices().contains(&site)) {
        let Ok(cs) = circumsphere(s, cloud) else {
            continue;
        };
        if let Some(limit) = max_distance {
            if dist(cs.center, center) > limit {
                continue;
            }
        }
        if out.iter().all(|&q| dist(q, cs.center) > 1e-9) {
            out.push(cs.center);
        }
    }
    Ok(out)
}
