//! A persistence-based image loss: both images become point clouds in RGB
//! space, their alpha barcodes are truncated to the `k_i` longest bars per
//! dimension, and bars are compared by length rank with Betti-style weights
//! taken from the ground truth.

use std::collections::HashMap;

use crate::error::{Result, TopoError};
use crate::geometry::{circumsphere_gradient, Point, PointCloud, Simplex};
use crate::par::Execution;
use crate::persistence::{
    alpha_filtration, compute_persistence, truncate_topk_capped, Attribution, Bar, FilteredComplex, PersistenceDiagram,
    TruncatedBarcode,
};

pub const DEFAULT_MAX_POINTS: usize = 1024;

/// Death assigned to essential bars. No squared alpha radius of a point set
/// in the unit cube that matters for ranking reaches it.
pub const ESSENTIAL_CAP: f64 = 3.0;

/// An RGB image, row-major, channels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<[f64; 3]>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(TopoError::InvalidInput(format!(
                "{height}x{width} image needs {} pixels, got {}",
                height * width,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c))) {
            return Err(TopoError::InvalidInput(format!("pixel {i} has a channel outside [0, 1]")));
        }
        Ok(Self { height, width, pixels })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        self.pixels[row * self.width + col]
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    /// Copy with one channel of one pixel replaced; the value is not
    /// range-checked so finite differences may step past the boundary.
    pub fn with_channel(&self, row: usize, col: usize, channel: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.pixels[row * self.width + col][channel] = value;
        out
    }
}

/// Pixels as points of RGB space. Identical colours share one point;
/// `pixel_index[i]` lists every `(row, col)` mapped to point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbPointSet {
    pub points: Vec<Point>,
    pub pixel_index: Vec<Vec<(usize, usize)>>,
    pub stride: usize,
}

/// Sampling stride keeping at most `max_points` pixels.
pub fn stride_for(height: usize, width: usize, max_points: usize) -> usize {
    let hw = height * width;
    if hw <= max_points || max_points == 0 {
        return 1;
    }
    let mut s = ((hw as f64) / (max_points as f64)).sqrt().ceil() as usize;
    while height.div_ceil(s) * width.div_ceil(s) > max_points {
        s += 1;
    }
    s
}

/// Reshapes an image to a point set, sampling every `stride`-th row and
/// column when it has more than `max_points` pixels.
pub fn reshape_to_rgb(img: &Image, max_points: usize) -> Result<RgbPointSet> {
    let stride = stride_for(img.height, img.width, max_points);
    let sampled = img.height.div_ceil(stride.max(1)) * img.width.div_ceil(stride.max(1));
    if sampled < 4 {
        return Err(TopoError::ImageTooSmall(sampled));
    }
    let mut points = Vec::new();
    let mut pixel_index: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut seen: HashMap<[u64; 3], usize> = HashMap::new();
    for r in (0..img.height).step_by(stride) {
        for c in (0..img.width).step_by(stride) {
            let p = img.pixel(r, c);
            // -0.0 and 0.0 are the same colour
            let key = p.map(|x| (x + 0.0).to_bits());
            let i = *seen.entry(key).or_insert_with(|| {
                points.push(p);
                pixel_index.push(Vec::new());
                points.len() - 1
            });
            pixel_index[i].push((r, c));
        }
    }
    Ok(RgbPointSet { points, pixel_index, stride })
}

/// One rank of the bar pairing in one dimension. A missing side is replaced
/// by the diagonal projection of the present one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarPairing {
    pub rendered: Option<Bar>,
    pub gt: Option<Bar>,
    pub pred: (f64, f64),
    pub target: (f64, f64),
}

impl BarPairing {
    pub fn cost(&self) -> f64 {
        (self.pred.0 - self.target.0).powi(2) + (self.pred.1 - self.target.1).powi(2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersLossValue {
    pub total: f64,
    pub per_dim_terms: [f64; 3],
    pub weights: [f64; 3],
    pub matching: [Vec<BarPairing>; 3],
}

/// Gradient with respect to every channel of every pixel, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PersLossGradient {
    pub height: usize,
    pub width: usize,
    pub d_pixels: Vec<[f64; 3]>,
}

impl PersLossGradient {
    pub fn get(&self, row: usize, col: usize) -> [f64; 3] {
        self.d_pixels[row * self.width + col]
    }

    pub fn nonzero_pixels(&self) -> usize {
        self.d_pixels.iter().filter(|p| p.iter().any(|&c| c != 0.0)).count()
    }
}

struct Side {
    set: RgbPointSet,
    fc: FilteredComplex,
    diagram: PersistenceDiagram,
    bars: TruncatedBarcode,
}

fn analyse(img: &Image, k: [usize; 3], max_points: usize) -> Result<Side> {
    let set = reshape_to_rgb(img, max_points)?;
    let fc = alpha_filtration(&PointCloud::from_3d(set.points.clone())?)?;
    let diagram = compute_persistence(&fc)?.without_diagonal();
    let bars = truncate_topk_capped(&diagram, k, ESSENTIAL_CAP);
    Ok(Side { set, fc, diagram, bars })
}

fn diagonal(bar: &Bar) -> (f64, f64) {
    let m = 0.5 * (bar.birth + bar.death);
    (m, m)
}

fn pair_bars(rendered: &TruncatedBarcode, gt: &TruncatedBarcode) -> PersLossValue {
    let mut matching: [Vec<BarPairing>; 3] = Default::default();
    let mut per_dim_terms = [0.0; 3];
    let kept: [usize; 3] = std::array::from_fn(|i| gt.bars[i].len());
    let total_kept: usize = kept.iter().sum();
    let weights = kept.map(|b| if total_kept == 0 { 0.0 } else { b as f64 / total_kept as f64 });
    for dim in 0..3 {
        let (r, g) = (&rendered.bars[dim], &gt.bars[dim]);
        for j in 0..r.len().max(g.len()) {
            let (rb, gb) = (r.get(j).copied(), g.get(j).copied());
            let pairing = match (rb, gb) {
                (Some(a), Some(b)) => {
                    BarPairing { rendered: rb, gt: gb, pred: (a.birth, a.death), target: (b.birth, b.death) }
                }
                (Some(a), None) => {
                    BarPairing { rendered: rb, gt: None, pred: (a.birth, a.death), target: diagonal(&a) }
                }
                (None, Some(b)) => {
                    BarPairing { rendered: None, gt: gb, pred: diagonal(&b), target: (b.birth, b.death) }
                }
                (None, None) => unreachable!(),
            };
            per_dim_terms[dim] += pairing.cost();
            matching[dim].push(pairing);
        }
    }
    let total = (0..3).map(|i| weights[i] * per_dim_terms[i]).sum();
    PersLossValue { total, per_dim_terms, weights, matching }
}

/// The loss against a fixed ground-truth image. The ground-truth barcode is
/// computed once and reused for every rendered image.
pub struct PersLoss {
    k: [usize; 3],
    max_points: usize,
    height: usize,
    width: usize,
    gt: TruncatedBarcode,
    pub execution: Execution,
}

impl PersLoss {
    pub fn new(gt: &Image, k: [usize; 3], max_points: usize) -> Result<Self> {
        let side = analyse(gt, k, max_points)?;
        Ok(Self { k, max_points, height: gt.height, width: gt.width, gt: side.bars, execution: Execution::default() })
    }

    pub fn gt_barcode(&self) -> &TruncatedBarcode {
        &self.gt
    }

    fn check(&self, rendered: &Image) -> Result<()> {
        if (rendered.height, rendered.width) != (self.height, self.width) {
            return Err(TopoError::DimensionMismatch(format!(
                "rendered {}x{} vs ground truth {}x{}",
                rendered.height, rendered.width, self.height, self.width
            )));
        }
        Ok(())
    }

    pub fn value(&self, rendered: &Image) -> Result<PersLossValue> {
        self.check(rendered)?;
        let side = analyse(rendered, self.k, self.max_points)?;
        Ok(pair_bars(&side.bars, &self.gt))
    }

    pub fn value_and_gradient(&self, rendered: &Image) -> Result<(PersLossValue, PersLossGradient)> {
        self.check(rendered)?;
        let side = analyse(rendered, self.k, self.max_points)?;
        let value = pair_bars(&side.bars, &self.gt);
        let grad = gradient(&side, &value, rendered)?;
        Ok((value, grad))
    }

    /// The value together with the critical simplices behind every
    /// rendered bar, in pairing order. Two images with the same signature
    /// differ only by smooth motion of those simplices.
    pub fn value_with_signature(&self, rendered: &Image) -> Result<(PersLossValue, Signature)> {
        self.check(rendered)?;
        let side = analyse(rendered, self.k, self.max_points)?;
        let value = pair_bars(&side.bars, &self.gt);
        let sources = alpha_sources(&side.fc);
        let mut sig = Vec::new();
        for (dim, list) in value.matching.iter().enumerate() {
            for p in list {
                if let Some(bar) = p.rendered {
                    let pair = &side.diagram.pairs[bar.pair];
                    let b = pair.birth_index.map(|i| sources[i].clone());
                    let d = if bar.capped { None } else { pair.death_index.map(|i| sources[i].clone()) };
                    sig.push((dim, b, d));
                }
            }
        }
        Ok((value, sig))
    }
}

/// `(dimension, birth source, death source)` per rendered bar.
pub type Signature = Vec<(usize, Option<Simplex>, Option<Simplex>)>;

fn alpha_sources(fc: &FilteredComplex) -> &[Simplex] {
    match fc.attribution() {
        Attribution::Alpha(s) => s,
        _ => unreachable!("alpha filtrations carry source simplices"),
    }
}

fn gradient(side: &Side, value: &PersLossValue, img: &Image) -> Result<PersLossGradient> {
    let sources = alpha_sources(&side.fc);
    let mut d_points = vec![[0.0; 3]; side.set.points.len()];
    let mut push = |simplex: &Simplex, coeff: f64| -> Result<()> {
        if coeff == 0.0 || simplex.dim() == 0 {
            return Ok(());
        }
        let pts: Vec<Point> = simplex.vertices().iter().map(|&v| side.set.points[v]).collect();
        for (&v, g) in simplex.vertices().iter().zip(circumsphere_gradient(&pts)?) {
            for c in 0..3 {
                d_points[v][c] += coeff * g[c];
            }
        }
        Ok(())
    };
    for (dim, list) in value.matching.iter().enumerate() {
        let w = value.weights[dim];
        for p in list {
            let Some(bar) = p.rendered else { continue };
            let pair = &side.diagram.pairs[bar.pair];
            if let Some(i) = pair.birth_index {
                push(&sources[i], 2.0 * w * (p.pred.0 - p.target.0))?;
            }
            if !bar.capped {
                if let Some(i) = pair.death_index {
                    push(&sources[i], 2.0 * w * (p.pred.1 - p.target.1))?;
                }
            }
        }
    }
    let mut d_pixels = vec![[0.0; 3]; img.height * img.width];
    for (g, pixels) in d_points.iter().zip(&side.set.pixel_index) {
        let share = 1.0 / pixels.len() as f64;
        for &(r, c) in pixels {
            d_pixels[r * img.width + c] = g.map(|x| x * share);
        }
    }
    Ok(PersLossGradient { height: img.height, width: img.width, d_pixels })
}

fn check_dims(rendered: &Image, gt: &Image) -> Result<()> {
    if (rendered.height, rendered.width) != (gt.height, gt.width) {
        return Err(TopoError::DimensionMismatch(format!(
            "rendered {}x{} vs ground truth {}x{}",
            rendered.height, rendered.width, gt.height, gt.width
        )));
    }
    Ok(())
}

/// Loss of `rendered` against `gt` with the default point budget.
pub fn persloss(rendered: &Image, gt: &Image, k: [usize; 3]) -> Result<PersLossValue> {
    persloss_with(rendered, gt, k, DEFAULT_MAX_POINTS, Execution::default())
}

pub fn persloss_with(
    rendered: &Image,
    gt: &Image,
    k: [usize; 3],
    max_points: usize,
    exec: Execution,
) -> Result<PersLossValue> {
    check_dims(rendered, gt)?;
    let (r, g) = exec.join(|| analyse(rendered, k, max_points), || analyse(gt, k, max_points));
    Ok(pair_bars(&r?.bars, &g?.bars))
}

/// Loss and its gradient with respect to the rendered pixels.
pub fn persloss_gradient(rendered: &Image, gt: &Image, k: [usize; 3]) -> Result<(PersLossValue, PersLossGradient)> {
    persloss_gradient_with(rendered, gt, k, DEFAULT_MAX_POINTS, Execution::default())
}

pub fn persloss_gradient_with(
    rendered: &Image,
    gt: &Image,
    k: [usize; 3],
    max_points: usize,
    exec: Execution,
) -> Result<(PersLossValue, PersLossGradient)> {
    check_dims(rendered, gt)?;
    let (r, g) = exec.join(|| analyse(rendered, k, max_points), || analyse(gt, k, max_points));
    let r = r?;
    let value = pair_bars(&r.bars, &g?.bars);
    let grad = gradient(&r, &value, rendered)?;
    Ok((value, grad))
}
