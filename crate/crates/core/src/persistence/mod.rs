//! Filtered simplicial complexes and their persistent homology over Z/2.

mod filtration;
mod oracle;
mod reduction;

use rustc_hash::FxHashMap;

use crate::error::{Result, TopoError};
use crate::geometry::Simplex;

pub use filtration::{alpha_filtration, closure, lower_star_filtration};
pub use oracle::{betti_rank_oracle, ORACLE_MAX_SIMPLICES};
pub use reduction::{compute_persistence, compute_persistence_batch};

/// How each simplex's filtration value can be traced back to the input, for
/// gradient computations.
#[derive(Debug, Clone, PartialEq)]
pub enum Attribution {
    None,
    /// Lower-star: the vertex attaining the maximum (lowest index on ties).
    LowerStar(Vec<usize>),
    /// Alpha: the simplex whose squared circumradius is the value.
    Alpha(Vec<Simplex>),
}

/// Simplices with filtration values, stored in processing order: sorted by
/// value, then dimension, then vertex tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    simplices: Vec<Simplex>,
    values: Vec<f64>,
    attribution: Attribution,
    boundaries: Vec<Vec<usize>>,
}

impl FilteredComplex {
    /// Builds a complex from arbitrary-order entries. The set must be closed
    /// under faces and every face must not come later than its cofaces.
    pub fn new(entries: Vec<(Simplex, f64)>) -> Result<Self> {
        Self::with_attribution(entries, None)
    }

    pub(crate) fn with_attribution(
        entries: Vec<(Simplex, f64)>,
        attribution: Option<AttributionEntries>,
    ) -> Result<Self> {
        if let Some((s, v)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(TopoError::InvalidInput(format!("simplex {s} has non-finite value {v}")));
        }
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| {
            let (sa, va) = &entries[a];
            let (sb, vb) = &entries[b];
            va.total_cmp(vb).then(sa.dim().cmp(&sb.dim())).then_with(|| sa.cmp(sb))
        });
        if order.windows(2).any(|w| entries[w[0]].0 == entries[w[1]].0) {
            return Err(TopoError::InvalidInput("repeated simplex".into()));
        }
        let attribution = match attribution {
            None => Attribution::None,
            Some(AttributionEntries::LowerStar(v)) => Attribution::LowerStar(order.iter().map(|&i| v[i]).collect()),
            Some(AttributionEntries::Alpha(v)) => Attribution::Alpha(order.iter().map(|&i| v[i].clone()).collect()),
        };
        let mut simplices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut entries: Vec<Option<(Simplex, f64)>> = entries.into_iter().map(Some).collect();
        for &i in &order {
            let (s, v) = entries[i].take().unwrap();
            simplices.push(s);
            values.push(v);
        }
        let boundaries = boundary_columns(&simplices, &values)?;
        Ok(Self { simplices, values, attribution, boundaries })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn attribution(&self) -> &Attribution {
        &self.attribution
    }

    /// Largest filtration value (0 for an empty complex).
    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of simplices of each dimension 0..=3.
    pub fn counts_by_dim(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for s in &self.simplices {
            c[s.dim().min(3)] += 1;
        }
        c
    }

    /// Facet positions of every simplex, ascending.
    pub(crate) fn boundaries(&self) -> &[Vec<usize>] {
        &self.boundaries
    }
}

pub(crate) enum AttributionEntries {
    LowerStar(Vec<usize>),
    Alpha(Vec<Simplex>),
}

/// Facet positions of every simplex, checking closure and monotonicity.
fn boundary_columns(simplices: &[Simplex], values: &[f64]) -> Result<Vec<Vec<usize>>> {
    let index: FxHashMap<&Simplex, usize> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = Vec::with_capacity(simplices.len());
    for (j, s) in simplices.iter().enumerate() {
        let mut col = Vec::with_capacity(s.dim() + 1);
        for f in s.facets() {
            let Some(&i) = index.get(&f) else {
                return Err(TopoError::InvalidInput(format!("face {f} of {s} is missing")));
            };
            if values[i] > values[j] || i > j {
                return Err(TopoError::NonMonotoneFiltration(format!(
                    "face {f} ({}) enters after {s} ({})",
                    values[i], values[j]
                )));
            }
            col.push(i);
        }
        col.sort_unstable();
        out.push(col);
    }
    Ok(out)
}

/// A birth–death pair. Critical simplices are given both as simplices and as
/// positions in the filtration order when the pair comes from a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
    pub birth_simplex: Option<Simplex>,
    pub death_simplex: Option<Simplex>,
    pub birth_index: Option<usize>,
    pub death_index: Option<usize>,
    /// Lower-star filtrations only: the vertices whose values are the birth
    /// and death.
    pub birth_vertex: Option<usize>,
    pub death_vertex: Option<usize>,
}

impl PersistencePair {
    /// A bare pair with no attribution.
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Self {
            dim,
            birth,
            death,
            birth_simplex: None,
            death_simplex: None,
            birth_index: None,
            death_index: None,
            birth_vertex: None,
            death_vertex: None,
        }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }
}

/// A multiset of persistence pairs. `max_value` is the largest filtration
/// value of the source complex and serves as the cap for essential bars.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
    pub max_value: f64,
}

impl PersistenceDiagram {
    /// A diagram from bare `(dim, birth, death)` triples; the cap is the
    /// largest finite coordinate.
    pub fn from_triples(triples: &[(usize, f64, f64)]) -> Self {
        let max_value = triples.iter().flat_map(|&(_, b, d)| [b, d]).filter(|v| v.is_finite()).fold(0.0, f64::max);
        Self { pairs: triples.iter().map(|&(dim, b, d)| PersistencePair::new(dim, b, d)).collect(), max_value }
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new(), max_value: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// `(dim, birth, death)` triples sorted by dimension, birth, death.
    pub fn sorted_triples(&self) -> Vec<(usize, f64, f64)> {
        let mut t: Vec<_> = self.pairs.iter().map(|p| (p.dim, p.birth, p.death)).collect();
        t.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
        t
    }

    /// Pairs with positive persistence only.
    pub fn without_diagonal(&self) -> Self {
        Self { pairs: self.pairs.iter().filter(|p| p.death > p.birth).cloned().collect(), max_value: self.max_value }
    }

    /// Replaces infinite deaths by `cap`.
    pub fn capped(&self, cap: f64) -> Self {
        Self {
            pairs: self
                .pairs
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    if q.is_essential() {
                        q.death = cap;
                    }
                    q
                })
                .collect(),
            max_value: self.max_value,
        }
    }

    /// Highest homology dimension present, or 0.
    pub fn max_dim(&self) -> usize {
        self.pairs.iter().map(|p| p.dim).max().unwrap_or(0)
    }
}

/// Betti numbers `(β⁰, β¹, β²)` at scale `alpha`: pairs with
/// `birth ≤ alpha < death`.
pub fn betti_numbers(diagram: &PersistenceDiagram, alpha: f64) -> [usize; 3] {
    let mut b = [0; 3];
    for p in &diagram.pairs {
        if p.dim < 3 && p.birth <= alpha && alpha < p.death {
            b[p.dim] += 1;
        }
    }
    b
}

/// One bar of a truncated barcode. `pair` indexes the diagram it came from;
/// `capped` marks an essential bar whose death was replaced by the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub birth: f64,
    pub death: f64,
    pub pair: usize,
    pub capped: bool,
}

impl Bar {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// The `k_i` longest bars of each dimension 0..=2, longest first.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBarcode {
    pub bars: [Vec<Bar>; 3],
    pub k: [usize; 3],
}

impl TruncatedBarcode {
    /// The kept bars as a diagram (capped deaths are finite).
    pub fn to_diagram(&self) -> PersistenceDiagram {
        let mut triples = Vec::new();
        for (dim, bars) in self.bars.iter().enumerate() {
            triples.extend(bars.iter().map(|b| (dim, b.birth, b.death)));
        }
        PersistenceDiagram::from_triples(&triples)
    }
}

/// Keeps the `k_i` longest bars per dimension, capping essential bars at the
/// diagram's `max_value`. Ties are broken by birth, then death.
pub fn truncate_topk(diagram: &PersistenceDiagram, k: [usize; 3]) -> TruncatedBarcode {
    truncate_topk_capped(diagram, k, diagram.max_value)
}

/// [`truncate_topk`] with an explicit cap for essential bars.
pub fn truncate_topk_capped(diagram: &PersistenceDiagram, k: [usize; 3], cap: f64) -> TruncatedBarcode {
    let mut bars: [Vec<Bar>; 3] = Default::default();
    for (i, p) in diagram.pairs.iter().enumerate() {
        if p.dim > 2 {
            continue;
        }
        let capped = p.is_essential();
        bars[p.dim].push(Bar {
            birth: p.birth,
            death: if capped { cap.max(p.birth) } else { p.death },
            pair: i,
            capped,
        });
    }
    for (dim, list) in bars.iter_mut().enumerate() {
        list.sort_by(|a, b| {
            b.persistence()
                .total_cmp(&a.persistence())
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
                .then(a.pair.cmp(&b.pair))
        });
        list.truncate(k[dim]);
    }
    TruncatedBarcode { bars, k }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_sorts_and_validates() {
        let s = |v: &[usize]| Simplex::new(v).unwrap();
        let fc = FilteredComplex::new(vec![(s(&[0, 1]), 1.0), (s(&[1]), 0.5), (s(&[0]), 0.0)]).unwrap();
        assert_eq!(fc.simplices(), &[s(&[0]), s(&[1]), s(&[0, 1])]);
        let bad = FilteredComplex::new(vec![(s(&[0, 1]), 0.2), (s(&[1]), 0.5), (s(&[0]), 0.0)]);
        assert!(matches!(bad, Err(TopoError::NonMonotoneFiltration(_))));
        let open = FilteredComplex::new(vec![(s(&[0, 1]), 1.0), (s(&[0]), 0.0)]);
        assert!(matches!(open, Err(TopoError::InvalidInput(_))));
    }

    #[test]
    fn ties_order_by_dimension_then_vertices() {
        let s = |v: &[usize]| Simplex::new(v).unwrap();
        let fc = FilteredComplex::new(vec![(s(&[0, 1]), 0.0), (s(&[1]), 0.0), (s(&[0]), 0.0)]).unwrap();
        assert_eq!(fc.simplices(), &[s(&[0]), s(&[1]), s(&[0, 1])]);
    }

    #[test]
    fn truncation_examples() {
        let d = PersistenceDiagram::from_triples(&[(0, 0.0, 5.0), (0, 1.0, 2.0), (0, 0.0, 3.0)]);
        let t = truncate_topk(&d, [2, 0, 0]);
        let kept: Vec<f64> = t.bars[0].iter().map(|b| b.persistence()).collect();
        assert_eq!(kept, vec![5.0, 3.0]);
        assert!(truncate_topk(&d, [0, 0, 0]).bars.iter().all(|b| b.is_empty()));
    }

    #[test]
    fn truncation_caps_essential_bars() {
        let d = PersistenceDiagram::from_triples(&[(0, 0.0, f64::INFINITY), (0, 0.0, 0.3), (1, 0.2, 0.9)]);
        assert_eq!(d.max_value, 0.9);
        let t = truncate_topk(&d, [1, 1, 0]);
        assert_eq!(t.bars[0][0].death, 0.9);
        assert!(t.bars[0][0].capped);
    }

    #[test]
    fn betti_counts_half_open_intervals() {
        let d = PersistenceDiagram::from_triples(&[(0, 0.0, f64::INFINITY), (0, 0.0, 0.25), (1, 0.25, 0.5)]);
        assert_eq!(betti_numbers(&d, 0.0), [2, 0, 0]);
        assert_eq!(betti_numbers(&d, 0.25), [1, 1, 0]);
        assert_eq!(betti_numbers(&d, 0.5), [1, 0, 0]);
    }
}
