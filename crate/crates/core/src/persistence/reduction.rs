use super::{Attribution, FilteredComplex, PersistenceDiagram, PersistencePair};
use crate::error::Result;
use crate::par::Execution;

/// Symmetric difference of two ascending index lists.
fn xor_into(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Standard column reduction of the boundary matrix; returns, for every
/// column, the row it is paired with (its lowest nonzero after reduction).
pub(crate) fn reduce(boundaries: Vec<Vec<usize>>) -> Vec<Option<usize>> {
    let n = boundaries.len();
    let mut reduced: Vec<Vec<usize>> = boundaries;
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut low: Vec<Option<usize>> = vec![None; n];
    let mut scratch = Vec::new();
    for j in 0..n {
        while let Some(&pivot) = reduced[j].last() {
            match owner[pivot] {
                Some(k) => {
                    xor_into(&reduced[j], &reduced[k], &mut scratch);
                    std::mem::swap(&mut reduced[j], &mut scratch);
                }
                None => {
                    owner[pivot] = Some(j);
                    low[j] = Some(pivot);
                    break;
                }
            }
        }
    }
    low
}

/// Builds pairs from a pairing `death column -> birth row`.
pub(crate) fn diagram_from_pairing(fc: &FilteredComplex, low: &[Option<usize>]) -> PersistenceDiagram {
    let n = fc.len();
    let mut death_of: Vec<Option<usize>> = vec![None; n];
    let mut negative = vec![false; n];
    for (j, l) in low.iter().enumerate() {
        if let Some(i) = *l {
            death_of[i] = Some(j);
            negative[j] = true;
        }
    }
    let vertex_of = |i: usize| match fc.attribution() {
        Attribution::LowerStar(v) => Some(v[i]),
        _ => None,
    };
    let mut pairs = Vec::new();
    for i in 0..n {
        if negative[i] {
            continue;
        }
        let s = &fc.simplices()[i];
        let death_index = death_of[i];
        pairs.push(PersistencePair {
            dim: s.dim(),
            birth: fc.values()[i],
            death: death_index.map_or(f64::INFINITY, |j| fc.values()[j]),
            birth_simplex: Some(s.clone()),
            death_simplex: death_index.map(|j| fc.simplices()[j].clone()),
            birth_index: Some(i),
            death_index,
            birth_vertex: vertex_of(i),
            death_vertex: death_index.and_then(vertex_of),
        });
    }
    PersistenceDiagram { pairs, max_value: fc.max_value() }
}

/// Persistence diagram of a filtered complex by Z/2 column reduction.
/// Zero-persistence pairs are kept.
pub fn compute_persistence(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    let low = reduce(fc.boundaries().to_vec());
    Ok(diagram_from_pairing(fc, &low))
}

/// Diagrams of independent complexes, in input order.
pub fn compute_persistence_batch(complexes: &[FilteredComplex], exec: Execution) -> Vec<Result<PersistenceDiagram>> {
    exec.map(complexes, compute_persistence)
}
