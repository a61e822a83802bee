//! Reduction-free persistence from ranks of boundary submatrices.
//!
//! For positions `i ≤ j` in the filtration order, the persistent Betti number
//! is `β_p^{i,j} = z_p(i) − b_p(i,j)` where `z_p(i)` is the cycle rank of the
//! first `i + 1` simplices and `b_p(i,j) = rank ∂_{p+1}[·, ≤j] − rank
//! ∂_{p+1}[>i, ≤j]` counts the boundaries of `K_j` that live in `K_i`. The
//! multiplicity of the pair `(i, j)` follows by inclusion–exclusion.

use std::collections::HashMap;

use super::reduction::diagram_from_pairing;
use super::{FilteredComplex, PersistenceDiagram};
use crate::error::{Result, TopoError};

pub const ORACLE_MAX_SIMPLICES: usize = 200;

/// Incremental GF(2) row-echelon basis over bit vectors.
struct Basis {
    by_pivot: HashMap<usize, Vec<u64>>,
}

impl Basis {
    fn new() -> Self {
        Self { by_pivot: HashMap::new() }
    }

    fn highest_bit(v: &[u64]) -> Option<usize> {
        v.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(k, &w)| 64 * k + 63 - w.leading_zeros() as usize)
    }

    /// Adds `v`; returns whether it was independent of the basis.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        while let Some(h) = Self::highest_bit(&v) {
            match self.by_pivot.get(&h) {
                Some(b) => {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
                None => {
                    self.by_pivot.insert(h, v);
                    return true;
                }
            }
        }
        false
    }
}

/// `rank[j]` = rank of the boundary columns at positions `≤ j` whose
/// simplices have dimension `col_dim`, keeping only rows `> row_floor`.
fn prefix_ranks(boundaries: &[Vec<usize>], dims: &[usize], col_dim: usize, row_floor: isize) -> Vec<usize> {
    let n = boundaries.len();
    let words = n.div_ceil(64);
    let mut basis = Basis::new();
    let mut rank = 0;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        if dims[j] == col_dim {
            let mut v = vec![0u64; words];
            for &r in &boundaries[j] {
                if r as isize > row_floor {
                    v[r / 64] ^= 1 << (r % 64);
                }
            }
            if basis.insert(v) {
                rank += 1;
            }
        }
        out.push(rank);
    }
    out
}

/// Persistence diagram from persistent Betti numbers. Slow; intended as an
/// independent check of [`compute_persistence`](super::compute_persistence).
pub fn betti_rank_oracle(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    let n = fc.len();
    if n > ORACLE_MAX_SIMPLICES {
        return Err(TopoError::ComplexTooLarge(n, ORACLE_MAX_SIMPLICES));
    }
    let boundaries = fc.boundaries();
    let dims: Vec<usize> = fc.simplices().iter().map(|s| s.dim()).collect();
    let top = dims.iter().copied().max().unwrap_or(0);
    let mut low: Vec<Option<usize>> = vec![None; n];

    for p in 0..=top {
        // cycle ranks z_p(i) for every prefix
        let full_p = prefix_ranks(boundaries, &dims, p, -1);
        let mut count = 0;
        let z: Vec<isize> = (0..n)
            .map(|i| {
                if dims[i] == p {
                    count += 1;
                }
                count as isize - if p == 0 { 0 } else { full_p[i] as isize }
            })
            .collect();
        let full_next = prefix_ranks(boundaries, &dims, p + 1, -1);
        // rows > i only change at p-simplices, so cache per floor
        let mut floors: HashMap<isize, Vec<usize>> = HashMap::new();
        let mut floor_of = vec![-1isize; n];
        let mut last = -1isize;
        for i in 0..n {
            if dims[i] == p {
                last = i as isize;
            }
            floor_of[i] = last;
        }
        let mut restricted = |i: isize| -> Vec<usize> {
            let key = if i < 0 { -1 } else { floor_of[i as usize] };
            floors.entry(key).or_insert_with(|| prefix_ranks(boundaries, &dims, p + 1, key)).clone()
        };
        let mut beta_table: HashMap<isize, Vec<isize>> = HashMap::new();
        let mut beta = |i: isize, j: usize| -> isize {
            if i < 0 {
                return 0;
            }
            let row = beta_table.entry(i).or_insert_with(|| {
                let r = restricted(i);
                (0..n).map(|jj| z[i as usize] - (full_next[jj] as isize - r[jj] as isize)).collect()
            });
            row[j]
        };
        for i in (0..n).filter(|&i| dims[i] == p) {
            let ii = i as isize;
            for j in (i + 1..n).filter(|&j| dims[j] == p + 1) {
                let mu = beta(ii, j - 1) - beta(ii, j) - beta(ii - 1, j - 1) + beta(ii - 1, j);
                debug_assert!(mu == 0 || mu == 1, "multiplicity {mu} at ({i}, {j})");
                if mu == 1 {
                    low[j] = Some(i);
                }
            }
        }
    }
    Ok(diagram_from_pairing(fc, &low))
}
