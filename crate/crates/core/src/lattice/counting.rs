//! Exact representation numbers N(S, T) by column-by-column extension over a
//! short-vector table. Each new column must hit the prescribed inner products
//! with every earlier column; candidates come from a per-first-column index
//! keyed by (norm, inner product), the rest of the profile is verified
//! directly. Counts include all sign and order choices, matching the Fourier
//! coefficients of the theta series; no automorphism quotient is taken.

use std::collections::HashMap;

use super::enumerate::VectorTable;
use super::{short_vectors, EvenSymMatrix, GramMatrix, LatticeError};

/// Resource ceilings for the exact enumerations. `max_ops` counts candidate
/// operations (vector visits and inner-product checks); exceeding it signals
/// an infeasible cutoff, not a bug.
#[derive(Debug, Clone)]
pub struct EnumLimits {
    pub max_ops: u64,
    pub max_vectors: usize,
    pub max_diag_ceiling: i64,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_ops: 10_000_000,
            max_vectors: 4_000_000,
            max_diag_ceiling: 16,
        }
    }
}

impl EnumLimits {
    pub fn generous() -> Self {
        EnumLimits {
            max_ops: 2_000_000_000,
            max_vectors: 40_000_000,
            max_diag_ceiling: 48,
        }
    }
}

/// N(S, T) = #{G in Mat(m, g; Z) : G^t S G = T}, exactly.
pub fn representation_count(
    s: &GramMatrix,
    t: &EvenSymMatrix,
    limits: &EnumLimits,
) -> Result<u128, LatticeError> {
    let g = t.genus();
    let max_diag = (0..g).map(|j| t.entry(j, j)).max().unwrap();
    if max_diag > limits.max_diag_ceiling {
        return Err(LatticeError::ResourceLimit(format!(
            "diagonal {} beyond ceiling {}",
            max_diag, limits.max_diag_ceiling
        )));
    }
    // a zero-norm column must pair to zero with everything
    for j in 0..g {
        if t.entry(j, j) == 0 && (0..g).any(|i| t.entry(i, j) != 0) {
            return Ok(0);
        }
    }
    if max_diag == 0 {
        return Ok(1);
    }

    let table = short_vectors(s, max_diag, limits)?;
    let mut ops = 0u64;
    let count = Extension {
        s,
        t,
        g,
        table: &table,
        limits,
    }
    .run(&mut ops)?;
    Ok(count)
}

struct Extension<'a> {
    s: &'a GramMatrix,
    t: &'a EvenSymMatrix,
    g: usize,
    table: &'a VectorTable,
    limits: &'a EnumLimits,
}

impl Extension<'_> {
    fn run(&self, ops: &mut u64) -> Result<u128, LatticeError> {
        // first column with positive norm anchors the keyed index
        let dim = self.s.dim();
        let Some(first) = (0..self.g).find(|&j| self.t.entry(j, j) > 0) else {
            return Ok(1);
        };

        let mut total = 0u128;
        let t11 = self.t.entry(first, first);
        let mut v1 = vec![0i64; dim];
        let reps: Vec<&[i32]> = self.table.reps(t11).collect();
        for rep in reps {
            for sign in [1i64, -1] {
                for (i, &c) in rep.iter().enumerate() {
                    v1[i] = sign * c as i64;
                }
                self.bump(ops, 1)?;
                let index = self.build_index(&v1, first, ops)?;
                let mut cols: Vec<Vec<i64>> = vec![Vec::new(); self.g];
                cols[first] = v1.clone();
                total += self.extend(first, &mut cols, &index, ops)?;
            }
        }
        Ok(total)
    }

    /// Bucket the signed shells by inner product against the anchor column.
    fn build_index(
        &self,
        v1: &[i64],
        first: usize,
        ops: &mut u64,
    ) -> Result<HashMap<(i64, i64), Vec<Vec<i64>>>, LatticeError> {
        let mut index: HashMap<(i64, i64), Vec<Vec<i64>>> = HashMap::new();
        let mut norms: Vec<i64> = (0..self.g)
            .filter(|&j| j != first)
            .map(|j| self.t.entry(j, j))
            .filter(|&n| n > 0)
            .collect();
        norms.sort_unstable();
        norms.dedup();
        for n in norms {
            for rep in self.table.reps(n) {
                self.bump(ops, 1)?;
                let w: Vec<i64> = rep.iter().map(|&c| c as i64).collect();
                let ip = self.s.inner(v1, &w);
                index.entry((n, ip)).or_default().push(w.clone());
                index
                    .entry((n, -ip))
                    .or_default()
                    .push(w.iter().map(|c| -c).collect());
            }
        }
        Ok(index)
    }

    fn extend(
        &self,
        anchor: usize,
        cols: &mut Vec<Vec<i64>>,
        index: &HashMap<(i64, i64), Vec<Vec<i64>>>,
        ops: &mut u64,
    ) -> Result<u128, LatticeError> {
        let Some(j) = (0..self.g).find(|&j| j != anchor && cols[j].is_empty() && self.t.entry(j, j) > 0)
        else {
            return Ok(1);
        };
        let mut total = 0u128;
        let key = (self.t.entry(j, j), self.t.entry(anchor, j));
        let Some(cands) = index.get(&key) else {
            return Ok(0);
        };
        'cand: for w in cands {
            self.bump(ops, 1)?;
            for i in 0..self.g {
                if i == anchor || i == j || cols[i].is_empty() {
                    continue;
                }
                if self.s.inner(&cols[i], w) != self.t.entry(i, j) {
                    continue 'cand;
                }
            }
            cols[j] = w.clone();
            total += self.extend(anchor, cols, index, ops)?;
            cols[j] = Vec::new();
        }
        Ok(total)
    }

    fn bump(&self, ops: &mut u64, n: u64) -> Result<(), LatticeError> {
        *ops += n;
        if *ops > self.limits.max_ops {
            return Err(LatticeError::ResourceLimit(format!(
                "representation counting exceeded {} candidate operations",
                self.limits.max_ops
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, gram_e8, EvenSymMatrix};

    fn t(g: usize, e: &[i64]) -> EvenSymMatrix {
        EvenSymMatrix::new(g, e.to_vec()).unwrap()
    }

    #[test]
    fn zero_target_counts_one() {
        let n = representation_count(&gram_e8(), &t(1, &[0]), &EnumLimits::default()).unwrap();
        assert_eq!(n, 1);
    }

    #[test]
    fn e8_roots_as_rank1_representations() {
        let n = representation_count(&gram_e8(), &t(1, &[2]), &EnumLimits::default()).unwrap();
        assert_eq!(n, 240);
    }

    #[test]
    fn zero_column_with_nonzero_pairing_is_impossible() {
        let n =
            representation_count(&gram_e8(), &t(2, &[2, 0, 0, 0]), &EnumLimits::default()).unwrap();
        assert_eq!(n, 240, "second column forced to zero");
        // [[2,1],[1,0]] is not psd, so it cannot even be constructed
        assert!(EvenSymMatrix::new(2, vec![2, 1, 1, 0]).is_err());
    }

    #[test]
    fn orthogonal_root_pairs_match_between_rank16_lattices() {
        let e8e8 = direct_sum(&gram_e8(), &gram_e8());
        let d16 = crate::lattice::gram_d16_plus();
        let t2 = t(2, &[2, 0, 0, 2]);
        let limits = EnumLimits {
            max_ops: 200_000_000,
            ..EnumLimits::default()
        };
        let a = representation_count(&e8e8, &t2, &limits).unwrap();
        let b = representation_count(&d16, &t2, &limits).unwrap();
        assert_eq!(a, 175_680);
        assert_eq!(b, 175_680);
    }

    #[test]
    fn adjacent_root_pairs_in_e8() {
        // pairs of roots with inner product 1: each root has 56 neighbours
        let n = representation_count(&gram_e8(), &t(2, &[2, 1, 1, 2]), &EnumLimits::default())
            .unwrap();
        assert_eq!(n, 240 * 56);
    }
}
