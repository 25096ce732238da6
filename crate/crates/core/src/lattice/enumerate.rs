//! Short-vector enumeration under the quadratic-completion (Cholesky) form of
//! the Gram matrix, Fincke-Pohst style. Floating bounds are inflated by a
//! relative epsilon and every accepted vector is re-checked with exact integer
//! arithmetic, so the tables are exact.

use std::collections::BTreeMap;

use super::{EnumLimits, GramMatrix, LatticeError};

/// Exhaustive table of nonzero short vectors, one representative per +-pair,
/// keyed by norm. The representative has its last nonzero coordinate positive;
/// `expand_signs` recovers both elements of the pair.
#[derive(Debug, Clone)]
pub struct VectorTable {
    dim: usize,
    max_norm: i64,
    by_norm: BTreeMap<i64, Vec<i32>>,
}

impl VectorTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_norm(&self) -> i64 {
        self.max_norm
    }

    pub fn norms(&self) -> impl Iterator<Item = i64> + '_ {
        self.by_norm.keys().copied()
    }

    /// Representatives of the +-pairs with the given norm.
    pub fn reps(&self, norm: i64) -> impl Iterator<Item = &[i32]> {
        self.by_norm
            .get(&norm)
            .map(|v| v.chunks_exact(self.dim))
            .into_iter()
            .flatten()
    }

    pub fn rep_count(&self, norm: i64) -> usize {
        self.by_norm.get(&norm).map_or(0, |v| v.len() / self.dim)
    }

    /// Number of lattice vectors of the given norm (both signs).
    pub fn vector_count(&self, norm: i64) -> u64 {
        if norm == 0 {
            return 1;
        }
        2 * self.rep_count(norm) as u64
    }

    pub fn total_reps(&self) -> usize {
        self.by_norm.values().map(|v| v.len() / self.dim).sum()
    }
}

/// All nonzero vectors v with v^t S v <= max_norm, one per +-pair.
pub fn short_vectors(
    s: &GramMatrix,
    max_norm: i64,
    limits: &EnumLimits,
) -> Result<VectorTable, LatticeError> {
    if max_norm < 0 || max_norm % 2 != 0 {
        return Err(LatticeError::BadNormBound(max_norm));
    }
    let n = s.dim();
    let mut by_norm: BTreeMap<i64, Vec<i32>> = BTreeMap::new();
    if max_norm == 0 {
        return Ok(VectorTable {
            dim: n,
            max_norm,
            by_norm,
        });
    }

    // quadratic completion: S = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2
    let mut q = vec![0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = s.entry(i, j) as f64;
        }
    }
    for i in 0..n {
        let d = q[i * n + i];
        if !(d > 0.0) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        for j in i + 1..n {
            q[i * n + j] /= d;
        }
        for j in i + 1..n {
            for k in j..n {
                q[j * n + k] -= d * q[i * n + j] * q[i * n + k];
            }
        }
    }

    let budget = max_norm as f64 * (1.0 + 1e-9) + 1e-9;
    let mut x = vec![0i64; n];
    let mut u = vec![0f64; n]; // u[i] = sum_{j>i} mu_ij x_j
    let mut rem = vec![0f64; n]; // remaining budget at level i
    let mut ops = 0u64;
    let mut stored = 0usize;

    // depth-first from the last coordinate; canonical sign convention:
    // while all deeper coordinates are zero, the current one stays >= 0
    fn descend(
        i: usize,
        all_zero_above: bool,
        n: usize,
        q: &[f64],
        budget_i: f64,
        x: &mut [i64],
        u: &mut [f64],
        rem: &mut [f64],
        s: &GramMatrix,
        max_norm: i64,
        by_norm: &mut BTreeMap<i64, Vec<i32>>,
        ops: &mut u64,
        stored: &mut usize,
        limits: &EnumLimits,
    ) -> Result<(), LatticeError> {
        let d = q[i * n + i];
        let mut ui = 0f64;
        for j in i + 1..n {
            ui += q[i * n + j] * x[j] as f64;
        }
        u[i] = ui;
        let half = (budget_i / d).sqrt();
        let lo = if all_zero_above {
            0
        } else {
            (-half - ui).ceil() as i64
        };
        let hi = (half - ui).floor() as i64;
        for xi in lo..=hi {
            *ops += 1;
            if *ops > limits.max_ops {
                return Err(LatticeError::ResourceLimit(format!(
                    "short-vector enumeration exceeded {} operations",
                    limits.max_ops
                )));
            }
            x[i] = xi;
            let t = xi as f64 + ui;
            let used = d * t * t;
            if used > budget_i + 1e-9 {
                continue;
            }
            if i == 0 {
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                let norm = s.norm(x);
                if norm > 0 && norm <= max_norm {
                    let bucket = by_norm.entry(norm).or_default();
                    bucket.extend(x.iter().map(|&v| v as i32));
                    *stored += 1;
                    if *stored > limits.max_vectors {
                        return Err(LatticeError::ResourceLimit(format!(
                            "short-vector table exceeded {} representatives",
                            limits.max_vectors
                        )));
                    }
                }
            } else {
                rem[i] = budget_i - used;
                descend(
                    i - 1,
                    all_zero_above && xi == 0,
                    n,
                    q,
                    budget_i - used,
                    x,
                    u,
                    rem,
                    s,
                    max_norm,
                    by_norm,
                    ops,
                    stored,
                    limits,
                )?;
            }
        }
        x[i] = 0;
        Ok(())
    }

    descend(
        n - 1,
        true,
        n,
        &q,
        budget,
        &mut x,
        &mut u,
        &mut rem,
        s,
        max_norm,
        &mut by_norm,
        &mut ops,
        &mut stored,
        limits,
    )?;

    // deterministic order inside each norm bucket
    for (_, bucket) in by_norm.iter_mut() {
        let mut rows: Vec<Vec<i32>> = bucket.chunks_exact(n).map(|c| c.to_vec()).collect();
        rows.sort();
        bucket.clear();
        for r in rows {
            bucket.extend(r);
        }
    }

    Ok(VectorTable {
        dim: n,
        max_norm,
        by_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gram_e8, EnumLimits};

    #[test]
    fn empty_table_at_norm_zero() {
        let t = short_vectors(&gram_e8(), 0, &EnumLimits::default()).unwrap();
        assert_eq!(t.total_reps(), 0);
        assert_eq!(t.vector_count(0), 1);
    }

    #[test]
    fn z2_shells() {
        let s = crate::lattice::GramMatrix::new(2, vec![2, 0, 0, 2]).unwrap();
        let t = short_vectors(&s, 8, &EnumLimits::default()).unwrap();
        // scaled Z^2: norm 2k <-> |x|^2 = k; r2(1) = 4, r2(2) = 4, r2(4) = 4
        assert_eq!(t.vector_count(2), 4);
        assert_eq!(t.vector_count(4), 4);
        assert_eq!(t.vector_count(6), 0);
        assert_eq!(t.vector_count(8), 4);
    }

    #[test]
    fn e8_roots() {
        let t = short_vectors(&gram_e8(), 2, &EnumLimits::default()).unwrap();
        assert_eq!(t.rep_count(2), 120);
        assert_eq!(t.vector_count(2), 240);
    }

    #[test]
    fn resource_limit_triggers() {
        let limits = EnumLimits {
            max_ops: 50,
            ..EnumLimits::default()
        };
        let err = short_vectors(&gram_e8(), 8, &limits).unwrap_err();
        assert!(matches!(err, LatticeError::ResourceLimit(_)));
    }
}
