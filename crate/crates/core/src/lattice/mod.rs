//! Even unimodular lattices and exact representation numbers.
//!
//! The two rank-16 even unimodular lattices are built from the classical
//! D_n-plus-glue description: D_n is the even-coordinate-sum sublattice of
//! Z^n, and the glue vector is h = (1/2, ..., 1/2). E8 = D8 u (D8 + h) and
//! D16+ = D16 u (D16 + h16). Representation numbers N(S, T) = #{G integer
//! m x g : G^t S G = T} are the Fourier coefficients of the genus-g theta
//! series of S; all counting here is exact integer arithmetic.

pub mod counting;
pub mod enumerate;
mod exact;
pub mod tables;

use thiserror::Error;

pub use counting::{representation_count, EnumLimits};
pub use enumerate::short_vectors;
pub use tables::{coefficient_table, CoefficientEntry, CoefficientTable};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("diagonal entry {0} is odd; even lattices need even norms")]
    OddDiagonal(i64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not positive semi-definite")]
    NotPositiveSemiDefinite,
    #[error("genus {0} out of supported range 1..=4")]
    GenusOutOfRange(usize),
    #[error("norm bound {0} must be a nonnegative even integer")]
    BadNormBound(i64),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("requested tolerance unreachable under the norm ceiling: {0}")]
    CutoffInfeasible(String),
    #[error("conditioning floor violated: {0}")]
    IllConditioned(String),
}

/// Gram matrix of an even positive-definite integral lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl GramMatrix {
    pub fn new(dim: usize, entries: Vec<i64>) -> Result<Self, LatticeError> {
        assert!(dim >= 1 && entries.len() == dim * dim);
        for i in 0..dim {
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
            if entries[i * dim + i] % 2 != 0 {
                return Err(LatticeError::OddDiagonal(entries[i * dim + i]));
            }
        }
        if !exact::is_positive_definite(dim, &entries) {
            return Err(LatticeError::NotPositiveDefinite);
        }
        Ok(GramMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn det(&self) -> i128 {
        exact::bareiss_det(self.dim, &self.entries)
    }

    /// v^t S w for integer vectors.
    pub fn inner(&self, v: &[i64], w: &[i64]) -> i64 {
        let n = self.dim;
        let mut acc = 0i64;
        for i in 0..n {
            let mut row = 0i64;
            for j in 0..n {
                row += self.entries[i * n + j] * w[j];
            }
            acc += v[i] * row;
        }
        acc
    }

    pub fn norm(&self, v: &[i64]) -> i64 {
        self.inner(v, v)
    }

    /// Diagonal of the adjugate: det * (S^-1)_ii, used for exact coordinate
    /// boxes when enumerating by brute force.
    pub fn adjugate_diagonal(&self) -> Vec<i128> {
        (0..self.dim)
            .map(|i| {
                let idx: Vec<usize> = (0..self.dim).filter(|&k| k != i).collect();
                exact::principal_minor(self.dim, &self.entries, &idx)
            })
            .collect()
    }
}

/// Gram matrix computed from basis rows given in doubled coordinates
/// (so that glue vectors with half-integer entries stay integral).
fn gram_from_doubled_basis(rows: &[Vec<i64>]) -> GramMatrix {
    let m = rows.len();
    let mut entries = vec![0i64; m * m];
    for i in 0..m {
        for j in 0..m {
            let dot: i64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            assert_eq!(dot % 4, 0, "basis vectors must pair integrally");
            entries[i * m + j] = dot / 4;
        }
    }
    GramMatrix::new(m, entries).expect("construction yields a valid even Gram matrix")
}

/// The E8 root lattice: D8 glued with the all-halves vector.
///
/// Basis (rows, standard coordinates): e1+e2, then e_i - e_{i-1} for
/// i = 2..=7, then (1/2, ..., 1/2). Determinant 1, minimal norm 2.
pub fn gram_e8() -> GramMatrix {
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(8);
    let mut r = vec![0i64; 8];
    r[0] = 2;
    r[1] = 2;
    rows.push(r);
    for i in 1..7 {
        let mut r = vec![0i64; 8];
        r[i] = 2;
        r[i - 1] = -2;
        rows.push(r);
    }
    rows.push(vec![1; 8]);
    gram_from_doubled_basis(&rows)
}

/// The even unimodular lattice D16+: D16 glued with the all-halves vector.
///
/// Basis (rows, standard coordinates): e1+e2, then e_i - e_{i-1} for
/// i = 2..=15, then (1/2, ..., 1/2). Determinant 1, minimal norm 2; not
/// isometric to E8 + E8, witnessed by a rank-4 representation-number
/// difference.
pub fn gram_d16_plus() -> GramMatrix {
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(16);
    let mut r = vec![0i64; 16];
    r[0] = 2;
    r[1] = 2;
    rows.push(r);
    for i in 1..15 {
        let mut r = vec![0i64; 16];
        r[i] = 2;
        r[i - 1] = -2;
        rows.push(r);
    }
    rows.push(vec![1; 16]);
    gram_from_doubled_basis(&rows)
}

/// Block-diagonal sum of two Gram matrices.
pub fn direct_sum(s1: &GramMatrix, s2: &GramMatrix) -> GramMatrix {
    let m = s1.dim + s2.dim;
    let mut entries = vec![0i64; m * m];
    for i in 0..s1.dim {
        for j in 0..s1.dim {
            entries[i * m + j] = s1.entry(i, j);
        }
    }
    for i in 0..s2.dim {
        for j in 0..s2.dim {
            entries[(s1.dim + i) * m + (s1.dim + j)] = s2.entry(i, j);
        }
    }
    GramMatrix::new(m, entries).expect("direct sum of valid Gram matrices is valid")
}

/// Even symmetric positive semi-definite target matrix `T` (the exponent
/// matrix of one Fourier term of a genus-g theta series).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvenSymMatrix {
    g: usize,
    entries: Vec<i64>,
}

impl EvenSymMatrix {
    pub fn new(g: usize, entries: Vec<i64>) -> Result<Self, LatticeError> {
        if g < 1 || g > 4 {
            return Err(LatticeError::GenusOutOfRange(g));
        }
        assert_eq!(entries.len(), g * g);
        for i in 0..g {
            for j in 0..i {
                if entries[i * g + j] != entries[j * g + i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
            if entries[i * g + i] % 2 != 0 {
                return Err(LatticeError::OddDiagonal(entries[i * g + i]));
            }
        }
        if !exact::is_psd_symmetric(g, &entries) {
            return Err(LatticeError::NotPositiveSemiDefinite);
        }
        Ok(EvenSymMatrix { g, entries })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.g + j]
    }

    pub fn trace(&self) -> i64 {
        (0..self.g).map(|i| self.entry(i, i)).sum()
    }

    pub fn rank(&self) -> usize {
        exact::rank(self.g, &self.entries)
    }

    /// The D4 root-lattice Gram matrix: diagonal 2 with a star of -1's.
    pub fn d4_gram() -> EvenSymMatrix {
        EvenSymMatrix::new(
            4,
            vec![2, -1, -1, -1, -1, 2, 0, 0, -1, 0, 2, 0, -1, 0, 0, 2],
        )
        .expect("D4 Gram matrix is even psd")
    }
}

/// All even psd g x g matrices with diagonal entries <= `max_diag` and
/// off-diagonal entries within the Cauchy-Schwarz box, in lexicographic order
/// of their row-major entry vectors.
pub fn enumerate_targets(g: usize, max_diag: i64) -> Result<Vec<EvenSymMatrix>, LatticeError> {
    if g < 1 || g > 4 {
        return Err(LatticeError::GenusOutOfRange(g));
    }
    if max_diag < 0 || max_diag % 2 != 0 {
        return Err(LatticeError::BadNormBound(max_diag));
    }
    let mut out = Vec::new();
    let mut entries = vec![0i64; g * g];
    extend_targets(g, max_diag, 0, &mut entries, &mut out);
    out.sort_by(|a, b| a.entries.cmp(&b.entries));
    Ok(out)
}

/// Grow column k (diagonal plus the off-diagonal entries above it), pruning
/// whenever the leading block stops being psd.
fn extend_targets(g: usize, max_diag: i64, k: usize, entries: &mut Vec<i64>, out: &mut Vec<EvenSymMatrix>) {
    if k == g {
        out.push(EvenSymMatrix {
            g,
            entries: entries.clone(),
        });
        return;
    }
    let mut diag = 0;
    while diag <= max_diag {
        entries[k * g + k] = diag;
        let mut offs = vec![0i64; k];
        fill_offdiag(g, max_diag, k, 0, diag, &mut offs, entries, out);
        entries[k * g + k] = 0;
        diag += 2;
    }
}

fn fill_offdiag(
    g: usize,
    max_diag: i64,
    k: usize,
    i: usize,
    diag: i64,
    offs: &mut Vec<i64>,
    entries: &mut Vec<i64>,
    out: &mut Vec<EvenSymMatrix>,
) {
    if i == k {
        // leading (k+1) x (k+1) block must be psd before recursing deeper
        let dim = k + 1;
        let mut block = vec![0i64; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                block[a * dim + b] = entries[a * g + b];
            }
        }
        if exact::is_psd_symmetric(dim, &block) {
            extend_targets(g, max_diag, k + 1, entries, out);
        }
        return;
    }
    let bound = exact::isqrt(entries[i * g + i] * diag);
    for t in -bound..=bound {
        entries[i * g + k] = t;
        entries[k * g + i] = t;
        fill_offdiag(g, max_diag, k, i + 1, diag, offs, entries, out);
    }
    entries[i * g + k] = 0;
    entries[k * g + i] = 0;
}

/// Numerical value of the genus-g theta series of S at a Siegel point, by
/// summing N(S, T) exp(pi i Tr(T tau)) until the discarded tail is below
/// `tol`. The tail is bounded with the decay surrogate
/// exp(-pi lambda_min(Im tau) Tr(T) / g) and a packing-ball bound on shell
/// sizes, so the cutoff is conservative.
pub fn lattice_theta_value(
    s: &GramMatrix,
    tau: &crate::theta::SiegelPoint,
    tol: f64,
    limits: &EnumLimits,
) -> Result<num_complex::Complex64, LatticeError> {
    use num_complex::Complex64;
    let g = tau.genus();
    if g > 4 {
        return Err(LatticeError::GenusOutOfRange(g));
    }
    let lambda = tau.min_im_eigenvalue();
    if lambda < 0.05 {
        return Err(LatticeError::IllConditioned(format!(
            "lambda_min(Im tau) = {lambda:.3e} below floor 0.05"
        )));
    }
    // x = per-unit-trace decay; shells of norm n contribute at most
    // (sqrt(2n) + 1)^m x^n each across any one diagonal slot.
    let x = (-std::f64::consts::PI * lambda / g as f64).exp();
    let m = s.dim() as f64;
    let shell_bound = |n: i64| -> f64 { ((2.0 * n as f64).sqrt() + 1.0).powf(m) };
    let mut max_diag = 2i64;
    loop {
        // tail over targets with some diagonal entry > max_diag; bound by
        // g * (sum over n > max_diag of shell_bound(n) x^n) * (full series)^(g-1)
        let full: f64 = (0..=400).map(|k| shell_bound(2 * k) * x.powi(2 * k as i32)).sum();
        let mut tail = 0.0;
        let mut n = max_diag + 2;
        loop {
            let t = shell_bound(n) * x.powi(n as i32);
            tail += t;
            if t < tol * 1e-6 && n > max_diag + 40 {
                break;
            }
            n += 2;
            if n > 4000 {
                return Err(LatticeError::CutoffInfeasible(
                    "tail bound does not converge at this point".into(),
                ));
            }
        }
        tail *= g as f64 * full.powi(g as i32 - 1);
        if tail < tol {
            break;
        }
        max_diag += 2;
        if max_diag > limits.max_diag_ceiling {
            return Err(LatticeError::CutoffInfeasible(format!(
                "tol {tol:.1e} needs diagonal beyond ceiling {}",
                limits.max_diag_ceiling
            )));
        }
    }
    let targets = enumerate_targets(g, max_diag)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for t in &targets {
        let n = representation_count(s, t, limits)?;
        if n == 0 {
            continue;
        }
        // Tr(T tau)
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                tr += Complex64::new(t.entry(i, j) as f64, 0.0) * tau.entry(j, i);
            }
        }
        let arg = Complex64::new(0.0, std::f64::consts::PI) * tr;
        acc += Complex64::new(n as f64, 0.0) * arg.exp();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_gram_is_unimodular_even() {
        let s = gram_e8();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.det(), 1);
        for i in 0..8 {
            assert_eq!(s.entry(i, i) % 2, 0);
        }
    }

    #[test]
    fn d16_plus_gram_is_unimodular_even() {
        let s = gram_d16_plus();
        assert_eq!(s.dim(), 16);
        assert_eq!(s.det(), 1);
        for i in 0..16 {
            assert_eq!(s.entry(i, i) % 2, 0);
        }
    }

    #[test]
    fn direct_sum_block_determinant() {
        let s = direct_sum(&gram_e8(), &gram_e8());
        assert_eq!(s.dim(), 16);
        assert_eq!(s.det(), 1);
    }

    #[test]
    fn gram_rejects_bad_input() {
        assert!(matches!(
            GramMatrix::new(2, vec![2, 1, 0, 2]),
            Err(LatticeError::NotSymmetric)
        ));
        assert!(matches!(
            GramMatrix::new(2, vec![1, 0, 0, 2]),
            Err(LatticeError::OddDiagonal(1))
        ));
        assert!(matches!(
            GramMatrix::new(2, vec![2, 3, 3, 2]),
            Err(LatticeError::NotPositiveDefinite)
        ));
    }

    #[test]
    fn targets_genus1() {
        let ts = enumerate_targets(1, 4).unwrap();
        let vals: Vec<i64> = ts.iter().map(|t| t.entry(0, 0)).collect();
        assert_eq!(vals, vec![0, 2, 4]);
    }

    #[test]
    fn targets_genus2_contains_expected() {
        let ts = enumerate_targets(2, 2).unwrap();
        let has = |e: &[i64]| ts.iter().any(|t| t.entries() == e);
        assert!(has(&[2, 0, 0, 2]));
        assert!(has(&[2, 1, 1, 2]));
        assert!(has(&[2, 2, 2, 2]));
        assert!(!has(&[2, 3, 3, 2]));
        // every diagonal entry is in {0, 2} and every matrix is psd
        for t in &ts {
            assert!(t.entry(0, 0) == 0 || t.entry(0, 0) == 2);
            assert!(t.entry(0, 1).abs() <= 2);
        }
    }

    #[test]
    fn targets_genus4_contains_d4() {
        let ts = enumerate_targets(4, 2).unwrap();
        let d4 = EvenSymMatrix::d4_gram();
        assert!(ts.iter().any(|t| *t == d4));
        assert_eq!(d4.rank(), 4);
        assert_eq!(d4.trace(), 8);
    }

    #[test]
    fn rank_of_degenerate_targets() {
        let t = EvenSymMatrix::new(2, vec![2, 2, 2, 2]).unwrap();
        assert_eq!(t.rank(), 1);
        let z = EvenSymMatrix::new(3, vec![0; 9]).unwrap();
        assert_eq!(z.rank(), 0);
    }
}
