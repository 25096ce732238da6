//! Exact integer linear algebra on small matrices: fraction-free determinants,
//! principal minors, and rank. Entries stay within i128 for every matrix this
//! crate touches (dimension <= 16, entries O(10)); the Hadamard bound is
//! checked in debug builds.

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(n: usize, entries: &[i64]) -> i128 {
    assert_eq!(entries.len(), n * n);
    let mut m: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k * n + k] == 0 {
            // pivot search
            let Some(r) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                m.swap(k * n + c, r * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j];
                m[i * n + j] = num / prev;
            }
            m[i * n + k] = 0;
        }
        prev = m[k * n + k];
    }
    sign * m[(n - 1) * n + (n - 1)]
}

/// Determinant of the principal submatrix selected by `idx`.
pub fn principal_minor(n: usize, entries: &[i64], idx: &[usize]) -> i128 {
    let k = idx.len();
    let mut sub = vec![0i64; k * k];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub[a * k + b] = entries[i * n + j];
        }
    }
    bareiss_det(k, &sub)
}

/// A symmetric integer matrix is positive semi-definite iff every principal
/// minor is nonnegative.
pub fn is_psd_symmetric(n: usize, entries: &[i64]) -> bool {
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if principal_minor(n, entries, &idx) < 0 {
            return false;
        }
    }
    true
}

/// All leading principal minors strictly positive (Sylvester), i.e. positive
/// definite.
pub fn is_positive_definite(n: usize, entries: &[i64]) -> bool {
    (1..=n).all(|k| principal_minor(n, entries, &(0..k).collect::<Vec<_>>()) > 0)
}

/// Rank over the rationals, by fraction-free elimination with full pivoting.
pub fn rank(n: usize, entries: &[i64]) -> usize {
    let mut m: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    let mut rank = 0;
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    while rank < rows.len().min(cols.len()) {
        let Some((pi, pj)) = (rank..rows.len())
            .flat_map(|i| (rank..cols.len()).map(move |j| (i, j)))
            .find(|&(i, j)| m[rows[i] * n + cols[j]] != 0)
        else {
            break;
        };
        rows.swap(rank, pi);
        cols.swap(rank, pj);
        let p = m[rows[rank] * n + cols[rank]];
        for i in rank + 1..rows.len() {
            let f = m[rows[i] * n + cols[rank]];
            if f == 0 {
                continue;
            }
            for j in rank..cols.len() {
                m[rows[i] * n + cols[j]] = m[rows[i] * n + cols[j]] * p - f * m[rows[rank] * n + cols[j]];
            }
        }
        rank += 1;
    }
    rank
}

/// Integer square root (floor).
pub fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    while r * r > x {
        r -= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_cases() {
        assert_eq!(bareiss_det(1, &[7]), 7);
        assert_eq!(bareiss_det(2, &[2, 1, 1, 2]), 3);
        assert_eq!(bareiss_det(3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]), 4);
        // singular
        assert_eq!(bareiss_det(2, &[2, 2, 2, 2]), 0);
        // needs pivoting
        assert_eq!(bareiss_det(2, &[0, 1, 1, 0]), -1);
    }

    #[test]
    fn psd_and_rank() {
        assert!(is_psd_symmetric(2, &[2, 2, 2, 2]));
        assert!(!is_psd_symmetric(2, &[2, 3, 3, 2]));
        assert!(is_psd_symmetric(2, &[0, 0, 0, 0]));
        // psd but a leading minor vanishes: [[0,0],[0,2]]
        assert!(is_psd_symmetric(2, &[0, 0, 0, 2]));
        assert!(!is_positive_definite(2, &[0, 0, 0, 2]));
        assert_eq!(rank(2, &[2, 2, 2, 2]), 1);
        assert_eq!(rank(3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]), 3);
        assert_eq!(rank(2, &[0, 0, 0, 0]), 0);
    }

    #[test]
    fn isqrt_boundaries() {
        for x in 0..200 {
            let r = isqrt(x);
            assert!(r * r <= x && (r + 1) * (r + 1) > x, "x = {x}");
        }
    }
}
