//! Siegel theta functions and theta constants with characteristics for
//! genus 1..=4, with rigorous truncation control.
//!
//! theta[eps; eps'](tau, z) = sum over m in Z^g of
//!     exp[pi i ( (m + eps/2)^t tau (m + eps/2) + 2 (m + eps/2)^t (z + eps'/2) )]
//!
//! The sum is truncated to the box ||m + eps/2||_inf <= R with R chosen so the
//! discarded tail is below the requested tolerance; the tail is bounded by
//! shell counts times exp(-pi lambda_min ||x||^2), compared against a
//! geometric series. Terms are accumulated in double-double, so values are
//! accurate to far below f64 roundoff; the returned tolerance accounting is
//! the truncation bound only.
//!
//! No modular reduction of tau to a fundamental domain is attempted: points
//! are required to be well-conditioned (lambda_min(Im tau) above a floor)
//! instead.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ddouble::{Cdd, Dd};

#[derive(Debug, Error)]
pub enum ThetaError {
    #[error("genus {0} out of supported range 1..=4")]
    GenusOutOfRange(usize),
    #[error("tau is not symmetric: residual {0:.3e} exceeds 1e-12")]
    NotSymmetric(f64),
    #[error("Im(tau) is not positive definite (min eigenvalue {0:.3e})")]
    ImNotPositiveDefinite(f64),
    #[error("point too ill-conditioned: lambda_min(Im tau) = {0:.3e} below floor {1:.1e}")]
    IllConditioned(f64, f64),
    #[error("characteristic entries must be bits (0 or 1)")]
    NotABit,
    #[error("dimension mismatch: characteristic {0}, point genus {1}, z length {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("tolerance {0:.3e} unreachable: required box radius exceeds {1}")]
    RadiusOverflow(f64, u32),
    #[error("|Im z| = {0:.3} outside the supported domain (<= {1})")]
    ZOutOfDomain(f64, f64),
    #[error("degenerate projective point: all coordinates below {0:.3e}")]
    Degenerate(f64),
    #[error("invalid point file: {0}")]
    BadFile(String),
}

/// Conditioning floor for lambda_min(Im tau).
pub const LAMBDA_FLOOR: f64 = 0.05;
/// Largest supported box radius.
pub const MAX_RADIUS: u32 = 64;
/// Supported domain for |Im z| per coordinate.
pub const Z_DOMAIN: f64 = 2.0;

/// A point of the Siegel upper half space H_g: complex symmetric g x g with
/// positive-definite imaginary part. Stored exactly symmetric.
#[derive(Debug, Clone)]
pub struct SiegelPoint {
    g: usize,
    mat: Vec<Complex64>,
    min_im_eig: f64,
}

impl SiegelPoint {
    pub fn new(g: usize, mat: Vec<Complex64>) -> Result<Self, ThetaError> {
        if g < 1 || g > 4 {
            return Err(ThetaError::GenusOutOfRange(g));
        }
        assert_eq!(mat.len(), g * g);
        let mut residual = 0f64;
        for i in 0..g {
            for j in 0..i {
                residual = residual.max((mat[i * g + j] - mat[j * g + i]).norm());
            }
        }
        if residual >= 1e-12 {
            return Err(ThetaError::NotSymmetric(residual));
        }
        let mut sym = mat;
        for i in 0..g {
            for j in 0..i {
                let avg = (sym[i * g + j] + sym[j * g + i]) * 0.5;
                sym[i * g + j] = avg;
                sym[j * g + i] = avg;
            }
        }
        let im = DMatrix::from_fn(g, g, |i, j| sym[i * g + j].im);
        let eigs = im.symmetric_eigen().eigenvalues;
        let min_im_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_im_eig <= 0.0 {
            return Err(ThetaError::ImNotPositiveDefinite(min_im_eig));
        }
        Ok(SiegelPoint {
            g,
            mat: sym,
            min_im_eig,
        })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[i * self.g + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.mat
    }

    pub fn min_im_eigenvalue(&self) -> f64 {
        self.min_im_eig
    }

    /// Scalar point of H_1.
    pub fn genus1(tau: Complex64) -> Result<Self, ThetaError> {
        SiegelPoint::new(1, vec![tau])
    }

    /// Block-diagonal join of two points.
    pub fn block_diag(a: &SiegelPoint, b: &SiegelPoint) -> Result<Self, ThetaError> {
        let g = a.g + b.g;
        let mut mat = vec![Complex64::new(0.0, 0.0); g * g];
        for i in 0..a.g {
            for j in 0..a.g {
                mat[i * g + j] = a.entry(i, j);
            }
        }
        for i in 0..b.g {
            for j in 0..b.g {
                mat[(a.g + i) * g + (a.g + j)] = b.entry(i, j);
            }
        }
        SiegelPoint::new(g, mat)
    }
}

/// JSON wire format for Siegel points: row-major real and imaginary parts.
#[derive(Debug, Serialize, Deserialize)]
pub struct SiegelPointFile {
    pub g: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SiegelPoint {
    pub fn from_json(text: &str) -> Result<Self, ThetaError> {
        let f: SiegelPointFile =
            serde_json::from_str(text).map_err(|e| ThetaError::BadFile(e.to_string()))?;
        if f.re.len() != f.g * f.g || f.im.len() != f.g * f.g {
            return Err(ThetaError::BadFile(format!(
                "expected {} entries for genus {}",
                f.g * f.g,
                f.g
            )));
        }
        SiegelPoint::new(
            f.g,
            f.re.iter()
                .zip(&f.im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let f = SiegelPointFile {
            g: self.g,
            re: self.mat.iter().map(|z| z.re).collect(),
            im: self.mat.iter().map(|z| z.im).collect(),
        };
        serde_json::to_string(&f).expect("serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// A theta characteristic: bit vectors (eps, eps') of equal length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Characteristic {
    eps: Vec<u8>,
    eps_prime: Vec<u8>,
    parity: Parity,
}

impl Characteristic {
    pub fn new(eps: Vec<u8>, eps_prime: Vec<u8>) -> Result<Self, ThetaError> {
        assert_eq!(eps.len(), eps_prime.len());
        if eps.iter().chain(&eps_prime).any(|&b| b > 1) {
            return Err(ThetaError::NotABit);
        }
        let dot: u32 = eps.iter().zip(&eps_prime).map(|(&a, &b)| (a * b) as u32).sum();
        let parity = if dot % 2 == 0 { Parity::Even } else { Parity::Odd };
        Ok(Characteristic {
            eps,
            eps_prime,
            parity,
        })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    pub fn eps_prime(&self) -> &[u8] {
        &self.eps_prime
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Append bits to both rows (used to lift genus-3 characteristics to
    /// genus 4).
    pub fn extend(&self, e: u8, ep: u8) -> Characteristic {
        let mut eps = self.eps.clone();
        let mut eps_prime = self.eps_prime.clone();
        eps.push(e);
        eps_prime.push(ep);
        Characteristic::new(eps, eps_prime).expect("bits stay bits")
    }

    /// Compact display like [010;110].
    pub fn label(&self) -> String {
        let s: String = self.eps.iter().map(|b| char::from(b'0' + b)).collect();
        let t: String = self.eps_prime.iter().map(|b| char::from(b'0' + b)).collect();
        format!("[{s};{t}]")
    }
}

/// Parity of a characteristic (the parity of eps . eps' mod 2).
pub fn parity(c: &Characteristic) -> Parity {
    c.parity()
}

/// All even characteristics of length h in a fixed lexicographic order:
/// eps is the major index, eps' the minor one, both with the first coordinate
/// most significant. There are 2^(h-1) (2^h + 1) of them.
pub fn even_characteristics(h: usize) -> Vec<Characteristic> {
    assert!(h >= 1 && h <= 4, "supported lengths are 1..=4");
    let bits = |v: usize| -> Vec<u8> { (0..h).map(|i| ((v >> (h - 1 - i)) & 1) as u8).collect() };
    let mut out = Vec::new();
    for e in 0..(1usize << h) {
        for ep in 0..(1usize << h) {
            let c = Characteristic::new(bits(e), bits(ep)).expect("bits");
            if c.parity() == Parity::Even {
                out.push(c);
            }
        }
    }
    out
}

/// Smallest box radius R with tail bound below tol, for a point with minimal
/// Im-eigenvalue `lambda` and |Im z| <= `z_im`. The tail over shells
/// ||x||_inf in (k, k+1] is bounded by 2h (2k+3)^(h-1) exp(-pi lambda k^2 +
/// 2 pi h (k+1) z_im), which is dominated by a geometric series once the
/// Gaussian factor decays by more than half per step.
fn radius_for(lambda: f64, h: usize, tol: f64, z_im: f64) -> Result<u32, ThetaError> {
    let pi = std::f64::consts::PI;
    let shell = |k: f64| -> f64 {
        2.0 * h as f64
            * (2.0 * k + 3.0).powi(h as i32 - 1)
            * (-pi * lambda * k * k + 2.0 * pi * h as f64 * (k + 1.0) * z_im).exp()
    };
    for r in 0..=MAX_RADIUS {
        let k0 = r as f64;
        // ratio between consecutive shell bounds at k >= k0
        let ratio = shell(k0 + 1.0) / shell(k0).max(f64::MIN_POSITIVE);
        if ratio < 0.5 {
            let tail = shell(k0) / (1.0 - ratio);
            if tail < tol {
                return Ok(r);
            }
        }
    }
    Err(ThetaError::RadiusOverflow(tol, MAX_RADIUS))
}

/// Box radius for evaluating theta constants at `tau` to absolute truncation
/// error below `tol`. Monotone nonincreasing in lambda_min(Im tau).
pub fn truncation_radius(tau: &SiegelPoint, tol: f64) -> Result<u32, ThetaError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if tau.min_im_eigenvalue() < LAMBDA_FLOOR {
        return Err(ThetaError::IllConditioned(
            tau.min_im_eigenvalue(),
            LAMBDA_FLOOR,
        ));
    }
    radius_for(tau.min_im_eigenvalue(), tau.genus(), tol, 0.0)
}

/// theta[eps; eps'](tau, z), truncation error below `tol`.
pub fn theta_function(
    c: &Characteristic,
    tau: &SiegelPoint,
    z: &[Complex64],
    tol: f64,
) -> Result<Complex64, ThetaError> {
    Ok(theta_function_dd(c, tau, z, tol)?.c64())
}

/// Theta constant theta[eps; eps'] = theta[eps; eps'](tau, 0).
pub fn theta_constant(
    c: &Characteristic,
    tau: &SiegelPoint,
    tol: f64,
) -> Result<Complex64, ThetaError> {
    let z = vec![Complex64::new(0.0, 0.0); tau.genus()];
    theta_function(c, tau, &z, tol)
}

/// Double-double theta constant, for the cancellation-sensitive cusp-form
/// pipeline.
pub(crate) fn theta_constant_dd(
    c: &Characteristic,
    tau: &SiegelPoint,
    tol: f64,
) -> Result<Cdd, ThetaError> {
    let z = vec![Complex64::new(0.0, 0.0); tau.genus()];
    theta_function_dd(c, tau, &z, tol)
}

pub(crate) fn theta_function_dd(
    c: &Characteristic,
    tau: &SiegelPoint,
    z: &[Complex64],
    tol: f64,
) -> Result<Cdd, ThetaError> {
    let g = tau.genus();
    if c.dim() != g || z.len() != g {
        return Err(ThetaError::DimensionMismatch(c.dim(), g, z.len()));
    }
    assert!(tol > 0.0, "tolerance must be positive");
    if tau.min_im_eigenvalue() < LAMBDA_FLOOR {
        return Err(ThetaError::IllConditioned(
            tau.min_im_eigenvalue(),
            LAMBDA_FLOOR,
        ));
    }
    let z_im = z.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    if z_im > Z_DOMAIN {
        return Err(ThetaError::ZOutOfDomain(z_im, Z_DOMAIN));
    }
    let r = radius_for(tau.min_im_eigenvalue(), g, tol, z_im)? as i64;

    // x_i = m_i + eps_i/2 ranges over the half-integer or integer grid within
    // [-R, R]; doubled coordinates keep it exact
    let mut ranges: Vec<(i64, i64)> = Vec::with_capacity(g);
    for i in 0..g {
        if c.eps()[i] == 0 {
            ranges.push((-r, r));
        } else {
            ranges.push((-r, r - 1));
        }
    }

    let tau_dd: Vec<Cdd> = tau.mat.iter().map(|&w| Cdd::from_c64(w)).collect();
    // linear coefficient: 2 (z + eps'/2)
    let lin: Vec<Cdd> = (0..g)
        .map(|i| {
            Cdd::new(
                Dd::from_f64(2.0 * z[i].re + c.eps_prime()[i] as f64),
                Dd::from_f64(2.0 * z[i].im),
            )
        })
        .collect();

    let mut sum = Cdd::ZERO;
    let mut m = vec![0i64; g];
    sum_box(
        0,
        g,
        &ranges,
        c.eps(),
        &tau_dd,
        &lin,
        &mut m,
        &mut sum,
    );
    Ok(sum)
}

#[allow(clippy::too_many_arguments)]
fn sum_box(
    i: usize,
    g: usize,
    ranges: &[(i64, i64)],
    eps: &[u8],
    tau: &[Cdd],
    lin: &[Cdd],
    m: &mut [i64],
    sum: &mut Cdd,
) {
    if i == g {
        // w = x^t tau x + lin . x, with x_i = m_i + eps_i/2 exact in f64
        let x: [f64; 4] = std::array::from_fn(|k| {
            if k < g {
                m[k] as f64 + eps[k] as f64 * 0.5
            } else {
                0.0
            }
        });
        let mut w = Cdd::ZERO;
        for a in 0..g {
            let mut row = Cdd::ZERO;
            for b in 0..g {
                row = row.add(tau[a * g + b].mul_dd(Dd::from_f64(x[b])));
            }
            row = row.add(lin[a]);
            w = w.add(row.mul_dd(Dd::from_f64(x[a])));
        }
        *sum = sum.add(Cdd::exp_i_pi(w));
        return;
    }
    for v in ranges[i].0..=ranges[i].1 {
        m[i] = v;
        sum_box(i + 1, g, ranges, eps, tau, lin, m, sum);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn chi(e: &[u8], ep: &[u8]) -> Characteristic {
        Characteristic::new(e.to_vec(), ep.to_vec()).unwrap()
    }

    #[test]
    fn parity_basics() {
        assert_eq!(chi(&[0, 0, 0], &[0, 0, 0]).parity(), Parity::Even);
        assert_eq!(chi(&[1], &[1]).parity(), Parity::Odd);
        assert_eq!(chi(&[1, 1], &[1, 1]).parity(), Parity::Even);
    }

    #[test]
    fn even_characteristic_counts() {
        assert_eq!(even_characteristics(1).len(), 3);
        assert_eq!(even_characteristics(2).len(), 10);
        assert_eq!(even_characteristics(3).len(), 36);
        assert_eq!(even_characteristics(4).len(), 136);
    }

    #[test]
    fn siegel_point_validation() {
        assert!(SiegelPoint::new(1, vec![c64(0.0, 1.0)]).is_ok());
        assert!(matches!(
            SiegelPoint::new(1, vec![c64(0.0, -1.0)]),
            Err(ThetaError::ImNotPositiveDefinite(_))
        ));
        let asym = SiegelPoint::new(2, vec![c64(0.0, 1.0), c64(0.5, 0.0), c64(0.1, 0.0), c64(0.0, 1.0)]);
        assert!(matches!(asym, Err(ThetaError::NotSymmetric(_))));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = SiegelPoint::new(
            2,
            vec![c64(0.1, 1.2), c64(0.05, 0.3), c64(0.05, 0.3), c64(-0.2, 1.1)],
        )
        .unwrap();
        let q = SiegelPoint::from_json(&p.to_json()).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(p.entries()[i].re, q.entries()[i].re, epsilon = 1e-15);
        }
        assert!(SiegelPoint::from_json("{\"g\":2,\"re\":[0],\"im\":[1]}").is_err());
    }

    #[test]
    fn truncation_radius_examples() {
        let p = SiegelPoint::genus1(c64(0.0, 1.0)).unwrap();
        let r = truncation_radius(&p, 1e-10).unwrap();
        assert!(r <= 4, "R = {r}");
        // monotone: shrinking lambda grows the radius
        let small = SiegelPoint::new(
            4,
            (0..16)
                .map(|k| if k % 5 == 0 { c64(0.0, 0.5) } else { c64(0.0, 0.0) })
                .collect(),
        )
        .unwrap();
        let big = SiegelPoint::new(
            4,
            (0..16)
                .map(|k| if k % 5 == 0 { c64(0.0, 1.0) } else { c64(0.0, 0.0) })
                .collect(),
        )
        .unwrap();
        assert!(truncation_radius(&small, 1e-10).unwrap() >= truncation_radius(&big, 1e-10).unwrap());
        // huge tolerance permits R = 0
        assert_eq!(truncation_radius(&big, 1e3).unwrap(), 0);
    }

    #[test]
    fn odd_constants_vanish() {
        let p = SiegelPoint::genus1(c64(0.3, 1.1)).unwrap();
        let v = theta_constant(&chi(&[1], &[1]), &p, 1e-12).unwrap();
        assert!(v.norm() < 1e-12, "odd theta constant = {v}");

        let p2 = SiegelPoint::new(
            2,
            vec![c64(0.1, 1.0), c64(0.2, 0.4), c64(0.2, 0.4), c64(-0.3, 1.3)],
        )
        .unwrap();
        for e in 0..4u8 {
            for ep in 0..4u8 {
                let c = chi(&[e >> 1, e & 1], &[ep >> 1, ep & 1]);
                if c.parity() == Parity::Odd {
                    let v = theta_constant(&c, &p2, 1e-12).unwrap();
                    assert!(v.norm() < 1e-12, "{} = {v}", c.label());
                }
            }
        }
    }

    /// Independent oracle: plain-f64 direct summation, coded without the
    /// double-double path or the radius machinery.
    fn direct_sum_genus1(eps: f64, eps_p: f64, tau: Complex64, cap: i64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in -cap..=cap {
            let x = m as f64 + eps / 2.0;
            let w = tau * x * x + Complex64::new(x * eps_p, 0.0);
            acc += (Complex64::new(0.0, std::f64::consts::PI) * w).exp();
        }
        acc
    }

    #[test]
    fn genus1_reference_value_at_i() {
        // theta[0;0](i) = pi^(1/4) / Gamma(3/4) = 1.0864348112133080...
        let p = SiegelPoint::genus1(c64(0.0, 1.0)).unwrap();
        let v = theta_constant(&chi(&[0], &[0]), &p, 1e-13).unwrap();
        assert_abs_diff_eq!(v.re, 1.086434811213308, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        let oracle = direct_sum_genus1(0.0, 0.0, c64(0.0, 1.0), 12);
        assert_abs_diff_eq!(v.re, oracle.re, epsilon = 1e-12);
    }

    #[test]
    fn genus1_oracle_with_characteristics() {
        let tau = c64(0.37, 0.9);
        let p = SiegelPoint::genus1(tau).unwrap();
        for (e, ep) in [(0u8, 0u8), (0, 1), (1, 0)] {
            let v = theta_constant(&chi(&[e], &[ep]), &p, 1e-13).unwrap();
            let oracle = direct_sum_genus1(e as f64, ep as f64, tau, 14);
            assert_abs_diff_eq!(v.re, oracle.re, epsilon = 1e-11);
            assert_abs_diff_eq!(v.im, oracle.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn even_constants_dominated_by_one_at_2i() {
        for h in 1..=3 {
            let mut mat = vec![c64(0.0, 0.0); h * h];
            for i in 0..h {
                mat[i * h + i] = c64(0.0, 2.0);
            }
            let p = SiegelPoint::new(h, mat).unwrap();
            for c in even_characteristics(h) {
                let v = theta_constant(&c, &p, 1e-12).unwrap();
                assert!(v.im.abs() < 1e-12);
                // at diagonal tau the value factors into genus-1 constants;
                // a coordinate with (eps_i, eps'_i) = (1, 1) contributes the
                // odd factor and kills the product, all others are positive
                let odd_factor = (0..h).any(|i| c.eps()[i] == 1 && c.eps_prime()[i] == 1);
                if odd_factor {
                    assert!(v.re.abs() < 1e-12, "{} = {}", c.label(), v.re);
                } else {
                    assert!(v.re > 0.0, "{} should be positive", c.label());
                }
                if c.eps().iter().all(|&b| b == 0) {
                    // constant term 1 dominates; the first correction is
                    // +-2 exp(-2 pi) per coordinate
                    assert!(v.re >= 1.0 - 2e-2, "{} = {}", c.label(), v.re);
                }
            }
        }
    }

    #[test]
    fn block_diagonal_factorization() {
        let t1 = SiegelPoint::genus1(c64(0.21, 0.8)).unwrap();
        let t2 = SiegelPoint::new(
            2,
            vec![c64(-0.15, 1.1), c64(0.3, 0.25), c64(0.3, 0.25), c64(0.05, 0.95)],
        )
        .unwrap();
        let joint = SiegelPoint::block_diag(&t1, &t2).unwrap();
        for (e1, p1) in [(0u8, 0u8), (1, 0)] {
            for c2 in even_characteristics(2) {
                let mut e = vec![e1];
                e.extend_from_slice(c2.eps());
                let mut ep = vec![p1];
                ep.extend_from_slice(c2.eps_prime());
                let c = Characteristic::new(e, ep).unwrap();
                let lhs = theta_constant(&c, &joint, 1e-13).unwrap();
                let a = theta_constant(&chi(&[e1], &[p1]), &t1, 1e-13).unwrap();
                let b = theta_constant(&c2, &t2, 1e-13).unwrap();
                assert!((lhs - a * b).norm() < 1e-10 * (1.0 + (a * b).norm()));
            }
        }
    }

    #[test]
    fn symmetry_in_z() {
        // theta[e;e'](tau, -z) = (-1)^(e.e') theta[e;e'](tau, z)
        let p = SiegelPoint::new(
            2,
            vec![c64(0.2, 1.0), c64(-0.1, 0.3), c64(-0.1, 0.3), c64(0.4, 1.2)],
        )
        .unwrap();
        let z = [c64(0.21, 0.07), c64(-0.13, 0.02)];
        let zn = [-z[0], -z[1]];
        for (e, ep, sign) in [
            (vec![0u8, 0u8], vec![0u8, 0u8], 1.0),
            (vec![1, 0], vec![1, 0], -1.0),
            (vec![1, 1], vec![0, 1], -1.0),
            (vec![1, 0], vec![0, 1], 1.0),
        ] {
            let c = Characteristic::new(e, ep).unwrap();
            let a = theta_function(&c, &p, &z, 1e-13).unwrap();
            let b = theta_function(&c, &p, &zn, 1e-13).unwrap();
            assert!((a - b * sign).norm() < 1e-11, "{}", c.label());
        }
    }

    #[test]
    fn coordinate_permutation_invariance() {
        // permuting tau rows/columns together with the characteristic leaves
        // the constant unchanged (re-indexing the sum)
        let p = SiegelPoint::new(
            2,
            vec![c64(0.11, 0.9), c64(0.05, 0.2), c64(0.05, 0.2), c64(-0.31, 1.4)],
        )
        .unwrap();
        let pperm = SiegelPoint::new(
            2,
            vec![c64(-0.31, 1.4), c64(0.05, 0.2), c64(0.05, 0.2), c64(0.11, 0.9)],
        )
        .unwrap();
        let a = theta_constant(&chi(&[1, 0], &[0, 0]), &p, 1e-13).unwrap();
        let b = theta_constant(&chi(&[0, 1], &[0, 0]), &pperm, 1e-13).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn tolerance_honesty_under_radius_halving() {
        // the reported tol dominates the change when the box shrinks by half
        let p = SiegelPoint::new(
            2,
            vec![c64(0.3, 1.5), c64(0.1, 0.2), c64(0.1, 0.2), c64(-0.2, 1.6)],
        )
        .unwrap();
        let c = chi(&[0, 1], &[1, 0]);
        let tol = 1e-8;
        let full = theta_constant(&c, &p, tol).unwrap();
        // recompute with a coarser tolerance whose radius is about half
        let r_full = truncation_radius(&p, tol).unwrap();
        let mut coarse_tol = 1.0;
        while truncation_radius(&p, coarse_tol).unwrap() < r_full.div_ceil(2) {
            coarse_tol /= 10.0;
        }
        let coarse = theta_constant(&c, &p, coarse_tol).unwrap();
        assert!(
            (full - coarse).norm() <= coarse_tol,
            "drift {} vs tol {}",
            (full - coarse).norm(),
            coarse_tol
        );
    }

    #[test]
    fn z_domain_enforced() {
        let p = SiegelPoint::genus1(c64(0.0, 1.0)).unwrap();
        let err = theta_function(&chi(&[0], &[0]), &p, &[c64(0.0, 5.0)], 1e-10);
        assert!(matches!(err, Err(ThetaError::ZOutOfDomain(_, _))));
    }
}
