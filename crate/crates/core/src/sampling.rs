//! Seeded sampling of well-conditioned Siegel points for the numerical
//! experiments. All sampling is driven by a ChaCha stream cipher, so a fixed
//! seed reproduces the exact same points (and therefore byte-identical
//! reports) on every platform.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::theta::SiegelPoint;

/// Recipe for random points of H_g: symmetric real part with entries uniform
/// in [-re_spread, re_spread]; imaginary part im_base * I plus a symmetric
/// perturbation with entries uniform in [-im_spread, im_spread]. The base
/// dominates the perturbation, so Im stays positive definite by construction;
/// validation still checks.
#[derive(Debug, Clone, Copy)]
pub struct PointRecipe {
    pub re_spread: f64,
    pub im_base: f64,
    pub im_spread: f64,
}

impl PointRecipe {
    /// Points for the genus-3 theta-relation experiment.
    pub fn genus3_relation() -> PointRecipe {
        PointRecipe {
            re_spread: 0.5,
            im_base: 1.5,
            im_spread: 0.2,
        }
    }

    /// Generic genus-4 points for the cusp-form experiments. The larger
    /// imaginary base keeps the coefficient-table truncation error orders of
    /// magnitude below the proportionality and indicator tolerances; the
    /// double-double theta kernels absorb the extra cancellation.
    pub fn genus4_generic() -> PointRecipe {
        PointRecipe {
            re_spread: 0.5,
            im_base: 1.8,
            im_spread: 0.1,
        }
    }
}

/// Deterministic stream of Siegel points. Sample index `k` under seed `s` is
/// the same regardless of how many points are drawn.
pub fn sample_points(g: usize, recipe: &PointRecipe, seed: u64, count: usize) -> Vec<SiegelPoint> {
    (0..count)
        .map(|k| sample_point(g, recipe, seed, k as u64))
        .collect()
}

pub fn sample_point(g: usize, recipe: &PointRecipe, seed: u64, index: u64) -> SiegelPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index.wrapping_mul(0x9e3779b97f4a7c15)));
    let mut mat = vec![Complex64::new(0.0, 0.0); g * g];
    for i in 0..g {
        for j in i..g {
            let re = rng.gen_range(-recipe.re_spread..=recipe.re_spread);
            let im_pert = rng.gen_range(-recipe.im_spread..=recipe.im_spread);
            let im = if i == j { recipe.im_base + im_pert } else { im_pert };
            mat[i * g + j] = Complex64::new(re, im);
            mat[j * g + i] = Complex64::new(re, im);
        }
    }
    SiegelPoint::new(g, mat).expect("recipe keeps Im tau positive definite")
}

/// Block-diagonal point diag(tau_3, tau_1) on the genus-4 boundary of the
/// Jacobian locus, sampled from the same stream.
pub fn sample_block_point(recipe: &PointRecipe, seed: u64, index: u64) -> SiegelPoint {
    let t3 = sample_point(3, recipe, seed, index);
    let t1 = sample_point(1, recipe, seed, index ^ 0xffff_ffff);
    SiegelPoint::block_diag(&t3, &t1).expect("blocks stay in H_4")
}
