//! Deterministic random generation used by the bench command, property
//! sweeps, and tests.
//!
//! All draws come from ChaCha8, a counter-based stream cipher keyed by a
//! 64-bit seed, so identical seeds reproduce identical tensors bit for bit
//! across runs and platforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::tensor::Tensor3;
use crate::transform::Transform;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tensor with independent complex standard-normal entries.
pub fn random_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize, p: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(m, n, p);
    for k in 0..p {
        for i in 0..m {
            for j in 0..n {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                t[(i, j, k)] = Complex64::new(re, im);
            }
        }
    }
    t
}

/// Tensor with independent real standard-normal entries.
pub fn random_real_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize, p: usize) -> Tensor3 {
    let mut t = Tensor3::zeros(m, n, p);
    for k in 0..p {
        for i in 0..m {
            for j in 0..n {
                let re: f64 = StandardNormal.sample(rng);
                t[(i, j, k)] = Complex64::new(re, 0.0);
            }
        }
    }
    t
}

/// Random complex matrix, resampled until comfortably invertible.
pub fn random_invertible_matrix(rng: &mut ChaCha8Rng, p: usize) -> DMatrix<Complex64> {
    loop {
        let m = DMatrix::from_fn(p, p, |_, _| {
            Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin > 1e-3 * smax {
            return m;
        }
    }
}

pub fn random_transform(rng: &mut ChaCha8Rng, p: usize) -> Transform {
    Transform::new(random_invertible_matrix(rng, p)).expect("resampled matrix is invertible")
}

/// Square tensor whose hat-domain slices are strictly diagonally dominant:
/// random off-diagonal entries with the diagonal boosted by the absolute
/// row sum times `margin` (> 1).
pub fn random_hat_sdd_tensor(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: usize,
    margin: f64,
    transform: &Transform,
) -> Tensor3 {
    let mut hat = Tensor3::zeros(n, n, p);
    for k in 0..p {
        for i in 0..n {
            let mut off_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let z = Complex64::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    );
                    off_sum += z.norm();
                    hat[(i, j, k)] = z;
                }
            }
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            hat[(i, i, k)] = Complex64::new(sign * margin * (off_sum + 1.0), 0.0);
        }
    }
    transform.from_hat_raw(&hat)
}
