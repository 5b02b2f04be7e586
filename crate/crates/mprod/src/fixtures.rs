//! Built-in 3x3x2 reference system with known inverses, splittings, and
//! convergence radii, used by the `verify` command and the test suite.
//!
//! All entries are small fractions, so the tensors are reproduced exactly
//! in f64.

use crate::tensor::Tensor3;
use crate::transform::Transform;

pub fn transform() -> Transform {
    Transform::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap()
}

pub fn a() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![2.0, -1.0, -1.0],
            vec![-2.0, 3.5, -0.5],
            vec![-2.5, -1.5, 3.5],
        ],
        vec![
            vec![2.0, -2.0, 0.0],
            vec![-3.0, 5.0, -2.0],
            vec![-1.0, -2.0, 9.0],
        ],
    ])
}

pub fn b() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![2.5, -1.0, 0.0],
            vec![-1.0, 2.5, -1.0],
            vec![-1.5, -2.0, 2.0],
        ],
        vec![
            vec![5.0, -2.0, 0.0],
            vec![-2.0, 5.0, -2.0],
            vec![-3.0, -4.0, 4.0],
        ],
    ])
}

pub fn c() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![1.0, 1.0, 1.0],
            vec![0.0, 1.0, -1.0],
            vec![2.0, -3.0, 0.0],
        ],
        vec![
            vec![-1.0, -1.0, -1.0],
            vec![0.0, 2.0, -1.0],
            vec![0.0, -3.0, 0.0],
        ],
    ])
}

fn diag_slices(d1: [f64; 3], d2: [f64; 3]) -> Tensor3 {
    let mut t = Tensor3::zeros(3, 3, 2);
    for i in 0..3 {
        t[(i, i, 0)] = num_complex::Complex64::new(d1[i], 0.0);
        t[(i, i, 1)] = num_complex::Complex64::new(d2[i], 0.0);
    }
    t
}

/// Diagonal splitting tensor for `a()`: `G₁ = F₁ − A`.
pub fn f1() -> Tensor3 {
    diag_slices([2.0, 3.5, 3.5], [2.0, 5.0, 9.0])
}

/// Diagonal splitting tensor for `b()`: `G₂ = F₂ − B`.
pub fn f2() -> Tensor3 {
    diag_slices([2.5, 2.5, 2.0], [5.0, 5.0, 4.0])
}

/// Lower-triangular preconditioner, applied on both sides.
pub fn preconditioner() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.5, 1.0, 0.0],
            vec![1.25, 0.5, 1.0],
        ],
        vec![
            vec![0.25, 0.0, 0.0],
            vec![0.125, 0.25, 0.0],
            vec![0.3125, 0.125, 0.25],
        ],
    ])
}

/// Diagonal splitting tensor for the preconditioned left operator
/// `P *_M A`: its Jacobi diagonal, which reproduces the reference
/// radius 0.8792.
pub fn fp1() -> Tensor3 {
    diag_slices([2.0, 3.0, 2.0], [1.0, 2.0, 4.0])
}

/// Diagonal splitting tensor for the preconditioned right operator
/// `B *_M P`.
pub fn fp2() -> Tensor3 {
    diag_slices([2.0, 2.0, 2.0], [2.0, 2.0, 2.0])
}

/// Hat-domain slices of `inverse(a())`, exact fractions.
pub fn expected_a_inverse_hat() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![23.0 / 6.0, 5.0 / 3.0, 4.0 / 3.0],
            vec![11.0 / 4.0, 3.0 / 2.0, 1.0],
            vec![47.0 / 12.0, 11.0 / 6.0, 5.0 / 3.0],
        ],
        vec![
            vec![41.0 / 48.0, 3.0 / 8.0, 1.0 / 12.0],
            vec![29.0 / 48.0, 3.0 / 8.0, 1.0 / 12.0],
            vec![11.0 / 48.0, 1.0 / 8.0, 1.0 / 12.0],
        ],
    ])
}

/// Hat-domain slices of `inverse(b())`, exact fractions.
pub fn expected_b_inverse_hat() -> Tensor3 {
    Tensor3::from_real_slices(&[
        vec![
            vec![3.0 / 4.0, 1.0 / 2.0, 1.0 / 4.0],
            vec![7.0 / 8.0, 5.0 / 4.0, 5.0 / 8.0],
            vec![23.0 / 16.0, 13.0 / 8.0, 21.0 / 16.0],
        ],
        vec![
            vec![3.0 / 16.0, 1.0 / 8.0, 1.0 / 16.0],
            vec![7.0 / 32.0, 5.0 / 16.0, 5.0 / 32.0],
            vec![23.0 / 64.0, 13.0 / 32.0, 21.0 / 64.0],
        ],
    ])
}

/// Reference convergence radii for the four diagonal splittings, printed
/// to four decimal places.
pub const RHO_F1G1: f64 = 0.9424;
pub const RHO_FP1GP1: f64 = 0.8792;
pub const RHO_F2G2: f64 = 0.8385;
pub const RHO_FP2GP2: f64 = 0.7071;
