//! The mode-3 transform defining the M-product, and the hat-domain view.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// 3-mode product `A ×₃ M`: every tube fiber `A(i,j,:)` is replaced by
/// `M` applied to it, `result(i,j,k) = Σ_{l} A(i,j,l) · M(k,l)`.
pub fn mode3_product(a: &Tensor3, m: &DMatrix<Complex64>) -> Result<Tensor3> {
    let (rows, cols, p) = a.dims();
    if m.nrows() != p || m.ncols() != p {
        return Err(Error::DimensionMismatch(format!(
            "mode-3 product of a tensor with {} slices and a {}x{} matrix",
            p,
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = Tensor3::zeros(rows, cols, p);
    for i in 0..rows {
        for j in 0..cols {
            for k in 0..p {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..p {
                    acc += a[(i, j, l)] * m[(k, l)];
                }
                out[(i, j, k)] = acc;
            }
        }
    }
    Ok(out)
}

/// A tensor living in the transform domain, `Â = A ×₃ M`.
///
/// Tagged so hat-domain and original-domain values cannot be mixed up in
/// client code; all slicewise algebra happens on these.
#[derive(Debug, Clone, PartialEq)]
pub struct HatTensor(Tensor3);

impl HatTensor {
    pub fn from_raw(t: Tensor3) -> Self {
        HatTensor(t)
    }

    pub fn as_tensor(&self) -> &Tensor3 {
        &self.0
    }

    pub fn into_tensor(self) -> Tensor3 {
        self.0
    }
}

/// An invertible `p x p` transform matrix with its cached inverse.
#[derive(Debug, Clone)]
pub struct Transform {
    mat: DMatrix<Complex64>,
    inv: DMatrix<Complex64>,
}

impl Transform {
    /// Inverts `mat` by LU with partial pivoting. Fails when the smallest
    /// pivot magnitude drops below `p·ε·max pivot`, or when the computed
    /// inverse does not satisfy `‖M·M⁻¹ − I‖_F ≤ 1e-10·‖M‖_F`.
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        let p = mat.nrows();
        if p == 0 || mat.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "transform matrix must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let lu = mat.clone().lu();
        let pivots: Vec<f64> = (0..p).map(|i| lu.u()[(i, i)].norm()).collect();
        let max_pivot = pivots.iter().cloned().fold(0.0, f64::max);
        let min_pivot = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
        if max_pivot == 0.0 || min_pivot < p as f64 * f64::EPSILON * max_pivot {
            return Err(Error::SingularTransform {
                pivot_ratio: if max_pivot == 0.0 {
                    0.0
                } else {
                    min_pivot / max_pivot
                },
            });
        }
        let inv = lu
            .try_inverse()
            .ok_or(Error::SingularTransform { pivot_ratio: 0.0 })?;
        let residual = (&mat * &inv - DMatrix::<Complex64>::identity(p, p)).norm();
        if residual > 1e-10 * mat.norm() {
            return Err(Error::SingularTransform {
                pivot_ratio: min_pivot / max_pivot,
            });
        }
        Ok(Transform { mat, inv })
    }

    pub fn identity(p: usize) -> Self {
        let eye = DMatrix::<Complex64>::identity(p, p);
        Transform {
            mat: eye.clone(),
            inv: eye,
        }
    }

    /// Transform from a real matrix given as nested rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.len();
        let mat = DMatrix::from_fn(p, p, |i, j| Complex64::new(rows[i][j], 0.0));
        Transform::new(mat)
    }

    pub fn order(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn inverse_matrix(&self) -> &DMatrix<Complex64> {
        &self.inv
    }

    pub fn to_hat(&self, a: &Tensor3) -> Result<HatTensor> {
        Ok(HatTensor(mode3_product(a, &self.mat)?))
    }

    pub fn from_hat(&self, hat: &HatTensor) -> Tensor3 {
        self.from_hat_raw(&hat.0)
    }

    /// `×₃ M⁻¹` on an untagged tensor; used where hat slices are built
    /// directly.
    pub fn from_hat_raw(&self, hat: &Tensor3) -> Tensor3 {
        mode3_product(hat, &self.inv).expect("hat tensor depth matches transform order")
    }

    /// `×₃ M` without tagging.
    pub fn to_hat_raw(&self, a: &Tensor3) -> Tensor3 {
        mode3_product(a, &self.mat).expect("tensor depth matches transform order")
    }
}
