//! M-product algebra: products, adjoints, inverses, norms, spectral
//! radius, and structural predicates, all computed slicewise in the hat
//! domain.

use nalgebra::linalg::Schur;
use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use crate::transform::Transform;

/// Nonnegativity slack: the mathematical `≥ 0` is exact arithmetic, floating
/// point needs tolerance on both parts.
pub const NONNEG_RE_TOL: f64 = 1e-12;
pub const NONNEG_IM_TOL: f64 = 1e-10;

/// Maximum condition estimate before a hat slice counts as singular.
pub const SINGULAR_COND_LIMIT: f64 = 1e-3 / f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuralPredicates {
    pub nonnegative: bool,
    pub strictly_diag_dominant: bool,
    pub hermitian_positive_definite: bool,
}

impl Transform {
    /// `A *_M B = ((A ×₃ M) Δ (B ×₃ M)) ×₃ M⁻¹`.
    pub fn m_product(&self, a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
        let ah = self.to_hat(a)?;
        let bh = self.to_hat(b)?;
        let ch = ah.as_tensor().face_product(bh.as_tensor())?;
        Ok(self.from_hat_raw(&ch))
    }

    /// Conjugate transpose: adjoint of every hat slice, mapped back.
    pub fn conj_transpose(&self, a: &Tensor3) -> Result<Tensor3> {
        let hat = self.to_hat(a)?;
        let (_, _, p) = hat.as_tensor().dims();
        let slices: Vec<_> = (0..p).map(|k| hat.as_tensor().slice(k).adjoint()).collect();
        Ok(self.from_hat_raw(&Tensor3::from_slices(&slices)))
    }

    /// Identity tensor `I_mmp`: every hat slice is `I_m`.
    pub fn identity_tensor(&self, m: usize) -> Tensor3 {
        let eye = DMatrix::<Complex64>::identity(m, m);
        let slices: Vec<_> = (0..self.order()).map(|_| eye.clone()).collect();
        self.from_hat_raw(&Tensor3::from_slices(&slices))
    }

    /// M-product inverse, computed slicewise in the hat domain.
    pub fn inverse(&self, a: &Tensor3) -> Result<Tensor3> {
        let (m, n, _) = a.dims();
        if m != n {
            return Err(Error::DimensionMismatch(format!(
                "inverse requires square slices, got {m}x{n}"
            )));
        }
        let hat = self.to_hat(a)?;
        let mut slices = Vec::with_capacity(self.order());
        for k in 0..self.order() {
            let s = hat.as_tensor().slice(k);
            let sv = s.clone().svd(false, false).singular_values;
            let smax = sv.max();
            let smin = sv.min();
            if smin == 0.0 || smax / smin > SINGULAR_COND_LIMIT {
                return Err(Error::SingularSlice { slice: k });
            }
            let inv = s
                .lu()
                .try_inverse()
                .ok_or(Error::SingularSlice { slice: k })?;
            slices.push(inv);
        }
        Ok(self.from_hat_raw(&Tensor3::from_slices(&slices)))
    }

    /// Moore–Penrose inverse under the M-product: slicewise SVD
    /// pseudoinverse in the hat domain, singular values below
    /// `max(m,n)·ε·σ_max` treated as zero.
    pub fn mp_inverse(&self, a: &Tensor3) -> Result<Tensor3> {
        let (m, n, _) = a.dims();
        let hat = self.to_hat(a)?;
        let mut slices = Vec::with_capacity(self.order());
        for k in 0..self.order() {
            let s = hat.as_tensor().slice(k);
            let svd = s.svd(true, true);
            let smax = svd.singular_values.max();
            let tol = m.max(n) as f64 * f64::EPSILON * smax;
            let pinv = svd
                .pseudo_inverse(tol)
                .map_err(|_| Error::SingularSlice { slice: k })?;
            slices.push(pinv);
        }
        Ok(self.from_hat_raw(&Tensor3::from_slices(&slices)))
    }

    /// Tubal norm: maximum hat-slice 2-norm (largest singular value).
    pub fn tubal_norm(&self, a: &Tensor3) -> Result<f64> {
        let hat = self.to_hat(a)?;
        let mut max = 0.0f64;
        for k in 0..self.order() {
            let sv = hat.as_tensor().slice(k).svd(false, false).singular_values;
            max = max.max(sv.max());
        }
        Ok(max)
    }

    /// Spectral radius: maximum hat-slice spectral radius, via dense
    /// complex Schur decomposition per slice.
    pub fn spectral_radius(&self, a: &Tensor3) -> Result<f64> {
        let (m, n, _) = a.dims();
        if m != n {
            return Err(Error::DimensionMismatch(format!(
                "spectral radius requires square slices, got {m}x{n}"
            )));
        }
        let hat = self.to_hat(a)?;
        let mut max = 0.0f64;
        for k in 0..self.order() {
            max = max.max(slice_spectral_radius(&hat.as_tensor().slice(k)));
        }
        Ok(max)
    }

    /// Per-slice ranks of the hat slices (the tubal rank is their max).
    pub fn tubal_ranks(&self, a: &Tensor3) -> Result<Vec<usize>> {
        let (m, n, _) = a.dims();
        let hat = self.to_hat(a)?;
        let mut ranks = Vec::with_capacity(self.order());
        for k in 0..self.order() {
            let sv = hat.as_tensor().slice(k).svd(false, false).singular_values;
            let smax = sv.max();
            let tol = m.max(n) as f64 * f64::EPSILON * smax;
            ranks.push(sv.iter().filter(|&&s| s > tol).count());
        }
        Ok(ranks)
    }

    /// Hat-domain nonnegativity, strict diagonal dominance, and HPD.
    pub fn predicates(&self, a: &Tensor3) -> Result<StructuralPredicates> {
        let hat = self.to_hat(a)?;
        let (m, n, p) = hat.as_tensor().dims();
        let mut nonnegative = true;
        for z in hat.as_tensor().data() {
            if z.re < -NONNEG_RE_TOL || z.im.abs() > NONNEG_IM_TOL {
                nonnegative = false;
                break;
            }
        }
        let mut dominant = m == n;
        let mut hpd = m == n;
        for k in 0..p {
            if !dominant && !hpd {
                break;
            }
            let s = hat.as_tensor().slice(k);
            if dominant {
                for i in 0..m {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| s[(i, j)].norm()).sum();
                    if s[(i, i)].norm() <= off {
                        dominant = false;
                        break;
                    }
                }
            }
            if hpd {
                let herm_defect = (&s - s.adjoint()).norm();
                if herm_defect > 1e-10 * s.norm().max(1.0) {
                    hpd = false;
                } else {
                    // symmetrize before factoring so roundoff cannot fail it
                    let sym = (s.clone() + s.adjoint()).scale(0.5);
                    if Cholesky::new(sym).is_none() {
                        hpd = false;
                    }
                }
            }
        }
        Ok(StructuralPredicates {
            nonnegative,
            strictly_diag_dominant: dominant,
            hermitian_positive_definite: hpd,
        })
    }

    /// k-th M-product power of a square tensor.
    pub fn m_power(&self, a: &Tensor3, k: usize) -> Result<Tensor3> {
        let (m, _, _) = a.dims();
        let mut acc = self.identity_tensor(m);
        for _ in 0..k {
            acc = self.m_product(&acc, a)?;
        }
        Ok(acc)
    }
}

/// Spectral radius of a dense complex matrix via Schur decomposition.
///
/// Triangular slices (including zero) are read off the diagonal directly;
/// the QR iteration in the Schur decomposition can stall on them. For the
/// rare general stall a diagonal shift is applied, which moves every
/// eigenvalue by a known constant without changing the eigenvectors.
pub fn slice_spectral_radius(mat: &DMatrix<Complex64>) -> f64 {
    let n = mat.nrows();
    if n == 0 {
        return 0.0;
    }
    let diag_max = (0..n).map(|i| mat[(i, i)].norm()).fold(0.0, f64::max);
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i > j {
                lower += mat[(i, j)].norm_sqr();
            } else if i < j {
                upper += mat[(i, j)].norm_sqr();
            }
        }
    }
    if lower == 0.0 || upper == 0.0 {
        return diag_max;
    }
    const MAX_ITER: usize = 100_000;
    if let Some(schur) = Schur::try_new(mat.clone(), f64::EPSILON, MAX_ITER) {
        let (_, t) = schur.unpack();
        return (0..n).map(|i| t[(i, i)].norm()).fold(0.0, f64::max);
    }
    let scale = mat.norm();
    let c = Complex64::new(scale, 0.5 * scale);
    let shifted = mat + DMatrix::from_diagonal_element(n, n, c);
    let schur = Schur::try_new(shifted, f64::EPSILON, MAX_ITER)
        .expect("shifted QR iteration converges");
    let (_, t) = schur.unpack();
    (0..n).map(|i| (t[(i, i)] - c).norm()).fold(0.0, f64::max)
}
