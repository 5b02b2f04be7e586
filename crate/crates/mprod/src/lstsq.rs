//! Least squares under the M-product: Sylvester embedding, consistency
//! and the general solution family, minimum-norm solutions via
//! Moore–Penrose inverses, and the two-step Tikhonov regularized solver.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use crate::transform::Transform;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegularizationParams {
    pub lambda: f64,
    pub mu: f64,
}

impl RegularizationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "regularization parameters must be positive, got lambda={}, mu={}",
                self.lambda, self.mu
            )));
        }
        Ok(())
    }
}

/// Block embedding of `A1 *_M Y + Y *_M B1 = C1`:
/// `A = [A1 | I]`, `B = [I; B1]`, `C = C1`, so that
/// `A *_M diag(Y, Y) *_M B = A1 *_M Y + Y *_M B1`.
#[derive(Debug, Clone)]
pub struct SylvesterSystem {
    pub a: Tensor3,
    pub b: Tensor3,
    pub c: Tensor3,
    m: usize,
    n: usize,
}

pub fn sylvester_embed(
    a1: &Tensor3,
    b1: &Tensor3,
    c1: &Tensor3,
    t: &Transform,
) -> Result<SylvesterSystem> {
    let (m, ma, pa) = a1.dims();
    let (n, nb, pb) = b1.dims();
    let (cm, cn, pc) = c1.dims();
    if m != ma || n != nb {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester operators must have square slices, got {m}x{ma} and {n}x{nb}"
        )));
    }
    if cm != m || cn != n || pa != pb || pa != pc || pa != t.order() {
        return Err(Error::DimensionMismatch(format!(
            "Sylvester system dims A1 {m}x{ma}x{pa}, B1 {n}x{nb}x{pb}, C1 {cm}x{cn}x{pc}, transform order {}",
            t.order()
        )));
    }
    let a = a1.hconcat(&t.identity_tensor(m))?;
    let b = t.identity_tensor(n).vconcat(b1)?;
    Ok(SylvesterSystem {
        a,
        b,
        c: c1.clone(),
        m,
        n,
    })
}

impl SylvesterSystem {
    /// `diag(Y, Y)`, the structured block unknown.
    pub fn lift(&self, y: &Tensor3) -> Result<Tensor3> {
        if y.dims() != (self.m, self.n, self.c.depth()) {
            return Err(Error::DimensionMismatch(format!(
                "lift of a {:?} tensor into a {}x{} Sylvester block",
                y.dims(),
                self.m,
                self.n
            )));
        }
        let zero_tr = Tensor3::zeros(self.m, self.n, self.c.depth());
        let zero_bl = Tensor3::zeros(self.m, self.n, self.c.depth());
        Tensor3::block2x2(y, &zero_tr, &zero_bl, y)
    }

    /// Structured part of an unconstrained block solution: the average of
    /// the two diagonal blocks. Off-diagonal mass is discarded, so the
    /// result must be residual-checked by the caller.
    pub fn restrict(&self, x: &Tensor3) -> Tensor3 {
        let top = x.sub_block(0, 0, self.m, self.n);
        let bottom = x.sub_block(self.m, self.n, self.m, self.n);
        top.add(&bottom).scale(Complex64::new(0.5, 0.0))
    }
}

/// True iff `A *_M A† *_M C *_M B† *_M B` reproduces C to
/// `1e−9 · max(1, ‖C‖_F)`.
pub fn is_consistent(a: &Tensor3, b: &Tensor3, c: &Tensor3, t: &Transform) -> Result<bool> {
    let ai = t.mp_inverse(a)?;
    let bi = t.mp_inverse(b)?;
    let proj = t.m_product(
        &t.m_product(&t.m_product(&t.m_product(a, &ai)?, c)?, &bi)?,
        b,
    )?;
    Ok(proj.sub(c).frobenius_norm() <= 1e-9 * c.frobenius_norm().max(1.0))
}

/// One member of the solution family of a consistent system:
/// `A† *_M C *_M B† + Z − A† *_M A *_M Z *_M B *_M B†`; sweeping Z over
/// all tensors sweeps every solution.
pub fn general_solution(
    a: &Tensor3,
    b: &Tensor3,
    c: &Tensor3,
    z: &Tensor3,
    t: &Transform,
) -> Result<Tensor3> {
    if !is_consistent(a, b, c, t)? {
        return Err(Error::InconsistentSystem);
    }
    let ai = t.mp_inverse(a)?;
    let bi = t.mp_inverse(b)?;
    let particular = t.m_product(&t.m_product(&ai, c)?, &bi)?;
    let projected = t.m_product(
        &t.m_product(&t.m_product(&t.m_product(&ai, a)?, z)?, b)?,
        &bi,
    )?;
    Ok(particular.add(z).sub(&projected))
}

/// Minimum-norm least-squares solution `A† *_M C *_M B†`.
pub fn min_norm_lstsq(a: &Tensor3, b: &Tensor3, c: &Tensor3, t: &Transform) -> Result<Tensor3> {
    let ai = t.mp_inverse(a)?;
    let bi = t.mp_inverse(b)?;
    t.m_product(&t.m_product(&ai, c)?, &bi)
}

/// Two-step Tikhonov solution
/// `(A* *_M A + λI)⁻¹ *_M A* *_M C *_M B* *_M (B *_M B* + μI)⁻¹`,
/// evaluated slicewise in the hat domain with Cholesky factorizations of
/// the shifted (Hermitian positive definite) operators.
pub fn tikhonov_solve(
    a: &Tensor3,
    b: &Tensor3,
    c: &Tensor3,
    reg: RegularizationParams,
    t: &Transform,
) -> Result<Tensor3> {
    reg.validate()?;
    let (m, ka, pa) = a.dims();
    let (kb, n, pb) = b.dims();
    let (cm, cn, pc) = c.dims();
    if cm != m || cn != n || pa != pb || pa != pc || pa != t.order() {
        return Err(Error::DimensionMismatch(format!(
            "Tikhonov dims A {m}x{ka}x{pa}, B {kb}x{n}x{pb}, C {cm}x{cn}x{pc}, transform order {}",
            t.order()
        )));
    }
    let ahat = t.to_hat_raw(a);
    let bhat = t.to_hat_raw(b);
    let chat = t.to_hat_raw(c);
    let lambda = Complex64::new(reg.lambda, 0.0);
    let mu = Complex64::new(reg.mu, 0.0);
    let mut xhat = Tensor3::zeros(ka, kb, pa);
    for k in 0..pa {
        let ak = ahat.slice(k);
        let bk = bhat.slice(k);
        let ck = chat.slice(k);
        let left = ak.adjoint() * &ak + DMatrix::from_diagonal_element(ka, ka, lambda);
        let right = &bk * bk.adjoint() + DMatrix::from_diagonal_element(kb, kb, mu);
        let left_chol = Cholesky::new(left).ok_or(Error::SingularSlice { slice: k })?;
        let right_chol = Cholesky::new(right).ok_or(Error::SingularSlice { slice: k })?;
        let mid = ak.adjoint() * ck * bk.adjoint();
        let xk = left_chol.solve(&mid) * right_chol.inverse();
        xhat.set_slice(k, &xk);
    }
    Ok(t.from_hat_raw(&xhat))
}

/// Solves the Sylvester equation through the block embedding restricted
/// to the structured unknown `diag(Y, Y)`: per hat slice this is the
/// minimum-norm least-squares solve of
/// `(I ⊗ Â1 + B̂1ᵀ ⊗ I) vec(Y) = vec(Ĉ1)`.
pub fn sylvester_solve(
    a1: &Tensor3,
    b1: &Tensor3,
    c1: &Tensor3,
    t: &Transform,
) -> Result<Tensor3> {
    // dimension checks shared with the embedding
    let sys = sylvester_embed(a1, b1, c1, t)?;
    let (m, n) = (sys.m, sys.n);
    let p = t.order();
    let ahat = t.to_hat_raw(a1);
    let bhat = t.to_hat_raw(b1);
    let chat = t.to_hat_raw(c1);
    let eye_m = DMatrix::<Complex64>::identity(m, m);
    let eye_n = DMatrix::<Complex64>::identity(n, n);
    let mut yhat = Tensor3::zeros(m, n, p);
    for k in 0..p {
        let op = eye_n.kronecker(&ahat.slice(k)) + bhat.slice(k).transpose().kronecker(&eye_m);
        let rhs = DVector::from_column_slice(chat.slice(k).as_slice());
        let svd = op.svd(true, true);
        let smax = svd.singular_values.max();
        let tol = (m * n) as f64 * f64::EPSILON * smax;
        let pinv = svd
            .pseudo_inverse(tol)
            .map_err(|_| Error::SingularSlice { slice: k })?;
        let y = pinv * rhs;
        yhat.set_slice(k, &DMatrix::from_column_slice(m, n, y.as_slice()));
    }
    Ok(t.from_hat_raw(&yhat))
}
