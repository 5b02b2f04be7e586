//! Tensor splittings `A = F − G`: the parameterized AOR family, the
//! regular/weak-regular/nonnegative classification, and the spectral
//! radius governing convergence of the induced iteration.

use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use crate::transform::Transform;
use num_complex::Complex64;

/// Nesting order: regular ⊂ weak regular ⊂ nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingClass {
    Regular,
    WeakRegular,
    Nonnegative,
    Unclassified,
}

impl std::fmt::Display for SplittingClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SplittingClass::Regular => "regular",
            SplittingClass::WeakRegular => "weak_regular",
            SplittingClass::Nonnegative => "nonnegative",
            SplittingClass::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Splitting {
    pub f: Tensor3,
    pub g: Tensor3,
    pub class: SplittingClass,
}

impl Splitting {
    /// Splitting with `G = F − A`, left unclassified.
    pub fn from_f(a: &Tensor3, f: Tensor3) -> Self {
        let g = f.sub(a);
        Splitting {
            f,
            g,
            class: SplittingClass::Unclassified,
        }
    }

    /// The trivial exact splitting `F = A`, `G = O`.
    pub fn exact(a: &Tensor3) -> Self {
        Splitting::from_f(a, a.clone())
    }

    /// `ρ(F⁻¹ *_M G)`, the iteration-governing radius.
    pub fn convergence_radius(&self, t: &Transform) -> Result<f64> {
        let f_inv = t.inverse(&self.f)?;
        t.spectral_radius(&t.m_product(&f_inv, &self.g)?)
    }

    /// Open upper bound `2 / (1 + ρ(F⁻¹ *_M G))` for the step parameter.
    pub fn alpha_bound(&self, t: &Transform) -> Result<f64> {
        Ok(2.0 / (1.0 + self.convergence_radius(t)?))
    }
}

/// Relaxation `ω` and acceleration `κ` for the AOR splitting family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AorParams {
    pub omega: f64,
    pub kappa: f64,
}

impl AorParams {
    pub const JACOBI: AorParams = AorParams {
        omega: 1.0,
        kappa: 0.0,
    };
    pub const GAUSS_SEIDEL: AorParams = AorParams {
        omega: 1.0,
        kappa: 1.0,
    };

    pub fn sor(omega: f64) -> AorParams {
        AorParams {
            omega,
            kappa: omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega == 0.0 || !(0.0..=2.0).contains(&self.omega.abs()) {
            return Err(Error::InvalidParameter(format!(
                "omega must be nonzero in (0, 2], got {}",
                self.omega
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "kappa must be nonnegative, got {}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Diagonal, strictly lower, and strictly upper parts of the original
/// frontal slices; `D + L + U` reassembles `A` entry for entry.
pub fn extract_dlu(a: &Tensor3) -> Result<(Tensor3, Tensor3, Tensor3)> {
    Ok((
        a.diag_part()?,
        a.strict_lower_part()?,
        a.strict_upper_part()?,
    ))
}

/// AOR splitting `F = (1/ω)(D + κ·L)`, `G = F − A`.
///
/// ω=1, κ=0 is the Jacobi splitting; ω=1, κ=1 Gauss–Seidel; ω=κ SOR.
/// Fails with `ZeroDiagonal` when a hat-domain diagonal entry of `D`
/// vanishes (an original-domain nonzero diagonal does not guarantee
/// hat-domain invertibility of `F`).
pub fn aor_splitting(a: &Tensor3, params: AorParams, t: &Transform) -> Result<Splitting> {
    params.validate()?;
    let (d, l, _) = extract_dlu(a)?;
    let hat_d = t.to_hat_raw(&d);
    let (m, _, p) = hat_d.dims();
    for k in 0..p {
        let scale = (0..m).map(|i| hat_d[(i, i, k)].norm()).fold(0.0, f64::max);
        for i in 0..m {
            if hat_d[(i, i, k)].norm() <= 1e-14 * scale.max(1e-300) {
                return Err(Error::ZeroDiagonal { slice: k, row: i });
            }
        }
    }
    let inv_omega = Complex64::new(1.0 / params.omega, 0.0);
    let kappa = Complex64::new(params.kappa, 0.0);
    let f = d.add(&l.scale(kappa)).scale(inv_omega);
    Ok(Splitting::from_f(a, f))
}

/// Strongest applicable label for `A = F − G` under the hat-domain
/// nonnegativity predicates.
pub fn classify(a: &Tensor3, f: &Tensor3, g: &Tensor3, t: &Transform) -> Result<SplittingClass> {
    let defect = f.sub(g).sub(a).frobenius_norm();
    if defect > 1e-10 * a.frobenius_norm().max(1.0) {
        return Err(Error::InconsistentSplitting { defect });
    }
    let f_inv = t.inverse(f)?;
    let f_inv_nonneg = t.predicates(&f_inv)?.nonnegative;
    let g_nonneg = t.predicates(g)?.nonnegative;
    let fg_nonneg = t.predicates(&t.m_product(&f_inv, g)?)?.nonnegative;
    Ok(if f_inv_nonneg && g_nonneg {
        SplittingClass::Regular
    } else if f_inv_nonneg && fg_nonneg {
        SplittingClass::WeakRegular
    } else if fg_nonneg {
        SplittingClass::Nonnegative
    } else {
        SplittingClass::Unclassified
    })
}

/// `aor_splitting` followed by `classify`.
pub fn classified_aor_splitting(
    a: &Tensor3,
    params: AorParams,
    t: &Transform,
) -> Result<Splitting> {
    let mut s = aor_splitting(a, params, t)?;
    s.class = classify(a, &s.f, &s.g, t)?;
    Ok(s)
}
