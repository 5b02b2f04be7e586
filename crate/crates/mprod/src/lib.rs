//! Dense third-order tensor algebra under the M-product, with two-step
//! parameterized iterative solvers for `A *_M X *_M B = C`, regularized
//! least squares, and a Gaussian image-deblurring application.
//!
//! All slicewise algebra happens in the transform ("hat") domain
//! `Â = A ×₃ M`, where the M-product reduces to independent matrix
//! products per frontal slice.

pub mod algebra;
pub mod cli;
pub mod deblur;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod lstsq;
pub mod random;
pub mod solver;
pub mod splitting;
pub mod tensor;
pub mod transform;

pub use error::{Error, Result};
pub use tensor::Tensor3;
pub use transform::Transform;
