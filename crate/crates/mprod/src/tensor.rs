//! Dense third-order complex tensor storage and transform-independent
//! operations: facewise products, norms, block constructions, and the
//! diagonal/lower/upper masking used by the splitting constructions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense `m x n x p` complex tensor.
///
/// Storage is slice-major (the frontal-slice index `k` is outermost) and
/// row-major within each slice, so `data[k*m*n + i*n + j] = A(i,j,k)`.
/// This layout is also the on-disk contract of the MT3D format.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    m: usize,
    n: usize,
    p: usize,
    data: Vec<Complex64>,
}

impl Tensor3 {
    pub fn zeros(m: usize, n: usize, p: usize) -> Self {
        assert!(m > 0 && n > 0 && p > 0, "tensor dimensions must be positive");
        Tensor3 {
            m,
            n,
            p,
            data: vec![Complex64::new(0.0, 0.0); m * n * p],
        }
    }

    pub fn from_data(m: usize, n: usize, p: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != m * n * p {
            return Err(Error::DimensionMismatch(format!(
                "data length {} != {}x{}x{}",
                data.len(),
                m,
                n,
                p
            )));
        }
        Ok(Tensor3 { m, n, p, data })
    }

    /// Builds a tensor from per-slice real matrices given as nested rows.
    pub fn from_real_slices(slices: &[Vec<Vec<f64>>]) -> Self {
        let p = slices.len();
        let m = slices[0].len();
        let n = slices[0][0].len();
        let mut t = Tensor3::zeros(m, n, p);
        for (k, s) in slices.iter().enumerate() {
            for (i, row) in s.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    t[(i, j, k)] = Complex64::new(v, 0.0);
                }
            }
        }
        t
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m, self.n, self.p)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.p
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// The `m x n` frontal slice `A(:,:,k)`.
    pub fn slice(&self, k: usize) -> DMatrix<Complex64> {
        let base = k * self.m * self.n;
        DMatrix::from_fn(self.m, self.n, |i, j| self.data[base + i * self.n + j])
    }

    pub fn set_slice(&mut self, k: usize, s: &DMatrix<Complex64>) {
        assert_eq!((s.nrows(), s.ncols()), (self.m, self.n));
        let base = k * self.m * self.n;
        for i in 0..self.m {
            for j in 0..self.n {
                self.data[base + i * self.n + j] = s[(i, j)];
            }
        }
    }

    /// Assembles a tensor from `p` equally sized frontal slices.
    pub fn from_slices(slices: &[DMatrix<Complex64>]) -> Self {
        let p = slices.len();
        let (m, n) = (slices[0].nrows(), slices[0].ncols());
        let mut t = Tensor3::zeros(m, n, p);
        for (k, s) in slices.iter().enumerate() {
            t.set_slice(k, s);
        }
        t
    }

    /// Facewise product: slice-by-slice matrix multiplication.
    pub fn face_product(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.n != other.m || self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "face product {}x{}x{} with {}x{}x{}",
                self.m, self.n, self.p, other.m, other.n, other.p
            )));
        }
        let mut out = Tensor3::zeros(self.m, other.n, self.p);
        for k in 0..self.p {
            out.set_slice(k, &(self.slice(k) * other.slice(k)));
        }
        Ok(out)
    }

    /// Frobenius norm over the original-domain entries.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Tensor3 {
        let data = self.data.iter().map(|z| z * s).collect();
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            data,
        }
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), other.dims());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            data,
        }
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        assert_eq!(self.dims(), other.dims());
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Tensor3 {
            m: self.m,
            n: self.n,
            p: self.p,
            data,
        }
    }

    /// Diagonal part of every frontal slice; off-diagonal entries zeroed.
    pub fn diag_part(&self) -> Result<Tensor3> {
        self.require_square()?;
        let mut out = Tensor3::zeros(self.m, self.n, self.p);
        for k in 0..self.p {
            for i in 0..self.m {
                out[(i, i, k)] = self[(i, i, k)];
            }
        }
        Ok(out)
    }

    /// Strictly lower-triangular part of every frontal slice.
    pub fn strict_lower_part(&self) -> Result<Tensor3> {
        self.require_square()?;
        let mut out = Tensor3::zeros(self.m, self.n, self.p);
        for k in 0..self.p {
            for i in 0..self.m {
                for j in 0..i {
                    out[(i, j, k)] = self[(i, j, k)];
                }
            }
        }
        Ok(out)
    }

    /// Strictly upper-triangular part of every frontal slice.
    pub fn strict_upper_part(&self) -> Result<Tensor3> {
        self.require_square()?;
        let mut out = Tensor3::zeros(self.m, self.n, self.p);
        for k in 0..self.p {
            for i in 0..self.m {
                for j in (i + 1)..self.n {
                    out[(i, j, k)] = self[(i, j, k)];
                }
            }
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<()> {
        if self.m != self.n {
            return Err(Error::DimensionMismatch(format!(
                "operation requires square slices, got {}x{}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    /// Row block tensor `[A | B]`: slicewise horizontal concatenation.
    pub fn hconcat(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.m != other.m || self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "hconcat {}x{}x{} with {}x{}x{}",
                self.m, self.n, self.p, other.m, other.n, other.p
            )));
        }
        let mut out = Tensor3::zeros(self.m, self.n + other.n, self.p);
        for k in 0..self.p {
            for i in 0..self.m {
                for j in 0..self.n {
                    out[(i, j, k)] = self[(i, j, k)];
                }
                for j in 0..other.n {
                    out[(i, self.n + j, k)] = other[(i, j, k)];
                }
            }
        }
        Ok(out)
    }

    /// Column block tensor: slicewise vertical concatenation.
    pub fn vconcat(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.n != other.n || self.p != other.p {
            return Err(Error::DimensionMismatch(format!(
                "vconcat {}x{}x{} with {}x{}x{}",
                self.m, self.n, self.p, other.m, other.n, other.p
            )));
        }
        let mut out = Tensor3::zeros(self.m + other.m, self.n, self.p);
        for k in 0..self.p {
            for j in 0..self.n {
                for i in 0..self.m {
                    out[(i, j, k)] = self[(i, j, k)];
                }
                for i in 0..other.m {
                    out[(self.m + i, j, k)] = other[(i, j, k)];
                }
            }
        }
        Ok(out)
    }

    /// 2x2 block tensor `[[b, c], [d, e]]` assembled slicewise.
    pub fn block2x2(b: &Tensor3, c: &Tensor3, d: &Tensor3, e: &Tensor3) -> Result<Tensor3> {
        let top = b.hconcat(c)?;
        let bottom = d.hconcat(e)?;
        top.vconcat(&bottom)
    }

    /// Extracts the `rows x cols` sub-tensor starting at (`row0`, `col0`) in
    /// every slice.
    pub fn sub_block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Tensor3 {
        assert!(row0 + rows <= self.m && col0 + cols <= self.n);
        let mut out = Tensor3::zeros(rows, cols, self.p);
        for k in 0..self.p {
            for i in 0..rows {
                for j in 0..cols {
                    out[(i, j, k)] = self[(row0 + i, col0 + j, k)];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize, usize)> for Tensor3 {
    type Output = Complex64;

    fn index(&self, (i, j, k): (usize, usize, usize)) -> &Complex64 {
        debug_assert!(i < self.m && j < self.n && k < self.p);
        &self.data[k * self.m * self.n + i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.m && j < self.n && k < self.p);
        &mut self.data[k * self.m * self.n + i * self.n + j]
    }
}
