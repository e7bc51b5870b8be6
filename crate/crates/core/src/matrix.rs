//! Dense square complex matrices and complex vectors.
//!
//! Storage is row-major. Every constructor rejects NaN and infinite entries,
//! and fallible arithmetic re-checks its output so that overflow cannot leak
//! a non-finite value into a later computation.
//!
//! The inner product is linear in its first argument:
//! `inner(x, y) = sum_i x[i] * conj(y[i])`, so `<Tx, x>` reads the same as
//! it does on paper.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

fn check_finite(entries: &[Complex]) -> Result<()> {
    match entries
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Square complex matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex>,
}

impl Matrix {
    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn new(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::NotSquare { len: data.len() });
        }
        check_finite(&data)?;
        Ok(Matrix { dim, data })
    }

    /// Builds a matrix from rows; ragged or non-square input is rejected.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::new(dim, data)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<Complex>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Complex::new(x, 0.0)).collect())
            .collect();
        Matrix::from_rows(&rows)
    }

    /// Internal constructor for results of arithmetic on already-valid data.
    pub(crate) fn from_raw(dim: usize, data: Vec<Complex>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Matrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Matrix::from_raw(dim, vec![ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag(values: &[Complex]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        check_finite(values)?;
        let mut m = Matrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        Ok(m)
    }

    pub fn real_diag(values: &[f64]) -> Result<Self> {
        let v: Vec<Complex> = values.iter().map(|&x| Complex::new(x, 0.0)).collect();
        Matrix::diag(&v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub(crate) fn set(&mut self, row: usize, col: usize, value: Complex) {
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn column(&self, col: usize) -> Vector {
        Vector {
            data: (0..self.dim).map(|r| self.get(r, col)).collect(),
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.data[j * n + i].conj());
            }
        }
        Matrix::from_raw(n, out)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        self.same_dim(other)?;
        let out = self.mul(other);
        check_finite(&out.data)?;
        Ok(out)
    }

    /// Unchecked product for internal use on matrices known to share a dimension.
    pub(crate) fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        debug_assert_eq!(n, other.dim);
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Matrix::from_raw(n, out)
    }

    /// `self^k` by repeated squaring; `M^0 = I`.
    pub fn pow(&self, k: u32) -> Matrix {
        let mut result = Matrix::identity(self.dim);
        let mut base = self.clone();
        let mut e = k;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { result.mul(&base) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn scale(&self, c: Complex) -> Matrix {
        Matrix::from_raw(self.dim, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Matrix {
        Matrix::from_raw(self.dim, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        let out = Matrix::from_raw(self.dim, data);
        check_finite(&out.data)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        let out = Matrix::from_raw(self.dim, data);
        check_finite(&out.data)?;
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.dim(),
            });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        let data = self
            .rows()
            .map(|row| row.iter().zip(&x.data).map(|(a, b)| a * b).sum())
            .collect();
        Vector { data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm of `M - M*`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, (self.get(i, j) + self.get(j, i).conj()) * 0.5);
            }
        }
        out
    }

    /// `M*M - MM*`, the commutator that vanishes exactly for normal matrices.
    pub fn self_commutator(&self) -> Matrix {
        let a = self.adjoint();
        let n = self.dim;
        let left = a.mul(self);
        let right = self.mul(&a);
        Matrix::from_raw(
            n,
            left.data.iter().zip(&right.data).map(|(x, y)| x - y).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&z| z == ZERO)
    }

    fn same_dim(&self, other: &Matrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<Complex>,
}

impl Vector {
    pub fn new(data: Vec<Complex>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        check_finite(&data)?;
        Ok(Vector { data })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Vector::new(values.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    pub(crate) fn from_raw(data: Vec<Complex>) -> Self {
        Vector { data }
    }

    /// Standard basis vector `e_index` of length `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Vector { data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    /// `<self, other>`, linear in `self`.
    pub fn inner(&self, other: &Vector) -> Result<Complex> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Vector) -> Complex {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex) -> Vector {
        Vector {
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Vector, op: impl Fn(Complex, Complex) -> Complex) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let data: Vec<Complex> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| op(a, b))
            .collect();
        check_finite(&data)?;
        Ok(Vector { data })
    }
}

/// `<x, y> = sum_i x[i] * conj(y[i])`.
pub fn inner(x: &Vector, y: &Vector) -> Result<Complex> {
    x.inner(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn adjoint_examples() {
        let z = Matrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let expected = Matrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(z.adjoint(), expected);

        let i1 = Matrix::new(1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(i1.adjoint().get(0, 0), c(0.0, -1.0));

        let h = Matrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, -3.0)], vec![c(1.0, 3.0), c(-1.0, 0.0)]])
            .unwrap();
        assert_eq!(h.adjoint(), h);
    }

    #[test]
    fn matmul_examples() {
        let m = Matrix::from_real_rows(&[[0.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        let sq = Matrix::from_real_rows(&[[0.0, 0.0, 2.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(m.matmul(&m).unwrap(), sq);
        assert_eq!(Matrix::identity(3).matmul(&m).unwrap(), m);

        let z = Matrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(z.matmul(&z).unwrap().is_zero());

        let err = Matrix::identity(2).matmul(&Matrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn matpow_examples() {
        let m = Matrix::from_real_rows(&[[0.0, 1.0, 2.0], [0.0, 0.0, 3.0], [0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(m.pow(0), Matrix::identity(3));
        assert_eq!(m.pow(1), m);
        assert!(m.pow(3).is_zero());
        assert!(!m.pow(2).is_zero());
        assert_eq!(Matrix::identity(4).pow(5), Matrix::identity(4));
    }

    #[test]
    fn inner_product_convention() {
        let e1 = Vector::basis(2, 0);
        let e2 = Vector::basis(2, 1);
        assert_eq!(inner(&e1, &e1).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));
        let x = Vector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(inner(&x, &e1).unwrap(), c(1.0, 0.0));
        // linear in the first slot, conjugate-linear in the second
        let ix = x.scale(c(0.0, 1.0));
        assert_eq!(inner(&ix, &e1).unwrap(), c(0.0, 1.0));
        assert_eq!(inner(&e1, &ix).unwrap(), c(0.0, -1.0));
        assert!(inner(&e1, &Vector::basis(3, 0)).is_err());
    }

    #[test]
    fn vector_plumbing() {
        assert_eq!(Vector::basis(3, 1).norm(), 1.0);
        assert_eq!(Vector::from_real(&[3.0, 4.0]).unwrap().norm(), 5.0);
        let x = Vector::new(vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        assert_eq!(Matrix::identity(2).apply(&x).unwrap(), x);
        assert_eq!(x.add(&x).unwrap().sub(&x).unwrap(), x);
        assert!(Matrix::identity(3).apply(&x).is_err());
    }

    #[test]
    fn rejects_non_finite_and_malformed() {
        assert_eq!(
            Matrix::new(1, vec![c(f64::NAN, 0.0)]).unwrap_err(),
            Error::NonFinite { index: 0 }
        );
        assert!(Matrix::new(2, vec![ONE; 3]).is_err());
        assert_eq!(Matrix::new(0, vec![]).unwrap_err(), Error::EmptyMatrix);
        assert!(Vector::new(vec![c(0.0, f64::INFINITY)]).is_err());
        assert!(Matrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
        let big = Matrix::new(1, vec![c(1e300, 0.0)]).unwrap();
        assert!(big.matmul(&big).is_err());
    }
}
