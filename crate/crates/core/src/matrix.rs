//! Dense square matrices: complex operators and real component arrays.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Real;

/// Dense `N x N` complex matrix, row-major.
///
/// Arithmetic operators panic on dimension mismatch; the checked API lives
/// on [`HermitianMatrix`] and the algebra functions.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dim(dim * dim, data.len())?;
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex<T>>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim)
            .map(|i| self[(i, i)])
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// Largest modulus over all entries.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Max-entry norm of `M - M^dagger`.
    pub fn hermiticity_residual(&self) -> T {
        let mut r = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    /// `(A_R, A_I)` with `A = A_R + i A_I`, both Hermitian.
    pub fn hermitian_parts(&self) -> (HermitianMatrix<T>, HermitianMatrix<T>) {
        let adj = self.adjoint();
        let half = T::lit(0.5);
        let re = (self + &adj).scale_real(half);
        let im = (self - &adj).scale(Complex::new(T::zero(), -half));
        (HermitianMatrix(re), HermitianMatrix(im))
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn exp(&self) -> Self {
        let norm = self.data.iter().map(|z| z.norm()).sum::<T>();
        let mut squarings = 0u32;
        let half = T::lit(0.5);
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm *= half;
            squarings += 1;
        }
        let a = self.scale_real(T::lit(0.5).powi(squarings as i32));
        let mut term = Self::identity(self.dim);
        let mut sum = term.clone();
        for k in 1..=24 {
            term = (&term * &a).scale_real(T::one() / T::from_usize_lossy(k));
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Complex Hermitian `N x N` matrix: an observable, a Hamiltonian or a
/// density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T>(ComplexMatrix<T>);

impl<T: Real> HermitianMatrix<T> {
    /// Validates Hermiticity to `T::EXACT_TOL`, relative to the entry scale.
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let residual = m.hermiticity_residual();
        if residual > T::EXACT_TOL * T::one().max(m.max_abs()) {
            return Err(Error::NotHermitian(residual.to_f64_lossy()));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_rows(rows)?)
    }

    /// Convenience constructor from real-part and imaginary-part rows.
    pub fn from_re_im(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = re
            .iter()
            .zip(im)
            .map(|(r, i)| r.iter().zip(i).map(|(a, b)| Complex::new(*a, *b)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Real symmetric matrix viewed as Hermitian.
    pub fn from_real_rows(re: &[Vec<T>]) -> Result<Self> {
        let im: Vec<Vec<T>> = re.iter().map(|r| vec![T::zero(); r.len()]).collect();
        Self::from_re_im(re, &im)
    }

    /// Wraps a matrix that is Hermitian by construction (up to rounding).
    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix<T>) -> Self {
        Self(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.scale_real(s))
    }

    /// `Tr(A)`, real for a Hermitian matrix.
    pub fn trace(&self) -> T {
        self.0.trace().re
    }

    /// `Tr(A B)`; real part only is meaningful for two Hermitian factors.
    pub fn trace_product(&self, other: &Self) -> Result<Complex<T>> {
        check_dim(self.dim(), other.dim())?;
        let n = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        Ok(acc)
    }

    pub fn max_abs(&self) -> T {
        self.0.max_abs()
    }

    pub fn hermiticity_residual(&self) -> T {
        self.0.hermiticity_residual()
    }

    /// Eigenvalues in ascending order.
    ///
    /// Computed with cyclic Jacobi rotations on the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `A` with every
    /// eigenvalue doubled.
    pub fn eigenvalues(&self) -> Vec<T> {
        let n = self.dim();
        let m = 2 * n;
        let mut a = SquareMatrix::zeros(m);
        for i in 0..n {
            for j in 0..n {
                let z = self.0[(i, j)];
                // Hermitian part only, so rounding asymmetry cannot stall Jacobi
                let w = (z + self.0[(j, i)].conj()) * T::lit(0.5);
                a[(i, j)] = w.re;
                a[(i + n, j + n)] = w.re;
                a[(i, j + n)] = -w.im;
                a[(i + n, j)] = w.im;
            }
        }
        let mut values = symmetric_eigenvalues(a);
        values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        values.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().into_iter().fold(T::infinity(), T::min)
    }
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.
fn symmetric_eigenvalues<T: Real>(mut a: SquareMatrix<T>) -> Vec<T> {
    let n = a.dim();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut scale = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
                scale += a[(i, j)] * a[(i, j)];
            }
        }
        if off <= T::epsilon() * T::epsilon() * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Dense real `n x n` matrix, used for tensor components and Jacobians.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            check_dim(dim, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|x| x.abs()).fold(T::zero(), T::max)
    }

    /// Max-entry distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max)
    }

    /// `self * v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// `v^T * self`.
    pub fn apply_left(&self, v: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| v[i] * self[(i, j)]).sum())
            .collect()
    }

    /// Bilinear contraction `a^T M b`.
    pub fn bilinear(&self, a: &[T], b: &[T]) -> T {
        let mb = self.apply(b);
        a.iter().zip(&mb).map(|(x, y)| *x * *y).sum()
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    /// `None` when a pivot falls below `tiny` (numerically singular).
    pub fn solve(&self, b: &[T], tiny: T) -> Option<Vec<T>> {
        let n = self.dim;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                a[(i, col)]
                    .abs()
                    .partial_cmp(&a[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if !(a[(pivot, col)].abs() > tiny) {
                return None;
            }
            if pivot != col {
                for k in 0..n {
                    let tmp = a[(col, k)];
                    a[(col, k)] = a[(pivot, k)];
                    a[(pivot, k)] = tmp;
                }
                x.swap(col, pivot);
            }
            for row in (col + 1)..n {
                let factor = a[(row, col)] / a[(col, col)];
                for k in col..n {
                    let v = a[(col, k)];
                    a[(row, k)] -= factor * v;
                }
                let v = x[col];
                x[row] -= factor * v;
            }
        }
        for col in (0..n).rev() {
            let s: T = ((col + 1)..n).map(|k| a[(col, k)] * x[k]).sum();
            x[col] = (x[col] - s) / a[(col, col)];
        }
        Some(x)
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix::from_fn(self.dim, |i, j| (0..self.dim).map(|k| self[(i, k)] * rhs[(k, j)]).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_non_finite() {
        let r = ComplexMatrix::<f64>::new(1, vec![c(f64::NAN, 0.0)]);
        assert_eq!(r, Err(Error::NonFinite));
    }

    #[test]
    fn eigenvalues_of_pauli_y() {
        let y = HermitianMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let ev = y.eigenvalues();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let d =
            HermitianMatrix::from_real_rows(&[vec![3.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 0.5]]).unwrap();
        let ev = d.eigenvalues();
        assert_eq!(ev.len(), 3);
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[2], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn exp_of_diagonal_phase() {
        // exp(i t Z) = diag(e^{it}, e^{-it})
        let t = 0.7;
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, t), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -t)]]).unwrap();
        let e = m.exp();
        assert_abs_diff_eq!(e[(0, 0)].re, t.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 0)].im, t.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 1)].im, -t.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn exp_of_large_argument_stays_unitary() {
        let t = 25.0;
        let m = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, t)], vec![c(0.0, t), c(0.0, 0.0)]]).unwrap();
        let u = m.exp();
        let uu = &u * &u.adjoint();
        let resid = (&uu - &ComplexMatrix::identity(2)).max_abs();
        assert!(resid < 1e-12, "{resid}");
    }
}
