//! The carrier space of states: density matrices, their coordinates
//! `Y_mu = Tr(rho s_mu) / 2`, and the probability distributions they induce.

use num_complex::Complex;

use crate::algebra::AlgebraBasis;
use crate::error::{check_dim, Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;

/// Vector of a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct HilbertVector<T> {
    components: Vec<Complex<T>>,
}

impl<T: Real> HilbertVector<T> {
    pub fn new(components: Vec<Complex<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { components })
    }

    pub fn from_real(components: &[T]) -> Result<Self> {
        Self::new(components.iter().map(|x| Complex::new(*x, T::zero())).collect())
    }

    /// Standard basis vector `|k>`.
    pub fn basis_vector(dim: usize, k: usize) -> Self {
        let mut components = vec![Complex::new(T::zero(), T::zero()); dim];
        components[k] = Complex::new(T::one(), T::zero());
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex<T>] {
        &self.components
    }

    pub fn norm_sqr(&self) -> T {
        self.components.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.components
            .iter()
            .zip(&other.components)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * *b)
    }
}

/// Positive semidefinite, trace-one Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T>(HermitianMatrix<T>);

impl<T: Real> DensityMatrix<T> {
    pub fn new(rho: HermitianMatrix<T>) -> Result<Self> {
        let tr = rho.trace();
        if (tr - T::one()).abs() > T::EXACT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from one")));
        }
        let min = rho.min_eigenvalue();
        if min < -T::POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(Self(rho))
    }

    /// Rank-one projector `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &HilbertVector<T>) -> Result<Self> {
        let norm = psi.norm_sqr();
        if !(norm > T::zero()) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let c = psi.components();
        let m = ComplexMatrix::from_fn(psi.dim(), |i, j| c[i] * c[j].conj() / norm);
        Ok(Self(HermitianMatrix::from_matrix_unchecked(m)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(HermitianMatrix::identity(dim).scale(T::one() / T::from_usize_lossy(dim)))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix<T> {
        self.0
    }

    /// `Tr(rho A)`.
    pub fn expectation(&self, a: &HermitianMatrix<T>) -> Result<T> {
        Ok(self.0.trace_product(a)?.re)
    }
}

pub fn pure_state<T: Real>(psi: &HilbertVector<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::pure(psi)
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution<T> {
    weights: Vec<T>,
}

impl<T: Real> ProbabilityDistribution<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("empty".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidWeights(format!("weight {w} is not a nonnegative number")));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::EXACT_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `sum_k lambda_k rho_k`.
pub fn convex_combine<T: Real>(
    states: &[DensityMatrix<T>],
    weights: &ProbabilityDistribution<T>,
) -> Result<DensityMatrix<T>> {
    check_dim(states.len(), weights.len())?;
    let dim = states[0].dim();
    let mut acc = HermitianMatrix::zeros(dim);
    for (rho, w) in states.iter().zip(weights.weights()) {
        check_dim(dim, rho.dim())?;
        acc = acc.add(&rho.matrix().scale(*w))?;
    }
    DensityMatrix::new(acc)
}

/// Outcome probabilities `<e_j| rho |e_j>` for an orthonormal family.
pub fn probability_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    basis_vectors: &[HilbertVector<T>],
) -> Result<ProbabilityDistribution<T>> {
    let n = rho.dim();
    let mut residual = T::zero();
    for (j, a) in basis_vectors.iter().enumerate() {
        check_dim(n, a.dim())?;
        for (k, b) in basis_vectors.iter().enumerate() {
            let target = if j == k { T::one() } else { T::zero() };
            residual = residual.max((a.inner(b) - Complex::new(target, T::zero())).norm());
        }
    }
    if residual > T::ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(residual.to_f64_lossy()));
    }
    let m = rho.matrix().as_matrix();
    let weights = basis_vectors
        .iter()
        .map(|e| {
            let c = e.components();
            let mut acc = Complex::new(T::zero(), T::zero());
            for i in 0..n {
                for k in 0..n {
                    acc += c[i].conj() * m[(i, k)] * c[k];
                }
            }
            // clamp rounding below zero
            acc.re.max(T::zero())
        })
        .collect();
    ProbabilityDistribution::new(weights)
}

/// Real coordinate vector `Y in R^{N^2}` on `u*(N)`.
///
/// Any coordinate vector can be represented; whether it is a physical state
/// is decided by [`StatePoint::to_density`].
#[derive(Debug, Clone, PartialEq)]
pub struct StatePoint<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Real> StatePoint<T> {
    pub fn new(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        check_dim(dim * dim, coords.len())?;
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, coords })
    }

    /// Two-level point from a Bloch vector `x`: `Y = (1/2, x/2)`.
    pub fn from_bloch(x: [T; 3]) -> Self {
        let half = T::lit(0.5);
        Self {
            dim: 2,
            coords: vec![half, x[0] * half, x[1] * half, x[2] * half],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Bloch vector `x_k = 2 Y_k` for a two-level point.
    pub fn bloch_vector(&self) -> Option<[T; 3]> {
        (self.dim == 2).then(|| {
            let two = T::lit(2.0);
            [self.coords[1] * two, self.coords[2] * two, self.coords[3] * two]
        })
    }

    /// `Tr(rho^2) = 2 Y.Y`.
    pub fn purity(&self) -> T {
        T::lit(2.0) * self.coords.iter().map(|y| *y * *y).sum::<T>()
    }

    /// `rho = sum_mu Y_mu s_mu`, rejecting points outside the state body.
    pub fn to_density(&self, basis: &AlgebraBasis<T>) -> Result<DensityMatrix<T>> {
        from_point(self, basis)
    }

    pub fn is_state(&self, basis: &AlgebraBasis<T>) -> bool {
        self.to_density(basis).is_ok()
    }
}

pub fn to_point<T: Real>(rho: &DensityMatrix<T>, basis: &AlgebraBasis<T>) -> Result<StatePoint<T>> {
    check_dim(basis.dim(), rho.dim())?;
    StatePoint::new(basis.dim(), basis.coordinates(rho.matrix())?)
}

pub fn from_point<T: Real>(y: &StatePoint<T>, basis: &AlgebraBasis<T>) -> Result<DensityMatrix<T>> {
    check_dim(basis.dim(), y.dim())?;
    let y0 = y.coords()[0];
    let expected = basis.trace_coordinate();
    if (y0 - expected).abs() > T::EXACT_TOL {
        return Err(Error::InvalidState(format!(
            "trace coordinate Y_0 = {y0}, expected {expected}"
        )));
    }
    DensityMatrix::new(basis.reconstruct(y.coords())?)
}

pub fn purity<T: Real>(y: &StatePoint<T>) -> T {
    y.purity()
}
