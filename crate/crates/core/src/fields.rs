//! Scalar fields and affine contravariant bivector fields on `R^{N^2}`.
//!
//! The Poisson tensor `Lambda` and the Jordan tensor `G` are both linear in
//! the coordinates, `T^{mu nu}(Y) = s^lambda_{mu nu} Y_lambda`, with `s` the
//! Lie (`c`) or Jordan (`d`) structure constants. Contracting them with the
//! differentials of expectation functions reproduces `e_{[A,B]}` and
//! `e_{A o B}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraBasis, StructureConstants};
use crate::error::{check_dim, Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, SquareMatrix};
use crate::scalar::Real;
use crate::state::StatePoint;

/// Real function on the coordinate space with gradient access.
pub trait ScalarField<T: Real> {
    /// Number of coordinates the field expects.
    fn size(&self) -> usize;

    fn value(&self, y: &[T]) -> T;

    /// Central differences with `T::GRADIENT_STEP` unless overridden.
    fn gradient(&self, y: &[T]) -> Vec<T> {
        central_gradient(|p| self.value(p), y, T::GRADIENT_STEP)
    }
}

impl<T: Real, S: ScalarField<T> + ?Sized> ScalarField<T> for &S {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn value(&self, y: &[T]) -> T {
        (**self).value(y)
    }
    fn gradient(&self, y: &[T]) -> Vec<T> {
        (**self).gradient(y)
    }
}

impl<T: Real, S: ScalarField<T> + ?Sized> ScalarField<T> for Box<S> {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn value(&self, y: &[T]) -> T {
        (**self).value(y)
    }
    fn gradient(&self, y: &[T]) -> Vec<T> {
        (**self).gradient(y)
    }
}

/// Central-difference gradient of `f` at `y` with step `h`.
pub fn central_gradient<T: Real>(mut f: impl FnMut(&[T]) -> T, y: &[T], h: T) -> Vec<T> {
    let mut p = y.to_vec();
    let two_h = h + h;
    (0..y.len())
        .map(|k| {
            p[k] = y[k] + h;
            let plus = f(&p);
            p[k] = y[k] - h;
            let minus = f(&p);
            p[k] = y[k];
            (plus - minus) / two_h
        })
        .collect()
}

/// `F(Y) = constant + sum_mu coeffs_mu Y_mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearField<T> {
    coeffs: Vec<T>,
    constant: T,
}

impl<T: Real> LinearField<T> {
    pub fn new(coeffs: Vec<T>, constant: T) -> Self {
        Self { coeffs, constant }
    }

    /// The coordinate function `Y_k`.
    pub fn coordinate(size: usize, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); size];
        coeffs[k] = T::one();
        Self::new(coeffs, T::zero())
    }

    pub fn constant(size: usize, value: T) -> Self {
        Self::new(vec![T::zero(); size], value)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn offset(&self) -> T {
        self.constant
    }
}

impl<T: Real> ScalarField<T> for LinearField<T> {
    fn size(&self) -> usize {
        self.coeffs.len()
    }

    fn value(&self, y: &[T]) -> T {
        self.constant + self.coeffs.iter().zip(y).map(|(a, b)| *a * *b).sum::<T>()
    }

    fn gradient(&self, _y: &[T]) -> Vec<T> {
        self.coeffs.clone()
    }
}

/// One monomial `coeff * prod_mu Y_mu^{exponents_mu}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialTerm<T> {
    pub coeff: T,
    pub exponents: Vec<u32>,
}

/// Serializable description of a polynomial scalar field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialFieldSpec<T> {
    pub terms: Vec<PolynomialTerm<T>>,
}

/// Polynomial field with exact gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialField<T> {
    size: usize,
    terms: Vec<PolynomialTerm<T>>,
}

impl<T: Real> PolynomialField<T> {
    pub fn from_spec(spec: &PolynomialFieldSpec<T>) -> Result<Self> {
        let first = spec
            .terms
            .first()
            .ok_or_else(|| Error::InvalidInput("polynomial needs at least one term".into()))?;
        let size = first.exponents.len();
        for t in &spec.terms {
            check_dim(size, t.exponents.len())?;
            if !t.coeff.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self {
            size,
            terms: spec.terms.clone(),
        })
    }

    /// Convenience: single monomial with unit coefficient.
    pub fn monomial(size: usize, powers: &[(usize, u32)]) -> Self {
        let mut exponents = vec![0; size];
        for (k, p) in powers {
            exponents[*k] += *p;
        }
        Self {
            size,
            terms: vec![PolynomialTerm {
                coeff: T::one(),
                exponents,
            }],
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum()).max().unwrap_or(0)
    }

    pub fn spec(&self) -> PolynomialFieldSpec<T> {
        PolynomialFieldSpec {
            terms: self.terms.clone(),
        }
    }
}

impl<T: Real> ScalarField<T> for PolynomialField<T> {
    fn size(&self) -> usize {
        self.size
    }

    fn value(&self, y: &[T]) -> T {
        self.terms
            .iter()
            .map(|t| {
                t.exponents
                    .iter()
                    .zip(y)
                    .fold(t.coeff, |acc, (e, x)| acc * x.powi(*e as i32))
            })
            .sum()
    }

    fn gradient(&self, y: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.size];
        for t in &self.terms {
            for (k, gk) in g.iter_mut().enumerate() {
                let ek = t.exponents[k];
                if ek == 0 {
                    continue;
                }
                let mut v = t.coeff * T::from_usize_lossy(ek as usize) * y[k].powi(ek as i32 - 1);
                for (j, (e, x)) in t.exponents.iter().zip(y).enumerate() {
                    if j != k {
                        v *= x.powi(*e as i32);
                    }
                }
                *gk += v;
            }
        }
        g
    }
}

/// Arbitrary closure field; gradient by central differences.
pub struct FnField<F> {
    size: usize,
    f: F,
}

impl<F> FnField<F> {
    pub fn new(size: usize, f: F) -> Self {
        Self { size, f }
    }
}

impl<T: Real, F: Fn(&[T]) -> T> ScalarField<T> for FnField<F> {
    fn size(&self) -> usize {
        self.size
    }
    fn value(&self, y: &[T]) -> T {
        (self.f)(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

/// Rank-2 contravariant field with components linear in `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBivectorField<T> {
    dim: usize,
    coeffs: StructureConstants<T>,
    symmetry: Symmetry,
}

impl<T: Real> AffineBivectorField<T> {
    /// Checks the declared symmetry exactly, entry by entry.
    pub fn new(dim: usize, coeffs: StructureConstants<T>, symmetry: Symmetry) -> Result<Self> {
        check_dim(dim * dim, coeffs.size())?;
        let m = coeffs.size();
        for mu in 0..m {
            for nu in 0..m {
                for la in 0..m {
                    let a = coeffs.get(mu, nu, la);
                    let b = coeffs.get(nu, mu, la);
                    let ok = match symmetry {
                        Symmetry::Symmetric => a == b,
                        Symmetry::Antisymmetric => a == -b,
                    };
                    if !ok {
                        return Err(Error::InvalidInput(format!(
                            "coefficients not {symmetry:?} at ({mu},{nu},{la})"
                        )));
                    }
                }
            }
        }
        Ok(Self { dim, coeffs, symmetry })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.coeffs.size()
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn coeffs(&self) -> &StructureConstants<T> {
        &self.coeffs
    }

    /// `T^{mu nu}(Y)`.
    pub fn components(&self, y: &[T]) -> SquareMatrix<T> {
        let mut out = SquareMatrix::zeros(self.size());
        for &(mu, nu, la, s) in self.coeffs.nonzero() {
            out[(mu, nu)] += s * y[la];
        }
        out
    }

    /// `T^{mu nu}(Y) a_mu b_nu`.
    pub fn contract(&self, y: &[T], a: &[T], b: &[T]) -> T {
        self.coeffs
            .nonzero()
            .iter()
            .map(|&(mu, nu, la, s)| s * y[la] * a[mu] * b[nu])
            .sum()
    }

    /// `v^nu = T^{mu nu}(Y) a_mu`.
    pub fn contract_first(&self, y: &[T], a: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.size()];
        for &(mu, nu, la, s) in self.coeffs.nonzero() {
            out[nu] += s * y[la] * a[mu];
        }
        out
    }

    /// `d T^{mu nu} / d Y_lambda`, constant in `Y`.
    pub fn derivative(&self, mu: usize, nu: usize, lambda: usize) -> T {
        self.coeffs.get(mu, nu, lambda)
    }
}

/// `e_A(Y) = Tr(rho A) = 2 sum_mu a_mu Y_mu` with `a_mu = Tr(A s_mu)/2`.
pub fn expectation_field<T: Real>(a: &HermitianMatrix<T>, basis: &AlgebraBasis<T>) -> Result<LinearField<T>> {
    let coeffs = basis.coordinates(a)?.into_iter().map(|x| x + x).collect();
    Ok(LinearField::new(coeffs, T::zero()))
}

/// Poisson tensor `Lambda^{mu nu}(Y) = c^lambda_{mu nu} Y_lambda`.
pub fn lambda_field<T: Real>(basis: &AlgebraBasis<T>) -> AffineBivectorField<T> {
    AffineBivectorField::new(basis.dim(), basis.c().clone(), Symmetry::Antisymmetric)
        .expect("Lie structure constants are antisymmetric")
}

/// Jordan tensor `G^{mu nu}(Y) = d^lambda_{mu nu} Y_lambda`.
pub fn g_field<T: Real>(basis: &AlgebraBasis<T>) -> AffineBivectorField<T> {
    AffineBivectorField::new(basis.dim(), basis.d().clone(), Symmetry::Symmetric)
        .expect("Jordan structure constants are symmetric")
}

/// `T(dF, dK)(Y)`.
pub fn bracket<T: Real>(
    tensor: &AffineBivectorField<T>,
    f: &impl ScalarField<T>,
    k: &impl ScalarField<T>,
    y: &StatePoint<T>,
) -> Result<T> {
    check_dim(tensor.dim(), y.dim())?;
    check_dim(tensor.size(), f.size())?;
    check_dim(tensor.size(), k.size())?;
    let p = y.coords();
    Ok(tensor.contract(p, &f.gradient(p), &k.gradient(p)))
}

/// `(e_A * e_B)(Y) = G(de_A, de_B)/2 + i Lambda(de_A, de_B)/2`, which equals
/// `Tr(rho AB)`.
pub fn star_product<T: Real>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    y: &StatePoint<T>,
    basis: &AlgebraBasis<T>,
) -> Result<Complex<T>> {
    check_dim(basis.dim(), y.dim())?;
    y.to_density(basis)?;
    let ea = expectation_field(a, basis)?;
    let eb = expectation_field(b, basis)?;
    let p = y.coords();
    let half = T::lit(0.5);
    let g = g_field(basis).contract(p, ea.coeffs(), eb.coeffs());
    let l = lambda_field(basis).contract(p, ea.coeffs(), eb.coeffs());
    Ok(Complex::new(half * g, half * l))
}

/// Star product extended to arbitrary complex operators through their
/// Hermitian decompositions `A = A_R + i A_I`; equals `Tr(rho AB)`.
pub fn star_product_operators<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    y: &StatePoint<T>,
    basis: &AlgebraBasis<T>,
) -> Result<Complex<T>> {
    let (ar, ai) = a.hermitian_parts();
    let (br, bi) = b.hermitian_parts();
    let i = Complex::new(T::zero(), T::one());
    let rr = star_product(&ar, &br, y, basis)?;
    let ri = star_product(&ar, &bi, y, basis)?;
    let ir = star_product(&ai, &br, y, basis)?;
    let ii = star_product(&ai, &bi, y, basis)?;
    Ok(rr + i * ri + i * ir - ii)
}

/// Bracket of two linear fields under an affine tensor, itself linear:
/// `{F, K}(Y) = s^l_{mu nu} f_mu k_nu Y_l`.
pub fn linear_bracket<T: Real>(
    tensor: &AffineBivectorField<T>,
    f: &LinearField<T>,
    k: &LinearField<T>,
) -> Result<LinearField<T>> {
    check_dim(tensor.size(), f.size())?;
    check_dim(tensor.size(), k.size())?;
    let mut coeffs = vec![T::zero(); tensor.size()];
    for &(mu, nu, la, s) in tensor.coeffs().nonzero() {
        coeffs[la] += s * f.coeffs()[mu] * k.coeffs()[nu];
    }
    Ok(LinearField::new(coeffs, T::zero()))
}

/// `G(de_A, de_A)/2 - e_A^2 = Tr(rho A^2) - Tr(rho A)^2`.
pub fn variance<T: Real>(a: &HermitianMatrix<T>, y: &StatePoint<T>, basis: &AlgebraBasis<T>) -> Result<T> {
    check_dim(basis.dim(), y.dim())?;
    let ea = expectation_field(a, basis)?;
    let p = y.coords();
    let g = g_field(basis).contract(p, ea.coeffs(), ea.coeffs());
    let mean = ea.value(p);
    Ok(T::lit(0.5) * g - mean * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;
    use approx::assert_abs_diff_eq;

    fn basis2() -> AlgebraBasis<f64> {
        build_basis(2).unwrap()
    }

    fn point(y: [f64; 4]) -> StatePoint<f64> {
        StatePoint::new(2, y.to_vec()).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let b = basis2();
        let north = point([0.5, 0.0, 0.0, 0.5]);
        let mixed = point([0.5, 0.0, 0.0, 0.0]);
        let e0 = expectation_field(b.element(0), &b).unwrap();
        assert_eq!(e0.value(north.coords()), 1.0);
        assert_eq!(e0.value(mixed.coords()), 1.0);
        let e3 = expectation_field(b.element(3), &b).unwrap();
        assert_eq!(e3.value(north.coords()), 1.0);
        assert_eq!(e3.gradient(north.coords()), vec![0.0, 0.0, 0.0, 2.0]);
        let e1 = expectation_field(b.element(1), &b).unwrap();
        assert_eq!(e1.value(mixed.coords()), 0.0);
    }

    #[test]
    fn lambda_components_at_north_pole() {
        let l = lambda_field(&basis2());
        let comps = l.components(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(comps[(1, 2)], 0.5);
        assert_eq!(comps[(2, 1)], -0.5);
        for nu in 0..4 {
            assert_eq!(comps[(0, nu)], 0.0);
            assert_eq!(comps[(nu, 0)], 0.0);
        }
    }

    #[test]
    fn g_components_at_centre() {
        let g = g_field(&basis2());
        let comps = g.components(&[0.5, 0.0, 0.0, 0.0]);
        assert_eq!(comps, SquareMatrix::from_fn(4, |i, j| if i == j { 0.5 } else { 0.0 }));
    }

    #[test]
    fn angular_momentum_bracket() {
        let b = basis2();
        let l = lambda_field(&b);
        let y = point([0.5, 0.0, 0.0, 0.5]);
        let y1 = LinearField::coordinate(4, 1);
        let y2 = LinearField::coordinate(4, 2);
        assert_eq!(bracket(&l, &y1, &y2, &y).unwrap(), 0.5);
        assert_eq!(bracket(&l, &y1, &y1, &y).unwrap(), 0.0);
    }

    #[test]
    fn jordan_bracket_of_sigma_x() {
        let b = basis2();
        let e1 = expectation_field(b.element(1), &b).unwrap();
        let v = bracket(&g_field(&b), &e1, &e1, &point([0.5, 0.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-15);
        let e0 = expectation_field(b.element(0), &b).unwrap();
        let v = bracket(&g_field(&b), &e0, &e0, &point([0.5, 0.1, -0.2, 0.3])).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn star_product_examples() {
        let b = basis2();
        let north = point([0.5, 0.0, 0.0, 0.5]);
        let s = star_product(b.element(1), b.element(2), &north, &b).unwrap();
        assert_abs_diff_eq!(s.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.im, 1.0, epsilon = 1e-15);
        let s = star_product(b.element(0), b.element(0), &north, &b).unwrap();
        assert_abs_diff_eq!(s.re, 1.0, epsilon = 1e-15);
        assert_eq!(s.im, 0.0);
    }

    #[test]
    fn star_product_rejects_invalid_state() {
        let b = basis2();
        let outside = point([0.5, 0.0, 0.0, 0.8]);
        assert!(matches!(
            star_product(b.element(1), b.element(2), &outside, &b),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn variance_examples() {
        let b = basis2();
        let plus_x = point([0.5, 0.5, 0.0, 0.0]);
        let north = point([0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(variance(b.element(3), &plus_x, &b).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(variance(b.element(3), &north, &b).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(variance(b.element(0), &plus_x, &b).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn polynomial_gradient_matches_hand_derivative() {
        // F = 3 Y1^2 Y2 - Y3
        let spec = PolynomialFieldSpec {
            terms: vec![
                PolynomialTerm {
                    coeff: 3.0,
                    exponents: vec![0, 2, 1, 0],
                },
                PolynomialTerm {
                    coeff: -1.0,
                    exponents: vec![0, 0, 0, 1],
                },
            ],
        };
        let f = PolynomialField::from_spec(&spec).unwrap();
        let y = [0.5, 0.2, -0.4, 0.1];
        assert_abs_diff_eq!(f.value(&y), 3.0 * 0.04 * -0.4 - 0.1, epsilon = 1e-15);
        let g = f.gradient(&y);
        assert_abs_diff_eq!(g[0], 0.0);
        assert_abs_diff_eq!(g[1], 6.0 * 0.2 * -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(g[2], 3.0 * 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(g[3], -1.0);
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn polynomial_spec_validation() {
        let empty: PolynomialFieldSpec<f64> = PolynomialFieldSpec { terms: vec![] };
        assert!(PolynomialField::from_spec(&empty).is_err());
        let ragged = PolynomialFieldSpec {
            terms: vec![
                PolynomialTerm {
                    coeff: 1.0,
                    exponents: vec![0, 1],
                },
                PolynomialTerm {
                    coeff: 1.0,
                    exponents: vec![0, 1, 0],
                },
            ],
        };
        assert!(PolynomialField::from_spec(&ragged).is_err());
    }

    #[test]
    fn numeric_gradient_of_closure() {
        let f = FnField::new(4, |y: &[f64]| (y[1] * y[1] + y[2] * y[2] + y[3] * y[3]).sqrt());
        let g = f.gradient(&[0.5, 0.3, 0.0, 0.4]);
        assert_abs_diff_eq!(g[1], 0.6, epsilon = 1e-9);
        assert_abs_diff_eq!(g[3], 0.8, epsilon = 1e-9);
    }

    #[test]
    fn symmetry_is_enforced() {
        let b = basis2();
        assert!(AffineBivectorField::new(2, b.c().clone(), Symmetry::Symmetric).is_err());
        assert!(AffineBivectorField::new(2, b.d().clone(), Symmetry::Antisymmetric).is_err());
    }
}
