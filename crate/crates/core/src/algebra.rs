//! Lie-Jordan algebra of Hermitian matrices.
//!
//! Conventions (with `hbar = 1`):
//!
//! * Jordan product `A o B = AB + BA` (no factor one half),
//! * Lie product `[A, B] = -i (AB - BA)`,
//! * pairing `<A|B> = Tr(AB) / 2`, under which the basis returned by
//!   [`build_basis`] is orthonormal.
//!
//! With these conventions `AB = (A o B)/2 + i [A, B]/2` and the associator
//! satisfies `A o (B o C) - (A o B) o C = K [[A, C], B]` with
//! [`ASSOCIATOR_CONSTANT`] `K = -1`.

use num_complex::Complex;

use crate::error::{check_dim, Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;

/// The associator constant `K`, fixed by least-squares fitting over random
/// Hermitian triples (see [`fit_associator_constant`]).
pub const ASSOCIATOR_CONSTANT: f64 = -1.0;

fn same_dim<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<()> {
    check_dim(a.dim(), b.dim())
}

/// `[A, B] = -i (AB - BA)`.
pub fn commutator<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    same_dim(a, b)?;
    let (a, b) = (a.as_matrix(), b.as_matrix());
    let diff = &(a * b) - &(b * a);
    Ok(HermitianMatrix::from_matrix_unchecked(
        diff.scale(Complex::new(T::zero(), -T::one())),
    ))
}

/// `A o B = AB + BA`.
pub fn jordan<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    same_dim(a, b)?;
    let (a, b) = (a.as_matrix(), b.as_matrix());
    Ok(HermitianMatrix::from_matrix_unchecked(&(a * b) + &(b * a)))
}

/// Associative matrix product `AB` (generally not Hermitian).
pub fn product<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<ComplexMatrix<T>> {
    same_dim(a, b)?;
    Ok(a.as_matrix() * b.as_matrix())
}

/// Hermitian halves of an associative product: `AB = symmetric + i antisymmetric`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductParts<T> {
    /// `(A o B) / 2`
    pub symmetric: HermitianMatrix<T>,
    /// `[A, B] / 2`
    pub antisymmetric: HermitianMatrix<T>,
}

impl<T: Real> ProductParts<T> {
    pub fn recombine(&self) -> ComplexMatrix<T> {
        let i = Complex::new(T::zero(), T::one());
        self.symmetric.as_matrix() + &self.antisymmetric.as_matrix().scale(i)
    }
}

pub fn decompose_product<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<ProductParts<T>> {
    let half = T::lit(0.5);
    Ok(ProductParts {
        symmetric: jordan(a, b)?.scale(half),
        antisymmetric: commutator(a, b)?.scale(half),
    })
}

/// Max-entry norm of `(A o A) o (B o A) - ((A o A) o B) o A`.
pub fn check_jordan_identity<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> Result<T> {
    let aa = jordan(a, a)?;
    let lhs = jordan(&aa, &jordan(b, a)?)?;
    let rhs = jordan(&jordan(&aa, b)?, a)?;
    Ok(lhs.sub(&rhs)?.max_abs())
}

/// Max-entry norm of `[A, B o C] - [A, B] o C - B o [A, C]`.
pub fn check_leibniz<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, c: &HermitianMatrix<T>) -> Result<T> {
    same_dim(a, c)?;
    let lhs = commutator(a, &jordan(b, c)?)?;
    let r1 = jordan(&commutator(a, b)?, c)?;
    let r2 = jordan(b, &commutator(a, c)?)?;
    Ok(lhs.sub(&r1)?.sub(&r2)?.max_abs())
}

/// Max-entry norm of `A o (B o C) - (A o B) o C - K [[A, C], B]`.
pub fn check_associator<T: Real>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    c: &HermitianMatrix<T>,
    k: T,
) -> Result<T> {
    let (assoc, nested) = associator_parts(a, b, c)?;
    Ok(assoc.sub(&nested.scale(k))?.max_abs())
}

fn associator_parts<T: Real>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    c: &HermitianMatrix<T>,
) -> Result<(HermitianMatrix<T>, HermitianMatrix<T>)> {
    same_dim(a, b)?;
    same_dim(a, c)?;
    let assoc = jordan(a, &jordan(b, c)?)?.sub(&jordan(&jordan(a, b)?, c)?)?;
    let nested = commutator(&commutator(a, c)?, b)?;
    Ok((assoc, nested))
}

/// Least-squares estimate of the constant `K` in
/// `A o (B o C) - (A o B) o C = K [[A, C], B]` over the given triples.
///
/// Returns `None` when every nested commutator vanishes (no information).
pub fn fit_associator_constant<T: Real>(
    triples: &[(HermitianMatrix<T>, HermitianMatrix<T>, HermitianMatrix<T>)],
) -> Result<Option<T>> {
    let mut num = T::zero();
    let mut den = T::zero();
    for (a, b, c) in triples {
        let (assoc, nested) = associator_parts(a, b, c)?;
        for (x, y) in assoc.as_matrix().data().iter().zip(nested.as_matrix().data()) {
            num += x.re * y.re + x.im * y.im;
            den += y.norm_sqr();
        }
    }
    Ok(if den > T::zero() { Some(num / den) } else { None })
}

/// Max-entry norm of the cyclic sum `[[A,B],C] + [[B,C],A] + [[C,A],B]`.
pub fn jacobi_residual<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>, c: &HermitianMatrix<T>) -> Result<T> {
    let t1 = commutator(&commutator(a, b)?, c)?;
    let t2 = commutator(&commutator(b, c)?, a)?;
    let t3 = commutator(&commutator(c, a)?, b)?;
    Ok(t1.add(&t2)?.add(&t3)?.max_abs())
}

/// Rank-3 real array `s[mu][nu][lambda]` over an `m`-element basis, together
/// with the list of its nonzero entries for sparse contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<T> {
    size: usize,
    dense: Vec<T>,
    nonzero: Vec<(usize, usize, usize, T)>,
}

impl<T: Real> StructureConstants<T> {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut dense = Vec::with_capacity(size * size * size);
        for mu in 0..size {
            for nu in 0..size {
                for la in 0..size {
                    dense.push(f(mu, nu, la));
                }
            }
        }
        Self::from_dense(size, dense)
    }

    fn from_dense(size: usize, dense: Vec<T>) -> Self {
        let mut nonzero = Vec::new();
        for mu in 0..size {
            for nu in 0..size {
                for la in 0..size {
                    let v = dense[(mu * size + nu) * size + la];
                    if v != T::zero() {
                        nonzero.push((mu, nu, la, v));
                    }
                }
            }
        }
        Self { size, dense, nonzero }
    }

    /// Number of basis elements `m = N^2`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, mu: usize, nu: usize, lambda: usize) -> T {
        self.dense[(mu * self.size + nu) * self.size + lambda]
    }

    pub fn nonzero(&self) -> &[(usize, usize, usize, T)] {
        &self.nonzero
    }

    /// Nested `[mu][nu][lambda]` form.
    pub fn to_nested(&self) -> Vec<Vec<Vec<T>>> {
        (0..self.size)
            .map(|mu| {
                (0..self.size)
                    .map(|nu| (0..self.size).map(|la| self.get(mu, nu, la)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn from_nested(nested: &[Vec<Vec<T>>]) -> Result<Self> {
        let size = nested.len();
        let mut dense = Vec::with_capacity(size * size * size);
        for plane in nested {
            check_dim(size, plane.len())?;
            for row in plane {
                check_dim(size, row.len())?;
                dense.extend_from_slice(row);
            }
        }
        Ok(Self::from_dense(size, dense))
    }
}

/// Orthonormal Hermitian basis of `u(N)` with its Lie and Jordan structure
/// constants: `[s_mu, s_nu] = 2 c^lambda_{mu nu} s_lambda` and
/// `s_mu o s_nu = 2 d^lambda_{mu nu} s_lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraBasis<T> {
    dim: usize,
    elements: Vec<HermitianMatrix<T>>,
    c: StructureConstants<T>,
    d: StructureConstants<T>,
}

/// Builds `sqrt(2/N) I` followed by the generalized Gell-Mann matrices in
/// the standard order. For `N = 2` this is `I, X, Y, Z`.
pub fn build_basis<T: Real>(n: usize) -> Result<AlgebraBasis<T>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let unit = |i: usize, j: usize, z: Complex<T>| {
        let mut m = ComplexMatrix::zeros(n);
        m[(i, j)] = z;
        m
    };
    let mut elements = Vec::with_capacity(n * n);
    elements.push(ComplexMatrix::identity(n).scale_real((T::lit(2.0) / T::from_usize_lossy(n)).sqrt()));
    for k in 1..n {
        for j in 0..k {
            let one = Complex::new(T::one(), T::zero());
            elements.push(&unit(j, k, one) + &unit(k, j, one));
            let i = Complex::new(T::zero(), T::one());
            elements.push(&unit(j, k, -i) + &unit(k, j, i));
        }
        let l = T::from_usize_lossy(k);
        let norm = (T::lit(2.0) / (l * (l + T::one()))).sqrt();
        let mut diag = ComplexMatrix::from_fn(n, |_, _| zero);
        for j in 0..k {
            diag[(j, j)] = Complex::new(norm, T::zero());
        }
        diag[(k, k)] = Complex::new(-l * norm, T::zero());
        elements.push(diag);
    }
    let elements: Vec<_> = elements
        .into_iter()
        .map(HermitianMatrix::from_matrix_unchecked)
        .collect();
    let (c, d) = structure_constants_of(&elements)?;
    Ok(AlgebraBasis { dim: n, elements, c, d })
}

/// `c^lambda_{mu nu} = Tr([s_mu, s_nu] s_lambda) / 4` and
/// `d^lambda_{mu nu} = Tr((s_mu o s_nu) s_lambda) / 4`.
///
/// Entries below a small multiple of machine epsilon are snapped to zero so
/// that the exact zeros of the Pauli and Gell-Mann tables survive.
pub fn structure_constants<T: Real>(basis: &AlgebraBasis<T>) -> Result<(StructureConstants<T>, StructureConstants<T>)> {
    structure_constants_of(&basis.elements)
}

fn structure_constants_of<T: Real>(
    elements: &[HermitianMatrix<T>],
) -> Result<(StructureConstants<T>, StructureConstants<T>)> {
    let m = elements.len();
    let quarter = T::lit(0.25);
    let snap = T::epsilon() * T::lit(64.0);
    let clean = |x: T| if x.abs() < snap { T::zero() } else { x };
    let mut c = vec![T::zero(); m * m * m];
    let mut d = vec![T::zero(); m * m * m];
    for mu in 0..m {
        for nu in 0..m {
            let lie = commutator(&elements[mu], &elements[nu])?;
            let jor = jordan(&elements[mu], &elements[nu])?;
            for (la, e) in elements.iter().enumerate() {
                let idx = (mu * m + nu) * m + la;
                c[idx] = clean(lie.trace_product(e)?.re * quarter);
                d[idx] = clean(jor.trace_product(e)?.re * quarter);
            }
        }
    }
    Ok((
        StructureConstants::from_dense(m, c),
        StructureConstants::from_dense(m, d),
    ))
}

impl<T: Real> AlgebraBasis<T> {
    /// Assembles a basis from explicit parts, checking shapes only.
    pub fn from_parts(
        dim: usize,
        elements: Vec<HermitianMatrix<T>>,
        c: StructureConstants<T>,
        d: StructureConstants<T>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        check_dim(dim * dim, elements.len())?;
        for e in &elements {
            check_dim(dim, e.dim())?;
        }
        check_dim(dim * dim, c.size())?;
        check_dim(dim * dim, d.size())?;
        Ok(Self { dim, elements, c, d })
    }

    /// Hilbert space dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `N^2`.
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[HermitianMatrix<T>] {
        &self.elements
    }

    pub fn element(&self, mu: usize) -> &HermitianMatrix<T> {
        &self.elements[mu]
    }

    pub fn c(&self) -> &StructureConstants<T> {
        &self.c
    }

    pub fn d(&self) -> &StructureConstants<T> {
        &self.d
    }

    /// Value of the identity coordinate on trace-one operators, `sqrt(2/N)/2`.
    pub fn trace_coordinate(&self) -> T {
        (T::lit(2.0) / T::from_usize_lossy(self.dim)).sqrt() * T::lit(0.5)
    }

    /// Components `a_mu = Tr(A s_mu) / 2`.
    pub fn coordinates(&self, a: &HermitianMatrix<T>) -> Result<Vec<T>> {
        check_dim(self.dim, a.dim())?;
        self.elements
            .iter()
            .map(|s| Ok(a.trace_product(s)?.re * T::lit(0.5)))
            .collect()
    }

    /// `sum_mu a_mu s_mu`.
    pub fn reconstruct(&self, coords: &[T]) -> Result<HermitianMatrix<T>> {
        check_dim(self.size(), coords.len())?;
        let mut acc = ComplexMatrix::zeros(self.dim);
        for (a, s) in coords.iter().zip(&self.elements) {
            acc = &acc + &s.as_matrix().scale_real(*a);
        }
        Ok(HermitianMatrix::from_matrix_unchecked(acc))
    }

    /// Largest deviation of `Tr(s_mu s_nu)/2` from `delta_{mu nu}`.
    pub fn orthonormality_residual(&self) -> T {
        let mut r = T::zero();
        for (mu, a) in self.elements.iter().enumerate() {
            for (nu, b) in self.elements.iter().enumerate() {
                let target = if mu == nu { T::one() } else { T::zero() };
                let g = a.trace_product(b).expect("same dim") * T::lit(0.5);
                r = r.max((g.re - target).abs()).max(g.im.abs());
            }
        }
        r
    }

    /// Largest deviation of the basis products from their structure-constant
    /// expansions `2 c s` and `2 d s`.
    pub fn reconstruction_residual(&self) -> Result<T> {
        let m = self.size();
        let mut r = T::zero();
        for mu in 0..m {
            for nu in 0..m {
                let lie = commutator(&self.elements[mu], &self.elements[nu])?;
                let jor = jordan(&self.elements[mu], &self.elements[nu])?;
                let lc: Vec<T> = (0..m).map(|la| T::lit(2.0) * self.c.get(mu, nu, la)).collect();
                let ld: Vec<T> = (0..m).map(|la| T::lit(2.0) * self.d.get(mu, nu, la)).collect();
                r = r.max(lie.sub(&self.reconstruct(&lc)?)?.max_abs());
                r = r.max(jor.sub(&self.reconstruct(&ld)?)?.max_abs());
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn basis2() -> AlgebraBasis<f64> {
        build_basis(2).unwrap()
    }

    #[test]
    fn pauli_elements() {
        let b = basis2();
        let x = b.element(1).as_matrix();
        assert_eq!(x[(0, 1)], Complex::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], Complex::new(1.0, 0.0));
        assert_eq!(x[(0, 0)], Complex::new(0.0, 0.0));
        let y = b.element(2).as_matrix();
        assert_eq!(y[(0, 1)], Complex::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex::new(0.0, 1.0));
        let z = b.element(3).as_matrix();
        assert_eq!(z[(0, 0)], Complex::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], Complex::new(-1.0, 0.0));
        let id = b.element(0).as_matrix();
        assert_abs_diff_eq!(id[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(id[(1, 1)].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn orthonormal_for_small_n() {
        for n in 2..=5 {
            let b: AlgebraBasis<f64> = build_basis(n).unwrap();
            assert_eq!(b.size(), n * n);
            assert!(b.orthonormality_residual() < 1e-12, "N = {n}");
            assert!(b.reconstruction_residual().unwrap() < 1e-10, "N = {n}");
        }
    }

    #[test]
    fn rejects_dimension_one() {
        assert_eq!(build_basis::<f64>(1).unwrap_err(), Error::InvalidDimension(1));
        assert_eq!(build_basis::<f64>(0).unwrap_err(), Error::InvalidDimension(0));
    }

    #[test]
    fn pauli_commutator_and_jordan() {
        let b = basis2();
        let comm = commutator(b.element(1), b.element(2)).unwrap();
        assert!(comm.sub(&b.element(3).scale(2.0)).unwrap().max_abs() < 1e-15);
        let xx = jordan(b.element(1), b.element(1)).unwrap();
        assert!(xx.sub(&b.element(0).scale(2.0)).unwrap().max_abs() < 1e-15);
        let xy = jordan(b.element(1), b.element(2)).unwrap();
        assert_eq!(xy.max_abs(), 0.0);
    }

    #[test]
    fn identity_is_central_and_jordan_unit() {
        let b = basis2();
        for mu in 0..4 {
            let s = b.element(mu);
            assert_eq!(commutator(b.element(0), s).unwrap().max_abs(), 0.0);
            let j = jordan(b.element(0), s).unwrap();
            assert!(j.sub(&s.scale(2.0)).unwrap().max_abs() < 1e-15);
            assert_eq!(commutator(s, s).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn decompose_pauli_pair() {
        let b = basis2();
        let parts = decompose_product(b.element(1), b.element(2)).unwrap();
        assert_eq!(parts.symmetric.max_abs(), 0.0);
        // XY = iZ
        let expected = b.element(3).as_matrix().scale(Complex::new(0.0, 1.0));
        assert!((&parts.recombine() - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn decompose_self_product() {
        let b = basis2();
        let a = b.reconstruct(&[0.3, -1.2, 0.4, 2.0]).unwrap();
        let parts = decompose_product(&a, &a).unwrap();
        assert_eq!(parts.antisymmetric.max_abs(), 0.0);
        let sq = product(&a, &a).unwrap();
        assert!((&parts.recombine() - &sq).max_abs() < 1e-14);
    }

    #[test]
    fn pauli_structure_constants_are_levi_civita() {
        let b = basis2();
        let eps = |j: usize, k: usize, l: usize| -> f64 {
            match (j, k, l) {
                (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
                (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
                _ => 0.0,
            }
        };
        for mu in 0..4 {
            for nu in 0..4 {
                for la in 0..4 {
                    assert_eq!(b.c().get(mu, nu, la), eps(mu, nu, la), "c[{mu}][{nu}][{la}]");
                }
            }
        }
        for j in 1..4 {
            for k in 1..4 {
                assert_abs_diff_eq!(b.d().get(j, k, 0), if j == k { 1.0 } else { 0.0 }, epsilon = 1e-15);
            }
        }
        for mu in 0..4 {
            for nu in 0..4 {
                let delta = if mu == nu { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(b.d().get(0, mu, nu), delta, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HermitianMatrix::<f64>::identity(2);
        let b = HermitianMatrix::<f64>::identity(3);
        assert!(matches!(commutator(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(jordan(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            check_leibniz(&a, &a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            check_associator(&a, &b, &a, -1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn associator_vanishes_on_single_element() {
        let b = basis2();
        let a = b.reconstruct(&[0.1, 0.7, -0.3, 0.2]).unwrap();
        for k in [-3.0, 0.0, 1.0, 5.5] {
            assert!(check_associator(&a, &a, &a, k).unwrap() < 1e-14);
        }
    }

    #[test]
    fn associator_nonzero_without_correction() {
        let b = basis2();
        let r = check_associator(b.element(1), b.element(1), b.element(2), 0.0).unwrap();
        assert!(r > 1.0, "{r}");
    }

    #[test]
    fn structure_constants_nested_roundtrip() {
        let b = basis2();
        let again = StructureConstants::from_nested(&b.c().to_nested()).unwrap();
        assert_eq!(&again, b.c());
    }
}
