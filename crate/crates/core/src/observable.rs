//! Observable test: a scalar field `F` is the expectation function of an
//! observable exactly when its Hamiltonian vector field preserves the
//! Jordan tensor, `L_{X_F} G = 0`.
//!
//! Residuals are evaluated on the ambient coordinate space, where `Lambda`
//! and `G` have globally defined affine components.

use crate::algebra::AlgebraBasis;
use crate::error::{check_dim, Error, Result};
use crate::fields::{g_field, lambda_field, AffineBivectorField, ScalarField};
use crate::matrix::SquareMatrix;
use crate::sample::{random_interior_point, stream_rng};
use crate::scalar::Real;
use crate::state::StatePoint;

/// Fraction of the inscribed radius used for sample points.
pub const SAMPLE_RADIUS_FRACTION: f64 = 0.9;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// `(L_X G)^{mu nu} = X^l d_l G^{mu nu} - G^{l nu} d_l X^mu - G^{mu l} d_l X^nu`
/// at `y`, with `X = X_F` and `d_l X` by central differences of step `h`.
pub fn lie_derivative_g<T: Real>(
    f: &impl ScalarField<T>,
    lambda: &AffineBivectorField<T>,
    g: &AffineBivectorField<T>,
    y: &StatePoint<T>,
    h: T,
) -> Result<SquareMatrix<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidStep(format!("h must be positive, got {h}")));
    }
    check_dim(lambda.size(), f.size())?;
    check_dim(g.size(), f.size())?;
    check_dim(lambda.size(), y.coords().len())?;
    let m = lambda.size();
    let field = |p: &[T]| lambda.contract_first(p, &f.gradient(p));
    let p = y.coords();
    let x = field(p);

    // jac[(l, mu)] = d_l X^mu
    let mut jac = SquareMatrix::zeros(m);
    let mut q = p.to_vec();
    let two_h = h + h;
    for l in 0..m {
        q[l] = p[l] + h;
        let plus = field(&q);
        q[l] = p[l] - h;
        let minus = field(&q);
        q[l] = p[l];
        for mu in 0..m {
            jac[(l, mu)] = (plus[mu] - minus[mu]) / two_h;
        }
    }

    let gy = g.components(p);
    // G is affine, so X^l d_l G^{mu nu} = G^{mu nu}(X)
    let transport = g.components(&x);
    let left = &jac.transpose() * &gy;
    let right = &gy * &jac;
    Ok(SquareMatrix::from_fn(m, |mu, nu| {
        transport[(mu, nu)] - left[(mu, nu)] - right[(mu, nu)]
    }))
}

/// Per-sample Lie derivative components and the worst entry seen.
#[derive(Debug, Clone, PartialEq)]
pub struct LieDerivativeReport<T> {
    pub sample_points: Vec<StatePoint<T>>,
    pub components: Vec<SquareMatrix<T>>,
    pub residuals: Vec<T>,
    pub max_residual: T,
}

impl<T: Real> LieDerivativeReport<T> {
    /// Number of samples whose residual falls below `tol`.
    pub fn count_below(&self, tol: T) -> usize {
        self.residuals.iter().filter(|r| **r < tol).count()
    }
}

/// Evaluates `L_{X_F} G` at `samples` seeded interior points; `true` iff the
/// worst entry stays below `tol`.
pub fn is_observable<T: Real>(
    f: &impl ScalarField<T>,
    basis: &AlgebraBasis<T>,
    samples: usize,
    tol: T,
    seed: u64,
) -> Result<(bool, LieDerivativeReport<T>)> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    check_dim(basis.size(), f.size())?;
    let lambda = lambda_field(basis);
    let g = g_field(basis);
    let mut rng = stream_rng(seed, "observable");
    let sample_points: Vec<_> = (0..samples)
        .map(|_| random_interior_point(basis, SAMPLE_RADIUS_FRACTION, &mut rng))
        .collect();
    let components = sample_points
        .iter()
        .map(|y| lie_derivative_g(f, &lambda, &g, y, T::LIE_STEP))
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<T> = components.iter().map(|c| c.max_abs()).collect();
    let max_residual = residuals.iter().copied().fold(T::zero(), T::max);
    Ok((
        max_residual < tol,
        LieDerivativeReport {
            sample_points,
            components,
            residuals,
            max_residual,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;
    use crate::fields::{expectation_field, LinearField, PolynomialField};
    use approx::assert_abs_diff_eq;

    #[test]
    fn expectation_function_is_observable_pointwise() {
        let b = build_basis::<f64>(2).unwrap();
        let e3 = expectation_field(b.element(3), &b).unwrap();
        let y = StatePoint::new(2, vec![0.5, 0.1, -0.2, 0.15]).unwrap();
        let l = lie_derivative_g(&e3, &lambda_field(&b), &g_field(&b), &y, 1e-5).unwrap();
        assert!(l.max_abs() < 1e-8);
    }

    #[test]
    fn constant_is_exactly_zero() {
        let b = build_basis::<f64>(2).unwrap();
        let y = StatePoint::new(2, vec![0.5, 0.1, -0.2, 0.15]).unwrap();
        let l = lie_derivative_g(
            &LinearField::constant(4, 2.5),
            &lambda_field(&b),
            &g_field(&b),
            &y,
            1e-5,
        )
        .unwrap();
        assert_eq!(l.max_abs(), 0.0);
    }

    #[test]
    fn square_of_coordinate_component() {
        // Hand contraction at Y = (1/2, 1/4, 1/8, 0): X = -(1/16) d_3,
        // d_1 X^3 = -1/4, so (L G)^{13} = -G^{11} d_1 X^3 = 1/8.
        let b = build_basis::<f64>(2).unwrap();
        let f = PolynomialField::monomial(4, &[(1, 2)]);
        let y = StatePoint::new(2, vec![0.5, 0.25, 0.125, 0.0]).unwrap();
        let l = lie_derivative_g(&f, &lambda_field(&b), &g_field(&b), &y, 1e-5).unwrap();
        assert_abs_diff_eq!(l[(1, 3)], 0.125, epsilon = 1e-10);
        assert_abs_diff_eq!(l[(3, 1)], 0.125, epsilon = 1e-10);
        assert!(l.max_abs() > 0.01);
    }

    #[test]
    fn non_positive_step_rejected() {
        let b = build_basis::<f64>(2).unwrap();
        let y = StatePoint::new(2, vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        let f = LinearField::constant(4, 1.0);
        assert!(matches!(
            lie_derivative_g(&f, &lambda_field(&b), &g_field(&b), &y, 0.0),
            Err(Error::InvalidStep(_))
        ));
    }

    #[test]
    fn gate_examples() {
        let b = build_basis::<f64>(2).unwrap();
        let lin = LinearField::new(vec![0.0, 6.0, -4.0, 0.0], 0.0); // 3 e_X - 2 e_Y
        let (ok, report) = is_observable(&lin, &b, 20, 1e-6, 7).unwrap();
        assert!(ok, "{}", report.max_residual);
        assert_eq!(report.sample_points.len(), 20);

        let e0 = expectation_field(b.element(0), &b).unwrap();
        assert!(is_observable(&e0, &b, 5, 1e-6, 1).unwrap().0);

        let quad = PolynomialField::monomial(4, &[(1, 1), (2, 1)]);
        let (ok, report) = is_observable(&quad, &b, 20, 1e-6, 7).unwrap();
        assert!(!ok);
        assert!(report.max_residual > 1e-2);
    }

    #[test]
    fn constant_shift_leaves_report_unchanged() {
        let b = build_basis::<f64>(2).unwrap();
        let f = LinearField::new(vec![0.0, 1.0, 2.0, 3.0], 0.0);
        let g = LinearField::new(vec![0.0, 1.0, 2.0, 3.0], 10.0);
        assert_eq!(
            is_observable(&f, &b, 10, 1e-6, 3).unwrap(),
            is_observable(&g, &b, 10, 1e-6, 3).unwrap()
        );
    }

    #[test]
    fn bad_tolerance_rejected() {
        let b = build_basis::<f64>(2).unwrap();
        let f = LinearField::constant(4, 1.0);
        assert!(is_observable(&f, &b, 10, 0.0, 3).is_err());
        assert!(is_observable(&f, &b, 0, 1e-6, 3).is_err());
    }
}
