//! Coordinate charts on the carrier space and pushforward of contravariant
//! bivectors, `T'^{ab} = J^a_mu J^b_nu T^{mu nu}`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::fields::{
    central_gradient, AffineBivectorField, PolynomialField, PolynomialFieldSpec, ScalarField, Symmetry,
};
use crate::matrix::SquareMatrix;
use crate::scalar::Real;
use crate::state::StatePoint;

/// Invertible change of coordinates `u = phi(Y)`.
pub trait Chart<T: Real> {
    fn name(&self) -> &str;

    /// Number of coordinates.
    fn size(&self) -> usize;

    fn coordinate_names(&self) -> Vec<String> {
        (0..self.size()).map(|a| format!("u{a}")).collect()
    }

    fn in_domain(&self, y: &[T]) -> bool;

    fn forward(&self, y: &[T]) -> Result<Vec<T>>;

    fn inverse(&self, u: &[T]) -> Result<Vec<T>>;

    /// `J^a_mu = du^a / dY_mu`; central differences unless overridden.
    fn jacobian(&self, y: &[T]) -> Result<SquareMatrix<T>> {
        numeric_jacobian(self, y, T::JACOBIAN_STEP)
    }
}

/// Central-difference Jacobian of `chart.forward` at `y`.
pub fn numeric_jacobian<T: Real, C: Chart<T> + ?Sized>(chart: &C, y: &[T], h: T) -> Result<SquareMatrix<T>> {
    check_dim(chart.size(), y.len())?;
    let m = y.len();
    let mut jac = SquareMatrix::zeros(m);
    let mut p = y.to_vec();
    let two_h = h + h;
    for mu in 0..m {
        p[mu] = y[mu] + h;
        let plus = chart.forward(&p)?;
        p[mu] = y[mu] - h;
        let minus = chart.forward(&p)?;
        p[mu] = y[mu];
        for a in 0..m {
            jac[(a, mu)] = (plus[a] - minus[a]) / two_h;
        }
    }
    Ok(jac)
}

/// `u = Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityChart {
    size: usize,
}

impl IdentityChart {
    pub fn new(size: usize) -> Self {
        Self { size }
    }
}

impl<T: Real> Chart<T> for IdentityChart {
    fn name(&self) -> &str {
        "identity"
    }

    fn size(&self) -> usize {
        self.size
    }

    fn coordinate_names(&self) -> Vec<String> {
        (0..self.size).map(|mu| format!("Y_{mu}")).collect()
    }

    fn in_domain(&self, y: &[T]) -> bool {
        y.len() == self.size
    }

    fn forward(&self, y: &[T]) -> Result<Vec<T>> {
        check_dim(self.size, y.len())?;
        Ok(y.to_vec())
    }

    fn inverse(&self, u: &[T]) -> Result<Vec<T>> {
        check_dim(self.size, u.len())?;
        Ok(u.to_vec())
    }

    fn jacobian(&self, y: &[T]) -> Result<SquareMatrix<T>> {
        check_dim(self.size, y.len())?;
        Ok(SquareMatrix::identity(self.size))
    }
}

/// Polar coordinates `(y0, r, theta, phi)` on the two-level space with
///
/// ```text
/// Y_1 = r sin(theta) sin(phi),  Y_2 = r sin(theta) cos(phi),  Y_3 = r cos(theta)
/// ```
///
/// so `phi` is measured from the `Y_2` axis towards `Y_1`. This placement
/// reverses orientation relative to the usual convention, which flips the
/// sign of the `(theta, phi)` Poisson component.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphericalChart;

pub fn spherical_chart() -> SphericalChart {
    SphericalChart
}

impl SphericalChart {
    fn polar_parts<T: Real>(y: &[T]) -> Result<(T, T, T)> {
        check_dim(4, y.len())?;
        let rho2 = y[1] * y[1] + y[2] * y[2];
        let r = (rho2 + y[3] * y[3]).sqrt();
        if !(r > T::CHART_GUARD) {
            return Err(Error::SingularChart(format!("r = {r} at the origin of the ball")));
        }
        let rho = rho2.sqrt();
        if !(rho / r > T::CHART_GUARD) {
            return Err(Error::SingularChart("sin(theta) = 0 on the polar axis".into()));
        }
        Ok((r, rho, rho2))
    }
}

impl<T: Real> Chart<T> for SphericalChart {
    fn name(&self) -> &str {
        "spherical"
    }

    fn size(&self) -> usize {
        4
    }

    fn coordinate_names(&self) -> Vec<String> {
        ["y0", "r", "theta", "phi"].iter().map(|s| s.to_string()).collect()
    }

    fn in_domain(&self, y: &[T]) -> bool {
        Self::polar_parts(y).is_ok()
    }

    fn forward(&self, y: &[T]) -> Result<Vec<T>> {
        let (r, _, _) = Self::polar_parts(y)?;
        let cos_theta = (y[3] / r).max(-T::one()).min(T::one());
        Ok(vec![y[0], r, cos_theta.acos(), y[1].atan2(y[2])])
    }

    fn inverse(&self, u: &[T]) -> Result<Vec<T>> {
        check_dim(4, u.len())?;
        let (r, theta, phi) = (u[1], u[2], u[3]);
        if !(r > T::CHART_GUARD) || !(theta.sin() > T::CHART_GUARD) {
            return Err(Error::SingularChart(format!(
                "(r, theta) = ({r}, {theta}) outside the chart"
            )));
        }
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(vec![u[0], r * st * sp, r * st * cp, r * ct])
    }

    fn jacobian(&self, y: &[T]) -> Result<SquareMatrix<T>> {
        let (r, rho, rho2) = Self::polar_parts(y)?;
        let (x, yy, z) = (y[1], y[2], y[3]);
        let r2 = r * r;
        let mut j = SquareMatrix::zeros(4);
        j[(0, 0)] = T::one();
        j[(1, 1)] = x / r;
        j[(1, 2)] = yy / r;
        j[(1, 3)] = z / r;
        j[(2, 1)] = x * z / (r2 * rho);
        j[(2, 2)] = yy * z / (r2 * rho);
        j[(2, 3)] = -rho / r2;
        j[(3, 1)] = yy / rho2;
        j[(3, 2)] = -x / rho2;
        Ok(j)
    }
}

/// File format for a user-supplied polynomial chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialChartSpec<T> {
    pub name: String,
    pub forward: Vec<PolynomialFieldSpec<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<PolynomialFieldSpec<T>>>,
}

/// Chart whose components are polynomials in `Y`, with an exact Jacobian.
///
/// Without an explicit inverse, `phi^{-1}` is found by Newton iteration
/// started at `u` itself, which suits near-identity charts.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialChart<T> {
    name: String,
    forward: Vec<PolynomialField<T>>,
    inverse: Option<Vec<PolynomialField<T>>>,
}

impl<T: Real> PolynomialChart<T> {
    pub fn from_spec(spec: &PolynomialChartSpec<T>) -> Result<Self> {
        let size = spec.forward.len();
        let build = |fields: &[PolynomialFieldSpec<T>]| -> Result<Vec<PolynomialField<T>>> {
            check_dim(size, fields.len())?;
            fields
                .iter()
                .map(|f| {
                    let p = PolynomialField::from_spec(f)?;
                    check_dim(size, p.size())?;
                    Ok(p)
                })
                .collect()
        };
        if size == 0 {
            return Err(Error::InvalidInput("chart needs at least one component".into()));
        }
        Ok(Self {
            name: spec.name.clone(),
            forward: build(&spec.forward)?,
            inverse: spec.inverse.as_deref().map(build).transpose()?,
        })
    }

    fn exact_jacobian(&self, y: &[T]) -> SquareMatrix<T> {
        let rows: Vec<Vec<T>> = self.forward.iter().map(|f| f.gradient(y)).collect();
        SquareMatrix::from_rows(&rows).expect("square by construction")
    }
}

impl<T: Real> Chart<T> for PolynomialChart<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn size(&self) -> usize {
        self.forward.len()
    }

    fn in_domain(&self, y: &[T]) -> bool {
        y.len() == self.size()
            && self
                .exact_jacobian(y)
                .solve(&vec![T::zero(); y.len()], T::CHART_GUARD)
                .is_some()
    }

    fn forward(&self, y: &[T]) -> Result<Vec<T>> {
        check_dim(self.size(), y.len())?;
        Ok(self.forward.iter().map(|f| f.value(y)).collect())
    }

    fn inverse(&self, u: &[T]) -> Result<Vec<T>> {
        check_dim(self.size(), u.len())?;
        if let Some(inv) = &self.inverse {
            return Ok(inv.iter().map(|f| f.value(u)).collect());
        }
        let mut y = u.to_vec();
        for _ in 0..100 {
            let fy = self.forward(&y)?;
            let residual: Vec<T> = fy.iter().zip(u).map(|(a, b)| *a - *b).collect();
            let norm = residual.iter().map(|x| x.abs()).fold(T::zero(), T::max);
            if norm <= T::epsilon() * T::lit(16.0) * T::one().max(u.iter().map(|x| x.abs()).fold(T::zero(), T::max)) {
                return Ok(y);
            }
            let step = self
                .exact_jacobian(&y)
                .solve(&residual, T::CHART_GUARD)
                .ok_or_else(|| Error::SingularChart("Jacobian is singular".into()))?;
            for (yi, si) in y.iter_mut().zip(&step) {
                *yi -= *si;
            }
        }
        Err(Error::SingularChart("Newton inversion did not converge".into()))
    }

    fn jacobian(&self, y: &[T]) -> Result<SquareMatrix<T>> {
        check_dim(self.size(), y.len())?;
        Ok(self.exact_jacobian(y))
    }
}

/// Components of a bivector in some chart at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBivectorAtPoint<T> {
    pub chart: String,
    pub coordinate_names: Vec<String>,
    pub point: Vec<T>,
    pub components: SquareMatrix<T>,
}

/// `T'^{ab}(u) = J^a_mu(Y) J^b_nu(Y) T^{mu nu}(Y)` with `u = phi(Y)`.
///
/// Only the upper triangle is contracted; the lower one is mirrored so the
/// (anti)symmetry of the source survives exactly.
pub fn pushforward<T: Real, C: Chart<T> + ?Sized>(
    tensor: &AffineBivectorField<T>,
    chart: &C,
    y: &StatePoint<T>,
) -> Result<GeneralBivectorAtPoint<T>> {
    check_dim(tensor.size(), chart.size())?;
    let p = y.coords();
    let u = chart.forward(p)?;
    let jac = chart.jacobian(p)?;
    let t = tensor.components(p);
    let jt = &jac * &t;
    let m = tensor.size();
    let mut out = SquareMatrix::zeros(m);
    for a in 0..m {
        for b in a..m {
            if a == b && tensor.symmetry() == Symmetry::Antisymmetric {
                continue;
            }
            let v: T = (0..m).map(|nu| jt[(a, nu)] * jac[(b, nu)]).sum();
            out[(a, b)] = v;
            // 0 - v keeps a vanishing mirrored entry at +0
            out[(b, a)] = match tensor.symmetry() {
                Symmetry::Symmetric => v,
                Symmetry::Antisymmetric => T::zero() - v,
            };
        }
    }
    Ok(GeneralBivectorAtPoint {
        chart: chart.name().to_string(),
        coordinate_names: chart.coordinate_names(),
        point: u,
        components: out,
    })
}

/// `|T(dF, dK)(Y) - T'(d(F o phi^-1), d(K o phi^-1))(phi(Y))|`, the
/// pulled-back gradients taken by central differences in chart coordinates.
pub fn verify_bracket_covariance<T: Real, C: Chart<T> + ?Sized>(
    tensor: &AffineBivectorField<T>,
    chart: &C,
    f: &impl ScalarField<T>,
    k: &impl ScalarField<T>,
    y: &StatePoint<T>,
) -> Result<T> {
    check_dim(tensor.size(), f.size())?;
    check_dim(tensor.size(), k.size())?;
    let p = y.coords();
    let cartesian = tensor.contract(p, &f.gradient(p), &k.gradient(p));
    let pushed = pushforward(tensor, chart, y)?;
    let pulled = |field: &dyn Fn(&[T]) -> T| {
        central_gradient(
            |u: &[T]| chart.inverse(u).map(|yy| field(&yy)).unwrap_or_else(|_| T::nan()),
            &pushed.point,
            T::CHART_STEP,
        )
    };
    let df = pulled(&|yy: &[T]| f.value(yy));
    let dk = pulled(&|yy: &[T]| k.value(yy));
    if df.iter().chain(&dk).any(|x| !x.is_finite()) {
        return Err(Error::SingularChart("difference stencil left the chart domain".into()));
    }
    Ok((cartesian - pushed.components.bilinear(&df, &dk)).abs())
}

/// `{u^a, u^b}` from the Cartesian tensor, with the chart functions
/// differentiated numerically in `Y`. Independent of any closed-form Jacobian.
pub fn coordinate_bracket<T: Real, C: Chart<T> + ?Sized>(
    tensor: &AffineBivectorField<T>,
    chart: &C,
    a: usize,
    b: usize,
    y: &StatePoint<T>,
) -> Result<T> {
    let jac = numeric_jacobian(chart, y.coords(), T::JACOBIAN_STEP)?;
    let row = |i: usize| (0..chart.size()).map(|mu| jac[(i, mu)]).collect::<Vec<_>>();
    Ok(tensor.contract(y.coords(), &row(a), &row(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;
    use crate::fields::{g_field, lambda_field, FnField, LinearField, PolynomialTerm};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn raw(y: [f64; 4]) -> StatePoint<f64> {
        StatePoint::new(2, y.to_vec()).unwrap()
    }

    #[test]
    fn spherical_forward_examples() {
        let c = spherical_chart();
        let u = Chart::<f64>::forward(&c, &[0.5, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(u, vec![0.5, 1.0, FRAC_PI_2, 0.0]);
        let u = Chart::<f64>::forward(&c, &[0.5, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(u, vec![0.5, 1.0, FRAC_PI_2, FRAC_PI_2]);
        assert!(matches!(
            Chart::<f64>::forward(&c, &[0.5, 0.0, 0.0, 1.0]),
            Err(Error::SingularChart(_))
        ));
        assert!(matches!(
            Chart::<f64>::forward(&c, &[0.5, 0.0, 0.0, 0.0]),
            Err(Error::SingularChart(_))
        ));
    }

    #[test]
    fn spherical_roundtrip() {
        let c = spherical_chart();
        let y = [0.5, 0.12, -0.3, 0.2];
        let back = c.inverse(&c.forward(&y).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&y) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
        assert!(c.inverse(&[0.5, 1.0, PI, 0.0]).is_err());
    }

    #[test]
    fn closed_form_jacobian_matches_numeric() {
        let c = spherical_chart();
        let y = [0.5, 0.12, -0.3, 0.2];
        let exact = c.jacobian(&y).unwrap();
        let approx = numeric_jacobian(&c, &y, 1e-7).unwrap();
        assert!(exact.max_abs_diff(&approx) < 1e-7);
    }

    #[test]
    fn g_in_spherical_coordinates() {
        let b = build_basis::<f64>(2).unwrap();
        let pushed = pushforward(&g_field(&b), &spherical_chart(), &raw([0.5, 0.0, 1.0, 0.0])).unwrap();
        let t = &pushed.components;
        assert_abs_diff_eq!(t[(0, 1)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(2, 2)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(3, 3)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(0, 0)], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 1)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn lambda_in_spherical_coordinates() {
        let b = build_basis::<f64>(2).unwrap();
        let pushed = pushforward(&lambda_field(&b), &spherical_chart(), &raw([0.5, 0.0, 1.0, 0.0])).unwrap();
        let t = &pushed.components;
        for a in 0..4 {
            for c in 0..4 {
                if (a, c) != (2, 3) && (a, c) != (3, 2) {
                    assert_abs_diff_eq!(t[(a, c)], 0.0, epsilon = 1e-15);
                }
            }
        }
        assert_eq!(t[(2, 3)], -t[(3, 2)]);
        // phi runs clockwise about Y_3 seen from +Y_3, so {theta, phi} = -1/(r sin(theta))
        assert_abs_diff_eq!(t[(2, 3)], -1.0, epsilon = 1e-15);
        let y = raw([0.5, 0.1, 0.2, -0.3]);
        let pushed = pushforward(&lambda_field(&b), &spherical_chart(), &y).unwrap();
        let oracle = coordinate_bracket(&lambda_field(&b), &spherical_chart(), 2, 3, &y).unwrap();
        assert_abs_diff_eq!(pushed.components[(2, 3)], oracle, epsilon = 1e-7);
        let u = spherical_chart().forward(y.coords()).unwrap();
        assert_abs_diff_eq!(oracle, -1.0 / (u[1] * u[2].sin()), epsilon = 1e-7);
    }

    #[test]
    fn identity_chart_leaves_components() {
        let b = build_basis::<f64>(2).unwrap();
        let y = raw([0.5, 0.1, 0.2, -0.1]);
        let l = lambda_field(&b);
        let pushed = pushforward(&l, &IdentityChart::new(4), &y).unwrap();
        assert_eq!(pushed.components, l.components(y.coords()));
        assert_eq!(pushed.point, y.coords());
    }

    #[test]
    fn covariance_examples() {
        let b = build_basis::<f64>(2).unwrap();
        let l = lambda_field(&b);
        let c = spherical_chart();
        let y = raw([0.5, 0.0, 0.25, 0.25]);
        let f = LinearField::coordinate(4, 1);
        let k = LinearField::coordinate(4, 2);
        assert!(verify_bracket_covariance(&l, &c, &f, &k, &y).unwrap() < 1e-8);
        assert_eq!(verify_bracket_covariance(&l, &c, &f, &f, &y).unwrap(), 0.0);
        let radial = FnField::new(4, |p: &[f64]| (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt());
        let y = raw([0.5, 0.1, 0.25, 0.25]);
        assert!(verify_bracket_covariance(&l, &c, &radial, &k, &y).unwrap() < 1e-8);
        assert!(bracket_value(&l, &radial, &k, &y).abs() < 1e-8);
    }

    fn bracket_value(
        l: &AffineBivectorField<f64>,
        f: &impl ScalarField<f64>,
        k: &impl ScalarField<f64>,
        y: &StatePoint<f64>,
    ) -> f64 {
        l.contract(y.coords(), &f.gradient(y.coords()), &k.gradient(y.coords()))
    }

    #[test]
    fn polynomial_chart_with_newton_inverse() {
        // u = (Y0, Y1 + Y2^2, Y2, Y3)
        let comp = |terms: Vec<(f64, [u32; 4])>| PolynomialFieldSpec {
            terms: terms
                .into_iter()
                .map(|(coeff, e)| PolynomialTerm {
                    coeff,
                    exponents: e.to_vec(),
                })
                .collect(),
        };
        let spec = PolynomialChartSpec {
            name: "shear".into(),
            forward: vec![
                comp(vec![(1.0, [1, 0, 0, 0])]),
                comp(vec![(1.0, [0, 1, 0, 0]), (1.0, [0, 0, 2, 0])]),
                comp(vec![(1.0, [0, 0, 1, 0])]),
                comp(vec![(1.0, [0, 0, 0, 1])]),
            ],
            inverse: None,
        };
        let chart = PolynomialChart::from_spec(&spec).unwrap();
        let y = [0.5, 0.1, 0.3, -0.2];
        let u = chart.forward(&y).unwrap();
        let back = chart.inverse(&u).unwrap();
        for (a, b) in back.iter().zip(&y) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
        let exact = chart.jacobian(&y).unwrap();
        let approx = numeric_jacobian(&chart, &y, 1e-7).unwrap();
        assert!(exact.max_abs_diff(&approx) < 1e-7);
        assert!(chart.in_domain(&y));

        let b = build_basis::<f64>(2).unwrap();
        let f = LinearField::coordinate(4, 3);
        let k = LinearField::coordinate(4, 1);
        let r = verify_bracket_covariance(&lambda_field(&b), &chart, &f, &k, &raw(y)).unwrap();
        assert!(r < 1e-8, "{r}");
    }
}
