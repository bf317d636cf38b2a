//! Hamiltonian flows on the space of states generated by the Poisson tensor.
//!
//! The Hamiltonian vector field of `F` is `X_F^nu = Lambda^{mu nu} dF_mu`, so
//! that `dK/dt = {F, K}` along its flow and expectation values obey
//! `d e_A / dt = e_{[H, A]}` with `[H, A] = -i (HA - AH)`.

use num_complex::Complex;

use crate::algebra::AlgebraBasis;
use crate::error::{check_dim, Error, Result};
use crate::fields::{expectation_field, lambda_field, AffineBivectorField, ScalarField};
use crate::matrix::HermitianMatrix;
use crate::scalar::Real;
use crate::state::{DensityMatrix, StatePoint};

/// Vector field on the coordinate space.
pub trait VectorField<T: Real> {
    fn size(&self) -> usize;
    fn eval(&self, y: &[T]) -> Vec<T>;
}

/// `X_F = Lambda(dF, .)`.
#[derive(Debug, Clone)]
pub struct HamiltonianVectorField<T, F> {
    generator: F,
    lambda: AffineBivectorField<T>,
}

impl<T: Real, F: ScalarField<T>> HamiltonianVectorField<T, F> {
    pub fn generator(&self) -> &F {
        &self.generator
    }

    pub fn lambda(&self) -> &AffineBivectorField<T> {
        &self.lambda
    }
}

impl<T: Real, F: ScalarField<T>> VectorField<T> for HamiltonianVectorField<T, F> {
    fn size(&self) -> usize {
        self.lambda.size()
    }

    fn eval(&self, y: &[T]) -> Vec<T> {
        self.lambda.contract_first(y, &self.generator.gradient(y))
    }
}

pub fn hamiltonian_vector_field<T: Real, F: ScalarField<T>>(
    generator: F,
    lambda: &AffineBivectorField<T>,
) -> Result<HamiltonianVectorField<T, F>> {
    check_dim(lambda.size(), generator.size())?;
    Ok(HamiltonianVectorField {
        generator,
        lambda: lambda.clone(),
    })
}

/// Sampled solution of a flow: increasing times and the points reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    times: Vec<T>,
    points: Vec<StatePoint<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn points(&self) -> &[StatePoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &StatePoint<T> {
        self.points.last().expect("trajectory holds the initial point")
    }

    /// Drift of the conserved quantities of a unitary flow, plus the smallest
    /// eigenvalue met along the way (positivity is monitored, never enforced).
    pub fn conservation(&self, h: &HermitianMatrix<T>, basis: &AlgebraBasis<T>) -> Result<ConservationReport<T>> {
        let eh = expectation_field(h, basis)?;
        let first = self.points[0].coords();
        let (e0, p0, y00) = (eh.value(first), self.points[0].purity(), first[0]);
        let mut report = ConservationReport {
            energy_drift: T::zero(),
            purity_drift: T::zero(),
            trace_coordinate_drift: T::zero(),
            min_eigenvalue: T::infinity(),
        };
        for p in &self.points {
            let y = p.coords();
            report.energy_drift = report.energy_drift.max((eh.value(y) - e0).abs());
            report.purity_drift = report.purity_drift.max((p.purity() - p0).abs());
            report.trace_coordinate_drift = report.trace_coordinate_drift.max((y[0] - y00).abs());
            let rho = basis.reconstruct(y)?;
            report.min_eigenvalue = report.min_eigenvalue.min(rho.min_eigenvalue());
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationReport<T> {
    pub energy_drift: T,
    pub purity_drift: T,
    pub trace_coordinate_drift: T,
    pub min_eigenvalue: T,
}

fn axpy<T: Real>(y: &[T], a: T, k: &[T]) -> Vec<T> {
    y.iter().zip(k).map(|(y, k)| *y + a * *k).collect()
}

/// One classic fourth-order Runge-Kutta step.
pub fn rk4_step<T: Real>(field: &impl VectorField<T>, y: &[T], h: T) -> Vec<T> {
    let half = T::lit(0.5);
    let k1 = field.eval(y);
    let k2 = field.eval(&axpy(y, h * half, &k1));
    let k3 = field.eval(&axpy(y, h * half, &k2));
    let k4 = field.eval(&axpy(y, h, &k3));
    let sixth = h / T::lit(6.0);
    (0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// Fixed-step RK4 integration of any vector field from `y0` over `[0, t_final]`.
///
/// The last step is shortened when `dt` does not divide `t_final`.
pub fn integrate_field<T: Real>(
    field: &impl VectorField<T>,
    y0: &StatePoint<T>,
    t_final: T,
    dt: T,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidStep(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= T::zero()) || !t_final.is_finite() {
        return Err(Error::InvalidStep(format!(
            "t_final must be nonnegative, got {t_final}"
        )));
    }
    check_dim(field.size(), y0.coords().len())?;
    let ratio = t_final / dt;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= T::lit(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        ratio.ceil()
    }
    .to_usize()
    .ok_or_else(|| Error::InvalidStep("too many steps".into()))?;

    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    points.push(y0.clone());
    let mut y = y0.coords().to_vec();
    for i in 1..=steps {
        let t_prev = times[i - 1];
        let t_next = if i == steps {
            t_final
        } else {
            T::from_usize_lossy(i) * dt
        };
        y = rk4_step(field, &y, t_next - t_prev);
        times.push(t_next);
        points.push(StatePoint::new(y0.dim(), y.clone())?);
    }
    Ok(Trajectory { times, points })
}

/// Ehrenfest flow of `e_H` from a valid initial state.
pub fn integrate<T: Real>(
    h: &HermitianMatrix<T>,
    y0: &StatePoint<T>,
    t_final: T,
    dt: T,
    basis: &AlgebraBasis<T>,
) -> Result<Trajectory<T>> {
    check_dim(basis.dim(), h.dim())?;
    y0.to_density(basis)?;
    let field = hamiltonian_vector_field(expectation_field(h, basis)?, &lambda_field(basis))?;
    integrate_field(&field, y0, t_final, dt)
}

/// `e_A` along a trajectory.
pub fn expectation_series<T: Real>(
    a: &HermitianMatrix<T>,
    traj: &Trajectory<T>,
    basis: &AlgebraBasis<T>,
) -> Result<Vec<T>> {
    if let Some(p) = traj.points.first() {
        check_dim(basis.dim(), p.dim())?;
    }
    let ea = expectation_field(a, basis)?;
    Ok(traj.points.iter().map(|p| ea.value(p.coords())).collect())
}

/// Operator-side solution `rho(t) = U rho U^dagger` with `U = exp(i H t)`.
///
/// This is the flow `d rho/dt = i (H rho - rho H)` whose expectation values
/// satisfy `d e_A/dt = e_{[H,A]}`; it is computed by matrix exponentiation
/// and never touches the Poisson tensor.
pub fn exact_evolution<T: Real>(h: &HermitianMatrix<T>, rho: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    check_dim(h.dim(), rho.dim())?;
    let u = h.as_matrix().scale(Complex::new(T::zero(), t)).exp();
    let evolved = &(&u * rho.matrix().as_matrix()) * &u.adjoint();
    // restore exact Hermiticity lost to rounding in the two products
    let sym = (&evolved + &evolved.adjoint()).scale_real(T::lit(0.5));
    DensityMatrix::new(HermitianMatrix::new(sym)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;
    use crate::fields::LinearField;
    use approx::assert_abs_diff_eq;

    fn basis2() -> AlgebraBasis<f64> {
        build_basis(2).unwrap()
    }

    #[test]
    fn sigma_z_field_is_rotation() {
        let b = basis2();
        let x = hamiltonian_vector_field(expectation_field(b.element(3), &b).unwrap(), &lambda_field(&b)).unwrap();
        let y = [0.5, 0.1, 0.2, 0.3];
        let v = x.eval(&y);
        assert_eq!(v, vec![0.0, 2.0 * 0.2, -2.0 * 0.1, 0.0]);
    }

    #[test]
    fn constant_and_central_generators_give_zero_field() {
        let b = basis2();
        let l = lambda_field(&b);
        let y = [0.5, 0.1, -0.2, 0.3];
        let x = hamiltonian_vector_field(LinearField::constant(4, 3.0), &l).unwrap();
        assert_eq!(x.eval(&y), vec![0.0; 4]);
        let x = hamiltonian_vector_field(expectation_field(b.element(0), &b).unwrap(), &l).unwrap();
        assert_eq!(x.eval(&y), vec![0.0; 4]);
    }

    #[test]
    fn generator_size_checked() {
        let l = lambda_field(&basis2());
        assert!(hamiltonian_vector_field(LinearField::constant(9, 1.0), &l).is_err());
    }

    #[test]
    fn invalid_steps_rejected() {
        let b = basis2();
        let y0 = StatePoint::new(2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(
            integrate(b.element(3), &y0, 1.0, 0.0, &b),
            Err(Error::InvalidStep(_))
        ));
        assert!(matches!(
            integrate(b.element(3), &y0, 1.0, -1e-3, &b),
            Err(Error::InvalidStep(_))
        ));
        assert!(matches!(
            integrate(b.element(3), &y0, -1.0, 1e-3, &b),
            Err(Error::InvalidStep(_))
        ));
        let outside = StatePoint::new(2, vec![0.5, 0.9, 0.0, 0.0]).unwrap();
        assert!(matches!(
            integrate(b.element(3), &outside, 1.0, 1e-3, &b),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn precession_closed_form() {
        let b = basis2();
        let y0 = StatePoint::new(2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let t_final = std::f64::consts::FRAC_PI_2;
        let traj = integrate(b.element(3), &y0, t_final, 1e-3, &b).unwrap();
        assert_abs_diff_eq!(*traj.times().last().unwrap(), t_final);
        let mut err: f64 = 0.0;
        for (t, p) in traj.times().iter().zip(traj.points()) {
            let y = p.coords();
            err = err.max((y[1] - 0.5 * (2.0 * t).cos()).abs());
            err = err.max((y[2] + 0.5 * (2.0 * t).sin()).abs());
        }
        assert!(err < 1e-6, "{err}");
        let sx = expectation_series(b.element(1), &traj, &b).unwrap();
        for (t, v) in traj.times().iter().zip(&sx) {
            assert_abs_diff_eq!(*v, (2.0 * t).cos(), epsilon = 1e-5);
        }
    }

    #[test]
    fn trivial_flows_are_constant() {
        let b = basis2();
        let y0 = StatePoint::new(2, vec![0.5, 0.1, 0.2, -0.3]).unwrap();
        let traj = integrate(b.element(0), &y0, 1.0, 1e-2, &b).unwrap();
        assert!(traj.points().iter().all(|p| p == &y0));
        let mixed = StatePoint::new(2, vec![0.5, 0.0, 0.0, 0.0]).unwrap();
        let h = b.reconstruct(&[0.3, 1.0, -2.0, 0.5]).unwrap();
        let traj = integrate(&h, &mixed, 1.0, 1e-2, &b).unwrap();
        assert!(traj.points().iter().all(|p| p == &mixed));
        let ones = expectation_series(b.element(0), &traj, &b).unwrap();
        assert!(ones.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn energy_series_is_constant() {
        let b = basis2();
        let h = b.reconstruct(&[0.0, 0.4, -0.7, 1.1]).unwrap();
        let y0 = StatePoint::new(2, vec![0.5, 0.2, 0.1, 0.3]).unwrap();
        let traj = integrate(&h, &y0, 2.0, 1e-3, &b).unwrap();
        let e = expectation_series(&h, &traj, &b).unwrap();
        assert!(e.iter().all(|v| (*v - e[0]).abs() < 1e-10));
        let report = traj.conservation(&h, &b).unwrap();
        assert!(report.purity_drift < 1e-10);
        assert!(report.trace_coordinate_drift == 0.0);
        assert!(report.min_eigenvalue > 0.0);
    }

    #[test]
    fn non_dividing_step_lands_on_final_time() {
        let b = basis2();
        let y0 = StatePoint::new(2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let traj = integrate(b.element(3), &y0, 0.25, 0.1, &b).unwrap();
        assert_eq!(traj.len(), 4);
        assert_eq!(*traj.times().last().unwrap(), 0.25);
        let zero = integrate(b.element(3), &y0, 0.0, 0.1, &b).unwrap();
        assert_eq!(zero.len(), 1);
    }
}
