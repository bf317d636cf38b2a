//! The generic core instantiated at `f32`.

use geoquant::sample::{random_hermitian, stream_rng};
use geoquant::{
    build_basis, integrate, jacobi_residual, AffineBivectorField32, AlgebraBasis32, HermitianMatrix32, StatePoint32,
};

#[test]
fn qubit_basis_and_tensors() {
    let basis: AlgebraBasis32 = build_basis(2).unwrap();
    assert!(basis.orthonormality_residual() < 1e-6);
    assert!((basis.c().get(1, 2, 3) - 1.0).abs() < 1e-6);
    let lambda: AffineBivectorField32 = geoquant::lambda_field(&basis);
    let y = StatePoint32::new(2, vec![0.5, 0.1, 0.2, 0.3]).unwrap();
    let t = lambda.components(y.coords());
    assert!((t[(1, 2)] - 0.3).abs() < 1e-6);
}

#[test]
fn jacobi_and_precession() {
    let mut rng = stream_rng(5, "f32");
    let [a, b, c]: [HermitianMatrix32; 3] = [
        random_hermitian(3, &mut rng),
        random_hermitian(3, &mut rng),
        random_hermitian(3, &mut rng),
    ];
    assert!(jacobi_residual(&a, &b, &c).unwrap() < 1e-4);

    let basis: AlgebraBasis32 = build_basis(2).unwrap();
    let y0 = StatePoint32::new(2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
    let traj = integrate(basis.element(3), &y0, 1.0, 1e-2, &basis).unwrap();
    let y = traj.last().coords();
    assert!((y[1] - 0.5 * 2.0f32.cos()).abs() < 1e-4);
    assert!((y[2] + 0.5 * 2.0f32.sin()).abs() < 1e-4);
}
