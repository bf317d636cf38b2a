//! Finite-dimensional quantum mechanics written with tensor fields.
//!
//! Hermitian operators form a Lie-Jordan algebra under
//! `[A, B] = -i (AB - BA)` and `A o B = AB + BA`. Pairing operators with
//! density matrices turns both products into affine contravariant tensor
//! fields on the space of states: the Poisson tensor `Lambda` and the
//! Jordan tensor `G`. This crate builds those tensors for `u*(N)`, evaluates
//! brackets, star products and variances with them, integrates the
//! Hamiltonian flows they generate, tests candidate observables through
//! `L_{X_F} G = 0`, and transports everything to curvilinear charts.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the scalar.

// `!(x > 0)` guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod charts;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod io;
pub mod matrix;
pub mod observable;
pub mod sample;
pub mod scalar;
pub mod state;
pub mod verify;

pub use algebra::{
    build_basis, check_associator, check_jordan_identity, check_leibniz, commutator, decompose_product,
    fit_associator_constant, jacobi_residual, jordan, structure_constants, AlgebraBasis, ProductParts,
    StructureConstants, ASSOCIATOR_CONSTANT,
};
pub use charts::{
    pushforward, spherical_chart, verify_bracket_covariance, Chart, GeneralBivectorAtPoint, IdentityChart,
    PolynomialChart, PolynomialChartSpec, SphericalChart,
};
pub use dynamics::{
    exact_evolution, expectation_series, hamiltonian_vector_field, integrate, HamiltonianVectorField, Trajectory,
    VectorField,
};
pub use error::{Error, Result};
pub use fields::{
    bracket, expectation_field, g_field, lambda_field, star_product, variance, AffineBivectorField, LinearField,
    PolynomialField, PolynomialFieldSpec, PolynomialTerm, ScalarField, Symmetry,
};
pub use matrix::{ComplexMatrix, HermitianMatrix, SquareMatrix};
pub use observable::{is_observable, lie_derivative_g, LieDerivativeReport};
pub use scalar::Real;
pub use state::{
    convex_combine, from_point, probability_distribution, pure_state, purity, to_point, DensityMatrix, HilbertVector,
    ProbabilityDistribution, StatePoint,
};

pub type HermitianMatrix64 = HermitianMatrix<f64>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type AlgebraBasis64 = AlgebraBasis<f64>;
pub type StatePoint64 = StatePoint<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type AffineBivectorField64 = AffineBivectorField<f64>;
pub type Trajectory64 = Trajectory<f64>;

pub type HermitianMatrix32 = HermitianMatrix<f32>;
pub type AlgebraBasis32 = AlgebraBasis<f32>;
pub type StatePoint32 = StatePoint<f32>;
pub type AffineBivectorField32 = AffineBivectorField<f32>;
