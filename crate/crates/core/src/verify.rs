//! Seeded end-to-end verification of every structural property the library
//! relies on, at a configurable Hilbert-space dimension.
//!
//! Each check draws from its own named random stream, so the report for a
//! given `(dim, seed)` is reproducible bit for bit. A check passes iff its
//! max residual is strictly below its tolerance; a NaN residual fails.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    build_basis, check_associator, check_jordan_identity, check_leibniz, commutator, fit_associator_constant,
    jacobi_residual, jordan, AlgebraBasis, ASSOCIATOR_CONSTANT,
};
use crate::charts::{
    coordinate_bracket, numeric_jacobian, pushforward, spherical_chart, verify_bracket_covariance, Chart,
};
use crate::dynamics::{exact_evolution, integrate, Trajectory};
use crate::error::{Error, Result};
use crate::fields::{
    bracket, expectation_field, g_field, lambda_field, linear_bracket, star_product, star_product_operators, variance,
    LinearField, PolynomialField,
};
use crate::matrix::{ComplexMatrix, HermitianMatrix, SquareMatrix};
use crate::observable::{is_observable, DEFAULT_TOLERANCE};
use crate::sample::{
    random_coefficients, random_hermitian, random_interior_point, random_mixed_state, random_pure_state, random_vector,
    stream_rng,
};
use crate::state::{
    convex_combine, from_point, probability_distribution, to_point, HilbertVector, ProbabilityDistribution, StatePoint,
};

/// `(name, module, default tolerance)` for every check, in report order.
pub const CHECKS: &[(&str, &str, f64)] = &[
    ("basis_orthonormality", "algebra_core", 1e-12),
    ("basis_reconstruction", "algebra_core", 1e-12),
    ("structure_constants", "algebra_core", 1e-12),
    ("pauli_structure_constants", "algebra_core", 1e-12),
    ("bilinearity", "algebra_core", 1e-12),
    ("closure_hermiticity", "algebra_core", 1e-12),
    ("jacobi_identity", "algebra_core", 1e-10),
    ("jordan_identity", "algebra_core", 1e-9),
    ("leibniz", "algebra_core", 1e-9),
    ("associator", "algebra_core", 1e-9),
    ("associator_constant", "algebra_core", 1e-9),
    ("state_roundtrip", "state_space", 1e-12),
    ("distribution_linearity", "state_space", 1e-12),
    ("pure_state_purity", "state_space", 1e-12),
    ("lambda_defining_property", "tensor_fields", 1e-12),
    ("g_defining_property", "tensor_fields", 1e-12),
    ("poisson_jacobi", "tensor_fields", 1e-10),
    ("tensor_leibniz", "tensor_fields", 1e-10),
    ("star_product", "tensor_fields", 1e-10),
    ("star_associativity", "tensor_fields", 1e-10),
    ("closed_forms_n2", "tensor_fields", 1e-12),
    ("angular_momentum", "tensor_fields", 1e-12),
    ("variance", "tensor_fields", 1e-12),
    ("precession", "dynamics", 1e-6),
    ("convergence_order", "dynamics", 1.0 / 12.0),
    ("exponential_agreement", "dynamics", 1e-8),
    ("energy_conservation", "dynamics", 1e-8),
    ("purity_conservation", "dynamics", 1e-8),
    ("trace_coordinate_conservation", "dynamics", 1e-12),
    ("casimir_conservation", "dynamics", 1e-7),
    ("flow_linearity", "dynamics", 1e-10),
    ("linear_sector", "observable_gate", DEFAULT_TOLERANCE),
    ("quadratic_soundness", "observable_gate", 0.1),
    ("quadratic_generic", "observable_gate", 0.05),
    ("constant_shift", "observable_gate", 1e-300),
    ("spherical_g_closed_form", "charts", 1e-9),
    ("spherical_lambda_orientation", "charts", 1e-9),
    ("radial_casimir", "charts", 1e-9),
    ("pushforward_symmetry", "charts", 1e-300),
    ("bracket_covariance", "charts", 1e-8),
    ("jacobian_cross_check", "charts", 1e-6),
    ("chart_roundtrip", "charts", 1e-12),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub module: String,
    pub trials: usize,
    /// `None` when skipped or when the check could not be evaluated.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
    /// `None` unless timing was requested; keeps reports byte-stable.
    pub wall_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub dim: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub dim: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub timing: bool,
}

impl VerifyConfig {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self {
            dim,
            seed,
            tolerances: BTreeMap::new(),
            timing: false,
        }
    }
}

/// Checks a tolerance override map against the known check names.
pub fn validate_tolerances(tolerances: &BTreeMap<String, f64>) -> Result<()> {
    for (name, tol) in tolerances {
        if !CHECKS.iter().any(|(n, _, _)| n == name) {
            return Err(Error::InvalidInput(format!("unknown check `{name}`")));
        }
        if !(*tol > 0.0) || !tol.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tolerance for `{name}` must be positive, got {tol}"
            )));
        }
    }
    Ok(())
}

enum Outcome {
    Measured { trials: usize, residual: f64 },
    Skipped(&'static str),
}

fn measured(trials: usize, residual: f64) -> Result<Outcome> {
    Ok(Outcome::Measured { trials, residual })
}

const ONLY_N2: Outcome = Outcome::Skipped("defined for N = 2 only");

/// Runs the full suite. Configuration errors are returned; failing checks are
/// reported, never returned as errors.
pub fn run_verification(config: &VerifyConfig) -> Result<VerificationReport> {
    validate_tolerances(&config.tolerances)?;
    let basis = build_basis::<f64>(config.dim)?;
    let ctx = Ctx {
        basis: &basis,
        n: config.dim,
        seed: config.seed,
        drift: OnceCell::new(),
    };
    let mut checks = Vec::with_capacity(CHECKS.len());
    for &(name, module, default_tol) in CHECKS {
        let tolerance = config.tolerances.get(name).copied().unwrap_or(default_tol);
        let start = Instant::now();
        let outcome = ctx.run(name);
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let (trials, max_residual, status, detail) = match outcome {
            Ok(Outcome::Measured { trials, residual }) => {
                let ok = residual < tolerance;
                (
                    trials,
                    Some(residual),
                    if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    None,
                )
            }
            Ok(Outcome::Skipped(why)) => (0, None, CheckStatus::Skipped, Some(why.to_string())),
            Err(e) => (0, None, CheckStatus::Fail, Some(e.to_string())),
        };
        checks.push(CheckResult {
            name: name.to_string(),
            module: module.to_string(),
            trials,
            max_residual,
            tolerance,
            status,
            wall_time_ms: config.timing.then_some(elapsed),
            detail,
        });
    }
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerificationReport {
        seed: config.seed,
        dim: config.dim,
        passed,
        checks,
    })
}

struct Ctx<'a> {
    basis: &'a AlgebraBasis<f64>,
    n: usize,
    seed: u64,
    drift: OnceCell<Result<Vec<Drift>>>,
}

/// Per-trajectory drift of energy, purity, `Y_0` and the spectral Casimirs.
#[derive(Debug, Clone, Copy)]
struct Drift {
    energy: f64,
    purity: f64,
    trace_coordinate: f64,
    casimir: f64,
}

fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn raw_commutator(a: &HermitianMatrix<f64>, b: &HermitianMatrix<f64>) -> ComplexMatrix<f64> {
    let (a, b) = (a.as_matrix(), b.as_matrix());
    (&(a * b) - &(b * a)).scale(Complex::new(0.0, -1.0))
}

fn raw_jordan(a: &HermitianMatrix<f64>, b: &HermitianMatrix<f64>) -> ComplexMatrix<f64> {
    let (a, b) = (a.as_matrix(), b.as_matrix());
    &(a * b) + &(b * a)
}

fn tr_rho(rho: &HermitianMatrix<f64>, m: &ComplexMatrix<f64>) -> Complex<f64> {
    (rho.as_matrix() * m).trace()
}

/// Orthonormal family from random vectors by modified Gram-Schmidt.
fn random_orthonormal_basis(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<HilbertVector<f64>>> {
    let mut out: Vec<Vec<Complex<f64>>> = Vec::with_capacity(n);
    while out.len() < n {
        let mut v = random_vector::<f64, _>(n, rng).components().to_vec();
        for e in &out {
            let proj: Complex<f64> = e.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(e) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            out.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    out.into_iter().map(HilbertVector::new).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Closed-form rotation of `(Y_1, Y_2)` under `H = sigma_3` from `(1/2, 1/2, 0, 0)`.
fn precession(t: f64) -> [f64; 4] {
    [0.5, 0.5 * (2.0 * t).cos(), -0.5 * (2.0 * t).sin(), 0.0]
}

fn precession_error(traj: &Trajectory<f64>) -> f64 {
    traj.times()
        .iter()
        .zip(traj.points())
        .map(|(t, p)| max_diff(p.coords(), &precession(*t)))
        .fold(0.0, f64::max)
}

impl Ctx<'_> {
    fn rng(&self, stream: &str) -> ChaCha8Rng {
        stream_rng(self.seed, stream)
    }

    fn herm(&self, rng: &mut ChaCha8Rng) -> HermitianMatrix<f64> {
        random_hermitian(self.n, rng)
    }

    fn state(&self, rng: &mut ChaCha8Rng) -> Result<(HermitianMatrix<f64>, StatePoint<f64>)> {
        let rho = random_mixed_state::<f64, _>(self.n, rng);
        let y = to_point(&rho, self.basis)?;
        Ok((rho.into_matrix(), y))
    }

    fn triples(&self, stream: &str, count: usize) -> Vec<[HermitianMatrix<f64>; 3]> {
        let mut rng = self.rng(stream);
        (0..count)
            .map(|_| [self.herm(&mut rng), self.herm(&mut rng), self.herm(&mut rng)])
            .collect()
    }

    fn run(&self, name: &str) -> Result<Outcome> {
        match name {
            "basis_orthonormality" => measured(1, self.basis.orthonormality_residual()),
            "basis_reconstruction" => self.basis_reconstruction(),
            "structure_constants" => self.structure_constants(),
            "pauli_structure_constants" => self.pauli_structure_constants(),
            "bilinearity" => self.bilinearity(),
            "closure_hermiticity" => self.closure_hermiticity(),
            "jacobi_identity" => self.triple_max("jacobi", 500, |[a, b, c]| jacobi_residual(a, b, c)),
            "jordan_identity" => self.triple_max("jordan", 500, |[a, b, _]| check_jordan_identity(a, b)),
            "leibniz" => self.triple_max("leibniz", 500, |[a, b, c]| check_leibniz(a, b, c)),
            "associator" => self.associator(false),
            "associator_constant" => self.associator(true),
            "state_roundtrip" => self.state_roundtrip(),
            "distribution_linearity" => self.distribution_linearity(),
            "pure_state_purity" => self.pure_state_purity(),
            "lambda_defining_property" => self.defining_property(true),
            "g_defining_property" => self.defining_property(false),
            "poisson_jacobi" => self.poisson_jacobi(),
            "tensor_leibniz" => self.tensor_leibniz(),
            "star_product" => self.star_product(),
            "star_associativity" => self.star_associativity(),
            "closed_forms_n2" => self.closed_forms_n2(),
            "angular_momentum" => self.angular_momentum(),
            "variance" => self.variance(),
            "precession" => self.precession(),
            "convergence_order" => self.convergence_order(),
            "exponential_agreement" => self.exponential_agreement(),
            "energy_conservation" => self.conservation(|d| d.energy),
            "purity_conservation" => self.conservation(|d| d.purity),
            "trace_coordinate_conservation" => self.conservation(|d| d.trace_coordinate),
            "casimir_conservation" => self.conservation(|d| d.casimir),
            "flow_linearity" => self.flow_linearity(),
            "linear_sector" => self.linear_sector(),
            "quadratic_soundness" => {
                if self.n != 2 {
                    return Ok(ONLY_N2);
                }
                self.quadratic_probe(1e-2)
            }
            "quadratic_generic" => self.quadratic_probe(DEFAULT_TOLERANCE),
            "constant_shift" => self.constant_shift(),
            "spherical_g_closed_form" => self.spherical(SphericalCheck::GClosedForm),
            "spherical_lambda_orientation" => self.spherical(SphericalCheck::LambdaOrientation),
            "radial_casimir" => self.spherical(SphericalCheck::RadialCasimir),
            "pushforward_symmetry" => self.spherical(SphericalCheck::Symmetry),
            "bracket_covariance" => self.spherical(SphericalCheck::Covariance),
            "jacobian_cross_check" => self.spherical(SphericalCheck::Jacobian),
            "chart_roundtrip" => self.spherical(SphericalCheck::Roundtrip),
            _ => Err(Error::InvalidInput(format!("unknown check `{name}`"))),
        }
    }

    fn triple_max(
        &self,
        stream: &str,
        count: usize,
        f: impl Fn(&[HermitianMatrix<f64>; 3]) -> Result<f64>,
    ) -> Result<Outcome> {
        let mut worst = 0.0f64;
        for t in self.triples(stream, count) {
            worst = worst.max(f(&t)?);
        }
        measured(count, worst)
    }

    fn basis_reconstruction(&self) -> Result<Outcome> {
        let mut rng = self.rng("reconstruction");
        let mut worst = self.basis.reconstruction_residual()?;
        for _ in 0..100 {
            let a = self.herm(&mut rng);
            let back = self.basis.reconstruct(&self.basis.coordinates(&a)?)?;
            worst = worst.max(back.sub(&a)?.max_abs());
        }
        measured(100, worst)
    }

    /// `[s_mu, s_nu] = 2 c s` and `s_mu o s_nu = 2 d s` against matrix products.
    fn structure_constants(&self) -> Result<Outcome> {
        let m = self.basis.size();
        let mut worst = 0.0f64;
        for mu in 0..m {
            for nu in 0..m {
                let (a, b) = (self.basis.element(mu), self.basis.element(nu));
                let mut lie = ComplexMatrix::zeros(self.n);
                let mut jor = ComplexMatrix::zeros(self.n);
                for la in 0..m {
                    let s = self.basis.element(la).as_matrix();
                    lie = &lie + &s.scale_real(2.0 * self.basis.c().get(mu, nu, la));
                    jor = &jor + &s.scale_real(2.0 * self.basis.d().get(mu, nu, la));
                }
                worst = worst
                    .max((&lie - &raw_commutator(a, b)).max_abs())
                    .max((&jor - &raw_jordan(a, b)).max_abs());
                for la in 0..m {
                    worst = worst
                        .max((self.basis.c().get(mu, nu, la) + self.basis.c().get(nu, mu, la)).abs())
                        .max((self.basis.d().get(mu, nu, la) - self.basis.d().get(nu, mu, la)).abs());
                }
            }
        }
        measured(m * m, worst)
    }

    fn pauli_structure_constants(&self) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let mut worst = 0.0f64;
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let c = levi_civita(j, k, l);
                    let d = if j == 0 {
                        delta(k, l)
                    } else if k == 0 {
                        delta(j, l)
                    } else if l == 0 {
                        delta(j, k)
                    } else {
                        0.0
                    };
                    worst = worst
                        .max((self.basis.c().get(j, k, l) - c).abs())
                        .max((self.basis.d().get(j, k, l) - d).abs());
                }
            }
        }
        measured(64, worst)
    }

    fn bilinearity(&self) -> Result<Outcome> {
        let mut rng = self.rng("bilinearity");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (a, b, c) = (self.herm(&mut rng), self.herm(&mut rng), self.herm(&mut rng));
            let s: f64 = rng.random_range(-2.0..2.0);
            let t: f64 = rng.random_range(-2.0..2.0);
            let comb = a.scale(s).add(&b.scale(t))?;
            for op in [commutator::<f64>, jordan::<f64>] {
                let lhs = op(&comb, &c)?;
                let rhs = op(&a, &c)?.scale(s).add(&op(&b, &c)?.scale(t))?;
                worst = worst.max(lhs.sub(&rhs)?.max_abs());
            }
        }
        measured(100, worst)
    }

    fn closure_hermiticity(&self) -> Result<Outcome> {
        let mut rng = self.rng("closure");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (a, b) = (self.herm(&mut rng), self.herm(&mut rng));
            worst = worst
                .max(raw_commutator(&a, &b).hermiticity_residual())
                .max(raw_jordan(&a, &b).hermiticity_residual());
        }
        measured(100, worst)
    }

    fn associator(&self, constant: bool) -> Result<Outcome> {
        let triples: Vec<_> = self
            .triples("associator", 100)
            .into_iter()
            .map(|[a, b, c]| (a, b, c))
            .collect();
        let k = fit_associator_constant(&triples)?
            .ok_or_else(|| Error::InvalidInput("associator fit saw only vanishing commutators".into()))?;
        if constant {
            return measured(100, (k - ASSOCIATOR_CONSTANT).abs());
        }
        let mut worst = 0.0f64;
        for (a, b, c) in &triples {
            worst = worst.max(check_associator(a, b, c, k)?);
        }
        measured(100, worst)
    }

    fn state_roundtrip(&self) -> Result<Outcome> {
        let mut rng = self.rng("roundtrip");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let rho = random_mixed_state::<f64, _>(self.n, &mut rng);
            let back = from_point(&to_point(&rho, self.basis)?, self.basis)?;
            worst = worst.max(back.matrix().sub(rho.matrix())?.max_abs());
            let y = random_interior_point(self.basis, 0.9, &mut rng);
            let again = to_point(&from_point(&y, self.basis)?, self.basis)?;
            worst = worst.max(max_diff(y.coords(), again.coords()));
        }
        measured(100, worst)
    }

    fn distribution_linearity(&self) -> Result<Outcome> {
        let mut rng = self.rng("distribution");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let r1 = random_mixed_state::<f64, _>(self.n, &mut rng);
            let r2 = random_pure_state::<f64, _>(self.n, &mut rng);
            let w: f64 = rng.random();
            let family = random_orthonormal_basis(self.n, &mut rng)?;
            let weights = ProbabilityDistribution::new(vec![w, 1.0 - w])?;
            let mixed = convex_combine(&[r1.clone(), r2.clone()], &weights)?;
            let p = probability_distribution(&mixed, &family)?;
            let p1 = probability_distribution(&r1, &family)?;
            let p2 = probability_distribution(&r2, &family)?;
            let combined: Vec<f64> = p1
                .weights()
                .iter()
                .zip(p2.weights())
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect();
            worst = worst.max(max_diff(p.weights(), &combined));
        }
        measured(100, worst)
    }

    /// Purity is one on pure states and strictly below one on full-rank ones.
    fn pure_state_purity(&self) -> Result<Outcome> {
        let mut rng = self.rng("purity");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let y = to_point(&random_pure_state(self.n, &mut rng), self.basis)?;
            worst = worst.max((y.purity() - 1.0).abs());
            if self.n == 2 {
                let r2: f64 = y.coords()[1..].iter().map(|x| x * x).sum();
                worst = worst.max((r2 - 0.25).abs());
            }
            let (_, mixed) = self.state(&mut rng)?;
            if !(mixed.purity() < 1.0) {
                worst = f64::INFINITY;
            }
        }
        measured(100, worst)
    }

    /// `T(de_{s_mu}, de_{s_nu}) = e_{B(s_mu, s_nu)}` with the right side
    /// computed as a matrix trace.
    fn defining_property(&self, lie: bool) -> Result<Outcome> {
        let mut rng = self.rng(if lie { "lambda_defining" } else { "g_defining" });
        let m = self.basis.size();
        let tensor = if lie {
            lambda_field(self.basis)
        } else {
            g_field(self.basis)
        };
        let grads = (0..m)
            .map(|mu| expectation_field(self.basis.element(mu), self.basis))
            .collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (rho, y) = self.state(&mut rng)?;
            for mu in 0..m {
                for nu in 0..m {
                    let (a, b) = (self.basis.element(mu), self.basis.element(nu));
                    let op = if lie { raw_commutator(a, b) } else { raw_jordan(a, b) };
                    let lhs = tensor.contract(y.coords(), grads[mu].coeffs(), grads[nu].coeffs());
                    worst = worst.max((lhs - tr_rho(&rho, &op).re).abs());
                }
            }
        }
        measured(100, worst)
    }

    fn random_linear(&self, rng: &mut ChaCha8Rng) -> LinearField<f64> {
        LinearField::new(random_coefficients(self.basis.size(), rng), rng.random_range(-1.0..1.0))
    }

    fn poisson_jacobi(&self) -> Result<Outcome> {
        let mut rng = self.rng("poisson_jacobi");
        let lambda = lambda_field(self.basis);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (f, g, h) = (
                self.random_linear(&mut rng),
                self.random_linear(&mut rng),
                self.random_linear(&mut rng),
            );
            let (_, y) = self.state(&mut rng)?;
            let fg = linear_bracket(&lambda, &f, &g)?;
            let gh = linear_bracket(&lambda, &g, &h)?;
            let hf = linear_bracket(&lambda, &h, &f)?;
            let sum = bracket(&lambda, &fg, &h, &y)? + bracket(&lambda, &gh, &f, &y)? + bracket(&lambda, &hf, &g, &y)?;
            worst = worst.max(sum.abs());
        }
        measured(100, worst)
    }

    /// `{F, (K, L)} = ({F, K}, L) + (K, {F, L})` with `( , )` the Jordan bracket.
    fn tensor_leibniz(&self) -> Result<Outcome> {
        let mut rng = self.rng("tensor_leibniz");
        let (lambda, g) = (lambda_field(self.basis), g_field(self.basis));
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (f, k, l) = (
                self.random_linear(&mut rng),
                self.random_linear(&mut rng),
                self.random_linear(&mut rng),
            );
            let (_, y) = self.state(&mut rng)?;
            let lhs = bracket(&lambda, &f, &linear_bracket(&g, &k, &l)?, &y)?;
            let rhs = bracket(&g, &linear_bracket(&lambda, &f, &k)?, &l, &y)?
                + bracket(&g, &k, &linear_bracket(&lambda, &f, &l)?, &y)?;
            worst = worst.max((lhs - rhs).abs());
        }
        measured(100, worst)
    }

    fn star_product(&self) -> Result<Outcome> {
        let mut rng = self.rng("star_product");
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let (a, b) = (self.herm(&mut rng), self.herm(&mut rng));
            let (rho, y) = self.state(&mut rng)?;
            let star = star_product(&a, &b, &y, self.basis)?;
            let oracle = tr_rho(&rho, &(a.as_matrix() * b.as_matrix()));
            worst = worst.max((star - oracle).norm());
        }
        measured(200, worst)
    }

    fn star_associativity(&self) -> Result<Outcome> {
        let mut rng = self.rng("star_associativity");
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let (a, b, c) = (self.herm(&mut rng), self.herm(&mut rng), self.herm(&mut rng));
            let (rho, y) = self.state(&mut rng)?;
            let (a, b, c) = (a.as_matrix(), b.as_matrix(), c.as_matrix());
            let left = star_product_operators(&(a * b), c, &y, self.basis)?;
            let right = star_product_operators(a, &(b * c), &y, self.basis)?;
            let oracle = tr_rho(&rho, &(&(a * b) * c));
            worst = worst.max((left - right).norm()).max((left - oracle).norm());
        }
        measured(200, worst)
    }

    fn closed_forms_n2(&self) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let mut rng = self.rng("closed_forms");
        let (lambda, g) = (lambda_field(self.basis), g_field(self.basis));
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let p = random_interior_point(self.basis, 0.9, &mut rng);
            let y = p.coords();
            let g_expected = SquareMatrix::from_fn(4, |a, b| match (a, b) {
                (0, 0) => y[0],
                (0, k) | (k, 0) => y[k],
                (k, l) => y[0] * delta(k, l),
            });
            let l_expected = SquareMatrix::from_fn(4, |k, l| (1..4).map(|j| levi_civita(j, k, l) * y[j]).sum::<f64>());
            worst = worst
                .max(g.components(y).max_abs_diff(&g_expected))
                .max(lambda.components(y).max_abs_diff(&l_expected));
        }
        measured(100, worst)
    }

    fn angular_momentum(&self) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let mut rng = self.rng("angular_momentum");
        let lambda = lambda_field(self.basis);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let p = random_interior_point(self.basis, 0.9, &mut rng);
            for k in 1..4 {
                for l in 1..4 {
                    let b = bracket(
                        &lambda,
                        &LinearField::coordinate(4, k),
                        &LinearField::coordinate(4, l),
                        &p,
                    )?;
                    let expected: f64 = (1..4).map(|m| levi_civita(k, l, m) * p.coords()[m]).sum();
                    worst = worst.max((b - expected).abs());
                }
            }
        }
        measured(100, worst)
    }

    fn variance(&self) -> Result<Outcome> {
        let mut rng = self.rng("variance");
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let a = self.herm(&mut rng);
            let (rho, y) = self.state(&mut rng)?;
            let v = variance(&a, &y, self.basis)?;
            let mean = tr_rho(&rho, a.as_matrix()).re;
            let oracle = tr_rho(&rho, &(a.as_matrix() * a.as_matrix())).re - mean * mean;
            worst = worst.max((v - oracle).abs()).max((-v).max(0.0));
        }
        measured(100, worst)
    }

    fn sigma3_trajectory(&self, dt: f64) -> Result<Trajectory<f64>> {
        let y0 = StatePoint::new(2, vec![0.5, 0.5, 0.0, 0.0])?;
        integrate(self.basis.element(3), &y0, 10.0, dt, self.basis)
    }

    fn precession(&self) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let traj = self.sigma3_trajectory(1e-3)?;
        measured(traj.len(), precession_error(&traj))
    }

    /// Reciprocal of the error reduction when `dt` is halved; fourth order
    /// gives about `1/16`.
    fn convergence_order(&self) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let coarse = precession_error(&self.sigma3_trajectory(1e-3)?);
        let fine = precession_error(&self.sigma3_trajectory(5e-4)?);
        measured(2, fine / coarse)
    }

    fn exponential_agreement(&self) -> Result<Outcome> {
        let mut rng = self.rng("exponential");
        let mut worst = 0.0f64;
        let mut cases: Vec<(HermitianMatrix<f64>, HermitianMatrix<f64>)> = Vec::new();
        if self.n == 2 {
            let y0 = StatePoint::new(2, vec![0.5, 0.5, 0.0, 0.0])?;
            cases.push((
                self.basis.element(3).clone(),
                from_point(&y0, self.basis)?.into_matrix(),
            ));
        }
        for _ in 0..5 {
            let h = self.herm(&mut rng);
            let (rho, _) = self.state(&mut rng)?;
            cases.push((h, rho));
        }
        for (h, rho) in &cases {
            let rho = crate::state::DensityMatrix::new(rho.clone())?;
            let traj = integrate(h, &to_point(&rho, self.basis)?, 10.0, 1e-3, self.basis)?;
            for (i, (t, p)) in traj.times().iter().zip(traj.points()).enumerate() {
                if i % 500 != 0 && i + 1 != traj.len() {
                    continue;
                }
                let exact = to_point(&exact_evolution(h, &rho, *t)?, self.basis)?;
                worst = worst.max(max_diff(p.coords(), exact.coords()));
            }
        }
        measured(cases.len(), worst)
    }

    fn conservation(&self, pick: impl Fn(&Drift) -> f64) -> Result<Outcome> {
        let drifts = self.drift.get_or_init(|| self.drifts()).clone()?;
        measured(drifts.len(), drifts.iter().map(pick).fold(0.0, f64::max))
    }

    /// Three random flows over `t = 10` with `dt = 1e-3`.
    fn drifts(&self) -> Result<Vec<Drift>> {
        let mut rng = self.rng("conservation");
        let powers = |rho: &HermitianMatrix<f64>| {
            let mut acc = rho.as_matrix().clone();
            let mut out = Vec::new();
            for _ in 2..=self.n {
                acc = &acc * rho.as_matrix();
                out.push(acc.trace().re);
            }
            out
        };
        (0..3)
            .map(|_| {
                let h = self.herm(&mut rng);
                let (rho0, y0) = self.state(&mut rng)?;
                let traj = integrate(&h, &y0, 10.0, 1e-3, self.basis)?;
                let report = traj.conservation(&h, self.basis)?;
                let start = powers(&rho0);
                let mut casimir = 0.0f64;
                for p in traj.points().iter().step_by(100).chain(std::iter::once(traj.last())) {
                    casimir = casimir.max(max_diff(&powers(&self.basis.reconstruct(p.coords())?), &start));
                }
                Ok(Drift {
                    energy: report.energy_drift,
                    purity: report.purity_drift,
                    trace_coordinate: report.trace_coordinate_drift,
                    casimir,
                })
            })
            .collect()
    }

    fn flow_linearity(&self) -> Result<Outcome> {
        let mut rng = self.rng("flow_linearity");
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let h = self.herm(&mut rng);
            let (_, ya) = self.state(&mut rng)?;
            let (_, yb) = self.state(&mut rng)?;
            let w: f64 = rng.random();
            let mix: Vec<f64> = ya
                .coords()
                .iter()
                .zip(yb.coords())
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect();
            let ym = StatePoint::new(self.n, mix)?;
            let run = |y: &StatePoint<f64>| integrate(&h, y, 1.0, 1e-3, self.basis);
            let (ta, tb, tm) = (run(&ya)?, run(&yb)?, run(&ym)?);
            let combined: Vec<f64> = ta
                .last()
                .coords()
                .iter()
                .zip(tb.last().coords())
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect();
            worst = worst.max(max_diff(tm.last().coords(), &combined));
        }
        measured(5, worst)
    }

    fn linear_sector(&self) -> Result<Outcome> {
        let mut rng = self.rng("linear_sector");
        let mut worst = 0.0f64;
        for i in 0..20 {
            let f = self.random_linear(&mut rng);
            let (_, report) = is_observable(&f, self.basis, 20, DEFAULT_TOLERANCE, self.seed.wrapping_add(i))?;
            worst = worst.max(report.max_residual);
        }
        measured(20, worst)
    }

    /// Worst fraction of sample points at which a quadratic monomial
    /// `Y_j Y_k` (`j, k >= 1`) has residual `<= threshold`.
    fn quadratic_probe(&self, threshold: f64) -> Result<Outcome> {
        let m = self.basis.size();
        let mut worst = 0.0f64;
        let mut count = 0;
        for j in 1..m {
            for k in j..m {
                let f = PolynomialField::monomial(m, &[(j, 1), (k, 1)]);
                let (_, report) = is_observable(&f, self.basis, 20, DEFAULT_TOLERANCE, self.seed)?;
                let small = report.residuals.iter().filter(|r| **r <= threshold).count();
                worst = worst.max(small as f64 / 20.0);
                count += 1;
            }
        }
        measured(count, worst)
    }

    fn constant_shift(&self) -> Result<Outcome> {
        let mut rng = self.rng("constant_shift");
        let m = self.basis.size();
        let f = PolynomialField::monomial(m, &[(1, 2)]);
        let mut spec = f.spec();
        spec.terms.push(crate::fields::PolynomialTerm {
            coeff: rng.random_range(-5.0..5.0),
            exponents: vec![0; m],
        });
        let shifted = PolynomialField::from_spec(&spec)?;
        let (_, a) = is_observable(&f, self.basis, 20, DEFAULT_TOLERANCE, self.seed)?;
        let (_, b) = is_observable(&shifted, self.basis, 20, DEFAULT_TOLERANCE, self.seed)?;
        let worst = a
            .components
            .iter()
            .zip(&b.components)
            .map(|(x, y)| x.max_abs_diff(y))
            .fold(0.0, f64::max);
        measured(20, worst)
    }

    /// 50 interior points with `r > 0.05` and `sin(theta) > 0.05`.
    fn regular_points(&self) -> Vec<StatePoint<f64>> {
        let mut rng = self.rng("chart_points");
        let chart = spherical_chart();
        let mut out = Vec::with_capacity(50);
        while out.len() < 50 {
            let p = random_interior_point(self.basis, 0.9, &mut rng);
            if let Ok(u) = chart.forward(p.coords()) {
                if u[1] > 0.05 && u[2].sin() > 0.05 {
                    out.push(p);
                }
            }
        }
        out
    }

    fn spherical(&self, which: SphericalCheck) -> Result<Outcome> {
        if self.n != 2 {
            return Ok(ONLY_N2);
        }
        let chart = spherical_chart();
        let (lambda, g) = (lambda_field(self.basis), g_field(self.basis));
        let points = self.regular_points();
        let mut worst = 0.0f64;
        let mut orientation: Option<f64> = None;
        let mut rng = self.rng("chart_fields");
        for p in &points {
            let u = chart.forward(p.coords())?;
            let (y0, r, theta) = (u[0], u[1], u[2]);
            let residual = match which {
                SphericalCheck::GClosedForm => {
                    let st2 = theta.sin().powi(2);
                    let expected = SquareMatrix::from_fn(4, |a, b| match (a, b) {
                        (0, 0) | (1, 1) => y0,
                        (0, 1) | (1, 0) => r,
                        (2, 2) => y0 / (r * r),
                        (3, 3) => y0 / (r * r * st2),
                        _ => 0.0,
                    });
                    pushforward(&g, &chart, p)?.components.max_abs_diff(&expected)
                }
                SphericalCheck::LambdaOrientation => {
                    let oracle = coordinate_bracket(&lambda, &chart, 2, 3, p)?;
                    let sign = *orientation.get_or_insert(oracle.signum());
                    let pushed = pushforward(&lambda, &chart, p)?.components[(2, 3)];
                    let mismatch = if oracle.signum() == sign { 0.0 } else { f64::INFINITY };
                    (pushed - sign / (r * theta.sin())).abs().max(mismatch)
                }
                SphericalCheck::RadialCasimir => {
                    let t = pushforward(&lambda, &chart, p)?.components;
                    (0..4).map(|a| t[(1, a)].abs().max(t[(a, 1)].abs())).fold(0.0, f64::max)
                }
                SphericalCheck::Symmetry => {
                    let l = pushforward(&lambda, &chart, p)?.components;
                    let gg = pushforward(&g, &chart, p)?.components;
                    l.max_abs_diff(&transpose_neg(&l)).max(gg.max_abs_diff(&gg.transpose()))
                }
                SphericalCheck::Covariance => {
                    let f = self.random_linear(&mut rng);
                    let k = self.random_linear(&mut rng);
                    let q = PolynomialField::monomial(4, &[(1, 1), (3, 1)]);
                    let mut r = 0.0f64;
                    for tensor in [&lambda, &g] {
                        r = r
                            .max(verify_bracket_covariance(tensor, &chart, &f, &k, p)?)
                            .max(verify_bracket_covariance(tensor, &chart, &q, &k, p)?);
                    }
                    r
                }
                SphericalCheck::Jacobian => {
                    let exact = chart.jacobian(p.coords())?;
                    exact.max_abs_diff(&numeric_jacobian(&chart, p.coords(), 1e-7)?)
                }
                SphericalCheck::Roundtrip => max_diff(&chart.inverse(&u)?, p.coords()),
            };
            worst = worst.max(residual);
        }
        measured(points.len(), worst)
    }
}

#[derive(Debug, Clone, Copy)]
enum SphericalCheck {
    GClosedForm,
    LambdaOrientation,
    RadialCasimir,
    Symmetry,
    Covariance,
    Jacobian,
    Roundtrip,
}

fn transpose_neg(m: &SquareMatrix<f64>) -> SquareMatrix<f64> {
    SquareMatrix::from_fn(m.dim(), |i, j| -m[(j, i)])
}
