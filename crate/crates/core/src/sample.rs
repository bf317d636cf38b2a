//! Seeded random operators and states for verification sweeps.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::algebra::AlgebraBasis;
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::scalar::Real;
use crate::state::{DensityMatrix, HilbertVector, StatePoint};

/// Deterministic generator for one named stream of a seeded run.
///
/// Every stream of the same seed is independent, so checks can be added or
/// reordered without perturbing each other's draws.
pub fn stream_rng(seed: u64, stream: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(stream));
    rng
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// GUE-normalized Hermitian matrix: normal entries scaled by `1/sqrt(N)`
/// so the spectrum stays O(1) as `N` grows.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix<T> {
    let s = 1.0 / (n as f64).sqrt();
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex::new(T::lit(s * normal(rng)), T::zero());
        for j in (i + 1)..n {
            let z = Complex::new(T::lit(s * normal(rng)), T::lit(s * normal(rng)));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianMatrix::new(m).expect("Hermitian by construction")
}

pub fn random_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HilbertVector<T> {
    let comps = (0..n)
        .map(|_| Complex::new(T::lit(normal(rng)), T::lit(normal(rng))))
        .collect();
    HilbertVector::new(comps).expect("finite components")
}

pub fn random_pure_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix<T> {
    loop {
        if let Ok(rho) = DensityMatrix::pure(&random_vector(n, rng)) {
            return rho;
        }
    }
}

/// Mixed state `G G^dagger / Tr(G G^dagger)` with Gaussian `G` (full rank
/// almost surely).
pub fn random_mixed_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = ComplexMatrix::from_fn(n, |_, _| Complex::new(T::lit(normal(rng)), T::lit(normal(rng))));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let rho = HermitianMatrix::new(w.scale_real(T::one() / tr)).expect("Hermitian");
    DensityMatrix::new(rho).expect("positive by construction")
}

/// Radius of the largest ball centred on the maximally mixed state that lies
/// inside the state body, measured as `sqrt(2 sum_{mu>=1} Y_mu^2)`.
///
/// Equals `1/sqrt(N(N-1))`; for `N = 2` it coincides with the pure radius.
pub fn inscribed_radius<T: Real>(n: usize) -> T {
    let n = T::from_usize_lossy(n);
    T::one() / (n * (n - T::one())).sqrt()
}

/// Uniform sample from the ball `2 sum_{mu>=1} Y_mu^2 <= (fraction * r_in)^2`
/// with the trace coordinate fixed, i.e. a strictly interior state.
pub fn random_interior_point<T: Real, R: Rng + ?Sized>(
    basis: &AlgebraBasis<T>,
    fraction: f64,
    rng: &mut R,
) -> StatePoint<T> {
    let m = basis.size();
    let dir: Vec<f64> = (1..m).map(|_| normal(rng)).collect();
    let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let radius = fraction * inscribed_radius::<T>(basis.dim()).to_f64_lossy() * u.powf(1.0 / (m - 1) as f64);
    // 2 |Y|^2 = radius^2
    let scale = radius / (2.0f64.sqrt() * len);
    let mut y = Vec::with_capacity(m);
    y.push(basis.trace_coordinate());
    y.extend(dir.iter().map(|x| T::lit(x * scale)));
    StatePoint::new(basis.dim(), y).expect("length matches")
}

/// Random real coefficient vector of length `m` with standard normal entries.
pub fn random_coefficients<T: Real, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<T> {
    (0..m).map(|_| T::lit(normal(rng))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream_rng(42, "x").random();
        let b: f64 = stream_rng(42, "x").random();
        let c: f64 = stream_rng(42, "y").random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn interior_points_are_states() {
        for n in 2..=4 {
            let basis = build_basis::<f64>(n).unwrap();
            let mut rng = stream_rng(1, "interior");
            for _ in 0..50 {
                let y = random_interior_point(&basis, 0.9, &mut rng);
                let rho = y.to_density(&basis).unwrap();
                assert!(rho.matrix().min_eigenvalue() > 0.0);
            }
        }
    }

    #[test]
    fn mixed_states_are_valid() {
        let mut rng = stream_rng(3, "mixed");
        for n in 2..=4 {
            let rho = random_mixed_state::<f64, _>(n, &mut rng);
            assert!((rho.matrix().trace() - 1.0).abs() < 1e-12);
        }
    }
}
