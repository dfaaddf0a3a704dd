//! Seeded random matrix generators shared by unit tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{HermitianMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; good enough for test fixtures
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex_matrix(d: usize, seed: u64) -> DMatrix<C64> {
    let mut r = rng(seed);
    DMatrix::from_fn(d, d, |_, _| C64::new(standard_normal(&mut r), standard_normal(&mut r)))
}

pub fn random_hermitian(d: usize, seed: u64) -> HermitianMatrix {
    HermitianMatrix::symmetrize(random_complex_matrix(d, seed))
}

pub fn random_psd(d: usize, seed: u64) -> HermitianMatrix {
    let g = random_complex_matrix(d, seed);
    HermitianMatrix::symmetrize(&g * g.adjoint())
}

pub fn random_density_matrix(d: usize, seed: u64) -> HermitianMatrix {
    let p = random_psd(d, seed);
    p.scale(1.0 / p.trace())
}

pub fn random_unit_vector(d: usize, seed: u64) -> DVector<C64> {
    let mut r = rng(seed);
    let v = DVector::from_fn(d, |_, _| C64::new(standard_normal(&mut r), standard_normal(&mut r)));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_unitary(d: usize, seed: u64) -> DMatrix<C64> {
    random_complex_matrix(d, seed).qr().q()
}
