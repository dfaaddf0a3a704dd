// scratch: nalgebra symmetric_eigen residual vs spread/scale
use chernoff_lab::linalg::{HermitianMatrix, C64};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_unitary(d: usize, seed: u64) -> DMatrix<C64> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(d, d, |_, _| C64::new(standard_normal(&mut r), standard_normal(&mut r))).qr().q()
}

fn main() {
    for (name, spec) in [
        ("well", vec![1.0, 2.0, 3.0]),
        ("spread8", vec![1e-8, 1.0, 20.0]),
        ("spread12", vec![1e-12, 1.0, 20.0]),
        ("large", vec![1e-6, 1e4, 2e4]),
        ("cluster", vec![1.0, 1.0+1e-12, 20.0]),
        ("neg", vec![-20.0, 1e-9, 20.0]),
    ] {
        let mut worst = 0.0f64;
        for seed in 0..50u64 {
            let d = spec.len();
            let u = random_unitary(d, seed);
            let diag = DMatrix::from_diagonal(&DVector::from_iterator(d, spec.iter().map(|&x| C64::new(x, 0.0))));
            let h = HermitianMatrix::symmetrize(&u * diag * u.adjoint());
            let se = h.matrix().clone().try_symmetric_eigen(f64::EPSILON, 100_000);
            match se {
                None => { println!("{name} seed {seed}: NOT CONVERGED"); continue; }
                Some(se) => {
                    let recon = &se.eigenvectors
                        * DMatrix::from_diagonal(&se.eigenvalues.map(|x| C64::new(x, 0.0)))
                        * se.eigenvectors.adjoint();
                    let resid = (h.matrix() - recon).norm() / h.matrix().norm().max(1.0);
                    worst = worst.max(resid);
                }
            }
        }
        println!("{name}: worst relative residual {worst:.3e}");
    }
}
