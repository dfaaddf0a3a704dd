// scratch: trace solver behavior on the failing instance
use chernoff_lab::linalg::{herm_basis, HermitianMatrix};
use chernoff_lab::sdp::{solve, SdpProblem};

fn main() {
    for seed in 0..10u64 {
        let b = random_psd(3, seed);
        let d = 3;
        let mut p = SdpProblem::new(vec![d, d]);
        p.set_objective(0, HermitianMatrix::identity(d));
        for e in herm_basis(d) {
            let rhs = e.inner(&b);
            p.add_constraint(vec![(0, e.clone()), (1, e.scale(-1.0))], rhs);
        }
        match solve(&p, 1e-8) {
            Ok(sol) => println!(
                "seed {seed}: status {:?} iters {} gap {:.2e} pres {:.2e} dres {:.2e} pobj {:.6} (want {:.6})",
                sol.status, sol.iterations, sol.gap, sol.primal_residual, sol.dual_residual,
                sol.primal_objective, b.trace()
            ),
            Err(e) => println!("seed {seed}: ERROR {e}"),
        }
    }
}

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use chernoff_lab::linalg::C64;

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_psd(d: usize, seed: u64) -> HermitianMatrix {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, d, |_, _| C64::new(standard_normal(&mut r), standard_normal(&mut r)));
    HermitianMatrix::symmetrize(&g * g.adjoint())
}
