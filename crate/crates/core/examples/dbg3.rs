// scratch: reproduce the inaccurate decomposition standalone
use chernoff_lab::linalg::C64;
use nalgebra::DMatrix;

fn main() {
    let h = DMatrix::from_row_slice(3, 3, &[
        C64::new(-1.53048275432040887e-1, 0.0), C64::new(5.64734582902464040e-3, 2.56753973919016804e-3), C64::new(-3.41981928893564120e-3, -2.76894022682530778e-3),
        C64::new(5.64734582902464040e-3, -2.56753973919016804e-3), C64::new(-1.45278583677646567e-1, 0.0), C64::new(2.35951410187448460e-3, 6.11227890714484585e-4),
        C64::new(-3.41981928893564120e-3, 2.76894022682530778e-3), C64::new(2.35951410187448460e-3, -6.11227890714484585e-4), C64::new(-1.43574892414366495e-1, 0.0),
    ]);
    for (name, eps, cap) in [
        ("eps=f64::EPSILON cap=1e5", f64::EPSILON, 100_000usize),
        ("eps=1e-13 cap=1e5", 1e-13, 100_000),
        ("eps=f64::EPSILON cap=0(unlimited)", f64::EPSILON, 0),
    ] {
        match h.clone().try_symmetric_eigen(eps, cap) {
            None => println!("{name}: DID NOT CONVERGE"),
            Some(se) => {
                let recon = &se.eigenvectors
                    * DMatrix::from_diagonal(&se.eigenvalues.map(|x| C64::new(x, 0.0)))
                    * se.eigenvectors.adjoint();
                let resid = (&h - recon).norm();
                let ortho = (se.eigenvectors.adjoint() * &se.eigenvectors - DMatrix::<C64>::identity(3,3)).norm();
                println!("{name}: resid {resid:.3e} ortho {ortho:.3e} vals {:?}", se.eigenvalues.as_slice());
            }
        }
    }
    // default entry point
    let se = h.clone().symmetric_eigen();
    let recon = &se.eigenvectors
        * DMatrix::from_diagonal(&se.eigenvalues.map(|x| C64::new(x, 0.0)))
        * se.eigenvectors.adjoint();
    println!("symmetric_eigen(): resid {:.3e} vals {:?}", (&h - recon).norm(), se.eigenvalues.as_slice());
}
