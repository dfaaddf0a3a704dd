//! Density matrices, pure states, priors, and the named reference states.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, HermitianMatrix, C64};

/// Trace and PSD tolerance for density-matrix validation.
pub const DENSITY_TOL: f64 = 1e-10;
/// Norm tolerance for pure-state validation.
pub const PURE_NORM_TOL: f64 = 1e-12;
/// Sum tolerance for prior validation.
pub const PRIOR_SUM_TOL: f64 = 1e-12;
/// Default bound on the total dimension of tensor powers.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    h: HermitianMatrix,
}

impl DensityMatrix {
    /// Validates PSD and unit trace within [`DENSITY_TOL`].
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        if (h.trace() - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix trace is {}, not 1",
                h.trace()
            )));
        }
        let min = h.min_eigenvalue()?;
        if min < -DENSITY_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix is not PSD (min eigenvalue {min:.3e})"
            )));
        }
        Ok(Self { h })
    }

    /// Projects a nearly valid state back onto the density-matrix set:
    /// clips negative eigenvalues to zero and renormalizes the trace.
    /// Intended for solver outputs carrying rounding-level violations.
    pub fn cleaned(h: &HermitianMatrix) -> Result<Self> {
        let clipped = eigh(h)?.spectral_map(|x| x.max(0.0));
        let tr = clipped.trace();
        if tr <= 0.0 {
            return Err(Error::InvalidInput("state has nonpositive trace".into()));
        }
        Ok(Self {
            h: clipped.scale(1.0 / tr),
        })
    }

    pub(crate) fn new_unchecked(h: HermitianMatrix) -> Self {
        Self { h }
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.h
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.h.matrix()
    }

    /// Purity `tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        self.h.inner(&self.h)
    }
}

/// Unit vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: DVector<C64>,
}

impl PureState {
    /// Validates unit norm within [`PURE_NORM_TOL`].
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if (n - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::InvalidInput(format!(
                "pure state norm is {n}, not 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        let n = amps.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput("cannot normalize zero vector".into()));
        }
        Ok(Self {
            amps: amps / C64::new(n, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `|<self|other>|`.
    pub fn overlap_modulus(&self, other: &PureState) -> f64 {
        (self.amps.adjoint() * &other.amps)[(0, 0)].norm()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
        }
    }
}

/// Strictly positive prior probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorVector {
    probs: Vec<f64>,
}

impl PriorVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidInput(
                "priors must be strictly positive".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PRIOR_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "priors sum to {sum}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(r: usize) -> Self {
        Self {
            probs: vec![1.0 / r as f64; r],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

/// Number of tensor copies, at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyCount(u32);

impl CopyCount {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("copy count must be at least 1".into()));
        }
        Ok(Self(n))
    }

    pub fn get(&self) -> u32 {
        self.0
    }
}

/// Rank-one projector `|psi><psi|`.
pub fn from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix::new_unchecked(HermitianMatrix::outer(psi.amplitudes()))
}

/// `rho^(tensor n)`, rejecting outputs whose dimension exceeds `cap`.
pub fn tensor_power(rho: &DensityMatrix, n: CopyCount, cap: usize) -> Result<DensityMatrix> {
    let out_dim = rho
        .dim()
        .checked_pow(n.get())
        .filter(|&d| d <= cap)
        .ok_or(Error::CapExceeded {
            dim: rho.dim().checked_pow(n.get()).unwrap_or(usize::MAX),
            cap,
        })?;
    let mut acc = rho.hermitian().clone();
    for _ in 1..n.get() {
        acc = kron(&acc, rho.hermitian());
    }
    debug_assert_eq!(acc.dim(), out_dim);
    Ok(DensityMatrix::new_unchecked(acc))
}

/// n-fold tensor power of a pure state.
pub fn pure_tensor_power(psi: &PureState, n: CopyCount) -> PureState {
    let mut acc = psi.clone();
    for _ in 1..n.get() {
        acc = acc.tensor(psi);
    }
    acc
}

/// The magic T-state `(|0> + e^{i pi/4} |1>)/sqrt(2)`.
pub fn t_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phase = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    PureState::normalized(DVector::from_vec(vec![C64::new(s, 0.0), phase * s])).unwrap()
}

/// Maximally entangled state `(1/sqrt(m)) sum_i |ii>` on an m x m system.
pub fn max_entangled(m: usize) -> Result<PureState> {
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "maximally entangled state needs local dimension >= 2, got {m}"
        )));
    }
    let mut v = DVector::zeros(m * m);
    let a = 1.0 / (m as f64).sqrt();
    for i in 0..m {
        v[i * m + i] = C64::new(a, 0.0);
    }
    PureState::normalized(v)
}

/// Computational basis state `|i>` in dimension `d`.
pub fn basis_state(d: usize, i: usize) -> Result<PureState> {
    if i >= d {
        return Err(Error::InvalidInput(format!(
            "basis index {i} out of range for dimension {d}"
        )));
    }
    let mut v = DVector::zeros(d);
    v[i] = C64::new(1.0, 0.0);
    PureState::new(v)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random density matrix from the Ginibre ensemble: `G G^dagger / tr`,
/// full rank almost surely. Deterministic for a fixed seed.
pub fn random_density(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, d, |_, _| {
        C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
    });
    let p = HermitianMatrix::symmetrize(&g * g.adjoint());
    let tr = p.trace();
    DensityMatrix::new(p.scale(1.0 / tr))
}

/// Random pure state with Haar-like direction. Deterministic for a fixed seed.
pub fn random_pure(d: usize, seed: u64) -> Result<PureState> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(d, |_, _| {
        C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
    });
    PureState::normalized(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pure_basis_and_plus() {
        let zero = from_pure(&basis_state(2, 0).unwrap());
        assert!((zero.hermitian() - &HermitianMatrix::from_real_diag(&[1.0, 0.0])).frob_norm() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])).unwrap();
        let rho = from_pure(&plus);
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.matrix()[(i, j)] - C64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn from_pure_random_is_idempotent_projector() {
        let psi = random_pure(5, 99).unwrap();
        let rho = from_pure(&psi);
        assert!((rho.hermitian().trace() - 1.0).abs() < 1e-12);
        let sq = HermitianMatrix::symmetrize(rho.matrix() * rho.matrix());
        assert!((&sq - rho.hermitian()).frob_norm() < 1e-12);
    }

    #[test]
    fn tensor_power_basics() {
        let rho = random_density(2, 4).unwrap();
        let one = tensor_power(&rho, CopyCount::new(1).unwrap(), DEFAULT_DIM_CAP).unwrap();
        assert!((one.hermitian() - rho.hermitian()).frob_norm() < 1e-15);

        let p = 0.3;
        let diag = DensityMatrix::new(HermitianMatrix::from_real_diag(&[p, 1.0 - p])).unwrap();
        let two = tensor_power(&diag, CopyCount::new(2).unwrap(), DEFAULT_DIM_CAP).unwrap();
        let expect = [p * p, p * (1.0 - p), (1.0 - p) * p, (1.0 - p) * (1.0 - p)];
        for (i, &e) in expect.iter().enumerate() {
            assert!((two.matrix()[(i, i)].re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_power_purity_multiplicative() {
        let rho = random_density(3, 17).unwrap();
        let n = 3;
        let powered = tensor_power(&rho, CopyCount::new(n).unwrap(), DEFAULT_DIM_CAP).unwrap();
        assert_eq!(powered.dim(), rho.dim().pow(n));
        let lhs = powered.purity();
        let rhs = rho.purity().powi(n as i32);
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn tensor_power_cap() {
        let rho = random_density(4, 1).unwrap();
        assert!(matches!(
            tensor_power(&rho, CopyCount::new(7).unwrap(), DEFAULT_DIM_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn t_state_amplitudes() {
        let t = t_state();
        assert!((t.amplitudes().norm() - 1.0).abs() < 1e-15);
        let a0 = t.amplitudes()[0].norm_sqr();
        assert!((a0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn max_entangled_two() {
        let phi = max_entangled(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [s, 0.0, 0.0, s];
        for (i, &e) in expect.iter().enumerate() {
            assert!((phi.amplitudes()[i] - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!(max_entangled(1).is_err());
    }

    #[test]
    fn random_density_valid_and_full_rank() {
        let rho = random_density(3, 123).unwrap();
        let min = rho.hermitian().min_eigenvalue().unwrap();
        assert!(min > 1e-6, "Ginibre state should be full rank, min {min}");
        // determinism
        let again = random_density(3, 123).unwrap();
        assert!((rho.hermitian() - again.hermitian()).frob_norm() == 0.0);
    }

    #[test]
    fn density_validation_rejects() {
        assert!(DensityMatrix::new(HermitianMatrix::from_real_diag(&[0.7, 0.7])).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::from_real_diag(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn priors_validation() {
        assert!(PriorVector::new(vec![0.5, 0.5]).is_ok());
        assert!(PriorVector::new(vec![0.6, 0.6]).is_err());
        assert!(PriorVector::new(vec![1.0, 0.0]).is_err());
        let u = PriorVector::uniform(4);
        assert!((u.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn copy_count_validation() {
        assert!(CopyCount::new(0).is_err());
        assert_eq!(CopyCount::new(3).unwrap().get(), 3);
    }
}
