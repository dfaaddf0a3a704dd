//! Tests, POVMs, error probabilities, and optimal measurements for binary
//! and multi-hypothesis discrimination.
//!
//! The Holevo-Helstrom test `{pi_1 rho_1 - pi_2 rho_2 >= 0}` is optimal for
//! fixed states; for hypothesis sets, the universal test is the Helstrom
//! test of the pair minimizing the weighted trace distance over the sets,
//! optimal whenever that difference is full rank.

use crate::error::{Error, Result};
use crate::linalg::{eigh, matrix_power, pos_projector, trace_norm, HermitianMatrix};
use crate::sdp::{self, min_trace_dist_over_sets, pe_min_sets};
use crate::sets::StateSet;
use crate::states::{DensityMatrix, PriorVector};

/// PSD slack tolerated on test operators and POVM elements.
pub const POVM_PSD_TOL: f64 = 1e-9;
/// Completeness tolerance for POVMs.
pub const POVM_SUM_TOL: f64 = 1e-7;
/// Default full-rank margin below which a universal test is flagged.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;
/// Slack granted to the Audenaert inequality check.
pub const AUDENAERT_TOL: f64 = 1e-10;

/// Two-outcome test operator `M` with `0 <= M <= I`.
#[derive(Debug, Clone)]
pub struct TestOperator {
    m: HermitianMatrix,
}

impl TestOperator {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let sys = eigh(&m)?;
        let min = sys.values[0];
        let max = *sys.values.last().unwrap();
        if min < -POVM_PSD_TOL || max > 1.0 + POVM_PSD_TOL {
            return Err(Error::InvalidInput(format!(
                "test operator eigenvalues [{min:.3e}, {max:.3e}] outside [0, 1]"
            )));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// The POVM `{M, I - M}`.
    pub fn povm(&self) -> Povm {
        let complement = &HermitianMatrix::identity(self.dim()) - &self.m;
        Povm {
            elements: vec![self.m.clone(), complement],
        }
    }
}

/// A positive operator-valued measure: PSD elements summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidInput("POVM needs at least one element".into()))?;
        let d = first.dim();
        let mut sum = HermitianMatrix::zeros(d);
        for e in &elements {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: e.dim(),
                });
            }
            let min = e.min_eigenvalue()?;
            if min < -POVM_PSD_TOL {
                return Err(Error::InvalidInput(format!(
                    "POVM element has eigenvalue {min:.3e}"
                )));
            }
            sum = &sum + e;
        }
        let defect = (&sum - &HermitianMatrix::identity(d)).frob_norm();
        if defect > POVM_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "POVM elements sum to identity within {defect:.3e} only"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Error probability report, optionally carrying the worst-case states and
/// the spectral margin of the test threshold.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub value: f64,
    pub worst_states: Option<Vec<DensityMatrix>>,
    /// `min |eigenvalue|` of `pi_1 rho_1* - pi_2 rho_2*` for universal tests.
    pub full_rank_margin: Option<f64>,
}

/// Average error probability `1 - sum_i pi_i tr[rho_i M_i]`.
pub fn error_prob_povm(
    povm: &Povm,
    states: &[DensityMatrix],
    priors: &PriorVector,
) -> Result<f64> {
    if states.len() != povm.len() || priors.len() != states.len() {
        return Err(Error::InvalidInput(format!(
            "{} states, {} POVM elements, {} priors",
            states.len(),
            povm.len(),
            priors.len()
        )));
    }
    let mut correct = 0.0;
    for (i, s) in states.iter().enumerate() {
        if s.dim() != povm.dim() {
            return Err(Error::DimensionMismatch {
                expected: povm.dim(),
                got: s.dim(),
            });
        }
        correct += priors.get(i) * povm.elements[i].inner(s.hermitian());
    }
    Ok(1.0 - correct)
}

/// Worst-case error of a POVM over hypothesis sets:
/// `sup_(rho_i in C_i) sum_i pi_i tr[rho_i (I - M_i)]`. The supremum
/// decomposes per set, each solved by the set's linear oracle.
pub fn worst_case_error(
    povm: &Povm,
    sets: &[StateSet],
    priors: &PriorVector,
) -> Result<ErrorReport> {
    if sets.len() != povm.len() || priors.len() != sets.len() {
        return Err(Error::InvalidInput(format!(
            "{} sets, {} POVM elements, {} priors",
            sets.len(),
            povm.len(),
            priors.len()
        )));
    }
    let d = povm.dim();
    let mut value = 0.0;
    let mut worst = Vec::with_capacity(sets.len());
    for (i, set) in sets.iter().enumerate() {
        let reject = &HermitianMatrix::identity(d) - &povm.elements[i];
        let (state, v) = set.linear_oracle(&reject.scale(priors.get(i)))?;
        value += v;
        worst.push(state);
    }
    Ok(ErrorReport {
        value,
        worst_states: Some(worst),
        full_rank_margin: None,
    })
}

/// Holevo-Helstrom test `{pi_1 rho_1 - pi_2 rho_2 >= 0}` for two states.
pub fn helstrom_test(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    priors: &PriorVector,
) -> Result<TestOperator> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    if priors.len() != 2 {
        return Err(Error::InvalidInput(
            "Helstrom test takes two priors".into(),
        ));
    }
    let delta = &rho1.hermitian().scale(priors.get(0)) - &rho2.hermitian().scale(priors.get(1));
    TestOperator::new(pos_projector(&delta)?)
}

/// Universal test for a pair of hypothesis sets.
#[derive(Debug)]
pub struct UniversalTest {
    pub test: TestOperator,
    pub report: ErrorReport,
    /// Set when the spectral margin of `pi_1 rho_1* - pi_2 rho_2*` is at
    /// most the rank tolerance. The optimality guarantee requires a full
    /// rank difference; the test is still returned, uncertified.
    pub rank_deficient: bool,
}

/// Constructs the universal optimal test for `set1` versus `set2`: the
/// Helstrom projector of the trace-distance minimizing pair.
pub fn universal_test(
    set1: &StateSet,
    set2: &StateSet,
    priors: &PriorVector,
    rank_tol: f64,
    gap_tol: f64,
) -> Result<UniversalTest> {
    let closest = min_trace_dist_over_sets(set1, set2, priors, gap_tol)?;
    let delta = &closest.rho1.hermitian().scale(priors.get(0))
        - &closest.rho2.hermitian().scale(priors.get(1));
    let margin = eigh(&delta)?
        .values
        .iter()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    let test = TestOperator::new(pos_projector(&delta)?)?;
    let mut report = worst_case_error(&test.povm(), &[set1.clone(), set2.clone()], priors)?;
    report.full_rank_margin = Some(margin);
    Ok(UniversalTest {
        test,
        report,
        rank_deficient: margin <= rank_tol,
    })
}

/// Checks both saddle inequalities of a candidate test against the
/// worst-case optimum: its worst-case error must not exceed the minimax
/// value, and its plug-in error at the worst-case states must not fall
/// below it.
pub fn verify_saddle(
    test: &TestOperator,
    set1: &StateSet,
    set2: &StateSet,
    priors: &PriorVector,
    tol: f64,
) -> Result<bool> {
    let povm = test.povm();
    let sets = [set1.clone(), set2.clone()];
    let wce = worst_case_error(&povm, &sets, priors)?;
    let opt = pe_min_sets(&sets, priors, sdp::DEFAULT_GAP_TOL)?;
    let plug = error_prob_povm(&povm, &opt.worst_states, priors)?;
    Ok(wce.value <= opt.value + tol && plug >= opt.value - tol)
}

/// Evaluates both sides of the trace inequality
/// `tr[V^alpha W^(1-alpha)] >= (1/2) tr[V + W - |V - W|]` for PSD `V`, `W`.
pub fn audenaert_check(
    v: &HermitianMatrix,
    w: &HermitianMatrix,
    alpha: f64,
) -> Result<(f64, f64, bool)> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: w.dim(),
        });
    }
    let lhs = matrix_power(v, alpha)?.inner(&matrix_power(w, 1.0 - alpha)?);
    let rhs = 0.5 * (v.trace() + w.trace() - trace_norm(&(v - w))?);
    Ok((lhs, rhs, lhs >= rhs - AUDENAERT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::sdp::DEFAULT_GAP_TOL;
    use crate::states::{basis_state, from_pure, random_density, PureState};
    use crate::test_rng::{random_hermitian, random_psd};
    use nalgebra::DVector;

    fn plus_state() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])).unwrap()
    }

    fn uniform2() -> PriorVector {
        PriorVector::uniform(2)
    }

    fn trivial_povm(d: usize) -> Povm {
        Povm::new(vec![HermitianMatrix::identity(d), HermitianMatrix::zeros(d)]).unwrap()
    }

    #[test]
    fn error_prob_examples() {
        let zero = from_pure(&basis_state(2, 0).unwrap());
        let one = from_pure(&basis_state(2, 1).unwrap());
        let perfect = Povm::new(vec![
            zero.hermitian().clone(),
            one.hermitian().clone(),
        ])
        .unwrap();
        let e = error_prob_povm(&perfect, &[zero.clone(), one.clone()], &uniform2()).unwrap();
        assert!(e.abs() < 1e-12);

        let e = error_prob_povm(&trivial_povm(2), &[zero.clone(), one], &uniform2()).unwrap();
        assert!((e - 0.5).abs() < 1e-12);

        let plus = from_pure(&plus_state());
        let test = helstrom_test(&plus, &zero, &uniform2()).unwrap();
        let e = error_prob_povm(&test.povm(), &[plus, zero], &uniform2()).unwrap();
        let expect = 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
        assert!((e - expect).abs() < 1e-10);
    }

    #[test]
    fn worst_case_error_basics() {
        let plus = from_pure(&plus_state());
        let zero = from_pure(&basis_state(2, 0).unwrap());
        // singleton sets reduce to the plug-in error
        let test = helstrom_test(&plus, &zero, &uniform2()).unwrap();
        let w = worst_case_error(
            &test.povm(),
            &[
                StateSet::singleton(plus.clone()),
                StateSet::singleton(zero.clone()),
            ],
            &uniform2(),
        )
        .unwrap();
        let direct = error_prob_povm(&test.povm(), &[plus.clone(), zero], &uniform2()).unwrap();
        assert!((w.value - direct).abs() < 1e-12);

        // the trivial POVM always accepts hypothesis 1
        let priors = PriorVector::new(vec![0.3, 0.7]).unwrap();
        let w = worst_case_error(
            &trivial_povm(2),
            &[
                StateSet::full_simplex(2).unwrap(),
                StateSet::incoherent(2).unwrap(),
            ],
            &priors,
        )
        .unwrap();
        assert!((w.value - 0.7).abs() < 1e-12);
    }

    #[test]
    fn helstrom_orthogonal_and_identical() {
        let zero = from_pure(&basis_state(2, 0).unwrap());
        let one = from_pure(&basis_state(2, 1).unwrap());
        let test = helstrom_test(&zero, &one, &uniform2()).unwrap();
        assert!((test.matrix() - zero.hermitian()).frob_norm() < 1e-12);
        let e = error_prob_povm(&test.povm(), &[zero.clone(), one], &uniform2()).unwrap();
        assert!(e.abs() < 1e-12);

        let rho = random_density(2, 5).unwrap();
        let priors = PriorVector::new(vec![0.4, 0.6]).unwrap();
        let test = helstrom_test(&rho, &rho, &priors).unwrap();
        let e = error_prob_povm(&test.povm(), &[rho.clone(), rho], &priors).unwrap();
        assert!((e - 0.4).abs() < 1e-10);
    }

    #[test]
    fn helstrom_matches_trace_norm_formula() {
        for seed in 0..20u64 {
            let r1 = random_density(2, 600 + seed).unwrap();
            let r2 = random_density(2, 700 + seed).unwrap();
            let pi1 = 0.25 + 0.5 * (seed as f64 / 19.0);
            let priors = PriorVector::new(vec![pi1, 1.0 - pi1]).unwrap();
            let test = helstrom_test(&r1, &r2, &priors).unwrap();
            let e = error_prob_povm(&test.povm(), &[r1.clone(), r2.clone()], &priors).unwrap();
            let delta = &r1.hermitian().scale(pi1) - &r2.hermitian().scale(1.0 - pi1);
            let formula = 0.5 * (1.0 - trace_norm(&delta).unwrap());
            assert!((e - formula).abs() < 1e-10, "seed {seed}: {e} vs {formula}");
        }
    }

    #[test]
    fn helstrom_invariant_under_positive_scaling() {
        let r1 = random_density(3, 80).unwrap();
        let r2 = random_density(3, 81).unwrap();
        let priors = uniform2();
        let delta = &r1.hermitian().scale(0.5) - &r2.hermitian().scale(0.5);
        let base = pos_projector(&delta).unwrap();
        for &c in &[0.1, 2.0, 37.0] {
            let scaled = pos_projector(&delta.scale(c)).unwrap();
            assert!((&scaled - &base).frob_norm() < 1e-10);
        }
    }

    #[test]
    fn universal_test_singletons_is_helstrom() {
        let r1 = random_density(2, 91).unwrap();
        let r2 = random_density(2, 92).unwrap();
        let priors = PriorVector::new(vec![0.55, 0.45]).unwrap();
        let ut = universal_test(
            &StateSet::singleton(r1.clone()),
            &StateSet::singleton(r2.clone()),
            &priors,
            DEFAULT_RANK_TOL,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        let hel = helstrom_test(&r1, &r2, &priors).unwrap();
        assert!((ut.test.matrix() - hel.matrix()).frob_norm() < 1e-5);
        assert!(!ut.rank_deficient);
    }

    #[test]
    fn universal_test_plus_vs_incoherent() {
        let ut = universal_test(
            &StateSet::singleton(from_pure(&plus_state())),
            &StateSet::incoherent(2).unwrap(),
            &uniform2(),
            DEFAULT_RANK_TOL,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        // closest pair is (|+><+|, I/2): delta has eigenvalues +-1/4 and the
        // test is the projector onto |+>
        let margin = ut.report.full_rank_margin.unwrap();
        assert!((margin - 0.25).abs() < 1e-4, "margin {margin}");
        assert!(!ut.rank_deficient);
        let plus = from_pure(&plus_state());
        assert!((ut.test.matrix() - plus.hermitian()).frob_norm() < 1e-4);
        assert!((ut.report.value - 0.25).abs() < 1e-5, "error {}", ut.report.value);
    }

    #[test]
    fn universal_test_degenerate_overlap() {
        let rho = random_density(2, 17).unwrap();
        let ut = universal_test(
            &StateSet::singleton(rho.clone()),
            &StateSet::singleton(rho),
            &uniform2(),
            DEFAULT_RANK_TOL,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!(ut.rank_deficient);
        assert!((ut.report.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn saddle_checks() {
        let set1 = StateSet::singleton(from_pure(&plus_state()));
        let set2 = StateSet::incoherent(2).unwrap();
        let ut = universal_test(&set1, &set2, &uniform2(), DEFAULT_RANK_TOL, DEFAULT_GAP_TOL)
            .unwrap();
        assert!(verify_saddle(&ut.test, &set1, &set2, &uniform2(), 1e-5).unwrap());

        // the trivial test is far from optimal on distinguishable sets
        let trivial = TestOperator::new(HermitianMatrix::identity(2)).unwrap();
        assert!(!verify_saddle(&trivial, &set1, &set2, &uniform2(), 1e-5).unwrap());

        // Helstrom on singletons is a saddle point
        let r1 = random_density(2, 130).unwrap();
        let r2 = random_density(2, 131).unwrap();
        let hel = helstrom_test(&r1, &r2, &uniform2()).unwrap();
        assert!(verify_saddle(
            &hel,
            &StateSet::singleton(r1),
            &StateSet::singleton(r2),
            &uniform2(),
            1e-5
        )
        .unwrap());
    }

    #[test]
    fn pe_min_lower_bounds_any_povm() {
        let sets = [
            StateSet::singleton(random_density(2, 140).unwrap()),
            StateSet::incoherent(2).unwrap(),
        ];
        let opt = pe_min_sets(&sets, &uniform2(), DEFAULT_GAP_TOL).unwrap();
        for seed in 0..20u64 {
            let m = eigh(&random_hermitian(2, 150 + seed))
                .unwrap()
                .spectral_map(|x| x.clamp(0.0, 1.0));
            let test = TestOperator::new(m).unwrap();
            let w = worst_case_error(&test.povm(), &sets, &uniform2()).unwrap();
            assert!(opt.value <= w.value + 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn audenaert_examples() {
        let v = random_psd(3, 160);
        let (lhs, rhs, holds) = audenaert_check(&v, &v, 0.3).unwrap();
        assert!(holds);
        assert!((lhs - v.trace()).abs() < 1e-9);
        assert!((rhs - v.trace()).abs() < 1e-9);

        // orthogonal supports: rhs = 0
        let a = HermitianMatrix::from_real_diag(&[1.2, 0.0]);
        let b = HermitianMatrix::from_real_diag(&[0.0, 0.4]);
        let (lhs, rhs, holds) = audenaert_check(&a, &b, 0.5).unwrap();
        assert!(holds);
        assert!(lhs.abs() < 1e-12);
        assert!(rhs.abs() < 1e-12);

        for seed in 0..30u64 {
            let d = if seed % 2 == 0 { 2 } else { 3 };
            let v = random_psd(d, 1700 + seed);
            let w = random_psd(d, 1800 + seed);
            for k in 0..=10 {
                let alpha = k as f64 / 10.0;
                let (_, _, holds) = audenaert_check(&v, &w, alpha).unwrap();
                assert!(holds, "seed {seed}, alpha {alpha}");
            }
        }
    }

    #[test]
    fn optimal_test_uniqueness_probes() {
        // full-rank delta: feasible tests far from the projector must show a
        // strictly worse objective than the projector's optimum
        let r1 = random_density(3, 190).unwrap();
        let r2 = random_density(3, 191).unwrap();
        let delta = &r1.hermitian().scale(0.5) - &r2.hermitian().scale(0.5);
        let margin = eigh(&delta)
            .unwrap()
            .values
            .iter()
            .map(|v| v.abs())
            .fold(f64::INFINITY, f64::min);
        assert!(margin > 1e-4, "fixture should be full rank, margin {margin}");
        let m_star = pos_projector(&delta).unwrap();
        let best = delta.inner(&m_star);
        for seed in 0..200u64 {
            let m = eigh(&random_hermitian(3, 2000 + seed))
                .unwrap()
                .spectral_map(|x| x.clamp(0.0, 1.0));
            let dist = (&m - &m_star).frob_norm();
            let gap = best - delta.inner(&m);
            assert!(gap >= -1e-12);
            if dist > 1e-5 {
                assert!(gap > 1e-12, "seed {seed}: dist {dist:.3e} but gap {gap:.3e}");
            }
        }
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![]).is_err());
        let half = HermitianMatrix::identity(2).scale(0.5);
        assert!(Povm::new(vec![half.clone(), half.clone()]).is_ok());
        assert!(Povm::new(vec![half.clone()]).is_err()); // incomplete
        let neg = HermitianMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(Povm::new(vec![neg, half]).is_err());
        assert!(TestOperator::new(HermitianMatrix::from_real_diag(&[1.2, 0.0])).is_err());
    }
}
