//! SDP formulations of the minimum-error discrimination problems.
//!
//! The minimum error probability over states `{rho_i}` with priors `{pi_i}`
//! is `max_X {1 - tr X : X >= pi_i rho_i for all i}`. The variable `X` is
//! eliminated through slack blocks `S_i = X - pi_i rho_i >= 0`, which puts
//! the problem in conic standard form; the POVM achieving the optimum is
//! recovered from the dual slacks. Replacing fixed states by semidefinite
//! representations of hypothesis sets keeps the problem an SDP and yields
//! the worst-case states alongside the value.

use super::{solve, SdpProblem, SdpSolution};
use crate::discrimination::Povm;
use crate::error::{Error, Result};
use crate::linalg::{herm_basis, trace_norm, HermitianMatrix};
use crate::sets::{SetSdpRepr, StateSet};
use crate::states::{DensityMatrix, PriorVector};

fn check_r_and_dims(dims: &[usize], priors: &PriorVector) -> Result<usize> {
    if dims.len() < 2 {
        return Err(Error::InvalidInput(
            "discrimination needs at least two hypotheses".into(),
        ));
    }
    if priors.len() != dims.len() {
        return Err(Error::InvalidInput(format!(
            "{} priors for {} hypotheses",
            priors.len(),
            dims.len()
        )));
    }
    let d = dims[0];
    if dims.iter().any(|&x| x != d) {
        return Err(Error::InvalidInput(
            "hypotheses have mixed dimensions".into(),
        ));
    }
    Ok(d)
}

fn ensure_optimal(sol: &SdpSolution, what: &str) -> Result<()> {
    if !sol.is_optimal() {
        return Err(Error::SolverFailure(format!(
            "{what} did not converge (status {:?}, gap {:.3e})",
            sol.status, sol.gap
        )));
    }
    Ok(())
}

/// POVM from the dual slacks of the discrimination SDP. The slack blocks are
/// strictly inside the cone; completeness is restored exactly by solving the
/// first element from the rest.
fn povm_from_dual_slacks(slacks: &[HermitianMatrix], d: usize) -> Result<Povm> {
    let mut rest = HermitianMatrix::zeros(d);
    for z in &slacks[1..] {
        rest = &rest + z;
    }
    let mut elements = vec![&HermitianMatrix::identity(d) - &rest];
    elements.extend(slacks[1..].iter().cloned());
    Povm::new(elements)
}

/// Minimum error probability for discriminating fixed states, with the
/// optimal POVM. Solves the slack form of
/// `max {1 - tr X : X >= pi_i rho_i}`.
pub fn pe_min_states(
    states: &[DensityMatrix],
    priors: &PriorVector,
    gap_tol: f64,
) -> Result<(f64, Povm)> {
    let dims: Vec<usize> = states.iter().map(|s| s.dim()).collect();
    let d = check_r_and_dims(&dims, priors)?;
    let r = states.len();

    let mut p = SdpProblem::new(vec![d; r]);
    p.set_objective(0, HermitianMatrix::identity(d));
    let basis = herm_basis(d);
    for i in 1..r {
        let diff = &states[0].hermitian().scale(priors.get(0))
            - &states[i].hermitian().scale(priors.get(i));
        for e in &basis {
            p.add_constraint(
                vec![(i, e.clone()), (0, e.scale(-1.0))],
                e.inner(&diff),
            );
        }
    }
    let sol = solve(&p, gap_tol)?;
    ensure_optimal(&sol, "minimum-error SDP")?;
    let value = (1.0 - priors.get(0) - sol.primal_objective).clamp(0.0, 1.0);
    let povm = povm_from_dual_slacks(&sol.dual_slacks, d)?;
    Ok((value, povm))
}

/// Joint SDP over the test threshold and one state per hypothesis set.
#[derive(Debug)]
pub struct PeMinSetsResult {
    /// Worst-case minimum error probability.
    pub value: f64,
    /// States achieving the worst case, one per set.
    pub worst_states: Vec<DensityMatrix>,
    /// Optimal POVM recovered from the dual.
    pub povm: Povm,
    /// Solver certificate for the joint problem.
    pub solution: SdpSolution,
}

struct Embedded {
    problem: SdpProblem,
    reprs: Vec<(usize, SetSdpRepr)>,
}

/// Lays out slack/auxiliary blocks followed by each set's representation
/// blocks, and installs the representation constraints.
fn embed_sets(lead_dims: &[usize], sets: &[&StateSet]) -> Embedded {
    let mut dims: Vec<usize> = lead_dims.to_vec();
    let mut reprs = Vec::with_capacity(sets.len());
    for set in sets {
        let repr = set.sdp_repr();
        let offset = dims.len();
        dims.extend_from_slice(&repr.blocks);
        reprs.push((offset, repr));
    }
    let mut problem = SdpProblem::new(dims);
    for (offset, repr) in &reprs {
        for con in &repr.constraints {
            let terms = con
                .terms
                .iter()
                .map(|(b, a)| (offset + b, a.clone()))
                .collect();
            problem.add_constraint(terms, con.rhs);
        }
    }
    Embedded { problem, reprs }
}

/// Terms of `coeff * <f, rho_set>` in global block indices.
fn rho_terms(
    embedded: &Embedded,
    set_idx: usize,
    f: &HermitianMatrix,
    coeff: f64,
) -> Vec<(usize, HermitianMatrix)> {
    let (offset, repr) = &embedded.reprs[set_idx];
    repr.rho
        .functional(f)
        .into_iter()
        .map(|(b, a)| (offset + b, a.scale(coeff)))
        .collect()
}

fn extract_states(embedded: &Embedded, sol: &SdpSolution) -> Result<Vec<DensityMatrix>> {
    embedded
        .reprs
        .iter()
        .map(|(offset, repr)| {
            repr.rho
                .extract(&sol.primal_blocks[*offset..*offset + repr.blocks.len()])
        })
        .collect()
}

/// Worst-case minimum error probability over hypothesis sets:
/// `sup_(rho_i in C_i) P_e,min({rho_i})` as one joint SDP.
pub fn pe_min_sets(
    sets: &[StateSet],
    priors: &PriorVector,
    gap_tol: f64,
) -> Result<PeMinSetsResult> {
    let dims: Vec<usize> = sets.iter().map(|s| s.dim()).collect();
    let d = check_r_and_dims(&dims, priors)?;
    let r = sets.len();

    let set_refs: Vec<&StateSet> = sets.iter().collect();
    let mut embedded = embed_sets(&vec![d; r], &set_refs);
    embedded
        .problem
        .set_objective(0, HermitianMatrix::identity(d));
    let basis = herm_basis(d);
    for i in 1..r {
        for e in &basis {
            let mut terms = vec![(i, e.clone()), (0, e.scale(-1.0))];
            terms.extend(rho_terms(&embedded, i, e, priors.get(i)));
            terms.extend(rho_terms(&embedded, 0, e, -priors.get(0)));
            embedded.problem.add_constraint(terms, 0.0);
        }
    }
    let sol = solve(&embedded.problem, gap_tol)?;
    ensure_optimal(&sol, "set discrimination SDP")?;
    let value = (1.0 - priors.get(0) - sol.primal_objective).clamp(0.0, 1.0);
    let worst_states = extract_states(&embedded, &sol)?;
    let povm = povm_from_dual_slacks(&sol.dual_slacks[..r], d)?;
    Ok(PeMinSetsResult {
        value,
        worst_states,
        povm,
        solution: sol,
    })
}

/// Result of minimizing `||pi_1 rho_1 - pi_2 rho_2||_1` over two sets.
#[derive(Debug)]
pub struct TraceDistResult {
    pub rho1: DensityMatrix,
    pub rho2: DensityMatrix,
    /// `||pi_1 rho_1* - pi_2 rho_2*||_1` at the minimizers.
    pub value: f64,
    pub solution: SdpSolution,
}

/// Minimizes the weighted trace distance `||pi_1 rho_1 - pi_2 rho_2||_1`
/// over `rho_1 in set1, rho_2 in set2`, via
/// `min tr[P + Q]` with `P - Q = pi_1 rho_1 - pi_2 rho_2`, `P, Q >= 0`.
pub fn min_trace_dist_over_sets(
    set1: &StateSet,
    set2: &StateSet,
    priors: &PriorVector,
    gap_tol: f64,
) -> Result<TraceDistResult> {
    let d = check_r_and_dims(&[set1.dim(), set2.dim()], priors)?;
    let mut embedded = embed_sets(&[d, d], &[set1, set2]);
    embedded
        .problem
        .set_objective(0, HermitianMatrix::identity(d));
    embedded
        .problem
        .set_objective(1, HermitianMatrix::identity(d));
    for e in herm_basis(d) {
        let mut terms = vec![(0, e.clone()), (1, e.scale(-1.0))];
        terms.extend(rho_terms(&embedded, 0, &e, -priors.get(0)));
        terms.extend(rho_terms(&embedded, 1, &e, priors.get(1)));
        embedded.problem.add_constraint(terms, 0.0);
    }
    let sol = solve(&embedded.problem, gap_tol)?;
    ensure_optimal(&sol, "trace-distance SDP")?;
    let states = extract_states(&embedded, &sol)?;
    let delta = &states[0].hermitian().scale(priors.get(0))
        - &states[1].hermitian().scale(priors.get(1));
    let value = trace_norm(&delta)?;
    let mut it = states.into_iter();
    Ok(TraceDistResult {
        rho1: it.next().unwrap(),
        rho2: it.next().unwrap(),
        value,
        solution: sol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::DEFAULT_GAP_TOL;
    use crate::states::{basis_state, from_pure, random_density, PureState};
    use nalgebra::DVector;

    use crate::linalg::C64;

    fn plus_state() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)])).unwrap()
    }

    fn uniform2() -> PriorVector {
        PriorVector::uniform(2)
    }

    fn plug_in_error(povm: &Povm, states: &[DensityMatrix], priors: &PriorVector) -> f64 {
        let mut correct = 0.0;
        for (i, s) in states.iter().enumerate() {
            correct += priors.get(i) * povm.elements()[i].inner(s.hermitian());
        }
        1.0 - correct
    }

    #[test]
    fn orthogonal_states_are_perfectly_distinguishable() {
        let states = vec![
            from_pure(&basis_state(2, 0).unwrap()),
            from_pure(&basis_state(2, 1).unwrap()),
        ];
        let (v, povm) = pe_min_states(&states, &uniform2(), DEFAULT_GAP_TOL).unwrap();
        assert!(v < 1e-7, "value {v}");
        assert!(plug_in_error(&povm, &states, &uniform2()) < 1e-6);
    }

    #[test]
    fn identical_states_error_is_min_prior() {
        let rho = random_density(2, 3).unwrap();
        let priors = PriorVector::new(vec![0.3, 0.7]).unwrap();
        let (v, _) = pe_min_states(&[rho.clone(), rho], &priors, DEFAULT_GAP_TOL).unwrap();
        assert!((v - 0.3).abs() < 1e-7, "value {v}");
    }

    #[test]
    fn plus_vs_zero_closed_form() {
        let states = vec![
            from_pure(&plus_state()),
            from_pure(&basis_state(2, 0).unwrap()),
        ];
        let (v, povm) = pe_min_states(&states, &uniform2(), DEFAULT_GAP_TOL).unwrap();
        let expect = 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
        assert!((v - expect).abs() < 1e-7, "value {v} vs {expect}");
        let plug = plug_in_error(&povm, &states, &uniform2());
        assert!((plug - v).abs() < 1e-6);
    }

    #[test]
    fn three_orthogonal_states() {
        let states: Vec<DensityMatrix> = (0..3)
            .map(|i| from_pure(&basis_state(3, i).unwrap()))
            .collect();
        let priors = PriorVector::uniform(3);
        let (v, povm) = pe_min_states(&states, &priors, DEFAULT_GAP_TOL).unwrap();
        assert!(v < 1e-7);
        assert!(plug_in_error(&povm, &states, &priors) < 1e-6);
    }

    #[test]
    fn matches_trace_norm_formula_on_seeded_pairs() {
        for seed in 0..20u64 {
            let d = if seed % 2 == 0 { 2 } else { 3 };
            let r1 = random_density(d, 100 + seed).unwrap();
            let r2 = random_density(d, 200 + seed).unwrap();
            let pi1 = 0.2 + 0.6 * (seed as f64 / 19.0);
            let priors = PriorVector::new(vec![pi1, 1.0 - pi1]).unwrap();
            let (v, povm) =
                pe_min_states(&[r1.clone(), r2.clone()], &priors, DEFAULT_GAP_TOL).unwrap();
            let delta = &r1.hermitian().scale(pi1) - &r2.hermitian().scale(1.0 - pi1);
            let closed = 0.5 * (1.0 - trace_norm(&delta).unwrap());
            assert!((v - closed).abs() < 1e-7, "seed {seed}: {v} vs {closed}");
            let plug = plug_in_error(&povm, &[r1, r2], &priors);
            assert!((plug - v).abs() < 1e-6, "seed {seed}: plug-in {plug} vs {v}");
        }
    }

    #[test]
    fn sets_reduce_to_states_for_singletons() {
        let r1 = random_density(2, 31).unwrap();
        let r2 = random_density(2, 32).unwrap();
        let priors = PriorVector::new(vec![0.4, 0.6]).unwrap();
        let (v_states, _) =
            pe_min_states(&[r1.clone(), r2.clone()], &priors, DEFAULT_GAP_TOL).unwrap();
        let res = pe_min_sets(
            &[StateSet::singleton(r1), StateSet::singleton(r2)],
            &priors,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((res.value - v_states).abs() < 1e-7);
    }

    #[test]
    fn plus_vs_incoherent_worst_case() {
        // grid oracle over diagonal sigma = diag(q, 1-q): the worst case sits
        // at q = 1/2 where ||psi/2 - sigma/2||_1 = 1/2, hence error 1/4
        let mut best = 0.0f64;
        for k in 0..=1000 {
            let q = k as f64 / 1000.0;
            let sigma = HermitianMatrix::from_real_diag(&[q, 1.0 - q]);
            let delta = &from_pure(&plus_state()).hermitian().scale(0.5) - &sigma.scale(0.5);
            best = best.max(0.5 * (1.0 - trace_norm(&delta).unwrap()));
        }
        assert!((best - 0.25).abs() < 1e-6, "grid oracle {best}");

        let res = pe_min_sets(
            &[
                StateSet::singleton(from_pure(&plus_state())),
                StateSet::incoherent(2).unwrap(),
            ],
            &uniform2(),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((res.value - best).abs() < 1e-6, "value {}", res.value);
        // worst incoherent state is maximally mixed
        let mixed = HermitianMatrix::identity(2).scale(0.5);
        assert!((res.worst_states[1].hermitian() - &mixed).frob_norm() < 1e-4);
    }

    #[test]
    fn intersecting_full_simplices() {
        let priors = PriorVector::new(vec![0.45, 0.55]).unwrap();
        let res = pe_min_sets(
            &[
                StateSet::full_simplex(2).unwrap(),
                StateSet::full_simplex(2).unwrap(),
            ],
            &priors,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((res.value - 0.45).abs() < 1e-6, "value {}", res.value);
    }

    #[test]
    fn trace_dist_singletons_is_direct() {
        let r1 = random_density(3, 41).unwrap();
        let r2 = random_density(3, 42).unwrap();
        let priors = PriorVector::new(vec![0.35, 0.65]).unwrap();
        let res = min_trace_dist_over_sets(
            &StateSet::singleton(r1.clone()),
            &StateSet::singleton(r2.clone()),
            &priors,
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        let delta = &r1.hermitian().scale(0.35) - &r2.hermitian().scale(0.65);
        assert!((res.value - trace_norm(&delta).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn trace_dist_plus_vs_incoherent() {
        let res = min_trace_dist_over_sets(
            &StateSet::singleton(from_pure(&plus_state())),
            &StateSet::incoherent(2).unwrap(),
            &uniform2(),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((res.value - 0.5).abs() < 1e-6, "value {}", res.value);
        let mixed = HermitianMatrix::identity(2).scale(0.5);
        assert!((res.rho2.hermitian() - &mixed).frob_norm() < 1e-4);

        // consistency with the set discrimination value
        let pe = pe_min_sets(
            &[
                StateSet::singleton(from_pure(&plus_state())),
                StateSet::incoherent(2).unwrap(),
            ],
            &uniform2(),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!((pe.value - 0.5 * (1.0 - res.value)).abs() < 1e-6);
    }

    #[test]
    fn trace_dist_identical_singletons_is_zero() {
        let rho = random_density(2, 50).unwrap();
        let res = min_trace_dist_over_sets(
            &StateSet::singleton(rho.clone()),
            &StateSet::singleton(rho),
            &uniform2(),
            DEFAULT_GAP_TOL,
        )
        .unwrap();
        assert!(res.value < 1e-6, "value {}", res.value);
    }
}
