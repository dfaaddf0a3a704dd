//! Exhaustive enumeration of pure stabilizer states on one and two qubits.
//!
//! Breadth-first closure of the Clifford generators H and S on each qubit,
//! plus CZ on each qubit pair, applied to |0...0>. States are deduplicated
//! up to global phase. The expected counts follow the standard formula
//! `2^n * prod_(k=1..n) (2^k + 1)`: 6 states for one qubit, 60 for two.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::states::PureState;

/// Overlap-modulus tolerance for identifying states equal up to phase.
const DEDUP_TOL: f64 = 1e-9;

fn expected_count(qubits: usize) -> usize {
    let mut c = 1usize << qubits;
    for k in 1..=qubits {
        c *= (1usize << k) + 1;
    }
    c
}

/// Applies a single-qubit gate on `qubit` of an n-qubit state vector.
fn apply_1q(v: &DVector<C64>, n: usize, qubit: usize, g: [[C64; 2]; 2]) -> DVector<C64> {
    let dim = 1usize << n;
    let bit = 1usize << (n - 1 - qubit);
    let mut out = DVector::zeros(dim);
    for idx in 0..dim {
        let b = usize::from(idx & bit != 0);
        let base = idx & !bit;
        out[idx] = g[b][0] * v[base] + g[b][1] * v[base | bit];
    }
    out
}

/// Controlled-Z between two qubits.
fn apply_cz(v: &DVector<C64>, n: usize, q1: usize, q2: usize) -> DVector<C64> {
    let bit1 = 1usize << (n - 1 - q1);
    let bit2 = 1usize << (n - 1 - q2);
    DVector::from_iterator(
        v.len(),
        v.iter().enumerate().map(|(idx, &a)| {
            if idx & bit1 != 0 && idx & bit2 != 0 {
                -a
            } else {
                a
            }
        }),
    )
}

/// Rotates the global phase so the first nonnegligible amplitude is
/// positive real; makes phase-equal states bitwise comparable.
fn canonicalize(v: &DVector<C64>) -> DVector<C64> {
    let pivot = v
        .iter()
        .find(|a| a.norm() > 1e-8)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot / C64::new(pivot.norm(), 0.0);
    v / phase
}

fn same_state(a: &DVector<C64>, b: &DVector<C64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() < DEDUP_TOL)
}

/// Complete duplicate-free list of pure stabilizer states on `qubits`
/// qubits, validated against the counting formula.
pub fn enumerate_stabilizer_states(qubits: usize) -> Result<Vec<PureState>> {
    if !(1..=2).contains(&qubits) {
        return Err(Error::Unsupported(format!(
            "stabilizer enumeration supports 1 or 2 qubits, got {qubits}"
        )));
    }
    let n = qubits;
    let dim = 1usize << n;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h_gate = [
        [C64::new(s, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-s, 0.0)],
    ];
    let s_gate = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
    ];

    let mut start = DVector::zeros(dim);
    start[0] = C64::new(1.0, 0.0);
    let mut states: Vec<DVector<C64>> = vec![canonicalize(&start)];
    let mut frontier = vec![0usize];

    while let Some(i) = frontier.pop() {
        let current = states[i].clone();
        let mut images: Vec<DVector<C64>> = Vec::new();
        for q in 0..n {
            images.push(apply_1q(&current, n, q, h_gate));
            images.push(apply_1q(&current, n, q, s_gate));
        }
        for q1 in 0..n {
            for q2 in (q1 + 1)..n {
                images.push(apply_cz(&current, n, q1, q2));
            }
        }
        for img in images {
            let canon = canonicalize(&img);
            if !states.iter().any(|s| same_state(s, &canon)) {
                states.push(canon);
                frontier.push(states.len() - 1);
            }
        }
    }

    let expected = expected_count(qubits);
    if states.len() != expected {
        return Err(Error::SolverFailure(format!(
            "stabilizer enumeration found {} states, expected {expected}",
            states.len()
        )));
    }
    states.into_iter().map(PureState::normalized).collect()
}
