//! Primal-dual interior-point solver with Nesterov-Todd scaling.

use nalgebra::{DMatrix, DVector};

use super::{SdpProblem, SdpSolution, SdpStatus, DEFAULT_MAX_ITER, FEAS_TOL};
use crate::error::{Error, Result};
use crate::linalg::{eigh_relaxed, HermitianMatrix, C64};

/// Fraction of the step to the cone boundary taken each iteration.
const STEP_FRACTION: f64 = 0.98;
/// Iterate-norm blowup that triggers the infeasibility heuristic.
const DIVERGENCE_FACTOR: f64 = 1e8;

struct Iterate {
    x: Vec<HermitianMatrix>,
    y: DVector<f64>,
    z: Vec<HermitianMatrix>,
}

/// `A(X)`: evaluate every constraint functional at X.
fn apply_constraints(p: &SdpProblem, x: &[HermitianMatrix]) -> DVector<f64> {
    DVector::from_iterator(
        p.num_constraints(),
        p.constraints().iter().map(|con| {
            con.terms
                .iter()
                .map(|(b, a)| a.inner(&x[*b]))
                .sum::<f64>()
        }),
    )
}

/// `A^T(y)`: accumulate `sum_k y_k A_(k,b)` per block.
fn adjoint_constraints(p: &SdpProblem, y: &DVector<f64>) -> Vec<HermitianMatrix> {
    let mut out: Vec<DMatrix<C64>> = p
        .block_dims()
        .iter()
        .map(|&d| DMatrix::zeros(d, d))
        .collect();
    for (k, con) in p.constraints().iter().enumerate() {
        let c = C64::new(y[k], 0.0);
        for (b, a) in &con.terms {
            out[*b] += a.matrix() * c;
        }
    }
    out.into_iter().map(HermitianMatrix::symmetrize).collect()
}

fn dual_residual_blocks(p: &SdpProblem, it: &Iterate) -> Vec<HermitianMatrix> {
    let aty = adjoint_constraints(p, &it.y);
    (0..p.block_dims().len())
        .map(|b| &(&p.objective()[b] - &it.z[b]) - &aty[b])
        .collect()
}

/// Spectral decomposition pack for a PD block: value vector plus basis.
struct Spectral {
    values: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Spectral {
    fn of(h: &HermitianMatrix) -> Result<Self> {
        let sys = eigh_relaxed(h)?;
        Ok(Self {
            values: sys.values,
            vectors: sys.vectors,
        })
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let fd = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(f(v), 0.0)),
        );
        &self.vectors * DMatrix::from_diagonal(&fd) * self.vectors.adjoint()
    }
}

/// Nesterov-Todd scaling point W with W Z W = X, plus Z^-1.
struct Scaling {
    w: Vec<HermitianMatrix>,
    z_inv: Vec<HermitianMatrix>,
}

fn nt_scaling(x: &[HermitianMatrix], z: &[HermitianMatrix]) -> Result<Scaling> {
    let mut w = Vec::with_capacity(x.len());
    let mut z_inv = Vec::with_capacity(x.len());
    for (xb, zb) in x.iter().zip(z) {
        let zs = Spectral::of(zb)?;
        if zs.values[0] <= 0.0 {
            return Err(Error::SolverFailure("dual iterate left the cone".into()));
        }
        let z_half = zs.map(|v| v.sqrt());
        let z_half_inv = zs.map(|v| 1.0 / v.sqrt());
        let inner = HermitianMatrix::symmetrize(&z_half * xb.matrix() * &z_half);
        let is = Spectral::of(&inner)?;
        if is.values[0] <= 0.0 {
            return Err(Error::SolverFailure("primal iterate left the cone".into()));
        }
        let inner_half = is.map(|v| v.sqrt());
        w.push(HermitianMatrix::symmetrize(
            &z_half_inv * inner_half * &z_half_inv,
        ));
        z_inv.push(HermitianMatrix::symmetrize(zs.map(|v| 1.0 / v)));
    }
    Ok(Scaling { w, z_inv })
}

/// Longest step `alpha` keeping `X + alpha D` in the PSD cone, capped at 1.
fn step_to_boundary(x: &HermitianMatrix, d: &HermitianMatrix) -> Result<f64> {
    let xs = Spectral::of(x)?;
    if xs.values[0] <= 0.0 {
        return Err(Error::SolverFailure("iterate left the cone".into()));
    }
    let x_half_inv = xs.map(|v| 1.0 / v.sqrt());
    let scaled = HermitianMatrix::symmetrize(&x_half_inv * d.matrix() * &x_half_inv);
    let min = eigh_relaxed(&scaled)?.values[0];
    if min >= 0.0 {
        Ok(1.0)
    } else {
        Ok((-1.0 / min).min(1.0))
    }
}

fn joint_step(x: &[HermitianMatrix], d: &[HermitianMatrix], fraction: f64) -> Result<f64> {
    let mut alpha = 1.0f64;
    for (xb, db) in x.iter().zip(d) {
        alpha = alpha.min(fraction * step_to_boundary(xb, db)?);
    }
    Ok(alpha.min(1.0))
}

/// Solves the reduced Schur system `M dy = rhs` by Cholesky, falling back to
/// progressively ridged factorizations when the system is near-singular.
fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let dim = m.nrows();
    let scale = m.diagonal().amax().max(1.0);
    let mut ridge = 0.0;
    for attempt in 0..6 {
        let mut reg = m.clone();
        if ridge > 0.0 {
            for i in 0..dim {
                reg[(i, i)] += ridge;
            }
        }
        if let Some(chol) = reg.cholesky() {
            return Ok(chol.solve(rhs));
        }
        ridge = scale * 1e-14 * 10f64.powi(attempt);
    }
    Err(Error::SolverFailure("Schur system is singular".into()))
}

struct Direction {
    dx: Vec<HermitianMatrix>,
    dy: DVector<f64>,
    dz: Vec<HermitianMatrix>,
}

/// Computes the NT search direction for complementarity target `R_c` (per
/// block), primal residual `r_p`, and dual residual blocks `R_d`.
fn nt_direction(
    p: &SdpProblem,
    scaling: &Scaling,
    schur: &DMatrix<f64>,
    r_p: &DVector<f64>,
    r_d: &[HermitianMatrix],
    r_c: &[HermitianMatrix],
) -> Result<Direction> {
    let nb = p.block_dims().len();
    // rhs_k = r_p,k - <A_k, R_c - W R_d W>
    let mut shift = Vec::with_capacity(nb);
    for b in 0..nb {
        let wrdw = HermitianMatrix::symmetrize(
            scaling.w[b].matrix() * r_d[b].matrix() * scaling.w[b].matrix(),
        );
        shift.push(&r_c[b] - &wrdw);
    }
    let rhs = DVector::from_iterator(
        p.num_constraints(),
        p.constraints().iter().enumerate().map(|(k, con)| {
            r_p[k]
                - con
                    .terms
                    .iter()
                    .map(|(b, a)| a.inner(&shift[*b]))
                    .sum::<f64>()
        }),
    );
    let dy = solve_schur(schur, &rhs)?;
    let aty = adjoint_constraints(p, &dy);
    let mut dz = Vec::with_capacity(nb);
    let mut dx = Vec::with_capacity(nb);
    for b in 0..nb {
        let dzb = &r_d[b] - &aty[b];
        let wdzw = HermitianMatrix::symmetrize(
            scaling.w[b].matrix() * dzb.matrix() * scaling.w[b].matrix(),
        );
        dx.push(&r_c[b] - &wdzw);
        dz.push(dzb);
    }
    Ok(Direction { dx, dy, dz })
}

/// Solves a block SDP to the requested normalized duality gap.
///
/// Deterministic: fixed identity-scaled start, no randomness. The returned
/// status is [`SdpStatus::Optimal`] only when the gap is at most `gap_tol`
/// and both feasibility residuals are at most [`FEAS_TOL`].
pub fn solve(problem: &SdpProblem, gap_tol: f64) -> Result<SdpSolution> {
    solve_with_iters(problem, gap_tol, DEFAULT_MAX_ITER)
}

pub(crate) fn solve_with_iters(
    problem: &SdpProblem,
    gap_tol: f64,
    max_iter: usize,
) -> Result<SdpSolution> {
    problem.validate()?;
    if !(gap_tol > 0.0) {
        return Err(Error::InvalidInput("gap tolerance must be positive".into()));
    }

    let nb = problem.block_dims().len();
    let total_dim: usize = problem.block_dims().iter().sum();
    let h = DVector::from_iterator(
        problem.num_constraints(),
        problem.constraints().iter().map(|c| c.rhs),
    );

    // identity-scaled start from the data norms
    let data_scale = problem
        .objective()
        .iter()
        .map(|c| c.frob_norm())
        .fold(h.amax().max(1.0), f64::max);
    let tau = data_scale.max(1.0);
    let mut it = Iterate {
        x: problem
            .block_dims()
            .iter()
            .map(|&d| HermitianMatrix::identity(d).scale(tau))
            .collect(),
        y: DVector::zeros(problem.num_constraints()),
        z: problem
            .block_dims()
            .iter()
            .map(|&d| HermitianMatrix::identity(d).scale(tau))
            .collect(),
    };
    let initial_norm: f64 = tau * (total_dim as f64).sqrt();
    let h_scale = 1.0 + h.amax();
    let c_scale = 1.0
        + problem
            .objective()
            .iter()
            .map(|c| c.frob_norm())
            .fold(0.0, f64::max);

    // scale-normalized optimality measures
    let assemble = |it: &Iterate, iterations: usize, status: SdpStatus| -> SdpSolution {
        let pobj: f64 = (0..nb).map(|b| problem.objective()[b].inner(&it.x[b])).sum();
        let dobj: f64 = h.dot(&it.y);
        let r_p = &h - apply_constraints(problem, &it.x);
        let r_d = dual_residual_blocks(problem, it);
        SdpSolution {
            primal_blocks: it.x.clone(),
            dual_multipliers: it.y.iter().copied().collect(),
            dual_slacks: it.z.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
            primal_residual: r_p.amax() / h_scale,
            dual_residual: r_d.iter().map(|m| m.frob_norm()).fold(0.0, f64::max) / c_scale,
            iterations,
            status,
        }
    };

    let mut best: Option<(f64, SdpSolution)> = None;

    for iter in 0..max_iter {
        let current = assemble(&it, iter, SdpStatus::MaxIterations);
        let merit = current.gap.max(current.primal_residual).max(current.dual_residual);
        if current.gap <= gap_tol
            && current.primal_residual <= FEAS_TOL
            && current.dual_residual <= FEAS_TOL
        {
            let mut sol = current;
            sol.status = SdpStatus::Optimal;
            return Ok(sol);
        }

        let iterate_norm: f64 = it
            .x
            .iter()
            .chain(it.z.iter())
            .map(|m| m.frob_norm())
            .fold(it.y.norm(), f64::max);
        if iterate_norm > DIVERGENCE_FACTOR * initial_norm {
            let mut sol = best.map(|(_, s)| s).unwrap_or(current);
            sol.status = SdpStatus::InfeasibleSuspected;
            return Ok(sol);
        }

        if best.as_ref().map_or(true, |(m, _)| merit < *m) {
            best = Some((merit, current));
        }

        // numerical breakdown near the end of the path (severely
        // ill-conditioned scaling) terminates with the best iterate
        match nt_step(problem, &h, &mut it, nb, total_dim) {
            Ok(()) => {}
            Err(_) => break,
        }
    }

    Ok(best
        .map(|(_, s)| s)
        .expect("at least one iterate was recorded"))
}

/// One predictor-corrector step; errors signal numerical breakdown.
fn nt_step(
    problem: &SdpProblem,
    h: &DVector<f64>,
    it: &mut Iterate,
    nb: usize,
    total_dim: usize,
) -> Result<()> {
    let r_p = h - apply_constraints(problem, &it.x);
    let r_d = dual_residual_blocks(problem, it);
    let mu: f64 = (0..nb).map(|b| it.x[b].inner(&it.z[b])).sum::<f64>() / total_dim as f64;

    let scaling = nt_scaling(&it.x, &it.z)?;

    // Schur complement M_kl = sum_b <A_(k,b), W_b A_(l,b) W_b>
    let m = problem.num_constraints();
    let mut schur = DMatrix::zeros(m, m);
    let mut waw: Vec<Vec<Option<HermitianMatrix>>> = vec![vec![None; nb]; m];
    for (l, con) in problem.constraints().iter().enumerate() {
        for (b, a) in &con.terms {
            waw[l][*b] = Some(HermitianMatrix::symmetrize(
                scaling.w[*b].matrix() * a.matrix() * scaling.w[*b].matrix(),
            ));
        }
    }
    for k in 0..m {
        for l in 0..=k {
            let mut acc = 0.0;
            for (b, a) in &problem.constraints()[k].terms {
                if let Some(w) = &waw[l][*b] {
                    acc += a.inner(w);
                }
            }
            schur[(k, l)] = acc;
            schur[(l, k)] = acc;
        }
    }

    // predictor: aim at complementarity zero
    let r_c_aff: Vec<HermitianMatrix> = it.x.iter().map(|xb| -xb).collect();
    let aff = nt_direction(problem, &scaling, &schur, &r_p, &r_d, &r_c_aff)?;
    let alpha_p_aff = joint_step(&it.x, &aff.dx, 1.0)?;
    let alpha_d_aff = joint_step(&it.z, &aff.dz, 1.0)?;

    let mut mu_aff = 0.0;
    for b in 0..nb {
        let xa = &it.x[b] + &aff.dx[b].scale(alpha_p_aff);
        let za = &it.z[b] + &aff.dz[b].scale(alpha_d_aff);
        mu_aff += xa.inner(&za);
    }
    mu_aff /= total_dim as f64;
    let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(1e-12);

    // corrector: recenter toward sigma*mu
    let r_c: Vec<HermitianMatrix> = (0..nb)
        .map(|b| &scaling.z_inv[b].scale(sigma * mu) - &it.x[b])
        .collect();
    let dir = nt_direction(problem, &scaling, &schur, &r_p, &r_d, &r_c)?;
    let alpha_p = joint_step(&it.x, &dir.dx, STEP_FRACTION)?;
    let alpha_d = joint_step(&it.z, &dir.dz, STEP_FRACTION)?;
    if alpha_p < 1e-10 && alpha_d < 1e-10 {
        return Err(Error::SolverFailure("step lengths collapsed".into()));
    }

    for b in 0..nb {
        it.x[b] = &it.x[b] + &dir.dx[b].scale(alpha_p);
        it.z[b] = &it.z[b] + &dir.dz[b].scale(alpha_d);
    }
    it.y += dir.dy * alpha_d;
    Ok(())
}
