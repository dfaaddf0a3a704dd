//! Convex, compact hypothesis sets of density matrices.
//!
//! Every variant exposes the same three capabilities used by the divergence
//! and discrimination machinery: a linear-optimization oracle
//! (`max tr[A sigma]` over the set), a membership test, and an export of the
//! set as semidefinite constraints for embedding into joint SDPs.

mod stabilizer;

pub use stabilizer::enumerate_stabilizer_states;

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, matrix_power, partial_transpose, HermitianMatrix};
use crate::sdp::{self, SdpConstraint, SdpProblem};
use crate::states::{from_pure, DensityMatrix, DEFAULT_DIM_CAP};

/// Optimality slack granted to the linear oracle.
pub const ORACLE_TOL: f64 = 1e-7;
/// Membership tolerance used by stability spot-checks.
pub const STABILITY_TOL: f64 = 1e-8;

/// A convex, compact set of density matrices.
#[derive(Debug, Clone)]
pub enum StateSet {
    /// Convex hull of finitely many states.
    VertexHull { vertices: Vec<DensityMatrix> },
    /// States diagonal in the computational basis.
    Incoherent { dim: usize },
    /// Bipartite states with positive partial transpose; the implemented
    /// relaxation of the separable set.
    Ppt { dim_a: usize, dim_b: usize },
    /// Convex hull of all pure stabilizer states on 1 or 2 qubits,
    /// enumerated at construction.
    Stabilizer {
        qubits: usize,
        vertices: Vec<DensityMatrix>,
    },
    /// All density matrices of the given dimension.
    FullSimplex { dim: usize },
}

impl StateSet {
    pub fn vertex_hull(vertices: Vec<DensityMatrix>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::InvalidInput("vertex hull needs at least one vertex".into()))?;
        let d = first.dim();
        if vertices.iter().any(|v| v.dim() != d) {
            return Err(Error::InvalidInput(
                "vertex hull has mixed dimensions".into(),
            ));
        }
        Ok(Self::VertexHull { vertices })
    }

    /// Singleton hull `{rho}`.
    pub fn singleton(rho: DensityMatrix) -> Self {
        Self::VertexHull {
            vertices: vec![rho],
        }
    }

    pub fn incoherent(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Self::Incoherent { dim })
    }

    pub fn ppt(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidInput("dimensions must be positive".into()));
        }
        Ok(Self::Ppt { dim_a, dim_b })
    }

    pub fn stabilizer(qubits: usize) -> Result<Self> {
        let vertices = enumerate_stabilizer_states(qubits)?
            .iter()
            .map(from_pure)
            .collect();
        Ok(Self::Stabilizer { qubits, vertices })
    }

    pub fn full_simplex(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Self::FullSimplex { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::VertexHull { vertices } => vertices[0].dim(),
            Self::Incoherent { dim } | Self::FullSimplex { dim } => *dim,
            Self::Ppt { dim_a, dim_b } => dim_a * dim_b,
            Self::Stabilizer { qubits, .. } => 1 << qubits,
        }
    }

    /// Extreme points, when the set is realized as a finite hull.
    pub fn vertices(&self) -> Option<&[DensityMatrix]> {
        match self {
            Self::VertexHull { vertices } | Self::Stabilizer { vertices, .. } => Some(vertices),
            _ => None,
        }
    }

    /// A canonical full-support member: the uniform vertex mixture for
    /// hulls, the maximally mixed state otherwise.
    pub fn centroid(&self) -> DensityMatrix {
        match self.vertices() {
            Some(vs) => {
                let d = self.dim();
                let mut acc = HermitianMatrix::zeros(d);
                for v in vs {
                    acc = &acc + v.hermitian();
                }
                DensityMatrix::new_unchecked(acc.scale(1.0 / vs.len() as f64))
            }
            None => {
                let d = self.dim();
                DensityMatrix::new_unchecked(HermitianMatrix::identity(d).scale(1.0 / d as f64))
            }
        }
    }

    /// Projector onto the union of the supports of all members. Equals the
    /// support projector of the centroid, which is the identity for the
    /// full-dimensional variants.
    pub fn support_union_projector(&self) -> Result<HermitianMatrix> {
        match self.vertices() {
            Some(_) => matrix_power(self.centroid().hermitian(), 0.0),
            None => Ok(HermitianMatrix::identity(self.dim())),
        }
    }

    /// Maximizes the linear functional `sigma -> tr[A sigma]` over the set.
    /// Returns an achieving member and the attained value; ties break toward
    /// the lowest index for the enumerated variants.
    pub fn linear_oracle(&self, a: &HermitianMatrix) -> Result<(DensityMatrix, f64)> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        match self {
            Self::VertexHull { vertices } | Self::Stabilizer { vertices, .. } => {
                let mut best = 0usize;
                let mut best_val = f64::NEG_INFINITY;
                for (i, v) in vertices.iter().enumerate() {
                    let val = a.inner(v.hermitian());
                    if val > best_val {
                        best = i;
                        best_val = val;
                    }
                }
                Ok((vertices[best].clone(), best_val))
            }
            Self::Incoherent { dim } => {
                let mut best = 0usize;
                let mut best_val = f64::NEG_INFINITY;
                for i in 0..*dim {
                    let val = a.entry(i, i).re;
                    if val > best_val {
                        best = i;
                        best_val = val;
                    }
                }
                let mut diag = vec![0.0; *dim];
                diag[best] = 1.0;
                Ok((
                    DensityMatrix::new_unchecked(HermitianMatrix::from_real_diag(&diag)),
                    best_val,
                ))
            }
            Self::FullSimplex { dim } => {
                let sys = eigh(a)?;
                let top = sys.vectors.column(*dim - 1).into_owned();
                let rho = DensityMatrix::new_unchecked(HermitianMatrix::outer(&top));
                let val = sys.values[*dim - 1];
                Ok((rho, val))
            }
            Self::Ppt { dim_a, dim_b } => ppt_oracle(a, *dim_a, *dim_b),
        }
    }

    /// Membership test at tolerance `tol`.
    pub fn contains(&self, rho: &DensityMatrix, tol: f64) -> Result<bool> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        match self {
            Self::VertexHull { vertices } | Self::Stabilizer { vertices, .. } => {
                hull_membership(vertices, rho, tol)
            }
            Self::Incoherent { dim } => {
                let mut off = 0.0f64;
                for i in 0..*dim {
                    for j in 0..*dim {
                        if i != j {
                            off += rho.matrix()[(i, j)].norm_sqr();
                        }
                    }
                }
                Ok(off.sqrt() <= tol)
            }
            Self::Ppt { dim_a, dim_b } => {
                let pt = partial_transpose(rho.hermitian(), *dim_a, *dim_b)?;
                Ok(rho.hermitian().min_eigenvalue()? >= -tol
                    && pt.min_eigenvalue()? >= -tol)
            }
            Self::FullSimplex { .. } => Ok(true),
        }
    }

    /// Semidefinite representation for embedding `rho in set` into a joint
    /// SDP: extra PSD blocks, equality constraints over them (local block
    /// indices), and the affine expression recovering `rho`.
    pub fn sdp_repr(&self) -> SetSdpRepr {
        let d = self.dim();
        match self {
            Self::FullSimplex { .. } => SetSdpRepr {
                blocks: vec![d],
                constraints: vec![SdpConstraint {
                    terms: vec![(0, HermitianMatrix::identity(d))],
                    rhs: 1.0,
                }],
                rho: RhoExpr::Block(0),
            },
            Self::Incoherent { dim } => {
                let vertices: Vec<DensityMatrix> = (0..*dim)
                    .map(|i| {
                        let mut diag = vec![0.0; *dim];
                        diag[i] = 1.0;
                        DensityMatrix::new_unchecked(HermitianMatrix::from_real_diag(&diag))
                    })
                    .collect();
                weights_repr(vertices)
            }
            Self::VertexHull { vertices } | Self::Stabilizer { vertices, .. } => {
                weights_repr(vertices.clone())
            }
            Self::Ppt { dim_a, dim_b } => {
                let mut constraints = vec![SdpConstraint {
                    terms: vec![(0, HermitianMatrix::identity(d))],
                    rhs: 1.0,
                }];
                for e in crate::linalg::herm_basis(d) {
                    let ept = partial_transpose(&e, *dim_a, *dim_b)
                        .expect("basis has matching dimensions");
                    constraints.push(SdpConstraint {
                        terms: vec![(1, e), (0, ept.scale(-1.0))],
                        rhs: 0.0,
                    });
                }
                SetSdpRepr {
                    blocks: vec![d, d],
                    constraints,
                    rho: RhoExpr::Block(0),
                }
            }
        }
    }
}

/// Hull-weight representation: one PSD block whose diagonal carries the
/// convex weights.
fn weights_repr(vertices: Vec<DensityMatrix>) -> SetSdpRepr {
    let k = vertices.len();
    SetSdpRepr {
        blocks: vec![k],
        constraints: vec![SdpConstraint {
            terms: vec![(0, HermitianMatrix::identity(k))],
            rhs: 1.0,
        }],
        rho: RhoExpr::Weights {
            block: 0,
            vertices,
        },
    }
}

/// How a set's representative state is read off its SDP blocks.
#[derive(Debug, Clone)]
pub enum RhoExpr {
    /// `rho` is one of the blocks directly.
    Block(usize),
    /// `rho = sum_v w_vv V_v` with the weights on a block diagonal.
    Weights {
        block: usize,
        vertices: Vec<DensityMatrix>,
    },
}

impl RhoExpr {
    /// Expands `<f, rho>` into linear terms over the local blocks.
    pub fn functional(&self, f: &HermitianMatrix) -> Vec<(usize, HermitianMatrix)> {
        match self {
            Self::Block(b) => vec![(*b, f.clone())],
            Self::Weights { block, vertices } => {
                let diag: Vec<f64> = vertices.iter().map(|v| f.inner(v.hermitian())).collect();
                vec![(*block, HermitianMatrix::from_real_diag(&diag))]
            }
        }
    }

    /// Reconstructs the state from solved local blocks.
    pub fn extract(&self, blocks: &[HermitianMatrix]) -> Result<DensityMatrix> {
        match self {
            Self::Block(b) => DensityMatrix::cleaned(&blocks[*b]),
            Self::Weights { block, vertices } => {
                let w = &blocks[*block];
                let mut acc = HermitianMatrix::zeros(vertices[0].dim());
                let mut total = 0.0;
                for (i, v) in vertices.iter().enumerate() {
                    let wi = w.entry(i, i).re.max(0.0);
                    total += wi;
                    acc = &acc + &v.hermitian().scale(wi);
                }
                if total <= 0.0 {
                    return Err(Error::SolverFailure("hull weights sum to zero".into()));
                }
                DensityMatrix::cleaned(&acc.scale(1.0 / total))
            }
        }
    }
}

/// SDP export of one hypothesis set; block indices are local.
#[derive(Debug, Clone)]
pub struct SetSdpRepr {
    pub blocks: Vec<usize>,
    pub constraints: Vec<SdpConstraint>,
    pub rho: RhoExpr,
}

/// PPT linear oracle: maximize `tr[A sigma]` over `sigma >= 0`,
/// `sigma^(T_B) >= 0`, `tr sigma = 1`, as a two-block SDP.
fn ppt_oracle(a: &HermitianMatrix, dim_a: usize, dim_b: usize) -> Result<(DensityMatrix, f64)> {
    let d = dim_a * dim_b;
    let mut p = SdpProblem::new(vec![d, d]);
    p.set_objective(0, a.scale(-1.0));
    p.add_constraint(vec![(0, HermitianMatrix::identity(d))], 1.0);
    for e in crate::linalg::herm_basis(d) {
        let ept = partial_transpose(&e, dim_a, dim_b)?;
        p.add_constraint(vec![(1, e), (0, ept.scale(-1.0))], 0.0);
    }
    let sol = sdp::solve(&p, sdp::DEFAULT_GAP_TOL)?;
    if !sol.is_optimal() {
        return Err(Error::SolverFailure(format!(
            "PPT oracle did not converge (status {:?}, gap {:.3e})",
            sol.status, sol.gap
        )));
    }
    let rho = DensityMatrix::cleaned(&sol.primal_blocks[0])?;
    let value = a.inner(rho.hermitian());
    Ok((rho, value))
}

/// Hull membership through the nearest-point SDP
/// `min ||sum_v w_v V_v - rho||_1` over the weight simplex.
fn hull_membership(vertices: &[DensityMatrix], rho: &DensityMatrix, tol: f64) -> Result<bool> {
    let d = rho.dim();
    let k = vertices.len();
    // cheap exit: rho coincides with a vertex
    for v in vertices {
        if (v.hermitian() - rho.hermitian()).frob_norm() <= tol {
            return Ok(true);
        }
    }
    let mut p = SdpProblem::new(vec![k, d, d]);
    p.set_objective(1, HermitianMatrix::identity(d));
    p.set_objective(2, HermitianMatrix::identity(d));
    p.add_constraint(vec![(0, HermitianMatrix::identity(k))], 1.0);
    for e in crate::linalg::herm_basis(d) {
        let diag: Vec<f64> = vertices.iter().map(|v| e.inner(v.hermitian())).collect();
        let rhs = -e.inner(rho.hermitian());
        p.add_constraint(
            vec![
                (1, e.clone()),
                (2, e.scale(-1.0)),
                (0, HermitianMatrix::from_real_diag(&diag).scale(-1.0)),
            ],
            rhs,
        );
    }
    let sol = sdp::solve(&p, sdp::DEFAULT_GAP_TOL)?;
    if !sol.is_optimal() {
        return Err(Error::SolverFailure(format!(
            "hull membership SDP did not converge (status {:?})",
            sol.status
        )));
    }
    Ok(sol.primal_objective <= tol)
}

/// Tensor product of two finite hulls: the hull of all pairwise vertex
/// products.
pub fn tensor_product_set(s1: &StateSet, s2: &StateSet) -> Result<StateSet> {
    let (v1, v2) = match (s1.vertices(), s2.vertices()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "tensor products are defined for vertex-hull sets".into(),
            ))
        }
    };
    let mut vertices = Vec::with_capacity(v1.len() * v2.len());
    for a in v1 {
        for b in v2 {
            vertices.push(DensityMatrix::new_unchecked(kron(
                a.hermitian(),
                b.hermitian(),
            )));
        }
    }
    StateSet::vertex_hull(vertices)
}

/// An n-indexed family of hypothesis sets, optionally declared stable under
/// tensor products (`C_n (x) C_m` contained in `C_(n+m)`).
pub struct SetSequence {
    base_dim: usize,
    stable: bool,
    gen: Box<dyn Fn(u32) -> Result<StateSet> + Send + Sync>,
}

impl SetSequence {
    /// Wraps a generator rule. When `stable` is set and the level-1 set is a
    /// finite hull, the declaration is spot-checked: every tensor product of
    /// two level-1 vertices must belong to the level-2 set within
    /// [`STABILITY_TOL`].
    pub fn new(
        base_dim: usize,
        stable: bool,
        gen: Box<dyn Fn(u32) -> Result<StateSet> + Send + Sync>,
    ) -> Result<Self> {
        let seq = Self {
            base_dim,
            stable,
            gen,
        };
        let level1 = seq.at(1, DEFAULT_DIM_CAP)?;
        if level1.dim() != base_dim {
            return Err(Error::DimensionMismatch {
                expected: base_dim,
                got: level1.dim(),
            });
        }
        if stable && base_dim * base_dim <= DEFAULT_DIM_CAP {
            if let Some(vs) = level1.vertices() {
                let level2 = seq.at(2, DEFAULT_DIM_CAP)?;
                for a in vs {
                    for b in vs {
                        let prod = DensityMatrix::new_unchecked(kron(
                            a.hermitian(),
                            b.hermitian(),
                        ));
                        if !level2.contains(&prod, STABILITY_TOL)? {
                            return Err(Error::InvalidInput(
                                "sequence declared stable, but a product of level-1 vertices \
                                 is not in the level-2 set"
                                    .into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(seq)
    }

    pub fn is_stable(&self) -> bool {
        self.stable
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// The level-n set, enforcing the dimension cap.
    pub fn at(&self, n: u32, cap: usize) -> Result<StateSet> {
        if n == 0 {
            return Err(Error::InvalidInput("sequence index starts at 1".into()));
        }
        let dim = self
            .base_dim
            .checked_pow(n)
            .filter(|&d| d <= cap)
            .ok_or(Error::CapExceeded {
                dim: self.base_dim.checked_pow(n).unwrap_or(usize::MAX),
                cap,
            })?;
        let set = (self.gen)(n)?;
        if set.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: set.dim(),
            });
        }
        Ok(set)
    }

    /// Singleton i.i.d. sequence `{rho^(tensor n)}`.
    pub fn iid(rho: DensityMatrix) -> Result<Self> {
        let base = rho.hermitian().clone();
        Self::new(
            rho.dim(),
            true,
            Box::new(move |n| {
                let mut acc = base.clone();
                for _ in 1..n {
                    acc = kron(&acc, &base);
                }
                Ok(StateSet::singleton(DensityMatrix::new_unchecked(acc)))
            }),
        )
    }

    /// The stabilizer family `n -> STAB_n` (defined for n <= 2).
    pub fn stabilizer_family() -> Result<Self> {
        Self::new(
            2,
            true,
            Box::new(|n| StateSet::stabilizer(n as usize)),
        )
    }

    /// i.i.d. powers of a finite hull: level n is the hull of all n-fold
    /// vertex products.
    pub fn hull_iid(hull: StateSet) -> Result<Self> {
        if hull.vertices().is_none() {
            return Err(Error::Unsupported(
                "hull_iid requires a vertex-hull set".into(),
            ));
        }
        let dim = hull.dim();
        Self::new(
            dim,
            true,
            Box::new(move |n| {
                let mut acc = hull.clone();
                for _ in 1..n {
                    acc = tensor_product_set(&acc, &hull)?;
                }
                Ok(acc)
            }),
        )
    }
}

impl std::fmt::Debug for SetSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetSequence")
            .field("base_dim", &self.base_dim)
            .field("stable", &self.stable)
            .finish()
    }
}
