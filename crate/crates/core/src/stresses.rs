//! Stress vectors and stress matrices: stress spaces, Gstress / Fstress
//! classification and kernel frameworks.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::frameworks::{homogeneous, Framework};
use crate::graphs::Graph;
use crate::linalg::{self, Certainty, SubspaceBasis, TolerancePolicy};
use crate::{rng, Error, Real, Result};

/// Above this many neighbor subsets per vertex the Fstress search turns greedy.
pub const FSTRESS_EXHAUSTIVE_LIMIT: u128 = 5_000;
/// Random restarts of the greedy Fstress search.
pub const FSTRESS_GREEDY_RESTARTS: u64 = 8;

/// Edge weights `omega_ij`, indexed by the sorted edge list of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StressVector<T: Real>(pub DVector<T>);

/// Symmetric `n x n` stress matrix: `-omega_ij` off the diagonal, zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct StressMatrix<T: Real>(DMatrix<T>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StressClass {
    pub rank: usize,
    pub is_gstress: bool,
    pub is_fstress: bool,
    pub is_psd: bool,
    /// `probable` when a sampled or greedy fallback decided a flag.
    pub certainty: Certainty,
}

impl<T: Real> StressVector<T> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Real> StressMatrix<T> {
    /// Wraps a square matrix without checking the stress invariants.
    pub fn from_matrix(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("stress matrix must be square"));
        }
        linalg::check_finite(&m)?;
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.0
    }

    pub fn num_vertices(&self) -> usize {
        self.0.nrows()
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }

    pub fn scale(&self) -> T {
        self.0.norm()
    }

    /// Symmetric, zero on non-edges, all-ones vector in the kernel.
    pub fn validate(&self, g: &Graph, policy: &TolerancePolicy<T>) -> Result<()> {
        let n = g.num_vertices();
        if self.num_vertices() != n {
            return Err(Error::NotAStressMatrix(format!(
                "matrix is {}x{}, graph has {n} vertices",
                self.num_vertices(),
                self.num_vertices()
            )));
        }
        let bound = policy.residual_bound(self.scale());
        let asym = (&self.0 - self.0.transpose()).amax();
        if asym > bound {
            return Err(Error::NotAStressMatrix(format!("asymmetry {:e}", asym.as_f64())));
        }
        for (i, j) in g.non_edges() {
            if self.0[(i, j)].abs() > bound {
                return Err(Error::NotAStressMatrix(format!("nonzero entry on non-edge ({i},{j})")));
            }
        }
        self.check_row_sums(policy)
    }

    pub(crate) fn check_row_sums(&self, policy: &TolerancePolicy<T>) -> Result<()> {
        let n = self.num_vertices();
        let ones = DVector::from_element(n, T::one());
        let residual = (&self.0 * ones).norm();
        let bound = policy.residual_bound(self.scale() * T::lit(n as f64).sqrt());
        if residual > bound {
            return Err(Error::NotAStressMatrix(format!(
                "all-ones vector not in the kernel (residual {:e})",
                residual.as_f64()
            )));
        }
        Ok(())
    }

    /// `omega_ij = -Omega_ij` on the edges of `g`.
    pub fn to_stress_vector(&self, g: &Graph) -> StressVector<T> {
        StressVector(DVector::from_iterator(
            g.num_edges(),
            g.edges().iter().map(|&(i, j)| -self.0[(i, j)]),
        ))
    }

    pub fn rank(&self, policy: &TolerancePolicy<T>) -> Result<usize> {
        linalg::numeric_rank(&self.0, policy)
    }

    pub fn is_psd(&self, policy: &TolerancePolicy<T>) -> Result<bool> {
        linalg::is_psd(&self.0, policy)
    }
}

/// Assembles the stress matrix of edge weights `omega`.
pub fn to_matrix<T: Real>(g: &Graph, omega: &StressVector<T>) -> Result<StressMatrix<T>> {
    if omega.len() != g.num_edges() {
        return Err(Error::invalid(format!(
            "{} stress weights for {} edges",
            omega.len(),
            g.num_edges()
        )));
    }
    let n = g.num_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        let w = omega.0[k];
        m[(i, j)] = -w;
        m[(j, i)] = -w;
        m[(i, i)] += w;
        m[(j, j)] += w;
    }
    Ok(StressMatrix(m))
}

/// Orthonormal basis of the equilibrium stresses (left kernel of `R(p)`),
/// one edge-indexed vector per column.
pub fn stress_space<T: Real>(f: &Framework<T>, policy: &TolerancePolicy<T>) -> Result<SubspaceBasis<T>> {
    linalg::cokernel_basis(&f.rigidity_matrix(), policy)
}

/// `max |Omega [p | 1]|`.
pub fn equilibrium_residual<T: Real>(f: &Framework<T>, omega: &StressMatrix<T>) -> T {
    (omega.matrix() * f.homogeneous()).amax()
}

/// Whether `omega` is an equilibrium stress matrix of `f`.
pub fn is_stress_of<T: Real>(
    f: &Framework<T>,
    omega: &StressMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    if omega.num_vertices() != f.num_vertices() {
        return Ok(false);
    }
    if omega.validate(f.graph(), policy).is_err() {
        return Ok(false);
    }
    let scale = omega.matrix().norm() * f.homogeneous().norm();
    Ok(equilibrium_residual(f, omega) <= policy.residual_bound(scale))
}

fn target_rank(n: usize, d: usize) -> Result<usize> {
    if n < d + 2 {
        return Err(Error::invalid(format!(
            "need at least d+2 = {} vertices, graph has {n}",
            d + 2
        )));
    }
    Ok(n - d - 1)
}

/// Rank, Gstress, Fstress and PSD flags of a stress matrix for dimension `d`.
///
/// Column conditions are decided on the kernel side: a set of `n-d-1`
/// columns of `Omega` is independent iff the complementary `d+1` rows of a
/// kernel basis are.
pub fn classify<T: Real>(
    g: &Graph,
    omega: &StressMatrix<T>,
    d: usize,
    policy: &TolerancePolicy<T>,
) -> Result<StressClass> {
    let n = omega.num_vertices();
    if n != g.num_vertices() {
        return Err(Error::invalid("stress matrix size does not match the graph"));
    }
    let target = target_rank(n, d)?;
    let rank = omega.rank(policy)?;
    let is_psd = omega.is_psd(policy)?;
    let mut class = StressClass {
        rank,
        is_gstress: false,
        is_fstress: false,
        is_psd,
        certainty: Certainty::Exact,
    };
    if rank != target {
        return Ok(class);
    }
    let kernel = linalg::kernel_basis(omega.matrix(), policy)?;
    if kernel.dim() != d + 1 {
        return Ok(class);
    }
    let rows = kernel.matrix();

    let gp = linalg::linear_general_position(rows, policy)?;
    class.is_gstress = gp.holds;
    let (fstress, f_certainty) = locally_full_spanning(g, rows, d, policy)?;
    class.is_fstress = fstress;
    if gp.certainty == Certainty::Probable || f_certainty == Certainty::Probable {
        class.certainty = Certainty::Probable;
    }
    Ok(class)
}

/// For every vertex `i`, some `d` neighbors together with `i` index
/// independent kernel rows.
fn locally_full_spanning<T: Real>(
    g: &Graph,
    kernel_rows: &DMatrix<T>,
    d: usize,
    policy: &TolerancePolicy<T>,
) -> Result<(bool, Certainty)> {
    let mut certainty = Certainty::Exact;
    for i in 0..g.num_vertices() {
        let nbrs = g.neighbors(i);
        if nbrs.len() < d {
            return Ok((false, certainty));
        }
        let found = if linalg::binomial(nbrs.len(), d) <= FSTRESS_EXHAUSTIVE_LIMIT {
            let mut hit = false;
            for subset in nbrs.iter().copied().combinations(d) {
                let mut rows = vec![i];
                rows.extend(subset);
                if linalg::rows_independent(kernel_rows, &rows, policy)? {
                    hit = true;
                    break;
                }
            }
            hit
        } else {
            certainty = Certainty::Probable;
            greedy_neighbor_basis(kernel_rows, i, &nbrs, d, policy)?
        };
        if !found {
            return Ok((false, certainty));
        }
    }
    Ok((true, certainty))
}

fn greedy_neighbor_basis<T: Real>(
    kernel_rows: &DMatrix<T>,
    i: usize,
    nbrs: &[usize],
    d: usize,
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    for restart in 0..FSTRESS_GREEDY_RESTARTS {
        let mut order = nbrs.to_vec();
        order.shuffle(&mut rng::trial_rng(i as u64, restart));
        let mut rows = vec![i];
        if !linalg::rows_independent(kernel_rows, &rows, policy)? {
            return Ok(false);
        }
        for v in order {
            rows.push(v);
            if !linalg::rows_independent(kernel_rows, &rows, policy)? {
                rows.pop();
            }
            if rows.len() == d + 1 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `[0 | 1; e_1 | 1; ...; e_d | 1]`: homogeneous canonical simplex.
pub fn canonical_simplex<T: Real>(d: usize) -> DMatrix<T> {
    let points = DMatrix::from_fn(d + 1, d, |r, c| if r == c + 1 { T::one() } else { T::zero() });
    homogeneous(&points)
}

/// A framework in the kernel of `omega` with the pin vertices sent to the
/// canonical simplex (`pins[0]` to the origin, `pins[k]` to `e_k`).
///
/// Without explicit pins, the lexicographically first `d+1` vertices with
/// affinely independent kernel positions are used.
pub fn kernel_framework<T: Real>(
    g: &Graph,
    omega: &StressMatrix<T>,
    d: usize,
    pins: Option<&[usize]>,
    policy: &TolerancePolicy<T>,
) -> Result<Framework<T>> {
    let n = omega.num_vertices();
    if n != g.num_vertices() {
        return Err(Error::invalid("stress matrix size does not match the graph"));
    }
    let target = target_rank(n, d)?;
    let rank = omega.rank(policy)?;
    if rank != target {
        return Err(Error::WrongRank {
            expected: target,
            found: rank,
        });
    }
    omega.check_row_sums(policy)?;
    let kernel = linalg::kernel_basis(omega.matrix(), policy)?;
    if kernel.dim() != d + 1 {
        return Err(Error::WrongRank {
            expected: target,
            found: n - kernel.dim(),
        });
    }
    let k = kernel.matrix();

    let pins: Vec<usize> = match pins {
        Some(p) => {
            if p.len() != d + 1 || p.iter().any(|&v| v >= n) || !p.iter().all_unique() {
                return Err(Error::invalid(format!("need {} distinct pin vertices", d + 1)));
            }
            if !linalg::rows_independent(k, p, policy)? {
                return Err(Error::PinningFailed(d + 1));
            }
            p.to_vec()
        }
        None => default_pins(k, d, policy)?,
    };

    let k_pins = linalg::select_rows(k, &pins);
    let change = k_pins
        .lu()
        .solve(&canonical_simplex::<T>(d))
        .ok_or(Error::PinningFailed(d + 1))?;
    let lifted = k * change;
    let ones_err = lifted.column(d).iter().fold(T::zero(), |acc, &x| acc.max((x - T::one()).abs()));
    if ones_err > policy.residual_bound(lifted.amax()).max(T::lit(1e3) * policy.rel_tol) {
        return Err(Error::NotAStressMatrix(format!(
            "kernel does not contain the all-ones vector (error {:e})",
            ones_err.as_f64()
        )));
    }
    Framework::new(g.clone(), d, lifted.columns(0, d).into_owned())
}

fn default_pins<T: Real>(kernel_rows: &DMatrix<T>, d: usize, policy: &TolerancePolicy<T>) -> Result<Vec<usize>> {
    for subset in (0..kernel_rows.nrows()).combinations(d + 1) {
        if linalg::rows_independent(kernel_rows, &subset, policy)? {
            return Ok(subset);
        }
    }
    Err(Error::PinningFailed(d + 1))
}
