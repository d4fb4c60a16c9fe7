//! Loads, equilibrium loads and their resolution by bar forces.
//!
//! A load assigns a force `f_i` to every vertex. A resolution is a set of
//! edge scalars `rho_ij` with `sum_j rho_ij (p_j - p_i) = -f_i` at every
//! vertex, i.e. `R(p)^T rho = f`.

use nalgebra::{DMatrix, DVector};

use crate::frameworks::{trivial_motion_dim, Framework};
use crate::linalg::{self, TolerancePolicy};
use crate::{Error, Real, Result};

/// Forces on the vertices, one row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Load<T: Real>(DMatrix<T>);

impl<T: Real> Load<T> {
    pub fn new(forces: DMatrix<T>) -> Result<Self> {
        linalg::check_finite(&forces)?;
        Ok(Self(forces))
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self(DMatrix::zeros(n, d))
    }

    /// Inverse of [`Load::to_vector`].
    pub fn from_vector(v: &DVector<T>, d: usize) -> Self {
        assert!(d > 0 && v.len().is_multiple_of(d));
        Self(DMatrix::from_fn(v.len() / d, d, |r, c| v[r * d + c]))
    }

    pub fn forces(&self) -> &DMatrix<T> {
        &self.0
    }

    pub fn num_vertices(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    /// Vertex-major flattening, matching rigidity matrix columns.
    pub fn to_vector(&self) -> DVector<T> {
        let d = self.dim();
        DVector::from_fn(self.num_vertices() * d, |k, _| self.0[(k / d, k % d)])
    }

    fn max_force(&self) -> T {
        max_row_norm(&self.0)
    }
}

/// Edge-indexed bar forces resolving a load.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution<T: Real> {
    pub weights: DVector<T>,
    /// `max_i |(R^T rho - f)_i|`.
    pub residual: T,
}

fn max_row_norm<T: Real>(m: &DMatrix<T>) -> T {
    m.row_iter().fold(T::zero(), |acc, r| acc.max(r.norm()))
}

/// The load balanced by edge weights `rho`: `f_i = -sum_j rho_ij (p_j - p_i)`.
pub fn induced_load<T: Real>(f: &Framework<T>, rho: &DVector<T>) -> Load<T> {
    let v = f.rigidity_matrix().transpose() * rho;
    Load::from_vector(&v, f.dim())
}

pub fn net_force<T: Real>(load: &Load<T>) -> DVector<T> {
    load.0.row_sum().transpose()
}

/// `sum_i f_i ^ p_i` as the antisymmetric matrix `sum_i f_i p_i^T - p_i f_i^T`.
pub fn net_torque<T: Real>(coords: &DMatrix<T>, load: &Load<T>) -> DMatrix<T> {
    let a = load.0.transpose() * coords;
    &a - a.transpose()
}

pub fn is_equilibrium_load<T: Real>(
    coords: &DMatrix<T>,
    load: &Load<T>,
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    if coords.shape() != load.0.shape() {
        return Err(Error::invalid("load and configuration have different shapes"));
    }
    let n = T::lit(coords.nrows() as f64);
    let fmax = load.max_force();
    let pmax = max_row_norm(coords);
    let force_ok = net_force(load).amax() <= policy.residual_bound(n * fmax);
    let torque_ok = net_torque(coords, load).amax() <= policy.residual_bound(n * fmax * pmax);
    Ok(force_ok && torque_ok)
}

/// Minimum-norm edge forces resolving an equilibrium load.
pub fn resolve_load<T: Real>(
    f: &Framework<T>,
    load: &Load<T>,
    policy: &TolerancePolicy<T>,
) -> Result<Resolution<T>> {
    if !is_equilibrium_load(f.coords(), load, policy)? {
        return Err(Error::NotEquilibrium);
    }
    let rt = f.rigidity_matrix().transpose();
    let rhs = DMatrix::from_column_slice(rt.nrows(), 1, load.to_vector().as_slice());
    let rho = linalg::min_norm_solve(&rt, &rhs, policy)?.column(0).into_owned();
    let lhs = &rt * &rho;
    let residual = (&lhs - rhs.column(0)).amax();
    let scale = rhs.amax() + (rt.abs() * rho.abs()).amax();
    if residual > policy.residual_bound(scale) {
        return Err(Error::Unresolvable {
            residual: residual.as_f64(),
        });
    }
    Ok(Resolution {
        weights: rho,
        residual,
    })
}

/// Keeps only the rows of `support`, which must carry all of the load.
pub fn restrict_load_to_support<T: Real>(
    load: &Load<T>,
    support: &[usize],
    policy: &TolerancePolicy<T>,
) -> Result<Load<T>> {
    let n = load.num_vertices();
    if let Some(&bad) = support.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("support vertex {bad} out of range")));
    }
    let bound = policy.residual_bound(load.max_force());
    for v in (0..n).filter(|v| !support.contains(v)) {
        let off = load.0.row(v).norm();
        if off > bound {
            return Err(Error::invalid(format!(
                "load has force {:e} at vertex {v} outside the support",
                off.as_f64()
            )));
        }
    }
    Ok(Load(linalg::select_rows(&load.0, support)))
}

/// Linear constraints (net force, then net torque entries `a < b`) cut out
/// the equilibrium loads; columns are vertex-major load coordinates.
pub fn equilibrium_constraint_matrix<T: Real>(coords: &DMatrix<T>) -> DMatrix<T> {
    let (n, d) = coords.shape();
    let torque_pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
    let mut m = DMatrix::zeros(d + torque_pairs.len(), n * d);
    for i in 0..n {
        for a in 0..d {
            m[(a, i * d + a)] = T::one();
        }
        // (f p^T - p f^T)_{ab} = f_a p_b - p_a f_b
        for (k, &(a, b)) in torque_pairs.iter().enumerate() {
            m[(d + k, i * d + a)] = coords[(i, b)];
            m[(d + k, i * d + b)] = -coords[(i, a)];
        }
    }
    m
}

/// Dimension of the space of equilibrium loads on the configuration.
pub fn equilibrium_load_space_dim<T: Real>(
    coords: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<usize> {
    let m = equilibrium_constraint_matrix(coords);
    Ok(m.ncols() - linalg::numeric_rank(&m, policy)?)
}

/// Rank of `R(p)` equals `dn - (d+1 choose 2)`.
pub fn statically_rigid<T: Real>(f: &Framework<T>, policy: &TolerancePolicy<T>) -> Result<bool> {
    let target = f.dim() * f.num_vertices() - trivial_motion_dim(f.dim());
    Ok(f.rigidity_rank(policy)? == target)
}
