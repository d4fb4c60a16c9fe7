use nalgebra::{DMatrix, DVector};

use crate::constructions::{build_gor, center_gor, complete_weights, random_weights, OrthogonalRep};
use crate::frameworks::trivial_motion_dim;
use crate::graphs::Graph;
use crate::linalg::{self, TolerancePolicy};
use crate::{rng, Error, Real, Result};

use super::{CertificateKind, CertificateReport, Evidence, Verdict};

/// Step of the central difference Jacobians.
pub const FD_STEP: f64 = 1e-6;
/// Relative rank tolerance applied to difference Jacobians.
pub const FD_REL_TOL: f64 = 1e-6;
pub const PROBE_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeRoute {
    /// Rubber band when the graph has a `K_{d+1}`, LSS otherwise.
    Auto,
    RubberBand,
    Lss,
}

/// Rank of the non-edge orthogonality constraints at `rep` and the
/// resulting tangent dimension `nD - rank`.
pub fn gor_tangent_count<T: Real>(
    g: &Graph,
    rep: &OrthogonalRep<T>,
    policy: &TolerancePolicy<T>,
) -> Result<(usize, usize)> {
    let jac = rep.orthogonality_jacobian(g);
    let rank = linalg::numeric_rank(&jac, policy)?;
    Ok((rank, jac.ncols() - rank))
}

fn upper_triangle<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    let n = m.nrows();
    DVector::from_iterator(n * (n + 1) / 2, (0..n).flat_map(|i| (i..n).map(move |j| m[(i, j)])))
}

/// Rank of the Gram map `X -> X^T S X` restricted to the tangent space of
/// centered orthogonal representations at `rep`.
///
/// The tangent space is the kernel of the orthogonality and centering
/// constraint Jacobians; each basis direction is pushed through the Gram
/// map by central differences.
pub fn lss_tangent_rank<T: Real>(
    g: &Graph,
    rep: &OrthogonalRep<T>,
    policy: &TolerancePolicy<T>,
) -> Result<usize> {
    let dim = rep.dim();
    let n = rep.num_vertices();
    let orth = rep.orthogonality_jacobian(g);
    let mut constraints = DMatrix::zeros(orth.nrows() + dim, n * dim);
    constraints.rows_mut(0, orth.nrows()).copy_from(&orth);
    for k in 0..dim {
        for i in 0..n {
            constraints[(orth.nrows() + k, i * dim + k)] = T::one();
        }
    }
    let tangent = linalg::kernel_basis(&constraints, policy)?;
    if tangent.is_empty() {
        return Ok(0);
    }
    let x0 = rep.to_flat();
    let h = T::lit(FD_STEP);
    let gram_at = |flat: &DVector<T>| upper_triangle(&rep.from_flat(flat).gram());
    let cols: Vec<DVector<T>> = tangent
        .vectors()
        .map(|t| (gram_at(&(&x0 + &t * h)) - gram_at(&(&x0 - &t * h))) / (h + h))
        .collect();
    let pushed = DMatrix::from_columns(&cols);
    linalg::numeric_rank(&pushed, &policy.with_rel_tol(T::lit(FD_REL_TOL)))
}

fn rubber_band_rank<T: Real>(
    g: &Graph,
    d: usize,
    clique: &[usize],
    w: &DVector<T>,
    policy: &TolerancePolicy<T>,
) -> Result<usize> {
    let map = |x: &DVector<T>| complete_weights(g, d, clique, x, policy).map(|(_, omega, _)| omega.0);
    let jac = linalg::central_difference_jacobian(map, w, T::lit(FD_STEP))?;
    linalg::numeric_rank(&jac, &policy.with_rel_tol(T::lit(FD_REL_TOL)))
}

/// Numerical dimension of the Gstress parameterization at `points` random
/// points, against the target `m - (d+1 choose 2)`.
pub fn dimension_probe<T: Real>(
    g: &Graph,
    d: usize,
    points: usize,
    seed: u64,
    route: ProbeRoute,
    policy: &TolerancePolicy<T>,
) -> Result<CertificateReport> {
    let n = g.num_vertices();
    if d == 0 || n < d + 2 {
        return Err(Error::invalid(format!("need d >= 1 and n >= d+2, got n={n}, d={d}")));
    }
    let found = g.vertex_connectivity()?;
    if found < d + 1 {
        return Err(Error::NotConnectedEnough {
            required: d + 1,
            found,
        });
    }
    let clique = g.find_clique(d + 1);
    let use_rubber_band = match route {
        ProbeRoute::Auto => clique.is_some(),
        ProbeRoute::RubberBand => true,
        ProbeRoute::Lss => false,
    };
    let target = g.num_edges() as i64 - trivial_motion_dim(d) as i64;
    let mut report = CertificateReport::new(CertificateKind::DimensionProbe, seed, policy);
    report.target = Some(target);

    let mut ranks = Vec::with_capacity(points);
    for t in 0..points {
        let (rank, note) = if use_rubber_band {
            let h = clique
                .as_deref()
                .ok_or_else(|| Error::invalid(format!("graph has no {}-clique", d + 1)))?;
            let mut r = rng::trial_rng(seed, t as u64);
            let w = random_weights::<T, _>(&mut r, g.num_edges() - trivial_motion_dim(d));
            (rubber_band_rank(g, d, h, &w, policy)?, "rubber band")
        } else {
            let s = rng::derive_seed(seed, t as u64);
            let rep = build_gor(g, d, &vec![1; n - d - 1], s, policy)?;
            let (_, centered) = center_gor(g, &rep, s, policy)?;
            (lss_tangent_rank(g, &centered, policy)?, "lss tangent")
        };
        ranks.push(rank as i64);
        report
            .evidence
            .push(Evidence::new(t).with("jacobian_rank", rank as f64).note(note));
    }
    report.trials = points;
    report.observe("min_rank", ranks.iter().copied().min().unwrap_or(0));
    report.observe("max_rank", ranks.iter().copied().max().unwrap_or(0));
    report.verdict = Verdict::from_bool(!ranks.is_empty() && ranks.iter().all(|&r| r == target));
    Ok(report)
}
