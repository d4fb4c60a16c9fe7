use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::graphs::Graph;
use crate::linalg::{self, GeneralPositionCheck, TolerancePolicy};
use crate::stresses::StressMatrix;
use crate::{rng, Error, Real, Result};

/// Attempts made by [`build_gor`] before giving up.
pub const GOR_RETRY_CAP: usize = 32;
/// Samples tried by [`center_gor`].
pub const CENTERING_RETRY_CAP: usize = 64;
/// A centering coefficient counts as nonzero when at least this fraction
/// of the largest one.
pub const CENTERING_MIN_RATIO: f64 = 1e-3;

/// Vectors `v_i` in `R^D` (columns) such that non-adjacent vertices are
/// orthogonal under the form `<x, y> = sum_k s_k x_k y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalRep<T: Real> {
    vectors: DMatrix<T>,
    signature: Vec<i8>,
}

/// Nonzero per-vertex scalars that move the barycenter to the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringMap<T: Real>(pub DVector<T>);

/// Parses `"+++-"` style signatures.
pub fn parse_signature(s: &str) -> Result<Vec<i8>> {
    s.chars()
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            other => Err(Error::invalid(format!("signature character '{other}'"))),
        })
        .collect()
}

impl<T: Real> OrthogonalRep<T> {
    /// `vectors` is the `D x n` configuration matrix.
    pub fn new(vectors: DMatrix<T>, signature: Vec<i8>) -> Result<Self> {
        if signature.len() != vectors.nrows() {
            return Err(Error::invalid(format!(
                "signature has {} signs for dimension {}",
                signature.len(),
                vectors.nrows()
            )));
        }
        if signature.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("signature entries must be +1 or -1"));
        }
        linalg::check_finite(&vectors)?;
        Ok(Self { vectors, signature })
    }

    pub fn euclidean(vectors: DMatrix<T>) -> Result<Self> {
        let d = vectors.nrows();
        Self::new(vectors, vec![1; d])
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn num_vertices(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn configuration_matrix(&self) -> &DMatrix<T> {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> DVector<T> {
        self.vectors.column(i).into_owned()
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    pub fn is_euclidean(&self) -> bool {
        self.signature.iter().all(|&s| s == 1)
    }

    pub fn signature_matrix(&self) -> DMatrix<T> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.signature.iter().map(|&s| T::lit(s as f64)),
        ))
    }

    pub fn form(&self, x: &DVector<T>, y: &DVector<T>) -> T {
        x.iter()
            .zip(y.iter())
            .zip(&self.signature)
            .fold(T::zero(), |acc, ((&a, &b), &s)| acc + T::lit(s as f64) * a * b)
    }

    /// `X^T S X`.
    pub fn gram(&self) -> DMatrix<T> {
        self.vectors.transpose() * self.signature_matrix() * &self.vectors
    }

    pub fn barycenter(&self) -> DVector<T> {
        self.vectors.column_sum()
    }

    /// Largest `|<v_i, v_j>| / (|v_i| |v_j|)` over non-edges.
    pub fn orthogonality_defect(&self, g: &Graph) -> T {
        g.non_edges().into_iter().fold(T::zero(), |acc, (i, j)| {
            let (vi, vj) = (self.vector(i), self.vector(j));
            let scale = vi.norm() * vj.norm();
            let ip = self.form(&vi, &vj).abs();
            acc.max(if scale > T::zero() { ip / scale } else { ip })
        })
    }

    pub fn is_orthogonal_rep(&self, g: &Graph, policy: &TolerancePolicy<T>) -> bool {
        g.num_vertices() == self.num_vertices()
            && self.orthogonality_defect(g) <= policy.residual_bound(T::one())
    }

    /// Every `min(D, n)` of the vectors are linearly independent.
    pub fn general_position(&self, policy: &TolerancePolicy<T>) -> Result<GeneralPositionCheck> {
        linalg::linear_general_position(&self.vectors.transpose(), policy)
    }

    /// Locally full spanning: each vertex `i` has `n - D - 1` neighbors
    /// whose removal together with `i` leaves independent vectors.
    pub fn is_locally_full_spanning(&self, g: &Graph, policy: &TolerancePolicy<T>) -> Result<bool> {
        let n = self.num_vertices();
        if n <= self.dim() {
            return Ok(false);
        }
        let k = n - self.dim() - 1;
        let rows = self.vectors.transpose();
        for i in 0..n {
            let mut ok = false;
            for removed in g.neighbors(i).into_iter().combinations(k) {
                let keep: Vec<usize> = (0..n).filter(|v| *v != i && !removed.contains(v)).collect();
                if linalg::rows_independent(&rows, &keep, policy)? {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Jacobian of `v -> (<v_i, v_j>)` over the non-edges, with `v`
    /// flattened vertex-major (`i * D + k`).
    pub fn orthogonality_jacobian(&self, g: &Graph) -> DMatrix<T> {
        let dim = self.dim();
        let non_edges = g.non_edges();
        let mut jac = DMatrix::zeros(non_edges.len(), dim * self.num_vertices());
        for (row, &(i, j)) in non_edges.iter().enumerate() {
            for k in 0..dim {
                let s = T::lit(self.signature[k] as f64);
                jac[(row, i * dim + k)] = s * self.vectors[(k, j)];
                jac[(row, j * dim + k)] = s * self.vectors[(k, i)];
            }
        }
        jac
    }

    pub fn to_flat(&self) -> DVector<T> {
        let dim = self.dim();
        DVector::from_fn(dim * self.num_vertices(), |idx, _| self.vectors[(idx % dim, idx / dim)])
    }

    pub fn from_flat(&self, flat: &DVector<T>) -> Self {
        let dim = self.dim();
        Self {
            vectors: DMatrix::from_fn(dim, self.num_vertices(), |k, i| flat[i * dim + k]),
            signature: self.signature.clone(),
        }
    }
}

/// Randomized sequential orthogonal representation of `g` in
/// `R^{n-d-1}` under `signature`, verified to be in general position.
pub fn build_gor<T: Real>(
    g: &Graph,
    d: usize,
    signature: &[i8],
    seed: u64,
    policy: &TolerancePolicy<T>,
) -> Result<OrthogonalRep<T>> {
    let n = g.num_vertices();
    if n < d + 2 {
        return Err(Error::invalid(format!("need n >= d+2 = {}", d + 2)));
    }
    let dim = n - d - 1;
    if signature.len() != dim {
        return Err(Error::invalid(format!(
            "signature has {} signs, representation dimension is {dim}",
            signature.len()
        )));
    }
    let found = g.vertex_connectivity()?;
    if found < d + 1 {
        return Err(Error::NotConnectedEnough {
            required: d + 1,
            found,
        });
    }
    let signs: Vec<T> = signature.iter().map(|&s| T::lit(s as f64)).collect();

    let mut last_reason = String::new();
    for attempt in 0..GOR_RETRY_CAP {
        let mut r = rng::trial_rng(seed, attempt as u64);
        let mut vectors = DMatrix::<T>::zeros(dim, n);
        let mut degenerate = false;
        for i in 0..n {
            let earlier: Vec<usize> = (0..i).filter(|&j| !g.has_edge(i, j)).collect();
            let constraints = DMatrix::from_fn(earlier.len(), dim, |r, k| signs[k] * vectors[(k, earlier[r])]);
            let free = linalg::kernel_basis(&constraints, policy)?;
            if free.is_empty() {
                degenerate = true;
                break;
            }
            let z = rng::gaussian_vector::<T, _>(&mut r, free.dim());
            let v = free.matrix() * z;
            let norm = v.norm();
            if norm <= T::zero() {
                degenerate = true;
                break;
            }
            vectors.set_column(i, &(v / norm));
        }
        if degenerate {
            last_reason = "a vertex was forced to the zero vector".into();
            continue;
        }
        let rep = OrthogonalRep::new(vectors, signature.to_vec())?;
        if !rep.is_orthogonal_rep(g, policy) {
            last_reason = "orthogonality residual above tolerance".into();
            continue;
        }
        let gp = rep.general_position(policy)?;
        if gp.holds {
            return Ok(rep);
        }
        last_reason = format!("dependent vectors {:?}", gp.witness.unwrap_or_default());
    }
    Err(Error::ConstructionFailed {
        attempts: GOR_RETRY_CAP,
        seed,
        reason: last_reason,
    })
}

/// Rescales the vectors by a random all-nonzero element of the kernel of
/// the configuration matrix, so that they sum to zero.
pub fn center_gor<T: Real>(
    g: &Graph,
    rep: &OrthogonalRep<T>,
    seed: u64,
    policy: &TolerancePolicy<T>,
) -> Result<(CenteringMap<T>, OrthogonalRep<T>)> {
    let gp = rep.general_position(policy)?;
    if !gp.holds {
        return Err(Error::NotGeneralPosition(format!(
            "dependent vectors {:?}",
            gp.witness.unwrap_or_default()
        )));
    }
    if !rep.is_locally_full_spanning(g, policy)? {
        return Err(Error::NotGeneralPosition(
            "orthogonal representation is not locally full spanning".into(),
        ));
    }
    let kernel = linalg::kernel_basis(rep.configuration_matrix(), policy)?;
    if kernel.is_empty() {
        return Err(Error::ConstructionFailed {
            attempts: 0,
            seed,
            reason: "configuration matrix has trivial kernel".into(),
        });
    }
    let ratio = T::lit(CENTERING_MIN_RATIO);
    for attempt in 0..CENTERING_RETRY_CAP {
        let mut r = rng::trial_rng(seed, attempt as u64);
        let z = rng::gaussian_vector::<T, _>(&mut r, kernel.dim());
        let alpha = kernel.matrix() * z;
        let top = alpha.amax();
        if top <= T::zero() || alpha.iter().any(|a| a.abs() < ratio * top) {
            continue;
        }
        let alpha = alpha / top;
        let mut scaled = rep.configuration_matrix().clone();
        for (i, mut col) in scaled.column_iter_mut().enumerate() {
            col *= alpha[i];
        }
        let centered = OrthogonalRep::new(scaled, rep.signature().to_vec())?;
        return Ok((CenteringMap(alpha), centered));
    }
    Err(Error::ConstructionFailed {
        attempts: CENTERING_RETRY_CAP,
        seed,
        reason: "no all-nonzero centering vector found".into(),
    })
}

/// The (pseudo-)Gram matrix `X^T S X` of a centered orthogonal
/// representation; entries on non-edges are set to exact zeros after
/// their size has been checked.
pub fn lss_stress<T: Real>(
    g: &Graph,
    rep: &OrthogonalRep<T>,
    policy: &TolerancePolicy<T>,
) -> Result<StressMatrix<T>> {
    if rep.num_vertices() != g.num_vertices() {
        return Err(Error::invalid("representation and graph sizes differ"));
    }
    let total: T = rep
        .configuration_matrix()
        .column_iter()
        .fold(T::zero(), |acc, c| acc + c.norm());
    let residual = rep.barycenter().norm();
    if residual > policy.residual_bound(total) {
        return Err(Error::NotCentered {
            residual: residual.as_f64(),
        });
    }
    if !rep.is_orthogonal_rep(g, policy) {
        return Err(Error::invalid("vectors are not an orthogonal representation of the graph"));
    }
    let mut gram = rep.gram();
    for (i, j) in g.non_edges() {
        gram[(i, j)] = T::zero();
        gram[(j, i)] = T::zero();
    }
    StressMatrix::from_matrix(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stresses;

    fn p() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    #[test]
    fn signatures() {
        assert_eq!(parse_signature("++-").unwrap(), vec![1, 1, -1]);
        assert!(parse_signature("+x").is_err());
    }

    #[test]
    fn k4_line_representation() {
        let g = Graph::complete(4);
        let rep = build_gor::<f64>(&g, 2, &[1], 1, &p()).unwrap();
        assert_eq!(rep.dim(), 1);
        assert!(rep.configuration_matrix().iter().all(|x| x.abs() > 0.0));

        let ones = OrthogonalRep::euclidean(DMatrix::from_element(1, 4, 1.0)).unwrap();
        let (alpha, centered) = center_gor(&g, &ones, 3, &p()).unwrap();
        assert!(alpha.0.sum().abs() < 1e-12);
        assert!(alpha.0.iter().all(|a| a.abs() > 1e-3));
        assert!(centered.barycenter().norm() < 1e-12);
    }

    #[test]
    fn k4_square_gram() {
        let g = Graph::complete(4);
        let c = 0.5;
        let rep = OrthogonalRep::euclidean(DMatrix::from_row_slice(1, 4, &[c, -c, -c, c])).unwrap();
        let om = lss_stress(&g, &rep, &p()).unwrap();
        let u = DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]);
        assert!((om.matrix() - (&u * u.transpose()) * (c * c)).amax() < 1e-15);
        let cls = stresses::classify(&g, &om, 2, &p()).unwrap();
        assert!(cls.is_psd && cls.rank == 1);
    }

    #[test]
    fn cycle_not_connected_enough() {
        let g = Graph::cycle(4).unwrap();
        assert_eq!(
            build_gor::<f64>(&g, 2, &[1], 0, &p()).unwrap_err(),
            Error::NotConnectedEnough { required: 3, found: 2 }
        );
    }

    #[test]
    fn prism_gor_zero_pattern() {
        let g = Graph::prism(3).unwrap();
        let rep = build_gor::<f64>(&g, 2, &[1, 1, 1], 42, &p()).unwrap();
        assert!(rep.orthogonality_defect(&g) <= 1e-9);
        let gram = rep.gram();
        for (i, j) in g.non_edges() {
            assert!(gram[(i, j)].abs() <= 1e-9);
        }
        assert!(rep.is_locally_full_spanning(&g, &p()).unwrap());
    }

    #[test]
    fn zero_vector_fails_centering_precondition() {
        let g = Graph::complete(4);
        let rep = OrthogonalRep::euclidean(DMatrix::from_row_slice(1, 4, &[1.0, 0.0, 2.0, 3.0])).unwrap();
        assert!(matches!(center_gor(&g, &rep, 0, &p()), Err(Error::NotGeneralPosition(_))));
    }

    #[test]
    fn uncentered_gram_is_rejected() {
        let g = Graph::complete(4);
        let rep = OrthogonalRep::euclidean(DMatrix::from_element(1, 4, 1.0)).unwrap();
        assert!(matches!(lss_stress(&g, &rep, &p()), Err(Error::NotCentered { .. })));
    }

    #[test]
    fn indefinite_prism_stress() {
        let g = Graph::prism(3).unwrap();
        let rep = build_gor::<f64>(&g, 2, &[1, 1, -1], 9, &p()).unwrap();
        let (_, centered) = center_gor(&g, &rep, 9, &p()).unwrap();
        let om = lss_stress(&g, &centered, &p()).unwrap();
        let cls = stresses::classify(&g, &om, 2, &p()).unwrap();
        assert_eq!(cls.rank, 3);
        assert!(cls.is_fstress && !cls.is_psd);
        assert_eq!(linalg::inertia(om.matrix(), &p()).unwrap(), (2, 1, 3));
    }
}
