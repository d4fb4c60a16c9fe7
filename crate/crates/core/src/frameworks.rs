//! Frameworks, rigidity matrices and the geometric predicates used by the
//! certificates.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graphs::{Graph, GraphFile};
use crate::linalg::{self, GeneralPositionCheck, TolerancePolicy};
use crate::{rng, Error, Real, Result};

/// A graph together with a configuration of its vertices in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework<T: Real> {
    graph: Graph,
    dim: usize,
    /// Row `i` is the point of vertex `i`.
    coords: DMatrix<T>,
}

/// Per-edge direction vectors `p_j - p_i`, one row per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDirections<T: Real>(pub DMatrix<T>);

pub fn binom2(k: usize) -> usize {
    k * (k.saturating_sub(1)) / 2
}

/// Dimension of the Euclidean group of `R^d`, `(d+1 choose 2)`.
pub fn trivial_motion_dim(d: usize) -> usize {
    binom2(d + 1)
}

/// `m - d n + (d+1 choose 2)`: stresses minus non-trivial flexes.
pub fn maxwell_index(g: &Graph, d: usize) -> i64 {
    g.num_edges() as i64 - (d * g.num_vertices()) as i64 + trivial_motion_dim(d) as i64
}

/// Dimension of the affine span of the rows of `points`.
pub fn affine_span_dim<T: Real>(points: &DMatrix<T>, policy: &TolerancePolicy<T>) -> Result<usize> {
    if points.nrows() <= 1 {
        return Ok(0);
    }
    let base = points.row(0).into_owned();
    let diffs = DMatrix::from_fn(points.nrows() - 1, points.ncols(), |r, c| {
        points[(r + 1, c)] - base[c]
    });
    linalg::numeric_rank(&diffs, policy)
}

/// `[p | 1]`: homogeneous coordinates as rows.
pub fn homogeneous<T: Real>(points: &DMatrix<T>) -> DMatrix<T> {
    let (n, d) = points.shape();
    DMatrix::from_fn(n, d + 1, |r, c| if c < d { points[(r, c)] } else { T::one() })
}

/// Affine general position of the rows of `points`, tested as linear
/// general position of the homogeneous lift.
pub fn affine_general_position<T: Real>(
    points: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<GeneralPositionCheck> {
    linalg::linear_general_position(&homogeneous(points), policy)
}

impl<T: Real> Framework<T> {
    pub fn new(graph: Graph, dim: usize, coords: DMatrix<T>) -> Result<Self> {
        if coords.nrows() != graph.num_vertices() {
            return Err(Error::invalid(format!(
                "expected {} points, got {}",
                graph.num_vertices(),
                coords.nrows()
            )));
        }
        if coords.ncols() != dim {
            return Err(Error::invalid(format!(
                "points must have {dim} coordinates, got {}",
                coords.ncols()
            )));
        }
        linalg::check_finite(&coords)?;
        Ok(Self { graph, dim, coords })
    }

    /// Points with independent standard Gaussian coordinates.
    pub fn random<R: Rng + ?Sized>(graph: Graph, dim: usize, rng: &mut R) -> Self {
        let coords = rng::gaussian_matrix(rng, graph.num_vertices(), dim);
        Self { graph, dim, coords }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn coords(&self) -> &DMatrix<T> {
        &self.coords
    }

    pub fn point(&self, i: usize) -> DVector<T> {
        self.coords.row(i).transpose()
    }

    pub fn homogeneous(&self) -> DMatrix<T> {
        homogeneous(&self.coords)
    }

    pub fn with_coords(&self, coords: DMatrix<T>) -> Result<Self> {
        Self::new(self.graph.clone(), self.dim, coords)
    }

    pub fn edge_directions(&self) -> EdgeDirections<T> {
        let edges = self.graph.edges();
        EdgeDirections(DMatrix::from_fn(edges.len(), self.dim, |r, c| {
            let (i, j) = edges[r];
            self.coords[(j, c)] - self.coords[(i, c)]
        }))
    }

    /// `m x dn` matrix; the row of edge `{i,j}` holds `p_i - p_j` in the
    /// columns of vertex `i` and `p_j - p_i` in those of vertex `j`.
    pub fn rigidity_matrix(&self) -> DMatrix<T> {
        let d = self.dim;
        let mut r = DMatrix::zeros(self.graph.num_edges(), d * self.num_vertices());
        for (row, &(i, j)) in self.graph.edges().iter().enumerate() {
            for c in 0..d {
                let diff = self.coords[(i, c)] - self.coords[(j, c)];
                r[(row, i * d + c)] = diff;
                r[(row, j * d + c)] = -diff;
            }
        }
        r
    }

    pub fn affine_span_dim(&self, policy: &TolerancePolicy<T>) -> Result<usize> {
        affine_span_dim(&self.coords, policy)
    }

    pub fn spans(&self, policy: &TolerancePolicy<T>) -> Result<bool> {
        Ok(self.affine_span_dim(policy)? == self.dim)
    }

    pub(crate) fn require_span(&self, policy: &TolerancePolicy<T>) -> Result<()> {
        let span = self.affine_span_dim(policy)?;
        if span == self.dim {
            Ok(())
        } else {
            Err(Error::SpanDeficient {
                dim: self.dim,
                span,
            })
        }
    }

    pub fn rigidity_rank(&self, policy: &TolerancePolicy<T>) -> Result<usize> {
        linalg::numeric_rank(&self.rigidity_matrix(), policy)
    }

    /// Rank of the rigidity matrix equals `dn - (d+1 choose 2)`.
    pub fn infinitesimally_rigid(&self, policy: &TolerancePolicy<T>) -> Result<bool> {
        self.require_span(policy)?;
        let target = self.dim * self.num_vertices() - trivial_motion_dim(self.dim);
        Ok(self.rigidity_rank(policy)? == target)
    }

    /// Dimension of the space of equilibrium stresses (left kernel of the
    /// rigidity matrix).
    pub fn stress_count(&self, policy: &TolerancePolicy<T>) -> Result<usize> {
        Ok(linalg::cokernel_basis(&self.rigidity_matrix(), policy)?.dim())
    }

    pub fn affine_general_position(&self, policy: &TolerancePolicy<T>) -> Result<GeneralPositionCheck> {
        affine_general_position(&self.coords, policy)
    }

    /// Per vertex: does the closed neighborhood affinely span `R^d`?
    pub fn neighborhood_span_flags(&self, policy: &TolerancePolicy<T>) -> Result<Vec<bool>> {
        (0..self.num_vertices())
            .map(|i| {
                let mut members = vec![i];
                members.extend(self.graph.neighbors(i));
                let pts = linalg::select_rows(&self.coords, &members);
                Ok(affine_span_dim(&pts, policy)? == self.dim)
            })
            .collect()
    }

    pub fn neighborhood_spans(&self, policy: &TolerancePolicy<T>) -> Result<bool> {
        Ok(self.neighborhood_span_flags(policy)?.into_iter().all(|b| b))
    }

    /// One row per edge holding the quadratic monomials `e_a e_b`
    /// (`a <= b`, lexicographic) of its direction `e`.
    pub fn conic_monomial_matrix(&self) -> DMatrix<T> {
        let d = self.dim;
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
        let dirs = self.edge_directions().0;
        DMatrix::from_fn(dirs.nrows(), pairs.len(), |r, c| {
            let (a, b) = pairs[c];
            dirs[(r, a)] * dirs[(r, b)]
        })
    }

    /// True iff a nonzero quadratic form vanishes on every edge direction.
    pub fn on_conic_at_infinity(&self, policy: &TolerancePolicy<T>) -> Result<bool> {
        let m = self.conic_monomial_matrix();
        Ok(linalg::numeric_rank(&m, policy)? < trivial_motion_dim(self.dim))
    }

    /// Basis (columns, `dn` rows) of the trivial infinitesimal motions:
    /// `d` translations and `(d choose 2)` rotations.
    pub fn trivial_motions(&self) -> DMatrix<T> {
        let (n, d) = (self.num_vertices(), self.dim);
        let rotations: Vec<(usize, usize)> = (0..d).tuple_combinations().collect();
        let mut out = DMatrix::zeros(d * n, d + rotations.len());
        for i in 0..n {
            for a in 0..d {
                out[(i * d + a, a)] = T::one();
            }
            for (k, &(a, b)) in rotations.iter().enumerate() {
                out[(i * d + a, d + k)] = -self.coords[(i, b)];
                out[(i * d + b, d + k)] = self.coords[(i, a)];
            }
        }
        out
    }
}

/// Graph JSON plus `"dim"` and `"coordinates"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FrameworkFile {
    #[serde(flatten)]
    pub graph: GraphFile,
    pub dim: usize,
    pub coordinates: Vec<Vec<f64>>,
}

impl<T: Real> From<&Framework<T>> for FrameworkFile {
    fn from(f: &Framework<T>) -> Self {
        Self {
            graph: GraphFile::from(f.graph()),
            dim: f.dim(),
            coordinates: f
                .coords()
                .row_iter()
                .map(|r| r.iter().map(|x| x.as_f64()).collect())
                .collect(),
        }
    }
}

impl FrameworkFile {
    pub fn into_framework<T: Real>(self) -> Result<Framework<T>> {
        let graph = Graph::try_from(self.graph)?;
        let n = self.coordinates.len();
        for (i, row) in self.coordinates.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::invalid(format!(
                    "point {i} has {} coordinates, expected {}",
                    row.len(),
                    self.dim
                )));
            }
        }
        let coords = DMatrix::from_fn(n, self.dim, |r, c| T::lit(self.coordinates[r][c]));
        Framework::new(graph, self.dim, coords)
    }
}
