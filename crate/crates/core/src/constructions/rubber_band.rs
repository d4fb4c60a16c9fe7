use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::frameworks::{trivial_motion_dim, Framework};
use crate::graphs::Graph;
use crate::linalg::{self, TolerancePolicy};
use crate::statics::{self, Load};
use crate::stresses::{self, canonical_simplex, StressClass, StressMatrix, StressVector};
use crate::{rng, Error, Real, Result};

/// Free weights on the edges of `G` outside the clique `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct RubberBandInput<T: Real> {
    graph: Graph,
    dim: usize,
    clique: Vec<usize>,
    weights: DVector<T>,
}

#[derive(Debug, Clone)]
pub struct RubberBandOutput<T: Real> {
    pub stress: StressMatrix<T>,
    /// Equilibrium configuration with `H` on the canonical simplex.
    pub framework: Framework<T>,
    /// Completed weights on every edge.
    pub weights: StressVector<T>,
    pub class: StressClass,
    /// Condition number of the free-vertex equilibrium system.
    pub condition: f64,
}

/// Indices (into the sorted edge list) of the edges not inside `clique`.
pub fn free_edges(g: &Graph, clique: &[usize]) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, (a, b))| !(clique.contains(a) && clique.contains(b)))
        .map(|(k, _)| k)
        .collect()
}

/// Weights drawn uniformly from `[0.5, 2)`.
pub fn random_weights<T: Real, R: Rng + ?Sized>(rng: &mut R, count: usize) -> DVector<T> {
    DVector::from_fn(count, |_, _| rng::uniform(rng, 0.5, 2.0))
}

impl<T: Real> RubberBandInput<T> {
    pub fn new(graph: Graph, dim: usize, clique: &[usize], weights: DVector<T>) -> Result<Self> {
        let mut clique = clique.to_vec();
        clique.sort_unstable();
        if clique.len() != dim + 1 || !graph.is_clique(&clique) {
            return Err(Error::invalid(format!(
                "{clique:?} is not a {}-clique of the graph",
                dim + 1
            )));
        }
        let expected = graph.num_edges() - trivial_motion_dim(dim);
        if weights.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} weights on the edges outside the clique, got {}",
                weights.len()
            )));
        }
        linalg::check_finite(&DMatrix::from_column_slice(weights.len(), 1, weights.as_slice()))?;
        Ok(Self {
            graph,
            dim,
            clique,
            weights,
        })
    }

    /// Uses the lexicographically first `K_{d+1}` of the graph.
    pub fn with_first_clique(graph: Graph, dim: usize, weights: DVector<T>) -> Result<Self> {
        let clique = graph
            .find_clique(dim + 1)
            .ok_or_else(|| Error::invalid(format!("graph has no {}-clique", dim + 1)))?;
        Self::new(graph, dim, &clique, weights)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn clique(&self) -> &[usize] {
        &self.clique
    }

    pub fn weights(&self) -> &DVector<T> {
        &self.weights
    }
}

/// Positions of all vertices: `H` on the canonical simplex, the others in
/// equilibrium under the free weights. Returns the coordinates and the
/// condition number of the free-vertex system.
pub fn equilibrium_configuration<T: Real>(
    g: &Graph,
    d: usize,
    clique: &[usize],
    free_weights: &DVector<T>,
    policy: &TolerancePolicy<T>,
) -> Result<(DMatrix<T>, f64)> {
    let n = g.num_vertices();
    let free_idx = free_edges(g, clique);
    assert_eq!(free_idx.len(), free_weights.len());
    let free_vertices: Vec<usize> = (0..n).filter(|v| !clique.contains(v)).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in free_vertices.iter().enumerate() {
        slot[v] = k;
    }
    let simplex = canonical_simplex::<T>(d);
    let mut coords = DMatrix::zeros(n, d);
    for (k, &h) in clique.iter().enumerate() {
        coords.row_mut(h).copy_from(&simplex.view((k, 0), (1, d)));
    }

    let nf = free_vertices.len();
    let mut lap = DMatrix::<T>::zeros(nf, nf);
    let mut rhs = DMatrix::<T>::zeros(nf, d);
    for (&e, &w) in free_idx.iter().zip(free_weights.iter()) {
        let (a, b) = g.edges()[e];
        for (u, v) in [(a, b), (b, a)] {
            if slot[u] == usize::MAX {
                continue;
            }
            lap[(slot[u], slot[u])] += w;
            if slot[v] == usize::MAX {
                for c in 0..d {
                    rhs[(slot[u], c)] += w * coords[(v, c)];
                }
            } else {
                lap[(slot[u], slot[v])] -= w;
            }
        }
    }

    let condition = linalg::condition_number(&lap)?;
    if linalg::numeric_rank(&lap, policy)? < nf {
        return Err(Error::OutsideDomain { condition });
    }
    let solved = lap
        .lu()
        .solve(&rhs)
        .ok_or(Error::OutsideDomain { condition })?;
    for (k, &v) in free_vertices.iter().enumerate() {
        coords.row_mut(v).copy_from(&solved.row(k));
    }
    Ok((coords, condition))
}

/// Completes the free weights to the unique stress on `G`.
pub fn rubber_band_stress<T: Real>(
    input: &RubberBandInput<T>,
    policy: &TolerancePolicy<T>,
) -> Result<RubberBandOutput<T>> {
    let g = &input.graph;
    let d = input.dim;
    let required = d + 1;
    let found = g.vertex_connectivity()?;
    if found < required {
        return Err(Error::NotConnectedEnough { required, found });
    }
    let (framework, weights, condition) =
        complete_weights(g, d, &input.clique, &input.weights, policy)?;
    let stress = stresses::to_matrix(g, &weights)?;
    let class = stresses::classify(g, &stress, d, policy)?;
    Ok(RubberBandOutput {
        stress,
        framework,
        weights,
        class,
        condition,
    })
}

/// The rubber-band map without the connectivity gate or classification:
/// equilibrium framework, completed edge weights, condition number.
pub fn complete_weights<T: Real>(
    g: &Graph,
    d: usize,
    clique: &[usize],
    free_weights: &DVector<T>,
    policy: &TolerancePolicy<T>,
) -> Result<(Framework<T>, StressVector<T>, f64)> {
    let (coords, condition) = equilibrium_configuration(g, d, clique, free_weights, policy)?;
    let framework = Framework::new(g.clone(), d, coords)?;

    // Resultant of the free edges; it is carried by H alone.
    let free_idx = free_edges(g, clique);
    let mut omega = DVector::zeros(g.num_edges());
    for (&e, &w) in free_idx.iter().zip(free_weights.iter()) {
        omega[e] = w;
    }
    let resultant = statics::induced_load(&framework, &omega);
    let on_clique = statics::restrict_load_to_support(&resultant, clique, policy)?;
    let demand = Load::new(-on_clique.forces())?;

    let simplex = Framework::new(
        Graph::complete(d + 1),
        d,
        linalg::select_rows(framework.coords(), clique),
    )?;
    let resolution = statics::resolve_load(&simplex, &demand, policy)?;
    for (k, &(a, b)) in simplex.graph().edges().iter().enumerate() {
        let e = g.edge_index(clique[a], clique[b]).expect("clique edge");
        omega[e] = resolution.weights[k];
    }
    Ok((framework, StressVector(omega), condition))
}

/// Negated entries of `omega` on the edges outside `clique`; `omega` must
/// be a Gstress for `d = |clique| - 1`.
pub fn rubber_band_readoff<T: Real>(
    g: &Graph,
    omega: &StressMatrix<T>,
    clique: &[usize],
    policy: &TolerancePolicy<T>,
) -> Result<DVector<T>> {
    if clique.is_empty() || !g.is_clique(clique) {
        return Err(Error::invalid("readoff needs a clique of the graph"));
    }
    let d = clique.len() - 1;
    if !stresses::classify(g, omega, d, policy)?.is_gstress {
        return Err(Error::NotAGstress);
    }
    let full = omega.to_stress_vector(g);
    Ok(DVector::from_iterator(
        g.num_edges() - trivial_motion_dim(d),
        free_edges(g, clique).into_iter().map(|e| full.0[e]),
    ))
}
