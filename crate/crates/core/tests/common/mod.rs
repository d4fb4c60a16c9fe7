//! Oracles built directly from definitions, sharing no code paths with the
//! library beyond the `Graph` container.

#![allow(dead_code)]

use eqstress::Graph;
use itertools::Itertools;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub const REL: f64 = 1e-9;
pub const ABS: f64 = 1e-12;

pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cut = (REL * top).max(ABS);
    sv.iter().filter(|&&s| s > cut).count()
}

pub fn rigidity_matrix(g: &Graph, p: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, d) = p.shape();
    let mut r = DMatrix::zeros(g.num_edges(), n * d);
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        for c in 0..d {
            let diff = p[(i, c)] - p[(j, c)];
            r[(k, i * d + c)] = diff;
            r[(k, j * d + c)] = -diff;
        }
    }
    r
}

pub fn maxwell(n: usize, m: usize, d: usize) -> i64 {
    m as i64 - (d * n) as i64 + (d * (d + 1) / 2) as i64
}

pub fn stress_matrix(g: &Graph, w: &DVector<f64>) -> DMatrix<f64> {
    let n = g.num_vertices();
    let mut m = DMatrix::zeros(n, n);
    for (k, &(i, j)) in g.edges().iter().enumerate() {
        m[(i, j)] -= w[k];
        m[(j, i)] -= w[k];
        m[(i, i)] += w[k];
        m[(j, j)] += w[k];
    }
    m
}

/// Rank `n - d - 1` and every `n - d - 1` columns independent, by direct
/// enumeration of column subsets.
pub fn brute_force_gstress(omega: &DMatrix<f64>, d: usize) -> bool {
    let n = omega.nrows();
    let k = n - d - 1;
    if rank(omega) != k {
        return false;
    }
    (0..n).combinations(k).all(|cols| {
        let sub = DMatrix::from_fn(n, k, |r, c| omega[(r, cols[c])]);
        rank(&sub) == k
    })
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut e: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

pub fn psd(m: &DMatrix<f64>) -> bool {
    let e = eigenvalues(m);
    let top = e.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    e.iter().all(|&x| x >= -(REL * top).max(ABS))
}

/// Rows `e_a e_b` (`a <= b`) of the edge directions; full column rank iff
/// no conic at infinity contains them.
pub fn conic_rank(g: &Graph, p: &DMatrix<f64>) -> usize {
    let d = p.ncols();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let m = DMatrix::from_fn(g.num_edges(), pairs.len(), |r, c| {
        let (i, j) = g.edges()[r];
        let (a, b) = pairs[c];
        (p[(i, a)] - p[(j, a)]) * (p[(i, b)] - p[(j, b)])
    });
    rank(&m)
}

/// Super stability from scratch: `omega` annihilates `[p | 1]`, is PSD of
/// rank `n - d - 1`, and the edge directions lie on no conic at infinity.
pub fn independently_super_stable(g: &Graph, p: &DMatrix<f64>, omega: &DMatrix<f64>) -> bool {
    let (n, d) = p.shape();
    let homog = DMatrix::from_fn(n, d + 1, |r, c| if c < d { p[(r, c)] } else { 1.0 });
    let residual = (omega * &homog).amax();
    let scale = omega.amax() * homog.amax() * n as f64;
    residual <= 1e-8 * scale.max(1.0)
        && psd(omega)
        && rank(omega) == n - d - 1
        && conic_rank(g, p) == d * (d + 1) / 2
}

pub fn infinitesimally_rigid(g: &Graph, p: &DMatrix<f64>) -> bool {
    let (n, d) = p.shape();
    rank(&rigidity_matrix(g, p)) == d * n - d * (d + 1) / 2
}
