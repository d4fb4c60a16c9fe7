//! Rank, subspace and definiteness decisions.
//!
//! Every "is this zero?" question in the crate goes through a
//! [`TolerancePolicy`]: a singular value counts as nonzero iff it exceeds
//! `max(rel_tol * sigma_max, abs_floor)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Real, Result};

/// Above this many subsets, general position is tested by sampling.
pub const EXHAUSTIVE_SUBSET_LIMIT: u128 = 200_000;
/// Number of sampled subsets in the fallback general position test.
pub const SAMPLED_SUBSET_TRIALS: usize = 32;

const SAMPLING_SEED: u64 = 0x6761_6c65;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy<T> {
    pub rel_tol: T,
    pub abs_floor: T,
}

impl<T: Real> Default for TolerancePolicy<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(T::DEFAULT_REL_TOL),
            abs_floor: T::lit(T::DEFAULT_ABS_FLOOR),
        }
    }
}

impl<T: Real> TolerancePolicy<T> {
    pub fn new(rel_tol: T, abs_floor: T) -> Result<Self> {
        if !(rel_tol > T::zero() && abs_floor > T::zero()) {
            return Err(Error::invalid(
                "tolerance policy requires rel_tol > 0 and abs_floor > 0",
            ));
        }
        Ok(Self { rel_tol, abs_floor })
    }

    /// Same floor, different relative cutoff.
    pub fn with_rel_tol(&self, rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_floor: self.abs_floor,
        }
    }

    /// Singular values strictly above this are nonzero.
    pub fn cutoff(&self, sigma_max: T) -> T {
        let rel = self.rel_tol * sigma_max;
        if rel > self.abs_floor {
            rel
        } else {
            self.abs_floor
        }
    }

    /// Allowed size of a residual whose natural magnitude is `scale`.
    pub fn residual_bound(&self, scale: T) -> T {
        self.rel_tol * scale + self.abs_floor
    }

    pub fn rel_tol_f64(&self) -> f64 {
        self.rel_tol.as_f64()
    }

    pub fn abs_floor_f64(&self) -> f64 {
        self.abs_floor.as_f64()
    }
}

/// Orthonormal basis of a subspace, stored as the columns of `basis`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> SubspaceBasis<T> {
    pub fn from_columns(basis: DMatrix<T>) -> Self {
        Self { basis }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn vector(&self, k: usize) -> DVector<T> {
        self.basis.column(k).into_owned()
    }

    pub fn vectors(&self) -> impl Iterator<Item = DVector<T>> + '_ {
        self.basis.column_iter().map(|c| c.into_owned())
    }

    /// Linear combination `sum_k coeffs[k] * basis_k`.
    pub fn combine(&self, coeffs: &[T]) -> DVector<T> {
        assert_eq!(coeffs.len(), self.dim());
        &self.basis * DVector::from_column_slice(coeffs)
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<T>) -> DVector<T> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Largest entry of `B^T B - I`.
    pub fn orthonormality_defect(&self) -> T {
        let gram = self.basis.transpose() * &self.basis;
        let id = DMatrix::<T>::identity(self.dim(), self.dim());
        (gram - id).amax()
    }
}

pub(crate) fn check_finite<T: Real>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

/// Singular values in decreasing order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Result<Vec<T>> {
    check_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let svd = SVD::new(m.clone(), false, false);
    let mut s: Vec<T> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(s)
}

fn rank_of_sorted<T: Real>(sv: &[T], policy: &TolerancePolicy<T>) -> usize {
    let Some(&top) = sv.first() else { return 0 };
    let cut = policy.cutoff(top);
    sv.iter().take_while(|&&s| s > cut).count()
}

pub fn numeric_rank<T: Real>(m: &DMatrix<T>, policy: &TolerancePolicy<T>) -> Result<usize> {
    Ok(rank_of_sorted(&singular_values(m)?, policy))
}

/// Orthonormal basis of the right null space.
pub fn kernel_basis<T: Real>(
    m: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<SubspaceBasis<T>> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(SubspaceBasis::empty(0));
    }
    if rows == 0 {
        return Ok(SubspaceBasis::from_columns(DMatrix::identity(cols, cols)));
    }
    // Pad with zero rows so the SVD returns a full set of right singular vectors.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
    });
    let sorted: Vec<T> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let rank = rank_of_sorted(&sorted, policy);
    let null_rows = &order[rank..];
    let mut basis = DMatrix::zeros(cols, null_rows.len());
    for (out, &k) in null_rows.iter().enumerate() {
        basis.set_column(out, &v_t.row(k).transpose());
    }
    Ok(SubspaceBasis::from_columns(basis))
}

/// Orthonormal basis of the left null space (kernel of the transpose).
pub fn cokernel_basis<T: Real>(
    m: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<SubspaceBasis<T>> {
    kernel_basis(&m.transpose(), policy)
}

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Eigenvalues of the symmetrized matrix, increasing.
pub fn symmetric_eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<T>> {
    check_finite(m)?;
    if m.nrows() != m.ncols() {
        return Err(Error::invalid("eigenvalues of a non-square matrix"));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut ev: Vec<T> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}

/// Signed eigenvalue counts `(positive, negative, zero)` under the policy.
pub fn inertia<T: Real>(m: &DMatrix<T>, policy: &TolerancePolicy<T>) -> Result<(usize, usize, usize)> {
    let ev = symmetric_eigenvalues(m)?;
    let top = ev.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    let cut = policy.cutoff(top);
    let pos = ev.iter().filter(|&&x| x > cut).count();
    let neg = ev.iter().filter(|&&x| x < -cut).count();
    Ok((pos, neg, ev.len() - pos - neg))
}

pub fn is_psd<T: Real>(m: &DMatrix<T>, policy: &TolerancePolicy<T>) -> Result<bool> {
    let ev = symmetric_eigenvalues(m)?;
    let Some(&lowest) = ev.first() else {
        return Ok(true);
    };
    let top = ev.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    Ok(lowest >= -(policy.rel_tol * top + policy.abs_floor))
}

/// Minimum-norm least squares solution of `a x = b` (pseudo-inverse with
/// the policy cutoff).
pub fn min_norm_solve<T: Real>(
    a: &DMatrix<T>,
    b: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<DMatrix<T>> {
    check_finite(a)?;
    check_finite(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::invalid("least squares: row count mismatch"));
    }
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(DMatrix::zeros(a.ncols(), b.ncols()));
    }
    let svd = SVD::new(a.clone(), true, true);
    let top = svd.singular_values.max();
    let cut = policy.cutoff(top);
    svd.solve(b, cut)
        .map_err(|e| Error::invalid(format!("least squares failed: {e}")))
}

/// Ratio of extreme singular values; infinite for singular input.
pub fn condition_number<T: Real>(m: &DMatrix<T>) -> Result<f64> {
    let sv = singular_values(m)?;
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > T::zero() => Ok((hi / lo).as_f64()),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Central difference Jacobian of `f` at `x` with step `h`; one column per
/// input coordinate.
pub fn central_difference_jacobian<T, F>(f: F, x: &DVector<T>, h: T) -> Result<DMatrix<T>>
where
    T: Real,
    F: Fn(&DVector<T>) -> Result<DVector<T>>,
{
    let mut cols = Vec::with_capacity(x.len());
    let two_h = h + h;
    for k in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[k] += h;
        minus[k] -= h;
        cols.push((f(&plus)? - f(&minus)?) / two_h);
    }
    if cols.is_empty() {
        let out = f(x)?.len();
        return Ok(DMatrix::zeros(out, 0));
    }
    Ok(DMatrix::from_columns(&cols))
}

pub fn select_rows<T: Real>(m: &DMatrix<T>, rows: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

pub fn select_columns<T: Real>(m: &DMatrix<T>, cols: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

/// True iff the selected rows of `m` are linearly independent.
pub fn rows_independent<T: Real>(
    m: &DMatrix<T>,
    rows: &[usize],
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    Ok(numeric_rank(&select_rows(m, rows), policy)? == rows.len())
}

pub fn columns_independent<T: Real>(
    m: &DMatrix<T>,
    cols: &[usize],
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    Ok(numeric_rank(&select_columns(m, cols), policy)? == cols.len())
}

/// Binomial coefficient, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Exact,
    Probable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralPositionCheck {
    pub holds: bool,
    pub certainty: Certainty,
    /// A dependent subset, when one was found.
    pub witness: Option<Vec<usize>>,
}

/// Tests whether the rows of `rows` (vectors in `R^k`) are in linear
/// general position: every `min(k, n)` of them are independent.
pub fn linear_general_position<T: Real>(
    rows: &DMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<GeneralPositionCheck> {
    check_finite(rows)?;
    let (n, k) = rows.shape();
    let size = n.min(k);
    let total = binomial(n, size);
    let dependent = |subset: &[usize]| -> Result<bool> { Ok(!rows_independent(rows, subset, policy)?) };

    if total <= EXHAUSTIVE_SUBSET_LIMIT {
        for subset in itertools::Itertools::combinations(0..n, size) {
            if dependent(&subset)? {
                return Ok(GeneralPositionCheck {
                    holds: false,
                    certainty: Certainty::Exact,
                    witness: Some(subset),
                });
            }
        }
        return Ok(GeneralPositionCheck {
            holds: true,
            certainty: Certainty::Exact,
            witness: None,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
    for _ in 0..SAMPLED_SUBSET_TRIALS {
        let mut subset = rand::seq::index::sample(&mut rng, n, size).into_vec();
        subset.sort_unstable();
        if dependent(&subset)? {
            return Ok(GeneralPositionCheck {
                holds: false,
                certainty: Certainty::Exact,
                witness: Some(subset),
            });
        }
    }
    Ok(GeneralPositionCheck {
        holds: true,
        certainty: Certainty::Probable,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_stress() -> DMatrix<f64> {
        let u = DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]);
        &u * u.transpose()
    }

    #[test]
    fn rank_examples() {
        let p = TolerancePolicy::<f64>::default();
        assert_eq!(numeric_rank(&DMatrix::<f64>::identity(2, 2), &p).unwrap(), 2);
        assert_eq!(numeric_rank(&DMatrix::<f64>::zeros(3, 4), &p).unwrap(), 0);
        assert_eq!(numeric_rank(&square_stress(), &p).unwrap(), 1);
    }

    #[test]
    fn rank_rejects_non_finite() {
        let p = TolerancePolicy::<f64>::default();
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(numeric_rank(&m, &p), Err(Error::InvalidInput(_))));
        assert!(matches!(kernel_basis(&m, &p), Err(Error::InvalidInput(_))));
        assert!(matches!(is_psd(&m, &p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kernel_examples() {
        let p = TolerancePolicy::<f64>::default();
        assert_eq!(kernel_basis(&DMatrix::<f64>::identity(3, 3), &p).unwrap().dim(), 0);
        assert_eq!(kernel_basis(&DMatrix::<f64>::zeros(2, 2), &p).unwrap().dim(), 2);

        let k = kernel_basis(&square_stress(), &p).unwrap();
        assert_eq!(k.dim(), 3);
        let ones = DVector::from_element(4, 1.0);
        assert!((k.project(&ones) - &ones).norm() < 1e-12);
        assert!(k.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn cokernel_of_wide_matrix() {
        let p = TolerancePolicy::<f64>::default();
        // 2x3 of rank 1: cokernel is 1-dimensional, kernel 2-dimensional.
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let ck = cokernel_basis(&m, &p).unwrap();
        assert_eq!(ck.dim(), 1);
        assert!((m.transpose() * ck.vector(0)).norm() < 1e-12);
        assert_eq!(kernel_basis(&m, &p).unwrap().dim(), 2);
        // transposed square stress: symmetric, same answer
        assert_eq!(cokernel_basis(&square_stress(), &p).unwrap().dim(), 3);
        assert_eq!(cokernel_basis(&DMatrix::<f64>::identity(3, 3), &p).unwrap().dim(), 0);
    }

    #[test]
    fn psd_examples() {
        let p = TolerancePolicy::<f64>::default();
        assert!(is_psd(&DMatrix::<f64>::identity(3, 3), &p).unwrap());
        assert!(!is_psd(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), &p).unwrap());
        assert!(is_psd(&square_stress(), &p).unwrap());
        let ev = symmetric_eigenvalues(&square_stress()).unwrap();
        assert!((ev[3] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn policy_validation() {
        assert!(TolerancePolicy::new(0.0, 1e-12).is_err());
        assert!(TolerancePolicy::new(1e-9, -1.0).is_err());
        assert!(TolerancePolicy::new(1e-9, 1e-12).is_ok());
    }

    #[test]
    fn min_norm_solution() {
        let p = TolerancePolicy::<f64>::default();
        // x + y = 2 has min-norm solution (1, 1).
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DMatrix::from_row_slice(1, 1, &[2.0]);
        let x = min_norm_solve(&a, &b, &p).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-12 && (x[(1, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_position_of_rows() {
        let p = TolerancePolicy::<f64>::default();
        let good = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert!(linear_general_position(&good, &p).unwrap().holds);
        let bad = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 2.0, 0.0]);
        let check = linear_general_position(&bad, &p).unwrap();
        assert!(!check.holds);
        assert_eq!(check.witness, Some(vec![0, 2]));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(9, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(30, 15), 155_117_520);
    }

    #[test]
    fn single_precision_rank() {
        let p = TolerancePolicy::<f32>::default();
        let u = DVector::from_vec(vec![1.0f32, -1.0, -1.0, 1.0]);
        assert_eq!(numeric_rank(&(&u * u.transpose()), &p).unwrap(), 1);
    }

    #[test]
    fn difference_jacobian_of_quadratic() {
        let x = DVector::from_vec(vec![1.0, 2.0]);
        let f = |v: &DVector<f64>| Ok(DVector::from_vec(vec![v[0] * v[1], v[0] * v[0]]));
        let j = central_difference_jacobian(f, &x, 1e-6).unwrap();
        let exact = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 2.0, 0.0]);
        assert!((j - exact).amax() < 1e-8);
    }
}
