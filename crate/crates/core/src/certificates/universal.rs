use crate::constructions::{build_gor, center_gor, lss_stress};
use crate::frameworks::{trivial_motion_dim, Framework};
use crate::graphs::Graph;
use crate::linalg::{self, TolerancePolicy};
use crate::stresses::{self, kernel_framework, StressMatrix, StressVector};
use crate::{rng, Error, Real, Result};

use super::{ggr_test, CertificateKind, CertificateReport, Evidence, Verdict, GGR_TRIALS};

pub const UR_RETRY_CAP: usize = 10;

/// A framework together with a stress certifying its super stability.
#[derive(Debug, Clone)]
pub struct UniversalCertificate<T: Real> {
    pub framework: Framework<T>,
    pub stress: StressMatrix<T>,
    pub report: CertificateReport,
    pub ggr: CertificateReport,
}

fn check_stress<T: Real>(f: &Framework<T>, omega: &StressMatrix<T>, policy: &TolerancePolicy<T>) -> Result<()> {
    f.require_span(policy)?;
    if omega.num_vertices() != f.num_vertices() {
        return Err(Error::invalid("stress matrix size does not match the framework"));
    }
    if !stresses::is_stress_of(f, omega, policy)? {
        return Err(Error::NotAStress {
            residual: stresses::equilibrium_residual(f, omega).as_f64(),
        });
    }
    Ok(())
}

/// PSD, rank `n - d - 1`, and edge directions on no conic at infinity.
/// Super stability implies universal rigidity.
pub fn super_stable<T: Real>(
    f: &Framework<T>,
    omega: &StressMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<bool> {
    check_stress(f, omega, policy)?;
    let target = f.num_vertices() - f.dim() - 1;
    Ok(omega.is_psd(policy)? && omega.rank(policy)? == target && !f.on_conic_at_infinity(policy)?)
}

/// [`super_stable`] with the numbers behind it.
pub fn super_stable_report<T: Real>(
    f: &Framework<T>,
    omega: &StressMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<CertificateReport> {
    check_stress(f, omega, policy)?;
    let n = f.num_vertices();
    let d = f.dim();
    let rank = omega.rank(policy)?;
    let psd = omega.is_psd(policy)?;
    let conic_rank = linalg::numeric_rank(&f.conic_monomial_matrix(), policy)?;
    let eig = linalg::symmetric_eigenvalues(omega.matrix())?;
    let mut report = CertificateReport::new(CertificateKind::SuperStable, 0, policy);
    report.target = Some((n - d - 1) as i64);
    report.trials = 1;
    report.observe("stress_rank", rank as i64);
    report.observe("psd", psd as i64);
    report.observe("conic_rank", conic_rank as i64);
    report.observe("infinitesimally_rigid", f.infinitesimally_rigid(policy)? as i64);
    report.verdict = Verdict::from_bool(psd && rank == n - d - 1 && conic_rank == trivial_motion_dim(d));
    report.evidence.push(
        Evidence::new(0)
            .with("equilibrium_residual", stresses::equilibrium_residual(f, omega).as_f64())
            .with("min_eigenvalue", eig.first().map_or(0.0, |e| e.as_f64()))
            .with("max_eigenvalue", eig.last().map_or(0.0, |e| e.as_f64()))
            .note("super stable frameworks are universally rigid"),
    );
    Ok(report)
}

/// Orthogonal projection of `omega`'s edge weights onto the stress space
/// of `f`.
pub fn nearest_stress<T: Real>(
    f: &Framework<T>,
    omega: &StressMatrix<T>,
    policy: &TolerancePolicy<T>,
) -> Result<StressMatrix<T>> {
    let space = stresses::stress_space(f, policy)?;
    let w = omega.to_stress_vector(f.graph());
    let projected = if space.is_empty() {
        w.0 * T::zero()
    } else {
        space.project(&w.0)
    };
    stresses::to_matrix(f.graph(), &StressVector(projected))
}

/// Perturbs the configuration by `eps` Gaussian noise `count` times and
/// counts how often the nearest stress of the perturbed framework is
/// still PSD of rank `n - d - 1`.
pub fn perturbation_test<T: Real>(
    f: &Framework<T>,
    omega: &StressMatrix<T>,
    eps: f64,
    count: usize,
    seed: u64,
    policy: &TolerancePolicy<T>,
) -> Result<(usize, Vec<Evidence>)> {
    let target = f.num_vertices() - f.dim() - 1;
    let mut passes = 0;
    let mut evidence = Vec::with_capacity(count);
    for t in 0..count {
        let mut r = rng::trial_rng(seed, t as u64);
        let noise = rng::gaussian_matrix::<T, _>(&mut r, f.num_vertices(), f.dim()) * T::lit(eps);
        let q = f.with_coords(f.coords() + noise)?;
        let near = nearest_stress(&q, omega, policy)?;
        let rank = near.rank(policy)?;
        let psd = near.is_psd(policy)?;
        if psd && rank == target {
            passes += 1;
        }
        evidence.push(
            Evidence::new(t)
                .with("stress_rank", rank as f64)
                .with("psd", psd as u8 as f64)
                .with("distance", (near.matrix() - omega.matrix()).norm().as_f64()),
        );
    }
    Ok((passes, evidence))
}

/// Euclidean GOR, centering, LSS stress, kernel framework; accepts the
/// first attempt whose framework is infinitesimally rigid and super
/// stable.
///
/// Graphs failing [`ggr_test`] are rejected up front.
pub fn construct_universally_rigid<T: Real>(
    g: &Graph,
    d: usize,
    seed: u64,
    retry_cap: usize,
    policy: &TolerancePolicy<T>,
) -> Result<UniversalCertificate<T>> {
    let ggr = ggr_test(g, d, GGR_TRIALS, seed, policy)?;
    if !ggr.verdict.is_yes() {
        return Err(Error::NotGloballyRigid(d));
    }
    let n = g.num_vertices();
    let signature = vec![1i8; n - d - 1];
    let mut diagnostics = Vec::new();
    for attempt in 0..retry_cap {
        let s = rng::derive_seed(seed, attempt as u64);
        let outcome = (|| -> Result<Option<(Framework<T>, StressMatrix<T>)>> {
            let rep = build_gor(g, d, &signature, s, policy)?;
            let (_, centered) = center_gor(g, &rep, s, policy)?;
            let omega = lss_stress(g, &centered, policy)?;
            let f = kernel_framework(g, &omega, d, None, policy)?;
            if !f.infinitesimally_rigid(policy)? {
                return Ok(None);
            }
            if !super_stable(&f, &omega, policy)? {
                return Ok(None);
            }
            Ok(Some((f, omega)))
        })();
        match outcome {
            Ok(Some((framework, stress))) => {
                let mut report = super_stable_report(&framework, &stress, policy)?;
                report.seed = seed;
                report.trials = attempt + 1;
                report.observe("attempts", (attempt + 1) as i64);
                return Ok(UniversalCertificate {
                    framework,
                    stress,
                    report,
                    ggr,
                });
            }
            Ok(None) => diagnostics.push(format!("attempt {attempt}: kernel framework not rigid or not super stable")),
            Err(e) => diagnostics.push(format!("attempt {attempt}: {e}")),
        }
    }
    Err(Error::ConstructionFailed {
        attempts: retry_cap,
        seed,
        reason: diagnostics.join("; "),
    })
}
