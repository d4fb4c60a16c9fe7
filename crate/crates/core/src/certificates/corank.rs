use nalgebra::DVector;

use crate::constructions::{
    build_gor, center_gor, complete_weights, equilibrium_configuration, lss_stress, random_weights,
};
use crate::frameworks::{trivial_motion_dim, Framework};
use crate::graphs::Graph;
use crate::linalg::{self, TolerancePolicy};
use crate::stresses::{self, kernel_framework};
use crate::{rng, Error, Real, Result};

use super::{CertificateKind, CertificateReport, Evidence, Verdict, FD_REL_TOL, FD_STEP};

pub const CORANK_SAMPLES: usize = 200;

/// Trial stream for the Gstress samples, kept apart from the random
/// configurations used for the plain corank.
const GSTRESS_STREAM: u64 = u64::MAX;

/// Numerical dimension of the Gstressable frameworks: Jacobian rank of the
/// free weights to pinned free-vertex positions map at `w`, plus
/// `d(d+1)` for the affine images of the pinned simplex.
pub fn gstressable_dimension<T: Real>(
    g: &Graph,
    d: usize,
    clique: &[usize],
    w: &DVector<T>,
    policy: &TolerancePolicy<T>,
) -> Result<usize> {
    let free: Vec<usize> = (0..g.num_vertices()).filter(|v| !clique.contains(v)).collect();
    let map = |x: &DVector<T>| {
        let (coords, _) = equilibrium_configuration(g, d, clique, x, policy)?;
        Ok(DVector::from_iterator(
            free.len() * d,
            free.iter().flat_map(|&v| (0..d).map(move |c| (v, c))).map(|(v, c)| coords[(v, c)]),
        ))
    };
    let jac = linalg::central_difference_jacobian(map, w, T::lit(FD_STEP))?;
    let rank = linalg::numeric_rank(&jac, &policy.with_rel_tol(T::lit(FD_REL_TOL)))?;
    Ok(rank + d * (d + 1))
}

/// Sampled corank (stress space dimension at random configurations) and
/// stressed corank (stress space dimension at the kernel frameworks of
/// sampled Gstresses), with the dimension identity
/// `dim Gstressable = m + (d+1 choose 2) - stressed corank` checked on the
/// rubber-band route.
pub fn corank_stats<T: Real>(
    g: &Graph,
    d: usize,
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy<T>,
) -> Result<CertificateReport> {
    let n = g.num_vertices();
    if d == 0 || n < d + 2 || samples == 0 {
        return Err(Error::invalid(format!(
            "need d >= 1, n >= d+2 and samples >= 1, got n={n}, d={d}, samples={samples}"
        )));
    }
    let found = g.vertex_connectivity()?;
    if found < d + 1 {
        return Err(Error::NotConnectedEnough {
            required: d + 1,
            found,
        });
    }
    let mut report = CertificateReport::new(CertificateKind::CorankStats, seed, policy);
    report.trials = samples;

    let mut corank = usize::MAX;
    for t in 0..samples {
        let mut r = rng::trial_rng(seed, t as u64);
        corank = corank.min(Framework::<T>::random(g.clone(), d, &mut r).stress_count(policy)?);
    }

    let gseed = rng::derive_seed(seed, GSTRESS_STREAM);
    let clique = g.find_clique(d + 1);
    let mut stressed = usize::MAX;
    let mut gstress_samples = 0usize;
    let mut first_weights = None;
    let mut failures = Vec::new();
    for t in 0..samples {
        let sample = (|| -> Result<Option<Framework<T>>> {
            match &clique {
                Some(h) => {
                    let mut r = rng::trial_rng(gseed, t as u64);
                    let w = random_weights::<T, _>(&mut r, g.num_edges() - trivial_motion_dim(d));
                    let (f, omega, _) = complete_weights(g, d, h, &w, policy)?;
                    let stress = stresses::to_matrix(g, &omega)?;
                    if !stresses::classify(g, &stress, d, policy)?.is_gstress {
                        return Ok(None);
                    }
                    first_weights.get_or_insert(w);
                    Ok(Some(f))
                }
                None => {
                    let s = rng::derive_seed(gseed, t as u64);
                    let rep = build_gor(g, d, &vec![1; n - d - 1], s, policy)?;
                    let (_, centered) = center_gor(g, &rep, s, policy)?;
                    let stress = lss_stress(g, &centered, policy)?;
                    if !stresses::classify(g, &stress, d, policy)?.is_gstress {
                        return Ok(None);
                    }
                    Ok(Some(kernel_framework(g, &stress, d, None, policy)?))
                }
            }
        })();
        match sample {
            Ok(Some(f)) => {
                let count = f.stress_count(policy)?;
                stressed = stressed.min(count);
                gstress_samples += 1;
                if t < 5 {
                    report.evidence.push(Evidence::new(t).with("stress_count", count as f64));
                }
            }
            Ok(None) => failures.push(format!("sample {t}: not a Gstress")),
            Err(e) => failures.push(format!("sample {t}: {e}")),
        }
    }
    if gstress_samples == 0 {
        return Err(Error::ConstructionFailed {
            attempts: samples,
            seed,
            reason: failures.first().cloned().unwrap_or_default(),
        });
    }

    report.observe("corank", corank as i64);
    report.observe("stressed_corank", stressed as i64);
    report.observe("gstress_samples", gstress_samples as i64);
    let identity_rhs = (g.num_edges() + trivial_motion_dim(d)) as i64 - stressed as i64;
    report.observe("identity_rhs", identity_rhs);
    if let (Some(h), Some(w)) = (&clique, &first_weights) {
        let dim = gstressable_dimension(g, d, h, w, policy)? as i64;
        report.observe("gstressable_dim", dim);
        report.observe("identity_holds", (dim == identity_rhs) as i64);
    }
    report.verdict = Verdict::from_bool(stressed == corank);
    Ok(report)
}
