use crate::frameworks::Framework;
use crate::graphs::Graph;
use crate::linalg::TolerancePolicy;
use crate::stresses::{self, StressVector};
use crate::{rng, Error, Real, Result};

use super::{Caveat, CertificateKind, CertificateReport, Evidence, Verdict};

pub const GGR_TRIALS: usize = 50;

/// Generic global rigidity by random stress rank, behind the
/// `(d+1)`-connectivity gate.
///
/// Trial `t` draws a configuration from `trial_rng(seed, t)`, takes a
/// Gaussian combination of the stress basis and records its rank. The
/// run stops at the first trial reaching `n - d - 1`.
pub fn ggr_test<T: Real>(
    g: &Graph,
    d: usize,
    trials: usize,
    seed: u64,
    policy: &TolerancePolicy<T>,
) -> Result<CertificateReport> {
    let n = g.num_vertices();
    if d == 0 || n < d + 2 {
        return Err(Error::invalid(format!("need d >= 1 and n >= d+2, got n={n}, d={d}")));
    }
    let target = n - d - 1;
    let mut report = CertificateReport::new(CertificateKind::Ggr, seed, policy);
    report.target = Some(target as i64);

    let connectivity = g.vertex_connectivity()?;
    report.observe("connectivity", connectivity as i64);
    if connectivity < d + 1 {
        report.caveat = Caveat::CertifiedGeneric;
        report.evidence.push(
            Evidence::new(0)
                .with("connectivity", connectivity as f64)
                .note(format!("graph is not {}-connected", d + 1)),
        );
        return Ok(report);
    }

    let mut best = 0usize;
    for t in 0..trials {
        let mut r = rng::trial_rng(seed, t as u64);
        let f = Framework::<T>::random(g.clone(), d, &mut r);
        let space = stresses::stress_space(&f, policy)?;
        let rank = if space.is_empty() {
            0
        } else {
            let coeffs = rng::gaussian_vector::<T, _>(&mut r, space.dim());
            let omega = StressVector(space.matrix() * coeffs);
            stresses::to_matrix(g, &omega)?.rank(policy)?
        };
        best = best.max(rank);
        report.trials = t + 1;
        report.evidence.push(
            Evidence::new(t)
                .with("stress_space_dim", space.dim() as f64)
                .with("stress_rank", rank as f64),
        );
        if rank == target {
            report.verdict = Verdict::Yes;
            break;
        }
    }
    report.observe("max_stress_rank", best as i64);
    Ok(report)
}
