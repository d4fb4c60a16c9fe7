//! Verdicts backed by recorded numerical evidence.
//!
//! "Generic" configurations are stood in for by seeded pseudo-random
//! reals, so sampled verdicts carry [`Caveat::Probabilistic`]. Every
//! report records the seed and tolerances needed to re-run it.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::TolerancePolicy;
use crate::Real;

mod corank;
mod ggr;
mod probe;
mod universal;

pub use corank::{corank_stats, gstressable_dimension, CORANK_SAMPLES};
pub use ggr::{ggr_test, GGR_TRIALS};
pub use probe::{
    dimension_probe, gor_tangent_count, lss_tangent_rank, ProbeRoute, FD_REL_TOL, FD_STEP,
    PROBE_POINTS,
};
pub use universal::{
    construct_universally_rigid, nearest_stress, perturbation_test, super_stable,
    super_stable_report, UniversalCertificate, UR_RETRY_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Yes: a trial produced a stress of rank `n - d - 1`.
    Ggr,
    /// Yes: PSD stress of rank `n - d - 1`, edge directions off every
    /// conic at infinity.
    SuperStable,
    /// Yes: sampled stressed corank equals sampled corank.
    CorankStats,
    /// Yes: every probed Jacobian rank equals the target.
    DimensionProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Caveat {
    /// Decided without sampling (e.g. by the connectivity gate).
    CertifiedGeneric,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceRecord {
    pub rel_tol: f64,
    pub abs_floor: f64,
}

impl<T: Real> From<&TolerancePolicy<T>> for ToleranceRecord {
    fn from(p: &TolerancePolicy<T>) -> Self {
        Self {
            rel_tol: p.rel_tol_f64(),
            abs_floor: p.abs_floor_f64(),
        }
    }
}

/// Per-trial numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub trial: usize,
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Evidence {
    pub fn new(trial: usize) -> Self {
        Self {
            trial,
            values: BTreeMap::new(),
            note: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub kind: CertificateKind,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<i64>,
    pub observed: BTreeMap<String, i64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: ToleranceRecord,
    pub caveat: Caveat,
    pub evidence: Vec<Evidence>,
}

impl CertificateReport {
    pub(crate) fn new<T: Real>(kind: CertificateKind, seed: u64, policy: &TolerancePolicy<T>) -> Self {
        Self {
            kind,
            verdict: Verdict::No,
            target: None,
            observed: BTreeMap::new(),
            trials: 0,
            seed,
            tolerance: policy.into(),
            caveat: Caveat::Probabilistic,
            evidence: Vec::new(),
        }
    }

    pub(crate) fn observe(&mut self, key: &str, value: i64) {
        self.observed.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
