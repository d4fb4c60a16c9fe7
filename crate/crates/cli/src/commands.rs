use std::fs;
use std::path::Path;

use eqstress::certificates::{self, ProbeRoute};
use eqstress::constructions::{self, RubberBandInput};
use eqstress::frameworks::{maxwell_index, trivial_motion_dim};
use eqstress::linalg::{self, TolerancePolicy};
use eqstress::stresses::{self, StressVector};
use eqstress::{io, rng, statics, Error, Framework64, Graph, Result};
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::output::Artifacts;
use crate::{Route, RunConfig};

type Policy = TolerancePolicy<f64>;

fn tolerance(policy: &Policy) -> Value {
    json!({ "rel_tol": policy.rel_tol, "abs_floor": policy.abs_floor })
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report serializes")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn analyze(path: &Path, policy: &Policy) -> Result<Artifacts> {
    let f: Framework64 = io::load_framework(path)?;
    let g = f.graph();
    let d = f.dim();
    let n = f.num_vertices();
    let space = stresses::stress_space(&f, policy)?;
    let mut basis = Vec::with_capacity(space.dim());
    for v in space.vectors() {
        let omega = stresses::to_matrix(g, &StressVector(v.clone()))?;
        let class = if n >= d + 2 {
            to_value(&stresses::classify(g, &omega, d, policy)?)
        } else {
            Value::Null
        };
        basis.push(json!({ "weights": v.as_slice(), "class": class }));
    }
    let report = json!({
        "command": "analyze",
        "num_vertices": n,
        "num_edges": g.num_edges(),
        "dim": d,
        "affine_span_dim": f.affine_span_dim(policy)?,
        "rigidity_rank": f.rigidity_rank(policy)?,
        "maxwell_index": maxwell_index(g, d),
        "stress_space_dim": space.dim(),
        "infinitesimally_rigid": f.infinitesimally_rigid(policy).ok(),
        "affine_general_position": to_value(&f.affine_general_position(policy)?),
        "neighborhood_spans": f.neighborhood_spans(policy)?,
        "neighborhood_span_flags": f.neighborhood_span_flags(policy)?,
        "on_conic_at_infinity": f.on_conic_at_infinity(policy)?,
        "stresses": basis,
        "tolerance": tolerance(policy),
    });
    Ok(Artifacts::report(report))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightsFile {
    Plain(Vec<f64>),
    WithClique { clique: Option<Vec<usize>>, weights: Vec<f64> },
}

pub fn rubber_band(
    graph: &str,
    dim: usize,
    weights: Option<&Path>,
    run: &RunConfig,
    policy: &Policy,
) -> Result<Artifacts> {
    let g = io::load_graph(graph)?;
    let (clique, w) = match weights {
        Some(path) => {
            let file: WeightsFile = serde_json::from_str(&read(path)?)
                .map_err(|e| Error::InvalidInput(format!("malformed weights JSON: {e}")))?;
            match file {
                WeightsFile::Plain(w) => (None, w),
                WeightsFile::WithClique { clique, weights } => (clique, weights),
            }
        }
        None => {
            let count = g.num_edges().saturating_sub(trivial_motion_dim(dim));
            let mut r = rng::trial_rng(run.seed, 0);
            let w = constructions::random_weights::<f64, _>(&mut r, count);
            (None, w.iter().copied().collect())
        }
    };
    let w = DVector::from_vec(w);
    let input = match clique {
        Some(h) => RubberBandInput::new(g.clone(), dim, &h, w)?,
        None => RubberBandInput::with_first_clique(g.clone(), dim, w)?,
    };
    let out = constructions::rubber_band_stress(&input, policy)?;
    let report = json!({
        "command": "rubber-band",
        "seed": run.seed,
        "random_weights": weights.is_none(),
        "dim": dim,
        "clique": input.clique(),
        "free_weights": input.weights().as_slice(),
        "weights": out.weights.0.as_slice(),
        "class": to_value(&out.class),
        "condition": out.condition,
        "equilibrium_residual": stresses::equilibrium_residual(&out.framework, &out.stress),
        "tolerance": tolerance(policy),
    });
    Ok(Artifacts {
        report,
        stress: Some(out.stress),
        framework: Some(out.framework),
    })
}

pub fn gor(graph: &str, dim: usize, signature: Option<&str>, run: &RunConfig, policy: &Policy) -> Result<Artifacts> {
    let g = io::load_graph(graph)?;
    let n = g.num_vertices();
    if n < dim + 2 {
        return Err(Error::InvalidInput(format!("need n >= d+2 = {}", dim + 2)));
    }
    let sig = match signature {
        Some(s) => constructions::parse_signature(s)?,
        None => vec![1; n - dim - 1],
    };
    let rep = constructions::build_gor(&g, dim, &sig, run.seed, policy)?;
    let (alpha, centered) = constructions::center_gor(&g, &rep, run.seed, policy)?;
    let omega = constructions::lss_stress(&g, &centered, policy)?;
    let class = stresses::classify(&g, &omega, dim, policy)?;
    let (pos, neg, zero) = linalg::inertia(omega.matrix(), policy)?;
    let framework = stresses::kernel_framework(&g, &omega, dim, None, policy).ok();
    let signature_text: String = sig.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
    let report = json!({
        "command": "gor",
        "seed": run.seed,
        "dim": dim,
        "signature": signature_text,
        "orthogonality_defect": rep.orthogonality_defect(&g),
        "centering": alpha.0.as_slice(),
        "class": to_value(&class),
        "inertia": { "positive": pos, "negative": neg, "zero": zero },
        "kernel_framework": framework.is_some(),
        "tolerance": tolerance(policy),
    });
    Ok(Artifacts {
        report,
        stress: Some(omega),
        framework,
    })
}

pub fn ggr(graph: &str, dim: usize, run: &RunConfig, policy: &Policy) -> Result<Artifacts> {
    let g = io::load_graph(graph)?;
    let trials = run.trials.unwrap_or(certificates::GGR_TRIALS);
    let report = certificates::ggr_test(&g, dim, trials, run.seed, policy)?;
    Ok(Artifacts::report(to_value(&report)))
}

pub fn certify_ur(graph: &str, dim: usize, run: &RunConfig, policy: &Policy) -> Result<Artifacts> {
    let g: Graph = io::load_graph(graph)?;
    let retries = run.trials.unwrap_or(certificates::UR_RETRY_CAP);
    let cert = certificates::construct_universally_rigid(&g, dim, run.seed, retries, policy)?;
    let (passes, _) = certificates::perturbation_test(&cert.framework, &cert.stress, 1e-6, 20, run.seed, policy)?;
    let mut report = to_value(&cert.report);
    report["observed"]["perturbation_passes"] = json!(passes);
    report["observed"]["ggr_trials"] = json!(cert.ggr.trials);
    Ok(Artifacts {
        report,
        stress: Some(cert.stress),
        framework: Some(cert.framework),
    })
}

pub fn corank(graph: &str, dim: usize, run: &RunConfig, policy: &Policy) -> Result<Artifacts> {
    let g = io::load_graph(graph)?;
    let samples = run.trials.unwrap_or(certificates::CORANK_SAMPLES);
    let report = certificates::corank_stats(&g, dim, samples, run.seed, policy)?;
    Ok(Artifacts::report(to_value(&report)))
}

pub fn probe_dim(graph: &str, dim: usize, route: Route, run: &RunConfig, policy: &Policy) -> Result<Artifacts> {
    let g = io::load_graph(graph)?;
    let points = run.trials.unwrap_or(certificates::PROBE_POINTS);
    let route = match route {
        Route::Auto => ProbeRoute::Auto,
        Route::RubberBand => ProbeRoute::RubberBand,
        Route::Lss => ProbeRoute::Lss,
    };
    let report = certificates::dimension_probe(&g, dim, points, run.seed, route, policy)?;
    Ok(Artifacts::report(to_value(&report)))
}

pub fn statics(framework: &Path, load: &Path, policy: &Policy) -> Result<Artifacts> {
    let f: Framework64 = io::load_framework(framework)?;
    let load = io::parse_load_json::<f64>(&read(load)?, f.dim())?;
    if load.num_vertices() != f.num_vertices() {
        return Err(Error::InvalidInput(format!(
            "load has {} forces for {} vertices",
            load.num_vertices(),
            f.num_vertices()
        )));
    }
    let resolution = statics::resolve_load(&f, &load, policy)?;
    let report = json!({
        "command": "statics",
        "statically_rigid": statics::statically_rigid(&f, policy)?,
        "equilibrium_load_space_dim": statics::equilibrium_load_space_dim(f.coords(), policy)?,
        "weights": resolution.weights.as_slice(),
        "residual": resolution.residual,
        "tolerance": tolerance(policy),
    });
    Ok(Artifacts::report(report))
}
