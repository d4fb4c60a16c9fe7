mod common;

use eqstress::certificates::{self, super_stable};
use eqstress::constructions::rubber_band_readoff;
use eqstress::frameworks::Framework;
use eqstress::stresses::{self, kernel_framework, StressMatrix};
use eqstress::{io, Graph, TolerancePolicy64};
use nalgebra::{DMatrix, DVector};

fn p() -> TolerancePolicy64 {
    TolerancePolicy64::default()
}

fn square() -> Framework<f64> {
    let coords = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    Framework::new(Graph::complete(4), 2, coords).unwrap()
}

fn square_stress() -> StressMatrix<f64> {
    let u = DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]);
    StressMatrix::from_matrix(&u * u.transpose()).unwrap()
}

#[test]
fn square_stress_end_to_end() {
    let f = square();
    let g = f.graph().clone();
    let omega = square_stress();
    assert!(stresses::is_stress_of(&f, &omega, &p()).unwrap());
    assert_eq!(
        omega.to_stress_vector(&g).0.as_slice(),
        &[1.0, 1.0, -1.0, -1.0, 1.0, 1.0]
    );
    let class = stresses::classify(&g, &omega, 2, &p()).unwrap();
    assert!(class.is_gstress && class.is_psd && class.rank == 1);
    assert!(common::brute_force_gstress(omega.matrix(), 2));
    assert!(super_stable(&f, &omega, &p()).unwrap());

    // the non-H entries of the matrix, negated
    let w = rubber_band_readoff(&g, &omega, &[0, 1, 2], &p()).unwrap();
    assert_eq!(w.as_slice(), &[-1.0, 1.0, 1.0]);

    // pinning 0, 1, 2 to the canonical simplex recovers the square
    let k = kernel_framework(&g, &omega, 2, Some(&[0, 1, 2]), &p()).unwrap();
    assert!((k.coords() - f.coords()).amax() < 1e-12);
}

#[test]
fn csv_round_trip_keeps_invariants() {
    let omega = square_stress();
    let back: StressMatrix<f64> = io::read_stress_csv(io::stress_to_csv(&omega).as_bytes()).unwrap();
    back.validate(&Graph::complete(4), &p()).unwrap();
    assert_eq!(back, omega);
}

#[test]
fn report_is_deterministic() {
    let g = Graph::builtin("builtin:prism3").unwrap();
    let a = certificates::corank_stats(&g, 2, 10, 5, &p()).unwrap().to_json();
    let b = certificates::corank_stats(&g, 2, 10, 5, &p()).unwrap().to_json();
    assert_eq!(a, b);
}

#[test]
fn complete_graphs_are_ggr() {
    for d in 1..=3 {
        for n in d + 2..=7 {
            let r = certificates::ggr_test(&Graph::complete(n), d, certificates::GGR_TRIALS, 1, &p()).unwrap();
            assert!(r.verdict.is_yes(), "K_{n} in dimension {d}");
        }
    }
}

#[test]
fn connectivity_gate_needs_no_sampling() {
    for (g, d) in [(Graph::cycle(6).unwrap(), 2), (Graph::path(5).unwrap(), 1), (Graph::wheel(5).unwrap(), 3)] {
        let r = certificates::ggr_test(&g, d, certificates::GGR_TRIALS, 1, &p()).unwrap();
        assert!(!r.verdict.is_yes());
        assert_eq!(r.trials, 0);
    }
}
