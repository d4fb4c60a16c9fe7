mod common;

use eqstress::constructions::{random_weights, rubber_band_readoff, rubber_band_stress, RubberBandInput};
use eqstress::frameworks::{maxwell_index, Framework};
use eqstress::linalg::{self, TolerancePolicy};
use eqstress::stresses::{self, StressVector};
use eqstress::{rng, Graph, TolerancePolicy64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn p() -> TolerancePolicy64 {
    TolerancePolicy64::default()
}

fn random_graph(n: usize, mask: u64) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let edges = pairs.into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e);
    Graph::new(n, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_rank(rows in 2usize..8, cols in 2usize..8, inner in 1usize..8, seed in any::<u64>()) {
        let mut r = rng::trial_rng(seed, 0);
        let a = rng::gaussian_matrix::<f64, _>(&mut r, rows, inner);
        let b = rng::gaussian_matrix::<f64, _>(&mut r, inner, cols);
        let m = a * b;
        let rank = linalg::numeric_rank(&m, &p()).unwrap();
        prop_assert_eq!(rank, inner.min(rows).min(cols));
        prop_assert_eq!(rank, common::rank(&m));
    }

    #[test]
    fn kernel_complements_rank(rows in 1usize..7, cols in 1usize..7, inner in 1usize..5, seed in any::<u64>()) {
        let mut r = rng::trial_rng(seed, 1);
        let m = rng::gaussian_matrix::<f64, _>(&mut r, rows, inner) * rng::gaussian_matrix::<f64, _>(&mut r, inner, cols);
        let k = linalg::kernel_basis(&m, &p()).unwrap();
        prop_assert_eq!(k.dim() + linalg::numeric_rank(&m, &p()).unwrap(), cols);
        if !k.is_empty() {
            prop_assert!((&m * k.matrix()).amax() <= 1e-9 * m.amax().max(1.0));
            prop_assert!(k.orthonormality_defect() <= 1e-10);
        }
        let c = linalg::cokernel_basis(&m, &p()).unwrap();
        if !c.is_empty() {
            prop_assert!((m.transpose() * c.matrix()).amax() <= 1e-9 * m.amax().max(1.0));
        }
    }

    #[test]
    fn maxwell_identity(n in 3usize..8, d in 1usize..4, mask in any::<u64>(), seed in any::<u64>()) {
        prop_assume!(n > d);
        let g = random_graph(n, mask);
        let mut r = rng::trial_rng(seed, 2);
        let f = Framework::<f64>::random(g.clone(), d, &mut r);
        let rank = f.rigidity_rank(&p()).unwrap();
        prop_assert_eq!(rank, common::rank(&common::rigidity_matrix(&g, f.coords())));
        let stresses = f.stress_count(&p()).unwrap() as i64;
        let flexes = (d * n - rank) as i64 - (d * (d + 1) / 2) as i64;
        prop_assert_eq!(stresses - flexes, maxwell_index(&g, d));
        prop_assert_eq!(maxwell_index(&g, d), common::maxwell(n, g.num_edges(), d));
    }

    #[test]
    fn trivial_motions_are_flexes(n in 2usize..8, d in 1usize..4, mask in any::<u64>(), seed in any::<u64>()) {
        let g = random_graph(n, mask);
        let mut r = rng::trial_rng(seed, 3);
        let f = Framework::<f64>::random(g, d, &mut r);
        let t = f.trivial_motions();
        prop_assert_eq!(t.ncols(), d * (d + 1) / 2);
        if f.graph().num_edges() > 0 {
            let scale = f.coords().amax().max(1.0);
            prop_assert!((f.rigidity_matrix() * t).amax() <= 1e-12 * scale * scale);
        }
    }

    #[test]
    fn stress_space_elements_are_stresses(n in 4usize..8, mask in any::<u64>(), seed in any::<u64>()) {
        let g = random_graph(n, mask);
        let mut r = rng::trial_rng(seed, 4);
        let f = Framework::<f64>::random(g.clone(), 2, &mut r);
        let space = stresses::stress_space(&f, &p()).unwrap();
        prop_assume!(!space.is_empty());
        let w = space.matrix() * rng::gaussian_vector::<f64, _>(&mut r, space.dim());
        let omega = stresses::to_matrix(&g, &StressVector(w.clone())).unwrap();
        prop_assert!(omega.validate(&g, &p()).is_ok());
        prop_assert!(stresses::is_stress_of(&f, &omega, &p()).unwrap());
        prop_assert!((omega.matrix() - common::stress_matrix(&g, &w)).amax() <= 1e-15);
        prop_assert!((omega.to_stress_vector(&g).0 - w).amax() <= 1e-15);
    }

    #[test]
    fn gale_route_matches_enumeration(k in 4usize..7, d in 1usize..3, seed in any::<u64>()) {
        prop_assume!(k >= d + 2);
        let g = Graph::complete(k);
        let mut r = rng::trial_rng(seed, 5);
        let f = Framework::<f64>::random(g.clone(), d, &mut r);
        let space = stresses::stress_space(&f, &p()).unwrap();
        let w = space.matrix() * rng::gaussian_vector::<f64, _>(&mut r, space.dim());
        let omega = stresses::to_matrix(&g, &StressVector(w.clone())).unwrap();
        let class = stresses::classify(&g, &omega, d, &p()).unwrap();
        prop_assert_eq!(class.is_gstress, common::brute_force_gstress(omega.matrix(), d));
    }

    #[test]
    fn wheel_round_trip(seed in any::<u64>()) {
        let g = Graph::wheel(5).unwrap();
        let mut r = rng::trial_rng(seed, 6);
        let w = random_weights::<f64, _>(&mut r, 7);
        let input = RubberBandInput::new(g.clone(), 2, &[0, 1, 2], w.clone()).unwrap();
        let out = rubber_band_stress(&input, &p()).unwrap();
        prop_assert!(stresses::is_stress_of(&out.framework, &out.stress, &p()).unwrap());
        let back = rubber_band_readoff(&g, &out.stress, &[0, 1, 2], &p()).unwrap();
        prop_assert!((back - w).amax() <= 1e-9);
    }

    #[test]
    fn single_precision_agrees(n in 4usize..7, seed in any::<u64>()) {
        let g = Graph::complete(n);
        let mut r = rng::trial_rng(seed, 7);
        let f64s = Framework::<f64>::random(g.clone(), 2, &mut r);
        let coords32: DMatrix<f32> = f64s.coords().map(|x| x as f32);
        let f32s = Framework::new(g, 2, coords32).unwrap();
        prop_assert_eq!(
            f32s.rigidity_rank(&TolerancePolicy::<f32>::default()).unwrap(),
            f64s.rigidity_rank(&p()).unwrap()
        );
    }
}
