mod common;

use common::{ginibre_state, isotropic, random_product, rng, sq};
use proptest::prelude::*;
use realign::bipartite::{
    first_moment, partial_transpose, realign, realign_via_swap, swap_operator, swap_pt, Subsystem,
};
use realign::matsub::{frobenius_norm, trace_norm};
use realign::ComplexMatrix;

#[test]
fn swap_then_partial_transpose_matches_block_realignment() {
    for d in [2, 3] {
        let mut r = rng(100 + d as u64);
        for _ in 0..200 {
            let rho = ginibre_state(sq(d), &mut r);
            let a = realign(&rho).unwrap();
            let b = realign_via_swap(&rho).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }
}

#[test]
fn swap_identities_hold_exactly() {
    for d in [2, 3, 4] {
        let p = swap_operator(d).unwrap();
        let ppt = swap_pt(d).unwrap();
        let n = d * d;
        assert_eq!(p.matrix().matmul(p.matrix()).unwrap(), ComplexMatrix::identity(n));
        assert_eq!(p.matrix().trace().re, d as f64);
        assert_eq!(ppt.trace().re, d as f64);
        assert_eq!(p.matrix().matmul(&ppt).unwrap(), ppt);
    }
}

#[test]
fn isotropic_states_saturate_trace_norm() {
    for d in [2, 3] {
        for i in 0..=20 {
            let rho = isotropic(d, i as f64 / 20.0);
            let t1 = first_moment(&rho).unwrap();
            assert!((t1 - realign(&rho).unwrap().trace_norm()).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realigned_trace_is_first_moment(seed in any::<u64>(), d in 2usize..=3) {
        let rho = ginibre_state(sq(d), &mut rng(seed));
        let tr = realign(&rho).unwrap().matrix().trace();
        prop_assert!((tr.re - first_moment(&rho).unwrap()).abs() < 1e-12);
        prop_assert!(tr.im.abs() < 1e-12);
    }

    #[test]
    fn realignment_preserves_frobenius_norm(seed in any::<u64>(), m in 2usize..=3, n in 2usize..=3) {
        let dims = realign::DimensionSignature::bipartite(m, n).unwrap();
        let rho = ginibre_state(dims, &mut rng(seed));
        let r = realign(&rho).unwrap();
        prop_assert!((frobenius_norm(r.matrix()) - frobenius_norm(rho.matrix())).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_norm_bounds_first_moment(seed in any::<u64>(), d in 2usize..=3) {
        let rho = ginibre_state(sq(d), &mut rng(seed));
        let pt = trace_norm(&partial_transpose(&rho, Subsystem::B).unwrap());
        let t1 = first_moment(&rho).unwrap();
        prop_assert!(pt >= t1 / (d * d) as f64 - 1e-10);
    }

    #[test]
    fn product_states_realign_to_purity_product(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let a = common::noisy_pure(d, &mut r);
        let b = common::noisy_pure(d, &mut r);
        let rho = realign::states::product_state(&a, &b).unwrap();
        let norm = realign(&rho).unwrap().trace_norm();
        prop_assert!((norm - frobenius_norm(&a) * frobenius_norm(&b)).abs() < 1e-10);
        prop_assert!(norm <= 1.0 + 1e-10);
    }

    #[test]
    fn random_products_stay_inside_ccnr(seed in any::<u64>(), d in 2usize..=3) {
        let rho = random_product(d, &mut rng(seed));
        prop_assert!(realign(&rho).unwrap().trace_norm() <= 1.0 + 1e-10);
    }
}
