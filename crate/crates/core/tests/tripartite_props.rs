mod common;

use common::{fully_separable_tri, ginibre_state, rng};
use proptest::prelude::*;
use realign::matsub::{frobenius_norm, hermitian_spectrum};
use realign::tripartite::{classify, realign3, realign3_via_q, realignment_cut_check, spa_pt, Classification, Qubit};
use realign::DimensionSignature;

const TRI: DimensionSignature = DimensionSignature::Tripartite;

#[test]
fn permutation_route_matches_block_realignment() {
    let mut r = rng(31);
    for _ in 0..200 {
        let rho = ginibre_state(TRI, &mut r);
        let a = realign3(&rho).unwrap();
        let b = realign3_via_q(&rho).unwrap();
        assert!(a.matrix().max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn fully_separable_mixtures_pass_every_cut() {
    let mut r = rng(32);
    for _ in 0..200 {
        let rho = fully_separable_tri(&mut r);
        let c = classify(&rho).unwrap();
        assert_eq!(c.classification, Classification::Inconclusive);
        assert!(c.cuts.iter().all(|v| v.biseparable_consistent));
    }
}

#[test]
fn spa_pt_is_a_state() {
    let mut r = rng(33);
    for _ in 0..200 {
        let rho = ginibre_state(TRI, &mut r);
        for q in Qubit::ALL {
            let s = spa_pt(&rho, q).unwrap();
            assert!(hermitian_spectrum(&s).unwrap().min() >= -1e-10);
            assert!((s.trace().re - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realign3_preserves_frobenius_norm(seed in any::<u64>()) {
        let rho = ginibre_state(TRI, &mut rng(seed));
        let r = realign3(&rho).unwrap();
        prop_assert!((frobenius_norm(r.matrix()) - frobenius_norm(rho.matrix())).abs() < 1e-12);
    }

    #[test]
    fn cut_lhs_respects_weyl_chain(seed in any::<u64>()) {
        let rho = ginibre_state(TRI, &mut rng(seed));
        let r = realign3(&rho).unwrap();
        for q in Qubit::ALL {
            let v = realignment_cut_check(&rho, q).unwrap();
            let spa_min = hermitian_spectrum(&spa_pt(&rho, q).unwrap()).unwrap().min();
            prop_assert!(v.lhs >= r.gram_min_eig() + spa_min - 1e-10);
        }
    }
}
