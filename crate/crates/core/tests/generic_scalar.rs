//! The core is generic over the real scalar; run a reduced pipeline in `f32`.

use rdmlab::conditions;
use rdmlab::correlation::{self, TrialState};
use rdmlab::fock::{self, FockBasis, FockOperator};
use rdmlab::rdm;

#[test]
fn car_in_single_precision() {
    let b = FockBasis::new(4).unwrap();
    let id = FockOperator::<f32>::identity(&b);
    for i in 0..4 {
        let c = fock::annihilation::<f32>(i, &b).unwrap();
        let cs = fock::creation::<f32>(i, &b).unwrap();
        assert_eq!(c.anticommutator(&cs).max_abs_diff(&id), 0.0);
    }
}

#[test]
fn conditions_and_chain_in_single_precision() {
    let b = FockBasis::new(5).unwrap();
    for seed in 0..5 {
        let rho = correlation::trial_state::<f32>(&b, 2, TrialState::Mixed, seed).unwrap();
        let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
        assert!((g.trace() - 2.0).abs() < 1e-5);
        let d = conditions::evaluate_conditions(&g, &gg, 2, 1e-4);
        assert!(d.report.pass, "{d:?}");
        let x = correlation::random_projection::<f32>(5, 2, seed).unwrap();
        let r = correlation::main_theorem_check(&x, &g, &gg, 1e-4).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
