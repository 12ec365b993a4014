use proptest::prelude::*;
use rdmlab::conditions::{self, Polynomial2};
use rdmlab::fock::{self, FockBasis};
use rdmlab::linalg::{self, CVec};
use rdmlab::rdm;
use rdmlab::rng::{self, Purpose};
use rdmlab::states::{self, DensityMatrix};

fn representable(n: usize, particles: usize, kind: u8, seed: u64) -> DensityMatrix<f64> {
    let b = FockBasis::new(n).unwrap();
    match kind % 3 {
        0 => states::pure_state(&states::random_pure(&b, particles, seed).unwrap()).unwrap(),
        1 => states::random_mixed(&b, particles, b.sector_dim(particles).min(3), seed).unwrap(),
        _ => {
            let u = rng::haar_isometry::<f64, _>(n, particles, &mut rng::stream(seed, Purpose::Orbitals));
            let orb: Vec<Vec<_>> = (0..particles).map(|j| u.column(j).iter().copied().collect()).collect();
            states::pure_state(&fock::slater_state(&orb, &b).unwrap()).unwrap()
        }
    }
}

fn params() -> impl Strategy<Value = (usize, usize, u8, u64)> {
    prop_oneof![Just(3usize), Just(4), Just(5)].prop_flat_map(|n| (Just(n), 1..n, any::<u8>(), any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn representable_states_satisfy_all_conditions((n, p, kind, seed) in params()) {
        let rho = representable(n, p, kind, seed);
        let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
        let d = conditions::evaluate_conditions(&g, &gg, p, 1e-9);
        prop_assert!(d.report.pass, "{:?}", d);
    }

    #[test]
    fn g_form_equals_quadratic_form((n, p, kind, seed) in params()) {
        let rho = representable(n, p, kind, seed);
        let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
        let m = conditions::g_condition_matrix(&g, &gg);
        let mut r = rng::stream(seed, Purpose::Operator);
        for _ in 0..10 {
            let a = rng::complex_matrix::<f64, _>(n, n, &mut r);
            let v = CVec::from_fn(n * n, |i, _| a[(i / n, i % n)]);
            let quad = v.dotc(&(&m * &v)).re;
            let direct = conditions::g_form(&a, &g, &gg);
            prop_assert!((quad - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn sector_cross_terms_vanish((n, p, kind, seed) in params()) {
        let rho = representable(n, p, kind, seed);
        let poly = Polynomial2::random(n, seed);
        let d = conditions::polynomial_sector_decomposition(&rho, &poly).unwrap();
        prop_assert!(d.cross_max < 1e-11);
        prop_assert!(d.residual() < 1e-11 * d.total.abs().max(1.0));
        prop_assert!(d.total >= -1e-11);
    }

    #[test]
    fn g_implies_symmetrized_g((n, p, kind, seed) in params()) {
        let rho = representable(n, p, kind, seed);
        let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
        let mut r = rng::stream(seed, Purpose::Operator);
        let samples: Vec<_> = (0..10).map(|_| linalg::hermitian_part(&rng::complex_matrix::<f64, _>(n, n, &mut r))).collect();
        prop_assert!(conditions::symmetrized_g_check(&g, &gg, &samples) >= -1e-10);
    }

    #[test]
    fn polynomials_agree_with_conditions_on_signed_states(seed in any::<u64>(), p in 1usize..4) {
        let b = FockBasis::new(4).unwrap();
        let rho = states::signed_trace_one::<f64>(&b, p, seed).unwrap();
        let c = conditions::representability_check(&rho, 30, seed, 1e-9).unwrap();
        prop_assert!(c.agree(), "{:?}", c);
        prop_assert!(!c.contradiction());
    }
}

#[test]
fn vacuum_and_full_states() {
    for n in 2..=5 {
        let b = FockBasis::new(n).unwrap();
        let vac = states::pure_state(&states::StateVector::<f64>::vacuum(&b)).unwrap();
        let (g, gg) = (rdm::one_pdm(&vac), rdm::two_pdm(&vac));
        assert!(conditions::evaluate_conditions(&g, &gg, 0, 1e-12).report.pass);
        let full = representable(n, n, 2, 1);
        let (g, gg) = (rdm::one_pdm(&full), rdm::two_pdm(&full));
        let d = conditions::evaluate_conditions(&g, &gg, n, 1e-10);
        assert!(d.report.pass);
        assert!(d.report.g_min_eig.abs() < 1e-10);
    }
}

#[test]
fn identity_operator_is_a_g_zero_mode() {
    // N(N − 1) + N − N² = 0 for any fixed particle number
    let rho = representable(4, 2, 0, 9);
    let (g, gg) = (rdm::one_pdm(&rho), rdm::two_pdm(&rho));
    let id = linalg::identity::<f64>(4);
    assert!(conditions::g_form(&id, &g, &gg).abs() < 1e-12);
}
