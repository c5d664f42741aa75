mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use sqzsim_core::gaussian::{PHYSICALITY_TOL, SYMPLECTIC_TOL};
use sqzsim_core::{GaussianChannel, GaussianState};

proptest! {
    #[test]
    fn lossless_operations_are_symplectic(
        n in 2usize..5,
        r in 0.0..2.0f64,
        phase in -PI..PI,
        ratio in 0.0..=1.0f64,
        theta in -PI..PI,
    ) {
        let channels = [
            GaussianChannel::squeezer(n, n - 1, r, phase).unwrap(),
            GaussianChannel::phase_shift(n, 0, theta).unwrap(),
            GaussianChannel::coupler(n, 0, n - 1, ratio).unwrap(),
        ];
        for ch in &channels {
            prop_assert!(ch.symplectic_defect() <= SYMPLECTIC_TOL);
            prop_assert!(ch.is_symplectic());
        }
        let composed = channels[0].then(&channels[1]).unwrap().then(&channels[2]).unwrap();
        prop_assert!(composed.symplectic_defect() <= SYMPLECTIC_TOL);
    }

    #[test]
    fn loss_channels_are_completely_positive(eta in 0.0..=1.0f64, n in 1usize..4) {
        let ch = GaussianChannel::loss(n, n - 1, eta).unwrap();
        prop_assert!(ch.complete_positivity_min_eigenvalue() >= -PHYSICALITY_TOL);
    }

    #[test]
    fn generated_states_respect_uncertainty(state in common::state(4, 2.0)) {
        prop_assert!(state.uncertainty_min_eigenvalue() >= -PHYSICALITY_TOL);
        let cov = state.cov();
        prop_assert!((cov - cov.transpose()).amax() <= 1e-12 * cov.amax().max(1.0));
        // squeezed vacuum never acquires a displacement
        prop_assert!(state.mean().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn quadrature_variance_has_period_pi(state in common::state(3, 1.5), theta in -10.0..10.0f64) {
        for mode in 0..state.n_modes() {
            let a = state.quadrature_variance(mode, theta).unwrap();
            let b = state.quadrature_variance(mode, theta + PI).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn loss_equals_coupler_with_traced_ancilla(
        state in common::state(3, 1.5),
        mode_pick in 0usize..3,
        eta in 0.0..=1.0f64,
    ) {
        let mode = mode_pick % state.n_modes();
        let direct = state.apply_loss(mode, eta).unwrap();
        let ancilla = state.n_modes();
        let dilated = state
            .with_vacuum_modes(1)
            .apply_coupler(mode, ancilla, eta)
            .unwrap()
            .discard_mode(ancilla)
            .unwrap();
        prop_assert!((direct.cov() - dilated.cov()).amax() <= 1e-12);
        prop_assert!((direct.mean() - dilated.mean()).amax() <= 1e-12);
    }
}

#[test]
fn coupler_conserves_photon_number() {
    let state = GaussianState::vacuum(3)
        .unwrap()
        .apply_squeezer(0, 0.9, 0.2)
        .unwrap()
        .apply_squeezer(2, 0.4, -1.0)
        .unwrap();
    for ratio in [0.0, 0.1, 0.5, 0.77, 1.0] {
        let out = state.apply_coupler(0, 2, ratio).unwrap();
        let before = state.photon_number(&[0, 2]).unwrap();
        let after = out.photon_number(&[0, 2]).unwrap();
        assert!((before - after).abs() <= 1e-10);
    }
}
