//! Gaussian covariance model checked against the truncated Fock-space oracle.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use sqzsim_core::fock::DEFAULT_N_MAX;
use sqzsim_core::{FockState, GaussianState};

fn gaussian_variance(r: f64, eta: f64, theta: f64) -> f64 {
    GaussianState::vacuum(1)
        .unwrap()
        .apply_squeezer(0, r, 0.0)
        .unwrap()
        .apply_loss(0, eta)
        .unwrap()
        .quadrature_variance(0, theta)
        .unwrap()
}

fn fock_variance(r: f64, eta: f64, theta: f64, n_max: usize) -> f64 {
    FockState::squeezed_vacuum(r, n_max)
        .unwrap()
        .apply_loss(eta)
        .unwrap()
        .quadrature_variance(theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // At the default cutoff the agreement holds to 1e-6 up to r = 0.9.
    #[test]
    fn agrees_at_default_cutoff(r in 0.0..=0.9f64, eta in 0.3..=1.0f64, theta in 0.0..2.0 * PI) {
        let g = gaussian_variance(r, eta, theta);
        let f = fock_variance(r, eta, theta, DEFAULT_N_MAX);
        prop_assert!((g - f).abs() <= 1e-6, "gaussian {g} fock {f}");
    }

    #[test]
    fn agrees_up_to_r_one_with_larger_cutoff(r in 0.0..=1.0f64, eta in 0.3..=1.0f64, theta in 0.0..2.0 * PI) {
        let g = gaussian_variance(r, eta, theta);
        let f = fock_variance(r, eta, theta, 80);
        prop_assert!((g - f).abs() <= 1e-6, "gaussian {g} fock {f}");
    }

    #[test]
    fn truncation_converges(r in 0.0..=0.75f64, theta in 0.0..PI) {
        let coarse = fock_variance(r, 1.0, theta, 50);
        let fine = fock_variance(r, 1.0, theta, 60);
        prop_assert!((coarse - fine).abs() < 1e-8);
    }

    #[test]
    fn losses_compose(r in 0.0..=1.0f64, eta1 in 0.0..=1.0f64, eta2 in 0.0..=1.0f64) {
        let s = FockState::squeezed_vacuum(r, DEFAULT_N_MAX).unwrap();
        let twice = s.apply_loss(eta1).unwrap().apply_loss(eta2).unwrap();
        let once = s.apply_loss(eta1 * eta2).unwrap();
        let diff = (twice.density_matrix() - once.density_matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(diff <= 1e-9);
    }
}

#[test]
fn lossy_oracle_state_stays_physical() {
    let s = FockState::squeezed_vacuum(1.0, DEFAULT_N_MAX).unwrap();
    assert!(s.trace() >= 1.0 - 1e-8);
    let lossy = s.apply_loss(0.45).unwrap();
    assert!(lossy.trace() <= 1.0 + 1e-12 && lossy.trace() >= 1.0 - 1e-6);
    assert!(lossy.hermiticity_defect() <= 1e-12);
    assert!(lossy.min_eigenvalue() >= -1e-9);
}

/// The default cutoff is too coarse for the antisqueezed quadrature at r = 1:
/// missing tail moments shift the variance by about 2e-6.
#[test]
fn default_cutoff_truncation_error_at_r_one() {
    let exact = (2.0f64).exp();
    let at_60 = fock_variance(1.0, 1.0, FRAC_PI_2, 60);
    let at_80 = fock_variance(1.0, 1.0, FRAC_PI_2, 80);
    assert!((at_60 - exact).abs() > 1e-6);
    assert!((at_80 - exact).abs() < 1e-6);
}
