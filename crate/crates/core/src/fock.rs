//! Single-mode truncated Fock-space reference model.
//!
//! Brute-force density matrices used as an independent check on the Gaussian
//! model. Quadratures follow the same normalization,
//! `X_theta = a e^{-i theta} + a^dag e^{i theta}`, so the vacuum variance is 1.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const DEFAULT_N_MAX: usize = 60;
/// Largest squeezing accepted; beyond it the default cutoff leaks too much norm.
pub const MAX_SQUEEZING: f64 = 1.2;
/// Norm allowed to fall outside the truncated space.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_max: usize,
    rho: DMatrix<Complex64>,
}

fn binomial_table(n_max: usize) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut row = alloc::vec![1.0; n + 1];
        for k in 1..n {
            row[k] = table[n - 1][k - 1] + table[n - 1][k];
        }
        table.push(row);
    }
    table
}

impl FockState {
    pub fn vacuum(n_max: usize) -> Self {
        let mut rho = DMatrix::zeros(n_max + 1, n_max + 1);
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { n_max, rho }
    }

    /// Squeezed vacuum `S(r)|0>` with amplitudes
    /// `c_2n = (-tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r))`, squeezed along `x`.
    pub fn squeezed_vacuum(r: f64, n_max: usize) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!(
                "squeezing parameter r = {r} must be finite and >= 0"
            )));
        }
        if r > MAX_SQUEEZING {
            return Err(invalid(format!(
                "r = {r} exceeds {MAX_SQUEEZING}: truncated Fock model unreliable"
            )));
        }
        if r == 0.0 {
            return Ok(Self::vacuum(n_max));
        }
        let ln_tanh = libm::log(libm::tanh(r));
        let ln_norm = -0.5 * libm::log(libm::cosh(r));
        let mut amps = alloc::vec![0.0; n_max + 1];
        for n in 0..=n_max / 2 {
            let nf = n as f64;
            let ln_mag = ln_norm + nf * ln_tanh + 0.5 * libm::lgamma(2.0 * nf + 1.0)
                - libm::lgamma(nf + 1.0)
                - nf * core::f64::consts::LN_2;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            amps[2 * n] = sign * libm::exp(ln_mag);
        }
        let norm: f64 = amps.iter().map(|c| c * c).sum();
        let leakage = 1.0 - norm;
        if leakage > LEAKAGE_LIMIT {
            return Err(Error::Truncation {
                leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        let rho = DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| {
            Complex64::new(amps[i] * amps[j], 0.0)
        });
        Ok(Self { n_max, rho })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn density_matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn population(&self, n: usize) -> f64 {
        if n > self.n_max {
            0.0
        } else {
            self.rho[(n, n)].re
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        (0..=self.n_max)
            .map(|n| n as f64 * self.rho[(n, n)].re)
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// Pure-loss channel with Kraus operators
    /// `K_k |n> = sqrt(C(n,k)) eta^{(n-k)/2} (1-eta)^{k/2} |n-k>`.
    pub fn apply_loss(&self, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid(format!("loss efficiency {eta} outside [0, 1]")));
        }
        let dim = self.n_max + 1;
        let binom = binomial_table(self.n_max);
        let amp = libm::sqrt(eta);
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for n in 0..dim {
            for m in 0..dim {
                let entry = self.rho[(n, m)];
                if entry == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..=n.min(m) {
                    let weight = libm::sqrt(binom[n][k] * binom[m][k])
                        * libm::pow(amp, (n + m - 2 * k) as f64)
                        * libm::pow(1.0 - eta, k as f64);
                    out[(n - k, m - k)] += entry * weight;
                }
            }
        }
        Ok(Self {
            n_max: self.n_max,
            rho: out,
        })
    }

    /// `tr(rho a^k)` for `k = 1, 2`.
    fn lowering_moment(&self, k: usize) -> Complex64 {
        (k..=self.n_max)
            .map(|n| {
                let factor: f64 = (0..k).map(|j| (n - j) as f64).product();
                self.rho[(n, n - k)] * libm::sqrt(factor)
            })
            .sum()
    }

    /// Variance of `X_theta` computed from the normally ordered moments.
    pub fn quadrature_variance(&self, theta: f64) -> f64 {
        let phase = Complex64::from_polar(1.0, -theta);
        let a1 = self.lowering_moment(1);
        let a2 = self.lowering_moment(2);
        let mean_x = 2.0 * (a1 * phase).re;
        let second = 2.0 * (a2 * phase * phase).re + 2.0 * self.mean_photon_number() + self.trace();
        second - mean_x * mean_x
    }
}
