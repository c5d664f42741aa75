//! Multimode Gaussian states and Gaussian channels.
//!
//! Quadratures are ordered `(x1, p1, x2, p2, ...)` and normalized so that the
//! vacuum covariance is the identity (shot noise = 1). A channel `(X, Y)` acts
//! as `mean -> X mean`, `cov -> X cov X^T + Y`.

use alloc::format;

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Tolerance on `cov + i Omega >= 0` and on complete positivity.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Relative tolerance on covariance symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Tolerance on `X Omega X^T = Omega` for lossless operations.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Standard symplectic form for `n_modes` modes, block diagonal in `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Smallest eigenvalue of the Hermitian matrix `re + i im`.
pub(crate) fn min_hermitian_eigenvalue(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    let h = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
        Complex64::new(re[(i, j)], im[(i, j)])
    });
    h.symmetric_eigenvalues().min()
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = libm::sincos(theta);
    Matrix2::new(c, -s, s, c)
}

fn check_mode(mode: usize, n_modes: usize) -> Result<()> {
    if mode >= n_modes {
        return Err(invalid(format!(
            "mode index {mode} out of range for {n_modes} modes"
        )));
    }
    Ok(())
}

fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(invalid(format!("{name} = {value} outside [0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("a state needs at least one mode"));
        }
        Ok(Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Builds a state from explicit moments, checking dimensions, symmetry
    /// and the uncertainty relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(invalid(format!(
                "mean length {dim} is not a positive even number"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("moments must be finite"));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(invalid("covariance is not symmetric"));
        }
        let state = Self {
            n_modes: dim / 2,
            mean,
            cov,
        };
        let min_eig = state.uncertainty_min_eigenvalue();
        if min_eig < -PHYSICALITY_TOL {
            return Err(invalid(format!(
                "covariance violates the uncertainty relation (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// The 2x2 covariance block of one mode.
    pub fn mode_cov(&self, mode: usize) -> Result<Matrix2<f64>> {
        check_mode(mode, self.n_modes)?;
        Ok(self.cov.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned())
    }

    /// Smallest eigenvalue of `cov + i Omega`; non-negative for physical states.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.cov, &symplectic_form(self.n_modes))
    }

    pub fn is_physical(&self) -> bool {
        self.uncertainty_min_eigenvalue() >= -PHYSICALITY_TOL
    }

    /// Mean photon number summed over the given modes: `(tr cov_k - 2)/4 + |d_k|^2/4`.
    pub fn photon_number(&self, modes: &[usize]) -> Result<f64> {
        modes.iter().try_fold(0.0, |acc, &m| {
            check_mode(m, self.n_modes)?;
            let block = self.mode_cov(m)?;
            let (dx, dp) = (self.mean[2 * m], self.mean[2 * m + 1]);
            let d2 = dx * dx + dp * dp;
            Ok(acc + (block.trace() - 2.0) / 4.0 + d2 / 4.0)
        })
    }

    pub fn apply(&self, channel: &GaussianChannel) -> Result<Self> {
        if channel.n_modes != self.n_modes {
            return Err(invalid(format!(
                "channel acts on {} modes, state has {}",
                channel.n_modes, self.n_modes
            )));
        }
        let mean = &channel.x * &self.mean;
        let mut cov = &channel.x * &self.cov * channel.x.transpose() + &channel.y;
        // re-symmetrize round-off
        cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self {
            n_modes: self.n_modes,
            mean,
            cov,
        })
    }

    pub fn apply_squeezer(&self, mode: usize, r: f64, phase: f64) -> Result<Self> {
        self.apply(&GaussianChannel::squeezer(self.n_modes, mode, r, phase)?)
    }

    pub fn apply_phase_shift(&self, mode: usize, theta: f64) -> Result<Self> {
        self.apply(&GaussianChannel::phase_shift(self.n_modes, mode, theta)?)
    }

    pub fn apply_coupler(&self, mode_a: usize, mode_b: usize, ratio: f64) -> Result<Self> {
        self.apply(&GaussianChannel::coupler(
            self.n_modes,
            mode_a,
            mode_b,
            ratio,
        )?)
    }

    pub fn apply_loss(&self, mode: usize, eta: f64) -> Result<Self> {
        self.apply(&GaussianChannel::loss(self.n_modes, mode, eta)?)
    }

    /// Variance of `x cos(theta) + p sin(theta)` on one mode.
    pub fn quadrature_variance(&self, mode: usize, theta: f64) -> Result<f64> {
        let block = self.mode_cov(mode)?;
        let (s, c) = libm::sincos(theta);
        // normalized by |u|^2 so phase-invariant states give exactly their variance
        let norm = c * c + s * s;
        Ok((c * c * block[(0, 0)] + 2.0 * s * c * block[(0, 1)] + s * s * block[(1, 1)]) / norm)
    }

    /// Tensor product with `extra` vacuum modes appended after the existing ones.
    pub fn with_vacuum_modes(&self, extra: usize) -> Self {
        let n = self.n_modes + extra;
        let mut mean = DVector::zeros(2 * n);
        mean.rows_mut(0, 2 * self.n_modes).copy_from(&self.mean);
        let mut cov = DMatrix::identity(2 * n, 2 * n);
        cov.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.cov);
        Self {
            n_modes: n,
            mean,
            cov,
        }
    }

    /// Partial trace over one mode.
    pub fn discard_mode(&self, mode: usize) -> Result<Self> {
        check_mode(mode, self.n_modes)?;
        if self.n_modes == 1 {
            return Err(invalid("cannot discard the only mode"));
        }
        let keep: alloc::vec::Vec<usize> =
            (0..2 * self.n_modes).filter(|&i| i / 2 != mode).collect();
        let mean = DVector::from_fn(keep.len(), |i, _| self.mean[keep[i]]);
        let cov = DMatrix::from_fn(keep.len(), keep.len(), |i, j| self.cov[(keep[i], keep[j])]);
        Ok(Self {
            n_modes: self.n_modes - 1,
            mean,
            cov,
        })
    }
}

/// A Gaussian channel `(X, Y)` on `n_modes` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    n_modes: usize,
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl GaussianChannel {
    /// Validated constructor: dimensions, `Y` symmetric, complete positivity.
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        let dim = x.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || x.ncols() != dim || y.shape() != (dim, dim) {
            return Err(invalid(
                "channel matrices must be square, even and equal in size",
            ));
        }
        if (&y - y.transpose()).amax() > SYMMETRY_TOL * y.amax().max(1.0) {
            return Err(invalid("channel noise matrix Y is not symmetric"));
        }
        let channel = Self {
            n_modes: dim / 2,
            x,
            y,
        };
        let min_eig = channel.complete_positivity_min_eigenvalue();
        if min_eig < -PHYSICALITY_TOL {
            return Err(invalid(format!(
                "channel is not completely positive (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(channel)
    }

    pub fn identity(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        Self {
            n_modes,
            x: DMatrix::identity(dim, dim),
            y: DMatrix::zeros(dim, dim),
        }
    }

    fn with_block(n_modes: usize, mode: usize, block: Matrix2<f64>) -> Self {
        let mut channel = Self::identity(n_modes);
        channel
            .x
            .fixed_view_mut::<2, 2>(2 * mode, 2 * mode)
            .copy_from(&block);
        channel
    }

    /// Single-mode squeezer `R(phase) diag(e^-r, e^r) R(phase)^T`: the
    /// quadrature at angle `phase` is squeezed.
    pub fn squeezer(n_modes: usize, mode: usize, r: f64, phase: f64) -> Result<Self> {
        check_mode(mode, n_modes)?;
        if !(r >= 0.0) || !r.is_finite() {
            return Err(invalid(format!(
                "squeezing parameter r = {r} must be finite and >= 0"
            )));
        }
        let rot = rotation(phase);
        let diag = Matrix2::new(libm::exp(-r), 0.0, 0.0, libm::exp(r));
        Ok(Self::with_block(
            n_modes,
            mode,
            rot * diag * rot.transpose(),
        ))
    }

    pub fn phase_shift(n_modes: usize, mode: usize, theta: f64) -> Result<Self> {
        check_mode(mode, n_modes)?;
        if !theta.is_finite() {
            return Err(invalid("phase must be finite"));
        }
        Ok(Self::with_block(n_modes, mode, rotation(theta)))
    }

    /// Beamsplitter with power transmission `ratio`:
    /// `a' = sqrt(R) a + sqrt(1-R) b`, `b' = -sqrt(1-R) a + sqrt(R) b`.
    pub fn coupler(n_modes: usize, mode_a: usize, mode_b: usize, ratio: f64) -> Result<Self> {
        check_mode(mode_a, n_modes)?;
        check_mode(mode_b, n_modes)?;
        if mode_a == mode_b {
            return Err(invalid("coupler needs two distinct modes"));
        }
        check_unit_interval("coupler ratio", ratio)?;
        let t = libm::sqrt(ratio);
        let s = libm::sqrt(1.0 - ratio);
        let mut channel = Self::identity(n_modes);
        for q in 0..2 {
            let (ia, ib) = (2 * mode_a + q, 2 * mode_b + q);
            channel.x[(ia, ia)] = t;
            channel.x[(ia, ib)] = s;
            channel.x[(ib, ia)] = -s;
            channel.x[(ib, ib)] = t;
        }
        Ok(channel)
    }

    /// Pure loss: `block -> eta block + (1 - eta) I`, mean scaled by `sqrt(eta)`.
    pub fn loss(n_modes: usize, mode: usize, eta: f64) -> Result<Self> {
        check_mode(mode, n_modes)?;
        check_unit_interval("loss efficiency", eta)?;
        let mut channel = Self::with_block(n_modes, mode, Matrix2::identity() * libm::sqrt(eta));
        channel.y[(2 * mode, 2 * mode)] = 1.0 - eta;
        channel.y[(2 * mode + 1, 2 * mode + 1)] = 1.0 - eta;
        Ok(channel)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    /// The channel obtained by applying `self` and then `next`.
    pub fn then(&self, next: &GaussianChannel) -> Result<Self> {
        if self.n_modes != next.n_modes {
            return Err(Error::InvalidArgument(format!(
                "cannot compose channels on {} and {} modes",
                self.n_modes, next.n_modes
            )));
        }
        Ok(Self {
            n_modes: self.n_modes,
            x: &next.x * &self.x,
            y: &next.x * &self.y * next.x.transpose() + &next.y,
        })
    }

    /// Max-abs deviation of `X Omega X^T` from `Omega`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        (&self.x * &omega * self.x.transpose() - omega).amax()
    }

    /// Lossless and noiseless: `Y = 0` and `X` symplectic within tolerance.
    pub fn is_symplectic(&self) -> bool {
        self.y.amax() == 0.0 && self.symplectic_defect() <= SYMPLECTIC_TOL
    }

    /// Smallest eigenvalue of `Y + i Omega - i X Omega X^T`.
    pub fn complete_positivity_min_eigenvalue(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        let im = &omega - &self.x * &omega * self.x.transpose();
        min_hermitian_eigenvalue(&self.y, &im)
    }
}
