//! Balanced homodyne detection of a single mode and spectrum-analyzer traces.
//!
//! The local oscillator is treated as a strong classical field. Coupler
//! imbalance, mode-matching visibility, photodiode quantum efficiency and
//! electronic noise all act as one effective loss in front of an ideal
//! quadrature measurement.

use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{invalid, Result};
use crate::gaussian::GaussianState;
use crate::units::to_db;

pub const DEFAULT_CENTER_FREQ_HZ: f64 = 2.0e6;
pub const DEFAULT_RBW_HZ: f64 = 100.0e3;
pub const DEFAULT_VBW_HZ: f64 = 30.0;
pub const DEFAULT_SWEEP_TIME_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneConfig {
    pub eta_pd: f64,
    pub eta_e: f64,
    pub coupler_ratio: f64,
    pub visibility: f64,
    /// Zero-span analysis frequency; the single-mode model is flat in frequency.
    pub center_freq_hz: f64,
    pub rbw_hz: f64,
    pub vbw_hz: f64,
    pub sweep_time_s: f64,
    pub seed: Option<u64>,
}

impl Default for HomodyneConfig {
    fn default() -> Self {
        Self {
            eta_pd: 1.0,
            eta_e: 1.0,
            coupler_ratio: 0.5,
            visibility: 1.0,
            center_freq_hz: DEFAULT_CENTER_FREQ_HZ,
            rbw_hz: DEFAULT_RBW_HZ,
            vbw_hz: DEFAULT_VBW_HZ,
            sweep_time_s: DEFAULT_SWEEP_TIME_S,
            seed: None,
        }
    }
}

impl HomodyneConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("eta_pd", self.eta_pd),
            ("eta_e", self.eta_e),
            ("coupler_ratio", self.coupler_ratio),
            ("visibility", self.visibility),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid(format!("{name} = {value} outside [0, 1]")));
            }
        }
        if !(self.vbw_hz > 0.0) || !(self.rbw_hz >= self.vbw_hz) || !self.rbw_hz.is_finite() {
            return Err(invalid(format!(
                "need rbw >= vbw > 0, got rbw = {} Hz, vbw = {} Hz",
                self.rbw_hz, self.vbw_hz
            )));
        }
        if !(self.sweep_time_s > 0.0) || !self.sweep_time_s.is_finite() {
            return Err(invalid(format!(
                "sweep time {} s must be positive",
                self.sweep_time_s
            )));
        }
        if !(self.center_freq_hz >= 0.0) || !self.center_freq_hz.is_finite() {
            return Err(invalid("center frequency must be finite and non-negative"));
        }
        Ok(())
    }

    /// Number of independent noise samples averaged per displayed point, `rbw / vbw`.
    pub fn averaging_factor(&self) -> f64 {
        self.rbw_hz / self.vbw_hz
    }

    /// Relative standard deviation of one displayed point, `sqrt(2 / M)`.
    pub fn estimator_relative_sigma(&self) -> f64 {
        libm::sqrt(2.0 / self.averaging_factor())
    }
}

/// `4R(1-R) v^2 eta_pd eta_e`.
pub fn effective_efficiency(config: &HomodyneConfig) -> f64 {
    let r = config.coupler_ratio;
    4.0 * r * (1.0 - r) * config.visibility * config.visibility * config.eta_pd * config.eta_e
}

/// Shot-noise-normalized variance recorded by the detector at LO phase `theta`.
pub fn measure_variance(
    state: &GaussianState,
    mode: usize,
    theta: f64,
    config: &HomodyneConfig,
) -> Result<f64> {
    config.validate()?;
    state
        .apply_loss(mode, effective_efficiency(config))?
        .quadrature_variance(mode, theta)
}

/// `points` LO phases evenly spaced from `start` (included) to `stop` (excluded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl PhaseSweep {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        let sweep = Self {
            start,
            stop,
            points,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid("sweep bounds must be finite"));
        }
        if self.points < 2 {
            return Err(invalid(format!(
                "a sweep needs at least 2 points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    pub fn phases(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / self.points as f64;
        (0..self.points)
            .map(|k| self.start + step * k as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomodyneTrace {
    pub phases: Vec<f64>,
    pub variance_db: Vec<f64>,
    pub config: HomodyneConfig,
    pub noiseless: bool,
}

impl HomodyneTrace {
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn min_db(&self) -> f64 {
        self.variance_db
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_db(&self) -> f64 {
        self.variance_db
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Acquisition time of each point; the LO phase is scanned linearly over the sweep.
    pub fn times(&self) -> Vec<f64> {
        let n = self.phases.len() as f64;
        (0..self.phases.len())
            .map(|k| self.config.sweep_time_s * k as f64 / n)
            .collect()
    }
}

/// Noiseless trace of the measured variance (dB) over the LO phases of `sweep`.
pub fn sweep(
    state: &GaussianState,
    mode: usize,
    config: &HomodyneConfig,
    sweep: &PhaseSweep,
) -> Result<HomodyneTrace> {
    config.validate()?;
    sweep.validate()?;
    let detected = state.apply_loss(mode, effective_efficiency(config))?;
    let phases = sweep.phases();
    let variance_db = phases
        .iter()
        .map(|&theta| detected.quadrature_variance(mode, theta).map(to_db))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomodyneTrace {
        phases,
        variance_db,
        config: *config,
        noiseless: true,
    })
}

/// `count` multiplicative estimator fluctuations with mean 1 and relative
/// deviation `sqrt(2/M)`: the average of `M` squared Gaussian samples,
/// i.e. a chi-square with `M` degrees of freedom divided by `M`.
pub fn estimator_fluctuations(
    config: &HomodyneConfig,
    seed: u64,
    count: usize,
) -> Result<Vec<f64>> {
    config.validate()?;
    let m = config.averaging_factor();
    let gamma = Gamma::new(m / 2.0, 2.0 / m)
        .map_err(|e| invalid(format!("estimator distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| gamma.sample(&mut rng)).collect())
}

/// Adds spectrum-analyzer estimator noise to a trace. Deterministic for a given seed.
pub fn synthesize_trace(trace: &HomodyneTrace, config: &HomodyneConfig) -> Result<HomodyneTrace> {
    let seed = config
        .seed
        .ok_or_else(|| invalid("noise synthesis needs a seed"))?;
    let noise = estimator_fluctuations(config, seed, trace.len())?;
    let variance_db = trace
        .variance_db
        .iter()
        .zip(&noise)
        .map(|(&db, &factor)| db + to_db(factor))
        .collect();
    Ok(HomodyneTrace {
        phases: trace.phases.clone(),
        variance_db,
        config: *config,
        noiseless: false,
    })
}
