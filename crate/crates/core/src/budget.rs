//! Detection efficiency budget and the inverse analysis of measured squeezing.
//!
//! Every efficiency is a pure-loss factor; the chain of losses between the
//! squeezer and the detector collapses to a single `eta` equal to the product
//! of all factors. A variance `V` (shot-noise units) is measured as
//! `eta V + 1 - eta`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::units::{from_db, relative_to_db, to_db};

/// Refractive index of the lithium niobate chip at 1560 nm.
pub const CHIP_INDEX: f64 = 2.211;
pub const AIR_INDEX: f64 = 1.0;
/// Electronic signal-to-noise ratio of the homodyne detector, dB.
pub const DETECTOR_SNR_DB: f64 = 12.8;
pub const FILTER_TRANSMISSION: f64 = 0.99;
pub const PHOTODIODE_EFFICIENCY: f64 = 0.88;

fn check_efficiency(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(invalid(format!("{name} = {value} outside [0, 1]")));
    }
    Ok(())
}

/// Transmission `1 - ((n1 - n2) / (n1 + n2))^2` through an uncoated interface.
pub fn fresnel_efficiency(n1: f64, n2: f64) -> Result<f64> {
    if !(n1 > 0.0 && n2 > 0.0) || !n1.is_finite() || !n2.is_finite() {
        return Err(invalid(format!(
            "refractive indices must be positive, got {n1} and {n2}"
        )));
    }
    let amplitude = (n1 - n2) / (n1 + n2);
    let reflectance = amplitude * amplitude;
    Ok(1.0 - reflectance)
}

/// Electronic noise as an equivalent loss: `(S - 1) / S` with `S` the linear
/// shot-noise to electronic-noise ratio.
pub fn electronic_efficiency(snr_db: f64) -> Result<f64> {
    if !(snr_db > 0.0) || snr_db.is_nan() {
        return Err(invalid(format!(
            "SNR of {snr_db} dB: electronic noise must be below the shot noise"
        )));
    }
    let snr = from_db(snr_db);
    Ok((snr - 1.0) / snr)
}

/// Product of efficiencies, taken in sorted order so the result does not
/// depend on how the factors are listed.
pub fn product_of(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetFactor {
    pub name: String,
    pub value: f64,
}

impl BudgetFactor {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// Named efficiencies of the detection chain. The optional factors default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyBudget {
    pub fresnel: f64,
    pub filter: f64,
    pub photodiode: f64,
    pub electronics: f64,
    pub coupler: f64,
    pub visibility: f64,
    pub propagation: f64,
}

impl EfficiencyBudget {
    pub fn new(fresnel: f64, filter: f64, photodiode: f64, electronics: f64) -> Result<Self> {
        let budget = Self {
            fresnel,
            filter,
            photodiode,
            electronics,
            coupler: 1.0,
            visibility: 1.0,
            propagation: 1.0,
        };
        budget.validate()?;
        Ok(budget)
    }

    /// The two-digit factors quoted for the experiment: 0.86, 0.99, 0.88, 0.95.
    pub fn reference_rounded() -> Self {
        Self::new(0.86, FILTER_TRANSMISSION, PHOTODIODE_EFFICIENCY, 0.95)
            .expect("constants are valid efficiencies")
    }

    /// Same chain with the Fresnel and electronic factors recomputed from
    /// `n = 2.211` and a 12.8 dB SNR.
    pub fn reference_computed() -> Self {
        let fresnel = fresnel_efficiency(AIR_INDEX, CHIP_INDEX).expect("positive indices");
        let electronics = electronic_efficiency(DETECTOR_SNR_DB).expect("positive SNR");
        Self::new(
            fresnel,
            FILTER_TRANSMISSION,
            PHOTODIODE_EFFICIENCY,
            electronics,
        )
        .expect("computed efficiencies lie in [0, 1]")
    }

    pub fn validate(&self) -> Result<()> {
        for factor in self.factors() {
            check_efficiency(&factor.name, factor.value)?;
        }
        Ok(())
    }

    pub fn factors(&self) -> Vec<BudgetFactor> {
        [
            ("fresnel", self.fresnel),
            ("filter", self.filter),
            ("photodiode", self.photodiode),
            ("electronics", self.electronics),
            ("coupler", self.coupler),
            ("visibility", self.visibility),
            ("propagation", self.propagation),
        ]
        .into_iter()
        .map(|(name, value)| BudgetFactor::new(name, value))
        .collect()
    }

    pub fn total(&self) -> f64 {
        let values: Vec<f64> = self.factors().iter().map(|f| f.value).collect();
        product_of(&values)
    }
}

pub fn total_efficiency(budget: &EfficiencyBudget) -> f64 {
    budget.total()
}

/// Measured variance (dB) of a state with variance `v_gen_db` after loss `eta`.
pub fn forward_loss(v_gen_db: f64, eta: f64) -> Result<f64> {
    check_efficiency("eta", eta)?;
    Ok(to_db(eta * from_db(v_gen_db) + 1.0 - eta))
}

/// Undoes a loss `eta`: `V_gen = (V_meas - (1 - eta)) / eta`.
pub fn infer_generated(v_meas_db: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!("eta = {eta} outside (0, 1]")));
    }
    let measured = from_db(v_meas_db);
    let floor = 1.0 - eta;
    if !(measured > floor) {
        return Err(Error::InfeasibleMeasurement {
            variance: measured,
            floor,
        });
    }
    Ok(to_db((measured - floor) / eta))
}

/// Reinterprets a variance measured with efficiency `eta_measured` as what a
/// detector of efficiency `eta_target` would see.
pub fn reproject(v_meas_db: f64, eta_measured: f64, eta_target: f64) -> Result<f64> {
    forward_loss(infer_generated(v_meas_db, eta_measured)?, eta_target)
}

/// Product of the squeezed and antisqueezed linear variances; 1 for a
/// minimum-uncertainty state.
pub fn purity_product(sq_db: f64, asq_db: f64) -> f64 {
    from_db(sq_db) * from_db(asq_db)
}

/// Single-pass parametric gain: `r = gain sqrt(P)`.
pub fn pump_to_r(pump_mw: f64, gain: f64) -> Result<f64> {
    if !(pump_mw >= 0.0) || !(gain >= 0.0) || !pump_mw.is_finite() || !gain.is_finite() {
        return Err(invalid(format!(
            "pump power ({pump_mw} mW) and gain ({gain}) must be finite and >= 0"
        )));
    }
    Ok(gain * libm::sqrt(pump_mw))
}

/// Squeezing (dB) expected at `pump_mw` once an overall efficiency `eta_eff`
/// is applied to the ideal `e^{-2r}`.
pub fn extrapolate_squeezing(gain: f64, pump_mw: f64, eta_eff: f64) -> Result<f64> {
    let r = pump_to_r(pump_mw, gain)?;
    check_efficiency("eta_eff", eta_eff)?;
    Ok(to_db(eta_eff * libm::exp(-2.0 * r) + 1.0 - eta_eff))
}

/// A dB reading with its one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value_db: f64,
    pub uncertainty_db: f64,
}

impl Measured {
    pub fn new(value_db: f64, uncertainty_db: f64) -> Self {
        Self {
            value_db,
            uncertainty_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingReport {
    pub raw_sq_db: f64,
    pub raw_asq_db: f64,
    pub raw_sq_unc_db: f64,
    pub raw_asq_unc_db: f64,
    pub eta_total: f64,
    pub inferred_sq_db: f64,
    pub inferred_asq_db: f64,
    pub inferred_sq_unc_db: f64,
    pub inferred_asq_unc_db: f64,
    pub raw_purity_product: f64,
    pub purity_product: f64,
    pub purity_product_db: f64,
    pub budget: Vec<BudgetFactor>,
}

/// First-order propagation of a dB uncertainty through the loss inversion.
fn propagate_uncertainty(measured: Measured, eta: f64, inferred_db: f64) -> f64 {
    let v_meas = from_db(measured.value_db);
    let dv_meas = v_meas * measured.uncertainty_db / relative_to_db(1.0);
    let dv_gen = dv_meas / eta;
    relative_to_db(dv_gen / from_db(inferred_db))
}

/// Corrects a squeezing/antisqueezing pair for the losses listed in `budget`.
pub fn build_report(
    squeezed: Measured,
    antisqueezed: Measured,
    budget: Vec<BudgetFactor>,
) -> Result<SqueezingReport> {
    for factor in &budget {
        check_efficiency(&factor.name, factor.value)?;
    }
    for m in [squeezed, antisqueezed] {
        if !m.value_db.is_finite() || !(m.uncertainty_db >= 0.0) {
            return Err(invalid(
                "measured values must be finite with non-negative uncertainty",
            ));
        }
    }
    let values: Vec<f64> = budget.iter().map(|f| f.value).collect();
    let eta = product_of(&values);
    let inferred_sq = infer_generated(squeezed.value_db, eta)?;
    let inferred_asq = infer_generated(antisqueezed.value_db, eta)?;
    let purity = purity_product(inferred_sq, inferred_asq);
    Ok(SqueezingReport {
        raw_sq_db: squeezed.value_db,
        raw_asq_db: antisqueezed.value_db,
        raw_sq_unc_db: squeezed.uncertainty_db,
        raw_asq_unc_db: antisqueezed.uncertainty_db,
        eta_total: eta,
        inferred_sq_db: inferred_sq,
        inferred_asq_db: inferred_asq,
        inferred_sq_unc_db: propagate_uncertainty(squeezed, eta, inferred_sq),
        inferred_asq_unc_db: propagate_uncertainty(antisqueezed, eta, inferred_asq),
        raw_purity_product: purity_product(squeezed.value_db, antisqueezed.value_db),
        purity_product: purity,
        purity_product_db: to_db(purity),
        budget,
    })
}

/// Budget consisting of a single lumped efficiency.
pub fn lumped_budget(eta: f64) -> Vec<BudgetFactor> {
    alloc::vec![BudgetFactor::new("total".to_string(), eta)]
}
