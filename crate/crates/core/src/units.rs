//! Shot-noise-normalized variance conversions.

/// `10 log10(v)`.
pub fn to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}

pub fn from_db(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Converts a small relative fluctuation of a linear quantity into dB.
pub fn relative_to_db(relative: f64) -> f64 {
    relative * 10.0 / core::f64::consts::LN_10
}
