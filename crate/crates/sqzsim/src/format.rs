//! Locale-independent number formatting shared by every output file.

/// Fixed notation with nine decimals, or scientific notation with nine
/// fractional digits for magnitudes below `1e-3`. Negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    if x.abs() < 1e-3 {
        format!("{x:.9e}")
    } else {
        format!("{x:.9}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(fmt_num(-2.0), "-2.000000000");
        assert_eq!(fmt_num(-0.0), "0.000000000");
        assert_eq!(fmt_num(0.71), "0.710000000");
        assert_eq!(fmt_num(1.5e-7), "1.500000000e-7");
        assert_eq!(fmt_num(123456.0), "123456.000000000");
    }

    #[test]
    fn keeps_at_least_six_significant_digits() {
        for x in [
            0.947519254,
            -11.2676183,
            3.0123456e-5,
            0.0012345678,
            987654.321,
        ] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-7 * x.abs());
        }
    }
}
