//! File formats and IO for the GMRF toolkit: binary PGM images, CSV
//! serialization of fields, maps, covariances, reports and trajectories,
//! flat key=value run configs, and atomic output writing.

pub mod config;
pub mod csvio;
pub mod fileio;
pub mod pgm;

/// Formats a value with six significant digits for console output.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.125), "0.125000");
        assert_eq!(sig6(16384.0), "16384.0");
        assert_eq!(sig6(-3.0), "-3.00000");
        assert_eq!(sig6(0.0), "0.00000");
        assert_eq!(sig6(1.23e-7), "1.23000e-7");
    }
}
