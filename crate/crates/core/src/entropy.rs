use core::f64::consts::PI;

use crate::covariance::PatternCovariance;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fisher::expected_psi;
use crate::mpl::{estimate_beta_from_cov, ModelParams};

/// Differential entropy of one Gaussian variable, `(1/2) ln(2 pi sigma2) + 1/2`.
pub fn gaussian_entropy(sigma2: f64) -> Result<f64> {
    if sigma2 <= 0.0 || !sigma2.is_finite() {
        return Err(Error::NonPositiveVariance(sigma2));
    }
    Ok(0.5 * libm::log(2.0 * PI * sigma2) + 0.5)
}

/// Per-site GMRF entropy,
/// `H = H_G - [ (beta/sigma2) sum(rho) - (beta^2/2) psi ]`
/// with `psi` the expected curvature information. A convex quadratic in beta
/// whose leading coefficient is `psi / 2`.
pub fn gmrf_entropy(cov: &PatternCovariance, params: &ModelParams) -> Result<f64> {
    let h_gauss = gaussian_entropy(params.sigma2)?;
    let psi = expected_psi(cov, params)?;
    let beta = params.beta;
    Ok(h_gauss - (beta / params.sigma2 * cov.sum_rho() - 0.5 * beta * beta * psi))
}

/// The n-scaled entropy of the whole lattice, `n * gmrf_entropy`.
pub fn gmrf_entropy_scaled(
    cov: &PatternCovariance,
    params: &ModelParams,
    n_sites: usize,
) -> Result<f64> {
    Ok(n_sites as f64 * gmrf_entropy(cov, params)?)
}

/// The coupling that minimizes the entropy quadratic,
/// `sum(rho) / sum(sigma_p_minus)`; identical to the covariance-form
/// maximum pseudo-likelihood estimator.
pub fn beta_min_entropy(cov: &PatternCovariance) -> Result<f64> {
    estimate_beta_from_cov(cov)
}

/// Entropy quantities of one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    /// Per-site GMRF entropy at the supplied parameters.
    pub h_beta: f64,
    /// Gaussian baseline at the supplied `sigma2`.
    pub h_gauss: f64,
    /// Entropy-minimizing coupling.
    pub beta_mh: f64,
    /// Second derivative of the entropy in beta (the curvature information).
    pub curvature: f64,
}

pub fn entropy_report(cov: &PatternCovariance, params: &ModelParams) -> Result<EntropyReport> {
    Ok(EntropyReport {
        h_beta: gmrf_entropy(cov, params)?,
        h_gauss: gaussian_entropy(params.sigma2)?,
        beta_mh: beta_min_entropy(cov)?,
        curvature: expected_psi(cov, params)?,
    })
}

/// Base-2 Shannon entropy of the histogram of rounded values.
///
/// Intended for image-mode fields: values are rounded, clamped to [0, 255]
/// and spread over `bins` equal-width bins (256 by default at the CLI).
pub fn histogram_entropy(field: &Field, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::BadBinCount(bins));
    }
    let mut counts = alloc::vec![0u64; bins];
    for &v in field.values() {
        let level = libm::round(v).clamp(0.0, 255.0) as usize;
        counts[level * bins / 256] += 1;
    }
    let total = field.len() as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * libm::log2(p);
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{pattern_covariance, PatternCovariance};
    use crate::mpl::fit;
    use crate::neighborhood::NeighborhoodSystem;
    use crate::patterns::extract_patterns;
    use rand::prelude::*;
    use rand_distr::StandardNormal;

    fn identity(m: usize) -> Vec<f64> {
        let mut eye = vec![0.0; m * m];
        for i in 0..m {
            eye[i * m + i] = 1.0;
        }
        eye
    }

    fn sample_cov(seed: u64) -> (PatternCovariance, ModelParams) {
        let mut rng = StdRng::seed_from_u64(seed);
        let field = Field::from_fn(24, 24, |_, _| rng.sample::<f64, _>(StandardNormal)).unwrap();
        let nbhd = NeighborhoodSystem::toroidal(1).unwrap();
        let report = fit(&field, &nbhd).unwrap();
        let cov = pattern_covariance(
            &extract_patterns(&field, &nbhd).unwrap(),
            Some(report.params.mu),
        )
        .unwrap();
        (cov, report.params)
    }

    #[test]
    fn gaussian_entropy_closed_forms() {
        let zero_var = 1.0 / (2.0 * PI * core::f64::consts::E);
        assert!(gaussian_entropy(zero_var).unwrap().abs() < 1e-14);
        assert!((gaussian_entropy(1.0).unwrap() - 1.4189385332046727).abs() < 1e-15);
        assert!((gaussian_entropy(5.0).unwrap() - 2.223657489421723).abs() < 1e-15);
        assert!(gaussian_entropy(0.0).is_err());
        assert!(gaussian_entropy(-2.0).is_err());
    }

    #[test]
    fn entropy_at_beta_zero_is_the_gaussian_baseline() {
        let (cov, params) = sample_cov(3);
        let p0 = ModelParams {
            beta: 0.0,
            ..params
        };
        let h = gmrf_entropy(&cov, &p0).unwrap();
        assert_eq!(h, gaussian_entropy(p0.sigma2).unwrap());
    }

    #[test]
    fn entropy_is_minimized_at_beta_mh() {
        let (cov, params) = sample_cov(5);
        let beta_mh = beta_min_entropy(&cov).unwrap();
        let at = |beta: f64| gmrf_entropy(&cov, &ModelParams { beta, ..params }).unwrap();
        let h_min = at(beta_mh);
        assert!(at(beta_mh + 0.01) > h_min);
        assert!(at(beta_mh - 0.01) > h_min);
        // first derivative vanishes at the minimizer
        let h = 1e-5;
        let fd = (at(beta_mh + h) - at(beta_mh - h)) / (2.0 * h);
        assert!(fd.abs() <= 1e-8, "{fd}");
    }

    #[test]
    fn curvature_is_the_expected_psi() {
        let (cov, params) = sample_cov(7);
        let psi = expected_psi(&cov, &params).unwrap();
        let step = 1e-4;
        let at = |beta: f64| gmrf_entropy(&cov, &ModelParams { beta, ..params }).unwrap();
        let fd = (at(params.beta + step) - 2.0 * at(params.beta) + at(params.beta - step))
            / (step * step);
        assert!((fd - psi).abs() <= 1e-6 * psi, "fd {fd} psi {psi}");
    }

    #[test]
    fn quadratic_coefficients_are_recovered_by_a_three_point_fit() {
        let (cov, params) = sample_cov(9);
        let h_g = gaussian_entropy(params.sigma2).unwrap();
        let at = |beta: f64| gmrf_entropy(&cov, &ModelParams { beta, ..params }).unwrap() - h_g;
        // fit a*b^2 + b*x through (0, h, 2h); the curve passes the origin
        let step = 0.05;
        let (y0, y1, y2) = (at(0.0), at(step), at(2.0 * step));
        assert_eq!(y0, 0.0);
        let a = (y2 - 2.0 * y1 + y0) / (2.0 * step * step);
        let b = (4.0 * y1 - y2 - 3.0 * y0) / (2.0 * step);
        let psi = expected_psi(&cov, &params).unwrap();
        let want_b = -cov.sum_rho() / params.sigma2;
        assert!((a - 0.5 * psi).abs() <= 1e-10 * psi.max(1.0));
        assert!((b - want_b).abs() <= 1e-10 * want_b.abs().max(1.0));
    }

    #[test]
    fn beta_mh_equals_the_mpl_coupling_exactly() {
        let (cov, _) = sample_cov(11);
        let ratio = beta_min_entropy(&cov).unwrap() / estimate_beta_from_cov(&cov).unwrap();
        assert!((ratio - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn scaled_entropy_is_the_per_site_value_times_n() {
        let (cov, params) = sample_cov(13);
        let per_site = gmrf_entropy(&cov, &params).unwrap();
        let total = gmrf_entropy_scaled(&cov, &params, 576).unwrap();
        assert!((total - 576.0 * per_site).abs() < 1e-12 * total.abs());
    }

    #[test]
    fn beta_mh_closed_forms() {
        let cov = PatternCovariance::from_parts(identity(4), vec![0.3; 4], 1.0).unwrap();
        assert!((beta_min_entropy(&cov).unwrap() - 0.3).abs() < 1e-15);
        let zero = PatternCovariance::from_parts(identity(4), vec![0.0; 4], 1.0).unwrap();
        assert_eq!(beta_min_entropy(&zero).unwrap(), 0.0);
    }

    #[test]
    fn histogram_entropy_closed_forms() {
        let constant = Field::constant(8, 8, 37.0).unwrap();
        assert_eq!(histogram_entropy(&constant, 256).unwrap(), 0.0);

        // two values in equal counts -> exactly one bit
        let two = Field::from_fn(8, 8, |r, _| if r < 4 { 10.0 } else { 200.0 }).unwrap();
        assert_eq!(histogram_entropy(&two, 256).unwrap(), 1.0);

        // uniform spread over all 256 levels -> exactly 8 bits
        let ramp = Field::from_fn(256, 256, |_, c| c as f64).unwrap();
        assert_eq!(histogram_entropy(&ramp, 256).unwrap(), 8.0);

        assert!(matches!(
            histogram_entropy(&constant, 1),
            Err(Error::BadBinCount(1))
        ));
    }
}
