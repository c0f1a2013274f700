use core::f64::consts::PI;

use crate::covariance::PatternCovariance;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::neighborhood::NeighborhoodSystem;

/// The GMRF parameter vector `theta = (mu, sigma2, beta)`.
///
/// `sigma2` is the conditional (local) variance and must be positive. `beta`
/// is the isotropic spatial coupling (inverse temperature); no hard range is
/// imposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub mu: f64,
    pub sigma2: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(mu: f64, sigma2: f64, beta: f64) -> Result<Self> {
        let p = Self { mu, sigma2, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma2 <= 0.0 || !self.sigma2.is_finite() {
            return Err(Error::NonPositiveVariance(self.sigma2));
        }
        if !self.mu.is_finite() || !self.beta.is_finite() {
            return Err(Error::InvalidConfig("non-finite parameter"));
        }
        Ok(())
    }
}

/// Result of a maximum pseudo-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationReport {
    pub params: ModelParams,
    /// Sites admitted by the boundary policy.
    pub n_sites: usize,
    /// Neighbor count of the system used.
    pub k: usize,
    /// d/dbeta of the log pseudo-likelihood at the fitted parameters.
    pub score_at_beta: f64,
}

/// Options for [`fit_with`]. The default is the single-pass order: sample
/// mean, then beta, then sigma2. `refine_mu` alternates the closed-form mean
/// estimator with the beta estimator until both stabilize.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub refine_mu: bool,
    pub max_rounds: usize,
    pub rel_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            refine_mu: false,
            max_rounds: 20,
            rel_tol: 1e-8,
        }
    }
}

/// Sums of the per-site quantities every estimator shares: with
/// `d_i = x_i - mu` and `s_i = sum_{j in eta_i} (x_j - mu)`, accumulates
/// `sum d_i*s_i`, `sum s_i^2`, `sum d_i^2` and the residual sum of squares
/// at a given beta.
fn site_sums(field: &Field, nbhd: &NeighborhoodSystem, mu: f64) -> (f64, f64, f64, usize) {
    let k = nbhd.k() as f64;
    let mut cross = 0.0;
    let mut s_sq = 0.0;
    let mut d_sq = 0.0;
    let mut count = 0;
    for r in nbhd.site_rows(field) {
        for c in nbhd.site_cols(field) {
            let d = field.get(r, c) - mu;
            let s = nbhd.neighbor_sum(field, r, c) - k * mu;
            cross += d * s;
            s_sq += s * s;
            d_sq += d * d;
            count += 1;
        }
    }
    (cross, s_sq, d_sq, count)
}

/// Log pseudo-likelihood of the field under `params`:
/// `-(n/2) log(2 pi sigma2) - (1/2 sigma2) sum_i [x_i - mu - beta s_i]^2`,
/// summed over the sites admitted by the boundary policy.
pub fn log_pseudo_likelihood(
    field: &Field,
    nbhd: &NeighborhoodSystem,
    params: &ModelParams,
) -> Result<f64> {
    params.validate()?;
    let (cross, s_sq, d_sq, n) = site_sums(field, nbhd, params.mu);
    let rss = d_sq - 2.0 * params.beta * cross + params.beta * params.beta * s_sq;
    Ok(-(n as f64 / 2.0) * libm::log(2.0 * PI * params.sigma2) - rss / (2.0 * params.sigma2))
}

/// First derivative of the log pseudo-likelihood in beta.
pub fn pseudo_likelihood_score(
    field: &Field,
    nbhd: &NeighborhoodSystem,
    params: &ModelParams,
) -> Result<f64> {
    params.validate()?;
    let (cross, s_sq, _, _) = site_sums(field, nbhd, params.mu);
    Ok((cross - params.beta * s_sq) / params.sigma2)
}

/// Closed-form coupling estimator: the ratio of `sum_i d_i s_i` over
/// `sum_i s_i^2` with deviations taken about `mu`.
pub fn estimate_beta(field: &Field, nbhd: &NeighborhoodSystem, mu: f64) -> Result<f64> {
    let (cross, s_sq, _, _) = site_sums(field, nbhd, mu);
    if s_sq == 0.0 {
        return Err(Error::DegenerateField("zero neighbor-sum energy"));
    }
    Ok(cross / s_sq)
}

/// Coupling estimator in covariance form: `sum(rho) / sum(sigma_p_minus)`.
///
/// Equals [`estimate_beta`] exactly when the covariance was built from the
/// same field and mean under the toroidal policy with divide-by-N.
pub fn estimate_beta_from_cov(cov: &PatternCovariance) -> Result<f64> {
    let den = cov.sum_sigma_minus();
    if den == 0.0 {
        return Err(Error::DegenerateCovariance("sum of sigma_p_minus is zero"));
    }
    Ok(cov.sum_rho() / den)
}

/// Closed-form mean estimator `(1/(n(1-k beta))) sum_i (x_i - beta sum_j x_j)`.
pub fn estimate_mu(field: &Field, nbhd: &NeighborhoodSystem, beta: f64) -> Result<f64> {
    let k = nbhd.k() as f64;
    let denom = 1.0 - k * beta;
    if denom.abs() < 1e-12 {
        return Err(Error::SingularMean(denom));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for r in nbhd.site_rows(field) {
        for c in nbhd.site_cols(field) {
            sum += field.get(r, c) - beta * nbhd.neighbor_sum(field, r, c);
            n += 1;
        }
    }
    Ok(sum / (n as f64 * denom))
}

/// Mean squared pseudo-likelihood residual at `(mu, beta)`; always >= 0.
pub fn estimate_sigma2(
    field: &Field,
    nbhd: &NeighborhoodSystem,
    mu: f64,
    beta: f64,
) -> Result<f64> {
    let k = nbhd.k() as f64;
    let mut rss = 0.0;
    let mut n = 0usize;
    for r in nbhd.site_rows(field) {
        for c in nbhd.site_cols(field) {
            let s = nbhd.neighbor_sum(field, r, c) - k * mu;
            let resid = field.get(r, c) - mu - beta * s;
            rss += resid * resid;
            n += 1;
        }
    }
    Ok(rss / n as f64)
}

/// Full maximum pseudo-likelihood fit with the default single-pass order.
pub fn fit(field: &Field, nbhd: &NeighborhoodSystem) -> Result<EstimationReport> {
    fit_with(field, nbhd, FitOptions::default())
}

pub fn fit_with(
    field: &Field,
    nbhd: &NeighborhoodSystem,
    options: FitOptions,
) -> Result<EstimationReport> {
    let mut mu = field.mean();
    let mut beta = estimate_beta(field, nbhd, mu)?;

    if options.refine_mu {
        for _ in 0..options.max_rounds {
            let next_mu = estimate_mu(field, nbhd, beta)?;
            let next_beta = estimate_beta(field, nbhd, next_mu)?;
            let done = (next_mu - mu).abs() <= options.rel_tol * mu.abs().max(1.0)
                && (next_beta - beta).abs() <= options.rel_tol * beta.abs().max(1.0);
            mu = next_mu;
            beta = next_beta;
            if done {
                break;
            }
        }
    }

    let sigma2 = estimate_sigma2(field, nbhd, mu, beta)?;
    if sigma2 == 0.0 {
        return Err(Error::DegenerateField("zero residual variance"));
    }
    let params = ModelParams { mu, sigma2, beta };
    let score_at_beta = pseudo_likelihood_score(field, nbhd, &params)?;
    debug_assert!(
        score_at_beta.abs() <= 1e-6 * nbhd.site_count(field) as f64,
        "score {score_at_beta} did not vanish at the fitted coupling"
    );
    Ok(EstimationReport {
        params,
        n_sites: nbhd.site_count(field),
        k: nbhd.k(),
        score_at_beta,
    })
}
