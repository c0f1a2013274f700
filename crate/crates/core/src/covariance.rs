use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::patterns::PatternSet;

/// Covariance matrix of the contextual configuration patterns.
///
/// `sigma_p` is the full `K x K` matrix. `sigma_p_minus` is the
/// `(K-1) x (K-1)` submatrix with the central row and column deleted, `rho`
/// the central row without the central entry, and `sigma_ii` the central
/// (marginal) variance. All information measures consume these pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCovariance {
    pattern_len: usize,
    central_index: usize,
    sigma_p: Vec<f64>,
    sigma_p_minus: Vec<f64>,
    rho: Vec<f64>,
    sigma_ii: f64,
    mean_used: f64,
}

impl PatternCovariance {
    /// Pattern length `K`.
    #[inline]
    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    #[inline]
    pub fn central_index(&self) -> usize {
        self.central_index
    }

    /// Full matrix entry `sigma_p[a][b]`.
    #[inline]
    pub fn sigma(&self, a: usize, b: usize) -> f64 {
        self.sigma_p[a * self.pattern_len + b]
    }

    #[inline]
    pub fn sigma_p(&self) -> &[f64] {
        &self.sigma_p
    }

    #[inline]
    pub fn sigma_p_minus(&self) -> &[f64] {
        &self.sigma_p_minus
    }

    /// Central-row covariances between the central site and each neighbor.
    #[inline]
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Central (marginal) variance, the `sigma_p[central][central]` entry.
    #[inline]
    pub fn sigma_ii(&self) -> f64 {
        self.sigma_ii
    }

    #[inline]
    pub fn mean_used(&self) -> f64 {
        self.mean_used
    }

    /// Sum of all entries of `sigma_p_minus` (the `||.||+` of the submatrix).
    pub fn sum_sigma_minus(&self) -> f64 {
        self.sigma_p_minus.iter().sum()
    }

    /// Sum of the entries of `rho`.
    pub fn sum_rho(&self) -> f64 {
        self.rho.iter().sum()
    }

    /// Builds the covariance pieces from a full `K x K` matrix.
    ///
    /// Used for synthetic inputs; `pattern_covariance` is the estimator.
    pub fn from_matrix(
        sigma_p: Vec<f64>,
        pattern_len: usize,
        central_index: usize,
    ) -> Result<Self> {
        if sigma_p.len() != pattern_len * pattern_len {
            return Err(Error::LengthMismatch {
                expected: pattern_len * pattern_len,
                got: sigma_p.len(),
            });
        }
        if central_index >= pattern_len {
            return Err(Error::DimensionMismatch("central index outside pattern"));
        }
        let (sigma_p_minus, rho, sigma_ii) = split_central(&sigma_p, pattern_len, central_index);
        Ok(Self {
            pattern_len,
            central_index,
            sigma_p,
            sigma_p_minus,
            rho,
            sigma_ii,
            mean_used: 0.0,
        })
    }

    /// Assembles a covariance from the reduced pieces directly.
    ///
    /// The central row/column is filled with `rho` and `sigma_ii`, the rest
    /// with `sigma_minus`; the central index is placed at `rho.len() / 2`.
    pub fn from_parts(sigma_minus: Vec<f64>, rho: Vec<f64>, sigma_ii: f64) -> Result<Self> {
        let m = rho.len();
        if sigma_minus.len() != m * m {
            return Err(Error::LengthMismatch {
                expected: m * m,
                got: sigma_minus.len(),
            });
        }
        let pattern_len = m + 1;
        let central = m / 2;
        let mut sigma_p = vec![0.0; pattern_len * pattern_len];
        let full = |i: usize| if i < central { i } else { i + 1 };
        for a in 0..m {
            for b in 0..m {
                sigma_p[full(a) * pattern_len + full(b)] = sigma_minus[a * m + b];
            }
            sigma_p[central * pattern_len + full(a)] = rho[a];
            sigma_p[full(a) * pattern_len + central] = rho[a];
        }
        sigma_p[central * pattern_len + central] = sigma_ii;
        Self::from_matrix(sigma_p, pattern_len, central)
    }
}

fn split_central(sigma_p: &[f64], pattern_len: usize, central: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let m = pattern_len - 1;
    let mut minus = Vec::with_capacity(m * m);
    let mut rho = Vec::with_capacity(m);
    for a in 0..pattern_len {
        if a == central {
            continue;
        }
        for b in 0..pattern_len {
            if b == central {
                continue;
            }
            minus.push(sigma_p[a * pattern_len + b]);
        }
    }
    for b in 0..pattern_len {
        if b != central {
            rho.push(sigma_p[central * pattern_len + b]);
        }
    }
    let sigma_ii = sigma_p[central * pattern_len + central];
    (minus, rho, sigma_ii)
}

/// Empirical pattern covariance with divide-by-N normalization.
///
/// `mu` defaults to the global sample mean of the source field (one scalar;
/// the model is stationary and isotropic). Each entry pair is accumulated
/// once and mirrored, so the matrix is exactly symmetric.
pub fn pattern_covariance(patterns: &PatternSet, mu: Option<f64>) -> Result<PatternCovariance> {
    let n = patterns.n_rows();
    if n < 2 {
        return Err(Error::InsufficientData(n));
    }
    let k = patterns.pattern_len();
    let mu = mu.unwrap_or_else(|| patterns.field_mean());

    let mut sigma_p = vec![0.0; k * k];
    for i in 0..n {
        let row = patterns.row(i);
        for a in 0..k {
            let da = row[a] - mu;
            for b in a..k {
                sigma_p[a * k + b] += da * (row[b] - mu);
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for a in 0..k {
        for b in a..k {
            let v = sigma_p[a * k + b] * inv_n;
            sigma_p[a * k + b] = v;
            sigma_p[b * k + a] = v;
        }
    }

    let central = patterns.central_index();
    let (sigma_p_minus, rho, sigma_ii) = split_central(&sigma_p, k, central);
    Ok(PatternCovariance {
        pattern_len: k,
        central_index: central,
        sigma_p,
        sigma_p_minus,
        rho,
        sigma_ii,
        mean_used: mu,
    })
}
