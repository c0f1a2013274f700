//! Isotropic pairwise Gaussian-Markov random field (GMRF) toolkit.
//!
//! The crate covers the full analysis chain for lattice fields with Gaussian
//! local conditionals `x_i | eta_i ~ N(mu + beta * sum_j (x_j - mu), sigma2)`:
//!
//! * contextual pattern extraction and the pattern covariance matrix,
//! * maximum pseudo-likelihood estimation of `(mu, sigma2, beta)`,
//! * local and expected Fisher information in both score and curvature form,
//!   the information gap, equilibrium couplings and the asymptotic variance
//!   of the coupling estimator,
//! * GMRF Shannon entropy and the minimum-entropy coupling,
//! * seeded Gibbs / Metropolis sweeps, triangle-wave coupling schedules and
//!   perturbation experiments with per-iteration information records,
//! * grayscale-image helpers (noise injection, Laplacian map, normalization)
//!   for the edge-detection experiments.
//!
//! The crate is `no_std` (with `alloc`); file formats and the command-line
//! front end live in the companion `gmrf-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod covariance;
pub mod entropy;
pub mod error;
pub mod field;
pub mod fisher;
pub mod image;
pub mod mpl;
pub mod neighborhood;
pub mod patterns;
pub mod sampler;
pub mod schedule;

pub use covariance::{pattern_covariance, PatternCovariance};
pub use entropy::{
    beta_min_entropy, entropy_report, gaussian_entropy, gmrf_entropy, gmrf_entropy_scaled,
    histogram_entropy, EntropyReport,
};
pub use error::{Error, Result};
pub use field::Field;
pub use fisher::{
    asymptotic_variance, beta_star, expected_phi, expected_phi_with, expected_psi, info_gap,
    info_summary, l_information_map, local_phi_map, local_psi_map, InfoMap, InfoSummary, MapKind,
    VarianceMode, LINFO_EPS,
};
pub use image::{
    add_gaussian_noise, gaussian_blur, laplacian_map, normalize_field, normalize_map, GrayImage,
    NormalizeMode,
};
pub use mpl::{
    estimate_beta, estimate_beta_from_cov, estimate_mu, estimate_sigma2, fit, fit_with,
    log_pseudo_likelihood, pseudo_likelihood_score, EstimationReport, FitOptions, ModelParams,
};
pub use neighborhood::{Boundary, NeighborhoodSystem};
pub use patterns::{extract_patterns, PatternSet};
pub use sampler::{init_white_noise, sweep, sweep_with_scan, ScanOrder, SweepMode, SweepStats};
pub use schedule::{
    perturb_experiment, recovery_iteration, run_schedule, run_schedule_with, PerturbMode,
    PerturbReport, ScheduleConfig, TrajectoryRecord, TriangleSchedule,
};
