use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::covariance::pattern_covariance;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fisher::{beta_star, info_summary};
use crate::mpl::{fit, ModelParams};
use crate::neighborhood::NeighborhoodSystem;
use crate::patterns::extract_patterns;
use crate::sampler::{init_white_noise_from, sweep, SweepMode};

/// Configuration of a triangle-wave coupling schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub beta_start: f64,
    pub beta_max: f64,
    pub d_beta: f64,
    pub sweeps: usize,
    pub record_every: usize,
    pub seed: u64,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            beta_start: 0.0,
            beta_max: 0.15,
            d_beta: 0.001,
            sweeps: 300,
            record_every: 1,
            seed: 0,
        }
    }
}

impl ScheduleConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.beta_start.is_finite()
            || !self.beta_max.is_finite()
            || self.beta_start < 0.0
            || self.beta_start > self.beta_max
        {
            return Err(Error::InvalidConfig("need 0 <= beta_start <= beta_max"));
        }
        if self.d_beta <= 0.0 || !self.d_beta.is_finite() {
            return Err(Error::InvalidConfig("d_beta must be positive"));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidConfig("sweeps must be >= 1"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be >= 1"));
        }
        Ok(())
    }
}

/// The coupling waveform: up by `d_beta` per iteration to `beta_max`, then
/// down to zero, repeating. Levels are tracked as integers so the wave
/// returns to exactly zero with no float drift.
#[derive(Debug, Clone)]
pub struct TriangleSchedule {
    level: i64,
    max_level: i64,
    rising: bool,
    d_beta: f64,
}

impl TriangleSchedule {
    pub fn new(beta_start: f64, beta_max: f64, d_beta: f64) -> Self {
        let max_level = libm::round(beta_max / d_beta).max(1.0) as i64;
        let level = (libm::round(beta_start / d_beta) as i64).clamp(0, max_level);
        Self {
            level,
            max_level,
            rising: true,
            d_beta,
        }
    }

    pub fn current(&self) -> f64 {
        self.level as f64 * self.d_beta
    }

    /// Steps to the next iteration's coupling and returns it.
    pub fn advance(&mut self) -> f64 {
        if self.rising {
            self.level += 1;
            if self.level >= self.max_level {
                self.level = self.max_level;
                self.rising = false;
            }
        } else {
            self.level -= 1;
            if self.level <= 0 {
                self.level = 0;
                self.rising = true;
            }
        }
        self.current()
    }
}

/// Global measures of one recorded configuration plus the schedule coupling.
/// All information fields are evaluated at the fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub iteration: usize,
    pub beta_true: f64,
    pub beta_hat: f64,
    pub phi: f64,
    pub psi: f64,
    pub entropy: f64,
    pub linfo: f64,
    pub asym_var: f64,
    pub beta_star: Option<(f64, f64)>,
}

/// Perturbation flavors: clamp the coupling to zero, or to the smaller
/// equilibrium root computed from the field at the perturbation iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbMode {
    Zero,
    BetaStarMin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbReport {
    pub records: Vec<TrajectoryRecord>,
    pub perturb_at: usize,
    pub hold: usize,
    /// Coupling used during the hold window.
    pub beta_override: f64,
    /// True when the equilibrium root was unavailable and the run fell back
    /// to the zero mode.
    pub fell_back: bool,
}

fn measure(
    field: &Field,
    nbhd: &NeighborhoodSystem,
    iteration: usize,
    beta_true: f64,
) -> Result<TrajectoryRecord> {
    let report = fit(field, nbhd)?;
    let cov = pattern_covariance(&extract_patterns(field, nbhd)?, Some(report.params.mu))?;
    let summary = info_summary(&cov, &report.params)?;
    Ok(TrajectoryRecord {
        iteration,
        beta_true,
        beta_hat: report.params.beta,
        phi: summary.phi,
        psi: summary.psi,
        entropy: summary.entropy,
        linfo: summary.l_global,
        asym_var: summary.asym_var,
        beta_star: summary.beta_star,
    })
}

struct EngineOutcome {
    records: Vec<TrajectoryRecord>,
    beta_override: f64,
    fell_back: bool,
}

fn run_engine(
    config: &ScheduleConfig,
    model: &ModelParams,
    nbhd: &NeighborhoodSystem,
    height: usize,
    width: usize,
    hold_window: Option<(usize, usize, PerturbMode)>,
    mut hook: impl FnMut(&Field, &TrajectoryRecord),
) -> Result<EngineOutcome> {
    config.validate()?;
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut field = init_white_noise_from(height, width, model.mu, model.sigma2, &mut rng)?;
    let mut schedule = TriangleSchedule::new(config.beta_start, config.beta_max, config.d_beta);

    let mut records = Vec::with_capacity(config.sweeps / config.record_every + 1);
    let mut beta_override = 0.0;
    let mut fell_back = false;

    for iteration in 1..=config.sweeps {
        let scheduled = schedule.advance();
        let beta_true = match hold_window {
            Some((start, hold, mode)) if iteration >= start && iteration < start + hold => {
                if iteration == start {
                    beta_override = match mode {
                        PerturbMode::Zero => 0.0,
                        PerturbMode::BetaStarMin => {
                            let report = fit(&field, nbhd)?;
                            let cov = pattern_covariance(
                                &extract_patterns(&field, nbhd)?,
                                Some(report.params.mu),
                            )?;
                            match beta_star(&cov) {
                                Ok(Some((lo, _))) => lo,
                                Ok(None) | Err(_) => {
                                    fell_back = true;
                                    0.0
                                }
                            }
                        }
                    };
                }
                beta_override
            }
            _ => scheduled,
        };

        let params = ModelParams {
            mu: model.mu,
            sigma2: model.sigma2,
            beta: beta_true,
        };
        sweep(&mut field, nbhd, &params, SweepMode::Gibbs, &mut rng)?;

        if iteration % config.record_every == 0 {
            let record = measure(&field, nbhd, iteration, beta_true)?;
            hook(&field, &record);
            records.push(record);
        }
    }

    Ok(EngineOutcome {
        records,
        beta_override,
        fell_back,
    })
}

/// Runs the triangle schedule and records the information measures every
/// `record_every` sweeps.
pub fn run_schedule(
    config: &ScheduleConfig,
    model: &ModelParams,
    nbhd: &NeighborhoodSystem,
    height: usize,
    width: usize,
) -> Result<Vec<TrajectoryRecord>> {
    run_schedule_with(config, model, nbhd, height, width, |_, _| {})
}

/// Like [`run_schedule`] but calls `hook` with the field at every record,
/// e.g. to write snapshots.
pub fn run_schedule_with(
    config: &ScheduleConfig,
    model: &ModelParams,
    nbhd: &NeighborhoodSystem,
    height: usize,
    width: usize,
    hook: impl FnMut(&Field, &TrajectoryRecord),
) -> Result<Vec<TrajectoryRecord>> {
    Ok(run_engine(config, model, nbhd, height, width, None, hook)?.records)
}

/// Runs the schedule, overrides the coupling for `hold` sweeps starting at
/// `perturb_at`, then lets the schedule resume. With `hold = 0` the output
/// is identical to [`run_schedule`] under the same seed.
#[allow(clippy::too_many_arguments)]
pub fn perturb_experiment(
    config: &ScheduleConfig,
    model: &ModelParams,
    nbhd: &NeighborhoodSystem,
    height: usize,
    width: usize,
    mode: PerturbMode,
    perturb_at: usize,
    hold: usize,
) -> Result<PerturbReport> {
    config.validate()?;
    if hold > 0 && (perturb_at == 0 || perturb_at > config.sweeps) {
        return Err(Error::InvalidConfig("perturb_at outside the run"));
    }
    let window = if hold > 0 {
        Some((perturb_at, hold, mode))
    } else {
        None
    };
    let outcome = run_engine(config, model, nbhd, height, width, window, |_, _| {})?;
    Ok(PerturbReport {
        records: outcome.records,
        perturb_at,
        hold,
        beta_override: outcome.beta_override,
        fell_back: outcome.fell_back,
    })
}

/// Pre-perturbation coupling and the first post-hold iteration whose fitted
/// coupling is back within 10% of it. `None` when no record precedes the
/// perturbation.
pub fn recovery_iteration(
    records: &[TrajectoryRecord],
    perturb_at: usize,
    hold: usize,
) -> Option<(f64, Option<usize>)> {
    let pre = records
        .iter()
        .rev()
        .find(|r| r.iteration < perturb_at)?
        .beta_hat;
    let recovered = records
        .iter()
        .find(|r| r.iteration >= perturb_at + hold && (r.beta_hat - pre).abs() <= 0.1 * pre.abs())
        .map(|r| r.iteration);
    Some((pre, recovered))
}
