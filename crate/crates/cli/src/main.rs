use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use gmrf_cli::config::{ConfigError, ConfigMap};
use gmrf_cli::csvio::{self, CsvError};
use gmrf_cli::fileio::{self, IoError};
use gmrf_cli::pgm;
use gmrf_cli::sig6;
use gmrf_core as core;
use gmrf_core::{
    Boundary, EstimationReport, Field, GrayImage, InfoMap, ModelParams, NeighborhoodSystem,
    NormalizeMode, PerturbMode, ScheduleConfig, SweepMode, LINFO_EPS,
};

/// Exit codes: 0 success, 2 usage/config, 3 degenerate data, 4 I/O.
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Degenerate(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Degenerate(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<core::Error> for CliError {
    fn from(e: core::Error) -> Self {
        match e {
            core::Error::DegenerateField(_)
            | core::Error::DegenerateCovariance(_)
            | core::Error::InsufficientData(_)
            | core::Error::EmptyPatternSet
            | core::Error::OutOfImageRange { .. } => CliError::Degenerate(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        match e {
            CsvError::Core(c) => c.into(),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "gmrf",
    version,
    about = "Gaussian-Markov random field sampling, estimation, information maps and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a GMRF by seeded MCMC and print the fitted parameters.
    Sample(SampleArgs),
    /// Fit (mu, sigma2, beta) to a field or image by maximum pseudo-likelihood.
    Estimate(EstimateArgs),
    /// Write a local information map (phi, psi or L-information) of an input.
    Infomap(InfomapArgs),
    /// Run the triangle-wave coupling schedule and record measures per sweep.
    Trajectory(TrajectoryArgs),
    /// Trajectory with a coupling override held for a few sweeps.
    Perturb(PerturbArgs),
    /// Add seeded Gaussian noise to an image.
    Noise(NoiseArgs),
    /// Write the absolute Laplacian response of an image.
    Laplacian(LaplacianArgs),
    /// Print the base-2 histogram entropy of an image.
    HistEntropy(HistEntropyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Gibbs,
    Metropolis,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Toroidal,
    Interior,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Toroidal => Boundary::Toroidal,
            BoundaryArg::Interior => Boundary::InteriorOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Phi,
    Psi,
    Linfo,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Linear,
    Log,
}

impl From<NormArg> for NormalizeMode {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Linear => NormalizeMode::Linear,
            NormArg::Log => NormalizeMode::Log,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbModeArg {
    Zero,
    BetaStar,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, default_value_t = 128)]
    width: usize,
    #[arg(long, default_value_t = 128)]
    height: usize,
    #[arg(long, default_value_t = 2)]
    order: u8,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    sigma2: f64,
    #[arg(long, default_value_t = 0.125, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Gibbs)]
    mode: ModeArg,
    /// Metropolis proposal scale; defaults to sqrt(sigma2).
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Base path: writes <out>.csv and <out>.pgm.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input field: .pgm image or .csv value grid.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    order: u8,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Toroidal)]
    boundary: BoundaryArg,
    /// Alternate the closed-form mean estimator with the coupling estimator.
    #[arg(long)]
    refine_mu: bool,
    /// Print one CSV row instead of the key=value block.
    #[arg(long)]
    csv: bool,
    /// Also write the pattern covariance matrix to this CSV path.
    #[arg(long)]
    cov_out: Option<PathBuf>,
    /// Also write the global information summary row to this CSV path.
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

#[derive(Args)]
struct InfomapArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    order: u8,
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// "auto" fits the parameters first; otherwise "mu,sigma2,beta".
    #[arg(long, default_value = "auto")]
    params: String,
    /// Base path: writes <out>.csv and <out>.pgm.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = NormArg::Linear)]
    norm: NormArg,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Toroidal)]
    boundary: BoundaryArg,
    /// Curvature guard for the L-information ratio.
    #[arg(long, default_value_t = LINFO_EPS)]
    eps: f64,
}

const SCHEDULE_CONFIG_KEYS: &[&str] = &[
    "width",
    "height",
    "order",
    "mu",
    "sigma2",
    "beta-start",
    "beta-max",
    "dbeta",
    "sweeps",
    "record-every",
    "seed",
    "out",
    "snapshots",
    "replicates",
    "mode",
    "at",
    "hold",
];

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long)]
    order: Option<u8>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dbeta: Option<f64>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    record_every: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a normalized PGM and a raw CSV of the field at every record.
    #[arg(long)]
    snapshots: bool,
    /// Flat key=value config file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
}

/// Schedule flags resolved against the config file and defaults.
struct ResolvedSchedule {
    width: usize,
    height: usize,
    order: u8,
    model: ModelParams,
    config: ScheduleConfig,
    out: PathBuf,
    snapshots: bool,
    replicates: usize,
    seed_drawn: bool,
}

impl ScheduleArgs {
    fn resolve(&self) -> Result<ResolvedSchedule, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = fileio::read_to_string(path)?;
                ConfigMap::parse(&text, SCHEDULE_CONFIG_KEYS)?
            }
            None => ConfigMap::default(),
        };
        let width = file.resolve(self.width, "width", 64)?;
        let height = file.resolve(self.height, "height", 64)?;
        let order = file.resolve(self.order, "order", 1)?;
        let mu = file.resolve(self.mu, "mu", 0.0)?;
        let sigma2 = file.resolve(self.sigma2, "sigma2", 5.0)?;
        let beta_start = file.resolve(self.beta_start, "beta-start", 0.0)?;
        let beta_max = file.resolve(self.beta_max, "beta-max", 0.15)?;
        let d_beta = file.resolve(self.dbeta, "dbeta", 0.001)?;
        let sweeps = file.resolve(self.sweeps, "sweeps", 600)?;
        let record_every = file.resolve(self.record_every, "record-every", 1)?;
        let seed = file.resolve_opt(self.seed, "seed")?;
        let snapshots = self.snapshots || file.resolve(None, "snapshots", false)?;
        let replicates = file.resolve(self.replicates, "replicates", 1)?;
        let out = match self.out.clone() {
            Some(p) => p,
            None => file
                .resolve_opt::<PathBuf>(None, "out")?
                .ok_or_else(|| CliError::Usage("missing --out (or out= in config)".into()))?,
        };
        if replicates == 0 {
            return Err(CliError::Usage("replicates must be >= 1".into()));
        }
        let (seed, seed_drawn) = draw_seed(seed);
        let model = ModelParams::new(mu, sigma2, 0.0)?;
        let config = ScheduleConfig {
            beta_start,
            beta_max,
            d_beta,
            sweeps,
            record_every,
            seed,
        };
        config.validate()?;
        Ok(ResolvedSchedule {
            width,
            height,
            order,
            model,
            config,
            out,
            snapshots,
            replicates,
            seed_drawn,
        })
    }
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    schedule: ScheduleArgs,
}

#[derive(Args)]
struct PerturbArgs {
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[arg(long, value_enum)]
    mode: Option<PerturbModeArg>,
    /// Iteration at which the override starts.
    #[arg(long)]
    at: Option<usize>,
    /// Override length in sweeps.
    #[arg(long)]
    hold: Option<usize>,
}

#[derive(Args)]
struct NoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    sigma_n: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LaplacianArgs {
    #[arg(long)]
    input: PathBuf,
    /// Base path: writes <out>.csv and <out>.pgm.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = NormArg::Linear)]
    norm: NormArg,
}

#[derive(Args)]
struct HistEntropyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 256)]
    bins: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Infomap(a) => cmd_infomap(a),
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Perturb(a) => cmd_perturb(a),
        Command::Noise(a) => cmd_noise(a),
        Command::Laplacian(a) => cmd_laplacian(a),
        Command::HistEntropy(a) => cmd_hist_entropy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Degenerate(_) => EXIT_DEGENERATE,
                CliError::Io(_) => EXIT_IO,
            })
        }
    }
}

fn draw_seed(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (rand::rng().random(), true),
    }
}

fn load_field(path: &Path) -> Result<Field, CliError> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
    {
        Ok(pgm::read_pgm(path)?.into_field())
    } else {
        Ok(csvio::read_field_csv(path)?)
    }
}

fn load_image(path: &Path) -> Result<GrayImage, CliError> {
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
    {
        Ok(pgm::read_pgm(path)?)
    } else {
        Ok(GrayImage::new(csvio::read_field_csv(path)?)?)
    }
}

fn report_lines(report: &EstimationReport) -> Vec<String> {
    vec![
        format!("n={}", report.n_sites),
        format!("k={}", report.k),
        format!("mu={}", sig6(report.params.mu)),
        format!("sigma2={}", sig6(report.params.sigma2)),
        format!("beta={}", sig6(report.params.beta)),
        format!("score={}", sig6(report.score_at_beta)),
    ]
}

fn with_extension(base: &Path, ext: &str) -> PathBuf {
    let mut p = base.to_path_buf();
    p.set_extension(ext);
    p
}

fn cmd_sample(args: SampleArgs) -> Result<(), CliError> {
    let nbhd = NeighborhoodSystem::toroidal(args.order)?;
    let model = ModelParams::new(args.mu, args.sigma2, args.beta)?;
    let (base_seed, drawn) = draw_seed(args.seed);
    if drawn {
        println!("seed={base_seed}");
    }
    let mode = match args.mode {
        ModeArg::Gibbs => SweepMode::Gibbs,
        ModeArg::Metropolis => match args.tau {
            Some(tau) => SweepMode::Metropolis { tau },
            None => SweepMode::metropolis_default(args.sigma2),
        },
    };
    if args.replicates == 0 {
        return Err(CliError::Usage("replicates must be >= 1".into()));
    }

    let run_one = |replicate: usize| -> Result<Vec<String>, CliError> {
        use rand::SeedableRng;
        let seed = base_seed.wrapping_add(replicate as u64);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut field = core::sampler::init_white_noise_from(
            args.height,
            args.width,
            args.mu,
            args.sigma2,
            &mut rng,
        )?;
        for _ in 0..args.sweeps {
            core::sweep(&mut field, &nbhd, &model, mode, &mut rng)?;
        }
        let report = core::fit(&field, &nbhd)?;
        let suffix = if args.replicates > 1 {
            format!("_r{replicate}")
        } else {
            String::new()
        };
        let base = fileio::path_with_suffix(&args.out, &suffix);
        csvio::write_field_csv(&with_extension(&base, "csv"), &field)?;
        let image = core::normalize_field(&field, NormalizeMode::Linear);
        pgm::write_pgm(&with_extension(&base, "pgm"), &image)?;
        let mut lines = Vec::new();
        if args.replicates > 1 {
            lines.push(format!("replicate={replicate} seed={seed}"));
        }
        lines.extend(report_lines(&report));
        Ok(lines)
    };

    for lines in run_replicates(args.replicates, run_one)? {
        for line in lines {
            println!("{line}");
        }
    }
    Ok(())
}

/// Runs the replicate closures in parallel and returns their outputs in
/// replicate order.
fn run_replicates<F>(n: usize, run_one: F) -> Result<Vec<Vec<String>>, CliError>
where
    F: Fn(usize) -> Result<Vec<String>, CliError> + Sync,
{
    if n == 1 {
        return Ok(vec![run_one(0)?]);
    }
    let mut slots: Vec<Option<Result<Vec<String>, CliError>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (i, slot) in slots.iter_mut().enumerate() {
            let run_one = &run_one;
            handles.push(scope.spawn(move || {
                *slot = Some(run_one(i));
            }));
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("replicate thread finished"))
        .collect()
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let field = load_field(&args.input)?;
    let nbhd = NeighborhoodSystem::new(args.order, args.boundary.into())?;
    let options = core::FitOptions {
        refine_mu: args.refine_mu,
        ..core::FitOptions::default()
    };
    let report = core::fit_with(&field, &nbhd, options)?;
    if args.cov_out.is_some() || args.summary_out.is_some() {
        let cov = core::pattern_covariance(
            &core::extract_patterns(&field, &nbhd)?,
            Some(report.params.mu),
        )?;
        if let Some(cov_path) = &args.cov_out {
            fileio::write_atomic(cov_path, csvio::covariance_to_csv(&cov).as_bytes())?;
        }
        if let Some(summary_path) = &args.summary_out {
            let summary = core::info_summary(&cov, &report.params)?;
            let text = format!(
                "{}\n{}\n",
                csvio::SUMMARY_HEADER,
                csvio::summary_to_csv_row(&summary)
            );
            fileio::write_atomic(summary_path, text.as_bytes())?;
        }
    }
    if args.csv {
        println!("{}", csvio::REPORT_HEADER);
        println!("{}", csvio::report_to_csv_row(&report));
    } else {
        for line in report_lines(&report) {
            println!("{line}");
        }
    }
    Ok(())
}

fn parse_params(
    raw: &str,
    field: &Field,
    nbhd: &NeighborhoodSystem,
) -> Result<ModelParams, CliError> {
    if raw == "auto" {
        return Ok(core::fit(field, nbhd)?.params);
    }
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(
            "--params must be \"auto\" or \"mu,sigma2,beta\"".into(),
        ));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|e| CliError::Usage(format!("bad --params: {e}")))?;
    Ok(ModelParams::new(nums[0], nums[1], nums[2])?)
}

fn cmd_infomap(args: InfomapArgs) -> Result<(), CliError> {
    let field = load_field(&args.input)?;
    let nbhd = NeighborhoodSystem::new(args.order, args.boundary.into())?;
    let params = parse_params(&args.params, &field, &nbhd)?;
    let (label, map): (&str, InfoMap) = match args.measure {
        MeasureArg::Phi => ("phi", core::local_phi_map(&field, &nbhd, &params)?),
        MeasureArg::Psi => ("psi", core::local_psi_map(&field, &nbhd, &params)?),
        MeasureArg::Linfo => {
            let phi = core::local_phi_map(&field, &nbhd, &params)?;
            let psi = core::local_psi_map(&field, &nbhd, &params)?;
            ("linfo", core::l_information_map(&phi, &psi, args.eps)?)
        }
    };
    fileio::write_atomic(
        &with_extension(&args.out, "csv"),
        csvio::infomap_to_csv(&map).as_bytes(),
    )?;
    pgm::write_pgm(
        &with_extension(&args.out, "pgm"),
        &core::normalize_map(&map, args.norm.into()),
    )?;
    println!("{label}_mean={}", sig6(map.mean()));
    Ok(())
}

fn snapshot_hook<'a>(
    base: &'a Path,
    enabled: bool,
) -> impl FnMut(&Field, &core::TrajectoryRecord) + 'a {
    move |field, record| {
        if !enabled {
            return;
        }
        let stem = base.with_extension("");
        let tag = format!("{}_iter{:06}", stem.display(), record.iteration);
        let image = core::normalize_field(field, NormalizeMode::Linear);
        let _ = pgm::write_pgm(Path::new(&format!("{tag}.pgm")), &image);
        let _ = fileio::write_atomic(
            Path::new(&format!("{tag}.csv")),
            csvio::field_to_csv(field).as_bytes(),
        );
    }
}

fn cmd_trajectory(args: TrajectoryArgs) -> Result<(), CliError> {
    let resolved = args.schedule.resolve()?;
    if resolved.seed_drawn {
        println!("seed={}", resolved.config.seed);
    }
    let nbhd = NeighborhoodSystem::toroidal(resolved.order)?;

    let run_one = |replicate: usize| -> Result<Vec<String>, CliError> {
        let mut config = resolved.config;
        config.seed = config.seed.wrapping_add(replicate as u64);
        let suffix = if resolved.replicates > 1 {
            format!("_r{replicate}")
        } else {
            String::new()
        };
        let out = fileio::path_with_suffix(&resolved.out, &suffix);
        let records = core::run_schedule_with(
            &config,
            &resolved.model,
            &nbhd,
            resolved.height,
            resolved.width,
            snapshot_hook(&out, resolved.snapshots),
        )?;
        fileio::write_atomic(&out, csvio::trajectory_to_csv(&records).as_bytes())?;
        Ok(vec![format!(
            "records={} seed={} out={}",
            records.len(),
            config.seed,
            out.display()
        )])
    };

    for lines in run_replicates(resolved.replicates, run_one)? {
        for line in lines {
            println!("{line}");
        }
    }
    Ok(())
}

fn cmd_perturb(args: PerturbArgs) -> Result<(), CliError> {
    let resolved = args.schedule.resolve()?;
    if resolved.seed_drawn {
        println!("seed={}", resolved.config.seed);
    }
    let file = match &args.schedule.config {
        Some(path) => {
            let text = fileio::read_to_string(path)?;
            ConfigMap::parse(&text, SCHEDULE_CONFIG_KEYS)?
        }
        None => ConfigMap::default(),
    };
    let mode_arg = match args.mode {
        Some(m) => m,
        None => match file.resolve_opt::<String>(None, "mode")?.as_deref() {
            Some("zero") => PerturbModeArg::Zero,
            Some("beta-star") => PerturbModeArg::BetaStar,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "mode must be zero or beta-star, got {other:?}"
                )))
            }
            None => return Err(CliError::Usage("missing --mode".into())),
        },
    };
    let at = file
        .resolve_opt(args.at, "at")?
        .ok_or_else(|| CliError::Usage("missing --at".into()))?;
    let hold = file.resolve(args.hold, "hold", 5)?;
    let mode = match mode_arg {
        PerturbModeArg::Zero => PerturbMode::Zero,
        PerturbModeArg::BetaStar => PerturbMode::BetaStarMin,
    };
    let nbhd = NeighborhoodSystem::toroidal(resolved.order)?;
    let report = core::perturb_experiment(
        &resolved.config,
        &resolved.model,
        &nbhd,
        resolved.height,
        resolved.width,
        mode,
        at,
        hold,
    )?;
    if report.fell_back {
        eprintln!(
            "note: equilibrium coupling unavailable at iteration {at}; fell back to zero mode"
        );
    }
    fileio::write_atomic(
        &resolved.out,
        csvio::trajectory_to_csv(&report.records).as_bytes(),
    )?;
    let summary = match core::recovery_iteration(&report.records, at, hold) {
        Some((pre, Some(iter))) => format!(
            "pre_beta={} recovered_at={iter} recovery_sweeps={}",
            sig6(pre),
            iter - (at + hold)
        ),
        Some((pre, None)) => format!("pre_beta={} recovered_at=none", sig6(pre)),
        None => "pre_beta=none".to_string(),
    };
    println!(
        "mode={} at={at} hold={hold} beta_override={} fell_back={} {summary}",
        match mode {
            PerturbMode::Zero => "zero",
            PerturbMode::BetaStarMin => "beta-star",
        },
        sig6(report.beta_override),
        report.fell_back,
    );
    Ok(())
}

fn cmd_noise(args: NoiseArgs) -> Result<(), CliError> {
    let image = load_image(&args.input)?;
    let (seed, drawn) = draw_seed(args.seed);
    if drawn {
        println!("seed={seed}");
    }
    let noisy = core::add_gaussian_noise(&image, args.sigma_n, seed)?;
    pgm::write_pgm(&args.out, &noisy)?;
    Ok(())
}

fn cmd_laplacian(args: LaplacianArgs) -> Result<(), CliError> {
    let image = load_image(&args.input)?;
    let map = core::laplacian_map(&image);
    fileio::write_atomic(
        &with_extension(&args.out, "csv"),
        csvio::infomap_to_csv(&map).as_bytes(),
    )?;
    pgm::write_pgm(
        &with_extension(&args.out, "pgm"),
        &core::normalize_map(&map, args.norm.into()),
    )?;
    println!("laplacian_mean={}", sig6(map.mean()));
    Ok(())
}

fn cmd_hist_entropy(args: HistEntropyArgs) -> Result<(), CliError> {
    let image = load_image(&args.input)?;
    let bits = core::histogram_entropy(image.field(), args.bins)?;
    println!("hist_entropy_bits={}", sig6(bits));
    Ok(())
}
