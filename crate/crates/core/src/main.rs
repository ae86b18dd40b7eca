//! `bbdrag` command line: coefficient tables, temperature sweeps, drag
//! curves, Langevin and Fokker–Planck runs, and Galilean frame arithmetic,
//! each with a replayable run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bbdrag::atom::TwoLevelAtom;
use bbdrag::constants::{PhysicalConstants, UnitSystem};
use bbdrag::drag::drag_curve;
use bbdrag::error::Error;
use bbdrag::fokker_planck::{evolve, DistributionState, EvolveOptions, MomentumGrid};
use bbdrag::frame;
use bbdrag::langevin::{
    run_ensemble, InitialMomentum, SampleSchedule, SimConfig, Stepper, TrajectoryStats,
};
use bbdrag::manifest::{
    CoeffsJob, DragcurveJob, FpInitial, FpsolveJob, JobSpec, RunManifest, SimulateJob, SweepJob,
    SweepScale,
};
use bbdrag::output::{
    read_snapshot_csv, write_dragcurve_csv, write_histograms_csv, write_moments_csv,
    write_snapshot_csv, write_sweep_csv, SweepRow,
};
use bbdrag::species::Species;
use bbdrag::stats::ks_vs_tabulated_density;
use bbdrag::thermal::ThermalEnvironment;
use bbdrag::transport::{
    level_populations, multilevel_breakdown, multilevel_coefficients, CoefficientSource,
    TransportCoefficients,
};

const EXIT_CODE_HELP: &str = "EXIT CODES:\n  \
    0  success\n  \
    2  parse error (flags, species file, manifest)\n  \
    3  domain error (invalid physical input)\n  \
    4  numerical failure (grid too narrow, non-finite trajectory)\n  \
    5  i/o error";

#[derive(Parser)]
#[command(
    name = "bbdrag",
    version,
    about = "Damping and diffusion of atoms in a thermal electromagnetic background",
    after_help = EXIT_CODE_HELP
)]
struct Cli {
    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients gamma and D for a species at one temperature.
    Coeffs(CoeffsArgs),
    /// Tabulate gamma, D and the Einstein residual over a temperature range.
    Sweep(SweepArgs),
    /// Exact (non-linearized) drag force over a speed grid.
    Dragcurve(DragcurveArgs),
    /// Langevin ensemble of the momentum process.
    Simulate(SimulateArgs),
    /// Fokker-Planck evolution of the 1D momentum distribution.
    Fpsolve(FpsolveArgs),
    /// Galilean frame arithmetic: lab force, compensating force, inference.
    Frame(FrameArgs),
    /// Re-execute a run from its manifest; outputs are byte-identical.
    Replay(ReplayArgs),
}

/// Temperature flags; exactly one form, and it must match the species'
/// unit system so kelvin never silently feeds a natural-unit formula.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TempArgs {
    /// Temperature in kelvin (SI species only). 0 is the limiting query.
    #[arg(long)]
    temperature_kelvin: Option<f64>,
    /// Temperature in natural units, k_B = 1 (natural species only).
    #[arg(long)]
    temperature_natural: Option<f64>,
    /// Dimensionless beta*hbar*omega at the species' lowest transition gap.
    #[arg(long)]
    beta_homega: Option<f64>,
}

impl TempArgs {
    fn resolve(&self, species: &Species) -> Result<ThermalEnvironment, Error> {
        let consts = species.constants();
        match (
            self.temperature_kelvin,
            self.temperature_natural,
            self.beta_homega,
        ) {
            (Some(t), None, None) => {
                if species.units != UnitSystem::Si {
                    return Err(Error::domain(
                        "--temperature-kelvin requires an SI-unit species; \
                         use --temperature-natural or --beta-homega",
                    ));
                }
                ThermalEnvironment::new(t, &consts)
            }
            (None, Some(t), None) => {
                if species.units != UnitSystem::Natural {
                    return Err(Error::domain(
                        "--temperature-natural requires a natural-unit species; \
                         use --temperature-kelvin or --beta-homega",
                    ));
                }
                ThermalEnvironment::new(t, &consts)
            }
            (None, None, Some(x)) => {
                let omega_ref = species.reference_frequency().ok_or_else(|| {
                    Error::domain("--beta-homega needs a species with at least one transition")
                })?;
                ThermalEnvironment::from_beta_hbar_omega(x, omega_ref, &consts)
            }
            _ => unreachable!("clap group enforces exactly one temperature flag"),
        }
    }
}

#[derive(Args)]
struct CoeffsArgs {
    /// Species registry file (JSON).
    #[arg(long)]
    species: PathBuf,
    #[command(flatten)]
    temperature: TempArgs,
    /// Also write coeffs.json and manifest.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    species: PathBuf,
    /// Lowest temperature, in the species' own units (K or natural).
    #[arg(long)]
    t_min: f64,
    /// Highest temperature, same units.
    #[arg(long)]
    t_max: f64,
    #[arg(long)]
    n_points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    scale: ScaleArg,
    /// Output directory for sweep.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DragcurveArgs {
    /// Species registry file; must reduce to a two-level atom.
    #[arg(long)]
    species: PathBuf,
    #[command(flatten)]
    temperature: TempArgs,
    /// Lowest speed, in the species' units (m/s in SI, c = 1 natural).
    #[arg(long)]
    v_min: f64,
    #[arg(long)]
    v_max: f64,
    #[arg(long)]
    n_points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    scale: ScaleArg,
    /// Output directory for dragcurve.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StepperArg {
    EulerMaruyama,
    ExactOu,
}

impl From<StepperArg> for Stepper {
    fn from(s: StepperArg) -> Self {
        match s {
            StepperArg::EulerMaruyama => Stepper::EulerMaruyama,
            StepperArg::ExactOu => Stepper::ExactOu,
        }
    }
}

#[derive(Args)]
struct CoefficientSourceArgs {
    /// Species registry file; gamma and D derived at the given temperature.
    #[arg(long, requires = "tempflag")]
    species: Option<PathBuf>,
    #[arg(long, group = "tempflag")]
    temperature_kelvin: Option<f64>,
    #[arg(long, group = "tempflag")]
    temperature_natural: Option<f64>,
    #[arg(long, group = "tempflag")]
    beta_homega: Option<f64>,
    /// Damping rate, given directly (conflicts with --species).
    #[arg(long, conflicts_with = "species", requires = "diffusion")]
    gamma: Option<f64>,
    /// Per-component diffusion coefficient, given directly.
    #[arg(long, conflicts_with = "species", requires = "gamma")]
    diffusion: Option<f64>,
    /// Unit system tag for directly supplied coefficients.
    #[arg(long, value_enum, default_value_t = UnitsArg::Natural, conflicts_with = "species")]
    units: UnitsArg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum UnitsArg {
    Si,
    Natural,
}

impl From<UnitsArg> for UnitSystem {
    fn from(u: UnitsArg) -> Self {
        match u {
            UnitsArg::Si => UnitSystem::Si,
            UnitsArg::Natural => UnitSystem::Natural,
        }
    }
}

struct ResolvedCoefficients {
    coefficients: TransportCoefficients,
    unit_system: UnitSystem,
    mass: Option<f64>,
    species_name: Option<String>,
    temperature: Option<f64>,
}

impl CoefficientSourceArgs {
    fn resolve(&self) -> Result<ResolvedCoefficients, Error> {
        match (&self.species, self.gamma, self.diffusion) {
            (Some(path), None, None) => {
                let species = Species::from_path(path)?;
                let temp = TempArgs {
                    temperature_kelvin: self.temperature_kelvin,
                    temperature_natural: self.temperature_natural,
                    beta_homega: self.beta_homega,
                };
                let env = temp.resolve(&species)?;
                let coefficients = multilevel_coefficients(
                    &species.atom,
                    &env,
                    &species.constants(),
                    species.units,
                )?;
                Ok(ResolvedCoefficients {
                    coefficients,
                    unit_system: species.units,
                    mass: Some(species.atom.mass()),
                    species_name: Some(species.name.clone()),
                    temperature: Some(env.temperature()),
                })
            }
            (None, Some(gamma), Some(diffusion)) => {
                let unit_system: UnitSystem = self.units.into();
                Ok(ResolvedCoefficients {
                    coefficients: TransportCoefficients::new(
                        gamma,
                        diffusion,
                        unit_system,
                        CoefficientSource::External,
                    )?,
                    unit_system,
                    mass: None,
                    species_name: None,
                    temperature: None,
                })
            }
            _ => Err(Error::domain(
                "specify either --species with a temperature flag, or --gamma with --diffusion",
            )),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: CoefficientSourceArgs,
    /// Atom mass; defaults to the species' mass when --species is used.
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    trajectories: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial delta momentum "px,py,pz" (default 0,0,0).
    #[arg(long, value_parser = parse_triple, conflicts_with = "initial_variance")]
    p0: Option<[f64; 3]>,
    /// Initial isotropic Gaussian with this per-component variance.
    #[arg(long)]
    initial_variance: Option<f64>,
    /// Lab velocity "ux,uy,uz" relative to the background.
    #[arg(long, value_parser = parse_triple)]
    drift_velocity: Option<[f64; 3]>,
    /// Constant applied force "fx,fy,fz".
    #[arg(long, value_parser = parse_triple, conflicts_with = "compensate")]
    external_force: Option<[f64; 3]>,
    /// Apply the compensating force gamma*M*u (requires --drift-velocity).
    #[arg(long, requires = "drift_velocity")]
    compensate: bool,
    #[arg(long, value_enum, default_value_t = StepperArg::EulerMaruyama)]
    stepper: StepperArg,
    /// Number of linearly spaced sample times.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Add this many log-spaced sample times starting at the first step.
    #[arg(long)]
    log_samples: Option<usize>,
    #[arg(long, default_value_t = 101)]
    histogram_bins: usize,
    /// Output directory for moments.csv, histograms.csv, manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Compare the final per-component momentum distribution against a
    /// Fokker-Planck snapshot (KS statistic per component).
    #[arg(long)]
    compare_fp: Option<PathBuf>,
}

#[derive(Args)]
struct FpsolveArgs {
    #[command(flatten)]
    source: CoefficientSourceArgs,
    #[arg(long)]
    p_min: f64,
    #[arg(long)]
    p_max: f64,
    #[arg(long)]
    grid_points: usize,
    #[arg(long)]
    t_target: f64,
    /// Fixed number of Crank-Nicolson steps (default: accuracy heuristic).
    #[arg(long)]
    fp_steps: Option<usize>,
    /// Initial Gaussian "mean,variance".
    #[arg(long, value_parser = parse_pair, conflicts_with = "initial_delta")]
    initial_gaussian: Option<[f64; 2]>,
    /// Initial delta at this momentum.
    #[arg(long)]
    initial_delta: Option<f64>,
    /// Output directory for snapshot.csv and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FrameArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    mass: f64,
    /// Lab velocity "ux,uy,uz" relative to the background.
    #[arg(long, value_parser = parse_triple)]
    u: [f64; 3],
    /// Atom velocity "vx,vy,vz" relative to the lab (default 0,0,0).
    #[arg(long, value_parser = parse_triple)]
    v_prime: Option<[f64; 3]>,
    /// Infer the lab velocity from this measured compensating force.
    #[arg(long, value_parser = parse_triple)]
    infer_from_force: Option<[f64; 3]>,
    /// Unit system: sets c for the nonrelativistic |u| guard.
    #[arg(long, value_enum, default_value_t = UnitsArg::Natural)]
    units: UnitsArg,
    /// Write frame.json here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for the re-executed run.
    #[arg(long)]
    out: PathBuf,
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component '{p}': {e}"))?;
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got '{s}'"));
    }
    Ok([
        parts[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component '{}': {e}", parts[0]))?,
        parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| format!("bad component '{}': {e}", parts[1]))?,
    ])
}

fn value_grid(min: f64, max: f64, n: usize, scale: ScaleArg) -> Result<Vec<f64>, Error> {
    if n == 0 {
        return Err(Error::domain("n_points must be >= 1"));
    }
    if n == 1 {
        return Ok(vec![min]);
    }
    if !(min < max) {
        return Err(Error::domain(format!(
            "need min < max, got {min} and {max}"
        )));
    }
    match scale {
        ScaleArg::Linear => Ok((0..n)
            .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
            .collect()),
        ScaleArg::Log => {
            if !(min > 0.0) {
                return Err(Error::domain("log scale requires min > 0"));
            }
            let ratio = max / min;
            Ok((0..n)
                .map(|i| min * ratio.powf(i as f64 / (n - 1) as f64))
                .collect())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let exit = match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Species(_) | Error::Json(_) => 2,
                Error::Domain(_) => 3,
                Error::GridTooNarrow { .. }
                | Error::NonFiniteTrajectory { .. }
                | Error::Numerical(_) => 4,
                Error::Io(_) => 5,
            }
        }
    };
    std::process::exit(exit);
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(threads) = cli.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Numerical(format!("cannot build thread pool: {e}")))?;
        pool.install(|| dispatch(cli.command))
    } else {
        dispatch(cli.command)
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Dragcurve(args) => cmd_dragcurve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fpsolve(args) => cmd_fpsolve(args),
        Command::Frame(args) => cmd_frame(args),
        Command::Replay(args) => cmd_replay(args),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn finish_with_manifest(job: JobSpec, out_dir: &Path, started: Instant) -> Result<(), Error> {
    let manifest = RunManifest::new(job, started.elapsed().as_secs_f64());
    manifest.write(&out_dir.join("manifest.json"))
}

// ---------------------------------------------------------------------------
// coeffs

#[derive(Serialize)]
struct CoeffsReport {
    species: String,
    unit_system: UnitSystem,
    temperature: f64,
    zero_temperature: bool,
    transitions: Vec<TransitionLine>,
    level_populations: Vec<f64>,
    gamma: f64,
    diffusion: f64,
    einstein_residual: f64,
}

#[derive(Serialize)]
struct TransitionLine {
    upper: usize,
    lower: usize,
    omega: f64,
    gamma_sp: f64,
    occupation: f64,
    pair_weight: f64,
    /// gamma contribution normalized by Gamma_sp/(3M).
    gamma_normalized: f64,
}

fn coeffs_report(job: &CoeffsJob) -> Result<CoeffsReport, Error> {
    let species = &job.species;
    let consts = species.constants();
    let env = ThermalEnvironment::new(job.temperature, &consts)?;
    let coefficients = multilevel_coefficients(&species.atom, &env, &consts, species.units)?;
    let breakdown = multilevel_breakdown(&species.atom, &env, &consts)?;
    let populations = level_populations(&species.atom, &env)?;
    let mass = species.atom.mass();
    let transitions = breakdown
        .iter()
        .map(|r| TransitionLine {
            upper: r.upper,
            lower: r.lower,
            omega: r.omega,
            gamma_sp: r.gamma_sp,
            occupation: r.occupation,
            pair_weight: r.pair_weight,
            gamma_normalized: r.gamma_contribution / (r.gamma_sp / (3.0 * mass)),
        })
        .collect();
    Ok(CoeffsReport {
        species: species.name.clone(),
        unit_system: species.units,
        temperature: env.temperature(),
        zero_temperature: env.is_zero_temperature(),
        transitions,
        level_populations: populations,
        gamma: coefficients.gamma,
        diffusion: coefficients.diffusion,
        einstein_residual: coefficients.einstein_residual(mass, &env, &consts),
    })
}

fn print_coeffs_report(report: &CoeffsReport) {
    println!(
        "species: {} ({} units), T = {}",
        report.species, report.unit_system, report.temperature
    );
    if report.zero_temperature {
        println!("note: zero-temperature query; all thermal factors vanish");
    }
    println!("transition  omega  Gamma_sp  n(omega)  pair_weight  gamma/(Gamma/3M)");
    for t in &report.transitions {
        println!(
            "{}->{}  {}  {}  {}  {}  {}",
            t.upper, t.lower, t.omega, t.gamma_sp, t.occupation, t.pair_weight, t.gamma_normalized
        );
    }
    let rho: Vec<String> = report
        .level_populations
        .iter()
        .map(|r| r.to_string())
        .collect();
    println!("level_populations: {}", rho.join(", "));
    println!("gamma = {}", report.gamma);
    println!("D = {}", report.diffusion);
    println!("einstein_residual = {}", report.einstein_residual);
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<(), Error> {
    let started = Instant::now();
    let species = Species::from_path(&args.species)?;
    let env = args.temperature.resolve(&species)?;
    let job = CoeffsJob {
        species,
        temperature: env.temperature(),
    };
    let report = coeffs_report(&job)?;
    print_coeffs_report(&report);
    if let Some(out) = &args.out {
        ensure_out_dir(out)?;
        std::fs::write(
            out.join("coeffs.json"),
            serde_json::to_string_pretty(&report)? + "\n",
        )?;
        finish_with_manifest(JobSpec::Coeffs(job), out, started)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

fn sweep_rows(job: &SweepJob) -> Result<Vec<SweepRow>, Error> {
    if !(job.t_min > 0.0) {
        return Err(Error::domain(format!(
            "sweep requires t_min > 0, got {}",
            job.t_min
        )));
    }
    let scale = match job.scale {
        SweepScale::Linear => ScaleArg::Linear,
        SweepScale::Log => ScaleArg::Log,
    };
    let temperatures = value_grid(job.t_min, job.t_max, job.n_points, scale)?;
    let consts = job.species.constants();
    let mass = job.species.atom.mass();
    let mut rows = Vec::with_capacity(temperatures.len());
    for t in temperatures {
        let env = ThermalEnvironment::new(t, &consts)?;
        let coeffs = multilevel_coefficients(&job.species.atom, &env, &consts, job.species.units)?;
        rows.push(SweepRow {
            temperature: t,
            gamma: coeffs.gamma,
            diffusion: coeffs.diffusion,
            einstein_residual: coeffs.einstein_residual(mass, &env, &consts),
        });
    }
    Ok(rows)
}

fn execute_sweep(job: &SweepJob, out_dir: &Path) -> Result<(), Error> {
    let rows = sweep_rows(job)?;
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows)?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let started = Instant::now();
    let species = Species::from_path(&args.species)?;
    let job = SweepJob {
        species,
        t_min: args.t_min,
        t_max: args.t_max,
        n_points: args.n_points,
        scale: match args.scale {
            ScaleArg::Linear => SweepScale::Linear,
            ScaleArg::Log => SweepScale::Log,
        },
    };
    ensure_out_dir(&args.out)?;
    execute_sweep(&job, &args.out)?;
    finish_with_manifest(JobSpec::Sweep(job), &args.out, started)
}

// ---------------------------------------------------------------------------
// dragcurve

fn execute_dragcurve(job: &DragcurveJob, out_dir: &Path) -> Result<(), Error> {
    let consts = job.species.constants();
    let atom: TwoLevelAtom = job.species.as_two_level().ok_or_else(|| {
        Error::domain(
            "dragcurve requires a species with exactly two levels and one transition",
        )
    })?;
    let env = ThermalEnvironment::new(job.temperature, &consts)?;
    let curve = drag_curve(&atom, &env, &job.speeds, &consts)?;
    write_dragcurve_csv(&out_dir.join("dragcurve.csv"), &curve)?;
    Ok(())
}

fn cmd_dragcurve(args: DragcurveArgs) -> Result<(), Error> {
    let started = Instant::now();
    let species = Species::from_path(&args.species)?;
    let env = args.temperature.resolve(&species)?;
    let speeds = value_grid(args.v_min, args.v_max, args.n_points, args.scale)?;
    let job = DragcurveJob {
        species,
        temperature: env.temperature(),
        speeds,
    };
    ensure_out_dir(&args.out)?;
    execute_dragcurve(&job, &args.out)?;
    finish_with_manifest(JobSpec::Dragcurve(job), &args.out, started)
}

// ---------------------------------------------------------------------------
// simulate

fn execute_simulate(job: &SimulateJob, out_dir: &Path) -> Result<TrajectoryStats, Error> {
    for warning in job.sim.validate()? {
        eprintln!("warning: {warning}");
    }
    let stats = run_ensemble(&job.sim)?;
    write_moments_csv(&out_dir.join("moments.csv"), &stats)?;
    write_histograms_csv(&out_dir.join("histograms.csv"), &stats.histograms)?;
    Ok(stats)
}

#[derive(Serialize)]
struct FpCompareReport {
    snapshot: PathBuf,
    ks_statistic: [f64; 3],
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    let started = Instant::now();
    let resolved = args.source.resolve()?;
    let mass = match (args.mass, resolved.mass) {
        (Some(m), _) => m,
        (None, Some(m)) => m,
        (None, None) => {
            return Err(Error::domain(
                "--mass is required when coefficients are given directly",
            ))
        }
    };
    let initial = match (args.p0, args.initial_variance) {
        (Some(p0), None) => InitialMomentum::Delta { p0 },
        (None, Some(variance)) => InitialMomentum::IsotropicGaussian { variance },
        (None, None) => InitialMomentum::Delta { p0: [0.0; 3] },
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let external_force = if args.compensate {
        let u = args
            .drift_velocity
            .expect("clap requires drift_velocity with --compensate");
        Some(frame::compensating_force(
            resolved.coefficients.gamma,
            mass,
            u,
        ))
    } else {
        args.external_force
    };
    let schedule = match args.log_samples {
        None => SampleSchedule::Linear {
            n_samples: args.samples,
        },
        Some(n_geometric) => SampleSchedule::Hybrid {
            n_linear: args.samples,
            n_geometric,
            first_step: 1,
        },
    };
    let job = SimulateJob {
        sim: SimConfig {
            dt: args.dt,
            n_steps: args.steps,
            n_trajectories: args.trajectories,
            seed: args.seed,
            initial,
            coefficients: resolved.coefficients,
            mass,
            drift_velocity: args.drift_velocity,
            external_force,
            stepper: args.stepper.into(),
            schedule,
            histogram_bins: args.histogram_bins,
        },
        unit_system: resolved.unit_system,
        species_name: resolved.species_name,
        temperature: resolved.temperature,
    };
    ensure_out_dir(&args.out)?;
    let stats = execute_simulate(&job, &args.out)?;

    if let Some(snapshot_path) = &args.compare_fp {
        let (_, fp_state) = read_snapshot_csv(snapshot_path)?;
        let grid = fp_state.grid.nodes();
        let mut ks = [0.0; 3];
        for c in 0..3 {
            let samples: Vec<f64> = stats.final_momenta.iter().map(|p| p[c]).collect();
            ks[c] = ks_vs_tabulated_density(&samples, &grid, &fp_state.values);
        }
        let report = FpCompareReport {
            snapshot: snapshot_path.clone(),
            ks_statistic: ks,
        };
        println!("ks_vs_fp: {} {} {}", ks[0], ks[1], ks[2]);
        std::fs::write(
            args.out.join("compare.json"),
            serde_json::to_string_pretty(&report)? + "\n",
        )?;
    }
    finish_with_manifest(JobSpec::Simulate(job), &args.out, started)
}

// ---------------------------------------------------------------------------
// fpsolve

fn execute_fpsolve(job: &FpsolveJob, out_dir: &Path) -> Result<DistributionState, Error> {
    let initial = match job.initial {
        FpInitial::Gaussian { mean, variance } => {
            DistributionState::gaussian(job.grid, mean, variance)?
        }
        FpInitial::Delta { p0 } => DistributionState::delta(job.grid, p0)?,
    };
    let final_state = evolve(
        &initial,
        job.gamma,
        job.diffusion,
        job.t_target,
        EvolveOptions {
            n_steps: job.n_steps,
        },
    )?;
    write_snapshot_csv(
        &out_dir.join("snapshot.csv"),
        &final_state,
        job.gamma,
        job.diffusion,
    )?;
    Ok(final_state)
}

fn cmd_fpsolve(args: FpsolveArgs) -> Result<(), Error> {
    let started = Instant::now();
    let resolved = args.source.resolve()?;
    let initial = match (args.initial_gaussian, args.initial_delta) {
        (Some([mean, variance]), None) => FpInitial::Gaussian { mean, variance },
        (None, Some(p0)) => FpInitial::Delta { p0 },
        (None, None) => {
            return Err(Error::domain(
                "specify an initial condition: --initial-gaussian or --initial-delta",
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let job = FpsolveJob {
        gamma: resolved.coefficients.gamma,
        diffusion: resolved.coefficients.diffusion,
        grid: MomentumGrid::new(args.p_min, args.p_max, args.grid_points)?,
        initial,
        t_target: args.t_target,
        n_steps: args.fp_steps,
        unit_system: resolved.unit_system,
    };
    ensure_out_dir(&args.out)?;
    let final_state = execute_fpsolve(&job, &args.out)?;
    println!(
        "t = {}, mass = {}, mean = {}, variance = {}",
        final_state.time,
        final_state.mass(),
        final_state.mean(),
        final_state.variance()
    );
    finish_with_manifest(JobSpec::Fpsolve(job), &args.out, started)
}

// ---------------------------------------------------------------------------
// frame

#[derive(Serialize)]
struct FrameReport {
    gamma: f64,
    mass: f64,
    u: [f64; 3],
    v_prime: [f64; 3],
    lab_frame_force: [f64; 3],
    compensating_force: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    inferred_u: Option<[f64; 3]>,
}

fn cmd_frame(args: FrameArgs) -> Result<(), Error> {
    let consts = PhysicalConstants::for_unit_system(args.units.into());
    let spec = frame::FrameSpec::new(args.u, consts.c)?;
    if !(args.gamma >= 0.0) {
        return Err(Error::domain(format!(
            "gamma must be >= 0, got {}",
            args.gamma
        )));
    }
    if !(args.mass > 0.0) {
        return Err(Error::domain(format!("mass must be > 0, got {}", args.mass)));
    }
    let v_prime = args.v_prime.unwrap_or([0.0; 3]);
    let inferred_u = match args.infer_from_force {
        Some(f) => Some(frame::infer_lab_velocity(f, args.gamma, args.mass)?),
        None => None,
    };
    let report = FrameReport {
        gamma: args.gamma,
        mass: args.mass,
        u: spec.u,
        v_prime,
        lab_frame_force: frame::lab_frame_force(args.gamma, args.mass, spec.u, v_prime),
        compensating_force: frame::compensating_force(args.gamma, args.mass, spec.u),
        inferred_u,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(dir) => {
            ensure_out_dir(dir)?;
            std::fs::write(dir.join("frame.json"), text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// replay

fn cmd_replay(args: ReplayArgs) -> Result<(), Error> {
    let started = Instant::now();
    let manifest = RunManifest::read(&args.manifest)?;
    ensure_out_dir(&args.out)?;
    let job = manifest.job.clone();
    match &job {
        JobSpec::Coeffs(job) => {
            let report = coeffs_report(job)?;
            print_coeffs_report(&report);
            std::fs::write(
                args.out.join("coeffs.json"),
                serde_json::to_string_pretty(&report)? + "\n",
            )?;
        }
        JobSpec::Sweep(job) => execute_sweep(job, &args.out)?,
        JobSpec::Dragcurve(job) => execute_dragcurve(job, &args.out)?,
        JobSpec::Simulate(job) => {
            execute_simulate(job, &args.out)?;
        }
        JobSpec::Fpsolve(job) => {
            execute_fpsolve(job, &args.out)?;
        }
    }
    finish_with_manifest(job, &args.out, started)
}
