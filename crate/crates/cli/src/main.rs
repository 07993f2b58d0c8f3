//! Experiment runner: reproduces the library's example systems as plain-text
//! data tables, runs steady-state sweeps, and drives the validation suites.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use algent::basis::{DensityMatrix, SymBasis};
use algent::dynamics::{
    evolve_lindblad, evolve_schrodinger, steady_state, LindbladGenerator, SteadyStateOptions,
};
use algent::entropy::{entropy_mixed, entropy_pure, EntropyReport};
use algent::models::{
    analytic_entropy_ie, h_boat, h_illustrative, initial_state, leaky_boat, sms,
    InitialStateKind, ModelParams,
};
use algent::ode::{integrate, OdeOptions};
use algent::operators::Slot;
use algent::oracle::{embed_symmetric_state, full_generator, oracle_report, FullSpaceState};
use algent::pyramid::{build_pyramid, read_cache, write_cache, PyramidBasis};
use algent::validation::{run_validation, ValidationConfig};

#[derive(Parser)]
#[command(
    name = "algent",
    version,
    about = "Algebraic entanglement entropy of collective two-level x two-level ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Driven non-interacting ensemble; time axis is Omega*t.
    Illustrative(IllustrativeArgs),
    /// Closed twisting model; time axis is chi*t.
    Boat(BoatArgs),
    /// Twisting model with collective decay; time axis is chi*t.
    LeakyBoat(LeakyBoatArgs),
    /// Purely dissipative spin-momentum superradiance; time axis is Gamma_c*t.
    Sms(SmsArgs),
    /// Steady-state sweep over one model parameter.
    Sweep(SweepArgs),
    /// Run the internal consistency and oracle suites.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Nats,
    Bits,
}

#[derive(Args)]
struct CommonArgs {
    /// Particle number.
    #[arg(long, default_value_t = 8)]
    n: u32,
    /// Horizon on the dimensionless time axis.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of sample points (including both endpoints).
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Output path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    out: String,
    /// Entropy units in the table.
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    units: Units,
    /// Absolute integrator tolerance.
    #[arg(long = "abs-tol", default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative integrator tolerance.
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    rel_tol: f64,
    /// Worker threads for sweeps; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Seed for randomized validation draws.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct IllustrativeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Drive detuning.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Rabi rate.
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
}

#[derive(Args)]
struct BoatArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Twisting rate.
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    /// Also integrate in the full 4^N space and report the worst deviation.
    #[arg(long = "validate-oracle", default_value_t = false)]
    validate_oracle: bool,
}

#[derive(Args)]
struct LeakyBoatArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    /// Collective decay rate.
    #[arg(long = "gamma-c", default_value_t = 1.0)]
    gamma_c: f64,
    /// March to the steady state and emit a single row.
    #[arg(long = "steady-state", default_value_t = false)]
    steady: bool,
}

#[derive(Args)]
struct SmsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "gamma-c", default_value_t = 1.0)]
    gamma_c: f64,
    /// Collective repump rate.
    #[arg(long, default_value_t = 1.0)]
    w: f64,
    #[arg(long = "steady-state", default_value_t = false)]
    steady: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepModel {
    LeakyBoat,
    Sms,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dissipative model whose steady state is swept.
    #[arg(long, value_enum)]
    model: SweepModel,
    /// Parameter to sweep.
    #[arg(long)]
    param: String,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    chi: f64,
    #[arg(long = "gamma-c", default_value_t = 1.0)]
    gamma_c: f64,
    #[arg(long, default_value_t = 1.0)]
    w: f64,
}

#[derive(Args)]
struct ValidateArgs {
    /// Largest particle number exercised by the suites.
    #[arg(long = "n-max", default_value_t = 4)]
    n_max: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Pyramid cache file: validated if present, created otherwise.
    #[arg(long = "pyramid-cache")]
    pyramid_cache: Option<String>,
}

enum AppError {
    Usage(String),
    Numerical(algent::Error),
    Validation(String),
}

impl From<algent::Error> for AppError {
    fn from(e: algent::Error) -> Self {
        match e {
            algent::Error::InvalidParameter(msg) => AppError::Usage(msg),
            other => AppError::Numerical(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Illustrative(args) => run_illustrative(args),
        Command::Boat(args) => run_boat(args),
        Command::LeakyBoat(args) => run_leaky_boat(args),
        Command::Sms(args) => run_sms(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Validate(args) => run_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Numerical(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(AppError::Validation(msg)) => {
            eprintln!("validation failure: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Table {
    meta: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn render(&self, wall: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# algent {}", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.header.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> =
                row.iter().map(|v| format!("{:.12e}", v + 0.0)).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        let _ = writeln!(out, "# wall_time_s = {wall:.3}");
        out
    }
}

fn write_output(path: &str, content: &str) -> Result<(), AppError> {
    if path == "-" {
        std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| AppError::Numerical(e.into()))
    } else {
        fs::write(path, content).map_err(|e| AppError::Numerical(e.into()))
    }
}

fn scale_units(report: &EntropyReport, units: Units) -> [f64; 5] {
    let factor = match units {
        Units::Nats => 1.0,
        Units::Bits => 1.0 / 2f64.ln(),
    };
    [
        report.s_j * factor,
        report.s_k * factor,
        report.s_total * factor,
        report.i_j_given_k * factor,
        report.i_k_given_j * factor,
    ]
}

fn common_meta(common: &CommonArgs, basis: &SymBasis) -> Vec<(String, String)> {
    vec![
        ("n".into(), common.n.to_string()),
        ("samples".into(), common.samples.to_string()),
        ("abs_tol".into(), format!("{:e}", common.abs_tol)),
        ("rel_tol".into(), format!("{:e}", common.rel_tol)),
        (
            "units".into(),
            match common.units {
                Units::Nats => "nats".into(),
                Units::Bits => "bits".into(),
            },
        ),
        ("basis_dim".into(), basis.len().to_string()),
    ]
}

fn check_common(common: &CommonArgs) -> Result<(), AppError> {
    if common.samples < 2 {
        return Err(AppError::Usage("--samples must be at least 2".into()));
    }
    if !(common.abs_tol > 0.0 && common.rel_tol > 0.0) {
        return Err(AppError::Usage("tolerances must be positive".into()));
    }
    Ok(())
}

/// Dimensionless sample grid and the matching physical times.
fn grids(common: &CommonArgs, t_max: f64, rate: f64) -> Result<(Vec<f64>, Vec<f64>), AppError> {
    if t_max <= 0.0 || !t_max.is_finite() {
        return Err(AppError::Usage("--t-max must be positive".into()));
    }
    if rate <= 0.0 {
        return Err(AppError::Usage(
            "the rate that defines the time axis must be positive".into(),
        ));
    }
    let axis: Vec<f64> =
        (0..common.samples).map(|i| i as f64 * t_max / (common.samples - 1) as f64).collect();
    let times = axis.iter().map(|t| t / rate).collect();
    Ok((axis, times))
}

fn ode_options(common: &CommonArgs) -> OdeOptions {
    OdeOptions { atol: common.abs_tol, rtol: common.rel_tol, ..OdeOptions::default() }
}

fn run_illustrative(args: IllustrativeArgs) -> Result<(), AppError> {
    check_common(&args.common)?;
    let start = Instant::now();
    let params = ModelParams {
        n: args.common.n,
        delta: args.delta,
        omega: args.omega,
        ..ModelParams::default()
    };
    params.validate()?;
    let t_max = args.common.t_max.unwrap_or(2.0 * std::f64::consts::PI);
    let basis = SymBasis::new(params.n);
    let (axis, times) = grids(&args.common, t_max, params.omega)?;
    let h = h_illustrative(&basis, &params)?;
    let pyr = build_pyramid(&basis)?;
    let psi0 = initial_state(&basis, InitialStateKind::GroundDown)?;
    let traj = evolve_schrodinger(&h, &psi0, &times, &ode_options(&args.common))?;

    let analytic = args.delta == 0.0;
    let mut table = Table {
        meta: vec![
            ("command".into(), "illustrative".into()),
            ("delta".into(), format!("{:e}", args.delta)),
            ("omega".into(), format!("{:e}", args.omega)),
            ("t_max_omega_t".into(), format!("{t_max:e}")),
        ],
        header: if analytic {
            vec!["omega_t", "s_j", "s_k", "s_total", "i_j_given_k", "i_k_given_j", "s_analytic"]
        } else {
            vec!["omega_t", "s_j", "s_k", "s_total", "i_j_given_k", "i_k_given_j"]
        },
        rows: Vec::new(),
    };
    table.meta.extend(common_meta(&args.common, &basis));
    let unit_factor = if args.common.units == Units::Bits { 1.0 / 2f64.ln() } else { 1.0 };
    for ((state, &x), &t) in traj.states.iter().zip(&axis).zip(&times) {
        let rep = entropy_pure(state, &pyr)?;
        let vals = scale_units(&rep, args.common.units);
        let mut row = vec![x, vals[0], vals[1], vals[2], vals[3], vals[4]];
        if analytic {
            row.push(analytic_entropy_ie(&params, t)? * unit_factor);
        }
        table.rows.push(row);
    }
    write_output(&args.common.out, &table.render(start.elapsed().as_secs_f64()))
}

fn run_boat(args: BoatArgs) -> Result<(), AppError> {
    check_common(&args.common)?;
    let start = Instant::now();
    let params =
        ModelParams { n: args.common.n, chi: args.chi, ..ModelParams::default() };
    params.validate()?;
    if args.validate_oracle && params.n > algent::oracle::ORACLE_CAP {
        return Err(AppError::Numerical(algent::Error::OracleCap {
            n: params.n,
            cap: algent::oracle::ORACLE_CAP,
        }));
    }
    let t_max = args.common.t_max.unwrap_or(std::f64::consts::PI);
    let basis = SymBasis::new(params.n);
    let (axis, times) = grids(&args.common, t_max, params.chi)?;
    let h = h_boat(&basis, &params)?;
    let pyr = build_pyramid(&basis)?;
    let psi0 = initial_state(&basis, InitialStateKind::SuperpositionDown)?;
    let traj = evolve_schrodinger(&h, &psi0, &times, &ode_options(&args.common))?;

    let oracle = if args.validate_oracle {
        Some(boat_oracle_curve(&params, &times, &ode_options(&args.common))?)
    } else {
        None
    };

    let mut table = Table {
        meta: vec![
            ("command".into(), "boat".into()),
            ("chi".into(), format!("{:e}", args.chi)),
            ("t_max_chi_t".into(), format!("{t_max:e}")),
        ],
        header: if oracle.is_some() {
            vec!["chi_t", "s_j", "s_k", "s_total", "i_j_given_k", "i_k_given_j", "s_oracle"]
        } else {
            vec!["chi_t", "s_j", "s_k", "s_total", "i_j_given_k", "i_k_given_j"]
        },
        rows: Vec::new(),
    };
    table.meta.extend(common_meta(&args.common, &basis));
    let unit_factor = if args.common.units == Units::Bits { 1.0 / 2f64.ln() } else { 1.0 };
    let mut worst = 0.0f64;
    for (i, (state, &x)) in traj.states.iter().zip(&axis).enumerate() {
        let rep = entropy_pure(state, &pyr)?;
        let vals = scale_units(&rep, args.common.units);
        let mut row = vec![x, vals[0], vals[1], vals[2], vals[3], vals[4]];
        if let Some(orc) = &oracle {
            worst = worst.max((rep.s_j - orc[i]).abs());
            row.push(orc[i] * unit_factor);
        }
        table.rows.push(row);
    }
    if oracle.is_some() {
        table.meta.push(("oracle_max_abs_dev".into(), format!("{worst:e}")));
    }
    write_output(&args.common.out, &table.render(start.elapsed().as_secs_f64()))?;
    if oracle.is_some() && worst > 1e-8 {
        return Err(AppError::Validation(format!(
            "oracle deviation {worst:.3e} exceeds 1e-8"
        )));
    }
    Ok(())
}

fn boat_oracle_curve(
    params: &ModelParams,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<f64>, AppError> {
    let n = params.n;
    let basis = SymBasis::new(n);
    let psi0 = initial_state(&basis, InitialStateKind::SuperpositionDown)?;
    let h_full = full_generator(n, Slot::Plus, Slot::X)?
        .matmul(&full_generator(n, Slot::Minus, Slot::X)?)?
        .hermitized()
        .scaled(C64::new(params.chi, 0.0));
    let FullSpaceState::Pure { amps: psi0_full, .. } = embed_symmetric_state(&psi0)? else {
        unreachable!()
    };
    let mut out = Vec::with_capacity(times.len());
    integrate(
        |_t, y, dy| {
            h_full.apply(y, dy);
            for v in dy.iter_mut() {
                *v = C64::new(v.im, -v.re);
            }
        },
        psi0_full,
        times,
        opts,
        |_, _, y| {
            let full = FullSpaceState::Pure { n, amps: y.to_vec() };
            out.push(oracle_report(&full)?.s_j);
            Ok(true)
        },
    )?;
    Ok(out)
}

/// The first entry of `rates` sets the dimensionless time axis.
fn run_dissipative(
    name: &str,
    common: &CommonArgs,
    extra_meta: Vec<(String, String)>,
    gen: &LindbladGenerator,
    rates: &[f64],
    t_max_default: f64,
    steady: bool,
) -> Result<(), AppError> {
    check_common(common)?;
    let start = Instant::now();
    let basis = gen.basis().clone();
    let pyr = build_pyramid(&basis)?;
    let psi0 = initial_state(&basis, InitialStateKind::SuperpositionDown)?;
    let rho0 = DensityMatrix::from_pure(&psi0);

    let mut table = Table {
        meta: vec![("command".into(), name.to_string())],
        header: Vec::new(),
        rows: Vec::new(),
    };
    table.meta.extend(extra_meta);
    table.meta.extend(common_meta(common, &basis));

    let axis_rate = rates[0];
    if steady {
        let opts = SteadyStateOptions::for_rates(rates, ode_options(common))?;
        let ss = steady_state(gen, &rho0, &opts)?;
        let rep = entropy_mixed(&ss.rho, &pyr)?;
        let vals = scale_units(&rep, common.units);
        table.header = vec![
            "t_axis",
            "s_j",
            "s_k",
            "s_total",
            "i_j_given_k",
            "i_k_given_j",
            "residual",
        ];
        table
            .rows
            .push(vec![ss.time * axis_rate, vals[0], vals[1], vals[2], vals[3], vals[4], ss.residual]);
        table.meta.push(("steady_state".into(), "true".into()));
    } else {
        let t_max = common.t_max.unwrap_or(t_max_default);
        let (axis, times) = grids(common, t_max, axis_rate)?;
        let traj = evolve_lindblad(gen, &rho0, &times, &ode_options(common))?;
        table.header =
            vec!["t_axis", "s_j", "s_k", "s_total", "i_j_given_k", "i_k_given_j"];
        for (state, &x) in traj.states.iter().zip(&axis) {
            let rep = entropy_mixed(state, &pyr)?;
            let vals = scale_units(&rep, common.units);
            table.rows.push(vec![x, vals[0], vals[1], vals[2], vals[3], vals[4]]);
        }
    }
    write_output(&common.out, &table.render(start.elapsed().as_secs_f64()))
}

fn run_leaky_boat(args: LeakyBoatArgs) -> Result<(), AppError> {
    let params = ModelParams {
        n: args.common.n,
        chi: args.chi,
        gamma_c: args.gamma_c,
        ..ModelParams::default()
    };
    params.validate()?;
    let basis = SymBasis::new(params.n);
    let gen = leaky_boat(&basis, &params)?;
    run_dissipative(
        "leaky-boat",
        &args.common,
        vec![
            ("chi".into(), format!("{:e}", args.chi)),
            ("gamma_c".into(), format!("{:e}", args.gamma_c)),
        ],
        &gen,
        &[params.chi, params.gamma_c],
        std::f64::consts::PI,
        args.steady,
    )
}

fn run_sms(args: SmsArgs) -> Result<(), AppError> {
    let params = ModelParams {
        n: args.common.n,
        gamma_c: args.gamma_c,
        w: args.w,
        ..ModelParams::default()
    };
    params.validate()?;
    let basis = SymBasis::new(params.n);
    let gen = sms(&basis, &params)?;
    run_dissipative(
        "sms",
        &args.common,
        vec![
            ("gamma_c".into(), format!("{:e}", args.gamma_c)),
            ("w".into(), format!("{:e}", args.w)),
        ],
        &gen,
        &[params.gamma_c, params.w],
        10.0,
        args.steady,
    )
}

fn run_sweep(args: SweepArgs) -> Result<(), AppError> {
    check_common(&args.common)?;
    let start = Instant::now();
    if args.values.is_empty() {
        return Err(AppError::Usage("--values must list at least one value".into()));
    }
    if args.values.iter().any(|v| !v.is_finite()) {
        return Err(AppError::Usage("sweep values must be finite".into()));
    }
    let base = ModelParams {
        n: args.common.n,
        chi: args.chi,
        gamma_c: args.gamma_c,
        w: args.w,
        ..ModelParams::default()
    };
    let apply = |value: f64| -> Result<ModelParams, AppError> {
        let mut p = base;
        match args.param.as_str() {
            "gamma-c" => p.gamma_c = value,
            "w" => p.w = value,
            "chi" => p.chi = value,
            other => {
                return Err(AppError::Usage(format!(
                    "unknown sweep parameter `{other}` (expected gamma-c, w, or chi)"
                )))
            }
        }
        p.validate()?;
        Ok(p)
    };
    // Validate every point up front so usage errors beat worker failures.
    let points: Vec<ModelParams> =
        args.values.iter().map(|&v| apply(v)).collect::<Result<_, _>>()?;

    let basis = SymBasis::new(base.n);
    let pyr = build_pyramid(&basis)?;
    let psi0 = initial_state(&basis, InitialStateKind::SuperpositionDown)?;
    let rho0 = DensityMatrix::from_pure(&psi0);
    let ode = ode_options(&args.common);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.common.jobs)
        .build()
        .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?;
    let results: Vec<Result<(EntropyReport, f64, f64), algent::Error>> = pool.install(|| {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|params| {
                let gen = match args.model {
                    SweepModel::LeakyBoat => leaky_boat(&basis, params)?,
                    SweepModel::Sms => sms(&basis, params)?,
                };
                let rates = match args.model {
                    SweepModel::LeakyBoat => [params.chi, params.gamma_c],
                    SweepModel::Sms => [params.gamma_c, params.w],
                };
                let opts = SteadyStateOptions::for_rates(&rates, ode)?;
                let ss = steady_state(&gen, &rho0, &opts)?;
                let rep = entropy_mixed(&ss.rho, &pyr)?;
                Ok((rep, ss.residual, ss.time))
            })
            .collect()
    });

    let model_name = match args.model {
        SweepModel::LeakyBoat => "leaky-boat",
        SweepModel::Sms => "sms",
    };
    let mut table = Table {
        meta: vec![
            ("command".into(), "sweep".into()),
            ("model".into(), model_name.into()),
            ("param".into(), args.param.clone()),
            ("chi".into(), format!("{:e}", args.chi)),
            ("gamma_c".into(), format!("{:e}", args.gamma_c)),
            ("w".into(), format!("{:e}", args.w)),
        ],
        header: vec![
            "value",
            "s_j",
            "s_k",
            "s_total",
            "i_j_given_k",
            "i_k_given_j",
            "residual",
            "t_converged",
        ],
        rows: Vec::new(),
    };
    table.meta.extend(common_meta(&args.common, &basis));
    for (value, result) in args.values.iter().zip(results) {
        let (rep, residual, time) = result?;
        let vals = scale_units(&rep, args.common.units);
        table.rows.push(vec![
            *value, vals[0], vals[1], vals[2], vals[3], vals[4], residual, time,
        ]);
    }
    write_output(&args.common.out, &table.render(start.elapsed().as_secs_f64()))
}

fn run_validate(args: ValidateArgs) -> Result<(), AppError> {
    let start = Instant::now();
    if args.n_max > algent::oracle::ORACLE_CAP {
        println!(
            "# oracle-backed checks refused above N = {}; running symmetric-space checks only",
            algent::oracle::ORACLE_CAP
        );
    }
    let cached = match &args.pyramid_cache {
        Some(path) => Some(load_or_create_cache(path, args.n_max)?),
        None => None,
    };
    let cfg = ValidationConfig { n_max: args.n_max, seed: args.seed, draws: 10 };
    let checks = run_validation(&cfg, cached.as_ref());
    let mut failed = 0usize;
    for check in &checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        let note = if check.note.is_empty() {
            String::new()
        } else {
            format!("  [{}]", check.note)
        };
        println!(
            "{verdict}  {:<36} residual {:.3e} (tolerance {:.1e}){note}",
            check.name, check.residual, check.tolerance
        );
        if !check.passed {
            failed += 1;
        }
    }
    println!(
        "# {} checks, {} failed, {:.2} s",
        checks.len(),
        failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        return Err(AppError::Validation(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn load_or_create_cache(path: &str, n_max: u32) -> Result<PyramidBasis, AppError> {
    if fs::metadata(path).is_ok() {
        let bytes = fs::read(path).map_err(algent::Error::from)?;
        if bytes.len() < 12 {
            return Err(AppError::Numerical(algent::Error::Cache("file too short".into())));
        }
        let n = u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]);
        let basis = SymBasis::new(n);
        Ok(read_cache(&basis, bytes.as_slice())?)
    } else {
        let basis = SymBasis::new(n_max);
        let pyr = build_pyramid(&basis)?;
        let mut buf = Vec::new();
        write_cache(&pyr, &mut buf)?;
        fs::write(path, &buf).map_err(algent::Error::from)?;
        Ok(pyr)
    }
}
