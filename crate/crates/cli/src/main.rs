use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rascap_core::dist::fit_gamma_moments;
use rascap_core::figures::{self, FigureId, FigureOptions, DEFAULT_SEED, DEFAULT_TRIALS};
use rascap_core::mc::{default_q_grid, queue_tail_exponent};
use rascap_core::validate::{run_validation, ValidationGrid, PASS_FRACTION, Z_LIMIT};
use rascap_core::{ClosedForm, Error, InterferenceSpec, LinkConfig, McConfig, SinrModel};

const SEED_ENV: &str = "RASCAP_SEED";

#[derive(Parser)]
#[command(
    name = "rascap",
    version,
    about = "Effective capacity of MIMO-OSTBC links with receive-antenna selection under interference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form normalized effective capacity at one point.
    Effcap(EffcapArgs),
    /// Write the CSV data behind one figure.
    Figure(FigureArgs),
    /// Compare the closed form against simulation on a grid.
    Validate(ValidateArgs),
    /// Simulate a queue served by the link and fit its tail exponent.
    QueueSim(QueueArgs),
    /// Moment-matched Gamma fit of a weighted interference sum.
    FitGamma(FitGammaArgs),
}

#[derive(Args, Clone, Copy)]
struct LinkArgs {
    /// Transmit antennas.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    /// Receive antennas (one is selected).
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Interferers.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Code rate, in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_rate)]
    rc: f64,
    #[arg(long, default_value_t = LinkConfig::DEFAULT_BANDWIDTH_HZ, value_parser = parse_positive)]
    bandwidth_hz: f64,
    #[arg(long, default_value_t = LinkConfig::DEFAULT_FRAME_S, value_parser = parse_positive)]
    frame_s: f64,
}

impl LinkArgs {
    fn config(&self) -> LinkConfig {
        LinkConfig::new(self.m, self.n, self.k)
            .with_rc(self.rc)
            .with_timing(self.bandwidth_hz, self.frame_s)
    }
}

#[derive(Args)]
struct EffcapArgs {
    #[command(flatten)]
    link: LinkArgs,
    /// Signal-to-interference ratio, dB.
    #[arg(long, allow_hyphen_values = true)]
    xi0_db: f64,
    /// Interference-to-noise ratio per interferer, dB.
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    zeta_db: f64,
    /// QoS exponent, 1/bit.
    #[arg(long, value_parser = parse_positive, allow_hyphen_values = true)]
    theta: f64,
}

#[derive(Args, Clone, Copy)]
struct McArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Random seed.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Draws per random substream; defaults to trials / 100.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    chunk: Option<u64>,
}

impl McArgs {
    fn config(&self) -> McConfig {
        let mc = McConfig::new(self.trials, self.seed);
        match self.chunk {
            Some(c) => mc.with_chunk(c),
            None => mc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Exact,
    Approx,
    None,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2 … fig8.
    #[arg(value_parser = parse_figure)]
    figure: FigureId,
    /// Output CSV path; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    mc: McArgs,
    /// Simulation model for effective-capacity figures.
    #[arg(long, value_enum, default_value_t = ModelArg::Exact)]
    mc_model: ModelArg,
    /// Override the figure's interference-to-noise ratio, dB.
    #[arg(long, allow_hyphen_values = true)]
    zeta_db: Option<f64>,
    /// Comma-separated ξ₀ grid in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    xi0_db_grid: Option<Vec<f64>>,
    /// Comma-separated θ grid.
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    theta_grid: Option<Vec<f64>>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    mc: McArgs,
    /// Comma-separated ξ₀ values in dB.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 10.0, 20.0], allow_hyphen_values = true)]
    xi0_db: Vec<f64>,
    /// Comma-separated interferer counts.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 5, 10], value_parser = clap::value_parser!(u32).range(1..))]
    k: Vec<u32>,
    /// Comma-separated QoS exponents.
    #[arg(long, value_delimiter = ',', default_values_t = [0.001, 0.01, 0.1], value_parser = parse_positive)]
    theta: Vec<f64>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    m: u32,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    zeta_db: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Approx)]
    mc_model: ModelArg,
    /// Also write the report to this CSV path.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Multiplies θ̆ in the closed form; for testing the harness only.
    #[arg(long, hide = true, default_value_t = 1.0, value_parser = parse_positive)]
    corrupt_theta_breve: f64,
}

#[derive(Args)]
struct QueueArgs {
    #[command(flatten)]
    link: LinkArgs,
    #[arg(long, allow_hyphen_values = true)]
    xi0_db: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    zeta_db: f64,
    /// QoS exponent whose closed-form effective capacity sets the arrival rate.
    #[arg(long, value_parser = parse_positive, allow_hyphen_values = true)]
    theta: f64,
    /// Simulated frames.
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    frames: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Backlog thresholds in the tail table.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    points: u64,
}

#[derive(Args)]
struct FitGammaArgs {
    /// Comma-separated per-interferer powers, linear.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_positive)]
    zeta: Vec<f64>,
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let v = parse_positive(s)?;
    if v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must be in (0, 1], got {s}"))
    }
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse::<FigureId>().map_err(|e| e.to_string())
}

enum Failure {
    Validation,
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Csv(_) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn model(arg: ModelArg) -> Option<SinrModel> {
    match arg {
        ModelArg::Exact => Some(SinrModel::Exact),
        ModelArg::Approx => Some(SinrModel::Approx),
        ModelArg::None => None,
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn effcap(args: &EffcapArgs) -> Result<(), Failure> {
    let cfg = args.link.config();
    let spec = InterferenceSpec::from_db(args.xi0_db, args.zeta_db)?;
    let qos = rascap_core::make_qos(args.theta, &cfg)?;
    let ec = ClosedForm::new(&cfg)?.normalized(spec.xi0, args.theta)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record([
        "m",
        "n",
        "k",
        "rc",
        "xi0_db",
        "zeta_db",
        "theta",
        "theta_breve",
        "ec_norm",
    ])
    .map_err(Error::from)?;
    out.write_record([
        cfg.m.to_string(),
        cfg.n.to_string(),
        cfg.k.to_string(),
        cfg.rc.to_string(),
        args.xi0_db.to_string(),
        args.zeta_db.to_string(),
        args.theta.to_string(),
        qos.theta_breve.to_string(),
        ec.to_string(),
    ])
    .map_err(Error::from)?;
    out.flush()?;
    Ok(())
}

fn figure(args: &FigureArgs) -> Result<(), Failure> {
    let out = open_output(&args.out)?;
    let opts = FigureOptions {
        mc: args.mc.config(),
        mc_model: model(args.mc_model),
        zeta_db: args.zeta_db,
        xi0_grid: args.xi0_db_grid.clone(),
        theta_grid: args.theta_grid.clone(),
    };
    let rows = figures::figure_rows(args.figure, &opts)?;
    figures::write_csv(&rows, out)?;
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    let grid = ValidationGrid {
        xi0_db: args.xi0_db.clone(),
        k: args.k.clone(),
        theta: args.theta.clone(),
        m: args.m,
        n: args.n,
        zeta_db: args.zeta_db,
        model: model(args.mc_model)
            .ok_or_else(|| Failure::Usage("--mc-model none cannot be validated".into()))?,
        ..ValidationGrid::default()
    };
    let report = run_validation(&grid, &args.mc.config(), args.corrupt_theta_breve)?;
    if args.out.is_some() {
        report.write_csv(open_output(&args.out)?)?;
    }
    report.write_csv(io::stdout().lock())?;
    eprintln!(
        "{} of {} points within {Z_LIMIT} standard errors ({:.1}%, need {:.0}%)",
        report.rows.iter().filter(|r| r.within()).count(),
        report.rows.len(),
        100.0 * report.fraction_within(),
        100.0 * PASS_FRACTION
    );
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn queue_sim(args: &QueueArgs) -> Result<(), Failure> {
    let cfg = args.link.config();
    let spec = InterferenceSpec::from_db(args.xi0_db, args.zeta_db)?;
    let arrival = ClosedForm::new(&cfg)?.effective_capacity(spec.xi0, args.theta)?;
    let grid = default_q_grid(args.theta, args.points as usize);
    let mc = McConfig::new(args.frames, args.seed);
    let result = queue_tail_exponent(arrival, &spec, &cfg, args.theta, &mc, &grid)?;

    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["q_bits", "tail_prob", "reference"])
        .map_err(Error::from)?;
    for (q, p) in result.q_grid.iter().zip(&result.tail_probs) {
        out.write_record([
            q.to_string(),
            p.to_string(),
            (-args.theta * q).exp().to_string(),
        ])
        .map_err(Error::from)?;
    }
    out.flush()?;
    eprintln!(
        "arrival {arrival:.4} bits/frame, mean service {:.4} bits/frame, {} frames",
        result.mean_service, result.frames
    );
    match (result.slope, result.relative_error()) {
        (Some(s), Some(e)) => eprintln!(
            "tail slope {s:.6} vs theta {} ({:.1}% off)",
            args.theta,
            100.0 * e
        ),
        _ => eprintln!("too few tail points in the fit window to estimate a slope"),
    }
    Ok(())
}

fn fit_gamma(args: &FitGammaArgs) -> Result<(), Failure> {
    let fit = fit_gamma_moments(&args.zeta)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["shape", "scale", "mean", "variance"])
        .map_err(Error::from)?;
    out.write_record([
        fit.shape.to_string(),
        fit.scale.to_string(),
        fit.mean().to_string(),
        fit.variance().to_string(),
    ])
    .map_err(Error::from)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Effcap(a) => effcap(a),
        Command::Figure(a) => figure(a),
        Command::Validate(a) => validate(a),
        Command::QueueSim(a) => queue_sim(a),
        Command::FitGamma(a) => fit_gamma(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
