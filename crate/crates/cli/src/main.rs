//! `rebarfit`: fit, predict, compare and plot endpoint trajectories.
//!
//! Exit codes: 0 success (no defect), 3 defect predicted, 2 usage, parse or
//! fit error.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rebarfit::{Axis, StreamFormat, WindowLength};

pub const EXIT_ERROR: u8 = 2;
pub const EXIT_DEFECT: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "rebarfit",
    version,
    about = "Endpoint trajectory fitting and horizon prediction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded synthetic detection stream (JSONL).
    Simulate(SimulateArgs),
    /// Fit one axis and print the fitted parameters.
    Fit(FitArgs),
    /// Predict the endpoint `horizon` frames past the cutoff and gate it.
    Predict(PredictArgs),
    /// Score several models against the ground-truth frame.
    Compare(CompareArgs),
    /// Write a two-panel SVG of the fit and prediction.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Synthetic spec file (`key = value` lines).
    #[arg(long)]
    spec: String,
    /// Overrides the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Detection stream path, or `-` for standard input.
    #[arg(long, default_value = "-")]
    input: String,
    /// Stream format; inferred from the file extension when omitted.
    #[arg(long, value_parser = parse_format)]
    format: Option<StreamFormat>,
}

#[derive(Args, Debug)]
struct FitControl {
    /// Frames of history to fit on (`all` or N >= 2).
    #[arg(long, default_value = "all", value_parser = parse_window)]
    window: WindowLength,
    /// Last frame visible to the fit. Defaults to the last observed frame
    /// (`compare`: the last observed frame minus the horizon).
    #[arg(long, allow_negative_numbers = true)]
    cutoff: Option<f64>,
    /// Degree used for `poly` models.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    poly_degree: u32,
    /// Clamp non-positive values to 1e-9 before log-transforming.
    #[arg(long)]
    clamp_nonpositive: bool,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    control: FitControl,
    #[arg(long, value_parser = parse_axis)]
    axis: Axis,
    /// linear | exp | sinexp | cosexp | poly
    #[arg(long)]
    model: String,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    control: FitControl,
    /// Model: linear, exp, sinexp, cosexp, poly or polyN.
    #[arg(long, default_value = "sinexp")]
    model: String,
    /// Frames past the cutoff to predict.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(1..))]
    horizon: u32,
    /// Allowed region `x0,y0,x1,y1`; a prediction outside it exits with 3.
    #[arg(long, allow_hyphen_values = true)]
    region: Option<String>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    control: FitControl,
    /// Comma-separated models; defaults to sinexp,cosexp,exp,poly.
    #[arg(long, default_value = "sinexp,cosexp,exp,poly")]
    models: String,
    /// Frames past the cutoff to predict.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(1..))]
    horizon: u32,
    /// Print an aligned text table instead of CSV.
    #[arg(long)]
    pretty: bool,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    control: FitControl,
    /// Model: linear, exp, sinexp, cosexp, poly or polyN.
    #[arg(long, default_value = "sinexp")]
    model: String,
    /// Frames past the cutoff to predict.
    #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u32).range(1..))]
    horizon: u32,
    /// SVG output path; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
}

fn parse_format(s: &str) -> Result<StreamFormat, String> {
    s.parse()
}

fn parse_window(s: &str) -> Result<WindowLength, String> {
    s.parse()
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Fit(args) => commands::fit(args),
        Command::Predict(args) => commands::predict(args),
        Command::Compare(args) => commands::compare(args),
        Command::Plot(args) => commands::plot(args),
    };
    match result {
        Ok(commands::Outcome::Clear) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Defect) => ExitCode::from(EXIT_DEFECT),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
