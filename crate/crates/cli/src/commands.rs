use std::fs;
use std::io::{self, Read, Write};

use anyhow::{anyhow, bail, Context, Result};
use rebarfit::regression::FitOptions;
use rebarfit::{
    comparison_csv, comparison_text, detections_from_series, fit_model_with, fit_trajectory,
    series_from_stream, synthesize, window, write_detections, AxisSeries, ModelKind, Region,
    StreamFormat, SyntheticSpec, WindowConfig,
};

use crate::{CompareArgs, FitArgs, FitControl, InputArgs, PlotArgs, PredictArgs, SimulateArgs};

pub enum Outcome {
    Clear,
    Defect,
}

fn read_input(path: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
    } else {
        buf = fs::read(path).with_context(|| format!("reading {path}"))?;
    }
    Ok(buf)
}

fn write_output(path: Option<&str>, contents: &str) -> Result<()> {
    match path {
        Some(p) if p != "-" => fs::write(p, contents).with_context(|| format!("writing {p}")),
        _ => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_series(input: &InputArgs) -> Result<(AxisSeries, AxisSeries)> {
    let format = input.format.unwrap_or_else(|| {
        if input.input.to_ascii_lowercase().ends_with(".csv") {
            StreamFormat::Csv
        } else {
            StreamFormat::Jsonl
        }
    });
    let bytes = read_input(&input.input)?;
    series_from_stream(bytes.as_slice(), format)
        .with_context(|| format!("parsing {} stream", format))
}

fn parse_model(name: &str, control: &FitControl) -> Result<ModelKind> {
    ModelKind::parse_with_degree(name, control.poly_degree as usize).map_err(|e| anyhow!(e))
}

fn window_config(control: &FitControl, horizon: u32) -> Result<WindowConfig> {
    Ok(
        WindowConfig::new(control.window, horizon)?.with_fit_options(FitOptions {
            clamp_nonpositive: control.clamp_nonpositive,
        }),
    )
}

fn last_time(xs: &AxisSeries) -> Result<f64> {
    xs.samples()
        .last()
        .map(|s| s.t)
        .ok_or_else(|| anyhow!("input contains no detections"))
}

pub fn simulate(args: SimulateArgs) -> Result<Outcome> {
    let text = fs::read_to_string(&args.spec).with_context(|| format!("reading {}", args.spec))?;
    let mut spec =
        SyntheticSpec::parse(&text).with_context(|| format!("invalid spec {}", args.spec))?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let (xs, ys) = synthesize(&spec)?;
    let records = detections_from_series(&xs, &ys);
    write_output(
        args.out.as_deref(),
        &write_detections(&records, StreamFormat::Jsonl),
    )?;
    Ok(Outcome::Clear)
}

pub fn fit(args: FitArgs) -> Result<Outcome> {
    let kind = parse_model(&args.model, &args.control)?;
    let (xs, ys) = load_series(&args.input)?;
    let series = match args.axis {
        rebarfit::Axis::X => xs,
        rebarfit::Axis::Y => ys,
    };
    let cutoff = match args.control.cutoff {
        Some(c) => c,
        None => last_time(&series)?,
    };
    let config = window_config(&args.control, 1)?;
    let windowed = window(&series, &config, cutoff);
    let fit = fit_model_with(&windowed, kind, config.fit)
        .with_context(|| format!("fitting {} axis", args.axis))?;

    let mut out = format!("kind = {}\n", fit.kind);
    if let ModelKind::Polynomial(_) = fit.kind {
        let coeffs: Vec<String> = fit.coefficients.iter().map(|c| format!("{c:.6}")).collect();
        out.push_str(&format!("coefficients = {}\n", coeffs.join(",")));
    } else {
        out.push_str(&format!("a = {:.6}\nb = {:.6}\n", fit.a, fit.b));
    }
    out.push_str(&format!(
        "n_points = {}\nrmse = {:.6}\n",
        fit.n_points, fit.rmse
    ));
    write_output(None, &out)?;
    Ok(Outcome::Clear)
}

pub fn predict(args: PredictArgs) -> Result<Outcome> {
    let kind = parse_model(&args.model, &args.control)?;
    let region = args
        .region
        .as_deref()
        .map(str::parse::<Region>)
        .transpose()
        .map_err(|e| anyhow!(e))?;
    let config = window_config(&args.control, args.horizon)?;
    let (xs, ys) = load_series(&args.input)?;
    let cutoff = match args.control.cutoff {
        Some(c) => c,
        None => last_time(&xs)?,
    };
    let p = fit_trajectory(&xs, &ys, kind, &config, cutoff, region.as_ref())?.prediction;
    write_output(
        None,
        &format!("{:.6},{:.6},{:.6},{}\n", p.t_target, p.x, p.y, p.defect),
    )?;
    Ok(if p.defect {
        Outcome::Defect
    } else {
        Outcome::Clear
    })
}

pub fn compare(args: CompareArgs) -> Result<Outcome> {
    let kinds = args
        .models
        .split(',')
        .map(|m| parse_model(m, &args.control))
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        bail!("no models requested");
    }
    let config = window_config(&args.control, args.horizon)?;
    let (xs, ys) = load_series(&args.input)?;
    let cutoff = match args.control.cutoff {
        Some(c) => c,
        None => last_time(&xs)? - args.horizon as f64,
    };
    let reports = rebarfit::compare(&xs, &ys, &kinds, cutoff, &config)?;
    for r in &reports {
        if let Some(reason) = &r.failure {
            eprintln!("note: {} unavailable: {reason}", r.kind);
        }
    }
    let rendered = if args.pretty {
        comparison_text(&reports)
    } else {
        comparison_csv(&reports)
    };
    write_output(args.out.as_deref(), &rendered)?;
    Ok(Outcome::Clear)
}

pub fn plot(args: PlotArgs) -> Result<Outcome> {
    let kind = parse_model(&args.model, &args.control)?;
    let config = window_config(&args.control, args.horizon)?;
    let (xs, ys) = load_series(&args.input)?;
    let cutoff = match args.control.cutoff {
        Some(c) => c,
        None => last_time(&xs)?,
    };
    let fit = fit_trajectory(&xs, &ys, kind, &config, cutoff, None)?;
    let window_start = window(&xs, &config, cutoff)
        .samples()
        .first()
        .map(|s| s.t)
        .unwrap_or(cutoff);
    write_output(
        args.out.as_deref(),
        &rebarfit::plot::render_svg(&xs, &ys, &fit, window_start),
    )?;
    Ok(Outcome::Clear)
}
