//! Thin CLI shell: parse flags, merge them over an optional JSON config file
//! and the built-in defaults, run one command builder, write the report.
//!
//! Precedence per field: explicit flag, then config-file key, then default.
//! Exit code 0 when every summary check passes, 1 when any fails, 2 on error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use protoderiv_cli::commands::{
    self, GraphicalLimitConfig, Lemma1Config, PlotBumpsConfig, ResolventDdConfig,
};
use protoderiv_cli::report::ExperimentReport;

#[derive(Parser)]
#[command(name = "protoderiv", version, about = "Diagnostics for a bump-sum operator family")]
struct Cli {
    /// RNG seed for all sampled diagnostics.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for report files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Report file format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// JSON config file; explicit flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum OutputFormat {
    /// Row table as CSV plus a `.summary.json` sidecar.
    Csv,
    /// Single JSON document with header, summary, and rows.
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Render diagnostic tables with an SVG plot.
    #[command(subcommand)]
    Plot(PlotCommand),
    /// Certify sampled operator bounds.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Limit and differentiation experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand)]
enum PlotCommand {
    /// Tabulate and draw the piecewise-linear bump family.
    Bumps {
        /// Bump index range, e.g. 1..3.
        #[arg(long, value_name = "LO..HI")]
        n_range: Option<String>,
        /// Uniform samples across the widest support (breakpoints are always
        /// included).
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Lipschitz saturation, norm lower bound, and monotonicity gaps.
    Lemma1 {
        /// Sampled pairs per certification.
        #[arg(long)]
        pairs: Option<usize>,
        /// Comma-separated perturbation strengths.
        #[arg(long, value_name = "A,B,...")]
        alphas: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Graph collapse diagnostics across a dyadic scale ladder.
    GraphicalLimit {
        /// Perturbation strength.
        #[arg(long)]
        alpha: Option<f64>,
        /// Scale exponent range, e.g. 1..30 for m = 2^1..2^30.
        #[arg(long, value_name = "LO..HI")]
        k: Option<String>,
        /// Comma-separated sampling radii.
        #[arg(long, value_name = "R,S,...")]
        radii: Option<String>,
        /// Random directions per radius.
        #[arg(long)]
        dirs: Option<usize>,
    },
    /// Resolvent difference quotients along shrinking dyadic steps.
    ResolventDd {
        /// JSON file holding the operator description.
        #[arg(long, value_name = "PATH")]
        spec: Option<PathBuf>,
        /// Base point as a JSON index-to-value map, e.g. '{"1":0.25}'.
        #[arg(long, value_name = "JSON")]
        y: Option<String>,
        /// Direction as a JSON index-to-value map.
        #[arg(long, value_name = "JSON")]
        h: Option<String>,
        /// Step exponent range, e.g. 4..40 for tau = 2^-4..2^-40.
        #[arg(long, value_name = "LO..HI")]
        k: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let file_cfg = load_config_map(cli.config.as_deref())?;
    let (report, svg_text, slug) = build_report(&cli, &file_cfg)?;

    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let mut written = Vec::new();
    match cli.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            written.push(write_out(&out_dir, &format!("{slug}.csv"), &report.to_csv())?);
            written.push(write_out(
                &out_dir,
                &format!("{slug}.summary.json"),
                &report.to_summary_json(),
            )?);
        }
        OutputFormat::Json => {
            written.push(write_out(&out_dir, &format!("{slug}.json"), &report.to_json())?);
        }
    }
    if let Some(svg) = svg_text {
        written.push(write_out(&out_dir, &format!("{slug}.svg"), &svg)?);
    }

    print!("{}", report.summary_text());
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(report.passed())
}

fn build_report(
    cli: &Cli,
    file_cfg: &Map<String, Value>,
) -> Result<(ExperimentReport, Option<String>, &'static str)> {
    match &cli.command {
        Command::Plot(PlotCommand::Bumps { n_range, samples }) => {
            let mut cfg: PlotBumpsConfig = merge_config(&PlotBumpsConfig::default(), file_cfg)?;
            if let Some(range) = n_range {
                let (lo, hi) = parse_range(range)?;
                cfg.n_min = lo.try_into().context("bump index out of range")?;
                cfg.n_max = hi.try_into().context("bump index out of range")?;
            }
            if let Some(s) = samples {
                cfg.samples = *s;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let (report, svg) = commands::cmd_plot_bumps(&cfg)?;
            Ok((report, Some(svg), "plot-bumps"))
        }
        Command::Verify(VerifyCommand::Lemma1 { pairs, alphas }) => {
            let mut cfg: Lemma1Config = merge_config(&Lemma1Config::default(), file_cfg)?;
            if let Some(p) = pairs {
                cfg.pairs = *p;
            }
            if let Some(list) = alphas {
                cfg.alphas = parse_f64_list(list)?;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            Ok((commands::cmd_verify_lemma1(&cfg)?, None, "verify-lemma1"))
        }
        Command::Experiment(ExperimentCommand::GraphicalLimit { alpha, k, radii, dirs }) => {
            let mut cfg: GraphicalLimitConfig =
                merge_config(&GraphicalLimitConfig::default(), file_cfg)?;
            if let Some(a) = alpha {
                cfg.alpha = *a;
            }
            if let Some(range) = k {
                let (lo, hi) = parse_range(range)?;
                cfg.k_min = lo.try_into().context("scale exponent out of range")?;
                cfg.k_max = hi.try_into().context("scale exponent out of range")?;
            }
            if let Some(list) = radii {
                cfg.radii = parse_f64_list(list)?;
            }
            if let Some(d) = dirs {
                cfg.dirs = *d;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            Ok((commands::cmd_graphical_limit(&cfg)?, None, "graphical-limit"))
        }
        Command::Experiment(ExperimentCommand::ResolventDd { spec, y, h, k }) => {
            let mut cfg: ResolventDdConfig = merge_config(&ResolventDdConfig::default(), file_cfg)?;
            if let Some(path) = spec {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading operator file {}", path.display()))?;
                cfg.spec = serde_json::from_str(&text)
                    .with_context(|| format!("parsing operator file {}", path.display()))?;
            }
            if let Some(text) = y {
                cfg.y = serde_json::from_str(text).context("parsing --y")?;
            }
            if let Some(text) = h {
                cfg.h = serde_json::from_str(text).context("parsing --h")?;
            }
            if let Some(range) = k {
                let (lo, hi) = parse_range(range)?;
                cfg.k_min = lo.try_into().context("step exponent out of range")?;
                cfg.k_max = hi.try_into().context("step exponent out of range")?;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            Ok((commands::cmd_resolvent_dd(&cfg)?, None, "resolvent-dd"))
        }
    }
}

fn load_config_map(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config file {}", path.display()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => bail!("config file {} must hold a JSON object", path.display()),
    }
}

/// Overlays config-file keys onto the command's defaults, rejecting keys the
/// command does not define.
fn merge_config<T: Serialize + DeserializeOwned>(
    defaults: &T,
    file: &Map<String, Value>,
) -> Result<T> {
    let mut base = serde_json::to_value(defaults).context("serializing defaults")?;
    let obj = base.as_object_mut().expect("configs serialize to objects");
    for (key, value) in file {
        if !obj.contains_key(key) {
            bail!("config key `{key}` does not apply to this command");
        }
        obj.insert(key.clone(), value.clone());
    }
    serde_json::from_value(base).context("merged config is invalid")
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (lo, hi) = s
        .split_once("..")
        .with_context(|| format!("range `{s}` must look like LO..HI"))?;
    let lo = lo.trim().parse().with_context(|| format!("bad range start in `{s}`"))?;
    let hi = hi.trim().parse().with_context(|| format!("bad range end in `{s}`"))?;
    Ok((lo, hi))
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{part}` in list `{s}`"))
        })
        .collect()
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
