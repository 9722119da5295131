use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use eprsim_core::chsh::{
    chsh_value, optimize_settings, report_for, ChshSettings, CorrelationModel,
};
use eprsim_core::ensemble::{analytic_average_correlation, mc_average_correlation};
use eprsim_core::experiment::{
    correlation_std_error, default_geometry, fit_sweep, normalized_correlation, run_pairs,
    run_sweep, simulate_chsh, sweep_angles,
};
use eprsim_core::output::{write_csv, write_json, SweepDocument};
use eprsim_core::states::{bell_state, BellLabel};
use eprsim_core::symmetry::{classify, HelicityState};
use eprsim_core::{
    AnalyzerPair, DisentangledModel, EntangledModel, PairModel, ParticleKind, SweepConfig, Vec3,
};

#[derive(Parser, Debug)]
#[command(
    name = "eprsim",
    version,
    about = "Entangled and disentangled EPR pair simulator"
)]
struct Cli {
    /// RNG seed; a random seed is drawn and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for Monte Carlo runs. Results do not depend on it.
    #[arg(long, global = true, env = "EPRSIM_WORKERS")]
    workers: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Correlation E(a, b) for a model over a set of angles.
    Correlate(CorrelateArgs),
    /// CHSH statistic and bound comparison.
    Chsh(ChshArgs),
    /// Coincidence sweep with visibility fit, written as CSV or JSON.
    Simulate(SimulateArgs),
    /// Parity and R⊥ classification of Bell and helicity product states.
    Classify,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModelArg {
    Entangled,
    Disentangled,
}

impl From<ModelArg> for PairModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Entangled => PairModel::Entangled,
            ModelArg::Disentangled => PairModel::Disentangled,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum KindArg {
    Fermion,
    Photon,
}

impl From<KindArg> for ParticleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Fermion => ParticleKind::Fermion,
            KindArg::Photon => ParticleKind::Photon,
        }
    }
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelArg,

    #[arg(long, value_enum, default_value = "photon")]
    kind: KindArg,
}

#[derive(Args, Debug)]
struct AngleArgs {
    /// Interpret angles in degrees instead of radians.
    #[arg(long)]
    degrees: bool,

    /// With `--kind photon`: angles are polarizer orientations and are
    /// doubled into the helicity frame.
    #[arg(long)]
    polarizer_angles: bool,
}

impl AngleArgs {
    fn radians(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }

    fn user_units(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_degrees()
        } else {
            x
        }
    }

    fn doubling(&self, kind: ParticleKind) -> Result<f64> {
        match (self.polarizer_angles, kind) {
            (false, _) => Ok(1.0),
            (true, ParticleKind::Photon) => Ok(2.0),
            (true, ParticleKind::Fermion) => bail!("--polarizer-angles requires --kind photon"),
        }
    }

    /// Helicity-frame angle in radians for a user-supplied angle.
    fn helicity_angle(&self, x: f64, kind: ParticleKind) -> Result<f64> {
        Ok(self.doubling(kind)? * self.radians(x))
    }

    /// User-facing angle for a helicity-frame angle in radians.
    fn user_angle(&self, theta: f64, kind: ParticleKind) -> Result<f64> {
        Ok(self.user_units(theta / self.doubling(kind)?))
    }
}

#[derive(Args, Debug)]
struct CorrelateArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    angles: AngleArgs,

    /// Angles between the analyzers; comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta_ab: Vec<f64>,

    /// Number of equally spaced angles in [0, π] when `--theta-ab` is absent.
    #[arg(long, default_value_t = 12)]
    grid: usize,

    /// Also estimate by Monte Carlo.
    #[arg(long)]
    mc: bool,

    /// Samples (or pairs) per angle for `--mc`.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
}

#[derive(Args, Debug)]
struct ChshArgs {
    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    angles: AngleArgs,

    /// Search for the settings maximizing |S|.
    #[arg(long, conflicts_with_all = ["degenerate", "settings"])]
    optimize: bool,

    /// With `--optimize`: search over the whole sphere, not only the plane.
    #[arg(long, requires = "optimize")]
    full_sphere: bool,

    /// Use a = a′ and b = b′.
    #[arg(long, conflicts_with = "settings")]
    degenerate: bool,

    /// Planar settings a,a′,b,b′ as angles from x̂.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    settings: Vec<f64>,

    /// Also estimate S from simulated coincidence counts.
    #[arg(long)]
    mc: bool,

    /// Pairs per setting for `--mc`.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Pairs per angle.
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,

    /// Number of equally spaced angles in [0, π].
    #[arg(long, default_value_t = 12)]
    angles: usize,

    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().context("building worker pool")?;
    pool.install(|| match &cli.command {
        Command::Correlate(args) => correlate(&cli, args),
        Command::Chsh(args) => chsh(&cli, args),
        Command::Simulate(args) => simulate(&cli, args),
        Command::Classify => classify_states(&cli),
    })
}

fn resolve_seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        eprintln!("seed: {seed}");
        seed
    })
}

/// Column-aligned, CSV or JSON rendering of a flat table.
fn emit_table(
    format: Format,
    command: &str,
    config: serde_json::Value,
    header: &[&str],
    rows: &[Vec<serde_json::Value>],
) -> Result<()> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let cell = |v: &serde_json::Value| match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match format {
        Format::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::Value::Object(
                        header
                            .iter()
                            .zip(r)
                            .map(|(h, v)| (h.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect();
            let doc = json!({
                "format_version": eprsim_core::output::FORMAT_VERSION,
                "command": command,
                "config": config,
                "rows": objs,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for r in rows {
                writeln!(out, "{}", r.iter().map(cell).collect::<Vec<_>>().join(","))?;
            }
        }
        Format::Table => {
            let text: Vec<Vec<String>> =
                rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            let widths: Vec<usize> = header
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    text.iter()
                        .map(|r| r[i].len())
                        .chain([h.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<String>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(
                out,
                "{}",
                line(header.iter().map(|h| h.to_string()).collect())
            )?;
            for r in text {
                writeln!(out, "{}", line(r))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn correlate(cli: &Cli, args: &CorrelateArgs) -> Result<()> {
    let model: PairModel = args.model.model.into();
    let kind: ParticleKind = args.model.kind.into();
    let inputs: Vec<f64> = if args.theta_ab.is_empty() {
        sweep_angles(args.grid)
            .into_iter()
            .map(|t| args.angles.user_angle(t, kind))
            .collect::<Result<_>>()?
    } else {
        args.theta_ab.clone()
    };
    if inputs.is_empty() {
        bail!("no angles requested");
    }
    if args.mc && args.n == 0 {
        bail!("--n must be at least 1");
    }
    let seed = if args.mc {
        Some(resolve_seed(cli))
    } else {
        cli.seed
    };
    let geometry = default_geometry(kind);

    let mut header = vec!["angle", "theta_ab_rad", "e_analytic"];
    if args.mc {
        header.extend(["e_mc", "std_err", "band_lo_3sigma", "band_hi_3sigma"]);
    }
    let mut rows = Vec::new();
    for &x in &inputs {
        let theta = args.angles.helicity_angle(x, kind)?;
        let pair = AnalyzerPair::with_angle(theta, kind);
        let analytic = match model {
            PairModel::Entangled => EntangledModel.correlation(pair.a(), pair.b()),
            PairModel::Disentangled => analytic_average_correlation(&pair, &geometry)?,
        };
        let mut row = vec![json!(x), json!(theta), json!(analytic)];
        if args.mc {
            let seed = seed.expect("resolved");
            let (mean, se) = match model {
                PairModel::Entangled => {
                    let template = SweepConfig::new(model, kind, args.n, seed);
                    let counts = run_pairs(&template.at(pair)?)?;
                    (
                        normalized_correlation(&counts)?,
                        correlation_std_error(&counts)?,
                    )
                }
                PairModel::Disentangled => {
                    let est = mc_average_correlation(&pair, &geometry, args.n, seed)?;
                    (est.mean, est.std_error)
                }
            };
            row.extend([
                json!(mean),
                json!(se),
                json!(mean - 3.0 * se),
                json!(mean + 3.0 * se),
            ]);
        }
        rows.push(row);
    }
    let config = json!({
        "model": model,
        "kind": kind,
        "mc": args.mc,
        "n": args.n,
        "seed": seed,
        "degrees": args.angles.degrees,
        "polarizer_angles": args.angles.polarizer_angles,
    });
    emit_table(
        cli.format.unwrap_or(Format::Table),
        "correlate",
        config,
        &header,
        &rows,
    )
}

fn chsh(cli: &Cli, args: &ChshArgs) -> Result<()> {
    let model: PairModel = args.model.model.into();
    let kind: ParticleKind = args.model.kind.into();
    let correlation: Box<dyn CorrelationModel> = match model {
        PairModel::Entangled => Box::new(EntangledModel),
        PairModel::Disentangled => Box::new(DisentangledModel {
            geometry: default_geometry(kind),
        }),
    };

    let settings = if args.optimize {
        optimize_settings(correlation.as_ref(), !args.full_sphere).0
    } else if args.degenerate {
        ChshSettings::planar(0.0, 0.0, 0.0, 0.0)
    } else if !args.settings.is_empty() {
        if args.settings.len() != 4 {
            bail!("--settings takes four angles a,a',b,b'");
        }
        let s = args
            .settings
            .iter()
            .map(|&x| args.angles.helicity_angle(x, kind))
            .collect::<Result<Vec<_>>>()?;
        ChshSettings::planar(s[0], s[1], s[2], s[3])
    } else {
        ChshSettings::standard_optimum()
    };
    let report = report_for(chsh_value(correlation.as_ref(), &settings));

    let vectors = [settings.a, settings.a_prime, settings.b, settings.b_prime];
    let planar = vectors.iter().all(|v| v.z.abs() < 1e-12);
    let angles: Vec<serde_json::Value> = if planar {
        settings
            .planar_angles()
            .iter()
            .map(|&t| args.angles.user_angle(t, kind).map(|a| json!(a)))
            .collect::<Result<_>>()?
    } else {
        vectors.iter().map(|v: &Vec3| json!(v.to_array())).collect()
    };

    let mut header = vec![
        "model",
        "s",
        "abs_s",
        "classical_bound",
        "tsirelson_bound",
        "violates",
        "a",
        "a_prime",
        "b",
        "b_prime",
    ];
    let mut row = vec![
        json!(model),
        json!(report.s),
        json!(report.s.abs()),
        json!(report.classical_bound),
        json!(report.tsirelson_bound),
        json!(report.violates),
    ];
    row.extend(angles);
    let mut seed = cli.seed;
    if args.mc {
        if args.n == 0 {
            bail!("--n must be at least 1");
        }
        let s = resolve_seed(cli);
        seed = Some(s);
        let est = simulate_chsh(&SweepConfig::new(model, kind, args.n, s), &settings)?;
        header.extend(["s_mc", "std_err"]);
        row.extend([json!(est.s), json!(est.std_error)]);
    }
    let config = json!({
        "model": model,
        "kind": kind,
        "optimize": args.optimize,
        "full_sphere": args.full_sphere,
        "degenerate": args.degenerate,
        "mc": args.mc,
        "n": args.n,
        "seed": seed,
        "degrees": args.angles.degrees,
        "polarizer_angles": args.angles.polarizer_angles,
    });
    emit_table(
        cli.format.unwrap_or(Format::Table),
        "chsh",
        config,
        &header,
        &[row],
    )
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let format = cli.format.unwrap_or(Format::Csv);
    if format == Format::Table {
        bail!("simulate writes csv or json");
    }
    let mut sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    let seed = resolve_seed(cli);
    let model: PairModel = args.model.model.into();
    let kind: ParticleKind = args.model.kind.into();
    let config = SweepConfig::new(model, kind, args.n, seed);
    let angles = sweep_angles(args.angles);
    let rows = run_sweep(&config, &angles)?;
    let fit = fit_sweep(&rows)?;

    match format {
        Format::Csv => write_csv(&rows, &mut sink)?,
        Format::Json => {
            let echo = json!({
                "model": model,
                "kind": kind,
                "n_pairs": args.n,
                "angles": args.angles,
                "geometry": config.geometry,
            });
            write_json(&SweepDocument::new(echo, seed, &rows, Some(fit)), &mut sink)?
        }
        Format::Table => unreachable!(),
    }
    sink.flush()?;
    let summary = format!("V = {:.6}  residual = {:.3e}", fit.v, fit.residual);
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn classify_states(cli: &Cli) -> Result<()> {
    let mut rows = Vec::new();
    for label in BellLabel::ALL {
        let c = classify(&bell_state(label));
        rows.push(vec![
            json!(label.name()),
            json!(c.parity.to_string()),
            json!(c.r_perp.to_string()),
        ]);
    }
    for state in HelicityState::ALL {
        let c = classify(&state.ket());
        rows.push(vec![
            json!(state.to_string()),
            json!(c.parity.to_string()),
            json!(c.r_perp.to_string()),
        ]);
    }
    emit_table(
        cli.format.unwrap_or(Format::Table),
        "classify",
        json!({}),
        &["state", "parity", "r_perp"],
        &rows,
    )
}
