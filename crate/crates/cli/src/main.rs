use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use log::info;

use heston_aes::experiments::{
    catalog, emit_report, run_experiment, run_group, to_json_string, DateMapping, ExerciseSpec,
    ExperimentReport, ExperimentSpec, ModelSpec, ReferenceCache, ReportFormat, ReportGroup,
    RunScale,
};
use heston_aes::{simulate, ModelKind, Preset, Scheme};

const FULL_PATHS: usize = 1_000_000;

#[derive(Parser)]
#[command(
    name = "heston-aes",
    version,
    about = "Monte Carlo pricing of Bermudan and American puts under Heston-type models",
    after_help = "Worker threads follow RAYON_NUM_THREADS (default: all cores). Results do not depend on it."
)]
struct Cli {
    /// Divide path counts by this factor and cap runs at 10; 1 is full scale
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    scale: u64,

    /// Base seed; run r uses seed + r
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (or file for `paths`)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// TOML file: one experiment for price/bench/paths, [[report]] groups for tables
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price puts with least-squares Monte Carlo
    Price(PriceArgs),
    /// Compare AES at M steps with Euler at 2M steps
    Bench(BenchArgs),
    /// Reproduce a built-in table or figure data set
    Tables(TablesArgs),
    /// Dump simulated paths as CSV
    Paths(PathsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Heston,
    DoubleHeston,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Aes,
    Euler,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Aes => Scheme::Aes,
            SchemeArg::Euler => Scheme::Euler,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    FellerHolding,
    FellerViolating,
    DoubleHestonZhang,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::FellerHolding => Preset::FellerHolding,
            PresetArg::FellerViolating => Preset::FellerViolating,
            PresetArg::DoubleHestonZhang => Preset::DoubleHestonZhang,
        }
    }
}

/// Flags shared by every command that builds a single experiment.
#[derive(Args, Clone)]
struct ModelFlags {
    /// Model family; must agree with --preset when both are given
    #[arg(long, value_enum)]
    model: Option<ModelArg>,

    /// Built-in parameter set
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,

    /// Simulation scheme [default: aes]
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,

    /// Time steps [default: number of exercise dates, or 12]
    #[arg(long)]
    steps: Option<usize>,

    /// Maturity in years [default: preset maturity]
    #[arg(long)]
    maturity: Option<f64>,

    /// Initial asset price [default: preset spot]
    #[arg(long)]
    spot: Option<f64>,

    /// Paths per run [default: 1000000 / scale]
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    model: ModelFlags,

    /// Bermudan exercise dates, evenly spaced
    #[arg(long, conflicts_with = "american")]
    dates: Option<usize>,

    /// Exercise at every time step [default when --dates is absent]
    #[arg(long)]
    american: bool,

    /// Strike [default: preset strike]
    #[arg(long)]
    strike: Option<f64>,

    /// Independent runs to average [default: 1, or the config value capped by scale]
    #[arg(long)]
    runs: Option<usize>,

    /// Print the report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    model: ModelFlags,

    /// Strike [default: preset strike]
    #[arg(long)]
    strike: Option<f64>,

    /// Runs per scheme
    #[arg(long, default_value_t = 3)]
    runs: usize,
}

#[derive(Args)]
struct TablesArgs {
    /// Table id: 1-6, fig1, fig2 or fig3
    #[arg(long, required_unless_present = "config")]
    id: Option<String>,
}

#[derive(Args)]
#[command(after_help = "Here --paths is the number of paths written and defaults to 10.")]
struct PathsArgs {
    #[command(flatten)]
    model: ModelFlags,
}

fn usage_error(kind: ErrorKind, message: impl std::fmt::Display) -> ! {
    Cli::command().error(kind, message).exit()
}

fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn scaled_paths(scale: u64) -> usize {
    (FULL_PATHS / scale as usize).max(1)
}

/// Builds an experiment from the config file (if any) overridden by flags.
fn build_spec(cli: &Cli, flags: &ModelFlags, strike: Option<f64>, name: &str) -> Result<ExperimentSpec> {
    let scale = RunScale::from_factor(cli.scale as usize);
    let mut spec = match &cli.config {
        Some(path) => load_spec(path)?.scaled(scale),
        None => {
            let Some(preset) = flags.preset.map(Preset::from) else {
                let msg = if flags.model.is_some() {
                    "--model alone has no parameters; add --preset or --config"
                } else {
                    "a model is required: pass --preset or --config"
                };
                usage_error(ErrorKind::MissingRequiredArgument, msg);
            };
            ExperimentSpec {
                name: name.into(),
                model: ModelSpec::Preset(preset),
                scheme: Scheme::Aes,
                n_paths: scaled_paths(cli.scale),
                n_steps: 12,
                maturity: preset.maturity(),
                exercise: ExerciseSpec::American,
                date_mapping: DateMapping::Exact,
                spot: None,
                strike: None,
                spots: None,
                strikes: None,
                runs: 1,
                base_seed: 0,
                reference: None,
            }
        }
    };
    if let Some(p) = flags.preset {
        spec.model = ModelSpec::Preset(p.into());
    }
    if let Some(m) = flags.model {
        let want = match m {
            ModelArg::Heston => ModelKind::Heston,
            ModelArg::DoubleHeston => ModelKind::DoubleHeston,
        };
        if spec.model.params().kind() != want {
            usage_error(ErrorKind::ArgumentConflict, "--model does not match the preset or config model");
        }
    }
    if let Some(s) = flags.scheme {
        spec.scheme = s.into();
    }
    if let Some(m) = flags.maturity {
        spec.maturity = m;
    }
    if let Some(n) = flags.paths {
        spec.n_paths = n;
    }
    if let Some(s) = flags.spot {
        spec.spot = Some(s);
        spec.spots = None;
    }
    if let Some(k) = strike {
        spec.strike = Some(k);
        spec.strikes = None;
    }
    if let Some(seed) = cli.seed {
        spec.base_seed = seed;
    }
    if spec.strike.is_none() && spec.strikes.is_none() && !matches!(spec.model, ModelSpec::Preset(_)) {
        usage_error(ErrorKind::MissingRequiredArgument, "--strike is required without a preset");
    }
    Ok(spec)
}

fn write_reports(report: &ExperimentReport, dir: &Path, stem: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for format in [ReportFormat::Csv, ReportFormat::Json] {
        let path = dir.join(format!("{stem}.{}", format.extension()));
        emit_report(report, format, &path)?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn print_rows(report: &ExperimentReport) {
    for r in &report.rows {
        let reference = match (r.ref_price, r.rel_error) {
            (Some(p), Some(e)) => format!(", ref {p} ({:.3}%)", 100.0 * e),
            _ => String::new(),
        };
        println!(
            "{} {} {} M={} N={} runs={}: {:.6} (run std {:.6}){reference}, {:.3} s/run, {} bytes",
            r.experiment,
            r.case,
            r.scheme,
            r.n_steps,
            r.n_paths,
            r.runs,
            r.mean_price,
            r.run_std,
            r.elapsed_s,
            r.memory_bytes
        );
    }
}

fn cmd_price(cli: &Cli, args: &PriceArgs) -> Result<()> {
    let mut spec = build_spec(cli, &args.model, args.strike, "price")?;
    if let Some(d) = args.dates {
        spec.exercise = ExerciseSpec::Dates { dates: d };
    } else if args.american {
        spec.exercise = ExerciseSpec::American;
    }
    match (args.model.steps, spec.exercise) {
        (Some(m), _) => spec.n_steps = m,
        (None, ExerciseSpec::Dates { dates }) if cli.config.is_none() => spec.n_steps = dates,
        _ => {}
    }
    if let Some(r) = args.runs {
        spec.runs = r;
    }
    let report = run_experiment(&spec)?;
    if args.json {
        println!("{}", to_json_string(&report)?);
    } else {
        print_rows(&report);
    }
    if let Some(dir) = &cli.out {
        write_reports(&report, dir, &spec.name)?;
    }
    Ok(())
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    let mut flags = args.model.clone();
    if flags.preset.is_none() && cli.config.is_none() {
        flags.preset = Some(PresetArg::FellerViolating);
    }
    let mut base = build_spec(cli, &flags, args.strike, "bench")?;
    let steps = flags.steps.unwrap_or(20);
    base.exercise = ExerciseSpec::Dates { dates: steps };
    base.runs = args.runs;
    base.reference = None;

    let mut parts = Vec::new();
    for (scheme, m) in [(Scheme::Aes, steps), (Scheme::Euler, 2 * steps)] {
        let mut s = base.clone();
        s.name = format!("bench-{}", scheme.name());
        s.scheme = scheme;
        s.n_steps = m;
        parts.push(run_experiment(&s)?);
    }
    let report = ExperimentReport::merge("bench", parts);
    print_rows(&report);
    let (a, e) = (&report.rows[0], &report.rows[report.rows.len() / 2]);
    println!(
        "euler/aes: time {:.2}x, memory {:.2}x, price difference {:.4}%",
        e.elapsed_s / a.elapsed_s,
        e.memory_bytes as f64 / a.memory_bytes as f64,
        100.0 * (e.mean_price - a.mean_price).abs() / a.mean_price
    );
    if let Some(dir) = &cli.out {
        write_reports(&report, dir, "bench")?;
    }
    Ok(())
}

fn cmd_tables(cli: &Cli, args: &TablesArgs) -> Result<()> {
    let mut groups: Vec<ReportGroup> = match (&cli.config, &args.id) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            catalog::parse(&text)?
        }
        (None, Some(id)) => match catalog::load(id) {
            Ok(g) => g,
            Err(e) => usage_error(ErrorKind::InvalidValue, e),
        },
        (None, None) => unreachable!("clap requires --id or --config"),
    };
    if let Some(seed) = cli.seed {
        for spec in groups.iter_mut().flat_map(|g| g.experiments.iter_mut()) {
            spec.base_seed = seed;
        }
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let scale = RunScale::from_factor(cli.scale as usize);
    let mut cache = ReferenceCache::default();
    for group in &groups {
        let report = run_group(group, scale, &mut cache)?;
        print_rows(&report);
        write_reports(&report, &out, &group.file)?;
    }
    Ok(())
}

fn cmd_paths(cli: &Cli, args: &PathsArgs) -> Result<()> {
    let mut spec = build_spec(cli, &args.model, None, "paths")?;
    if let Some(m) = args.model.steps {
        spec.n_steps = m;
    }
    let model = spec.model_params()?;
    let model = match spec.spot {
        Some(s) => model.with_spot(s),
        None => model,
    };
    let count = args.model.paths.unwrap_or(10);
    if count == 0 {
        bail!("--paths must be at least 1");
    }
    let grid = spec.grid()?;
    let ps = simulate(&model, spec.scheme, &grid, count, spec.base_seed)?;

    let sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        ),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    let two = ps.factors() == 2;
    writeln!(w, "path,step,asset,var1{}", if two { ",var2" } else { "" })?;
    for i in 0..ps.n_paths() {
        for k in 0..=grid.steps() {
            write!(w, "{i},{k},{},{}", ps.asset(k)[i], ps.variance_1(k)[i])?;
            if let Some(v2) = ps.variance_2(k) {
                write!(w, ",{}", v2[i])?;
            }
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    match &cli.command {
        Command::Price(a) => cmd_price(&cli, a),
        Command::Bench(a) => cmd_bench(&cli, a),
        Command::Tables(a) => cmd_tables(&cli, a),
        Command::Paths(a) => cmd_paths(&cli, a),
    }
}
