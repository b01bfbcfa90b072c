use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shift2iet::FactorTable;
use shift2iet_cli::config::{parse_config, parse_fixture, ConfigError, Overrides, RunConfig, Source};
use shift2iet_cli::{run, thread_limit, Command, EXIT_INPUT};

#[derive(Parser)]
#[command(
    name = "shift2iet",
    version,
    about = "Interval exchange approximants of substitution shifts"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Complexity and special factor counts per length (analyze.tsv)
    Analyze(Opts),
    /// Cylinder refinement with measure estimates (partition.tsv)
    Partition(Opts),
    /// Measure estimates and invariance defects of short factors (measures.tsv)
    Measures(Opts),
    /// Pieces of the approximant T_n (approx_N.csv)
    Approx(Opts),
    /// Graph of T_n with discontinuity clusters (approx_N.svg)
    Plot(Opts),
    /// Invariant suite plus all tables (verify.log)
    Verify(Opts),
    /// Compare the Fibonacci shift with the golden rotation
    Roundtrip {
        /// Fixture name (only fibonacci has a known exchange)
        #[arg(value_name = "FIXTURE")]
        name: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Clone)]
struct Opts {
    /// Built-in substitution: thue-morse, fibonacci, tribonacci, tetranacci, rudin-shapiro
    #[arg(long, conflicts_with = "config")]
    fixture: Option<String>,
    /// Inline JSON, a JSON file, or a fixture name
    #[arg(long)]
    config: Option<String>,
    /// Longest factor length in the table [default: 120]
    #[arg(long)]
    nmax: Option<usize>,
    /// Refinement depth [default: nmax/2]
    #[arg(long)]
    depth: Option<usize>,
    /// Level for measures and approximants [default: min(100, nmax)]
    #[arg(long)]
    n: Option<usize>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grid size for sup-distance comparisons [default: 1000]
    #[arg(long)]
    grid: Option<usize>,
    /// Cluster scale for discontinuities [default: 0.02]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Assert that the shift is aperiodic (not decided automatically)
    #[arg(long)]
    assert_aperiodic: bool,
}

fn build_config(opts: &Opts, positional: Option<&str>, roundtrip: bool) -> Result<RunConfig, ConfigError> {
    let (sub, source, file_overrides) = match (positional.or(opts.fixture.as_deref()), &opts.config) {
        (Some(name), _) => {
            let f = parse_fixture(name)?;
            (f.substitution(), Source::Fixture(f), Overrides::default())
        }
        (None, Some(c)) => parse_config(c)?,
        (None, None) => {
            return Err(ConfigError::Invalid(
                "one of --fixture or --config is required".into(),
            ))
        }
    };
    let default_nmax = if roundtrip { Some(15) } else { None };
    let params = Overrides {
        n_max: opts.nmax.or(file_overrides.n_max).or(default_nmax),
        depth_cap: opts.depth.or(file_overrides.depth_cap),
        n: opts.n.or(file_overrides.n),
        grid: opts.grid.or(file_overrides.grid),
        epsilon: opts.epsilon.or(file_overrides.epsilon),
    };
    RunConfig::new(sub, source, &params, opts.out.clone(), opts.assert_aperiodic)
}

fn aperiodicity_check(cfg: &RunConfig) -> Result<(), String> {
    if cfg.fixture().is_some() {
        return Ok(());
    }
    let witness = FactorTable::build(&cfg.substitution, cfg.n_max.min(40))
        .ok()
        .and_then(|t| t.periodicity_witness());
    match (witness, cfg.assert_aperiodic) {
        (Some(n), true) => {
            return Err(format!(
                "--assert-aperiodic contradicted: p({n}) <= {n}, the shift is periodic"
            ))
        }
        (Some(n), false) => {
            eprintln!("warning: p({n}) <= {n}; the shift is periodic and the approximants degenerate")
        }
        (None, false) => {
            eprintln!("warning: aperiodicity is assumed, not checked; pass --assert-aperiodic to confirm")
        }
        (None, true) => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match thread_limit(std::env::var("SHIFT2IET_THREADS").ok().as_deref()) {
        Ok(Some(n)) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    let (cmd, opts, positional) = match &cli.command {
        Cmd::Analyze(o) => (Command::Analyze, o, None),
        Cmd::Partition(o) => (Command::Partition, o, None),
        Cmd::Measures(o) => (Command::Measures, o, None),
        Cmd::Approx(o) => (Command::Approx, o, None),
        Cmd::Plot(o) => (Command::Plot, o, None),
        Cmd::Verify(o) => (Command::Verify, o, None),
        Cmd::Roundtrip { name, opts } => (Command::Roundtrip, opts, name.as_deref()),
    };
    let cfg = match build_config(opts, positional, cmd == Command::Roundtrip) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cmd.name());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    if let Err(e) = aperiodicity_check(&cfg) {
        eprintln!("error: {}: {e}", cmd.name());
        return ExitCode::from(EXIT_INPUT as u8);
    }
    match run(cmd, &cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
