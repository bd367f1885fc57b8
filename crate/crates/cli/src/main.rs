use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_jump_cli::acceptance;
use dirac_jump_cli::scenario::default_config;
use dirac_jump_cli::{run_scenario, ScenarioConfig, ScenarioKind};

#[derive(Parser)]
#[command(name = "dirac-jump", version, about = "Single-jump spectral scenarios and acceptance suite")]
struct Cli {
    /// Worker threads for sweeps and Monte Carlo (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Scenario file; the built-in configuration is used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo seed, overriding `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Toy boundary problem against the pointwise cocycle.
    ToyEquivalence(Overrides),
    /// Reflection model under grid refinement.
    Reflect(Overrides),
    /// Convergence of the dressed evolution as the carrier momentum grows.
    KappaSweep(Overrides),
    /// Jump-time ensemble against the deterministic expectation.
    MonteCarlo(Overrides),
    /// All scenarios with their built-in configurations.
    FullSuite(Overrides),
    /// Run whatever scenario the config file names.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// The acceptance criteria with a pass/fail matrix.
    SelfTest,
}

fn load(kind: Option<ScenarioKind>, o: &Overrides) -> Result<ScenarioConfig, ExitCode> {
    let cfg = match (&o.config, kind) {
        (Some(path), _) => ScenarioConfig::from_path(path),
        (None, Some(kind)) => ScenarioConfig::from_toml(default_config(kind)),
        (None, None) => unreachable!("run always has a config"),
    };
    let mut cfg = cfg.map_err(|e| {
        eprintln!("configuration error: {e}");
        ExitCode::from(2)
    })?;
    if let Some(k) = kind {
        if cfg.kind != k {
            eprintln!("configuration error: config is for `{}`, not `{}`", cfg.kind.name(), k.name());
            return Err(ExitCode::from(2));
        }
    }
    if let Some(seed) = o.seed {
        cfg.set_seed(seed);
    }
    if let Some(dir) = &o.out {
        cfg.set_output_dir(dir.clone());
    }
    Ok(cfg)
}

fn execute(cfg: &ScenarioConfig) -> ExitCode {
    match run_scenario(cfg) {
        Ok(rep) => {
            for a in &rep.assertions {
                println!("{}  {}: {:.6e} <= {:.6e}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.value, a.limit);
            }
            println!("report: {}", cfg.output.directory.join("report.json").display());
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                let names: Vec<&str> = rep.failed().map(|a| a.name.as_str()).collect();
                eprintln!("{} failed: {}", rep.scenario, names.join("; "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("configuration error: --jobs: {e}");
            return ExitCode::from(2);
        }
    }
    let (kind, overrides) = match cli.command {
        Command::SelfTest => {
            let results = acceptance::self_test();
            for r in &results {
                println!("{r}");
            }
            return if results.iter().all(|r| r.passed) { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
        Command::Run { config, out, seed } => (None, Overrides { config: Some(config), out, seed }),
        Command::ToyEquivalence(o) => (Some(ScenarioKind::ToyEquivalence), o),
        Command::Reflect(o) => (Some(ScenarioKind::Reflect), o),
        Command::KappaSweep(o) => (Some(ScenarioKind::KappaSweep), o),
        Command::MonteCarlo(o) => (Some(ScenarioKind::MonteCarlo), o),
        Command::FullSuite(o) => (Some(ScenarioKind::FullSuite), o),
    };
    match load(kind, &overrides) {
        Ok(cfg) => execute(&cfg),
        Err(code) => code,
    }
}
