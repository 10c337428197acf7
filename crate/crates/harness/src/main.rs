use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsga_approx::algorithms::{run, Variant};
use nsga_approx::metrics::{FrontSubset, MetricReport, ReferencePoint};
use nsga_approx::rng::RngHandle;
use nsga_approx::scenarios::{run_selection_trials, Scenario, ScenarioKind};
use nsga_approx::survival::Engine;
use nsga_approx::variation::{MatingScheme, MutationOp};
use nsga_approx_harness::experiment::{algorithm_config, run_seed, Setting};
use nsga_approx_harness::{
    output, run_experiment, ExperimentConfig, HarnessError, Overrides, Result,
};
use nsga_approx_harness::{EXIT_CONFIG, EXIT_TIMEOUT, EXIT_VIOLATION};

/// NSGA-II survival-selection experiments on OneMinMax.
#[derive(Debug, Parser)]
#[command(name = "nsga-approx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration and write its full per-generation trace.
    Run {
        #[command(flatten)]
        common: Common,
        /// Fixed number of generations (iterations for steady state);
        /// by default the run stops at the end of the last window after t0.
        #[arg(long)]
        generations: Option<u64>,
    },
    /// Run the full grid and write table1.csv plus per-run traces.
    Table1 {
        #[command(flatten)]
        common: Common,
    },
    /// Repeat one survival selection on a synthetic combined population.
    Scenario {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "full-coverage")]
        kind: ScenarioKind,
        #[arg(long, default_value = "classic")]
        engine: Engine,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Print the approximation measures of a front subset as JSON.
    Metrics {
        /// File with a header line `n=<value>` and one f1 value per line.
        file: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        r1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        r2: f64,
    },
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    /// Population size(s), comma separated.
    #[arg(long = "pop-size", value_delimiter = ',')]
    pop_size: Option<Vec<usize>>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    mating: Option<MatingScheme>,
    #[arg(long)]
    mutation: Option<MutationOp>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// key=value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        config.apply(&Overrides {
            n: self.n,
            pop_sizes: self.pop_size.clone(),
            variant: self.variant,
            mating: self.mating,
            mutation: self.mutation,
            runs: self.runs,
            seed: self.seed,
            out: self.out.clone(),
            workers: self.workers,
        })?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run {
            common,
            generations,
        } => cmd_run(&common.resolve()?, generations),
        Command::Table1 { common } => cmd_table1(&common.resolve()?),
        Command::Scenario {
            common,
            kind,
            engine,
            trials,
        } => cmd_scenario(&common, kind, engine, trials),
        Command::Metrics { file, r1, r2 } => cmd_metrics(&file, r1, r2),
    }
}

fn cmd_run(config: &ExperimentConfig, generations: Option<u64>) -> Result<i32> {
    let setting = Setting {
        variant: config.variants[0],
        capacity: config.pop_sizes[0],
    };
    let seed = run_seed(config.seed, setting, 0);
    let scale = setting.variant.iterations_per_generation(setting.capacity);
    let mut algo = algorithm_config(config, setting, seed);
    algo.max_generations = match generations {
        Some(g) => g,
        None => {
            // Find t0 first with the same seed, then extend to the horizon.
            let mut opt = nsga_approx::algorithms::Optimizer::new(algo)?;
            let cap = config.safety_cap * scale;
            while opt.t0().is_none() && opt.generation() < cap {
                opt.step()?;
            }
            match opt.t0() {
                Some(t0) => t0 + config.horizon() * scale,
                None => {
                    eprintln!("both extremes not found within {cap} steps");
                    return Ok(EXIT_TIMEOUT);
                }
            }
        }
    };
    let trace = run(algo)?;
    output::ensure_dir(&config.out)?;
    let path = config
        .out
        .join(format!("run_{}_{}.csv", setting.variant, setting.capacity));
    output::write_trace(&path, &trace)?;
    println!(
        "wrote {} ({} generations, t0 = {:?})",
        path.display(),
        trace.records.len() - 1,
        trace.t0
    );
    for v in &trace.violations {
        eprintln!("violation: {v}");
    }
    Ok(if trace.violations.is_empty() {
        0
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_table1(config: &ExperimentConfig) -> Result<i32> {
    let result = run_experiment(config)?;
    let files = output::write_experiment(&config.out, &result)?;
    println!("variant,N,window,q1,q2,q3,samples");
    for s in &result.summaries {
        println!(
            "{},{},{},{},{},{},{}",
            s.variant, s.capacity, s.window, s.q1, s.q2, s.q3, s.samples
        );
    }
    println!("wrote {} files to {}", files.len(), config.out.display());
    for o in &result.outcomes {
        for v in &o.violations {
            eprintln!(
                "{} N={} run {}: {v}",
                o.setting.variant, o.setting.capacity, o.run
            );
        }
    }
    if result.timeouts() > 0 {
        eprintln!("{} run(s) did not find both extremes", result.timeouts());
    }
    Ok(result.exit_code())
}

fn cmd_scenario(common: &Common, kind: ScenarioKind, engine: Engine, trials: usize) -> Result<i32> {
    let config = common.resolve()?;
    let n = match (common.n, kind) {
        (Some(n), _) => n,
        (None, ScenarioKind::FullCoverage) => config.n,
        (None, ScenarioKind::Adversarial) => 300,
    };
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    let scenario = Scenario::new(kind, n).map_err(|e| HarnessError::Config(e.to_string()))?;
    let stats = run_selection_trials(scenario, engine, trials, &mut RngHandle::new(config.seed))?;
    output::ensure_dir(&config.out)?;
    let path = config
        .out
        .join(output::scenario_file_name(&scenario, engine));
    output::write_scenario(&path, &stats)?;
    let [q1, q2, q3] = stats.quartiles;
    println!(
        "{kind} n={n} N={} {engine}: MEI quartiles ({q1},{q2},{q3}) over {trials} trials",
        scenario.capacity()
    );
    println!("wrote {}", path.display());
    Ok(0)
}

fn parse_subset(text: &str) -> std::result::Result<FrontSubset, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or("empty input")?;
    let n: u32 = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format!("line {line}: expected header n=<value>"))?;
    let mut values = Vec::new();
    for (line, l) in lines {
        values.push(
            l.parse::<u32>()
                .map_err(|_| format!("line {line}: not an integer: {l:?}"))?,
        );
    }
    FrontSubset::new(n, values).map_err(|e| e.to_string())
}

fn cmd_metrics(file: &Path, r1: f64, r2: f64) -> Result<i32> {
    let text = std::fs::read_to_string(file).map_err(|e| HarnessError::io(file, e))?;
    let subset = parse_subset(&text).map_err(HarnessError::Config)?;
    let r = ReferencePoint::new(r1, r2)?;
    let report = MetricReport::compute(&subset, r);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}
