use clap::{Parser, Subcommand};
use mdtune::forest::{cross_validate, read_dataset, serialize_forest, train_forest, Dataset};
use mdtune::fuzzy::RuleBase;
use mdtune::harness::{
    generate_training_dataset, run_experiment, run_simulation, Experiment, ExperimentOptions, GenDataOptions, RunOptions,
    ScenarioSpec, StrategySpec,
};
use mdtune::sim::SimulationReport;
use mdtune::tuning::TuningSettings;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

#[derive(Parser)]
#[command(name = "mdtune", version, about = "Lennard-Jones MD with run-time algorithm selection")]
struct Cli {
    /// Directory for reports; defaults to $MDTUNE_OUT_DIR or the current directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file (YAML or JSON).
    Run {
        scenario: PathBuf,
        /// Overrides the scenario's strategy.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Run one of the built-in experiments.
    Experiment {
        name: String,
        #[arg(long, default_value = "full")]
        strategy: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        tuning_interval: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Also run every configuration on its own for comparison.
        #[arg(long)]
        baseline_sweep: bool,
        /// Seconds allowed for each baseline run.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Produce a labelled training dataset.
    GenData {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        threads: Vec<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train a random forest on a dataset CSV.
    TrainForest {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        /// Print 5-fold cross-validation accuracy as well.
        #[arg(long)]
        cross_validate: bool,
    },
    /// Parse a rule file and report its contents.
    ValidateRules { rules: PathBuf },
}

fn out_dir(cli: &Option<PathBuf>) -> PathBuf {
    cli.clone()
        .or_else(|| std::env::var_os("MDTUNE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn require(path: &Path) -> Result<(), String> {
    if path.exists() {
        Ok(())
    } else {
        Err(format!("{}: no such file", path.display()))
    }
}

fn strategy_spec(name: &str, model: Option<PathBuf>, rules: Option<PathBuf>, k: Option<usize>) -> Result<StrategySpec, String> {
    let mut s: StrategySpec = name.parse().map_err(|e: mdtune::Error| e.to_string())?;
    match &mut s {
        StrategySpec::RandomForest { model: m, k: kk } => {
            let path = model.ok_or("the random-forest strategy needs --model")?;
            require(&path)?;
            *m = path;
            *kk = k;
        }
        StrategySpec::Expert { rules: r, .. } => {
            if let Some(p) = rules {
                require(&p)?;
                *r = Some(p);
            }
        }
        _ => {}
    }
    Ok(s)
}

fn write_report(report: &SimulationReport, dir: &Path, stem: &str) -> mdtune::Result<()> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{stem}.csv"));
    report.write_csv(&csv)?;
    std::fs::write(dir.join(format!("{stem}.json")), report.summary_json()?)?;
    mdtune::tuning::write_tuning_log(&dir.join(format!("{stem}-tuning.csv")), &report.tuning_log)?;
    println!("report written to {}", csv.display());
    Ok(())
}

fn print_phases(report: &SimulationReport) {
    for p in &report.phases {
        println!("phase {:>3} @ {:>7}: {} ({} candidates)", p.phase, p.start_iteration, p.selected, p.candidates.len());
    }
    println!(
        "total force {:.3} s, build {:.3} s",
        report.total_force_nanos() as f64 * 1e-9,
        report.total_build_nanos() as f64 * 1e-9
    );
}

enum Failure {
    Usage(String),
    Run(mdtune::Error),
}

impl From<mdtune::Error> for Failure {
    fn from(e: mdtune::Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let dir = out_dir(&cli.out_dir);
    match cli.command {
        Command::Run { scenario, strategy, model, rules } => {
            require(&scenario).map_err(Failure::Usage)?;
            let spec = ScenarioSpec::load(&scenario)?;
            let strat = match strategy {
                Some(s) => strategy_spec(&s, model, rules, None).map_err(Failure::Usage)?,
                None => spec.strategy.clone(),
            };
            let report = run_simulation(&spec, &strat, &RunOptions::default())?;
            print_phases(&report);
            write_report(&report, &dir, &spec.name)?;
            if let Some(e) = report.error {
                return Err(Failure::Run(mdtune::Error::Scenario(e)));
            }
        }
        Command::Experiment {
            name,
            strategy,
            scale,
            iterations,
            model,
            rules,
            k,
            threads,
            seed,
            tuning_interval,
            samples,
            baseline_sweep,
            timeout,
        } => {
            let exp: Experiment = name.parse().map_err(|e: mdtune::Error| Failure::Usage(e.to_string()))?;
            let strat = strategy_spec(&strategy, model, rules, Some(k)).map_err(Failure::Usage)?;
            let opts = ExperimentOptions {
                scale,
                iterations,
                seed,
                thread_count: threads,
                tuning: TuningSettings { tuning_interval, samples_per_config: samples },
                baseline_sweep,
                baseline_budget: timeout.map(Duration::from_secs_f64),
                ..Default::default()
            };
            let outcome = run_experiment(exp, &strat, &opts)?;
            println!("{}: {} particles", outcome.experiment, outcome.particles);
            print_phases(&outcome.report);
            let stem = format!("{}-{}", outcome.experiment, outcome.report.strategy);
            write_report(&outcome.report, &dir, &stem)?;
            if baseline_sweep {
                outcome.write_comparison(&dir.join(format!("{stem}-baseline.csv")))?;
                if let (Some(best), Some(s)) = (&outcome.best_single, outcome.speedup) {
                    println!("best single configuration {best}; speedup {s:.3}");
                }
            }
            if let Some(e) = outcome.report.error {
                return Err(Failure::Run(mdtune::Error::Scenario(e)));
            }
        }
        Command::GenData { out, cap, threads, seed } => {
            let opts = GenDataOptions { particle_cap: cap, threads, seed, ..Default::default() };
            let summary = generate_training_dataset(&out, &opts)?;
            for (name, why) in &summary.skipped {
                eprintln!("skipped {name}: {why}");
            }
            println!(
                "{} rows from {} scenarios in {:.1} s written to {}",
                summary.rows.len(),
                summary.scenarios,
                summary.elapsed.as_secs_f64(),
                out.display()
            );
        }
        Command::TrainForest { data, out, seed, trees, cross_validate: cv } => {
            require(&data).map_err(Failure::Usage)?;
            let rows = read_dataset(&data)?;
            let dataset = Dataset::from_rows(&rows);
            let forest = train_forest(&dataset, trees, seed)?;
            std::fs::write(&out, serialize_forest(&forest)?)?;
            println!("{} trees over {} classes written to {}", trees, forest.classes.len(), out.display());
            if cv {
                let r = cross_validate(&dataset, 5, trees, seed)?;
                println!("5-fold accuracy {:.3}, top-3 containment {:.3}", r.top1, r.top3);
            }
        }
        Command::ValidateRules { rules } => {
            require(&rules).map_err(Failure::Usage)?;
            let rb = RuleBase::parse(&std::fs::read_to_string(&rules)?)?;
            println!(
                "{} variables, {} rules over {} configurations",
                rb.inputs.len(),
                rb.rules.len(),
                rb.configurations().len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
