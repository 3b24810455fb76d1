//! `cbol`: run the tuner and its baselines on the synthetic latent system and
//! write histories, summaries and comparisons.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cbol_core::baselines::{multi_gradient_search, multi_random_search};
use cbol_core::reporting::io::{
    comparison_csv, comparison_table, read_history, summary_csv, write_history,
};
use cbol_core::reporting::oracle::{run_oracle, DEFAULT_RESOLUTION};
use cbol_core::reporting::{compare, summarize, Config, SummaryStats};
use cbol_core::{multi_run, run_seed, Objective, RunResult, SyntheticSystem};

#[derive(Parser)]
#[command(
    name = "cbol",
    version,
    about = "Classifier-pruned latent-space beam tuning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the classifier-pruned Bayesian optimiser.
    Tune(Common),
    /// Run pruned random search.
    Rs(Common),
    /// Run the finite-difference Adam baseline.
    Grad(Common),
    /// Run all three methods with paired seeds and write a comparison.
    Compare(Common),
    /// Grid-search the constrained optimum of the synthetic system.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Rebuild summaries and the comparison from histories in --out.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    xi: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => {
                Config::load(path).with_context(|| format!("loading config {}", path.display()))?
            }
            None => Config::default(),
        };
        if let Some(v) = self.seed {
            cfg.tuner.seed = v;
        }
        if let Some(v) = self.iterations {
            cfg.tuner.iterations = v;
        }
        if let Some(v) = self.runs {
            cfg.tuner.runs = v;
        }
        if let Some(v) = self.xi {
            cfg.tuner.xi = v;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Method {
    Bo,
    Rs,
    Grad,
}

impl Method {
    const ALL: [Method; 3] = [Method::Bo, Method::Rs, Method::Grad];

    fn name(self) -> &'static str {
        match self {
            Method::Bo => "bo",
            Method::Rs => "rs",
            Method::Grad => "grad",
        }
    }
}

struct Experiment {
    cfg: Config,
    system: SyntheticSystem,
    objective: Objective,
    out: PathBuf,
}

impl Experiment {
    fn new(common: &Common) -> Result<Self> {
        let cfg = common.config()?;
        let system = cfg.system().context("loading the synthetic system")?;
        let objective = cfg.objective(&system)?;
        Ok(Self {
            cfg,
            system,
            objective,
            out: common.out.clone(),
        })
    }

    fn run(&self, method: Method) -> Result<Vec<RunResult>> {
        let runs = match method {
            Method::Bo => multi_run(&self.cfg.tuner()?, &self.system, &self.objective)?,
            Method::Rs => {
                multi_random_search(&self.cfg.baseline()?, &self.system, &self.objective)?
            }
            Method::Grad => {
                multi_gradient_search(&self.cfg.baseline()?, &self.system, &self.objective)?
            }
        };
        Ok(runs)
    }

    /// Writes the per-run histories and the method summary.
    fn persist(&self, method: Method, runs: &[RunResult]) -> Result<SummaryStats> {
        let dir = self.out.join(method.name());
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for r in runs {
            write_history(&dir.join(format!("run_{}.jsonl", r.run_index)), r)?;
        }
        let stats = summarize(runs, method.name())?;
        write(
            &self.out.join(format!("{}_summary.csv", method.name())),
            &summary_csv(&[&stats]),
        )?;
        Ok(stats)
    }

    fn load(&self, method: Method) -> Result<Vec<RunResult>> {
        let dir = self.out.join(method.name());
        let seed = self.cfg.tuner.seed;
        let mut runs = Vec::new();
        for idx in 0..self.cfg.tuner.runs {
            let path = dir.join(format!("run_{idx}.jsonl"));
            let entries =
                read_history(&path).with_context(|| format!("reading {}", path.display()))?;
            runs.push(RunResult::from_entries(
                idx,
                run_seed(seed, idx as u64),
                entries,
                0,
            ));
        }
        Ok(runs)
    }

    fn write_comparison(&self, stats: [SummaryStats; 3]) -> Result<()> {
        let [bo, rs, grad] = stats;
        let report = compare(bo, rs, Some(grad))?;
        write(&self.out.join("comparison.csv"), &comparison_csv(&report))?;
        let table = comparison_table(&report);
        write(&self.out.join("comparison.txt"), &table)?;
        print!("{table}");
        Ok(())
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_single(common: &Common, method: Method) -> Result<()> {
    let exp = Experiment::new(common)?;
    let runs = exp.run(method)?;
    let stats = exp.persist(method, &runs)?;
    print!("{}", summary_csv(&[&stats]));
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Tune(c) => run_single(c, Method::Bo),
        Command::Rs(c) => run_single(c, Method::Rs),
        Command::Grad(c) => run_single(c, Method::Grad),
        Command::Compare(c) => {
            let exp = Experiment::new(c)?;
            let mut stats = Vec::new();
            for m in Method::ALL {
                let runs = exp.run(m)?;
                stats.push(exp.persist(m, &runs)?);
            }
            let stats: [SummaryStats; 3] = stats.try_into().expect("three methods");
            exp.write_comparison(stats)
        }
        Command::Report(c) => {
            let exp = Experiment::new(c)?;
            let mut stats = Vec::new();
            for m in Method::ALL {
                let runs = exp.load(m)?;
                let s = summarize(&runs, m.name())?;
                write(
                    &exp.out.join(format!("{}_summary.csv", m.name())),
                    &summary_csv(&[&s]),
                )?;
                stats.push(s);
            }
            let stats: [SummaryStats; 3] = stats.try_into().expect("three methods");
            exp.write_comparison(stats)
        }
        Command::Oracle { common, resolution } => {
            if *resolution == 0 {
                bail!("--resolution must be at least 1");
            }
            let exp = Experiment::new(common)?;
            let bounds = exp.cfg.bounds()?;
            let oracle = run_oracle(&exp.system, &exp.objective, &bounds, *resolution)?;
            write(&exp.out.join("oracle.json"), &oracle.to_json()?)?;
            println!("L* = {}", oracle.loss);
            println!("z* = {:?}", oracle.z_star.0);
            Ok(())
        }
    }
}
