use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rsgda_core::da::CorruptionModel;
use rsgda_core::dda::{
    dda_sample_size, plan_subdas, run_distributed, DistributedConfig, Execution, Feasibility,
};
use rsgda_core::rng::Stream;
use rsgda_core::rsg::{
    estimate_lipschitz, make_stopping_distribution, multi_fold_select, run_folds, sample_size,
    LipschitzConfig, RsgConfig, StoppingRule,
};
use rsgda_harness::checks;
use rsgda_harness::experiment::{
    dataset_for, reconstruction_error, run_experiment, write_outputs, ExperimentKind,
};
use rsgda_harness::settings::Settings;
use rsgda_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(
    name = "rsgda",
    version,
    about = "Randomized stochastic gradient training of denoising autoencoders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network with randomized stopping and fold selection.
    Train(Common),
    /// Train with sub-DAs over random subsets of the visible units.
    Dda {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dist: Dist,
    },
    /// Run a sweep and write `<out>/<kind>.csv` and `<out>/manifest.txt`.
    Experiment {
        /// grad_vs_N, grad_vs_shape, grad_vs_B, speedup or generalization_parity
        kind: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        dist: Dist,
    },
    /// Folds and instances needed for an (epsilon, delta)-solution.
    Estimate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Sub-DA fraction; omit for the single-network estimate.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Gradient, corruption and stopping self-checks.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Flat key=value settings file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dv: Option<String>,
    #[arg(long)]
    dh: Option<String>,
    #[arg(long)]
    zeta: Option<String>,
    #[arg(long = "N")]
    iterations: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// constant, optimal or poly
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long = "D")]
    d: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Extra settings as key=value, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    extra: Vec<String>,
}

#[derive(Args)]
struct Dist {
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    /// disjoint or replacement
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    meta: Option<String>,
}

impl Common {
    fn settings(&self, dist: Option<&Dist>) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            s.apply_file(path)?;
        }
        let mut pairs = vec![
            ("dv", &self.dv),
            ("dh", &self.dh),
            ("zeta", &self.zeta),
            ("N", &self.iterations),
            ("seed", &self.seed),
            ("schedule", &self.schedule),
            ("gamma", &self.gamma),
            ("D", &self.d),
            ("p", &self.p),
            ("out", &self.out),
        ];
        if let Some(d) = dist {
            pairs.extend([
                ("tau", &d.tau),
                ("phi", &d.phi),
                ("B", &d.b),
                ("mode", &d.mode),
                ("workers", &d.workers),
                ("meta", &d.meta),
            ]);
        }
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        for kv in &self.extra {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("--set {kv:?}: expected key=value")))?;
            s.set(k.trim(), v)?;
        }
        Ok(s)
    }
}

fn train(s: &Settings) -> Result<()> {
    let data = dataset_for(s, s.dv, s.seed)?;
    let shape = data.shape(s.dh)?;
    let model = CorruptionModel::new(s.zeta)?;
    let root = Stream::new(s.seed);
    let lip = estimate_lipschitz(
        &data,
        &model,
        &shape,
        &LipschitzConfig::new(20),
        &mut root.derive_named("lipschitz"),
    )?;
    let schedule = s.schedule_for(s.iterations, None);
    let stopping = make_stopping_distribution(&schedule, s.iterations, &lip, &shape)?;
    let cfg = RsgConfig {
        model,
        schedule,
        iterations: s.iterations,
        stopping: StoppingRule::Sampled(stopping),
        init_seed: s.seed,
    };
    let runs = run_folds(
        &data,
        &shape,
        &cfg,
        s.folds.max(1),
        &root.derive_named("folds"),
        true,
    )?;
    let pick = multi_fold_select(
        &runs,
        &data,
        model,
        s.oracle_mode(),
        &mut root.derive_named("select"),
    )?;
    let best = &runs[pick.index];
    println!("L={:.4} L'={:.4}", lip.loss, lip.gradient);
    for (c, (run, score)) in runs.iter().zip(&pick.scores).enumerate() {
        println!("fold {c}: R={} grad_sq={score:.6e}", run.stop);
    }
    println!(
        "selected fold {} clean_error={:.6}",
        pick.index,
        reconstruction_error(&best.w_final, &data)?
    );
    Ok(())
}

fn dda(s: &Settings) -> Result<()> {
    let data = dataset_for(s, s.dv, s.seed)?;
    let shape = data.shape(s.dh)?;
    let tau = match (s.tau, s.b) {
        (Some(t), _) => t,
        (None, Some(b)) if b > 0 => 1.0 / b as f64,
        (None, Some(_)) => return Err(HarnessError::Config("B must be at least 1".into())),
        (None, None) => return Err(HarnessError::Config("dda needs --tau or --B".into())),
    };
    let feasibility = if tau == 1.0 {
        Feasibility::Relaxed
    } else {
        Feasibility::Strict
    };
    let root = Stream::new(s.seed);
    let plan = plan_subdas(
        &shape,
        s.zeta,
        tau,
        s.phi,
        s.mode,
        feasibility,
        s.meta,
        &mut root.derive_named("plan"),
    )?;
    let steps = s.iterations;
    let mut cfg = DistributedConfig::new(s.schedule_for(steps, None), steps);
    cfg.warm_start = s.warm_start;
    cfg.warm_schedule = s.schedule_for(s.warm_start.max(1), None);
    cfg.init_seed = s.seed;
    cfg.execution = if s.workers > 1 {
        Execution::Parallel { workers: s.workers }
    } else {
        Execution::Sequential
    };
    let run = run_distributed(&plan, &data, s.dh, &cfg, &mut root.derive_named("run"))?;
    println!(
        "sub-DAs={} block={} q={:.4} meta={}",
        plan.count(),
        plan.block_size,
        plan.q,
        plan.meta_iterations()
    );
    println!(
        "trailing_grad_sq_noisy={:.6e} clean_error={:.6} train_ms={}",
        run.trailing_noisy(s.window),
        reconstruction_error(&run.weights, &data)?,
        run.training_elapsed().as_millis()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(common) => train(&common.settings(None)?),
        Command::Dda { common, dist } => dda(&common.settings(Some(&dist))?),
        Command::Experiment { kind, common, dist } => {
            let kind: ExperimentKind = kind.parse()?;
            let s = common.settings(Some(&dist))?;
            let out = run_experiment(kind, &s)?;
            let dir = s.out.clone().unwrap_or_else(|| PathBuf::from("results"));
            write_outputs(&out, &s, &dir)?;
            println!(
                "{} rows written to {}",
                out.records.len(),
                dir.join(format!("{kind}.csv")).display()
            );
            Ok(())
        }
        Command::Estimate {
            common,
            r,
            delta,
            epsilon,
            t,
            tau,
        } => {
            let s = common.settings(None)?;
            let shape = rsgda_core::da::NetworkShape::for_data(s.dv, s.dh, s.bias)?;
            match tau {
                None => {
                    let rep = sample_size(r, delta, epsilon, t, &shape)?;
                    println!(
                        "folds={} instances={} oracle_calls={}",
                        rep.folds, rep.instances, rep.oracle_calls
                    );
                }
                Some(tau) => {
                    let rep = dda_sample_size(r, delta, epsilon, t, tau, &shape)?;
                    println!("meta={} instances={}", rep.meta, rep.instances);
                }
            }
            Ok(())
        }
        Command::Check { seed } => {
            let reports = checks::run_all(seed)?;
            let mut failed = 0;
            for r in &reports {
                println!(
                    "{} {}: {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
                failed += usize::from(!r.passed);
            }
            if failed > 0 {
                return Err(HarnessError::Sweep(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprintln!(
                "error: usage: {}",
                e.render().to_string().trim_start_matches("error: ")
            );
            return ExitCode::from(2);
        }
        Err(e) => {
            print!("{}", e.render());
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.category());
            ExitCode::from(1)
        }
    }
}
