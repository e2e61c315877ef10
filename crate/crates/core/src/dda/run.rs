use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::da::{CorruptionModel, WeightMatrix};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveOracle, OracleMode};
use crate::rng::Stream;
use crate::rsg::{rsg_run_from, Monitor, RsgConfig, StepSchedule, StoppingRule};

use super::store::{Lease, ParameterStore};
use super::SubDAPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Sub-DAs run one after another, each seeing the columns its
    /// predecessors wrote.
    Sequential,
    /// Sub-DAs run on up to `workers` threads against the parameter store.
    Parallel { workers: usize },
}

/// Oracle monitoring of the last `window` iterates of every sub-DA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrailingMonitor {
    pub window: usize,
    /// Frozen Monte Carlo draws per sub-DA oracle.
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedConfig {
    /// Step schedule of each sub-DA, evaluated at the sub-DA's shape.
    pub schedule: StepSchedule,
    pub steps_per_subda: usize,
    /// Whole-network RSG iterations before the first meta-iteration.
    pub warm_start: usize,
    /// Schedule of the warm start, evaluated at the full shape.
    pub warm_schedule: StepSchedule,
    pub init_seed: u64,
    pub execution: Execution,
    pub monitor: Option<TrailingMonitor>,
}

impl DistributedConfig {
    pub fn new(schedule: StepSchedule, steps_per_subda: usize) -> Self {
        Self {
            warm_schedule: schedule.clone(),
            schedule,
            steps_per_subda,
            warm_start: 200,
            init_seed: 0,
            execution: Execution::Sequential,
            monitor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubDARecord {
    pub meta: usize,
    pub index: usize,
    /// Data units of this sub-DA.
    pub subset: Vec<usize>,
    pub grad_norm_history: Vec<f64>,
    /// Oracle `‖∇f_b‖²` over the monitored tail, when monitoring.
    pub oracle_history: Vec<f64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct DistributedRun {
    pub weights: WeightMatrix,
    pub records: Vec<SubDARecord>,
    pub warm_elapsed: Duration,
    /// Wall clock of each meta-iteration, barrier included.
    pub meta_elapsed: Vec<Duration>,
}

impl DistributedRun {
    /// Mean over the sub-DAs of the last meta-iteration of their average
    /// monitored `‖∇f_b‖²`.
    pub fn trailing_gradient(&self) -> Option<f64> {
        let last = self.last_round();
        let vals: Option<Vec<f64>> = last
            .iter()
            .map(|r| {
                (!r.oracle_history.is_empty())
                    .then(|| r.oracle_history.iter().sum::<f64>() / r.oracle_history.len() as f64)
            })
            .collect();
        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// As [`Self::trailing_gradient`], from the noisy `‖G‖²` history.
    pub fn trailing_noisy(&self, window: usize) -> f64 {
        let last = self.last_round();
        let sum: f64 = last
            .iter()
            .map(|r| {
                let h = &r.grad_norm_history;
                let tail = &h[h.len().saturating_sub(window.max(1))..];
                tail.iter().sum::<f64>() / tail.len() as f64
            })
            .sum();
        sum / last.len() as f64
    }

    fn last_round(&self) -> Vec<&SubDARecord> {
        let m = self.records.iter().map(|r| r.meta).max().unwrap_or(0);
        self.records.iter().filter(|r| r.meta == m).collect()
    }

    pub fn training_elapsed(&self) -> Duration {
        self.meta_elapsed.iter().sum()
    }
}

struct SubJob<'a> {
    dataset: &'a Dataset,
    config: &'a DistributedConfig,
    model: CorruptionModel,
    stream: Stream,
    monitor_stream: Stream,
    meta: usize,
    subset: Vec<usize>,
}

fn run_subda(job: SubJob<'_>, lease: &Lease) -> Result<(WeightMatrix, SubDARecord)> {
    let start = Instant::now();
    let shape = lease.block.shape();
    let data = job.dataset.restrict_columns(&lease.columns)?;
    let monitor = match job.config.monitor {
        Some(m) => Some(Monitor {
            oracle: ObjectiveOracle::new(
                &data,
                shape,
                job.model,
                OracleMode::MonteCarlo { draws: m.draws },
                &mut job.monitor_stream.clone(),
            )?,
            window: m.window.min(job.config.steps_per_subda),
        }),
        None => None,
    };
    let cfg = RsgConfig {
        model: job.model,
        schedule: job.config.schedule.clone(),
        iterations: job.config.steps_per_subda,
        stopping: StoppingRule::Last,
        init_seed: job.config.init_seed,
    };
    let mut stream = job.stream;
    let run = rsg_run_from(
        lease.block.clone(),
        &data,
        &cfg,
        monitor.as_ref(),
        &mut stream,
    )?;
    let record = SubDARecord {
        meta: job.meta,
        index: lease.worker,
        subset: job.subset,
        oracle_history: run.oracle_values().collect(),
        grad_norm_history: run.grad_norm_history,
        elapsed: start.elapsed(),
    };
    Ok((run.w_last, record))
}

/// Train the network with `plan`'s sub-DAs for all of its meta-iterations.
///
/// Sub-DA `b` of meta-iteration `m` draws from `rng.derive(m).derive(b)` and
/// starts from the store's current values of its columns. Disjoint plans give
/// bit-identical results in sequential and parallel execution.
pub fn run_distributed(
    plan: &SubDAPlan,
    dataset: &Dataset,
    hidden: usize,
    config: &DistributedConfig,
    rng: &mut Stream,
) -> Result<DistributedRun> {
    if dataset.data_dims() != plan.data_units || dataset.bias() != plan.bias {
        return Err(Error::Dimension(format!(
            "plan covers {} data units, dataset has {}",
            plan.data_units,
            dataset.data_dims()
        )));
    }
    if let Execution::Parallel { workers } = config.execution {
        if workers == 0 {
            return Err(Error::Domain(
                "parallel execution needs at least one worker".into(),
            ));
        }
        if !plan.is_disjoint() {
            return Err(Error::Plan(
                "parallel execution requires disjoint sub-DAs".into(),
            ));
        }
    }
    let shape = dataset.shape(hidden)?;
    let base = rng.clone();
    let model = CorruptionModel::new(plan.q)?;

    let warm = Instant::now();
    let mut w = WeightMatrix::init_uniform(shape, &mut Stream::new(config.init_seed));
    if config.warm_start > 0 {
        let cfg = RsgConfig {
            model: CorruptionModel::new(plan.zeta)?,
            schedule: config.warm_schedule.clone(),
            iterations: config.warm_start,
            stopping: StoppingRule::Last,
            init_seed: config.init_seed,
        };
        w = rsg_run_from(w, dataset, &cfg, None, &mut base.derive_named("warm-start"))?.w_last;
    }
    let warm_elapsed = warm.elapsed();

    let mut store = ParameterStore::new(w);
    let mut records = Vec::new();
    let mut meta_elapsed = Vec::with_capacity(plan.meta_iterations());
    for m in 0..plan.meta_iterations() {
        let start = Instant::now();
        let round = plan.round(m);
        let job = |b: usize| SubJob {
            dataset,
            config,
            model,
            stream: base.derive(m as u64).derive(b as u64),
            monitor_stream: base
                .derive_named("monitor")
                .derive(m as u64)
                .derive(b as u64),
            meta: m,
            subset: round[b].clone(),
        };
        match config.execution {
            Execution::Sequential => {
                for (b, subset) in round.iter().enumerate() {
                    let lease =
                        store.lease(b, plan.columns(subset), plan.sub_shape(subset, hidden)?)?;
                    let (block, record) = run_subda(job(b), &lease)?;
                    store.commit(lease, &block);
                    records.push(record);
                }
            }
            Execution::Parallel { workers } => {
                let leases = round
                    .iter()
                    .enumerate()
                    .map(|(b, s)| store.lease(b, plan.columns(s), plan.sub_shape(s, hidden)?))
                    .collect::<Result<Vec<_>>>()?;
                let results: Vec<Mutex<Option<Result<(WeightMatrix, SubDARecord)>>>> =
                    (0..leases.len()).map(|_| Mutex::new(None)).collect();
                let next = AtomicUsize::new(0);
                std::thread::scope(|scope| {
                    for _ in 0..workers.min(leases.len()) {
                        scope.spawn(|| loop {
                            let b = next.fetch_add(1, Ordering::Relaxed);
                            if b >= leases.len() {
                                break;
                            }
                            let out = run_subda(job(b), &leases[b]);
                            *results[b].lock().expect("result slot poisoned") = Some(out);
                        });
                    }
                });
                for (lease, slot) in leases.into_iter().zip(results) {
                    let (block, record) = slot
                        .into_inner()
                        .expect("result slot poisoned")
                        .expect("every sub-DA ran")?;
                    store.commit(lease, &block);
                    records.push(record);
                }
            }
        }
        store.barrier();
        meta_elapsed.push(start.elapsed());
    }
    Ok(DistributedRun {
        weights: store.into_weights(),
        records,
        warm_elapsed,
        meta_elapsed,
    })
}
