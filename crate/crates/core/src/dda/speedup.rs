use std::time::Duration;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::rsg::StepSchedule;

use super::{plan_subdas, run_distributed, DistributedConfig, Execution, Feasibility, PlanMode};

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupPoint {
    /// Requested sub-DA count.
    pub b: usize,
    /// Sub-DAs actually planned, equal to `b` unless the units do not divide.
    pub subdas: usize,
    pub workers: usize,
    /// Fastest of the repeated measurements.
    pub elapsed: Duration,
    /// Baseline wall clock over this point's wall clock; exactly 1 at `b = 1`.
    pub ratio: f64,
}

/// Time one meta-iteration of disjoint sub-DAs with `τ = 1/B` on `B` workers
/// for each `B`, every sub-DA taking `steps` RSG steps, against the whole
/// network taking the same number of steps.
#[allow(clippy::too_many_arguments)]
pub fn measure_speedup(
    dataset: &Dataset,
    hidden: usize,
    zeta: f64,
    bs: &[usize],
    steps: usize,
    schedule: &StepSchedule,
    repeats: usize,
    rng: &mut Stream,
) -> Result<Vec<SpeedupPoint>> {
    if bs.contains(&0) || repeats == 0 {
        return Err(Error::Domain("B and repeats must be at least 1".into()));
    }
    let shape = dataset.shape(hidden)?;
    let base = rng.clone();
    let time = |b: usize| -> Result<(usize, Duration)> {
        let tau = 1.0 / b as f64;
        let mut plan_rng = base.derive_named("plan").derive(b as u64);
        let plan = plan_subdas(
            &shape,
            zeta,
            tau,
            0.5,
            PlanMode::Disjoint,
            Feasibility::Relaxed,
            1,
            &mut plan_rng,
        )?;
        let mut cfg = DistributedConfig::new(schedule.clone(), steps);
        cfg.warm_start = 0;
        cfg.execution = Execution::Parallel {
            workers: plan.count(),
        };
        let mut best = Duration::MAX;
        for rep in 0..repeats {
            let mut s = base.derive(b as u64).derive(rep as u64);
            let run = run_distributed(&plan, dataset, hidden, &cfg, &mut s)?;
            best = best.min(run.training_elapsed());
        }
        Ok((plan.count(), best))
    };
    let (_, baseline) = time(1)?;
    bs.iter()
        .map(|&b| {
            let (subdas, elapsed) = if b == 1 { (1, baseline) } else { time(b)? };
            let ratio = if b == 1 {
                1.0
            } else {
                baseline.as_secs_f64() / elapsed.as_secs_f64().max(f64::MIN_POSITIVE)
            };
            Ok(SpeedupPoint {
                b,
                subdas,
                workers: subdas,
                elapsed,
                ratio,
            })
        })
        .collect()
}
