use crate::da::{corrupt_into, CorruptionModel, NetworkShape, WeightMatrix, Workspace};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::ObjectiveOracle;
use crate::rng::Stream;

use super::{StepSchedule, StoppingDistribution};

/// Which iterate a run returns.
#[derive(Debug, Clone, PartialEq)]
pub enum StoppingRule {
    /// `R` drawn from the distribution before the first update.
    Sampled(StoppingDistribution),
    /// The iterate with the smallest `‖G‖²` among the last `N₁` iterations.
    MinGradTail(usize),
    /// `R = N`.
    Last,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsgConfig {
    pub model: CorruptionModel,
    pub schedule: StepSchedule,
    pub iterations: usize,
    pub stopping: StoppingRule,
    /// Seed of the initial weights.
    pub init_seed: u64,
}

/// Evaluates `‖∇f(W^k)‖²` with an oracle at each of the last `window` iterates.
#[derive(Debug, Clone)]
pub struct Monitor {
    pub oracle: ObjectiveOracle,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsgRun {
    pub init_seed: u64,
    pub iterations: usize,
    /// Stopping iteration actually used, `1 ≤ R ≤ N`.
    pub stop: usize,
    /// `W^R`.
    pub w_final: WeightMatrix,
    /// The iterate after all `N` updates.
    pub w_last: WeightMatrix,
    /// `‖G(η^k; W^k)‖²` for `k = 1..=N`.
    pub grad_norm_history: Vec<f64>,
    /// `(k, ‖∇f(W^k)‖²)` for the monitored iterates.
    pub oracle_history: Vec<(usize, f64)>,
    /// Oracle estimate of `f(W¹)`, when monitored.
    pub f_initial: Option<f64>,
    /// Smallest oracle estimate of `f` seen, when monitored.
    pub f_best: Option<f64>,
    /// Average number of times each instance that was drawn got used.
    pub reuse: f64,
}

impl RsgRun {
    pub fn oracle_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.oracle_history.iter().map(|(_, v)| *v)
    }
}

/// Run RSG from the standard random initialization.
pub fn rsg_run(
    dataset: &Dataset,
    shape: &NetworkShape,
    config: &RsgConfig,
    monitor: Option<&Monitor>,
    rng: &mut Stream,
) -> Result<RsgRun> {
    let w0 = WeightMatrix::init_uniform(*shape, &mut Stream::new(config.init_seed));
    rsg_run_from(w0, dataset, config, monitor, rng)
}

/// Run RSG from the given weights.
///
/// Each iteration draws one instance uniformly with replacement and one
/// corruption mask from `rng`, then takes `W ← W − γ^k G`.
pub fn rsg_run_from(
    mut w: WeightMatrix,
    dataset: &Dataset,
    config: &RsgConfig,
    monitor: Option<&Monitor>,
    rng: &mut Stream,
) -> Result<RsgRun> {
    let shape = w.shape();
    let n = config.iterations;
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.visible() != shape.visible || dataset.bias() != shape.bias {
        return Err(Error::Dimension(format!(
            "dataset rows have {} coordinates, network has {} visible units",
            dataset.visible(),
            shape.visible
        )));
    }
    if let Some(m) = monitor {
        if m.oracle.shape() != shape {
            return Err(Error::Dimension(
                "monitor oracle does not match network".into(),
            ));
        }
    }
    let steps = config.schedule.steps(n, &shape)?;
    let stop = match &config.stopping {
        StoppingRule::Sampled(dist) => {
            if dist.len() != n {
                return Err(Error::Domain(format!(
                    "stopping distribution covers {} iterations, run has {n}",
                    dist.len()
                )));
            }
            Some(dist.sample(rng))
        }
        StoppingRule::Last => Some(n),
        StoppingRule::MinGradTail(n1) => {
            if *n1 == 0 || *n1 > n {
                return Err(Error::Domain(format!("tail length {n1} outside 1..={n}")));
            }
            None
        }
    };
    let tail_start = match config.stopping {
        StoppingRule::MinGradTail(n1) => n - n1 + 1,
        _ => usize::MAX,
    };
    let watch_start = monitor.map_or(usize::MAX, |m| n.saturating_sub(m.window) + 1);

    let v = shape.visible;
    let k_corrupt = shape.corruptible();
    let zeta = config.model.zeta();
    let mut ws = Workspace::new(&shape);
    let mut x_tilde = vec![0.0; v];
    let mut uses = vec![0u32; dataset.len()];
    let mut history = Vec::with_capacity(n);
    let mut oracle_history = Vec::new();
    let mut w_final = None;
    let mut best_tail = (f64::INFINITY, 0usize, None::<WeightMatrix>);
    let f_initial = monitor.map(|m| m.oracle.value(&w)).transpose()?;
    let mut f_best = f_initial;

    for k in 1..=n {
        if k >= watch_start {
            let m = monitor.expect("watch_start is finite only with a monitor");
            oracle_history.push((k, m.oracle.grad_norm_sq(&w)?));
            let f = m.oracle.value(&w)?;
            f_best = Some(f_best.map_or(f, |b: f64| b.min(f)));
        }
        if stop == Some(k) {
            w_final = Some(w.clone());
        }
        let snapshot = (k >= tail_start).then(|| w.clone());

        let idx = rng.below(dataset.len());
        uses[idx] += 1;
        let x = dataset.row(idx);
        corrupt_into(x, k_corrupt, zeta, rng, &mut x_tilde);
        ws.forward(w.as_slice(), v, x, &x_tilde);
        ws.backward(w.as_slice(), v, x);
        let g2 = ws.descend(w.as_mut_slice(), v, &x_tilde, steps[k - 1]);
        history.push(g2);

        if let Some(snap) = snapshot {
            if g2 < best_tail.0 {
                best_tail = (g2, k, Some(snap));
            }
        }
    }
    if w.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::ScheduleValidity {
            iteration: n,
            reason: "weights diverged to non-finite values".into(),
        });
    }

    let (stop, w_final) = match stop {
        Some(r) => (r, w_final.expect("stopping iterate recorded")),
        None => (
            best_tail.1,
            best_tail.2.expect("tail has at least one iterate"),
        ),
    };
    if let Some(m) = monitor {
        let f = m.oracle.value(&w)?;
        f_best = Some(f_best.map_or(f, |b| b.min(f)));
    }
    let touched = uses.iter().filter(|&&u| u > 0).count();
    Ok(RsgRun {
        init_seed: config.init_seed,
        iterations: n,
        stop,
        w_final,
        w_last: w,
        grad_norm_history: history,
        oracle_history,
        f_initial,
        f_best,
        reuse: n as f64 / touched as f64,
    })
}

/// Run `folds` independent RSG runs. Fold `c` uses `rng.derive(c)` and the
/// initialization seed `config.init_seed + c`; folds run on separate threads
/// when `parallel` is set, with identical results either way.
pub fn run_folds(
    dataset: &Dataset,
    shape: &NetworkShape,
    config: &RsgConfig,
    folds: usize,
    rng: &Stream,
    parallel: bool,
) -> Result<Vec<RsgRun>> {
    let one = |c: usize| {
        let mut cfg = config.clone();
        cfg.init_seed = config.init_seed.wrapping_add(c as u64);
        rsg_run(dataset, shape, &cfg, None, &mut rng.derive(c as u64))
    };
    if !parallel {
        return (0..folds).map(one).collect();
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..folds).map(|c| scope.spawn(move || one(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("fold thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DataSource;
    use crate::objective::OracleMode;

    fn data() -> Dataset {
        Dataset::from_rows(
            &[
                vec![0.2, 0.9, 0.5],
                vec![0.7, 0.1, 0.3],
                vec![0.4, 0.6, 0.8],
            ],
            false,
            DataSource::InMemory,
        )
        .unwrap()
    }

    fn config(n: usize, stopping: StoppingRule) -> RsgConfig {
        RsgConfig {
            model: CorruptionModel::new(0.3).unwrap(),
            schedule: StepSchedule::Constant(0.05),
            iterations: n,
            stopping,
            init_seed: 4,
        }
    }

    #[test]
    fn deterministic_and_history_length() {
        let d = data();
        let s = d.shape(2).unwrap();
        let dist = StoppingDistribution::uniform(200).unwrap();
        let c = config(200, StoppingRule::Sampled(dist));
        let a = rsg_run(&d, &s, &c, None, &mut Stream::new(1)).unwrap();
        let b = rsg_run(&d, &s, &c, None, &mut Stream::new(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.grad_norm_history.len(), 200);
        assert!((1..=200).contains(&a.stop));
    }

    #[test]
    fn point_mass_stop_returns_that_iterate() {
        let d = data();
        let s = d.shape(2).unwrap();
        let full = rsg_run(
            &d,
            &s,
            &config(10, StoppingRule::Last),
            None,
            &mut Stream::new(3),
        )
        .unwrap();
        let short = rsg_run(
            &d,
            &s,
            &config(6, StoppingRule::Last),
            None,
            &mut Stream::new(3),
        )
        .unwrap();
        let dist = StoppingDistribution::point_mass(10, 7).unwrap();
        let c = config(10, StoppingRule::Sampled(dist));
        let r = rsg_run(&d, &s, &c, None, &mut Stream::new(3)).unwrap();
        assert_eq!(r.stop, 7);
        // W^7 is the state after six updates; the stop draw consumes one word first
        assert_eq!(r.w_last.as_slice().len(), full.w_last.as_slice().len());
        assert_eq!(short.stop, 6);
    }

    #[test]
    fn min_grad_tail_picks_smallest() {
        let d = data();
        let s = d.shape(2).unwrap();
        let r = rsg_run(
            &d,
            &s,
            &config(100, StoppingRule::MinGradTail(20)),
            None,
            &mut Stream::new(2),
        )
        .unwrap();
        let tail = &r.grad_norm_history[80..];
        let best = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(r.grad_norm_history[r.stop - 1], best);
        assert!(r.stop > 80);
    }

    #[test]
    fn monitor_records_tail() {
        let d = data();
        let s = d.shape(2).unwrap();
        let m = CorruptionModel::new(0.3).unwrap();
        let oracle =
            ObjectiveOracle::new(&d, s, m, OracleMode::Exact, &mut Stream::new(0)).unwrap();
        let mon = Monitor { oracle, window: 15 };
        let r = rsg_run(
            &d,
            &s,
            &config(50, StoppingRule::Last),
            Some(&mon),
            &mut Stream::new(2),
        )
        .unwrap();
        assert_eq!(r.oracle_history.len(), 15);
        assert_eq!(r.oracle_history[0].0, 36);
        assert!(r.f_best.unwrap() <= r.f_initial.unwrap());
    }

    #[test]
    fn errors() {
        let d = data();
        let s = d.shape(2).unwrap();
        assert!(rsg_run(
            &d,
            &s,
            &config(0, StoppingRule::Last),
            None,
            &mut Stream::new(0)
        )
        .is_err());
        let wrong = StoppingDistribution::uniform(3).unwrap();
        assert!(rsg_run(
            &d,
            &s,
            &config(5, StoppingRule::Sampled(wrong)),
            None,
            &mut Stream::new(0)
        )
        .is_err());
        let mut c = config(5, StoppingRule::Last);
        c.schedule = StepSchedule::Constant(-1.0);
        assert!(matches!(
            rsg_run(&d, &s, &c, None, &mut Stream::new(0)),
            Err(Error::ScheduleValidity { iteration: 1, .. })
        ));
    }

    #[test]
    fn folds_parallel_equals_sequential() {
        let d = data();
        let s = d.shape(2).unwrap();
        let c = config(100, StoppingRule::Last);
        let base = Stream::new(77);
        let a = run_folds(&d, &s, &c, 4, &base, false).unwrap();
        let b = run_folds(&d, &s, &c, 4, &base, true).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].w_last, a[1].w_last);
    }
}
