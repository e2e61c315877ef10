//! Sweeps behind the expected-gradient, speedup and generalization studies.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use rsgda_core::da::{loss, CorruptionModel, SamplePair, WeightMatrix};
use rsgda_core::dataset::Dataset;
use rsgda_core::dda::{
    measure_speedup, plan_subdas, run_distributed, DistributedConfig, Execution, Feasibility,
    TrailingMonitor,
};
use rsgda_core::objective::ObjectiveOracle;
use rsgda_core::rng::Stream;
use rsgda_core::rsg::{
    estimate_lipschitz, make_stopping_distribution, rsg_run, LipschitzConfig, Monitor, RsgConfig,
    StoppingRule,
};

use crate::data::{gen_synthetic, load_idx};
use crate::error::{HarnessError, Result};
use crate::settings::Settings;

/// Mean of the last `min(window, len)` entries.
pub fn trailing_average(history: &[f64], window: usize) -> Result<f64> {
    if history.is_empty() {
        return Err(HarnessError::Sweep(
            "trailing average of an empty history".into(),
        ));
    }
    if window == 0 {
        return Err(HarnessError::Config("window must be at least 1".into()));
    }
    let tail = &history[history.len().saturating_sub(window)..];
    Ok(tail.iter().sum::<f64>() / tail.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    GradVsN,
    GradVsShape,
    GradVsB,
    Speedup,
    GeneralizationParity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::GradVsN => "grad_vs_N",
            ExperimentKind::GradVsShape => "grad_vs_shape",
            ExperimentKind::GradVsB => "grad_vs_B",
            ExperimentKind::Speedup => "speedup",
            ExperimentKind::GeneralizationParity => "generalization_parity",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grad_vs_N" => ExperimentKind::GradVsN,
            "grad_vs_shape" => ExperimentKind::GradVsShape,
            "grad_vs_B" => ExperimentKind::GradVsB,
            "speedup" => ExperimentKind::Speedup,
            "generalization_parity" => ExperimentKind::GeneralizationParity,
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown experiment kind {other:?}"
                )))
            }
        })
    }
}

/// One CSV row. For `speedup` the value columns carry the wall-clock ratio and
/// for `generalization_parity` the held-out error ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub series: String,
    pub x_name: String,
    pub x_value: f64,
    pub grad_raw: f64,
    pub grad_norm: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

/// Divide each value by the largest value among records sharing its series
/// and seed.
pub fn normalize(records: &mut [ExperimentRecord]) -> Result<()> {
    let mut keys: Vec<(String, u64)> = Vec::new();
    for r in records.iter() {
        let k = (r.series.clone(), r.seed);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    for (series, seed) in keys {
        let max = records
            .iter()
            .filter(|r| r.series == series && r.seed == seed)
            .map(|r| r.grad_raw)
            .fold(f64::NEG_INFINITY, f64::max);
        if !(max > 0.0 && max.is_finite()) {
            return Err(HarnessError::Sweep(format!(
                "series {series} (seed {seed}) has no positive finite value to normalize by"
            )));
        }
        for r in records
            .iter_mut()
            .filter(|r| r.series == series && r.seed == seed)
        {
            r.grad_norm = r.grad_raw / max;
        }
    }
    Ok(())
}

/// Held-out error ratios for one sub-DA count.
#[derive(Debug, Clone, PartialEq)]
pub struct ParitySummary {
    pub b: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    pub records: Vec<ExperimentRecord>,
    pub parity: Vec<ParitySummary>,
}

/// Load the configured dataset with `dims` data coordinates.
pub fn dataset_for(settings: &Settings, dims: usize, seed: u64) -> Result<Dataset> {
    match &settings.idx {
        Some(path) => load_idx(path, settings.bias),
        None => gen_synthetic(settings.n, dims, settings.rho, seed, settings.bias),
    }
}

struct Point {
    series: String,
    x_name: &'static str,
    x_value: f64,
    seed: u64,
}

fn record(
    kind: ExperimentKind,
    p: &Point,
    value: f64,
    started: Instant,
    timing: bool,
) -> ExperimentRecord {
    ExperimentRecord {
        experiment: kind.name().into(),
        series: p.series.clone(),
        x_name: p.x_name.into(),
        x_value: p.x_value,
        grad_raw: value,
        grad_norm: f64::NAN,
        seed: p.seed,
        elapsed_ms: if timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        },
    }
}

fn at_point<T>(p: &Point, r: std::result::Result<T, impl Into<HarnessError>>) -> Result<T> {
    r.map_err(|e| {
        let e: HarnessError = e.into();
        HarnessError::Point {
            label: format!("{} {}={} seed {}", p.series, p.x_name, p.x_value, p.seed),
            source: Box::new(e),
        }
    })
}

fn check_nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(HarnessError::Config(format!(
            "{name} must list at least one value"
        )));
    }
    Ok(())
}

/// Trailing oracle gradient of one whole-network RSG run.
fn whole_network_trailing(
    settings: &Settings,
    data: &Dataset,
    hidden: usize,
    iterations: usize,
    step: Option<f64>,
    seed: u64,
) -> rsgda_core::Result<f64> {
    let shape = data.shape(hidden)?;
    let model = CorruptionModel::new(settings.zeta)?;
    let schedule = settings.schedule_for(iterations, step);
    // surfaces steps too large for the estimated curvature
    let lip = estimate_lipschitz(
        data,
        &model,
        &shape,
        &LipschitzConfig::new(20),
        &mut Stream::new(seed).derive_named("lipschitz"),
    )?;
    make_stopping_distribution(&schedule, iterations, &lip, &shape)?;
    let oracle = ObjectiveOracle::new(
        data,
        shape,
        model,
        settings.oracle_mode(),
        &mut Stream::new(seed).derive_named("oracle"),
    )?;
    let cfg = RsgConfig {
        model,
        schedule,
        iterations,
        stopping: StoppingRule::Last,
        init_seed: seed,
    };
    let monitor = Monitor {
        oracle,
        window: settings.window.min(iterations),
    };
    let run = rsg_run(
        data,
        &shape,
        &cfg,
        Some(&monitor),
        &mut Stream::new(seed).derive_named("run"),
    )?;
    let v: Vec<f64> = run.oracle_values().collect();
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

/// Distributed run with `B` disjoint sub-DAs of `τ = 1/B` sharing a total
/// budget of `settings.iterations` updates with the warm start.
pub fn distributed_run(
    settings: &Settings,
    data: &Dataset,
    b: usize,
    seed: u64,
    monitor: bool,
) -> Result<(WeightMatrix, Option<f64>)> {
    let shape = data.shape(settings.dh)?;
    let tau = if b == 1 { 1.0 } else { 1.0 / b as f64 };
    let plan = plan_subdas(
        &shape,
        settings.zeta,
        tau,
        settings.phi,
        settings.mode,
        Feasibility::Relaxed,
        settings.meta,
        &mut Stream::new(seed).derive_named("plan"),
    )?;
    let updates = settings
        .iterations
        .checked_sub(settings.warm_start)
        .ok_or_else(|| HarnessError::Config("warm_start exceeds the update budget N".into()))?;
    let steps = updates / (plan.count() * settings.meta);
    if steps == 0 {
        return Err(HarnessError::Config(format!(
            "budget N = {} leaves no steps for {} sub-DAs over {} meta-iterations",
            settings.iterations,
            plan.count(),
            settings.meta
        )));
    }
    let mut cfg = DistributedConfig::new(settings.schedule_for(steps, None), steps);
    cfg.warm_start = settings.warm_start;
    cfg.warm_schedule = settings.schedule_for(settings.warm_start.max(1), None);
    cfg.init_seed = seed;
    cfg.execution = if settings.workers > 1 {
        Execution::Parallel {
            workers: settings.workers,
        }
    } else {
        Execution::Sequential
    };
    if monitor {
        cfg.monitor = Some(TrailingMonitor {
            window: settings.window,
            draws: settings.draws,
        });
    }
    let run = run_distributed(
        &plan,
        data,
        settings.dh,
        &cfg,
        &mut Stream::new(seed).derive_named("run"),
    )?;
    let g = run.trailing_gradient();
    Ok((run.weights, g))
}

/// Mean clean reconstruction error `‖x − σ(Wᵀσ(Wx))‖²` over a dataset.
pub fn reconstruction_error(w: &WeightMatrix, data: &Dataset) -> Result<f64> {
    let mut total = 0.0;
    for row in data.rows() {
        total += loss(w, &SamplePair::clean(row))?;
    }
    Ok(total / data.len() as f64)
}

/// Split `data` into (train, test) with a seeded shuffle.
pub fn split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(HarnessError::Config(format!(
            "test_fraction = {test_fraction} outside (0, 1)"
        )));
    }
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut Stream::new(seed).derive_named("split"));
    let n_test = ((data.len() as f64 * test_fraction).ceil() as usize).clamp(1, data.len() - 1);
    let test = data.select_rows(&idx[..n_test])?;
    let train = data.select_rows(&idx[n_test..])?;
    Ok((train, test))
}

pub fn run_experiment(kind: ExperimentKind, settings: &Settings) -> Result<ExperimentOutput> {
    let seeds = settings.seed_list();
    let timing = settings.timing;
    let mut parity = Vec::new();
    let mut records = match kind {
        ExperimentKind::GradVsN => {
            check_nonempty("N_values", &settings.n_values)?;
            let (name, values) = settings.step_series();
            let data: Vec<Dataset> = seeds
                .iter()
                .map(|&s| dataset_for(settings, settings.dv, s))
                .collect::<Result<_>>()?;
            let mut points = Vec::new();
            for (si, &seed) in seeds.iter().enumerate() {
                for &v in &values {
                    for &n in &settings.n_values {
                        points.push((
                            si,
                            v,
                            Point {
                                series: format!("{name}={v}"),
                                x_name: "N",
                                x_value: n as f64,
                                seed,
                            },
                        ));
                    }
                }
            }
            points
                .par_iter()
                .map(|(si, v, p)| {
                    let t = Instant::now();
                    let n = p.x_value as usize;
                    let g = at_point(
                        p,
                        whole_network_trailing(
                            settings,
                            &data[*si],
                            settings.dh,
                            n,
                            Some(*v),
                            p.seed,
                        ),
                    )?;
                    Ok(record(kind, p, g, t, timing))
                })
                .collect::<Result<Vec<_>>>()?
        }
        ExperimentKind::GradVsShape => {
            check_nonempty("dv_values", &settings.dv_values)?;
            check_nonempty("dh_values", &settings.dh_values)?;
            let mut points = Vec::new();
            for &seed in &seeds {
                for &dh in &settings.dh_values {
                    for &dv in &settings.dv_values {
                        points.push((
                            dh,
                            Point {
                                series: format!("dh={dh}"),
                                x_name: "dv",
                                x_value: dv as f64,
                                seed,
                            },
                        ));
                    }
                }
            }
            points
                .par_iter()
                .map(|(dh, p)| {
                    let t = Instant::now();
                    let data = at_point(p, dataset_for(settings, p.x_value as usize, p.seed))?;
                    let g = at_point(
                        p,
                        whole_network_trailing(
                            settings,
                            &data,
                            *dh,
                            settings.iterations,
                            None,
                            p.seed,
                        ),
                    )?;
                    Ok(record(kind, p, g, t, timing))
                })
                .collect::<Result<Vec<_>>>()?
        }
        ExperimentKind::GradVsB => {
            check_nonempty("B_values", &settings.b_values)?;
            let mut points = Vec::new();
            for &seed in &seeds {
                for &b in &settings.b_values {
                    points.push(Point {
                        series: format!("zeta={}", settings.zeta),
                        x_name: "B",
                        x_value: b as f64,
                        seed,
                    });
                }
            }
            points
                .par_iter()
                .map(|p| {
                    let t = Instant::now();
                    let data = at_point(p, dataset_for(settings, settings.dv, p.seed))?;
                    let (_, g) = at_point(
                        p,
                        distributed_run(settings, &data, p.x_value as usize, p.seed, true),
                    )?;
                    Ok(record(
                        kind,
                        p,
                        g.expect("monitor was requested"),
                        t,
                        timing,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        ExperimentKind::Speedup => {
            check_nonempty("B_values", &settings.b_values)?;
            let mut out = Vec::new();
            for &seed in &seeds {
                let data = dataset_for(settings, settings.dv, seed)?;
                let table = measure_speedup(
                    &data,
                    settings.dh,
                    settings.zeta,
                    &settings.b_values,
                    settings.iterations,
                    &settings.schedule_for(settings.iterations, None),
                    settings.repeats,
                    &mut Stream::new(seed),
                )?;
                for pt in table {
                    out.push(ExperimentRecord {
                        experiment: kind.name().into(),
                        series: "speedup".into(),
                        x_name: "B".into(),
                        x_value: pt.b as f64,
                        grad_raw: pt.ratio,
                        grad_norm: f64::NAN,
                        seed,
                        elapsed_ms: if timing {
                            pt.elapsed.as_millis() as u64
                        } else {
                            0
                        },
                    });
                }
            }
            out
        }
        ExperimentKind::GeneralizationParity => {
            check_nonempty("B_values", &settings.b_values)?;
            if settings.splits == 0 {
                return Err(HarnessError::Config("splits must be at least 1".into()));
            }
            let base = dataset_for(settings, settings.dv, settings.seed)?;
            let splits: Vec<u64> = (0..settings.splits as u64)
                .map(|k| settings.seed + k)
                .collect();
            let per_split = splits
                .par_iter()
                .map(|&s| {
                    let t = Instant::now();
                    let (train, test) = split(&base, settings.test_fraction, s)?;
                    let shape = train.shape(settings.dh)?;
                    let cfg = RsgConfig {
                        model: CorruptionModel::new(settings.zeta)?,
                        schedule: settings.schedule_for(settings.iterations, None),
                        iterations: settings.iterations,
                        stopping: StoppingRule::Last,
                        init_seed: s,
                    };
                    let single = rsg_run(
                        &train,
                        &shape,
                        &cfg,
                        None,
                        &mut Stream::new(s).derive_named("run"),
                    )?;
                    let reference = reconstruction_error(&single.w_last, &test)?;
                    let mut rows = Vec::new();
                    for &b in &settings.b_values {
                        let (w, _) = distributed_run(settings, &train, b, s, false)?;
                        let ratio = reconstruction_error(&w, &test)? / reference;
                        let p = Point {
                            series: "error_ratio".into(),
                            x_name: "B",
                            x_value: b as f64,
                            seed: s,
                        };
                        rows.push(record(kind, &p, ratio, t, timing));
                    }
                    Ok(rows)
                })
                .collect::<Result<Vec<_>>>()?;
            for &b in &settings.b_values {
                let ratios: Vec<f64> = per_split
                    .iter()
                    .flatten()
                    .filter(|r| r.x_value == b as f64)
                    .map(|r| r.grad_raw)
                    .collect();
                let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
                let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
                    / (ratios.len().max(2) - 1) as f64;
                parity.push(ParitySummary {
                    b,
                    mean_ratio: mean,
                    std_ratio: var.sqrt(),
                    ratios,
                });
            }
            per_split.into_iter().flatten().collect()
        }
    };
    normalize(&mut records)?;
    Ok(ExperimentOutput {
        kind,
        records,
        parity,
    })
}

/// Write records in the fixed column order.
pub fn write_records<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "experiment",
        "series",
        "x_name",
        "x_value",
        "grad_raw",
        "grad_norm",
        "seed",
        "elapsed_ms",
    ])?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.series.clone(),
            r.x_name.clone(),
            r.x_value.to_string(),
            r.grad_raw.to_string(),
            r.grad_norm.to_string(),
            r.seed.to_string(),
            r.elapsed_ms.to_string(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("csv", e))?;
    Ok(())
}

/// Write `<dir>/<kind>.csv`, the parity summary when present, and
/// `<dir>/manifest.txt`.
pub fn write_outputs(output: &ExperimentOutput, settings: &Settings, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.display().to_string(), e))?;
    let create = |name: String| {
        let path = dir.join(name);
        std::fs::File::create(&path).map_err(|e| HarnessError::io(path.display().to_string(), e))
    };
    write_records(&output.records, create(format!("{}.csv", output.kind))?)?;
    if !output.parity.is_empty() {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(create(format!("{}_summary.csv", output.kind))?);
        w.write_record(["B", "mean_ratio", "std_ratio", "splits"])?;
        for p in &output.parity {
            w.write_record([
                p.b.to_string(),
                p.mean_ratio.to_string(),
                p.std_ratio.to_string(),
                p.ratios.len().to_string(),
            ])?;
        }
        w.flush().map_err(|e| HarnessError::io("csv", e))?;
    }
    let mut manifest = create("manifest.txt".into())?;
    let text = format!("# experiment={}\n{}", output.kind, settings.manifest());
    manifest
        .write_all(text.as_bytes())
        .map_err(|e| HarnessError::io("manifest.txt", e))
}
