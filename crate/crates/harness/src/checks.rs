//! Self-checks run by `rsgda check`: the analytic gradient against finite
//! differences, sampled corruption against enumeration, and the stopping
//! sampler against its own probabilities.

use rsgda_core::da::{
    corrupt, expected_loss_bruteforce, grad, loss, CorruptionModel, NetworkShape, SamplePair,
    WeightMatrix,
};
use rsgda_core::rng::Stream;
use rsgda_core::rsg::{make_stopping_distribution, LipschitzEstimate, StepSchedule};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_input(shape: &NetworkShape, rng: &mut Stream) -> Vec<f64> {
    let mut x: Vec<f64> = (0..shape.visible).map(|_| rng.uniform()).collect();
    if let Some(b) = shape.bias_index() {
        x[b] = 1.0;
    }
    x
}

/// Worst `‖analytic − numeric‖∞ / ‖numeric‖∞` over `instances` random points.
pub fn gradient_check(
    shape: NetworkShape,
    zeta: f64,
    instances: usize,
    seed: u64,
) -> Result<CheckReport> {
    let model = CorruptionModel::new(zeta)?;
    let mut rng = Stream::new(seed);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let w = WeightMatrix::random(shape, 1.0, &mut rng);
        let x = random_input(&shape, &mut rng);
        let pair = corrupt(&x, &shape, &model, &mut rng)?;
        let analytic = grad(&w, &pair)?;
        let mut num_max = 0.0f64;
        let mut diff_max = 0.0f64;
        for i in 0..shape.hidden {
            for j in 0..shape.visible {
                let mut up = w.clone();
                up.set(i, j, w.get(i, j) + h);
                let mut down = w.clone();
                down.set(i, j, w.get(i, j) - h);
                let num = (loss(&up, &pair)? - loss(&down, &pair)?) / (2.0 * h);
                num_max = num_max.max(num.abs());
                diff_max = diff_max.max((num - analytic.get(i, j)).abs());
            }
        }
        if num_max > 1e-9 {
            worst = worst.max(diff_max / num_max);
        }
    }
    Ok(CheckReport {
        name: "gradient",
        passed: worst <= 1e-4,
        detail: format!("max relative error {worst:.3e} over {instances} instances"),
    })
}

/// Sampled mean loss against the enumerated expectation.
pub fn expectation_check(
    shape: NetworkShape,
    zeta: f64,
    draws: usize,
    seed: u64,
) -> Result<CheckReport> {
    let model = CorruptionModel::new(zeta)?;
    let mut rng = Stream::new(seed);
    let w = WeightMatrix::random(shape, 1.0, &mut rng);
    let x = random_input(&shape, &mut rng);
    let exact = expected_loss_bruteforce(&w, &x, &model)?;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..draws {
        let l = loss(&w, &corrupt(&x, &shape, &model, &mut rng)?)?;
        sum += l;
        sq += l * l;
    }
    let n = draws as f64;
    let mean = sum / n;
    let se = ((sq / n - mean * mean).max(0.0) / n).sqrt();
    let z = (mean - exact).abs() / se.max(f64::MIN_POSITIVE);
    let clean = loss(&w, &SamplePair::clean(&x))?;
    Ok(CheckReport {
        name: "expectation",
        passed: z <= 4.0,
        detail: format!("sampled {mean:.6} vs enumerated {exact:.6} ({z:.2} SE), clean {clean:.6}"),
    })
}

/// Empirical frequencies of the stopping sampler against its probabilities.
pub fn stopping_check(shape: NetworkShape, samples: usize, seed: u64) -> Result<CheckReport> {
    let n = 20;
    let lip = LipschitzEstimate::new(1.0, 1.0)?;
    let schedule = StepSchedule::Polynomial {
        gamma1: 0.5 / lip.curvature(&shape),
        exponent: 0.75,
    };
    let dist = make_stopping_distribution(&schedule, n, &lip, &shape)?;
    let mut counts = vec![0usize; n];
    let mut rng = Stream::new(seed);
    for _ in 0..samples {
        counts[dist.sample(&mut rng) - 1] += 1;
    }
    let mut worst = 0.0f64;
    for (k, &c) in counts.iter().enumerate() {
        let p = dist.probability(k + 1);
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        worst = worst.max((c as f64 / samples as f64 - p).abs() / sigma);
    }
    Ok(CheckReport {
        name: "stopping",
        passed: worst <= 4.5,
        detail: format!("largest deviation {worst:.2} sigma over {n} outcomes"),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CheckReport>> {
    let shape = NetworkShape::for_data(6, 3, true)?;
    Ok(vec![
        gradient_check(shape, 0.3, 50, seed)?,
        expectation_check(shape, 0.3, 100_000, seed)?,
        stopping_check(shape, 200_000, seed)?,
    ])
}
