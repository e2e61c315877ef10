//! Closed-form convergence bounds and sample-size estimates.

use crate::da::NetworkShape;
use crate::error::{Error, Result};

use super::{LipschitzEstimate, StepSchedule};

fn check_df(d_f: f64) -> Result<()> {
    if !(d_f.is_finite() && d_f >= 0.0) {
        return Err(Error::Domain(format!("D_f = {d_f} must be nonnegative")));
    }
    Ok(())
}

/// Bound on `E‖∇f(W^R)‖²` after `N` steps with `R` drawn from the matching
/// stopping distribution:
///
/// `[D_f + (d_h d_v)^{3/2} L² L′ Σγ²] / Σ(2γ − L′√(d_h d_v)γ²)`.
pub fn expected_gradient_bound(
    schedule: &StepSchedule,
    n: usize,
    lip: &LipschitzEstimate,
    d_f: f64,
    shape: &NetworkShape,
) -> Result<f64> {
    check_df(d_f)?;
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let a = lip.curvature(shape);
    let (sq, den) = if schedule.is_constant() {
        let g = schedule.steps(1, shape)?[0];
        let nf = n as f64;
        (nf * g * g, nf * (2.0 * g - a * g * g))
    } else {
        schedule
            .steps(n, shape)?
            .iter()
            .fold((0.0, 0.0), |(sq, den), g| {
                (sq + g * g, den + 2.0 * g - a * g * g)
            })
    };
    finish_bound(d_f, sq, den, lip, shape, n)
}

fn finish_bound(
    d_f: f64,
    sq: f64,
    den: f64,
    lip: &LipschitzEstimate,
    shape: &NetworkShape,
    n: usize,
) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::ScheduleValidity {
            iteration: n,
            reason: format!("bound denominator Σ(2γ − L'√(d_h d_v)γ²) = {den} is not positive"),
        });
    }
    let p = shape.params() as f64;
    Ok((d_f + p.powf(1.5) * lip.loss * lip.loss * lip.gradient * sq) / den)
}

/// [`expected_gradient_bound`] for every `N` in `1..=n_max`, via prefix sums.
pub fn expected_gradient_bound_curve(
    schedule: &StepSchedule,
    n_max: usize,
    lip: &LipschitzEstimate,
    d_f: f64,
    shape: &NetworkShape,
) -> Result<Vec<f64>> {
    if let StepSchedule::ConstantOptimal { d, .. } = schedule {
        // the step itself depends on N
        return (1..=n_max)
            .map(|n| {
                let s = StepSchedule::ConstantOptimal {
                    d: *d,
                    iterations: n,
                };
                expected_gradient_bound(&s, n, lip, d_f, shape)
            })
            .collect();
    }
    check_df(d_f)?;
    let a = lip.curvature(shape);
    let steps = schedule.steps(n_max, shape)?;
    let (mut sq, mut den) = (0.0, 0.0);
    steps
        .iter()
        .enumerate()
        .map(|(k, g)| {
            sq += g * g;
            den += 2.0 * g - a * g * g;
            finish_bound(d_f, sq, den, lip, shape, k + 1)
        })
        .collect()
}

/// `D̄ = D_f / D + D L² L′`.
pub fn d_bar(d: f64, d_f: f64, lip: &LipschitzEstimate) -> f64 {
    d_f / d + d * lip.loss * lip.loss * lip.gradient
}

/// The `D` that minimizes `D̄`, namely `√(D_f / (L² L′))`.
pub fn ideal_d(d_f: f64, lip: &LipschitzEstimate) -> f64 {
    (d_f / (lip.loss * lip.loss * lip.gradient)).sqrt()
}

/// Rate bound for the balanced constant step:
/// `E‖∇f(W^R)‖² ≤ D̄ (d_h d_v)^{3/4} / √N`.
pub fn convergence_bound(
    d: f64,
    d_f: f64,
    lip: &LipschitzEstimate,
    n: usize,
    shape: &NetworkShape,
) -> Result<f64> {
    check_df(d_f)?;
    let p = shape.params() as f64;
    super::schedule::optimal_step_for_params(d, n, p, Some(lip))?;
    Ok(d_bar(d, d_f, lip) * p.powf(0.75) / (n as f64).sqrt())
}

/// `⌈log(1/δ) / log(√r)⌉`, the number of independent runs needed for an
/// `(ε, δ)`-solution.
pub fn fold_count(r: f64, delta: f64) -> Result<usize> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "tradeoff constant r = {r} must exceed 1"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, 1)")));
    }
    Ok(((1.0 / delta).ln() / r.sqrt().ln()).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeReport {
    pub r: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Average number of times each instance is used.
    pub t: f64,
    /// Independent runs.
    pub folds: usize,
    /// Data instances.
    pub instances: u64,
    /// Oracle calls per run.
    pub oracle_calls: u64,
}

pub(crate) fn check_sample_args(epsilon: f64, t: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be at least 1")));
    }
    Ok(())
}

/// Folds, instances and oracle calls needed for an `(ε, δ)`-solution.
pub fn sample_size(
    r: f64,
    delta: f64,
    epsilon: f64,
    t: f64,
    shape: &NetworkShape,
) -> Result<SampleSizeReport> {
    let folds = fold_count(r, delta)?;
    check_sample_args(epsilon, t)?;
    let calls = r * (shape.params() as f64).powf(1.5) / (epsilon * epsilon);
    Ok(SampleSizeReport {
        r,
        delta,
        epsilon,
        t,
        folds,
        instances: (calls / t).ceil() as u64,
        oracle_calls: calls.ceil() as u64,
    })
}
