use crate::da::NetworkShape;
use crate::error::{Error, Result};

use super::LipschitzEstimate;

/// Step sizes `γ^k`, `k = 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `γ = D / (√N (d_h d_v)^{3/4})` for a run of `iterations` steps.
    ConstantOptimal {
        d: f64,
        iterations: usize,
    },
    /// `γ^k = γ₁ / k^p`.
    Polynomial {
        gamma1: f64,
        exponent: f64,
    },
    /// Steps given one by one; `k` beyond the end is an error.
    Explicit(Vec<f64>),
}

impl StepSchedule {
    /// `γ^k` for 1-based `k`.
    pub fn step(&self, k: usize, shape: &NetworkShape) -> f64 {
        match self {
            StepSchedule::Constant(g) => *g,
            StepSchedule::ConstantOptimal { d, iterations } => {
                optimal_step_unchecked(*d, *iterations, shape.params() as f64)
            }
            StepSchedule::Polynomial { gamma1, exponent } => gamma1 / (k as f64).powf(*exponent),
            StepSchedule::Explicit(v) => v.get(k - 1).copied().unwrap_or(f64::NAN),
        }
    }

    /// `γ^1..γ^n`, checking that each is finite and positive.
    pub fn steps(&self, n: usize, shape: &NetworkShape) -> Result<Vec<f64>> {
        if let StepSchedule::Explicit(v) = self {
            if v.len() < n {
                return Err(Error::ScheduleValidity {
                    iteration: v.len() + 1,
                    reason: format!("explicit schedule has only {} steps", v.len()),
                });
            }
        }
        (1..=n)
            .map(|k| {
                let g = self.step(k, shape);
                if g.is_finite() && g > 0.0 {
                    Ok(g)
                } else {
                    Err(Error::ScheduleValidity {
                        iteration: k,
                        reason: format!("step {g} is not a positive finite number"),
                    })
                }
            })
            .collect()
    }

    /// True when every step has the same value.
    pub fn is_constant(&self) -> bool {
        match self {
            StepSchedule::Constant(_) | StepSchedule::ConstantOptimal { .. } => true,
            StepSchedule::Polynomial { exponent, .. } => *exponent == 0.0,
            StepSchedule::Explicit(v) => v.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

fn optimal_step_unchecked(d: f64, n: usize, params: f64) -> f64 {
    d / ((n as f64).sqrt() * params.powf(0.75))
}

/// The balanced constant step `γ = D / (√N (d_h d_v)^{3/4})`.
///
/// When `lip` is supplied, `D` must satisfy `D ≤ √N (d_h d_v)^{1/4} / L′`.
pub fn optimal_constant_step(
    d: f64,
    n: usize,
    shape: &NetworkShape,
    lip: Option<&LipschitzEstimate>,
) -> Result<f64> {
    optimal_step_for_params(d, n, shape.params() as f64, lip)
}

pub(crate) fn optimal_step_for_params(
    d: f64,
    n: usize,
    params: f64,
    lip: Option<&LipschitzEstimate>,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("D = {d} must be positive")));
    }
    if let Some(lip) = lip {
        let max = (n as f64).sqrt() * params.powf(0.25) / lip.gradient;
        if d > max {
            return Err(Error::Domain(format!(
                "D = {d} exceeds sqrt(N) (d_h d_v)^(1/4) / L' = {max}"
            )));
        }
    }
    Ok(optimal_step_unchecked(d, n, params))
}

/// Outcome of [`validate_schedule`]. `None` means the property cannot be
/// decided from a finite list of steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleReport {
    pub nonincreasing: bool,
    /// `γ¹ < 1 / (L′ √(d_h d_v))`
    pub below_monotonicity_threshold: bool,
    /// `2γ^k − L′√(d_h d_v)(γ^k)² > 0` for all `k ≤ N`
    pub weights_positive: bool,
    /// `Σ γ^k → ∞`
    pub divergent_step_sum: Option<bool>,
    /// `Σ (γ^k)² < ∞`
    pub convergent_square_sum: Option<bool>,
}

impl ScheduleReport {
    /// The two limiting conditions together.
    pub fn vanishing(&self) -> bool {
        self.divergent_step_sum == Some(true) && self.convergent_square_sum == Some(true)
    }

    pub fn all_pass(&self) -> bool {
        self.nonincreasing
            && self.below_monotonicity_threshold
            && self.weights_positive
            && self.vanishing()
    }
}

/// Diagnose a schedule against the conditions for a decreasing, vanishing
/// expected-gradient bound.
pub fn validate_schedule(
    schedule: &StepSchedule,
    n: usize,
    lip: &LipschitzEstimate,
    shape: &NetworkShape,
) -> ScheduleReport {
    let a = lip.curvature(shape);
    let steps: Vec<f64> = (1..=n.max(1)).map(|k| schedule.step(k, shape)).collect();
    let nonincreasing = match schedule {
        StepSchedule::Polynomial { exponent, .. } => *exponent >= 0.0,
        _ => steps.windows(2).all(|w| w[1] <= w[0]),
    };
    let below_monotonicity_threshold = steps[0] < 1.0 / a;
    let weights_positive = steps
        .iter()
        .all(|&g| g.is_finite() && 2.0 * g - a * g * g > 0.0);
    let (divergent_step_sum, convergent_square_sum) = match schedule {
        StepSchedule::Constant(_) | StepSchedule::ConstantOptimal { .. } => {
            (Some(true), Some(false))
        }
        StepSchedule::Polynomial { exponent, .. } => {
            (Some(*exponent <= 1.0), Some(*exponent > 0.5))
        }
        StepSchedule::Explicit(_) => (None, None),
    };
    ScheduleReport {
        nonincreasing,
        below_monotonicity_threshold,
        weights_positive,
        divergent_step_sum,
        convergent_square_sum,
    }
}
