use crate::da::NetworkShape;
use crate::error::{Error, Result};
use crate::rng::Stream;

use super::{LipschitzEstimate, StepSchedule};

/// Distribution of the stopping iteration `R` over `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingDistribution {
    probabilities: Vec<f64>,
    cdf: Vec<f64>,
}

impl StoppingDistribution {
    /// Any probability vector (zeros allowed) summing to 1 within 1e−12.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Domain("stopping distribution needs N >= 1".into()));
        }
        if let Some(k) = probabilities
            .iter()
            .position(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::Domain(format!(
                "probability of iteration {} is {}",
                k + 1,
                probabilities[k]
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // flat tail after the last positive entry stays at 1
        let last = probabilities.iter().rposition(|p| *p > 0.0).unwrap_or(0);
        cdf[last..].iter_mut().for_each(|c| *c = 1.0);
        Ok(Self { probabilities, cdf })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_probabilities(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("iteration {k} outside 1..={n}")));
        }
        let mut p = vec![0.0; n];
        p[k - 1] = 1.0;
        Self::from_probabilities(p)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `Pr(R = k)` for 1-based `k`.
    pub fn probability(&self, k: usize) -> f64 {
        self.probabilities[k - 1]
    }

    /// Draw `R ∈ 1..=N`.
    pub fn sample(&self, rng: &mut Stream) -> usize {
        let u = rng.uniform();
        self.cdf.partition_point(|&c| c <= u) + 1
    }
}

/// `Pr(R = k) ∝ 2γ^k − L′√(d_h d_v)(γ^k)²`.
pub fn make_stopping_distribution(
    schedule: &StepSchedule,
    n: usize,
    lip: &LipschitzEstimate,
    shape: &NetworkShape,
) -> Result<StoppingDistribution> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let a = lip.curvature(shape);
    let steps = schedule.steps(n, shape)?;
    let weights: Vec<f64> = steps.iter().map(|g| 2.0 * g - a * g * g).collect();
    if let Some(k) = weights.iter().position(|w| !(*w > 0.0)) {
        return Err(Error::ScheduleValidity {
            iteration: k + 1,
            reason: format!(
                "weight 2γ − L'√(d_h d_v)γ² = {} is not positive (γ = {})",
                weights[k], steps[k]
            ),
        });
    }
    if weights.windows(2).all(|w| w[0] == w[1]) {
        return StoppingDistribution::uniform(n);
    }
    let total: f64 = weights.iter().sum();
    StoppingDistribution::from_probabilities(weights.into_iter().map(|w| w / total).collect())
}
