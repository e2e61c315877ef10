use crate::da::{corrupt_into, CorruptionModel, NetworkShape, WeightMatrix, Workspace};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Per-coordinate Lipschitz constants of the loss (`L`) and of the gradient of
/// the expected objective (`L′`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzEstimate {
    pub loss: f64,
    pub gradient: f64,
    pub probes: usize,
}

impl LipschitzEstimate {
    /// Constants given directly rather than estimated.
    pub fn new(loss: f64, gradient: f64) -> Result<Self> {
        if !(loss > 0.0 && loss.is_finite() && gradient > 0.0 && gradient.is_finite()) {
            return Err(Error::Domain(format!(
                "Lipschitz constants must be positive, got L = {loss}, L' = {gradient}"
            )));
        }
        Ok(Self {
            loss,
            gradient,
            probes: 0,
        })
    }

    /// `L′ √(d_h d_v)`, the smoothness constant of the whole objective.
    pub fn curvature(&self, shape: &NetworkShape) -> f64 {
        self.gradient * (shape.params() as f64).sqrt()
    }

    /// The variance ceiling `d_h d_v L²` on the noisy gradient.
    pub fn variance_bound(&self, shape: &NetworkShape) -> f64 {
        shape.params() as f64 * self.loss * self.loss
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzConfig {
    pub probes: usize,
    /// Probe weights are drawn uniformly from `[-radius, radius)`.
    pub radius: f64,
    /// Instances averaged for each dataset-mean gradient.
    pub max_instances: usize,
}

impl LipschitzConfig {
    pub fn new(probes: usize) -> Self {
        Self {
            probes,
            radius: 3.0,
            max_instances: 64,
        }
    }
}

/// Estimate `L` and `L′` from random pairs of weights that differ in one
/// coordinate.
///
/// Probe `p` draws from a stream derived from `rng` and `p` alone, so a run
/// with more probes sees a superset of the probes of a shorter run and can only
/// raise the estimates.
pub fn estimate_lipschitz(
    dataset: &Dataset,
    model: &CorruptionModel,
    shape: &NetworkShape,
    config: &LipschitzConfig,
    rng: &mut Stream,
) -> Result<LipschitzEstimate> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.probes < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 probes, got {}",
            config.probes
        )));
    }
    if dataset.visible() != shape.visible || dataset.bias() != shape.bias {
        return Err(Error::Dimension(
            "dataset does not match the network shape".into(),
        ));
    }
    let base = Stream::new(rng.next_word());
    let v = shape.visible;
    let k = shape.corruptible();
    let mut ws = Workspace::new(shape);
    let mut grad = vec![0.0; shape.params()];
    let mut x_tilde = vec![0.0; v];
    let mut draws: Vec<(usize, Vec<f64>)> = Vec::with_capacity(config.max_instances);
    let (mut l_max, mut lp_max) = (0.0f64, 0.0f64);

    for p in 0..config.probes {
        let mut s = base.derive(p as u64);
        let mut w = WeightMatrix::random(*shape, config.radius, &mut s);
        let i = s.below(shape.hidden);
        let j = s.below(v);
        let original = w.get(i, j);
        let moved = s.uniform_in(-config.radius, config.radius);
        let dw = (moved - original).abs();
        if dw == 0.0 {
            continue;
        }

        // loss slope on one sampled pair
        let x = dataset.row(s.below(dataset.len()));
        corrupt_into(x, k, model.zeta(), &mut s, &mut x_tilde);
        let l0 = ws.forward(w.as_slice(), v, x, &x_tilde);
        w.set(i, j, moved);
        let l1 = ws.forward(w.as_slice(), v, x, &x_tilde);
        l_max = l_max.max((l1 - l0).abs() / dw);

        // gradient slope of the dataset-mean objective, shared draws at both points
        draws.clear();
        let m = dataset.len().min(config.max_instances);
        for d in 0..m {
            let idx = if m == dataset.len() {
                d
            } else {
                s.below(dataset.len())
            };
            let mut xt = vec![0.0; v];
            corrupt_into(dataset.row(idx), k, model.zeta(), &mut s, &mut xt);
            draws.push((idx, xt));
        }
        let mut entry = |w: &WeightMatrix| {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for (idx, xt) in &draws {
                let x = dataset.row(*idx);
                ws.forward(w.as_slice(), v, x, xt);
                ws.backward(w.as_slice(), v, x);
                ws.accumulate_grad(v, xt, 1.0 / m as f64, &mut grad);
            }
            grad[i * v + j]
        };
        let g1 = entry(&w);
        w.set(i, j, original);
        let g0 = entry(&w);
        lp_max = lp_max.max((g1 - g0).abs() / dw);
    }

    Ok(LipschitzEstimate {
        loss: l_max.max(f64::MIN_POSITIVE),
        gradient: lp_max.max(f64::MIN_POSITIVE),
        probes: config.probes,
    })
}
