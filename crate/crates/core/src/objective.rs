//! Evaluators of the full objective `f(W) = E_η L(η; W)` over a dataset and
//! its gradient.
//!
//! The exact evaluator averages the mask-enumeration oracles over the
//! dataset. The Monte Carlo evaluator freezes a set of corrupted draws once, so
//! repeated evaluations along a trajectory are a deterministic function of `W`.

use crate::da::{
    expected_grad_bruteforce, expected_loss_bruteforce, validate_input, CorruptionModel, Matrix,
    NetworkShape, WeightMatrix, Workspace, ENUMERATION_LIMIT,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// How an [`ObjectiveOracle`] evaluates expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Enumerate every corruption mask (requires at most
    /// [`ENUMERATION_LIMIT`] corruptible coordinates).
    Exact,
    /// Average over a fixed set of `draws` corrupted instances.
    MonteCarlo { draws: usize },
    /// `Exact` when enumeration is possible, otherwise `MonteCarlo`.
    Auto { draws: usize },
}

#[derive(Debug, Clone)]
enum Kind {
    Exact {
        data: Dataset,
        model: CorruptionModel,
    },
    Sampled {
        x: Vec<f64>,
        x_tilde: Vec<f64>,
        count: usize,
    },
}

#[derive(Debug, Clone)]
pub struct ObjectiveOracle {
    shape: NetworkShape,
    kind: Kind,
}

impl ObjectiveOracle {
    pub fn new(
        dataset: &Dataset,
        shape: NetworkShape,
        model: CorruptionModel,
        mode: OracleMode,
        rng: &mut Stream,
    ) -> Result<Self> {
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
        let mode = match mode {
            OracleMode::Auto { .. } if shape.corruptible() <= ENUMERATION_LIMIT => {
                OracleMode::Exact
            }
            OracleMode::Auto { draws } => OracleMode::MonteCarlo { draws },
            m => m,
        };
        let kind = match mode {
            OracleMode::Exact => {
                if shape.corruptible() > ENUMERATION_LIMIT {
                    return Err(Error::EnumerationLimit {
                        corruptible: shape.corruptible(),
                        limit: ENUMERATION_LIMIT,
                    });
                }
                for row in dataset.rows() {
                    validate_input(row, &shape)?;
                }
                Kind::Exact {
                    data: dataset.clone(),
                    model,
                }
            }
            OracleMode::MonteCarlo { draws } => {
                if draws == 0 {
                    return Err(Error::Domain("Monte Carlo oracle needs draws >= 1".into()));
                }
                let v = shape.visible;
                let n = dataset.len();
                let mut x = Vec::with_capacity(draws * v);
                let mut x_tilde = vec![0.0; draws * v];
                for d in 0..draws {
                    // cycle through the data when there are enough draws
                    let i = if draws >= n { d % n } else { rng.below(n) };
                    let row = dataset.row(i);
                    x.extend_from_slice(row);
                    crate::da::corrupt_into(
                        row,
                        shape.corruptible(),
                        model.zeta(),
                        rng,
                        &mut x_tilde[d * v..(d + 1) * v],
                    );
                }
                Kind::Sampled {
                    x,
                    x_tilde,
                    count: draws,
                }
            }
            OracleMode::Auto { .. } => unreachable!(),
        };
        Ok(Self { shape, kind })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, Kind::Exact { .. })
    }

    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    fn check(&self, w: &WeightMatrix) -> Result<()> {
        if w.shape() != self.shape {
            return Err(Error::Dimension(
                "weights do not match the oracle's network".into(),
            ));
        }
        Ok(())
    }

    /// Estimate of `f(W)`.
    pub fn value(&self, w: &WeightMatrix) -> Result<f64> {
        self.check(w)?;
        match &self.kind {
            Kind::Exact { data, model } => {
                let mut total = 0.0;
                for row in data.rows() {
                    total += expected_loss_bruteforce(w, row, model)?;
                }
                Ok(total / data.len() as f64)
            }
            Kind::Sampled { x, x_tilde, count } => {
                let v = self.shape.visible;
                let mut ws = Workspace::new(&self.shape);
                let mut total = 0.0;
                for d in 0..*count {
                    let r = d * v..(d + 1) * v;
                    total += ws.forward(w.as_slice(), v, &x[r.clone()], &x_tilde[r]);
                }
                Ok(total / *count as f64)
            }
        }
    }

    /// Estimate of `∇_W f(W)`.
    pub fn gradient(&self, w: &WeightMatrix) -> Result<Matrix> {
        self.check(w)?;
        let mut g = Matrix::zeros(self.shape.hidden, self.shape.visible);
        match &self.kind {
            Kind::Exact { data, model } => {
                for row in data.rows() {
                    g.add_scaled(1.0, &expected_grad_bruteforce(w, row, model)?);
                }
                g.scale(1.0 / data.len() as f64);
            }
            Kind::Sampled { x, x_tilde, count } => {
                let v = self.shape.visible;
                let mut ws = Workspace::new(&self.shape);
                let alpha = 1.0 / *count as f64;
                for d in 0..*count {
                    let r = d * v..(d + 1) * v;
                    ws.forward(w.as_slice(), v, &x[r.clone()], &x_tilde[r.clone()]);
                    ws.backward(w.as_slice(), v, &x[r.clone()]);
                    ws.accumulate_grad(v, &x_tilde[r], alpha, g.as_mut_slice());
                }
            }
        }
        Ok(g)
    }

    /// Estimate of `‖∇_W f(W)‖²`.
    pub fn grad_norm_sq(&self, w: &WeightMatrix) -> Result<f64> {
        Ok(self.gradient(w)?.norm_sq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DataSource;

    fn data() -> Dataset {
        Dataset::from_rows(
            &[
                vec![0.1, 0.8, 0.4],
                vec![0.9, 0.2, 0.6],
                vec![0.5, 0.5, 0.3],
            ],
            true,
            DataSource::InMemory,
        )
        .unwrap()
    }

    #[test]
    fn auto_picks_exact_when_small() {
        let d = data();
        let s = d.shape(2).unwrap();
        let m = CorruptionModel::new(0.3).unwrap();
        let o = ObjectiveOracle::new(
            &d,
            s,
            m,
            OracleMode::Auto { draws: 10 },
            &mut Stream::new(0),
        )
        .unwrap();
        assert!(o.is_exact());
    }

    #[test]
    fn monte_carlo_approaches_exact() {
        let d = data();
        let s = d.shape(2).unwrap();
        let m = CorruptionModel::new(0.3).unwrap();
        let w = WeightMatrix::random(s, 1.0, &mut Stream::new(5));
        let exact = ObjectiveOracle::new(&d, s, m, OracleMode::Exact, &mut Stream::new(0)).unwrap();
        let mc = ObjectiveOracle::new(
            &d,
            s,
            m,
            OracleMode::MonteCarlo { draws: 60_000 },
            &mut Stream::new(1),
        )
        .unwrap();
        let ge = exact.gradient(&w).unwrap();
        let gm = mc.gradient(&w).unwrap();
        assert!(ge.max_abs_diff(&gm) < 0.01 * ge.max_abs().max(1e-3));
        assert!((exact.value(&w).unwrap() - mc.value(&w).unwrap()).abs() < 0.01);
    }

    #[test]
    fn shape_checks() {
        let d = data();
        let m = CorruptionModel::new(0.3).unwrap();
        let wrong = NetworkShape::new(3, 2, false).unwrap();
        assert!(
            ObjectiveOracle::new(&d, wrong, m, OracleMode::Exact, &mut Stream::new(0)).is_err()
        );
    }
}
