use crate::da::{CorruptionModel, WeightMatrix};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveOracle, OracleMode};
use crate::rng::Stream;

use super::RsgRun;

/// Outcome of choosing the best of several independent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSelection {
    pub index: usize,
    pub weights: WeightMatrix,
    /// Estimated `‖∇f(W^{R_c})‖²` for every run.
    pub scores: Vec<f64>,
    pub exact: bool,
}

/// Score each run's returned iterate by its full-gradient norm and pick the
/// smallest, breaking ties toward the lowest index.
pub fn multi_fold_select(
    runs: &[RsgRun],
    dataset: &Dataset,
    model: CorruptionModel,
    mode: OracleMode,
    rng: &mut Stream,
) -> Result<FoldSelection> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Domain("need at least one run to select from".into()))?;
    let shape = first.w_final.shape();
    if let Some(c) = runs.iter().position(|r| r.w_final.shape() != shape) {
        return Err(Error::Dimension(format!(
            "run {c} has a different network shape from run 0"
        )));
    }
    let oracle = ObjectiveOracle::new(dataset, shape, model, mode, rng)?;
    let scores = runs
        .iter()
        .map(|r| oracle.grad_norm_sq(&r.w_final))
        .collect::<Result<Vec<_>>>()?;
    let mut index = 0;
    for (c, s) in scores.iter().enumerate() {
        if *s < scores[index] {
            index = c;
        }
    }
    Ok(FoldSelection {
        index,
        weights: runs[index].w_final.clone(),
        scores,
        exact: oracle.is_exact(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::da::NetworkShape;
    use crate::dataset::DataSource;

    fn fake_run(w: WeightMatrix) -> RsgRun {
        RsgRun {
            init_seed: 0,
            iterations: 1,
            stop: 1,
            w_final: w.clone(),
            w_last: w,
            grad_norm_history: vec![0.0],
            oracle_history: vec![],
            f_initial: None,
            f_best: None,
            reuse: 1.0,
        }
    }

    #[test]
    fn picks_zero_gradient_run() {
        let d =
            Dataset::from_rows(&[vec![0.5; 3], vec![0.5; 3]], false, DataSource::InMemory).unwrap();
        let s = NetworkShape::new(3, 2, false).unwrap();
        let mut runs: Vec<_> = (0..4)
            .map(|i| fake_run(WeightMatrix::init_uniform(s, &mut Stream::new(i))))
            .collect();
        runs.insert(2, fake_run(WeightMatrix::zeros(s)));
        let m = CorruptionModel::new(0.3).unwrap();
        let sel = multi_fold_select(&runs, &d, m, OracleMode::Exact, &mut Stream::new(0)).unwrap();
        assert_eq!(sel.index, 2);
        assert_eq!(sel.scores[2], 0.0);
        assert!(sel.exact);

        let one =
            multi_fold_select(&runs[..1], &d, m, OracleMode::Exact, &mut Stream::new(0)).unwrap();
        assert_eq!(one.index, 0);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let d = Dataset::from_rows(&[vec![0.3, 0.8]], false, DataSource::InMemory).unwrap();
        let s = NetworkShape::new(2, 2, false).unwrap();
        let w = WeightMatrix::init_uniform(s, &mut Stream::new(5));
        let runs = vec![fake_run(w.clone()), fake_run(w.clone()), fake_run(w)];
        let m = CorruptionModel::new(0.2).unwrap();
        let sel = multi_fold_select(&runs, &d, m, OracleMode::Exact, &mut Stream::new(0)).unwrap();
        assert_eq!(sel.index, 0);
    }

    #[test]
    fn shape_mismatch() {
        let d = Dataset::from_rows(&[vec![0.3, 0.8]], false, DataSource::InMemory).unwrap();
        let a = fake_run(WeightMatrix::zeros(NetworkShape::new(2, 2, false).unwrap()));
        let b = fake_run(WeightMatrix::zeros(NetworkShape::new(2, 3, false).unwrap()));
        let m = CorruptionModel::new(0.2).unwrap();
        assert!(matches!(
            multi_fold_select(&[a, b], &d, m, OracleMode::Exact, &mut Stream::new(0)),
            Err(Error::Dimension(_))
        ));
    }
}
