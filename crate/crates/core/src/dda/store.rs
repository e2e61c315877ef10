use crate::da::{NetworkShape, WeightMatrix};
use crate::error::{Error, Result};

/// Exclusive write access to a set of columns for one meta-iteration.
#[derive(Debug, Clone)]
pub struct Lease {
    pub worker: usize,
    pub columns: Vec<usize>,
    /// Columns copied out of the store, bias taken from the round snapshot.
    pub block: WeightMatrix,
}

/// Central holder of `W` for distributed training.
///
/// A round opens with a snapshot of the bias column. Leases on non-bias
/// columns are exclusive among outstanding leases. Committing a lease writes
/// its non-bias columns at once and queues its bias column; at the barrier the
/// queued bias of the highest worker index is applied.
#[derive(Debug)]
pub struct ParameterStore {
    weights: WeightMatrix,
    bias: Option<usize>,
    bias_snapshot: Vec<f64>,
    owner: Vec<Option<usize>>,
    pending_bias: Option<(usize, Vec<f64>)>,
}

impl ParameterStore {
    pub fn new(weights: WeightMatrix) -> Self {
        let shape = weights.shape();
        let mut store = Self {
            bias: shape.bias_index(),
            bias_snapshot: Vec::new(),
            owner: vec![None; shape.visible],
            pending_bias: None,
            weights,
        };
        store.snapshot_bias();
        store
    }

    fn snapshot_bias(&mut self) {
        self.bias_snapshot = match self.bias {
            Some(j) => (0..self.weights.shape().hidden)
                .map(|i| self.weights.get(i, j))
                .collect(),
            None => Vec::new(),
        };
    }

    pub fn weights(&self) -> &WeightMatrix {
        &self.weights
    }

    pub fn into_weights(self) -> WeightMatrix {
        self.weights
    }

    /// Grant `worker` its columns (bias last, when present) as a sub-network of
    /// shape `shape`.
    pub fn lease(
        &mut self,
        worker: usize,
        columns: Vec<usize>,
        shape: NetworkShape,
    ) -> Result<Lease> {
        for &j in &columns {
            if Some(j) == self.bias {
                continue;
            }
            if let Some(other) = self.owner[j] {
                return Err(Error::Plan(format!(
                    "column {j} is leased to worker {other} and requested by worker {worker}"
                )));
            }
        }
        for &j in &columns {
            if Some(j) != self.bias {
                self.owner[j] = Some(worker);
            }
        }
        let mut block = self.weights.gather_columns(&columns, shape)?;
        if self.bias.is_some() && shape.bias {
            let last = shape.visible - 1;
            for (i, &v) in self.bias_snapshot.iter().enumerate() {
                block.set(i, last, v);
            }
        }
        Ok(Lease {
            worker,
            columns,
            block,
        })
    }

    /// Return a lease with its updated block.
    pub fn commit(&mut self, lease: Lease, block: &WeightMatrix) {
        let hidden = block.shape().hidden;
        for (jj, &j) in lease.columns.iter().enumerate() {
            if Some(j) == self.bias {
                let col: Vec<f64> = (0..hidden).map(|i| block.get(i, jj)).collect();
                if self
                    .pending_bias
                    .as_ref()
                    .is_none_or(|(w, _)| *w <= lease.worker)
                {
                    self.pending_bias = Some((lease.worker, col));
                }
            } else {
                for i in 0..hidden {
                    self.weights.set(i, j, block.get(i, jj));
                }
                self.owner[j] = None;
            }
        }
    }

    /// End the round: apply the last bias write and take a new snapshot.
    pub fn barrier(&mut self) {
        if let (Some(j), Some((_, col))) = (self.bias, self.pending_bias.take()) {
            for (i, v) in col.into_iter().enumerate() {
                self.weights.set(i, j, v);
            }
        }
        self.owner.iter_mut().for_each(|o| *o = None);
        self.snapshot_bias();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    #[test]
    fn overlapping_leases_fail() {
        let s = NetworkShape::new(5, 2, true).unwrap();
        let mut store = ParameterStore::new(WeightMatrix::init_uniform(s, &mut Stream::new(0)));
        let sub = NetworkShape::new(3, 2, true).unwrap();
        store.lease(0, vec![0, 1, 4], sub).unwrap();
        assert!(matches!(
            store.lease(1, vec![1, 2, 4], sub),
            Err(Error::Plan(_))
        ));
        store.lease(1, vec![2, 3, 4], sub).unwrap();
    }

    #[test]
    fn bias_last_writer_wins() {
        let s = NetworkShape::new(3, 1, true).unwrap();
        let mut store = ParameterStore::new(WeightMatrix::zeros(s));
        let sub = NetworkShape::new(2, 1, true).unwrap();
        let a = store.lease(0, vec![0, 2], sub).unwrap();
        let b = store.lease(1, vec![1, 2], sub).unwrap();
        let wa = WeightMatrix::from_vec(sub, vec![1.0, 10.0]).unwrap();
        let wb = WeightMatrix::from_vec(sub, vec![2.0, 20.0]).unwrap();
        store.commit(b, &wb);
        store.commit(a, &wa);
        // bias is untouched until the barrier
        assert_eq!(store.weights().as_slice(), &[1.0, 2.0, 0.0]);
        store.barrier();
        assert_eq!(store.weights().as_slice(), &[1.0, 2.0, 20.0]);
    }
}
