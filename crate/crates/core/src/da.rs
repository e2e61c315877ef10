//! One-layer denoising autoencoder with tied weights.
//!
//! The reconstruction of a corrupted input `x̃` is `σ(Wᵀ σ(W x̃))` with a single
//! `d_h × d_v` matrix `W`, and the per-sample loss is the squared distance to
//! the clean input `x`. Besides the sampled loss and its analytic gradient this
//! module provides exhaustive expectations over every corruption mask, which
//! the rest of the crate uses as ground truth.

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Largest number of corruptible coordinates the exhaustive oracles enumerate.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkShape {
    /// Visible units, including the appended bias coordinate when `bias` is set.
    pub visible: usize,
    pub hidden: usize,
    /// The last visible coordinate is a constant 1 that is never corrupted.
    pub bias: bool,
}

impl NetworkShape {
    pub fn new(visible: usize, hidden: usize, bias: bool) -> Result<Self> {
        if hidden == 0 || visible == 0 || (bias && visible < 2) {
            return Err(Error::Dimension(format!(
                "network needs d_v >= {} and d_h >= 1, got d_v={visible}, d_h={hidden}",
                1 + usize::from(bias)
            )));
        }
        Ok(Self {
            visible,
            hidden,
            bias,
        })
    }

    /// Shape for `data_dims` data coordinates, appending the bias unit if enabled.
    pub fn for_data(data_dims: usize, hidden: usize, bias: bool) -> Result<Self> {
        Self::new(data_dims + usize::from(bias), hidden, bias)
    }

    /// `d_h · d_v`, the number of free parameters.
    pub fn params(&self) -> usize {
        self.visible * self.hidden
    }

    pub fn corruptible(&self) -> usize {
        self.visible - usize::from(self.bias)
    }

    pub fn bias_index(&self) -> Option<usize> {
        self.bias.then(|| self.visible - 1)
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &Matrix) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// The tied encoder/decoder weights `W`, `d_h × d_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    shape: NetworkShape,
    m: Matrix,
}

impl WeightMatrix {
    pub fn zeros(shape: NetworkShape) -> Self {
        Self {
            shape,
            m: Matrix::zeros(shape.hidden, shape.visible),
        }
    }

    pub fn from_matrix(shape: NetworkShape, m: Matrix) -> Result<Self> {
        if m.rows() != shape.hidden || m.cols() != shape.visible {
            return Err(Error::Dimension(format!(
                "weights are {}x{}, network expects {}x{}",
                m.rows(),
                m.cols(),
                shape.hidden,
                shape.visible
            )));
        }
        if let Some(pos) = m.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("weight entry {pos} is not finite")));
        }
        Ok(Self { shape, m })
    }

    pub fn from_vec(shape: NetworkShape, data: Vec<f64>) -> Result<Self> {
        Self::from_matrix(shape, Matrix::from_vec(shape.hidden, shape.visible, data)?)
    }

    /// Entries uniform on `(-a, a)` with `a = sqrt(6 / (d_h + d_v))`.
    pub fn init_uniform(shape: NetworkShape, rng: &mut Stream) -> Self {
        let a = (6.0 / (shape.hidden + shape.visible) as f64).sqrt();
        let data = (0..shape.params()).map(|_| rng.uniform_in(-a, a)).collect();
        Self {
            shape,
            m: Matrix {
                rows: shape.hidden,
                cols: shape.visible,
                data,
            },
        }
    }

    /// Entries uniform on `[-radius, radius)`.
    pub fn random(shape: NetworkShape, radius: f64, rng: &mut Stream) -> Self {
        let data = (0..shape.params())
            .map(|_| rng.uniform_in(-radius, radius))
            .collect();
        Self {
            shape,
            m: Matrix {
                rows: shape.hidden,
                cols: shape.visible,
                data,
            },
        }
    }

    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m.set(i, j, v)
    }

    pub fn as_slice(&self) -> &[f64] {
        self.m.as_slice()
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        self.m.as_mut_slice()
    }

    /// Gather the listed columns into a smaller network of shape `shape`.
    pub fn gather_columns(&self, columns: &[usize], shape: NetworkShape) -> Result<Self> {
        if shape.hidden != self.shape.hidden || shape.visible != columns.len() {
            return Err(Error::Dimension(
                "column subset does not match the requested shape".into(),
            ));
        }
        let mut out = WeightMatrix::zeros(shape);
        for i in 0..shape.hidden {
            for (jj, &j) in columns.iter().enumerate() {
                out.m.set(i, jj, self.m.get(i, j));
            }
        }
        Ok(out)
    }

    /// Write the columns of `block` back into the listed columns of `self`.
    pub fn scatter_columns(&mut self, columns: &[usize], block: &WeightMatrix) {
        for i in 0..self.shape.hidden {
            for (jj, &j) in columns.iter().enumerate() {
                self.m.set(i, j, block.m.get(i, jj));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionModel {
    zeta: f64,
}

impl CorruptionModel {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::Domain(format!(
                "corruption probability {zeta} outside [0, 1]"
            )));
        }
        Ok(Self { zeta })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }
}

/// One realization of `η`: the clean input, its corrupted copy and the mask
/// (`true` = kept).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePair {
    pub x: Vec<f64>,
    pub x_tilde: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SamplePair {
    /// The uncorrupted pair `(x, x)`.
    pub fn clean(x: &[f64]) -> Self {
        Self {
            x: x.to_vec(),
            x_tilde: x.to_vec(),
            mask: vec![true; x.len()],
        }
    }

    pub fn with_mask(x: &[f64], mask: Vec<bool>) -> Result<Self> {
        if mask.len() != x.len() {
            return Err(Error::Dimension(format!(
                "mask has {} entries, input has {}",
                mask.len(),
                x.len()
            )));
        }
        let x_tilde = x
            .iter()
            .zip(&mask)
            .map(|(&v, &keep)| if keep { v } else { 0.0 })
            .collect();
        Ok(Self {
            x: x.to_vec(),
            x_tilde,
            mask,
        })
    }
}

/// Logistic function, evaluated without overflow for either sign.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Check that `x` is a valid input for `shape`.
pub fn validate_input(x: &[f64], shape: &NetworkShape) -> Result<()> {
    if x.len() != shape.visible {
        return Err(Error::Dimension(format!(
            "input has {} coordinates, network has {} visible units",
            x.len(),
            shape.visible
        )));
    }
    for (index, &value) in x.iter().enumerate() {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InputDomain { index, value });
        }
    }
    if let Some(b) = shape.bias_index() {
        if x[b] != 1.0 {
            return Err(Error::InputDomain {
                index: b,
                value: x[b],
            });
        }
    }
    Ok(())
}

/// Zero each non-bias coordinate independently with probability `ζ`.
///
/// Draws exactly one uniform per corruptible coordinate, so the number of
/// words consumed from `rng` depends only on the shape.
pub fn corrupt(
    x: &[f64],
    shape: &NetworkShape,
    model: &CorruptionModel,
    rng: &mut Stream,
) -> Result<SamplePair> {
    validate_input(x, shape)?;
    let mut mask = vec![true; x.len()];
    for m in mask.iter_mut().take(shape.corruptible()) {
        *m = !rng.bernoulli(model.zeta);
    }
    SamplePair::with_mask(x, mask)
}

/// Same as [`corrupt`] but writes into `out`, skipping validation.
pub(crate) fn corrupt_into(
    x: &[f64],
    corruptible: usize,
    zeta: f64,
    rng: &mut Stream,
    out: &mut [f64],
) {
    for j in 0..corruptible {
        out[j] = if rng.bernoulli(zeta) { 0.0 } else { x[j] };
    }
    out[corruptible..].copy_from_slice(&x[corruptible..]);
}

fn check_pair(w: &WeightMatrix, pair: &SamplePair) -> Result<()> {
    let v = w.shape().visible;
    if pair.x.len() != v || pair.x_tilde.len() != v || pair.mask.len() != v {
        return Err(Error::Dimension(format!(
            "sample pair of length {} does not match {} visible units",
            pair.x.len(),
            v
        )));
    }
    Ok(())
}

/// Scratch buffers for one forward/backward pass.
#[derive(Debug, Clone)]
pub struct Workspace {
    /// `σ(W x̃)`
    h: Vec<f64>,
    /// `σ(Wᵀ h)`
    y: Vec<f64>,
    /// loss derivative w.r.t. the decoder pre-activation
    db: Vec<f64>,
    /// loss derivative w.r.t. the encoder pre-activation
    da: Vec<f64>,
}

impl Workspace {
    pub fn new(shape: &NetworkShape) -> Self {
        Self {
            h: vec![0.0; shape.hidden],
            y: vec![0.0; shape.visible],
            db: vec![0.0; shape.visible],
            da: vec![0.0; shape.hidden],
        }
    }

    /// Forward pass; returns the loss `‖x − y‖²`.
    pub(crate) fn forward(&mut self, w: &[f64], visible: usize, x: &[f64], x_tilde: &[f64]) -> f64 {
        let hidden = self.h.len();
        for i in 0..hidden {
            let row = &w[i * visible..(i + 1) * visible];
            let a: f64 = row.iter().zip(x_tilde).map(|(w, x)| w * x).sum();
            self.h[i] = sigmoid(a);
        }
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..hidden {
            let hi = self.h[i];
            let row = &w[i * visible..(i + 1) * visible];
            for (b, &wij) in self.y.iter_mut().zip(row) {
                *b += wij * hi;
            }
        }
        let mut loss = 0.0;
        for (y, &xj) in self.y.iter_mut().zip(x) {
            *y = sigmoid(*y);
            let r = xj - *y;
            loss += r * r;
        }
        loss
    }

    /// Backward pass after [`Workspace::forward`]; fills the two error signals.
    pub(crate) fn backward(&mut self, w: &[f64], visible: usize, x: &[f64]) {
        for j in 0..visible {
            let y = self.y[j];
            self.db[j] = 2.0 * (y - x[j]) * y * (1.0 - y);
        }
        for i in 0..self.h.len() {
            let row = &w[i * visible..(i + 1) * visible];
            let dh: f64 = row.iter().zip(&self.db).map(|(w, d)| w * d).sum();
            let h = self.h[i];
            self.da[i] = dh * h * (1.0 - h);
        }
    }

    /// Writes `∂L/∂W = h ⊗ δ_b + δ_a ⊗ x̃` into `out` (scaled by `alpha`, accumulated).
    pub(crate) fn accumulate_grad(
        &self,
        visible: usize,
        x_tilde: &[f64],
        alpha: f64,
        out: &mut [f64],
    ) {
        for i in 0..self.h.len() {
            let hi = alpha * self.h[i];
            let dai = alpha * self.da[i];
            let row = &mut out[i * visible..(i + 1) * visible];
            for j in 0..visible {
                row[j] += hi * self.db[j] + dai * x_tilde[j];
            }
        }
    }

    /// Gradient step `W ← W − γ G` fused with the computation of `‖G‖²`.
    pub(crate) fn descend(
        &self,
        w: &mut [f64],
        visible: usize,
        x_tilde: &[f64],
        gamma: f64,
    ) -> f64 {
        let mut norm_sq = 0.0;
        for i in 0..self.h.len() {
            let hi = self.h[i];
            let dai = self.da[i];
            let row = &mut w[i * visible..(i + 1) * visible];
            for j in 0..visible {
                let g = hi * self.db[j] + dai * x_tilde[j];
                norm_sq += g * g;
                row[j] -= gamma * g;
            }
        }
        norm_sq
    }

    /// Reconstruction `σ(Wᵀ σ(W x̃))` from the last forward pass.
    pub fn reconstruction(&self) -> &[f64] {
        &self.y
    }
}

/// `‖x − σ(Wᵀ σ(W x̃))‖²`.
pub fn loss(w: &WeightMatrix, pair: &SamplePair) -> Result<f64> {
    check_pair(w, pair)?;
    let shape = w.shape();
    let mut ws = Workspace::new(&shape);
    Ok(ws.forward(w.as_slice(), shape.visible, &pair.x, &pair.x_tilde))
}

/// Exact gradient of [`loss`] with respect to every entry of `W`, through both
/// the encoder and the decoder.
pub fn grad(w: &WeightMatrix, pair: &SamplePair) -> Result<Matrix> {
    Ok(loss_and_grad(w, pair)?.1)
}

pub fn loss_and_grad(w: &WeightMatrix, pair: &SamplePair) -> Result<(f64, Matrix)> {
    check_pair(w, pair)?;
    let shape = w.shape();
    let mut ws = Workspace::new(&shape);
    let l = ws.forward(w.as_slice(), shape.visible, &pair.x, &pair.x_tilde);
    ws.backward(w.as_slice(), shape.visible, &pair.x);
    let mut g = Matrix::zeros(shape.hidden, shape.visible);
    ws.accumulate_grad(shape.visible, &pair.x_tilde, 1.0, g.as_mut_slice());
    Ok((l, g))
}

/// Calls `f(probability, x̃)` for every corruption mask with nonzero probability.
fn for_each_mask(
    x: &[f64],
    shape: &NetworkShape,
    model: &CorruptionModel,
    mut f: impl FnMut(f64, &[f64]),
) -> Result<()> {
    validate_input(x, shape)?;
    let k = shape.corruptible();
    if k > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            corruptible: k,
            limit: ENUMERATION_LIMIT,
        });
    }
    let zeta = model.zeta();
    let mut x_tilde = x.to_vec();
    for bits in 0u32..(1u32 << k) {
        // bit j set = coordinate j zeroed
        let zeroed = bits.count_ones() as i32;
        let p = zeta.powi(zeroed) * (1.0 - zeta).powi(k as i32 - zeroed);
        if p == 0.0 {
            continue;
        }
        for (j, xt) in x_tilde.iter_mut().enumerate().take(k) {
            *xt = if bits & (1 << j) != 0 { 0.0 } else { x[j] };
        }
        f(p, &x_tilde);
    }
    Ok(())
}

/// `E_{x̃|x} L`, by enumerating all corruption masks.
pub fn expected_loss_bruteforce(
    w: &WeightMatrix,
    x: &[f64],
    model: &CorruptionModel,
) -> Result<f64> {
    let shape = w.shape();
    let mut ws = Workspace::new(&shape);
    let mut total = 0.0;
    for_each_mask(x, &shape, model, |p, xt| {
        total += p * ws.forward(w.as_slice(), shape.visible, x, xt);
    })?;
    Ok(total)
}

/// `E_{x̃|x} ∇_W L`, by enumerating all corruption masks.
pub fn expected_grad_bruteforce(
    w: &WeightMatrix,
    x: &[f64],
    model: &CorruptionModel,
) -> Result<Matrix> {
    let shape = w.shape();
    let mut ws = Workspace::new(&shape);
    let mut g = Matrix::zeros(shape.hidden, shape.visible);
    for_each_mask(x, &shape, model, |p, xt| {
        ws.forward(w.as_slice(), shape.visible, x, xt);
        ws.backward(w.as_slice(), shape.visible, x);
        ws.accumulate_grad(shape.visible, xt, p, g.as_mut_slice());
    })?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shape(v: usize, h: usize, bias: bool) -> NetworkShape {
        NetworkShape::new(v, h, bias).unwrap()
    }

    #[test]
    fn zero_corruption_is_identity() {
        let s = shape(3, 2, true);
        let m = CorruptionModel::new(0.0).unwrap();
        let p = corrupt(&[0.2, 0.7, 1.0], &s, &m, &mut Stream::new(1)).unwrap();
        assert_eq!(p.x_tilde, vec![0.2, 0.7, 1.0]);
    }

    #[test]
    fn full_corruption_spares_bias() {
        let s = shape(3, 2, true);
        let m = CorruptionModel::new(1.0).unwrap();
        let p = corrupt(&[0.2, 0.7, 1.0], &s, &m, &mut Stream::new(1)).unwrap();
        assert_eq!(p.x_tilde, vec![0.0, 0.0, 1.0]);
        assert_eq!(p.mask, vec![false, false, true]);
    }

    #[test]
    fn corruption_rate() {
        let s = shape(1001, 1, true);
        let mut x = vec![0.5; 1001];
        x[1000] = 1.0;
        let m = CorruptionModel::new(0.3).unwrap();
        let p = corrupt(&x, &s, &m, &mut Stream::new(2024)).unwrap();
        let zeroed = p.mask.iter().filter(|k| !**k).count() as f64 / 1000.0;
        assert!((0.25..=0.35).contains(&zeroed), "{zeroed}");
    }

    #[test]
    fn corrupt_rejects_bad_input() {
        let s = shape(3, 1, true);
        let m = CorruptionModel::new(0.1).unwrap();
        let mut r = Stream::new(0);
        assert!(matches!(
            corrupt(&[1.2, 0.0, 1.0], &s, &m, &mut r),
            Err(Error::InputDomain { index: 0, .. })
        ));
        assert!(matches!(
            corrupt(&[f64::NAN, 0.0, 1.0], &s, &m, &mut r),
            Err(Error::InputDomain { .. })
        ));
        assert!(matches!(
            corrupt(&[0.1, 0.0, 0.5], &s, &m, &mut r),
            Err(Error::InputDomain { index: 2, .. })
        ));
    }

    #[test]
    fn zero_weights_give_half_reconstruction() {
        let s = shape(3, 2, false);
        let w = WeightMatrix::zeros(s);
        let p = SamplePair::with_mask(&[1.0, 1.0, 1.0], vec![false, true, false]).unwrap();
        assert_relative_eq!(loss(&w, &p).unwrap(), 0.75);
        let s4 = shape(4, 3, false);
        let p = SamplePair::clean(&[0.5; 4]);
        let w = WeightMatrix::zeros(s4);
        assert_eq!(loss(&w, &p).unwrap(), 0.0);
        assert_eq!(grad(&w, &p).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let w = WeightMatrix::zeros(shape(3, 2, false));
        let p = SamplePair::clean(&[0.5; 4]);
        assert!(matches!(loss(&w, &p), Err(Error::Dimension(_))));
        assert!(matches!(grad(&w, &p), Err(Error::Dimension(_))));
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(800.0).is_finite());
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0).is_finite());
        assert_relative_eq!(sigmoid(2.0) + sigmoid(-2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bruteforce_zero_corruption_matches_single_pair() {
        let s = shape(4, 3, true);
        let w = WeightMatrix::random(s, 1.0, &mut Stream::new(3));
        let x = [0.1, 0.9, 0.4, 1.0];
        let m = CorruptionModel::new(0.0).unwrap();
        let p = SamplePair::clean(&x);
        assert_eq!(
            expected_loss_bruteforce(&w, &x, &m).unwrap(),
            loss(&w, &p).unwrap()
        );
        assert_eq!(
            expected_grad_bruteforce(&w, &x, &m).unwrap(),
            grad(&w, &p).unwrap()
        );
    }

    #[test]
    fn bruteforce_two_masks() {
        let s = shape(1, 2, false);
        let w = WeightMatrix::from_vec(s, vec![0.7, -1.3]).unwrap();
        let x = [0.8];
        let m = CorruptionModel::new(0.5).unwrap();
        let kept = loss(&w, &SamplePair::clean(&x)).unwrap();
        let dropped = loss(&w, &SamplePair::with_mask(&x, vec![false]).unwrap()).unwrap();
        assert_relative_eq!(
            expected_loss_bruteforce(&w, &x, &m).unwrap(),
            0.5 * kept + 0.5 * dropped,
            epsilon = 1e-15
        );
    }

    #[test]
    fn enumeration_limit() {
        let s = shape(22, 1, true);
        let w = WeightMatrix::zeros(s);
        let mut x = vec![0.5; 22];
        x[21] = 1.0;
        let m = CorruptionModel::new(0.2).unwrap();
        assert!(matches!(
            expected_loss_bruteforce(&w, &x, &m),
            Err(Error::EnumerationLimit {
                corruptible: 21,
                ..
            })
        ));
    }

    #[test]
    fn column_gather_scatter() {
        let s = shape(4, 2, false);
        let w = WeightMatrix::random(s, 1.0, &mut Stream::new(9));
        let sub = shape(2, 2, false);
        let block = w.gather_columns(&[3, 1], sub).unwrap();
        assert_eq!(block.get(1, 0), w.get(1, 3));
        let mut z = WeightMatrix::zeros(s);
        z.scatter_columns(&[3, 1], &block);
        assert_eq!(z.get(0, 1), w.get(0, 1));
        assert_eq!(z.get(0, 0), 0.0);
    }

    #[test]
    fn init_scale() {
        let s = shape(10, 6, false);
        let w = WeightMatrix::init_uniform(s, &mut Stream::new(4));
        let a = (6.0f64 / 16.0).sqrt();
        assert!(w.as_slice().iter().all(|v| v.abs() < a));
    }
}
