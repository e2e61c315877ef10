//! Exact expectations against Monte Carlo averages of the single-sample
//! quantities.

use rsgda_core::da::{
    corrupt, expected_grad_bruteforce, expected_loss_bruteforce, grad, loss, CorruptionModel,
    NetworkShape, WeightMatrix,
};
use rsgda_core::rng::Stream;

const DRAWS: usize = 100_000;

fn input(shape: &NetworkShape, rng: &mut Stream) -> Vec<f64> {
    let mut x: Vec<f64> = (0..shape.visible).map(|_| rng.uniform()).collect();
    if let Some(b) = shape.bias_index() {
        x[b] = 1.0;
    }
    x
}

#[test]
fn expected_loss_agrees_with_monte_carlo() {
    let mut rng = Stream::new(808);
    let s = NetworkShape::new(8, 4, false).unwrap();
    let w = WeightMatrix::random(s, 1.5, &mut rng);
    let x = input(&s, &mut rng);
    let m = CorruptionModel::new(0.3).unwrap();
    let exact = expected_loss_bruteforce(&w, &x, &m).unwrap();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..DRAWS {
        let l = loss(&w, &corrupt(&x, &s, &m, &mut rng).unwrap()).unwrap();
        sum += l;
        sq += l * l;
    }
    let mean = sum / DRAWS as f64;
    let se = ((sq / DRAWS as f64 - mean * mean) / DRAWS as f64).sqrt();
    assert!(
        (mean - exact).abs() <= 3.0 * se,
        "{mean} vs {exact} (se {se})"
    );
}

#[test]
fn noisy_gradient_is_unbiased() {
    let mut rng = Stream::new(909);
    let s = NetworkShape::new(4, 3, true).unwrap();
    let w = WeightMatrix::random(s, 1.0, &mut rng);
    let x = input(&s, &mut rng);
    let m = CorruptionModel::new(0.3).unwrap();
    let exact = expected_grad_bruteforce(&w, &x, &m).unwrap();
    let p = s.params();
    let (mut sum, mut sq) = (vec![0.0; p], vec![0.0; p]);
    for _ in 0..DRAWS {
        let g = grad(&w, &corrupt(&x, &s, &m, &mut rng).unwrap()).unwrap();
        for (k, v) in g.as_slice().iter().enumerate() {
            sum[k] += v;
            sq[k] += v * v;
        }
    }
    for k in 0..p {
        let mean = sum[k] / DRAWS as f64;
        let se = ((sq[k] / DRAWS as f64 - mean * mean) / DRAWS as f64).sqrt();
        let e = exact.as_slice()[k];
        assert!(
            (mean - e).abs() <= 3.0 * se,
            "entry {k}: {mean} vs {e} (se {se})"
        );
    }
}
