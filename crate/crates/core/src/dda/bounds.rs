use crate::da::NetworkShape;
use crate::error::{Error, Result};
use crate::rsg::{check_sample_args, fold_count, optimal_step_for_params, LipschitzEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributedBounds {
    /// `γ_b = D / (√N (τ d_h d_v)^{3/4})`.
    pub step: f64,
    /// `(D_f/(B D) + D L² L′)(τ d_h d_v)^{3/4} / √N`.
    pub bound: f64,
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Domain(format!("tau = {tau} outside (0, 1]")));
    }
    Ok(())
}

/// Step size and rate bound for `B` sub-DAs over a fraction `τ` of the units.
#[allow(clippy::too_many_arguments)]
pub fn dda_bounds(
    d: f64,
    d_f: f64,
    lip: &LipschitzEstimate,
    n: usize,
    b: usize,
    tau: f64,
    shape: &NetworkShape,
) -> Result<DistributedBounds> {
    check_tau(tau)?;
    if b == 0 {
        return Err(Error::Domain("B must be at least 1".into()));
    }
    if !(d_f.is_finite() && d_f >= 0.0) {
        return Err(Error::Domain(format!("D_f = {d_f} must be nonnegative")));
    }
    let p = tau * shape.params() as f64;
    let step = optimal_step_for_params(d, n, p, Some(lip))?;
    let d_bar = d_f / (b as f64 * d) + d * lip.loss * lip.loss * lip.gradient;
    Ok(DistributedBounds {
        step,
        bound: d_bar * p.powf(0.75) / (n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributedSampleSize {
    /// Meta-iterations.
    pub meta: usize,
    /// Instances, `⌈r (τ d_h d_v)^{3/2} / (t ε²)⌉`.
    pub instances: u64,
}

pub fn dda_sample_size(
    r: f64,
    delta: f64,
    epsilon: f64,
    t: f64,
    tau: f64,
    shape: &NetworkShape,
) -> Result<DistributedSampleSize> {
    let meta = fold_count(r, delta)?;
    check_sample_args(epsilon, t)?;
    check_tau(tau)?;
    let p = tau * shape.params() as f64;
    Ok(DistributedSampleSize {
        meta,
        instances: (r * p.powf(1.5) / (t * epsilon * epsilon)).ceil() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsg::{convergence_bound, optimal_constant_step, sample_size};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn golden_values() {
        let s = NetworkShape::new(4, 4, false).unwrap();
        let lip = LipschitzEstimate::new(1.0, 1.0).unwrap();
        let b = dda_bounds(1.0, 1.0, &lip, 100, 4, 0.5, &s).unwrap();
        assert_abs_diff_eq!(b.bound, 0.59460, epsilon = 1e-5);
        let big = NetworkShape::new(100, 20, false).unwrap();
        let ss = dda_sample_size(4.0, 0.05, 0.05, 1000.0, 0.5, &big).unwrap();
        assert_eq!(ss.meta, 5);
        assert_eq!(ss.instances, 50_597);
    }

    #[test]
    fn full_network_reduces_to_single() {
        let s = NetworkShape::new(6, 3, true).unwrap();
        let lip = LipschitzEstimate::new(0.8, 1.7).unwrap();
        let b = dda_bounds(0.9, 2.5, &lip, 400, 1, 1.0, &s).unwrap();
        assert_eq!(b.bound, convergence_bound(0.9, 2.5, &lip, 400, &s).unwrap());
        assert_eq!(
            b.step,
            optimal_constant_step(0.9, 400, &s, Some(&lip)).unwrap()
        );
        let single = sample_size(3.0, 0.1, 0.2, 5.0, &s).unwrap();
        let dist = dda_sample_size(3.0, 0.1, 0.2, 5.0, 1.0, &s).unwrap();
        assert_eq!(single.instances, dist.instances);
    }

    #[test]
    fn improvement_factor() {
        let s = NetworkShape::new(10, 5, false).unwrap();
        let lip = LipschitzEstimate::new(0.3, 0.6).unwrap();
        for tau in [0.1, 0.37, 0.5, 0.9] {
            let d = dda_bounds(1.0, 2.0, &lip, 1000, 1, tau, &s).unwrap();
            let c = convergence_bound(1.0, 2.0, &lip, 1000, &s).unwrap();
            assert_relative_eq!(d.bound / c, tau.powf(0.75), max_relative = 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        let s = NetworkShape::new(4, 4, false).unwrap();
        let lip = LipschitzEstimate::new(1.0, 1.0).unwrap();
        assert!(dda_bounds(1.0, 1.0, &lip, 100, 0, 0.5, &s).is_err());
        assert!(dda_bounds(1.0, 1.0, &lip, 100, 2, 0.0, &s).is_err());
        // sqrt(100) * 8^(1/4) = 16.8
        assert!(dda_bounds(17.0, 1.0, &lip, 100, 2, 0.5, &s).is_err());
        assert!(dda_sample_size(1.0, 0.05, 0.05, 10.0, 0.5, &s).is_err());
    }
}
