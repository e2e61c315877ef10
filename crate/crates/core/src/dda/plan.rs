use rand::seq::{index, SliceRandom};

use crate::da::NetworkShape;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// How visible units are assigned to sub-DAs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    /// Shuffle the units and cut them into consecutive blocks.
    Disjoint,
    /// Draw `B` independent subsets, which may overlap.
    WithReplacement,
}

/// How strictly `1 − ζ < τ < 1` is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    /// Violations are errors.
    Strict,
    /// Allows `τ = 1` (then `q = ζ`) and clamps `q` at 0 when `τ ≤ 1 − ζ`.
    Relaxed,
}

/// Corruption a sub-DA over a fraction `τ` of the units needs so that the
/// whole network sees corruption `ζ`: `q = 1 − (1 − ζ)/τ`.
pub fn subda_corruption(zeta: f64, tau: f64) -> Result<f64> {
    check_zeta(zeta)?;
    if !(tau < 1.0) {
        return Err(Error::Infeasible(format!("tau < 1 violated: tau = {tau}")));
    }
    if !(1.0 - zeta < tau) {
        return Err(Error::Infeasible(format!(
            "1 - zeta < tau violated: 1 - zeta = {}, tau = {tau}",
            1.0 - zeta
        )));
    }
    Ok(1.0 - (1.0 - zeta) / tau)
}

fn relaxed_corruption(zeta: f64, tau: f64) -> Result<f64> {
    check_zeta(zeta)?;
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::Infeasible(format!("tau = {tau} outside (0, 1]")));
    }
    if tau == 1.0 {
        return Ok(zeta);
    }
    Ok((1.0 - (1.0 - zeta) / tau).max(0.0))
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::Domain(format!("zeta = {zeta} outside [0, 1]")));
    }
    Ok(())
}

/// Smallest `B` with `(1 − τ)^B < φ`: `⌊log φ / log(1 − τ)⌋ + 1`.
pub fn min_subda_count(tau: f64, phi: f64) -> Result<usize> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau = {tau} outside (0, 1)")));
    }
    check_phi(phi)?;
    Ok((phi.ln() / (1.0 - tau).ln()).floor() as usize + 1)
}

fn check_phi(phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < 1.0) {
        return Err(Error::Domain(format!("phi = {phi} outside (0, 1)")));
    }
    Ok(())
}

/// `⌈τ d⌉`, ignoring rounding noise in the product.
pub fn block_size(tau: f64, units: usize) -> usize {
    ((tau * units as f64 - 1e-9).ceil().max(1.0) as usize).min(units)
}

/// The decomposition of a network into sub-DAs for every meta-iteration.
///
/// Subsets hold data-unit indices in ascending order. The bias unit, when the
/// network has one, belongs to every sub-DA and is not listed.
#[derive(Debug, Clone, PartialEq)]
pub struct SubDAPlan {
    pub tau: f64,
    pub zeta: f64,
    pub q: f64,
    pub phi: f64,
    pub mode: PlanMode,
    pub feasibility: Feasibility,
    /// Units per sub-DA, not counting the bias.
    pub block_size: usize,
    pub data_units: usize,
    pub bias: bool,
    rounds: Vec<Vec<Vec<usize>>>,
}

impl SubDAPlan {
    /// Sub-DAs per meta-iteration.
    pub fn count(&self) -> usize {
        self.rounds[0].len()
    }

    pub fn meta_iterations(&self) -> usize {
        self.rounds.len()
    }

    /// Subsets of the first meta-iteration.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.rounds[0]
    }

    /// Subsets of meta-iteration `m` (0-based).
    pub fn round(&self, m: usize) -> &[Vec<usize>] {
        &self.rounds[m]
    }

    pub fn is_disjoint(&self) -> bool {
        self.rounds.iter().all(|round| {
            let mut seen = vec![false; self.data_units];
            round
                .iter()
                .flatten()
                .all(|&j| !std::mem::replace(&mut seen[j], true))
        })
    }

    /// Visible columns of the full network used by a subset, bias last.
    pub fn columns(&self, subset: &[usize]) -> Vec<usize> {
        let mut cols = subset.to_vec();
        if self.bias {
            cols.push(self.data_units);
        }
        cols
    }

    /// Shape of the sub-DA over `subset`.
    pub fn sub_shape(&self, subset: &[usize], hidden: usize) -> Result<NetworkShape> {
        NetworkShape::new(subset.len() + usize::from(self.bias), hidden, self.bias)
    }
}

/// Decompose `shape` into sub-DAs, drawing fresh subsets for each of `meta`
/// meta-iterations.
#[allow(clippy::too_many_arguments)]
pub fn plan_subdas(
    shape: &NetworkShape,
    zeta: f64,
    tau: f64,
    phi: f64,
    mode: PlanMode,
    feasibility: Feasibility,
    meta: usize,
    rng: &mut Stream,
) -> Result<SubDAPlan> {
    let q = match feasibility {
        Feasibility::Strict => subda_corruption(zeta, tau)?,
        Feasibility::Relaxed => relaxed_corruption(zeta, tau)?,
    };
    check_phi(phi)?;
    if meta == 0 {
        return Err(Error::Domain("need at least one meta-iteration".into()));
    }
    let units = shape.corruptible();
    if units == 0 {
        return Err(Error::Dimension(
            "network has no data units to split".into(),
        ));
    }
    let size = block_size(tau, units);
    let count = match mode {
        PlanMode::Disjoint => units.div_ceil(size),
        PlanMode::WithReplacement if tau >= 1.0 => 1,
        PlanMode::WithReplacement => min_subda_count(tau, phi)?,
    };
    let base = Stream::new(rng.next_word());
    let rounds = (0..meta)
        .map(|m| {
            let mut s = base.derive(m as u64);
            match mode {
                PlanMode::Disjoint => {
                    let mut perm: Vec<usize> = (0..units).collect();
                    perm.shuffle(&mut s);
                    perm.chunks(size)
                        .map(|c| {
                            let mut c = c.to_vec();
                            c.sort_unstable();
                            c
                        })
                        .collect()
                }
                PlanMode::WithReplacement => (0..count)
                    .map(|_| {
                        let mut c = index::sample(&mut s, units, size).into_vec();
                        c.sort_unstable();
                        c
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(SubDAPlan {
        tau,
        zeta,
        q,
        phi,
        mode,
        feasibility,
        block_size: size,
        data_units: units,
        bias: shape.bias,
        rounds,
    })
}
