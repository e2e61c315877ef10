//! Resolved run settings. Defaults are overridden by a flat `key=value` file,
//! which is in turn overridden by command-line flags.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rsgda_core::dda::PlanMode;
use rsgda_core::objective::OracleMode;
use rsgda_core::rsg::StepSchedule;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    Optimal,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    Exact,
    MonteCarlo,
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Instances in the synthetic dataset.
    pub n: usize,
    /// Data dimensions, not counting the bias unit.
    pub dv: usize,
    pub dh: usize,
    pub bias: bool,
    pub zeta: f64,
    pub rho: f64,
    pub seed: u64,
    /// Number of consecutive seeds starting at `seed`.
    pub seeds: usize,
    pub idx: Option<PathBuf>,
    pub iterations: usize,
    pub schedule: ScheduleKind,
    pub gamma: f64,
    pub d: f64,
    pub p: f64,
    pub window: usize,
    pub draws: usize,
    pub oracle: OracleChoice,
    pub n_values: Vec<usize>,
    /// Values of the schedule's free parameter (`gamma` or `D`), one series each.
    pub step_values: Vec<f64>,
    pub dv_values: Vec<usize>,
    pub dh_values: Vec<usize>,
    pub b_values: Vec<usize>,
    pub b: Option<usize>,
    pub tau: Option<f64>,
    pub phi: f64,
    pub mode: PlanMode,
    pub workers: usize,
    pub meta: usize,
    pub warm_start: usize,
    pub repeats: usize,
    pub splits: usize,
    pub test_fraction: f64,
    pub timing: bool,
    pub folds: usize,
    pub out: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            n: 2000,
            dv: 64,
            dh: 16,
            bias: true,
            zeta: 0.3,
            rho: 0.2,
            seed: 1,
            seeds: 1,
            idx: None,
            iterations: 10_000,
            schedule: ScheduleKind::Optimal,
            gamma: 0.01,
            d: 1.0,
            p: 0.75,
            window: 100,
            draws: 2000,
            oracle: OracleChoice::MonteCarlo,
            n_values: vec![1000, 10_000, 20_000],
            step_values: Vec::new(),
            dv_values: vec![16, 32, 64],
            dh_values: vec![4, 8],
            b_values: vec![1, 2, 4],
            b: None,
            tau: None,
            phi: 0.01,
            mode: PlanMode::Disjoint,
            workers: 1,
            meta: 1,
            warm_start: 200,
            repeats: 3,
            splits: 10,
            test_fraction: 0.2,
            timing: true,
            folds: 1,
            out: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| HarnessError::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join<T: Display>(v: &[T]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl Settings {
    /// Set one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        // an empty value clears an optional key
        if value.trim().is_empty() {
            match key {
                "idx" => self.idx = None,
                "B" => self.b = None,
                "tau" => self.tau = None,
                "out" => self.out = None,
                _ => {}
            }
            if matches!(key, "idx" | "B" | "tau" | "out") {
                return Ok(());
            }
        }
        match key {
            "n" => self.n = parse(key, value)?,
            "dv" => self.dv = parse(key, value)?,
            "dh" => self.dh = parse(key, value)?,
            "bias" => self.bias = parse(key, value)?,
            "zeta" => self.zeta = parse(key, value)?,
            "rho" => self.rho = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            "idx" => self.idx = Some(PathBuf::from(value.trim())),
            "N" => self.iterations = parse(key, value)?,
            "schedule" => {
                self.schedule = match value.trim() {
                    "constant" => ScheduleKind::Constant,
                    "optimal" => ScheduleKind::Optimal,
                    "poly" => ScheduleKind::Poly,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "schedule: expected constant, optimal or poly, got {other:?}"
                        )))
                    }
                }
            }
            "gamma" => self.gamma = parse(key, value)?,
            "D" => self.d = parse(key, value)?,
            "p" => self.p = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "draws" => self.draws = parse(key, value)?,
            "oracle" => {
                self.oracle = match value.trim() {
                    "exact" => OracleChoice::Exact,
                    "mc" => OracleChoice::MonteCarlo,
                    "auto" => OracleChoice::Auto,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "oracle: expected exact, mc or auto, got {other:?}"
                        )))
                    }
                }
            }
            "N_values" => self.n_values = parse_list(key, value)?,
            "step_values" => self.step_values = parse_list(key, value)?,
            "dv_values" => self.dv_values = parse_list(key, value)?,
            "dh_values" => self.dh_values = parse_list(key, value)?,
            "B_values" => self.b_values = parse_list(key, value)?,
            "B" => self.b = Some(parse(key, value)?),
            "tau" => self.tau = Some(parse(key, value)?),
            "phi" => self.phi = parse(key, value)?,
            "mode" => {
                self.mode = match value.trim() {
                    "disjoint" => PlanMode::Disjoint,
                    "replacement" => PlanMode::WithReplacement,
                    other => {
                        return Err(HarnessError::Config(format!(
                            "mode: expected disjoint or replacement, got {other:?}"
                        )))
                    }
                }
            }
            "workers" => self.workers = parse(key, value)?,
            "meta" => self.meta = parse(key, value)?,
            "warm_start" => self.warm_start = parse(key, value)?,
            "repeats" => self.repeats = parse(key, value)?,
            "splits" => self.splits = parse(key, value)?,
            "test_fraction" => self.test_fraction = parse(key, value)?,
            "timing" => self.timing = parse(key, value)?,
            "folds" => self.folds = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            other => return Err(HarnessError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Apply a flat `key=value` file. Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::io(path.display().to_string(), e))?;
        self.apply_text(&text)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Every key with its resolved value, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            ("n", self.n.to_string()),
            ("dv", self.dv.to_string()),
            ("dh", self.dh.to_string()),
            ("bias", self.bias.to_string()),
            ("zeta", self.zeta.to_string()),
            ("rho", self.rho.to_string()),
            ("seed", self.seed.to_string()),
            ("seeds", self.seeds.to_string()),
            (
                "idx",
                opt(self.idx.as_ref().map(|p| p.display().to_string())),
            ),
            ("N", self.iterations.to_string()),
            (
                "schedule",
                match self.schedule {
                    ScheduleKind::Constant => "constant",
                    ScheduleKind::Optimal => "optimal",
                    ScheduleKind::Poly => "poly",
                }
                .into(),
            ),
            ("gamma", self.gamma.to_string()),
            ("D", self.d.to_string()),
            ("p", self.p.to_string()),
            ("window", self.window.to_string()),
            ("draws", self.draws.to_string()),
            (
                "oracle",
                match self.oracle {
                    OracleChoice::Exact => "exact",
                    OracleChoice::MonteCarlo => "mc",
                    OracleChoice::Auto => "auto",
                }
                .into(),
            ),
            ("N_values", join(&self.n_values)),
            ("step_values", join(&self.step_values)),
            ("dv_values", join(&self.dv_values)),
            ("dh_values", join(&self.dh_values)),
            ("B_values", join(&self.b_values)),
            ("B", opt(self.b.map(|b| b.to_string()))),
            ("tau", opt(self.tau.map(|t| t.to_string()))),
            ("phi", self.phi.to_string()),
            (
                "mode",
                match self.mode {
                    PlanMode::Disjoint => "disjoint",
                    PlanMode::WithReplacement => "replacement",
                }
                .into(),
            ),
            ("workers", self.workers.to_string()),
            ("meta", self.meta.to_string()),
            ("warm_start", self.warm_start.to_string()),
            ("repeats", self.repeats.to_string()),
            ("splits", self.splits.to_string()),
            ("test_fraction", self.test_fraction.to_string()),
            ("timing", self.timing.to_string()),
            ("folds", self.folds.to_string()),
        ]
    }

    /// The manifest text: one `key=value` line per setting.
    pub fn manifest(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }

    /// The configured schedule for a run of `iterations` steps, with the free
    /// parameter replaced by `value` when given.
    pub fn schedule_for(&self, iterations: usize, value: Option<f64>) -> StepSchedule {
        match self.schedule {
            ScheduleKind::Constant => StepSchedule::Constant(value.unwrap_or(self.gamma)),
            ScheduleKind::Optimal => StepSchedule::ConstantOptimal {
                d: value.unwrap_or(self.d),
                iterations,
            },
            ScheduleKind::Poly => StepSchedule::Polynomial {
                gamma1: value.unwrap_or(self.gamma),
                exponent: self.p,
            },
        }
    }

    /// Label and values of the schedule's free parameter for sweeps.
    pub fn step_series(&self) -> (&'static str, Vec<f64>) {
        let (name, default) = match self.schedule {
            ScheduleKind::Optimal => ("D", self.d),
            ScheduleKind::Constant | ScheduleKind::Poly => ("gamma", self.gamma),
        };
        if self.step_values.is_empty() {
            (name, vec![default])
        } else {
            (name, self.step_values.clone())
        }
    }

    pub fn oracle_mode(&self) -> OracleMode {
        match self.oracle {
            OracleChoice::Exact => OracleMode::Exact,
            OracleChoice::MonteCarlo => OracleMode::MonteCarlo { draws: self.draws },
            OracleChoice::Auto => OracleMode::Auto { draws: self.draws },
        }
    }

    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds.max(1) as u64)
            .map(|i| self.seed + i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut s = Settings::default();
        s.apply_text("# comment\nzeta = 0.5\nN_values=10,20\n\nschedule=poly\n")
            .unwrap();
        s.set("zeta", "0.1").unwrap();
        assert_eq!(s.zeta, 0.1);
        assert_eq!(s.n_values, vec![10, 20]);
        assert_eq!(s.schedule, ScheduleKind::Poly);
    }

    #[test]
    fn unknown_and_malformed_keys() {
        let mut s = Settings::default();
        assert!(matches!(
            s.set("zetta", "0.1"),
            Err(HarnessError::Config(_))
        ));
        assert!(s.apply_text("dv 12").is_err());
        assert!(s.set("dv", "twelve").is_err());
        assert!(s.set("mode", "random").is_err());
    }

    #[test]
    fn manifest_round_trips() {
        let mut s = Settings::default();
        s.set("tau", "0.25").unwrap();
        s.set("step_values", "0.5,1,2").unwrap();
        let mut t = Settings::default();
        for (k, v) in s.entries() {
            if !v.is_empty() {
                t.set(k, &v).unwrap();
            }
        }
        assert_eq!(s, t);
    }
}
