//! Randomized stochastic gradient training with its step schedules, stopping
//! rules, closed-form bounds and run selection.

mod bounds;
mod lipschitz;
mod run;
mod schedule;
mod select;
mod stopping;

pub(crate) use bounds::check_sample_args;
pub use bounds::{
    convergence_bound, d_bar, expected_gradient_bound, expected_gradient_bound_curve, fold_count,
    ideal_d, sample_size, SampleSizeReport,
};
pub use lipschitz::{estimate_lipschitz, LipschitzConfig, LipschitzEstimate};
pub use run::{rsg_run, rsg_run_from, run_folds, Monitor, RsgConfig, RsgRun, StoppingRule};
pub(crate) use schedule::optimal_step_for_params;
pub use schedule::{optimal_constant_step, validate_schedule, ScheduleReport, StepSchedule};
pub use select::{multi_fold_select, FoldSelection};
pub use stopping::{make_stopping_distribution, StoppingDistribution};
