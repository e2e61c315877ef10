//! Distributed training of a DA as a set of sub-DAs over subsets of the
//! visible units, coordinated through a central parameter store.

mod bounds;
mod plan;
mod run;
mod speedup;
mod store;

pub use bounds::{dda_bounds, dda_sample_size, DistributedBounds, DistributedSampleSize};
pub use plan::{
    block_size, min_subda_count, plan_subdas, subda_corruption, Feasibility, PlanMode, SubDAPlan,
};
pub use run::{
    run_distributed, DistributedConfig, DistributedRun, Execution, SubDARecord, TrailingMonitor,
};
pub use speedup::{measure_speedup, SpeedupPoint};
pub use store::{Lease, ParameterStore};
