//! Experiment procedures: initial conditions, refinement studies, reference
//! caching, and per-step benchmarks.

pub mod bench;
pub mod cache;
pub mod ic;
pub mod refinement;

pub use bench::{bench_per_step, BenchResult, BenchVariant};
pub use cache::ReferenceCache;
pub use ic::{ic_eight_circles, ic_random, ic_sinesine, InitialCondition};
pub use refinement::{
    estimate_order, march, spatial_refinement, temporal_refinement, RefinementResult, StudySetup,
};
