//! Benchmark drivers: instance generation, the i.i.d. noise benchmark,
//! `(β, γ)` landscapes, decode trajectories and report output.

pub mod bench;
pub mod instance;
pub mod landscape;
pub mod report;
pub mod trajectory;

pub use bench::{bench_iid, IidBenchConfig};
pub use instance::{gen_instance, logical_energy, ProblemInstance, GROUND_STATE_MAX_K};
pub use landscape::{
    cells_to_report, default_betas, default_gammas, efficiency_ratio, landscape, landscape_cells,
    Arm, ArmEstimate, CellResult, EfficiencyEstimate, LandscapeConfig, Strategy,
};
pub use report::{config_hash, wilson_interval, BenchmarkReport, ReportRow};
pub use trajectory::{trajectory_demo, DecodeRow, Trajectory, TrajectorySource};
