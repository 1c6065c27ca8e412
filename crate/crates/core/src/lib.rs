//! Constant-stretch motion planning for robot swarms on grids.

pub mod grid;
mod par;
pub mod rotatesort;

pub use grid::{
    apply_schedule, max_distance, stretch, validate_step, Configuration, GridDims, Instance, Move,
    Pos, RobotId, Schedule, Step,
};
pub mod tiling;
mod world;
pub mod partition;
pub mod realization;
pub mod scheduler;
pub mod generate;
pub mod colored;
mod matching;
pub mod oracle;
pub mod continuous;
pub mod sat;
pub mod io;
