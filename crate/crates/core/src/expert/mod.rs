//! The demonstration-generating expert: a grid Dijkstra global planner
//! feeding a dynamic-window local planner through a carrot point.

mod dijkstra;
mod dwa;
mod planner;

pub use dijkstra::{plan_global, plan_on_inflated, GlobalPath, PlanError};
pub use dwa::{dwa, DwaParams};
pub use planner::{ExpertConfig, ExpertPlanner};
