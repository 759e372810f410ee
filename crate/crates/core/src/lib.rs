//! End-to-end motion planning workbench.
//!
//! An expert planner (grid Dijkstra + dynamic window approach) generates
//! demonstrations in simulated 2D worlds, a 1D-convolutional residual network
//! learns the mapping from laser scans and a relative goal to velocity
//! commands, and an evaluation harness compares learned and expert navigation
//! frame-by-frame and trajectory-by-trajectory.

pub mod expert;
pub mod sim;
pub mod util;
pub mod world;

pub use util::rng::SeededRng;
