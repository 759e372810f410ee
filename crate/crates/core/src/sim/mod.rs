//! Differential-drive simulation: exact unicycle kinematics, laser sensing,
//! robot-centric goal transforms, and closed-loop episode execution with
//! scripted scenario events.

mod episode;
mod kinematics;
mod sensor;

pub use episode::{
    run_episode, EpisodeSetup, Observation, Policy, ScenarioAction, ScenarioEvent, TerminalStatus,
    TerminationConfig, Trajectory, TrajectorySample,
};
pub use kinematics::{step, KinematicLimits, RobotState, VelocityCommand};
pub use sensor::{relative_goal, sense, LaserScan, RelativeGoal, SensorConfig};
