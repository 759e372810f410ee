//! Closed-loop episode execution: sense → goal transform → policy → step,
//! with scripted obstacle events applied to a working copy of the grid.

use std::io::{BufRead, Write};
use std::path::Path;

use super::{
    relative_goal, sense, step, KinematicLimits, LaserScan, RelativeGoal, RobotState,
    SensorConfig, VelocityCommand,
};
use crate::util::rng::SeededRng;
use crate::world::{collision, OccupancyGrid, Point, Pose};

/// Everything a policy may look at for one control frame. Learned policies
/// use only `scan` and `goal`; the expert additionally reads the ground-truth
/// `state`.
pub struct Observation<'a> {
    pub scan: &'a LaserScan,
    pub goal: RelativeGoal,
    pub state: RobotState,
    pub time: f64,
}

/// A frame-by-frame steering policy.
pub trait Policy {
    fn command(&mut self, obs: &Observation) -> VelocityCommand;

    /// Called once when an episode starts, with the initial grid and the
    /// world-frame goal. Policies without global knowledge ignore it.
    fn begin_episode(&mut self, _grid: &OccupancyGrid, _goal: Point) {}

    /// Called when scenario events changed the working grid.
    fn grid_changed(&mut self, _grid: &OccupancyGrid) {}
}

/// Axis-aligned obstacle region used by scenario events.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioAction {
    pub min: Point,
    pub max: Point,
    /// true adds the obstacle (cells occupied), false removes it (cells free)
    pub add: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEvent {
    pub trigger_time: f64,
    pub action: ScenarioAction,
}

/// Episode termination thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminationConfig {
    /// goal reached when rho drops below this distance
    pub goal_epsilon: f64,
    /// timeout once t exceeds this
    pub t_max: f64,
    /// stuck when displacement over `stuck_window` stays below this
    pub stuck_displacement: f64,
    pub stuck_window: f64,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self {
            goal_epsilon: 0.2,
            t_max: 180.0,
            stuck_displacement: 0.05,
            stuck_window: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    Reached,
    Timeout,
    Collided,
    Stuck,
}

impl TerminalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Reached => "reached",
            Self::Timeout => "timeout",
            Self::Collided => "collided",
            Self::Stuck => "stuck",
        }
    }
}

impl std::str::FromStr for TerminalStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reached" => Ok(Self::Reached),
            "timeout" => Ok(Self::Timeout),
            "collided" => Ok(Self::Collided),
            "stuck" => Ok(Self::Stuck),
            other => Err(format!("unknown terminal status {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: RobotState,
    pub cmd: VelocityCommand,
}

/// Time-ordered samples of one episode plus its terminal status. The final
/// sample carries the terminal state with a stop command.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub status: TerminalStatus,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    /// Arc length from consecutive positions.
    pub fn path_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].state.pose.position().dist(w[1].state.pose.position()))
            .sum()
    }

    pub fn final_pose(&self) -> Option<Pose> {
        self.samples.last().map(|s| s.state.pose)
    }

    /// Write the episode log: `t,x,y,theta,v,omega,cmd_v,cmd_omega,status`,
    /// status only on the final row. Floats use the shortest round-trip
    /// representation so logs re-parse exactly.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "t,x,y,theta,v,omega,cmd_v,cmd_omega,status")?;
        for (i, s) in self.samples.iter().enumerate() {
            let status = if i + 1 == self.samples.len() {
                self.status.as_str()
            } else {
                ""
            };
            writeln!(
                f,
                "{},{},{},{},{},{},{},{},{}",
                s.t,
                s.state.pose.x,
                s.state.pose.y,
                s.state.pose.theta,
                s.state.v,
                s.state.omega,
                s.cmd.v,
                s.cmd.omega,
                status
            )?;
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> std::io::Result<Trajectory> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut samples = Vec::new();
        let mut status = None;
        for (i, line) in f.lines().enumerate() {
            let line = line?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let bad = || {
                std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("bad trajectory row {}: {line:?}", i + 1),
                )
            };
            if fields.len() != 9 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            samples.push(TrajectorySample {
                t: num(fields[0])?,
                state: RobotState {
                    pose: Pose::new(num(fields[1])?, num(fields[2])?, num(fields[3])?),
                    v: num(fields[4])?,
                    omega: num(fields[5])?,
                },
                cmd: VelocityCommand::new(num(fields[6])?, num(fields[7])?),
            });
            if !fields[8].is_empty() {
                status = Some(fields[8].parse().map_err(|_| bad())?);
            }
        }
        Ok(Trajectory {
            samples,
            status: status.ok_or_else(|| {
                std::io::Error::new(std::io::ErrorKind::InvalidData, "missing terminal status")
            })?,
        })
    }
}

/// Static description of one episode.
pub struct EpisodeSetup<'a> {
    pub grid: &'a OccupancyGrid,
    pub start: Pose,
    pub goal: Point,
    pub limits: KinematicLimits,
    pub sensor: SensorConfig,
    pub termination: TerminationConfig,
    pub events: &'a [ScenarioEvent],
    pub robot_radius: f64,
    /// Seed for sensor noise; unused while `sensor.noise_std == 0`.
    pub noise_seed: u64,
}

impl<'a> EpisodeSetup<'a> {
    pub fn new(grid: &'a OccupancyGrid, start: Pose, goal: Point) -> Self {
        Self {
            grid,
            start,
            goal,
            limits: KinematicLimits::default(),
            sensor: SensorConfig::default(),
            termination: TerminationConfig::default(),
            events: &[],
            robot_radius: crate::world::DEFAULT_ROBOT_RADIUS,
            noise_seed: 0,
        }
    }
}

/// Run one closed-loop episode. Deterministic given the setup, the policy,
/// and the noise seed.
pub fn run_episode(policy: &mut dyn Policy, setup: &EpisodeSetup) -> Trajectory {
    let dt = setup.limits.dt;
    let mut work: Option<OccupancyGrid> = None;
    let mut applied = vec![false; setup.events.len()];
    let mut noise_rng = SeededRng::new(setup.noise_seed);

    let mut state = RobotState::at_rest(setup.start);
    let mut samples: Vec<TrajectorySample> = Vec::new();
    let mut positions = vec![setup.start.position()];
    let stuck_steps = (setup.termination.stuck_window / dt).round() as usize;

    policy.begin_episode(setup.grid, setup.goal);

    let mut tick = 0usize;
    let status = loop {
        let t = tick as f64 * dt;

        // apply due events to a working copy
        let mut changed = false;
        for (i, ev) in setup.events.iter().enumerate() {
            if !applied[i] && ev.trigger_time <= t {
                let g = work.get_or_insert_with(|| setup.grid.clone());
                g.fill_region(ev.action.min, ev.action.max, ev.action.add);
                applied[i] = true;
                changed = true;
            }
        }
        let grid = work.as_ref().unwrap_or(setup.grid);
        if changed {
            policy.grid_changed(grid);
        }

        let goal_rel = relative_goal(&state.pose, setup.goal);
        if goal_rel.rho < setup.termination.goal_epsilon {
            break TerminalStatus::Reached;
        }
        if t > setup.termination.t_max {
            break TerminalStatus::Timeout;
        }

        let rng = (setup.sensor.noise_std > 0.0).then_some(&mut noise_rng);
        let scan = sense(grid, &state.pose, &setup.sensor, rng);
        let cmd = policy.command(&Observation {
            scan: &scan,
            goal: goal_rel,
            state,
            time: t,
        });
        samples.push(TrajectorySample { t, state, cmd });

        state = step(&state, &cmd, &setup.limits);
        tick += 1;
        positions.push(state.pose.position());

        if collision(grid, &state.pose, setup.robot_radius) {
            break TerminalStatus::Collided;
        }
        if tick >= stuck_steps
            && positions[tick].dist(positions[tick - stuck_steps])
                < setup.termination.stuck_displacement
        {
            break TerminalStatus::Stuck;
        }
    };

    samples.push(TrajectorySample {
        t: tick as f64 * dt,
        state,
        cmd: VelocityCommand::STOP,
    });
    Trajectory { samples, status }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ConstPolicy(VelocityCommand);
    impl Policy for ConstPolicy {
        fn command(&mut self, _obs: &Observation) -> VelocityCommand {
            self.0
        }
    }

    fn open_grid() -> OccupancyGrid {
        let mut g = OccupancyGrid::empty(100, 100, 0.1, Point::new(0.0, 0.0));
        for i in 0..100 {
            g.set(i, 0, true);
            g.set(i, 99, true);
            g.set(0, i, true);
            g.set(99, i, true);
        }
        g
    }

    #[test]
    fn zero_policy_times_out_in_place() {
        let g = open_grid();
        let mut setup = EpisodeSetup::new(&g, Pose::new(5.0, 5.0, 0.0), Point::new(8.0, 5.0));
        // stuck detection off so the timeout path is exercised
        setup.termination.stuck_displacement = 0.0;
        setup.termination.t_max = 3.0;
        let traj = run_episode(&mut ConstPolicy(VelocityCommand::STOP), &setup);
        assert_eq!(traj.status, TerminalStatus::Timeout);
        let last = traj.samples.last().unwrap();
        assert_eq!(last.state.pose.x, 5.0);
        assert_eq!(last.state.pose.y, 5.0);
        assert!(last.t > 3.0);
    }

    #[test]
    fn goal_within_epsilon_reached_immediately() {
        let g = open_grid();
        let setup = EpisodeSetup::new(&g, Pose::new(5.0, 5.0, 0.0), Point::new(5.1, 5.0));
        let mut policy = ConstPolicy(VelocityCommand::new(0.5, 0.0));
        let traj = run_episode(&mut policy, &setup);
        assert_eq!(traj.status, TerminalStatus::Reached);
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.samples[0].t, 0.0);
    }

    #[test]
    fn forward_policy_reaches_goal_ahead() {
        let g = open_grid();
        let setup = EpisodeSetup::new(&g, Pose::new(3.0, 5.0, 0.0), Point::new(6.0, 5.0));
        let traj = run_episode(&mut ConstPolicy(VelocityCommand::new(0.5, 0.0)), &setup);
        assert_eq!(traj.status, TerminalStatus::Reached);
        assert!(traj.path_length() > 2.5 && traj.path_length() < 3.0);
        // timestamps strictly increasing by dt
        for w in traj.samples.windows(2) {
            assert!((w[1].t - w[0].t - 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn driving_into_wall_collides() {
        let g = open_grid();
        let mut setup = EpisodeSetup::new(&g, Pose::new(8.0, 5.0, 0.0), Point::new(9.99, 5.0));
        setup.termination.goal_epsilon = 0.01;
        let traj = run_episode(&mut ConstPolicy(VelocityCommand::new(0.5, 0.0)), &setup);
        assert_eq!(traj.status, TerminalStatus::Collided);
    }

    #[test]
    fn slow_creep_detected_as_stuck() {
        let g = open_grid();
        let mut setup = EpisodeSetup::new(&g, Pose::new(5.0, 5.0, 0.0), Point::new(8.0, 5.0));
        setup.limits.v_max = 0.001; // can never cover 0.05 m in 10 s
        let traj = run_episode(&mut ConstPolicy(VelocityCommand::new(0.001, 0.0)), &setup);
        assert_eq!(traj.status, TerminalStatus::Stuck);
    }

    #[test]
    fn episode_is_deterministic() {
        let g = open_grid();
        let setup = EpisodeSetup::new(&g, Pose::new(3.0, 3.0, 0.3), Point::new(7.0, 6.0));
        let t1 = run_episode(&mut ConstPolicy(VelocityCommand::new(0.4, 0.1)), &setup);
        let t2 = run_episode(&mut ConstPolicy(VelocityCommand::new(0.4, 0.1)), &setup);
        assert_eq!(t1, t2);
    }

    #[test]
    fn remove_event_matches_grid_without_region() {
        // obstacle block placed in the grid, then removed by an event at t=0
        let mut g = open_grid();
        g.fill_region(Point::new(6.0, 4.0), Point::new(6.5, 6.0), true);
        let events = [ScenarioEvent {
            trigger_time: 0.0,
            action: ScenarioAction {
                min: Point::new(6.0, 4.0),
                max: Point::new(6.5, 6.0),
                add: false,
            },
        }];

        struct Probe {
            scan_at_t0: Option<LaserScan>,
        }
        impl Policy for Probe {
            fn command(&mut self, obs: &Observation) -> VelocityCommand {
                if obs.time == 0.0 {
                    self.scan_at_t0 = Some(obs.scan.clone());
                }
                VelocityCommand::STOP
            }
        }

        let mut setup = EpisodeSetup::new(&g, Pose::new(3.0, 5.0, 0.0), Point::new(9.0, 5.0));
        setup.termination.t_max = 0.05;
        setup.termination.stuck_displacement = 0.0;
        setup.events = &events;
        let mut probe = Probe { scan_at_t0: None };
        run_episode(&mut probe, &setup);

        let clean = open_grid();
        let expected = sense(
            &clean,
            &Pose::new(3.0, 5.0, 0.0),
            &SensorConfig::default(),
            None,
        );
        assert_eq!(probe.scan_at_t0.unwrap(), expected);
    }

    #[test]
    fn add_event_applies_at_trigger_time() {
        let g = open_grid();
        let events = [ScenarioEvent {
            trigger_time: 0.25,
            action: ScenarioAction {
                min: Point::new(5.5, 4.5),
                max: Point::new(6.0, 5.5),
                add: true,
            },
        }];
        struct Probe {
            front: Vec<(f64, f64)>,
        }
        impl Policy for Probe {
            fn command(&mut self, obs: &Observation) -> VelocityCommand {
                self.front.push((obs.time, obs.scan.ranges[540]));
                VelocityCommand::STOP
            }
        }
        let mut setup = EpisodeSetup::new(&g, Pose::new(3.0, 5.0, 0.0), Point::new(9.0, 5.0));
        setup.termination.t_max = 0.6;
        setup.termination.stuck_displacement = 0.0;
        setup.events = &events;
        let mut probe = Probe { front: Vec::new() };
        run_episode(&mut probe, &setup);
        // wall at x=9.9 before the event, block face at x=5.5 afterwards
        for (t, r) in probe.front {
            if t < 0.25 {
                assert!((r - 6.9).abs() < 1e-9, "t={t} r={r}");
            } else {
                assert!((r - 2.5).abs() < 1e-9, "t={t} r={r}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = open_grid();
        let setup = EpisodeSetup::new(&g, Pose::new(3.0, 5.0, 0.2), Point::new(6.0, 5.5));
        let traj = run_episode(&mut ConstPolicy(VelocityCommand::new(0.5, 0.05)), &setup);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("ep.csv");
        traj.write_csv(&p).unwrap();
        let back = Trajectory::read_csv(&p).unwrap();
        assert_eq!(traj, back);
    }
}
