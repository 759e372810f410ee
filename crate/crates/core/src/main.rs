use e2enav::expert::{plan_on_inflated, ExpertConfig, ExpertPlanner};
use e2enav::sim::{run_episode, EpisodeSetup, KinematicLimits, TerminalStatus};
use e2enav::world::{generate_map, inflate, sample_free_pose, MapSpec, MapStyle};
use e2enav::SeededRng;

fn main() {
    let lookahead: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0);
    let n: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(30);
    let style = match std::env::args().nth(3).as_deref() {
        Some("maze") => MapStyle::Maze,
        Some("clutter") => MapStyle::Clutter,
        _ => MapStyle::Blocks,
    };
    for seed in [12u64, 99, 7] {
        let grid = generate_map(&MapSpec {
            width_m: 8.0,
            height_m: 8.0,
            resolution: 0.05,
            density: 0.35,
            style,
            seed,
        })
        .unwrap();
        let config = ExpertConfig {
            lookahead,
            ..Default::default()
        };
        let inflated = inflate(&grid, config.plan_radius());
        let mut rng = SeededRng::new(3);
        let mut statuses = Vec::new();
        let sample_r = config.plan_radius() + 0.04;
        let mut start = sample_free_pose(&grid, sample_r, &mut rng).unwrap();
        let t0 = std::time::Instant::now();
        while statuses.len() < n {
            let goal_pose = sample_free_pose(&grid, sample_r, &mut rng).unwrap();
            let goal = goal_pose.position();
            if plan_on_inflated(&inflated, start.position(), goal).is_err() {
                continue;
            }
            let mut expert = ExpertPlanner::new(config.clone(), KinematicLimits::default());
            let setup = EpisodeSetup::new(&grid, start, goal);
            let traj = run_episode(&mut expert, &setup);
            statuses.push(traj.status);
            start = traj.final_pose().unwrap();
        }
        let reached = statuses
            .iter()
            .filter(|s| matches!(s, TerminalStatus::Reached))
            .count();
        println!(
            "map seed {seed} ({style:?}): lookahead {lookahead}: {reached}/{n} reached in {:.1}s  {statuses:?}",
            t0.elapsed().as_secs_f64()
        );
    }
}
