//! Multi-drone delivery on a grid.
//!
//! Drones start at distinct random cells and must each reach an assigned
//! circular goal region (one per grid quadrant) and board there. Boarding
//! pays 1000; collisions, crowding, and lost boarding races cost. Movement is
//! 8-connected with optional direction noise. The coordination graph is
//! state-dependent: drones are coupled when close together or when they share
//! a goal region, and boarded drones drop out of the graph entirely.
//!
//! Grid geometry follows a documented convention: a resolution r maps to a
//! square grid of side 2 * round(1/r); goal regions sit at the quadrant
//! centers with radius max(1, side/8) and capacity equal to their cell count.

use std::borrow::Cow;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cg::CoordinationGraph;
use crate::planner::GenerativeModel;

#[derive(Debug, Error, PartialEq)]
pub enum DroneError {
    #[error("invalid action index {action} for drone {agent} (valid: 0..=9)")]
    InvalidAction { agent: usize, action: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Per-drone actions, by index: eight grid moves counterclockwise from east,
/// then stay, then board.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DroneAction {
    East,
    NorthEast,
    North,
    NorthWest,
    West,
    SouthWest,
    South,
    SouthEast,
    Stay,
    Board,
}

pub const N_DRONE_ACTIONS: usize = 10;
pub const STAY: usize = 8;
pub const BOARD: usize = 9;

/// Move deltas for action indices 0..8, matching [`DroneAction`] order.
pub const MOVE_DELTAS: [(i32, i32); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

impl DroneAction {
    pub fn from_index(index: usize) -> Option<Self> {
        use DroneAction::*;
        [
            East, NorthEast, North, NorthWest, West, SouthWest, South, SouthEast, Stay, Board,
        ]
        .get(index)
        .copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Drone {
    pub x: i32,
    pub y: i32,
    pub boarded: bool,
}

/// Joint state: drone poses plus the episode's goal-region assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DroneState {
    pub drones: Vec<Drone>,
    /// Region index (0..4) assigned to each drone for this episode.
    pub goals: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoalRegion {
    pub center: (i32, i32),
    pub radius: i32,
    pub capacity: usize,
}

impl GoalRegion {
    #[inline]
    pub fn contains(&self, x: i32, y: i32) -> bool {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Serializable parameters. Resolution, noise, and the proximity threshold
/// default from the agent count when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneParams {
    pub n_agents: usize,
    /// Cell width on the unit square; grid side = 2 * round(1 / resolution).
    #[serde(default)]
    pub resolution: Option<f64>,
    /// Probability a move deviates to an adjacent direction.
    #[serde(default)]
    pub noise: Option<f64>,
    /// Chebyshev distance (cells) under which drones are coupled and crowded.
    #[serde(default)]
    pub proximity_threshold: Option<i32>,
    #[serde(default = "default_goal_reward")]
    pub goal_reward: f64,
    #[serde(default = "default_collision_penalty")]
    pub collision_penalty: f64,
    #[serde(default = "default_move_cost")]
    pub move_cost: f64,
    /// Reward per unit of Euclidean distance gained toward the goal center.
    #[serde(default = "default_shaping")]
    pub shaping_coeff: f64,
    #[serde(default = "default_unit")]
    pub proximity_penalty: f64,
    /// Penalty for off-grid moves and boarding attempts outside the region.
    #[serde(default = "default_unit")]
    pub invalid_penalty: f64,
}

fn default_goal_reward() -> f64 {
    1000.0
}
fn default_collision_penalty() -> f64 {
    10.0
}
fn default_move_cost() -> f64 {
    0.1
}
fn default_shaping() -> f64 {
    1.0
}
fn default_unit() -> f64 {
    1.0
}

/// Benchmark rows: (agents, resolution, noise). Other agent counts use the
/// nearest row.
const SIZE_TABLE: [(usize, f64, f64); 4] = [
    (8, 0.20, 0.10),
    (16, 0.10, 0.05),
    (32, 0.08, 0.05),
    (48, 0.05, 0.02),
];

fn table_row(n: usize) -> (f64, f64) {
    let mut best = SIZE_TABLE[0];
    for row in SIZE_TABLE {
        if (row.0 as i64 - n as i64).abs() < (best.0 as i64 - n as i64).abs() {
            best = row;
        }
    }
    (best.1, best.2)
}

impl DroneParams {
    pub fn for_agents(n_agents: usize) -> Self {
        Self {
            n_agents,
            resolution: None,
            noise: None,
            proximity_threshold: None,
            goal_reward: default_goal_reward(),
            collision_penalty: default_collision_penalty(),
            move_cost: default_move_cost(),
            shaping_coeff: default_shaping(),
            proximity_penalty: default_unit(),
            invalid_penalty: default_unit(),
        }
    }
}

/// Resolved drone model: grid geometry, regions, noise, penalties.
#[derive(Debug, Clone, PartialEq)]
pub struct DroneModel {
    params: DroneParams,
    side: i32,
    resolution: f64,
    noise: f64,
    threshold: i32,
    regions: [GoalRegion; 4],
    used_regions: usize,
}

impl DroneModel {
    pub fn new(params: DroneParams) -> Result<Self, DroneError> {
        let n = params.n_agents;
        if n < 2 {
            return Err(DroneError::InvalidParams(
                "need at least 2 drones (regions require two assignees)".into(),
            ));
        }
        let (default_res, default_noise) = table_row(n);
        let resolution = params.resolution.unwrap_or(default_res);
        if !(resolution > 0.0 && resolution <= 1.0) {
            return Err(DroneError::InvalidParams(format!(
                "resolution must be in (0, 1], got {resolution}"
            )));
        }
        let noise = params.noise.unwrap_or(default_noise);
        if !(0.0..=1.0).contains(&noise) {
            return Err(DroneError::InvalidParams(format!(
                "noise must be in [0, 1], got {noise}"
            )));
        }
        let side = 2 * (1.0 / resolution).round() as i32;
        let radius = (side / 8).max(1);
        let lo = side / 4;
        let hi = side - 1 - side / 4;
        if hi - lo <= 2 * radius {
            return Err(DroneError::InvalidParams(format!(
                "grid side {side} too small for non-overlapping goal regions"
            )));
        }
        let capacity = region_cell_count(radius);
        let regions = [
            GoalRegion {
                center: (lo, lo),
                radius,
                capacity,
            },
            GoalRegion {
                center: (hi, lo),
                radius,
                capacity,
            },
            GoalRegion {
                center: (lo, hi),
                radius,
                capacity,
            },
            GoalRegion {
                center: (hi, hi),
                radius,
                capacity,
            },
        ];
        let threshold = params
            .proximity_threshold
            .unwrap_or_else(|| ((2.0 * 0.20 / resolution).round() as i32).max(1));
        if threshold < 1 {
            return Err(DroneError::InvalidParams(
                "proximity_threshold must be >= 1".into(),
            ));
        }
        let used_regions = (n / 2).min(4);
        // Every drone must fit outside the regions, and each used region's
        // share must fit its capacity.
        let free_cells = (side * side) as usize - 4 * capacity;
        if free_cells < n {
            return Err(DroneError::InvalidParams(format!(
                "{n} drones cannot start on {free_cells} free cells"
            )));
        }
        if n.div_ceil(used_regions) > capacity {
            return Err(DroneError::InvalidParams(
                "region capacity too small for the assignment".into(),
            ));
        }
        Ok(Self {
            params,
            side,
            resolution,
            noise,
            threshold,
            regions,
            used_regions,
        })
    }

    pub fn params(&self) -> &DroneParams {
        &self.params
    }

    pub fn side(&self) -> i32 {
        self.side
    }

    pub fn regions(&self) -> &[GoalRegion; 4] {
        &self.regions
    }

    pub fn proximity_threshold(&self) -> i32 {
        self.threshold
    }

    fn in_any_region(&self, x: i32, y: i32) -> bool {
        self.regions.iter().any(|r| r.contains(x, y))
    }
}

fn region_cell_count(radius: i32) -> usize {
    let mut count = 0;
    for dx in -radius..=radius {
        for dy in -radius..=radius {
            if dx * dx + dy * dy <= radius * radius {
                count += 1;
            }
        }
    }
    count
}

#[inline]
fn chebyshev(a: (i32, i32), b: (i32, i32)) -> i32 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[inline]
fn euclid(a: (i32, i32), b: (i32, i32)) -> f64 {
    let (dx, dy) = ((a.0 - b.0) as f64, (a.1 - b.1) as f64);
    (dx * dx + dy * dy).sqrt()
}

/// State-dependent coordination graph: un-boarded drones are coupled when
/// within the proximity threshold (Chebyshev) or assigned to the same goal
/// region; boarded drones have no edges.
pub fn drone_cg(model: &DroneModel, state: &DroneState) -> CoordinationGraph {
    let n = state.drones.len();
    let mut edges = Vec::new();
    for i in 0..n {
        if state.drones[i].boarded {
            continue;
        }
        for j in (i + 1)..n {
            if state.drones[j].boarded {
                continue;
            }
            let close = chebyshev(
                (state.drones[i].x, state.drones[i].y),
                (state.drones[j].x, state.drones[j].y),
            ) <= model.threshold;
            if close || state.goals[i] == state.goals[j] {
                edges.push((i, j));
            }
        }
    }
    CoordinationGraph::new(n, edges).expect("generated edges are valid")
}

/// Distinct uniform start cells outside every goal region; goals assigned at
/// random with two drones per used region before spreading the rest.
pub fn drone_initial_state(model: &DroneModel, rng: &mut dyn RngCore) -> DroneState {
    let n = model.params.n_agents;
    let mut occupied = std::collections::HashSet::new();
    let mut drones = Vec::with_capacity(n);
    while drones.len() < n {
        let x = rng.gen_range(0..model.side);
        let y = rng.gen_range(0..model.side);
        if model.in_any_region(x, y) || !occupied.insert((x, y)) {
            continue;
        }
        drones.push(Drone {
            x,
            y,
            boarded: false,
        });
    }

    let used = model.used_regions;
    let mut order: Vec<usize> = (0..n).collect();
    // Fisher-Yates with the episode rng keeps assignment reproducible.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut goals = vec![0u8; n];
    for (slot, &drone) in order.iter().enumerate() {
        goals[drone] = if slot < 2 * used {
            (slot % used) as u8
        } else {
            rng.gen_range(0..used) as u8
        };
    }
    DroneState { drones, goals }
}

/// One transition:
/// moves resolve simultaneously (noise may rotate a move to an adjacent
/// direction; off-grid moves stay in place with a penalty), any cell claimed
/// by more than one drone bounces all claimants back with a collision
/// penalty, then boarding resolves per region (lowest index wins a
/// simultaneous race, the rest pay the collision penalty; boarding outside
/// the assigned region acts as stay plus a penalty). Rewards add goal
/// boarding, movement cost, approach shaping toward the goal center, and a
/// crowding penalty per close pair. Boarded drones are out of play.
pub fn drone_step(
    model: &DroneModel,
    state: &DroneState,
    joint_action: &[usize],
    rng: &mut dyn RngCore,
) -> Result<(DroneState, Vec<f64>), DroneError> {
    let n = state.drones.len();
    let p = &model.params;
    let mut rewards = vec![0.0; n];
    let mut targets: Vec<(i32, i32)> = Vec::with_capacity(n);
    let mut board_request = vec![false; n];

    for (i, drone) in state.drones.iter().enumerate() {
        let action = joint_action[i];
        if action >= N_DRONE_ACTIONS {
            return Err(DroneError::InvalidAction { agent: i, action });
        }
        let pos = (drone.x, drone.y);
        if drone.boarded {
            targets.push(pos);
            continue;
        }
        match action {
            STAY => targets.push(pos),
            BOARD => {
                board_request[i] = true;
                targets.push(pos);
            }
            dir => {
                rewards[i] -= p.move_cost;
                let dir = if model.noise > 0.0 && rng.gen_bool(model.noise) {
                    // Deviate one step clockwise or counterclockwise.
                    let spin: i32 = if rng.gen_bool(0.5) { 1 } else { -1 };
                    (dir as i32 + spin).rem_euclid(8) as usize
                } else {
                    dir
                };
                let (dx, dy) = MOVE_DELTAS[dir];
                let target = (pos.0 + dx, pos.1 + dy);
                if target.0 < 0 || target.0 >= model.side || target.1 < 0 || target.1 >= model.side
                {
                    rewards[i] -= p.invalid_penalty;
                    targets.push(pos);
                } else {
                    targets.push(target);
                }
            }
        }
    }

    // Bounce every drone whose claimed cell is contested, repeatedly: a
    // bounced drone reoccupies its origin, which can invalidate someone
    // else's move into that cell.
    let mut finals = targets.clone();
    let mut collided = vec![false; n];
    loop {
        let mut contested = false;
        for i in 0..n {
            if state.drones[i].boarded {
                continue;
            }
            for j in (i + 1)..n {
                if state.drones[j].boarded || finals[i] != finals[j] {
                    continue;
                }
                for k in [i, j] {
                    if !collided[k] {
                        collided[k] = true;
                        rewards[k] -= p.collision_penalty;
                    }
                    let back = (state.drones[k].x, state.drones[k].y);
                    if finals[k] != back {
                        finals[k] = back;
                        contested = true;
                    }
                }
            }
        }
        if !contested {
            break;
        }
    }

    let mut next_drones: Vec<Drone> = state
        .drones
        .iter()
        .zip(&finals)
        .map(|(d, &(x, y))| Drone {
            x,
            y,
            boarded: d.boarded,
        })
        .collect();

    // Boarding, resolved per region: lowest index wins a simultaneous race.
    for region_idx in 0..4 {
        let region = &model.regions[region_idx];
        let already = next_drones
            .iter()
            .zip(&state.goals)
            .filter(|(d, &g)| d.boarded && g as usize == region_idx)
            .count();
        let mut winner_found = false;
        for i in 0..n {
            if !board_request[i] || state.goals[i] as usize != region_idx {
                continue;
            }
            let d = next_drones[i];
            let valid = region.contains(d.x, d.y) && already < region.capacity;
            if !valid {
                rewards[i] -= p.invalid_penalty;
            } else if !winner_found {
                winner_found = true;
                rewards[i] += p.goal_reward;
                next_drones[i].boarded = true;
            } else {
                rewards[i] -= p.collision_penalty;
            }
        }
    }

    // Approach shaping toward the assigned goal center, on realized motion.
    for i in 0..n {
        if state.drones[i].boarded {
            continue;
        }
        let center = model.regions[state.goals[i] as usize].center;
        let before = euclid((state.drones[i].x, state.drones[i].y), center);
        let after = euclid((next_drones[i].x, next_drones[i].y), center);
        rewards[i] += p.shaping_coeff * (before - after);
    }

    // Crowding penalty per close un-boarded pair.
    for i in 0..n {
        if next_drones[i].boarded {
            continue;
        }
        for j in (i + 1)..n {
            if next_drones[j].boarded {
                continue;
            }
            let dist = chebyshev(
                (next_drones[i].x, next_drones[i].y),
                (next_drones[j].x, next_drones[j].y),
            );
            if dist <= model.threshold {
                rewards[i] -= p.proximity_penalty;
                rewards[j] -= p.proximity_penalty;
            }
        }
    }

    Ok((
        DroneState {
            drones: next_drones,
            goals: state.goals.clone(),
        },
        rewards,
    ))
}

impl GenerativeModel for DroneModel {
    type State = DroneState;

    fn n_agents(&self) -> usize {
        self.params.n_agents
    }

    fn action_count(&self, _agent: usize, _state: &DroneState) -> usize {
        N_DRONE_ACTIONS
    }

    fn initial_state(&self, rng: &mut dyn RngCore) -> DroneState {
        drone_initial_state(self, rng)
    }

    fn sample_step(
        &self,
        state: &DroneState,
        joint_action: &[usize],
        rng: &mut dyn RngCore,
    ) -> (DroneState, Vec<f64>) {
        drone_step(self, state, joint_action, rng).expect("planner supplies in-range actions")
    }

    fn coordination_graph(&self, state: &DroneState) -> Cow<'_, CoordinationGraph> {
        Cow::Owned(drone_cg(self, state))
    }

    fn is_terminal(&self, state: &DroneState) -> bool {
        state.drones.iter().all(|d| d.boarded)
    }

    fn has_static_graph(&self) -> bool {
        false
    }

    fn discount(&self) -> f64 {
        1.0
    }

    fn local_state_key(&self, agent: usize, state: &DroneState) -> u64 {
        let d = &state.drones[agent];
        let side = self.side as u64;
        let cell = d.x as u64 + side * d.y as u64;
        let goal = state.goals[agent] as u64;
        cell + side * side * (goal + 4 * u64::from(d.boarded))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model_with(n: usize, f: impl FnOnce(&mut DroneParams)) -> DroneModel {
        let mut params = DroneParams::for_agents(n);
        f(&mut params);
        DroneModel::new(params).unwrap()
    }

    fn two_drone_state(model: &DroneModel, a: (i32, i32), b: (i32, i32)) -> DroneState {
        assert!(!model.in_any_region(a.0, a.1));
        assert!(!model.in_any_region(b.0, b.1));
        DroneState {
            drones: vec![
                Drone {
                    x: a.0,
                    y: a.1,
                    boarded: false,
                },
                Drone {
                    x: b.0,
                    y: b.1,
                    boarded: false,
                },
            ],
            goals: vec![0, 1],
        }
    }

    #[test]
    fn geometry_for_eight_agents() {
        let m = model_with(8, |_| {});
        assert_eq!(m.side(), 10);
        assert_eq!(m.proximity_threshold(), 2);
        assert_eq!(m.regions()[0].center, (2, 2));
        assert_eq!(m.regions()[3].center, (7, 7));
        assert_eq!(m.regions()[0].radius, 1);
        assert_eq!(m.regions()[0].capacity, 5);
    }

    #[test]
    fn deterministic_move_east() {
        let m = model_with(2, |p| p.noise = Some(0.0));
        let s = two_drone_state(&m, (4, 4), (9, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, _) = drone_step(&m, &s, &[0, STAY], &mut rng).unwrap();
        assert_eq!((next.drones[0].x, next.drones[0].y), (5, 4));
        assert_eq!((next.drones[1].x, next.drones[1].y), (9, 9));
    }

    #[test]
    fn off_grid_move_stays_with_penalty() {
        let m = model_with(2, |p| p.noise = Some(0.0));
        let s = two_drone_state(&m, (9, 4), (0, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[0, STAY], &mut rng).unwrap();
        assert_eq!((next.drones[0].x, next.drones[0].y), (9, 4));
        // move cost + invalid penalty; no motion so no shaping
        assert!((r[0] - (-m.params().move_cost - m.params().invalid_penalty)).abs() < 1e-12);
    }

    #[test]
    fn same_cell_claim_bounces_both_with_penalty() {
        let m = model_with(2, |p| {
            p.noise = Some(0.0);
            p.proximity_threshold = Some(1);
        });
        // (4,0) moving east and (6,0) moving west both claim (5,0).
        let s = two_drone_state(&m, (4, 0), (6, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[0, 4], &mut rng).unwrap();
        assert_eq!((next.drones[0].x, next.drones[0].y), (4, 0));
        assert_eq!((next.drones[1].x, next.drones[1].y), (6, 0));
        for ri in r {
            assert!((ri - (-m.params().move_cost - m.params().collision_penalty)).abs() < 1e-12);
        }
    }

    #[test]
    fn mover_bounces_off_stationary_drone() {
        let m = model_with(2, |p| {
            p.noise = Some(0.0);
            p.proximity_threshold = Some(1);
        });
        let s = two_drone_state(&m, (4, 0), (5, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[0, STAY], &mut rng).unwrap();
        assert_eq!((next.drones[0].x, next.drones[0].y), (4, 0));
        assert_eq!((next.drones[1].x, next.drones[1].y), (5, 0));
        // Both participants of the contested cell take the penalty; they also
        // end adjacent, inside the threshold.
        assert!(r[0] <= -m.params().collision_penalty);
        assert!(r[1] <= -m.params().collision_penalty);
    }

    #[test]
    fn board_inside_region_pays_and_terminates() {
        let m = model_with(2, |p| p.noise = Some(0.0));
        let mut s = two_drone_state(&m, (4, 4), (9, 9));
        // Put drone 0 at its goal-0 center (2,2); mark drone 1 boarded.
        s.drones[0] = Drone {
            x: 2,
            y: 2,
            boarded: false,
        };
        s.drones[1].boarded = true;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[BOARD, STAY], &mut rng).unwrap();
        assert_eq!(r[0], m.params().goal_reward);
        assert!(next.drones[0].boarded);
        assert!(m.is_terminal(&next));
    }

    #[test]
    fn board_outside_region_is_stay_with_penalty() {
        let m = model_with(2, |p| p.noise = Some(0.0));
        let s = two_drone_state(&m, (5, 5), (9, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[BOARD, STAY], &mut rng).unwrap();
        assert!(!next.drones[0].boarded);
        assert_eq!(r[0], -m.params().invalid_penalty);
    }

    #[test]
    fn simultaneous_board_lowest_index_wins() {
        let m = model_with(2, |p| {
            p.noise = Some(0.0);
            p.proximity_threshold = Some(1);
        });
        let s = DroneState {
            drones: vec![
                Drone {
                    x: 2,
                    y: 2,
                    boarded: false,
                },
                Drone {
                    x: 2,
                    y: 3,
                    boarded: false,
                },
            ],
            goals: vec![0, 0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (next, r) = drone_step(&m, &s, &[BOARD, BOARD], &mut rng).unwrap();
        assert!(next.drones[0].boarded);
        assert!(!next.drones[1].boarded);
        assert_eq!(r[0], m.params().goal_reward);
        assert_eq!(r[1], -m.params().collision_penalty);
    }

    #[test]
    fn approach_shaping_rewards_getting_closer() {
        let m = model_with(2, |p| {
            p.noise = Some(0.0);
            p.proximity_threshold = Some(1);
        });
        // Drone 0 at (5,2) heading to goal 0 centered (2,2): west reduces
        // distance by exactly 1.
        let s = two_drone_state(&m, (5, 2), (9, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, r) = drone_step(&m, &s, &[4, STAY], &mut rng).unwrap();
        let expected = m.params().shaping_coeff - m.params().move_cost;
        assert!((r[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn cg_uses_distance_and_shared_goals() {
        let m = model_with(2, |p| p.noise = Some(0.0));
        // Far apart, distinct goals: no edge.
        let s = two_drone_state(&m, (0, 5), (9, 9));
        assert_eq!(drone_cg(&m, &s).n_edges(), 0);
        // Far apart, same goal: coupled.
        let mut same_goal = s.clone();
        same_goal.goals = vec![1, 1];
        assert_eq!(drone_cg(&m, &same_goal).edges(), &[(0, 1)]);
        // Close pair: coupled regardless of goals.
        let close = two_drone_state(&m, (4, 5), (5, 5));
        assert_eq!(drone_cg(&m, &close).edges(), &[(0, 1)]);
        // Boarded drones drop all edges.
        let mut boarded = same_goal.clone();
        boarded.drones[0].boarded = true;
        assert_eq!(drone_cg(&m, &boarded).n_edges(), 0);
    }

    #[test]
    fn initial_state_is_distinct_spread_outside_regions() {
        let m = model_with(8, |_| {});
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = drone_initial_state(&m, &mut rng);
            let mut cells = std::collections::HashSet::new();
            for d in &s.drones {
                assert!(cells.insert((d.x, d.y)), "start cells must be distinct");
                assert!(!m.in_any_region(d.x, d.y));
                assert!(!d.boarded);
            }
            let mut per_region = [0u32; 4];
            for &g in &s.goals {
                per_region[g as usize] += 1;
            }
            for count in per_region {
                assert!(
                    count >= 2,
                    "every region needs two assignees: {per_region:?}"
                );
            }
        }
    }

    #[test]
    fn small_team_uses_fewer_regions() {
        let m = model_with(4, |_| {});
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = drone_initial_state(&m, &mut rng);
        let mut per_region = [0u32; 4];
        for &g in &s.goals {
            per_region[g as usize] += 1;
        }
        assert_eq!(per_region[0], 2);
        assert_eq!(per_region[1], 2);
        assert_eq!(per_region[2] + per_region[3], 0);
    }

    #[test]
    fn uniqueness_invariant_survives_random_trajectories() {
        let m = model_with(8, |_| {});
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut state = drone_initial_state(&m, &mut rng);
        for _ in 0..300 {
            let actions: Vec<usize> = (0..8).map(|_| rng.gen_range(0..N_DRONE_ACTIONS)).collect();
            let (next, r) = drone_step(&m, &state, &actions, &mut rng).unwrap();
            let mut cells = std::collections::HashSet::new();
            for d in next.drones.iter().filter(|d| !d.boarded) {
                assert!(
                    cells.insert((d.x, d.y)),
                    "two un-boarded drones share a cell"
                );
            }
            for &ri in &r {
                assert!(ri <= m.params().goal_reward);
            }
            state = next;
        }
    }

    #[test]
    fn mean_degree_of_initial_graphs_is_moderate() {
        let m = model_with(8, |_| {});
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let samples = 200;
        let mut total_degree = 0.0;
        for _ in 0..samples {
            let s = drone_initial_state(&m, &mut rng);
            let g = drone_cg(&m, &s);
            total_degree += 2.0 * g.n_edges() as f64 / 8.0;
        }
        let mean = total_degree / samples as f64;
        assert!(
            (mean - 2.4).abs() <= 1.0,
            "mean initial degree {mean} outside 2.4 +/- 1.0"
        );
    }

    #[test]
    fn invalid_action_index_is_rejected() {
        let m = model_with(2, |_| {});
        let s = two_drone_state(&m, (4, 4), (9, 9));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = drone_step(&m, &s, &[11, STAY], &mut rng).unwrap_err();
        assert_eq!(
            err,
            DroneError::InvalidAction {
                agent: 0,
                action: 11
            }
        );
    }
}
