//! Machine-network administration benchmark.
//!
//! Each agent is a machine with a status (good / faulty / dead) and a process
//! load (idle / loaded / success). Dead neighbors in the coordination graph
//! make a machine more likely to degrade. Rebooting restores the status but
//! loses the running process; a reward of 1 arrives whenever a process
//! completes. The coordination graph is fixed by the chosen topology.
//!
//! The benchmark's originators never published the transition probabilities,
//! so they are parameters here with documented defaults; cross-implementation
//! comparisons of absolute returns are therefore qualitative.

use std::borrow::Cow;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cg::CoordinationGraph;
use crate::planner::GenerativeModel;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SysAdminError {
    #[error("invalid action index {action} for agent {agent} (valid: 0 = no-op, 1 = reboot)")]
    InvalidAction { agent: usize, action: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Good,
    Faulty,
    Dead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Load {
    Idle,
    Loaded,
    Success,
}

/// One machine's state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Machine {
    pub status: Status,
    pub load: Load,
}

pub type SysAdminState = Vec<Machine>;

/// Per-agent actions, by index: 0 = no-op, 1 = reboot.
pub const NOOP: usize = 0;
pub const REBOOT: usize = 1;
pub const N_ACTIONS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Ring,
    Star,
    /// Inner rings of equal size joined by an outer ring over their first
    /// nodes. The ring count and size are derived from `n_agents`: the
    /// smallest divisor m >= 3 with n/m >= 3 gives rings of size m.
    RingOfRings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SysAdminParams {
    pub topology: Topology,
    pub n_agents: usize,
    /// P(good -> faulty) with no dead neighbors.
    #[serde(default = "default_fail_base")]
    pub p_fail_base: f64,
    /// Added to `p_fail_base` per dead coordination-graph neighbor.
    #[serde(default = "default_coupling")]
    pub p_fail_bonus_per_dead_neighbor: f64,
    /// P(faulty -> dead) with no dead neighbors.
    #[serde(default = "default_fail_base")]
    pub p_dead_base: f64,
    #[serde(default = "default_coupling")]
    pub p_dead_bonus_per_dead_neighbor: f64,
    /// P(a new process arrives when idle).
    #[serde(default = "default_half")]
    pub p_load: f64,
    /// P(a loaded process completes this step) on a good machine.
    #[serde(default = "default_half")]
    pub p_done_good: f64,
    /// Completion probability on a faulty machine (processes run slower).
    #[serde(default = "default_done_faulty")]
    pub p_done_faulty: f64,
}

fn default_fail_base() -> f64 {
    0.05
}
fn default_coupling() -> f64 {
    0.3
}
fn default_half() -> f64 {
    0.5
}
fn default_done_faulty() -> f64 {
    0.25
}

impl SysAdminParams {
    pub fn new(topology: Topology, n_agents: usize) -> Self {
        Self {
            topology,
            n_agents,
            p_fail_base: default_fail_base(),
            p_fail_bonus_per_dead_neighbor: default_coupling(),
            p_dead_base: default_fail_base(),
            p_dead_bonus_per_dead_neighbor: default_coupling(),
            p_load: default_half(),
            p_done_good: default_half(),
            p_done_faulty: default_done_faulty(),
        }
    }

    fn validate(&self) -> Result<(), SysAdminError> {
        if self.n_agents == 0 {
            return Err(SysAdminError::InvalidParams("n_agents must be >= 1".into()));
        }
        for (name, p) in [
            ("p_fail_base", self.p_fail_base),
            (
                "p_fail_bonus_per_dead_neighbor",
                self.p_fail_bonus_per_dead_neighbor,
            ),
            ("p_dead_base", self.p_dead_base),
            (
                "p_dead_bonus_per_dead_neighbor",
                self.p_dead_bonus_per_dead_neighbor,
            ),
            ("p_load", self.p_load),
            ("p_done_good", self.p_done_good),
            ("p_done_faulty", self.p_done_faulty),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SysAdminError::InvalidParams(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        if self.topology == Topology::RingOfRings {
            ring_of_rings_shape(self.n_agents)?;
        }
        Ok(())
    }
}

/// Splits n into (rings, ring_size) for the ring-of-rings layout.
fn ring_of_rings_shape(n: usize) -> Result<(usize, usize), SysAdminError> {
    for m in 3..=n / 3 {
        if n % m == 0 && n / m >= 3 {
            return Ok((n / m, m));
        }
    }
    Err(SysAdminError::InvalidParams(format!(
        "ring_of_rings needs n = rings * ring_size with both >= 3, got n = {n}"
    )))
}

/// Builds the static coordination graph for a topology.
pub fn sysadmin_cg(params: &SysAdminParams) -> Result<CoordinationGraph, SysAdminError> {
    params.validate()?;
    let n = params.n_agents;
    let edges: Vec<(usize, usize)> = match params.topology {
        Topology::Ring => {
            if n == 1 {
                Vec::new()
            } else if n == 2 {
                vec![(0, 1)]
            } else {
                (0..n).map(|i| (i, (i + 1) % n)).collect()
            }
        }
        Topology::Star => (1..n).map(|i| (0, i)).collect(),
        Topology::RingOfRings => {
            let (rings, m) = ring_of_rings_shape(n)?;
            let mut edges = Vec::new();
            for r in 0..rings {
                let base = r * m;
                for i in 0..m {
                    edges.push((base + i, base + (i + 1) % m));
                }
            }
            // Outer ring over the first node of each inner ring.
            for r in 0..rings {
                edges.push((r * m, ((r + 1) % rings) * m));
            }
            edges
        }
    };
    CoordinationGraph::new(n, edges)
        .map_err(|e| SysAdminError::InvalidParams(format!("bad topology edges: {e}")))
}

/// The generative model: parameters plus the fixed topology graph.
#[derive(Debug, Clone)]
pub struct SysAdmin {
    params: SysAdminParams,
    graph: CoordinationGraph,
}

impl SysAdmin {
    pub fn new(params: SysAdminParams) -> Result<Self, SysAdminError> {
        let graph = sysadmin_cg(&params)?;
        Ok(Self { params, graph })
    }

    pub fn params(&self) -> &SysAdminParams {
        &self.params
    }

    pub fn graph(&self) -> &CoordinationGraph {
        &self.graph
    }
}

/// One transition. Per machine, simultaneously from the current state:
/// reboot fixes the status and drops the process; otherwise the status
/// degrades stochastically (faster per dead neighbor), a dead machine loses
/// its process, and the load advances idle -> loaded -> success with a
/// completion probability that depends on the post-transition status. The
/// per-agent reward is 1 exactly when that machine's process completes this
/// step.
pub fn sysadmin_step(
    params: &SysAdminParams,
    graph: &CoordinationGraph,
    state: &SysAdminState,
    joint_action: &[usize],
    rng: &mut dyn RngCore,
) -> Result<(SysAdminState, Vec<f64>), SysAdminError> {
    let n = state.len();
    let mut next = Vec::with_capacity(n);
    let mut rewards = vec![0.0; n];
    for (i, machine) in state.iter().enumerate() {
        let action = joint_action[i];
        if action >= N_ACTIONS {
            return Err(SysAdminError::InvalidAction { agent: i, action });
        }
        if action == REBOOT {
            next.push(Machine {
                status: Status::Good,
                load: Load::Idle,
            });
            continue;
        }
        let dead_neighbors = graph
            .neighbor_edges(i)
            .iter()
            .filter(|&&(j, _)| state[j].status == Status::Dead)
            .count() as f64;
        let status = match machine.status {
            Status::Good => {
                let p = (params.p_fail_base
                    + params.p_fail_bonus_per_dead_neighbor * dead_neighbors)
                    .min(1.0);
                if rng.gen_bool(p) {
                    Status::Faulty
                } else {
                    Status::Good
                }
            }
            Status::Faulty => {
                let p = (params.p_dead_base
                    + params.p_dead_bonus_per_dead_neighbor * dead_neighbors)
                    .min(1.0);
                if rng.gen_bool(p) {
                    Status::Dead
                } else {
                    Status::Faulty
                }
            }
            Status::Dead => Status::Dead,
        };
        let load = if status == Status::Dead {
            Load::Idle
        } else {
            match machine.load {
                // A finished process has been handed off; the slot behaves
                // like idle for the next one.
                Load::Idle | Load::Success => {
                    if rng.gen_bool(params.p_load) {
                        Load::Loaded
                    } else {
                        Load::Idle
                    }
                }
                Load::Loaded => {
                    let p_done = match status {
                        Status::Good => params.p_done_good,
                        Status::Faulty => params.p_done_faulty,
                        Status::Dead => unreachable!(),
                    };
                    if rng.gen_bool(p_done) {
                        rewards[i] = 1.0;
                        Load::Success
                    } else {
                        Load::Loaded
                    }
                }
            }
        };
        next.push(Machine { status, load });
    }
    Ok((next, rewards))
}

/// All machines start good and idle.
pub fn sysadmin_initial_state(params: &SysAdminParams) -> SysAdminState {
    vec![
        Machine {
            status: Status::Good,
            load: Load::Idle,
        };
        params.n_agents
    ]
}

impl GenerativeModel for SysAdmin {
    type State = SysAdminState;

    fn n_agents(&self) -> usize {
        self.params.n_agents
    }

    fn action_count(&self, _agent: usize, _state: &SysAdminState) -> usize {
        N_ACTIONS
    }

    fn initial_state(&self, _rng: &mut dyn RngCore) -> SysAdminState {
        sysadmin_initial_state(&self.params)
    }

    fn sample_step(
        &self,
        state: &SysAdminState,
        joint_action: &[usize],
        rng: &mut dyn RngCore,
    ) -> (SysAdminState, Vec<f64>) {
        sysadmin_step(&self.params, &self.graph, state, joint_action, rng)
            .expect("planner supplies in-range actions")
    }

    fn coordination_graph(&self, _state: &SysAdminState) -> Cow<'_, CoordinationGraph> {
        Cow::Borrowed(&self.graph)
    }

    fn is_terminal(&self, _state: &SysAdminState) -> bool {
        false
    }

    fn has_static_graph(&self) -> bool {
        true
    }

    fn discount(&self) -> f64 {
        0.9
    }

    fn local_state_key(&self, agent: usize, state: &SysAdminState) -> u64 {
        let m = &state[agent];
        (m.status as u64) * 3 + m.load as u64
    }
}
