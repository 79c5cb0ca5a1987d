//! Comparison policies: naive joint-action MCTS, tabular independent
//! Q-learning, and a uniform-random policy.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::planner::{GenerativeModel, PlannerConfig};

#[derive(Debug, Error, PartialEq)]
pub enum BaselineError {
    #[error("joint-action table exceeded the memory guard: {entries} entries > cap {cap}")]
    MemoryGuardExceeded { entries: usize, cap: usize },
    #[error("cannot plan from a terminal state")]
    TerminalState,
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
}

/// Unfactored per-state UCT statistics: one dense table over the whole joint
/// action space per visited state. The exponential table growth is the point
/// of the baseline; `cap` bounds the total allocated entries and planning
/// aborts cleanly when a new state would exceed it.
#[derive(Debug, Clone)]
pub struct JointActionTreeStats<S> {
    nodes: HashMap<S, JointNode>,
    total_entries: usize,
    cap: usize,
}

#[derive(Debug, Clone)]
struct JointNode {
    visits: u64,
    counts: Vec<u64>,
    means: Vec<f64>,
}

impl<S: Eq + Hash + Clone> JointActionTreeStats<S> {
    pub fn new(cap: usize) -> Self {
        Self {
            nodes: HashMap::new(),
            total_entries: 0,
            cap,
        }
    }

    pub fn total_entries(&self) -> usize {
        self.total_entries
    }

    pub fn n_states(&self) -> usize {
        self.nodes.len()
    }

    fn lookup_or_init(
        &mut self,
        state: &S,
        table_len: usize,
    ) -> Result<&mut JointNode, BaselineError> {
        if !self.nodes.contains_key(state) {
            let entries = self.total_entries + table_len;
            if entries > self.cap {
                return Err(BaselineError::MemoryGuardExceeded {
                    entries,
                    cap: self.cap,
                });
            }
            self.total_entries = entries;
            self.nodes.insert(
                state.clone(),
                JointNode {
                    visits: 0,
                    counts: vec![0; table_len],
                    means: vec![0.0; table_len],
                },
            );
        }
        Ok(self.nodes.get_mut(state).expect("just inserted"))
    }
}

/// Result of one naive planning call.
#[derive(Debug, Clone, PartialEq)]
pub struct NaivePlan {
    pub joint_action: Vec<usize>,
    /// Joint-action table entries allocated across visited states.
    pub table_entries: usize,
    pub simulations: u64,
}

/// Mixed-radix decode of a flat joint-action index.
fn decode_joint(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, dim) in out.iter_mut().zip(dims).rev() {
        *slot = flat % dim;
        flat /= dim;
    }
    out
}

fn encode_joint(dims: &[usize], joint: &[usize]) -> usize {
    let mut idx = 0;
    for (a, dim) in joint.iter().zip(dims) {
        idx = idx * dim + a;
    }
    idx
}

/// Standard UCT over the joint action space: selection by mean plus
/// `c * sqrt(ln N(s) / N(s, a))` with unvisited joint actions forced first,
/// the same simulate skeleton as the factored planner, and a final greedy
/// pick. The backend field of `cfg` is ignored.
pub fn naive_mcts_plan<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    cfg: &PlannerConfig,
    cap: usize,
    rng: &mut dyn RngCore,
) -> Result<NaivePlan, BaselineError> {
    cfg.validate()
        .map_err(|e| BaselineError::InvalidConfig(e.to_string()))?;
    if model.is_terminal(state) {
        return Err(BaselineError::TerminalState);
    }
    let mut store = JointActionTreeStats::new(cap);
    let start = Instant::now();
    let mut sims = 0;
    loop {
        if let Some(n) = cfg.iterations {
            if sims >= n {
                break;
            }
        }
        if let Some(t) = cfg.time_budget {
            if start.elapsed() >= t {
                break;
            }
        }
        simulate_joint(model, state, cfg.depth, cfg, &mut store, rng)?;
        sims += 1;
    }

    let dims: Vec<usize> = (0..model.n_agents())
        .map(|i| model.action_count(i, state))
        .collect();
    let table_len = dims.iter().product::<usize>().max(1);
    let node = store.lookup_or_init(state, table_len)?;
    let mut best = 0;
    let mut best_q = f64::NEG_INFINITY;
    for (flat, &q) in node.means.iter().enumerate() {
        if q > best_q {
            best_q = q;
            best = flat;
        }
    }
    Ok(NaivePlan {
        joint_action: decode_joint(&dims, best),
        table_entries: store.total_entries(),
        simulations: sims,
    })
}

fn simulate_joint<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    depth: u32,
    cfg: &PlannerConfig,
    store: &mut JointActionTreeStats<M::State>,
    rng: &mut dyn RngCore,
) -> Result<f64, BaselineError> {
    if depth == 0 || model.is_terminal(state) {
        return Ok(0.0);
    }
    let dims: Vec<usize> = (0..model.n_agents())
        .map(|i| model.action_count(i, state))
        .collect();
    let table_len = dims.iter().product::<usize>().max(1);
    let node = store.lookup_or_init(state, table_len)?;

    let log_n = ((node.visits + 1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for flat in 0..table_len {
        let score = if node.counts[flat] == 0 {
            f64::INFINITY
        } else {
            node.means[flat] + cfg.exploration * (log_n / node.counts[flat] as f64).sqrt()
        };
        if score > best_score {
            best_score = score;
            best = flat;
        }
    }
    let joint = decode_joint(&dims, best);

    let (next, rewards) = model.sample_step(state, &joint, rng);
    let child = simulate_joint(model, &next, depth - 1, cfg, store, rng)?;
    let q = rewards.iter().sum::<f64>() + cfg.discount * child;

    let node = store
        .nodes
        .get_mut(state)
        .expect("node created before recursion");
    node.visits += 1;
    let flat = encode_joint(&dims, &joint);
    node.counts[flat] += 1;
    let n = node.counts[flat] as f64;
    node.means[flat] += (q - node.means[flat]) / n;
    Ok(q)
}

/// Hyperparameters for tabular independent Q-learning.
#[derive(Debug, Clone, PartialEq)]
pub struct IqlConfig {
    pub alpha: f64,
    /// Initial exploration rate, decayed linearly to zero over training.
    pub epsilon: f64,
    pub episodes: u32,
    pub max_steps: u32,
    pub discount: f64,
    pub seed: u64,
}

impl Default for IqlConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            epsilon: 0.1,
            episodes: 10_000,
            max_steps: 50,
            discount: 0.95,
            seed: 0,
        }
    }
}

/// Per-agent Q tables keyed by each agent's local-state key.
#[derive(Debug, Clone, Default)]
pub struct IqlTables {
    tables: Vec<HashMap<u64, Vec<f64>>>,
}

impl IqlTables {
    pub fn n_agents(&self) -> usize {
        self.tables.len()
    }

    /// Total Q entries across all agents.
    pub fn total_entries(&self) -> usize {
        self.tables
            .iter()
            .map(|t| t.values().map(|v| v.len()).sum::<usize>())
            .sum()
    }

    fn q(&self, agent: usize, key: u64) -> &[f64] {
        static EMPTY: [f64; 0] = [];
        match self.tables[agent].get(&key) {
            Some(v) => v,
            None => &EMPTY,
        }
    }
}

fn greedy(q: &[f64], n_actions: usize) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for a in 0..n_actions {
        let v = q.get(a).copied().unwrap_or(0.0);
        if v > best_v {
            best_v = v;
            best = a;
        }
    }
    best
}

/// Trains per-agent tabular Q-learning on each agent's individual reward,
/// keyed by that agent's local state, with epsilon-greedy behavior decayed
/// linearly over episodes. Each agent only ever writes its own table.
pub fn iql_train<M: GenerativeModel>(model: &M, cfg: &IqlConfig) -> IqlTables {
    let n = model.n_agents();
    let mut tables = IqlTables {
        tables: vec![HashMap::new(); n],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for episode in 0..cfg.episodes {
        let eps = cfg.epsilon * (1.0 - episode as f64 / cfg.episodes.max(1) as f64);
        let mut state = model.initial_state(&mut rng);
        for _ in 0..cfg.max_steps {
            if model.is_terminal(&state) {
                break;
            }
            let keys: Vec<u64> = (0..n).map(|i| model.local_state_key(i, &state)).collect();
            let joint: Vec<usize> = (0..n)
                .map(|i| {
                    let n_actions = model.action_count(i, &state);
                    if rng.gen_bool(eps.clamp(0.0, 1.0)) {
                        rng.gen_range(0..n_actions)
                    } else {
                        greedy(tables.q(i, keys[i]), n_actions)
                    }
                })
                .collect();
            let (next, rewards) = model.sample_step(&state, &joint, &mut rng);
            for i in 0..n {
                let next_key = model.local_state_key(i, &next);
                let next_actions = model.action_count(i, &next);
                let next_best = {
                    let q = tables.q(i, next_key);
                    (0..next_actions)
                        .map(|a| q.get(a).copied().unwrap_or(0.0))
                        .fold(0.0f64, f64::max)
                };
                let target = rewards[i]
                    + if model.is_terminal(&next) {
                        0.0
                    } else {
                        cfg.discount * next_best
                    };
                let n_actions = model.action_count(i, &state);
                let q = tables.tables[i]
                    .entry(keys[i])
                    .or_insert_with(|| vec![0.0; n_actions]);
                q[joint[i]] += cfg.alpha * (target - q[joint[i]]);
            }
            state = next;
        }
    }
    tables
}

/// Greedy per-agent actions from trained tables (unseen local states fall
/// back to action 0).
pub fn iql_act<M: GenerativeModel>(
    tables: &IqlTables,
    model: &M,
    state: &M::State,
) -> Vec<usize> {
    (0..model.n_agents())
        .map(|i| {
            let key = model.local_state_key(i, state);
            let n_actions = model.action_count(i, state);
            greedy(tables.q(i, key), n_actions)
        })
        .collect()
}

/// Uniform independent sample from each agent's action set.
pub fn random_policy<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    rng: &mut dyn RngCore,
) -> Vec<usize> {
    (0..model.n_agents())
        .map(|i| rng.gen_range(0..model.action_count(i, state)))
        .collect()
}
