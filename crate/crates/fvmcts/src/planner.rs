//! The factored-value tree-search driver: a budgeted simulate loop that
//! descends with discounting, updates the factored statistics on the way back
//! up, and answers with an exploration-free coordination call.
//!
//! The coordination backend is pluggable: max-plus message passing (works
//! with state-dependent graphs) or exact variable elimination (static graphs
//! only). There is no rollout below the depth cutoff and no explicit
//! expansion phase; statistics are created lazily on first visit.

use std::borrow::Cow;
use std::fmt::Debug;
use std::hash::Hash;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cg::{CoordinationGraph, EliminationOrder, VarElComponents};
use crate::maxplus::{max_plus, MaxPlusConfig, MaxPlusError};
use crate::stats::{MaxPlusStateStats, StatsError, StatsStore, VarElStateStats};
use crate::varel::{var_el_select, VarElError};

/// Discount threshold below which the variable-elimination simulate cuts off
/// (only when the discount is strictly below 1).
const VAREL_CUTOFF_EPS: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("cannot plan from a terminal state")]
    TerminalState,
    #[error("variable elimination requires a static coordination graph; this model's graph is state-dependent")]
    DynamicGraphWithVarEl,
    #[error("store layout does not match the configured backend")]
    StoreBackendMismatch,
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    MaxPlus(#[from] MaxPlusError),
    #[error(transparent)]
    VarEl(#[from] VarElError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// The simulator contract: sample transitions and per-agent rewards, expose
/// the per-state coordination graph and per-agent action spaces.
///
/// Actions are indices into the model's ordered per-agent action lists; a
/// joint action is one index per agent. `sample_step` must be reproducible
/// from the rng stream and may panic on malformed joint actions (callers stay
/// within `action_count`).
pub trait GenerativeModel {
    type State: Clone + Eq + Hash + Debug;

    fn n_agents(&self) -> usize;

    /// Number of actions available to `agent` in `state` (the ordered action
    /// list is domain-specific; indices address it).
    fn action_count(&self, agent: usize, state: &Self::State) -> usize;

    fn initial_state(&self, rng: &mut dyn RngCore) -> Self::State;

    /// Samples `(next_state, per-agent rewards)`.
    fn sample_step(
        &self,
        state: &Self::State,
        joint_action: &[usize],
        rng: &mut dyn RngCore,
    ) -> (Self::State, Vec<f64>);

    fn coordination_graph(&self, state: &Self::State) -> Cow<'_, CoordinationGraph>;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Whether `coordination_graph` is the same for every state. Variable
    /// elimination refuses models where this is false.
    fn has_static_graph(&self) -> bool;

    /// The domain's natural discount factor.
    fn discount(&self) -> f64;

    /// Compact key of `agent`'s local view of `state`, for per-agent tabular
    /// baselines.
    fn local_state_key(&self, agent: usize, state: &Self::State) -> u64;
}

/// Coordination backend choice.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    MaxPlus(MaxPlusConfig),
    VarEl,
}

/// Search budget, depth, exploration, and backend for one planning call.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Simulation budget; at most this many simulate calls run.
    pub iterations: Option<u64>,
    /// Wall-clock budget, checked before each simulate call.
    pub time_budget: Option<Duration>,
    /// Search depth in steps (>= 1).
    pub depth: u32,
    /// UCB exploration constant used during the simulate loop.
    pub exploration: f64,
    /// Discount factor in [0, 1].
    pub discount: f64,
    pub backend: Backend,
    /// Seed for the internal rng of [`plan`].
    pub seed: u64,
    /// Uniform-random rollout below the depth cutoff (off by default; the
    /// cutoff returns zero as the search was designed).
    pub rollout: bool,
}

impl PlannerConfig {
    pub fn new(backend: Backend) -> Self {
        Self {
            iterations: Some(1000),
            time_budget: None,
            depth: 10,
            exploration: 1.0,
            discount: 0.95,
            backend,
            seed: 0,
            rollout: false,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        if self.depth == 0 {
            return Err(PlanError::InvalidConfig("depth must be >= 1".into()));
        }
        match (self.iterations, self.time_budget) {
            (None, None) => Err(PlanError::InvalidConfig(
                "need an iteration or wall-clock budget".into(),
            )),
            (Some(0), None) => Err(PlanError::InvalidConfig(
                "iteration budget must be >= 1".into(),
            )),
            _ => Ok(()),
        }?;
        if !(0.0..=1.0).contains(&self.discount) {
            return Err(PlanError::InvalidConfig(
                "discount must be in [0, 1]".into(),
            ));
        }
        if !self.exploration.is_finite() || self.exploration < 0.0 {
            return Err(PlanError::InvalidConfig(
                "exploration constant must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Backend-matched statistics store for one search.
#[derive(Debug, Clone)]
pub enum SearchStore<S> {
    MaxPlus(StatsStore<S, MaxPlusStateStats>),
    VarEl(StatsStore<S, VarElStateStats>),
}

impl<S: Eq + Hash + Clone + Debug> SearchStore<S> {
    pub fn for_backend(backend: &Backend) -> Self {
        match backend {
            Backend::MaxPlus(_) => SearchStore::MaxPlus(StatsStore::new()),
            Backend::VarEl => SearchStore::VarEl(StatsStore::new()),
        }
    }

    pub fn n_states(&self) -> usize {
        match self {
            SearchStore::MaxPlus(s) => s.n_states(),
            SearchStore::VarEl(s) => s.n_states(),
        }
    }

    /// Total scalar statistic slots across all states.
    pub fn total_entries(&self) -> usize {
        match self {
            SearchStore::MaxPlus(s) => s.total_entries(),
            SearchStore::VarEl(s) => s.total_entries(),
        }
    }

    /// Largest per-state slot count.
    pub fn max_state_entries(&self) -> usize {
        match self {
            SearchStore::MaxPlus(s) => s.max_state_entries(),
            SearchStore::VarEl(s) => s.max_state_entries(),
        }
    }
}

/// Plans one joint action with an internal rng seeded from the config.
pub fn plan<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    cfg: &PlannerConfig,
    store: &mut SearchStore<M::State>,
) -> Result<Vec<usize>, PlanError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    plan_with_rng(model, state, cfg, store, &mut rng)
}

/// Plans one joint action: runs simulate until the budget is exhausted, then
/// answers with the backend's coordination call at exploration constant 0.
///
/// Anytime: a valid joint action comes back after any number of completed
/// simulations, including zero (all-zero statistics tie-break toward action
/// index 0).
pub fn plan_with_rng<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    cfg: &PlannerConfig,
    store: &mut SearchStore<M::State>,
    rng: &mut dyn RngCore,
) -> Result<Vec<usize>, PlanError> {
    cfg.validate()?;
    if model.is_terminal(state) {
        return Err(PlanError::TerminalState);
    }
    if matches!(cfg.backend, Backend::VarEl) && !model.has_static_graph() {
        return Err(PlanError::DynamicGraphWithVarEl);
    }

    let start = Instant::now();
    let budget_left = |sims: u64| -> bool {
        if let Some(n) = cfg.iterations {
            if sims >= n {
                return false;
            }
        }
        if let Some(t) = cfg.time_budget {
            if start.elapsed() >= t {
                return false;
            }
        }
        true
    };

    match (&cfg.backend, store) {
        (Backend::MaxPlus(mp_cfg), SearchStore::MaxPlus(store)) => {
            let mut sims = 0;
            while budget_left(sims) {
                simulate_maxplus(model, state, cfg.depth, cfg, mp_cfg, store, rng)?;
                sims += 1;
            }
            // Final coordination carries no exploration bonus.
            let graph = model.coordination_graph(state);
            let counts = action_counts(model, state);
            let entry = store.lookup_or_init(state, || MaxPlusStateStats::init(&graph, &counts));
            Ok(max_plus(&graph, entry, mp_cfg, 0.0)?)
        }
        (Backend::VarEl, SearchStore::VarEl(store)) => {
            let graph = model.coordination_graph(state).into_owned();
            let components = graph.varel_components();
            let order = graph.elimination_order();
            let mut sims = 0;
            while budget_left(sims) {
                simulate_varel(
                    model, state, cfg.depth, cfg, &graph, &components, &order, store, rng,
                )?;
                sims += 1;
            }
            let counts = action_counts(model, state);
            let entry =
                store.lookup_or_init(state, || VarElStateStats::init(&components, &counts));
            Ok(var_el_select(&graph, entry, &order, 0.0)?)
        }
        _ => Err(PlanError::StoreBackendMismatch),
    }
}

fn action_counts<M: GenerativeModel>(model: &M, state: &M::State) -> Vec<usize> {
    (0..model.n_agents())
        .map(|i| model.action_count(i, state))
        .collect()
}

/// One recursive simulation for the message-passing backend: returns the
/// per-agent discounted return vector and updates node/edge statistics for
/// every state along the path.
pub fn simulate_maxplus<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    depth: u32,
    cfg: &PlannerConfig,
    mp_cfg: &MaxPlusConfig,
    store: &mut StatsStore<M::State, MaxPlusStateStats>,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>, PlanError> {
    let n = model.n_agents();
    if model.is_terminal(state) {
        return Ok(vec![0.0; n]);
    }
    if depth == 0 {
        return Ok(rollout_returns(model, state, cfg, rng));
    }
    let graph = model.coordination_graph(state);
    let counts = action_counts(model, state);
    let entry = store.lookup_or_init(state, || MaxPlusStateStats::init(&graph, &counts));
    let joint = max_plus(&graph, entry, mp_cfg, cfg.exploration)?;

    let (next, rewards) = model.sample_step(state, &joint, rng);
    let child = simulate_maxplus(model, &next, depth - 1, cfg, mp_cfg, store, rng)?;
    let q: Vec<f64> = rewards
        .iter()
        .zip(&child)
        .map(|(r, c)| r + cfg.discount * c)
        .collect();

    let entry = store
        .get_mut(state)
        .expect("entry created before recursion");
    entry.update(&joint, &q, &graph)?;
    Ok(q)
}

/// One recursive simulation for the variable-elimination backend: returns
/// the scalar discounted team return and updates component statistics. The
/// graph, components, and elimination order are hoisted by the caller (this
/// backend only runs on static graphs).
///
/// In addition to the depth cutoff, recursion stops once the elapsed
/// discount `discount^(initial_depth - depth)` drops below 0.01 (only for
/// discounts strictly below 1).
#[allow(clippy::too_many_arguments)]
pub fn simulate_varel<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    depth: u32,
    cfg: &PlannerConfig,
    graph: &CoordinationGraph,
    components: &VarElComponents,
    order: &EliminationOrder,
    store: &mut StatsStore<M::State, VarElStateStats>,
    rng: &mut dyn RngCore,
) -> Result<f64, PlanError> {
    if model.is_terminal(state) {
        return Ok(0.0);
    }
    if depth == 0 {
        return Ok(rollout_returns(model, state, cfg, rng).iter().sum());
    }
    if cfg.discount < 1.0 {
        let elapsed = cfg.depth - depth;
        if cfg.discount.powi(elapsed as i32) < VAREL_CUTOFF_EPS {
            return Ok(0.0);
        }
    }
    let counts = action_counts(model, state);
    let entry = store.lookup_or_init(state, || VarElStateStats::init(components, &counts));
    let joint = var_el_select(graph, entry, order, cfg.exploration)?;

    let (next, rewards) = model.sample_step(state, &joint, rng);
    let child = simulate_varel(
        model, &next, depth - 1, cfg, graph, components, order, store, rng,
    )?;
    let team: f64 = rewards.iter().sum();
    let q = team + cfg.discount * child;

    let entry = store
        .get_mut(state)
        .expect("entry created before recursion");
    entry.update(&joint, q)?;
    Ok(q)
}

/// Return vector at the depth cutoff: zero unless the optional
/// uniform-random rollout is enabled, in which case random joint actions run
/// for another `cfg.depth` steps without touching statistics.
fn rollout_returns<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    cfg: &PlannerConfig,
    rng: &mut dyn RngCore,
) -> Vec<f64> {
    use rand::Rng;
    let n = model.n_agents();
    if !cfg.rollout {
        return vec![0.0; n];
    }
    let mut totals = vec![0.0; n];
    let mut current = state.clone();
    let mut scale = 1.0;
    for _ in 0..cfg.depth {
        if model.is_terminal(&current) {
            break;
        }
        let joint: Vec<usize> = (0..n)
            .map(|i| rng.gen_range(0..model.action_count(i, &current)))
            .collect();
        let (next, rewards) = model.sample_step(&current, &joint, rng);
        for (t, r) in totals.iter_mut().zip(&rewards) {
            *t += scale * r;
        }
        scale *= cfg.discount;
        current = next;
    }
    totals
}
