//! Anytime online planning for cooperative multi-agent MDPs.
//!
//! The planner runs Monte Carlo tree search over a joint state space while
//! coordinating joint actions through a coordination graph: either by
//! max-plus message passing (anytime, handles state-dependent graphs, memory
//! linear in the edge count) or by exact variable elimination over component
//! statistics (static graphs only, exponential in the induced width). Naive
//! joint-action MCTS, independent Q-learning, and a random policy are
//! included as baselines, and a benchmark harness drives seeded episode
//! batches over two domains (a machine-network administration task and a
//! grid-world multi-drone delivery task) and writes CSV summaries.

pub mod baselines;
pub mod bench;
pub mod cg;
pub mod domains;
pub mod maxplus;
pub mod planner;
pub mod stats;
pub mod varel;

pub use cg::{CoordinationGraph, EliminationOrder, VarElComponents};
pub use maxplus::{max_plus, EdgeBonusSchedule, MaxPlusConfig, MessageTable};
pub use planner::{plan, plan_with_rng, Backend, GenerativeModel, PlannerConfig, SearchStore};
pub use stats::{MaxPlusStateStats, StatsStore, VarElStateStats};
pub use varel::{eliminate_agent, var_el_select, IntermediatePayoff, PayoffFn};
