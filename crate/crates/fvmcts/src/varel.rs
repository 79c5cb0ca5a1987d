//! Exact joint-action selection by variable elimination over component
//! statistics, with component-wise UCB bonuses baked into the payoff tables
//! before elimination.
//!
//! Intermediate payoffs are dense arrays over the scope's action product, so
//! the cost is exponential in the induced width of the elimination order. A
//! guard aborts cleanly instead of exhausting memory when an intermediate
//! scope grows too large.

use thiserror::Error;

use crate::cg::{CoordinationGraph, EliminationOrder};
use crate::stats::VarElStateStats;

/// Largest allowed intermediate scope (table dimensions).
pub const MAX_SCOPE: usize = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VarElError {
    #[error("induced width too large: eliminating agent {agent} creates a scope of {scope} agents (max {MAX_SCOPE})")]
    InducedWidthTooLarge { agent: usize, scope: usize },
    #[error("component statistics are empty")]
    EmptyComponents,
    #[error("elimination order has {got} agents, expected {expected}")]
    BadOrder { expected: usize, got: usize },
    #[error("agent {agent} appears with inconsistent action counts ({a} vs {b})")]
    InconsistentDims { agent: usize, a: usize, b: usize },
}

/// A payoff function over an ordered subset of agents, stored densely.
///
/// `scope` is ascending; `table` is indexed in mixed radix with the first
/// scope agent as the most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffFn {
    pub scope: Vec<usize>,
    pub dims: Vec<usize>,
    pub table: Vec<f64>,
}

impl PayoffFn {
    pub fn constant(value: f64) -> Self {
        Self {
            scope: Vec::new(),
            dims: Vec::new(),
            table: vec![value],
        }
    }

    /// Value at the projection of a full joint assignment.
    pub fn value(&self, joint: &[usize]) -> f64 {
        let mut idx = 0;
        for (agent, dim) in self.scope.iter().zip(&self.dims) {
            idx = idx * dim + joint[*agent];
        }
        self.table[idx]
    }
}

/// The product of eliminating one agent: the summarizing payoff over the
/// remaining scope plus, per table entry, the eliminated agent's maximizing
/// action for back-substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediatePayoff {
    pub eliminated: usize,
    pub payoff: PayoffFn,
    pub best_response: Vec<usize>,
}

/// Eliminates agent `k` from the active set: collects every function whose
/// scope contains `k`, replaces them with one function over the union of
/// their scopes minus `k` whose entries are the max over `k`'s actions of the
/// collected sum, and returns it together with the argmax table (ties toward
/// the lowest action index).
///
/// An agent appearing in no active function yields a scope-free constant 0
/// with best response 0.
pub fn eliminate_agent(
    k: usize,
    active: &mut Vec<PayoffFn>,
) -> Result<IntermediatePayoff, VarElError> {
    let mut collected = Vec::new();
    let mut kept = Vec::with_capacity(active.len());
    for f in active.drain(..) {
        if f.scope.contains(&k) {
            collected.push(f);
        } else {
            kept.push(f);
        }
    }
    *active = kept;

    if collected.is_empty() {
        let out = IntermediatePayoff {
            eliminated: k,
            payoff: PayoffFn::constant(0.0),
            best_response: vec![0],
        };
        active.push(out.payoff.clone());
        return Ok(out);
    }

    // Union scope (ascending) with per-agent dims, checked for consistency.
    let mut union: Vec<(usize, usize)> = Vec::new();
    for f in &collected {
        for (agent, dim) in f.scope.iter().zip(&f.dims) {
            match union.iter().find(|(a, _)| a == agent) {
                Some(&(_, d)) if d != *dim => {
                    return Err(VarElError::InconsistentDims {
                        agent: *agent,
                        a: d,
                        b: *dim,
                    })
                }
                Some(_) => {}
                None => union.push((*agent, *dim)),
            }
        }
    }
    union.sort_unstable();
    let k_dim = union
        .iter()
        .find(|(a, _)| *a == k)
        .map(|&(_, d)| d)
        .expect("k is in some collected scope");

    let scope: Vec<usize> = union.iter().map(|&(a, _)| a).filter(|&a| a != k).collect();
    let dims: Vec<usize> = union
        .iter()
        .filter(|&&(a, _)| a != k)
        .map(|&(_, d)| d)
        .collect();
    if scope.len() > MAX_SCOPE {
        return Err(VarElError::InducedWidthTooLarge {
            agent: k,
            scope: scope.len(),
        });
    }

    let table_len = dims.iter().product::<usize>().max(1);
    let mut table = vec![f64::NEG_INFINITY; table_len];
    let mut best_response = vec![0; table_len];

    // For each collected function, precompute where each of its scope agents
    // sits in the new scope (or marks the eliminated agent).
    const ELIMINATED: usize = usize::MAX;
    let positions: Vec<Vec<usize>> = collected
        .iter()
        .map(|f| {
            f.scope
                .iter()
                .map(|agent| {
                    if *agent == k {
                        ELIMINATED
                    } else {
                        scope.iter().position(|a| a == agent).expect("in union")
                    }
                })
                .collect()
        })
        .collect();

    let mut assignment = vec![0usize; scope.len()];
    for flat in 0..table_len {
        // Decode `flat` into the new-scope assignment (mixed radix).
        let mut rem = flat;
        for (slot, dim) in assignment.iter_mut().zip(&dims).rev() {
            *slot = rem % dim;
            rem /= dim;
        }
        for a_k in 0..k_dim {
            let mut sum = 0.0;
            for (f, pos) in collected.iter().zip(&positions) {
                let mut idx = 0;
                for (p, dim) in pos.iter().zip(&f.dims) {
                    let a = if *p == ELIMINATED { a_k } else { assignment[*p] };
                    idx = idx * dim + a;
                }
                sum += f.table[idx];
            }
            if sum > table[flat] {
                table[flat] = sum;
                best_response[flat] = a_k;
            }
        }
    }

    let payoff = PayoffFn { scope, dims, table };
    active.push(payoff.clone());
    Ok(IntermediatePayoff {
        eliminated: k,
        payoff,
        best_response,
    })
}

/// Selects the joint action maximizing the sum of UCB-augmented component
/// payoffs, exactly, by eliminating agents in `order` and back-substituting
/// the recorded best responses in reverse.
///
/// With `c > 0` each component table entry gets `c * sqrt(ln N / n_e)` added,
/// where `N` is the state visit count; entries with `n_e = 0` (and every
/// entry when `N = 0`) get an infinite bonus so unvisited local actions are
/// tried first. With `c = 0` the tables are used as-is.
pub fn var_el_select(
    graph: &CoordinationGraph,
    stats: &VarElStateStats,
    order: &EliminationOrder,
    c: f64,
) -> Result<Vec<usize>, VarElError> {
    let n = graph.n_agents();
    if stats.components().is_empty() {
        return Err(VarElError::EmptyComponents);
    }
    if order.as_slice().len() != n {
        return Err(VarElError::BadOrder {
            expected: n,
            got: order.as_slice().len(),
        });
    }

    let visits = stats.visits();
    let log_visits = if visits > 0 { (visits as f64).ln() } else { 0.0 };
    let mut active: Vec<PayoffFn> = stats
        .components()
        .iter()
        .map(|comp| {
            let len = comp.table_len();
            let mut table = Vec::with_capacity(len);
            for flat in 0..len {
                let q = comp.mean_at(flat);
                let bonus = if c > 0.0 {
                    let count = comp.count_at(flat);
                    if visits == 0 || count == 0 {
                        f64::INFINITY
                    } else {
                        c * (log_visits / count as f64).sqrt()
                    }
                } else {
                    0.0
                };
                table.push(q + bonus);
            }
            PayoffFn {
                scope: comp.scope().to_vec(),
                dims: comp.dims().to_vec(),
                table,
            }
        })
        .collect();

    let mut eliminations = Vec::with_capacity(n);
    for &k in order.as_slice() {
        eliminations.push(eliminate_agent(k, &mut active)?);
    }

    // Back-substitute in reverse: each intermediate's scope holds only agents
    // eliminated later, so their actions are already assigned.
    let mut joint = vec![0usize; n];
    for ip in eliminations.iter().rev() {
        let idx = ip.payoff.value_index(&joint);
        joint[ip.eliminated] = ip.best_response[idx];
    }
    Ok(joint)
}

impl PayoffFn {
    /// Flat index of the projection of a full joint assignment.
    fn value_index(&self, joint: &[usize]) -> usize {
        let mut idx = 0;
        for (agent, dim) in self.scope.iter().zip(&self.dims) {
            idx = idx * dim + joint[*agent];
        }
        idx
    }
}
