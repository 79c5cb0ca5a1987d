//! Coordination graphs: undirected agent graphs whose edges mark payoff couplings.
//!
//! The graph is immutable after construction and safe to share across threads.
//! Domains with state-dependent interactions rebuild the graph per state; this
//! module only validates and queries a given graph.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) references an agent >= n_agents ({2})")]
    EndpointOutOfRange(usize, usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
}

/// Undirected coordination graph over `n_agents` nodes.
///
/// Edges are stored canonically as `(lo, hi)` with `lo < hi`, sorted
/// lexicographically. Each adjacency entry carries the index of the edge it
/// belongs to so message-passing code can address per-edge tables without a
/// map lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinationGraph {
    n_agents: usize,
    edges: Vec<(usize, usize)>,
    /// Per agent: `(neighbor, edge index)` pairs, neighbor-ascending.
    adjacency: Vec<Vec<(usize, usize)>>,
}

/// A permutation of agent indices used to drive variable elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder(pub Vec<usize>);

/// The payoff components optimized by the variable-elimination backend:
/// one per edge, plus a singleton per isolated agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarElComponents {
    pub components: Vec<Vec<usize>>,
}

impl CoordinationGraph {
    /// Builds a graph from an edge list, validating the invariants:
    /// no self-loops, no duplicates, endpoints in range.
    pub fn new(
        n_agents: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut canonical: Vec<(usize, usize)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            if a >= n_agents || b >= n_agents {
                return Err(GraphError::EndpointOutOfRange(a, b, n_agents));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            canonical.push(e);
        }
        canonical.sort_unstable();

        let mut adjacency = vec![Vec::new(); n_agents];
        for (idx, &(lo, hi)) in canonical.iter().enumerate() {
            adjacency[lo].push((hi, idx));
            adjacency[hi].push((lo, idx));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        Ok(Self {
            n_agents,
            edges: canonical,
            adjacency,
        })
    }

    /// Graph with no edges.
    pub fn edgeless(n_agents: usize) -> Self {
        Self::new(n_agents, []).expect("edgeless graph is always valid")
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    /// Canonical `(lo, hi)` edge list, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted neighbor list of agent `i`.
    ///
    /// Panics if `i >= n_agents` (precondition violation).
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        assert!(
            i < self.n_agents,
            "agent index {i} out of range (n_agents = {})",
            self.n_agents
        );
        self.adjacency[i].iter().map(|&(j, _)| j).collect()
    }

    /// `(neighbor, edge index)` pairs for agent `i`, neighbor-ascending.
    #[inline]
    pub fn neighbor_edges(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Index into `edges()` of the edge between `i` and `j`, if present.
    pub fn edge_between(&self, i: usize, j: usize) -> Option<usize> {
        self.adjacency[i]
            .iter()
            .find(|&&(nbr, _)| nbr == j)
            .map(|&(_, idx)| idx)
    }

    /// Payoff components for the variable-elimination backend: one component
    /// per edge (pairwise factorization), isolated agents as singletons.
    pub fn varel_components(&self) -> VarElComponents {
        let mut components: Vec<Vec<usize>> =
            self.edges.iter().map(|&(i, j)| vec![i, j]).collect();
        for i in 0..self.n_agents {
            if self.adjacency[i].is_empty() {
                components.push(vec![i]);
            }
        }
        VarElComponents { components }
    }

    /// Min-degree greedy elimination order with fill-in simulation.
    ///
    /// Repeatedly eliminates the remaining node of lowest current degree
    /// (ties broken toward the lowest agent index), connecting its remaining
    /// neighbors pairwise. Deterministic.
    pub fn elimination_order(&self) -> EliminationOrder {
        let n = self.n_agents;
        let mut adj: Vec<BTreeSet<usize>> = (0..n)
            .map(|i| self.adjacency[i].iter().map(|&(j, _)| j).collect())
            .collect();
        let mut remaining: Vec<bool> = vec![true; n];
        let mut order = Vec::with_capacity(n);

        for _ in 0..n {
            let k = (0..n)
                .filter(|&i| remaining[i])
                .min_by_key(|&i| (adj[i].len(), i))
                .expect("at least one agent remains");
            let nbrs: Vec<usize> = adj[k].iter().copied().collect();
            for (idx, &a) in nbrs.iter().enumerate() {
                adj[a].remove(&k);
                for &b in &nbrs[idx + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
            adj[k].clear();
            remaining[k] = false;
            order.push(k);
        }
        EliminationOrder(order)
    }
}

impl EliminationOrder {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}
