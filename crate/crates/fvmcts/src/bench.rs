//! Benchmark harness: seeded episode batches per (algorithm, domain, size)
//! cell, CSV output, and cross-file summaries.
//!
//! Configs are plain JSON mirroring the domain parameter structs. Identical
//! config and seeds reproduce identical results; with `measure_time` off the
//! CSV is byte-identical across runs (wall-clock columns are the only
//! nondeterministic output and are zeroed in that mode).

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{
    iql_act, iql_train, naive_mcts_plan, random_policy, BaselineError, IqlConfig, IqlTables,
};
use crate::cg::CoordinationGraph;
use crate::domains::drone::{DroneError, DroneModel, DroneParams};
use crate::domains::sysadmin::{SysAdmin, SysAdminError, SysAdminParams, Topology};
use crate::maxplus::MaxPlusConfig;
use crate::planner::{
    plan_with_rng, Backend, GenerativeModel, PlanError, PlannerConfig, SearchStore,
};

/// Salt separating the per-episode planner rng stream from the environment
/// stream derived from the same seed.
const PLAN_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Sysadmin(#[from] SysAdminError),
    #[error(transparent)]
    Drone(#[from] DroneError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainConfig {
    Sysadmin(SysAdminParams),
    Drone(DroneParams),
}

impl DomainConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DomainConfig::Sysadmin(_) => "sysadmin",
            DomainConfig::Drone(_) => "drone",
        }
    }

    pub fn topology_label(&self) -> &'static str {
        match self {
            DomainConfig::Sysadmin(p) => match p.topology {
                Topology::Ring => "ring",
                Topology::Star => "star",
                Topology::RingOfRings => "ring_of_rings",
            },
            DomainConfig::Drone(_) => "grid",
        }
    }

    pub fn n_agents(&self) -> usize {
        match self {
            DomainConfig::Sysadmin(p) => p.n_agents,
            DomainConfig::Drone(p) => p.n_agents,
        }
    }

    fn default_max_steps(&self) -> u32 {
        match self {
            DomainConfig::Sysadmin(_) => 50,
            DomainConfig::Drone(_) => 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AlgorithmConfig {
    FvmctsMaxplus {
        #[serde(default)]
        maxplus: MaxPlusConfig,
    },
    FvmctsVarel,
    NaiveMcts {
        #[serde(default = "default_table_cap")]
        max_table_entries: usize,
    },
    Iql {
        #[serde(default = "default_iql_alpha")]
        alpha: f64,
        #[serde(default = "default_iql_epsilon")]
        epsilon: f64,
        #[serde(default = "default_iql_episodes")]
        train_episodes: u32,
        #[serde(default)]
        train_seed: u64,
    },
    Random,
}

fn default_table_cap() -> usize {
    1_000_000
}
fn default_iql_alpha() -> f64 {
    0.1
}
fn default_iql_epsilon() -> f64 {
    0.1
}
fn default_iql_episodes() -> u32 {
    10_000
}

impl AlgorithmConfig {
    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmConfig::FvmctsMaxplus { .. } => "fvmcts_maxplus",
            AlgorithmConfig::FvmctsVarel => "fvmcts_varel",
            AlgorithmConfig::NaiveMcts { .. } => "naive_mcts",
            AlgorithmConfig::Iql { .. } => "iql",
            AlgorithmConfig::Random => "random",
        }
    }
}

/// Tree-search settings shared by the MCTS algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSettings {
    pub iterations: Option<u64>,
    pub time_budget_ms: Option<u64>,
    pub depth: u32,
    pub exploration: f64,
    /// Discount for both search and the episode return metric; defaults to
    /// the domain's discount.
    pub discount: Option<f64>,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            iterations: Some(1000),
            time_budget_ms: None,
            depth: 10,
            exploration: 1.0,
            discount: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainConfig,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub search: SearchSettings,
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    /// Episode length cap; defaults per domain (50 administration steps, 100
    /// delivery steps).
    #[serde(default)]
    pub max_steps: Option<u32>,
    /// Explicit seed list; defaults to 0..episodes. Must be distinct.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Record wall-clock per action. Disable for byte-identical CSV output.
    #[serde(default = "default_true")]
    pub measure_time: bool,
    /// Output CSV path; the CLI flag overrides it.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_episodes() -> usize {
    10
}
fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seed_list(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.episodes as u64).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let seeds = self.seed_list();
        if seeds.is_empty() {
            return Err(BenchError::Config("need at least one episode".into()));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(BenchError::Config("seeds must be distinct".into()));
        }
        if matches!(self.algorithm, AlgorithmConfig::FvmctsVarel)
            && matches!(self.domain, DomainConfig::Drone(_))
        {
            return Err(BenchError::Config(
                "variable elimination requires a static coordination graph; \
                 the drone domain's graph is state-dependent"
                    .into(),
            ));
        }
        if let Some(d) = self.search.discount {
            if !(0.0..=1.0).contains(&d) {
                return Err(BenchError::Config(format!(
                    "discount must be in [0, 1], got {d}"
                )));
            }
        }
        Ok(())
    }

    fn planner_config(&self, discount: f64, seed: u64) -> PlannerConfig {
        let backend = match &self.algorithm {
            AlgorithmConfig::FvmctsMaxplus { maxplus } => Backend::MaxPlus(maxplus.clone()),
            _ => Backend::VarEl,
        };
        PlannerConfig {
            iterations: self.search.iterations,
            time_budget: self.search.time_budget_ms.map(Duration::from_millis),
            depth: self.search.depth,
            exploration: self.search.exploration,
            discount,
            backend,
            seed,
            rollout: false,
        }
    }
}

/// One seeded episode's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub discounted_return: f64,
    pub step_times_ms: Vec<f64>,
    pub peak_stats_entries: usize,
    pub terminal: bool,
    pub steps: u32,
    pub failed: bool,
}

impl EpisodeRecord {
    pub fn mean_ms_per_action(&self) -> f64 {
        if self.step_times_ms.is_empty() {
            f64::NAN
        } else {
            self.step_times_ms.iter().sum::<f64>() / self.step_times_ms.len() as f64
        }
    }
}

/// Runs every seeded episode of one experiment cell.
///
/// Invalid algorithm/domain combinations fail before any episode starts.
/// Memory-guard aborts do not panic; they mark the episode failed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<EpisodeRecord>, BenchError> {
    cfg.validate()?;
    match &cfg.domain {
        DomainConfig::Sysadmin(params) => {
            let model = SysAdmin::new(params.clone())?;
            run_on_model(&model, cfg)
        }
        DomainConfig::Drone(params) => {
            let model = DroneModel::new(params.clone())?;
            run_on_model(&model, cfg)
        }
    }
}

fn run_on_model<M: GenerativeModel>(
    model: &M,
    cfg: &ExperimentConfig,
) -> Result<Vec<EpisodeRecord>, BenchError> {
    let discount = cfg.search.discount.unwrap_or_else(|| model.discount());
    let max_steps = cfg.max_steps.unwrap_or_else(|| cfg.domain.default_max_steps());

    // Offline training happens once per experiment, not per episode.
    let iql_tables = match &cfg.algorithm {
        AlgorithmConfig::Iql {
            alpha,
            epsilon,
            train_episodes,
            train_seed,
        } => Some(iql_train(
            model,
            &IqlConfig {
                alpha: *alpha,
                epsilon: *epsilon,
                episodes: *train_episodes,
                max_steps,
                discount,
                seed: *train_seed,
            },
        )),
        _ => None,
    };

    cfg.seed_list()
        .into_iter()
        .map(|seed| run_episode(model, cfg, discount, max_steps, seed, iql_tables.as_ref()))
        .collect()
}

fn run_episode<M: GenerativeModel>(
    model: &M,
    cfg: &ExperimentConfig,
    discount: f64,
    max_steps: u32,
    seed: u64,
    iql_tables: Option<&IqlTables>,
) -> Result<EpisodeRecord, BenchError> {
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan_rng = ChaCha8Rng::seed_from_u64(seed ^ PLAN_SEED_SALT);
    let planner_cfg = cfg.planner_config(discount, seed);

    let mut state = model.initial_state(&mut env_rng);
    let mut record = EpisodeRecord {
        seed,
        discounted_return: 0.0,
        step_times_ms: Vec::new(),
        peak_stats_entries: iql_tables.map(|t| t.total_entries()).unwrap_or(0),
        terminal: false,
        steps: 0,
        failed: false,
    };

    for t in 0..max_steps {
        if model.is_terminal(&state) {
            record.terminal = true;
            break;
        }
        let started = Instant::now();
        let decision: Result<Vec<usize>, BaselineError> = match &cfg.algorithm {
            AlgorithmConfig::FvmctsMaxplus { .. } | AlgorithmConfig::FvmctsVarel => {
                let mut store = SearchStore::for_backend(&planner_cfg.backend);
                let action =
                    plan_with_rng(model, &state, &planner_cfg, &mut store, &mut plan_rng)?;
                record.peak_stats_entries = record.peak_stats_entries.max(store.total_entries());
                Ok(action)
            }
            AlgorithmConfig::NaiveMcts { max_table_entries } => naive_mcts_plan(
                model,
                &state,
                &planner_cfg,
                *max_table_entries,
                &mut plan_rng,
            )
            .map(|plan| {
                record.peak_stats_entries = record.peak_stats_entries.max(plan.table_entries);
                plan.joint_action
            }),
            AlgorithmConfig::Iql { .. } => {
                Ok(iql_act(iql_tables.expect("trained above"), model, &state))
            }
            AlgorithmConfig::Random => Ok(random_policy(model, &state, &mut plan_rng)),
        };
        let elapsed_ms = if cfg.measure_time {
            started.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };

        let joint = match decision {
            Ok(joint) => joint,
            Err(BaselineError::MemoryGuardExceeded { entries, .. }) => {
                record.peak_stats_entries = record.peak_stats_entries.max(entries);
                record.failed = true;
                break;
            }
            Err(other) => {
                return Err(BenchError::Config(format!(
                    "baseline failed on seed {seed}: {other}"
                )))
            }
        };
        record.step_times_ms.push(elapsed_ms);

        let (next, rewards) = model.sample_step(&state, &joint, &mut env_rng);
        let team: f64 = rewards.iter().sum();
        record.discounted_return += discount.powi(t as i32) * team;
        record.steps += 1;
        state = next;
    }
    if !record.failed && model.is_terminal(&state) {
        record.terminal = true;
    }
    Ok(record)
}

/// Formats a float with six significant digits; NaN prints as `NaN`.
fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-3..=5).contains(&exp) {
        format!("{x:.5e}")
    } else {
        let decimals = (5 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

pub const CSV_HEADER: &str =
    "algo,domain,topology,n_agents,seed,return,mean_ms_per_action,peak_stats_entries,steps,failed";

/// Writes one experiment's records as CSV: fixed header, one seed-sorted row
/// per record, floats at six significant digits. Failed episodes carry NaN
/// in the return and timing columns and `failed = true`.
pub fn emit_csv(
    cfg: &ExperimentConfig,
    records: &[EpisodeRecord],
    w: &mut dyn io::Write,
) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    let mut ordered: Vec<&EpisodeRecord> = records.iter().collect();
    ordered.sort_by_key(|r| r.seed);
    for r in ordered {
        let (ret, ms) = if r.failed {
            (f64::NAN, f64::NAN)
        } else {
            (r.discounted_return, r.mean_ms_per_action())
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            cfg.algorithm.name(),
            cfg.domain.name(),
            cfg.domain.topology_label(),
            cfg.domain.n_agents(),
            r.seed,
            fmt_sig6(ret),
            fmt_sig6(ms),
            r.peak_stats_entries,
            r.steps,
            r.failed
        )?;
    }
    Ok(())
}

pub fn write_csv_file(
    cfg: &ExperimentConfig,
    records: &[EpisodeRecord],
    path: &Path,
) -> Result<(), BenchError> {
    let mut buf = Vec::new();
    emit_csv(cfg, records, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

#[derive(Debug, Default, Clone)]
struct CellStats {
    returns: Vec<f64>,
    ms: Vec<f64>,
    failed: usize,
    total: usize,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample standard deviation; zero for a single sample.
fn sample_std(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => f64::NAN,
        1 => 0.0,
        n => {
            let m = mean(xs);
            (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
        }
    }
}

/// Groups CSV rows by (algo, domain, topology, n_agents) and renders a
/// mean +/- stddev table over the non-failed episodes of each cell. Cells
/// with no completed episode print NaN.
pub fn summarize(paths: &[PathBuf]) -> Result<String, BenchError> {
    let mut cells: BTreeMap<(String, String, String, u64), CellStats> = BTreeMap::new();
    for path in paths {
        let text = fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 {
                if line != CSV_HEADER {
                    return Err(BenchError::Config(format!(
                        "{}: unexpected CSV header",
                        path.display()
                    )));
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(BenchError::Config(format!(
                    "{}: malformed row {}",
                    path.display(),
                    lineno + 1
                )));
            }
            let key = (
                fields[0].to_string(),
                fields[1].to_string(),
                fields[2].to_string(),
                fields[3].parse::<u64>().map_err(|e| {
                    BenchError::Config(format!("{}: bad n_agents: {e}", path.display()))
                })?,
            );
            let failed = fields[9] == "true";
            let cell = cells.entry(key).or_default();
            cell.total += 1;
            if failed {
                cell.failed += 1;
            } else {
                let ret: f64 = fields[5].parse().unwrap_or(f64::NAN);
                let ms: f64 = fields[6].parse().unwrap_or(f64::NAN);
                cell.returns.push(ret);
                cell.ms.push(ms);
            }
        }
    }

    let mut out = String::new();
    writeln!(
        out,
        "{:<16} {:<9} {:<14} {:>8} {:>9} {:>12} {:>12} {:>12} {:>12} {:>7}",
        "algo", "domain", "topology", "n_agents", "episodes", "mean_return", "std_return",
        "mean_ms", "std_ms", "failed"
    )
    .unwrap();
    for ((algo, domain, topology, n_agents), cell) in &cells {
        writeln!(
            out,
            "{:<16} {:<9} {:<14} {:>8} {:>9} {:>12} {:>12} {:>12} {:>12} {:>7}",
            algo,
            domain,
            topology,
            n_agents,
            cell.total,
            fmt_sig6(mean(&cell.returns)),
            fmt_sig6(sample_std(&cell.returns)),
            fmt_sig6(mean(&cell.ms)),
            fmt_sig6(sample_std(&cell.ms)),
            cell.failed
        )
        .unwrap();
    }
    Ok(out)
}

/// Wraps a model with a fixed coordination graph, declaring it static. Used
/// to probe variable elimination on domains whose natural graph is
/// state-dependent.
#[derive(Debug, Clone)]
pub struct StaticGraphOverride<M> {
    inner: M,
    graph: CoordinationGraph,
}

impl<M: GenerativeModel> StaticGraphOverride<M> {
    pub fn new(inner: M, graph: CoordinationGraph) -> Self {
        Self { inner, graph }
    }

    /// Complete graph over all agents: every pair coupled.
    pub fn complete(inner: M) -> Self {
        let n = inner.n_agents();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        let graph = CoordinationGraph::new(n, edges).expect("complete graph is valid");
        Self { inner, graph }
    }
}

impl<M: GenerativeModel> GenerativeModel for StaticGraphOverride<M> {
    type State = M::State;

    fn n_agents(&self) -> usize {
        self.inner.n_agents()
    }

    fn action_count(&self, agent: usize, state: &Self::State) -> usize {
        self.inner.action_count(agent, state)
    }

    fn initial_state(&self, rng: &mut dyn RngCore) -> Self::State {
        self.inner.initial_state(rng)
    }

    fn sample_step(
        &self,
        state: &Self::State,
        joint_action: &[usize],
        rng: &mut dyn RngCore,
    ) -> (Self::State, Vec<f64>) {
        self.inner.sample_step(state, joint_action, rng)
    }

    fn coordination_graph(&self, _state: &Self::State) -> Cow<'_, CoordinationGraph> {
        Cow::Borrowed(&self.graph)
    }

    fn is_terminal(&self, state: &Self::State) -> bool {
        self.inner.is_terminal(state)
    }

    fn has_static_graph(&self) -> bool {
        true
    }

    fn discount(&self) -> f64 {
        self.inner.discount()
    }

    fn local_state_key(&self, agent: usize, state: &Self::State) -> u64 {
        self.inner.local_state_key(agent, state)
    }
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

/// Quick property suite for the CLI: exact coordination on random instances,
/// running-mean statistics, and end-to-end determinism. Prints one line per
/// check; returns whether everything passed.
pub fn selfcheck(out: &mut dyn io::Write) -> io::Result<bool> {
    let mut ok = true;
    let mut report = |name: &str, pass: bool, out: &mut dyn io::Write| -> io::Result<()> {
        writeln!(out, "{} {}", if pass { "PASS" } else { "FAIL" }, name)
    };

    let pass = varel_exactness_check(200);
    ok &= pass;
    report("variable elimination matches brute force (200 instances)", pass, out)?;

    let pass = maxplus_tree_exactness_check(200);
    ok &= pass;
    report("max-plus exact on random trees (200 instances)", pass, out)?;

    let pass = running_mean_check(50);
    ok &= pass;
    report("statistics are running means (50 streams)", pass, out)?;

    let pass = determinism_check();
    ok &= pass;
    report("identical config and seeds give identical CSV", pass, out)?;

    Ok(ok)
}

/// Dyadic random value: exactly representable so f64 sums are
/// order-independent and equality checks are legitimate.
fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.gen_range(-80..=80) as f64 / 8.0
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64) -> CoordinationGraph {
    use rand::Rng;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(edge_prob) {
                edges.push((i, j));
            }
        }
    }
    CoordinationGraph::new(n, edges).expect("valid random graph")
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> CoordinationGraph {
    use rand::Rng;
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    CoordinationGraph::new(n, edges).expect("valid random tree")
}

/// Exhaustive enumeration over joint actions, evaluating with the provided
/// closure. Independent of the elimination and message-passing code paths.
fn enumerate_best(counts: &[usize], value: &dyn Fn(&[usize]) -> f64) -> f64 {
    let mut joint = vec![0usize; counts.len()];
    let mut best = f64::NEG_INFINITY;
    loop {
        best = best.max(value(&joint));
        let mut i = 0;
        loop {
            if i == counts.len() {
                return best;
            }
            joint[i] += 1;
            if joint[i] < counts[i] {
                break;
            }
            joint[i] = 0;
            i += 1;
        }
    }
}

fn varel_exactness_check(cases: u32) -> bool {
    use crate::stats::VarElStateStats;
    use crate::varel::var_el_select;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for _ in 0..cases {
        let n = rng.gen_range(2..=5);
        let graph = random_graph(&mut rng, n, 0.5);
        let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let components = graph.varel_components();
        let tables: Vec<Vec<f64>> = components
            .components
            .iter()
            .map(|scope| {
                let len: usize = scope.iter().map(|&i| counts[i]).product();
                (0..len).map(|_| dyadic(&mut rng)).collect()
            })
            .collect();
        let stats = VarElStateStats::from_tables(&components, &counts, &tables, 1, 1);
        let order = {
            let mut o: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                o.swap(i, j);
            }
            crate::cg::EliminationOrder(o)
        };
        let Ok(joint) = var_el_select(&graph, &stats, &order, 0.0) else {
            return false;
        };
        let value = |a: &[usize]| -> f64 {
            stats
                .components()
                .iter()
                .map(|c| c.mean_at(c.project(a)))
                .sum()
        };
        if value(&joint) != enumerate_best(&counts, &value) {
            return false;
        }
    }
    true
}

fn maxplus_tree_exactness_check(cases: u32) -> bool {
    use crate::maxplus::max_plus;
    use crate::stats::MaxPlusStateStats;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xFEED);
    for _ in 0..cases {
        let n = rng.gen_range(1..=6);
        let graph = random_tree(&mut rng, n);
        let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let node_means: Vec<Vec<f64>> = counts
            .iter()
            .map(|&c| (0..c).map(|_| dyadic(&mut rng)).collect())
            .collect();
        let edge_means: Vec<Vec<f64>> = graph
            .edges()
            .iter()
            .map(|&(lo, hi)| {
                (0..counts[lo] * counts[hi])
                    .map(|_| dyadic(&mut rng))
                    .collect()
            })
            .collect();
        let stats = MaxPlusStateStats::from_tables(&graph, &node_means, &edge_means, 1, 1);
        let cfg = MaxPlusConfig {
            max_rounds: n as u32,
            use_node_utilities: true,
            node_exploration: false,
            edge_exploration: false,
            message_normalization: false,
            message_tolerance: 1e-12,
            round_budget: None,
        };
        let Ok(joint) = max_plus(&graph, &stats, &cfg, 0.0) else {
            return false;
        };
        let value = |a: &[usize]| -> f64 {
            let mut v = 0.0;
            for (i, &ai) in a.iter().enumerate() {
                v += stats.node(i).mean(ai);
            }
            for (e, &(lo, hi)) in graph.edges().iter().enumerate() {
                v += stats.edge(e).mean(a[lo], a[hi]);
            }
            v
        };
        if value(&joint) != enumerate_best(&counts, &value) {
            return false;
        }
    }
    true
}

fn running_mean_check(streams: u32) -> bool {
    use crate::stats::{update_maxplus_stats, MaxPlusStateStats, StatsStore};
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xABCD);
    let graph = CoordinationGraph::new(2, [(0, 1)]).expect("valid");
    for _ in 0..streams {
        let mut store: StatsStore<u8, MaxPlusStateStats> = StatsStore::new();
        let mut samples: Vec<Vec<f64>> = vec![Vec::new(); 4];
        for _ in 0..rng.gen_range(1..200) {
            let a = [rng.gen_range(0..2), rng.gen_range(0..2)];
            let q = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            if update_maxplus_stats(&mut store, &0, &a, &q, &graph, &[2, 2]).is_err() {
                return false;
            }
            samples[a[0] * 2 + a[1]].push(q[0] + q[1]);
        }
        let entry = store.get(&0).expect("updated");
        for a0 in 0..2 {
            for a1 in 0..2 {
                let s = &samples[a0 * 2 + a1];
                if s.is_empty() {
                    continue;
                }
                let direct = s.iter().sum::<f64>() / s.len() as f64;
                if (entry.edge(0).mean(a0, a1) - direct).abs() > 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

fn determinism_check() -> bool {
    let cfg = ExperimentConfig {
        domain: DomainConfig::Sysadmin(SysAdminParams::new(Topology::Ring, 4)),
        algorithm: AlgorithmConfig::FvmctsMaxplus {
            maxplus: MaxPlusConfig::default(),
        },
        search: SearchSettings {
            iterations: Some(30),
            time_budget_ms: None,
            depth: 5,
            exploration: 10.0,
            discount: None,
        },
        episodes: 3,
        max_steps: Some(8),
        seeds: None,
        measure_time: false,
        out: None,
    };
    let render = || -> Option<Vec<u8>> {
        let records = run_experiment(&cfg).ok()?;
        let mut buf = Vec::new();
        emit_csv(&cfg, &records, &mut buf).ok()?;
        Some(buf)
    };
    match (render(), render()) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_cfg() -> ExperimentConfig {
        ExperimentConfig {
            domain: DomainConfig::Sysadmin(SysAdminParams::new(Topology::Ring, 4)),
            algorithm: AlgorithmConfig::Random,
            search: SearchSettings::default(),
            episodes: 5,
            max_steps: Some(10),
            seeds: None,
            measure_time: false,
            out: None,
        }
    }

    #[test]
    fn random_policy_episodes_complete() {
        let records = run_experiment(&random_cfg()).unwrap();
        assert_eq!(records.len(), 5);
        for r in &records {
            assert!(r.discounted_return.is_finite());
            assert_eq!(r.steps, 10);
            assert!(!r.failed);
        }
    }

    #[test]
    fn varel_on_drone_is_a_config_error() {
        let cfg = ExperimentConfig {
            domain: DomainConfig::Drone(DroneParams::for_agents(4)),
            algorithm: AlgorithmConfig::FvmctsVarel,
            ..random_cfg()
        };
        let err = run_experiment(&cfg).unwrap_err();
        assert!(matches!(err, BenchError::Config(_)), "got {err:?}");
    }

    #[test]
    fn empty_records_give_header_only() {
        let cfg = random_cfg();
        let mut buf = Vec::new();
        emit_csv(&cfg, &[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    }

    #[test]
    fn forty_records_make_forty_one_lines() {
        let cfg = ExperimentConfig {
            episodes: 40,
            ..random_cfg()
        };
        let records = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        emit_csv(&cfg, &records, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 41);
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let cfg = random_cfg();
        let render = || {
            let records = run_experiment(&cfg).unwrap();
            let mut buf = Vec::new();
            emit_csv(&cfg, &records, &mut buf).unwrap();
            buf
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn summarize_mean_and_std() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cell.csv");
        let mut text = String::from(CSV_HEADER);
        text.push('\n');
        text.push_str("random,sysadmin,ring,4,0,10.0000,1.00000,0,10,false\n");
        text.push_str("random,sysadmin,ring,4,1,20.0000,1.00000,0,10,false\n");
        fs::write(&path, text).unwrap();
        let table = summarize(&[path]).unwrap();
        assert!(table.contains("15.0000"), "table: {table}");
        assert!(table.contains("7.07107"), "table: {table}");
    }

    #[test]
    fn summarize_single_record_has_zero_std() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("single.csv");
        let text = format!(
            "{CSV_HEADER}\nrandom,sysadmin,ring,4,0,10.0000,1.00000,0,10,false\n"
        );
        fs::write(&path, text).unwrap();
        let table = summarize(&[path]).unwrap();
        let row = table.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cols[6], "0"); // std_return
    }

    #[test]
    fn summarize_all_failed_prints_nan() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("failed.csv");
        let text = format!(
            "{CSV_HEADER}\nnaive_mcts,sysadmin,ring,16,0,NaN,NaN,1048576,0,true\n"
        );
        fs::write(&path, text).unwrap();
        let table = summarize(&[path]).unwrap();
        assert!(table.contains("NaN"));
    }

    #[test]
    fn config_round_trips_from_json() {
        let text = r#"{
            "domain": {"type": "sysadmin", "topology": "ring", "n_agents": 8},
            "algorithm": {"type": "fvmcts_maxplus"},
            "search": {"iterations": 4000, "depth": 20, "exploration": 20.0},
            "episodes": 10,
            "max_steps": 50
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.algorithm.name(), "fvmcts_maxplus");
        assert_eq!(cfg.domain.n_agents(), 8);
        assert_eq!(cfg.search.iterations, Some(4000));
        assert_eq!(cfg.seed_list().len(), 10);
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let cfg = ExperimentConfig {
            seeds: Some(vec![1, 1]),
            ..random_cfg()
        };
        assert!(matches!(cfg.validate(), Err(BenchError::Config(_))));
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(15.0), "15.0000");
        assert_eq!(fmt_sig6(7.0710678), "7.07107");
        assert_eq!(fmt_sig6(f64::NAN), "NaN");
        assert_eq!(fmt_sig6(1.5e-7), "1.50000e-7");
        assert_eq!(fmt_sig6(-3.25), "-3.25000");
    }

    #[test]
    fn selfcheck_passes() {
        let mut buf = Vec::new();
        assert!(selfcheck(&mut buf).unwrap());
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }
}
