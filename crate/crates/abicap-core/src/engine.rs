//! Population runner: drives agents through scheduled, seeded runs and
//! aggregates knowledge metrics per condition and step.
//!
//! Steps are indexed from 0 internally; recorded rows use 1-based step
//! numbers, so "step 5" is the state after the fifth practice.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::graph::GraphTopology;
use crate::learner::{practice_dyad, EngagementMode, LearnerState, ModelParams};
use crate::seed;

/// Per-condition timeline: the starting mode, scheduled mode switches, and
/// forced-practice overrides by step range (inclusive, 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub initial_mode: EngagementMode,
    /// `(step, new mode)`, strictly increasing by step; applied at the
    /// start of the given step.
    pub mode_switches: Vec<(usize, EngagementMode)>,
    /// `(first step, last step, node)`: during those steps the agent
    /// practices `node` regardless of its cursor.
    pub forced_practice: Vec<(usize, usize, usize)>,
    /// Node practice order; empty means ascending node index.
    pub practice_order: Vec<usize>,
}

impl Schedule {
    pub fn constant(mode: EngagementMode) -> Self {
        Schedule {
            initial_mode: mode,
            mode_switches: Vec::new(),
            forced_practice: Vec::new(),
            practice_order: Vec::new(),
        }
    }

    /// Every mode this schedule can ever be in.
    pub fn modes(&self) -> impl Iterator<Item = EngagementMode> + '_ {
        core::iter::once(self.initial_mode).chain(self.mode_switches.iter().map(|&(_, m)| m))
    }

    pub fn validate(&self, node_count: usize, total_steps: usize) -> Result<(), ModelError> {
        let mut prev: Option<usize> = None;
        for &(step, _) in &self.mode_switches {
            if prev.is_some_and(|p| step <= p) {
                return Err(ModelError::BadConfig(
                    "mode switch steps must be strictly increasing".into(),
                ));
            }
            prev = Some(step);
        }
        for &(start, end, node) in &self.forced_practice {
            if start > end || end >= total_steps {
                return Err(ModelError::BadConfig(format!(
                    "forced practice range {start}..={end} outside run of {total_steps} steps"
                )));
            }
            if node >= node_count {
                return Err(ModelError::BadNodeIndex { node, node_count }.into_config());
            }
        }
        for &node in &self.practice_order {
            if node >= node_count {
                return Err(ModelError::BadNodeIndex { node, node_count }.into_config());
            }
        }
        Ok(())
    }

    fn mode_at_switch(&self, step: usize) -> Option<EngagementMode> {
        self.mode_switches
            .iter()
            .find(|&&(s, _)| s == step)
            .map(|&(_, m)| m)
    }

    fn forced_node(&self, step: usize) -> Option<usize> {
        self.forced_practice
            .iter()
            .find(|&&(start, end, _)| step >= start && step <= end)
            .map(|&(_, _, node)| node)
    }
}

impl ModelError {
    fn into_config(self) -> ModelError {
        ModelError::BadConfig(format!("{self}"))
    }
}

/// A named schedule; the name keys the condition's random streams and the
/// output rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub schedule: Schedule,
}

impl Condition {
    pub fn new(name: impl Into<String>, schedule: Schedule) -> Self {
        Condition {
            name: name.into(),
            schedule,
        }
    }
}

/// How to build the knowledge graph for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TopologySpec {
    SmallWorld {
        nodes: usize,
        mean_degree: f64,
        rewire_prob: f64,
    },
    Edgeless {
        nodes: usize,
    },
}

impl TopologySpec {
    pub fn node_count(&self) -> usize {
        match *self {
            TopologySpec::SmallWorld { nodes, .. } | TopologySpec::Edgeless { nodes } => nodes,
        }
    }

    pub fn build(&self, rng: &mut impl Rng) -> Result<GraphTopology, ModelError> {
        match *self {
            TopologySpec::SmallWorld {
                nodes,
                mean_degree,
                rewire_prob,
            } => GraphTopology::small_world(nodes, mean_degree, rewire_prob, rng),
            TopologySpec::Edgeless { nodes } => GraphTopology::edgeless(nodes),
        }
    }
}

/// Full experiment description: one topology, shared parameters, and any
/// number of named conditions run on it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Label used for output file naming and the CSV scenario column.
    pub name: String,
    pub topology: TopologySpec,
    pub initial_weight: f64,
    /// Draw each agent's edge weights uniformly from
    /// `[0, 2 * initial_weight]` instead of using the constant value.
    pub random_initial_weights: bool,
    pub params: ModelParams,
    pub agents_per_condition: usize,
    pub total_steps: usize,
    pub conditions: Vec<Condition>,
    pub master_seed: u64,
    /// Give every agent its own independently generated graph instead of
    /// one shared per experiment. Incompatible with interactive conditions.
    pub independent_graphs: bool,
    /// Shuffle each agent's practice order from its own stream instead of
    /// using a common order. Ignored where a schedule pins an explicit
    /// `practice_order`.
    pub random_practice_order: bool,
    /// Record the tracked node's raw mastery per agent per step.
    pub record_mastery: bool,
    pub tracked_node: usize,
}

impl RunConfig {
    pub fn has_interactive(&self) -> bool {
        self.conditions
            .iter()
            .any(|c| c.schedule.modes().any(|m| m == EngagementMode::Interactive))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.params.validate()?;
        if self.total_steps == 0 {
            return Err(ModelError::BadConfig("total_steps must be >= 1".into()));
        }
        if self.conditions.is_empty() {
            return Err(ModelError::BadConfig("at least one condition required".into()));
        }
        if !(0.0..=1.0).contains(&self.initial_weight) {
            return Err(ModelError::BadConfig(format!(
                "initial_weight must lie in [0, 1], got {}",
                self.initial_weight
            )));
        }
        if self.random_initial_weights && self.initial_weight > 0.5 {
            return Err(ModelError::BadConfig(format!(
                "random initial weights need a mean of at most 0.5, got {}",
                self.initial_weight
            )));
        }
        let nodes = self.topology.node_count();
        if self.tracked_node >= nodes {
            return Err(ModelError::BadConfig(format!(
                "tracked_node {} out of range for {nodes} nodes",
                self.tracked_node
            )));
        }
        for condition in &self.conditions {
            condition.schedule.validate(nodes, self.total_steps)?;
        }
        if self.has_interactive() {
            if self.agents_per_condition % 2 != 0 {
                return Err(ModelError::BadConfig(format!(
                    "interactive conditions need an even agent count, got {}",
                    self.agents_per_condition
                )));
            }
            if self.independent_graphs {
                return Err(ModelError::BadConfig(
                    "interactive dyads exchange per-edge weights and so require a shared graph; \
                     disable independent_graphs"
                        .into(),
                ));
            }
        }
        let mut names: Vec<&str> = self.conditions.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.conditions.len() {
            return Err(ModelError::BadConfig("condition names must be unique".into()));
        }
        Ok(())
    }
}

/// Results for one condition; `knowledge[step][agent]`, step 0-based here.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionResult {
    pub name: String,
    pub knowledge: Vec<Vec<u32>>,
    /// `mastery_trace[step][agent]`: the tracked node's mastery, when recorded.
    pub mastery_trace: Option<Vec<Vec<f64>>>,
    pub final_mastery: Vec<Vec<f64>>,
    pub final_weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub scenario: String,
    pub total_steps: usize,
    pub agents_per_condition: usize,
    pub tracked_node: usize,
    pub conditions: Vec<ConditionResult>,
}

impl RunResult {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Mean knowledge for a condition at a 1-based step.
    pub fn mean_knowledge(&self, name: &str, step: usize) -> Option<f64> {
        let cond = self.condition(name)?;
        let row = cond.knowledge.get(step.checked_sub(1)?)?;
        Some(row.iter().map(|&k| k as f64).sum::<f64>() / row.len() as f64)
    }
}

/// One aggregated output row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub condition: String,
    /// 1-based step number.
    pub step: usize,
    pub mean_knowledge: f64,
    pub sd_knowledge: f64,
    pub n_agents: usize,
}

/// Randomly partner an even set of interactive agents into fixed dyads.
/// Returns `partners[i] = j` with `partners[j] = i` for every agent.
pub fn pair_dyads(agent_count: usize, rng: &mut impl Rng) -> Result<Vec<usize>, ModelError> {
    if agent_count % 2 != 0 {
        return Err(ModelError::BadDyad(format!(
            "cannot pair an odd number of agents ({agent_count})"
        )));
    }
    let mut ids: Vec<usize> = (0..agent_count).collect();
    ids.shuffle(rng);
    let mut partners = alloc::vec![0usize; agent_count];
    for pair in ids.chunks(2) {
        partners[pair[0]] = pair[1];
        partners[pair[1]] = pair[0];
    }
    Ok(partners)
}

/// Run one condition over the given topology instances (`topologies[i %
/// len]` is agent `i`'s graph; a single shared instance is the common case).
pub fn run_condition(
    condition: &Condition,
    config: &RunConfig,
    topologies: &[GraphTopology],
) -> Result<ConditionResult, ModelError> {
    let node_count = topologies[0].node_count();
    let n_agents = config.agents_per_condition;
    let schedule = &condition.schedule;

    let mut agents: Vec<LearnerState> = (0..n_agents)
        .map(|id| {
            LearnerState::with_weight_sampling(
                id,
                schedule.initial_mode,
                &topologies[id % topologies.len()],
                config.initial_weight,
                config.random_initial_weights,
                seed::agent_seed(config.master_seed, &condition.name, id as u64),
            )
        })
        .collect::<Result<_, _>>()?;

    // One practice order per agent. A schedule-pinned order wins; otherwise
    // either everyone shares the ascending order or each agent shuffles its
    // own from its private stream.
    let orders: Vec<Vec<usize>> = agents
        .iter_mut()
        .map(|agent| {
            if !schedule.practice_order.is_empty() {
                schedule.practice_order.clone()
            } else {
                let mut order: Vec<usize> = (0..node_count).collect();
                if config.random_practice_order {
                    agent.shuffle_order(&mut order);
                }
                order
            }
        })
        .collect();

    // Dyads are fixed for the whole run, even across mode switches;
    // partner_id is only populated while the agent is interactive.
    let partners = if schedule.modes().any(|m| m == EngagementMode::Interactive) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::pairing_seed(config.master_seed, &condition.name));
        Some(pair_dyads(n_agents, &mut rng)?)
    } else {
        None
    };
    let apply_partners = |agents: &mut [LearnerState]| {
        if let Some(partners) = &partners {
            for agent in agents.iter_mut() {
                agent.partner_id = if agent.mode == EngagementMode::Interactive {
                    Some(partners[agent.agent_id])
                } else {
                    None
                };
            }
        }
    };
    apply_partners(&mut agents);

    let mut knowledge = Vec::with_capacity(config.total_steps);
    let mut mastery_trace = config.record_mastery.then(Vec::new);

    for step in 0..config.total_steps {
        if let Some(new_mode) = schedule.mode_at_switch(step) {
            for agent in &mut agents {
                agent.mode = new_mode;
            }
            apply_partners(&mut agents);
        }

        let forced = schedule.forced_node(step);
        let nodes: Vec<Option<usize>> = agents
            .iter()
            .map(|a| forced.or_else(|| a.cursor_node(&orders[a.agent_id])))
            .collect();

        for id in 0..n_agents {
            if agents[id].mode == EngagementMode::Interactive {
                let partner = partners.as_ref().expect("interactive without pairing")[id];
                if partner < id {
                    continue; // dyad already stepped from the lower id
                }
                let (left, right) = agents.split_at_mut(partner);
                step_dyad(
                    &mut left[id],
                    &mut right[0],
                    &topologies[id % topologies.len()],
                    &config.params,
                    nodes[id],
                    nodes[partner],
                )?;
            } else if let Some(node) = nodes[id] {
                let topo = &topologies[id % topologies.len()];
                agents[id].practice_solo(topo, &config.params, node)?;
            }
        }

        for agent in &mut agents {
            agent.advance_cursor(&config.params, &orders[agent.agent_id]);
        }

        knowledge.push(
            agents
                .iter()
                .map(|a| a.knowledge_count(&config.params) as u32)
                .collect(),
        );
        if let Some(trace) = &mut mastery_trace {
            trace.push(agents.iter().map(|a| a.mastery[config.tracked_node]).collect());
        }
    }

    Ok(ConditionResult {
        name: condition.name.clone(),
        knowledge,
        mastery_trace,
        final_mastery: agents.iter().map(|a| a.mastery.clone()).collect(),
        final_weights: agents
            .iter()
            .map(|a| a.weights.as_slice().to_vec())
            .collect(),
    })
}

/// Step one dyad, tolerating idle peers: a peer with no practicing node
/// skips its mastery update and its exchange picks.
fn step_dyad(
    peer_a: &mut LearnerState,
    peer_b: &mut LearnerState,
    topology: &GraphTopology,
    params: &ModelParams,
    node_a: Option<usize>,
    node_b: Option<usize>,
) -> Result<(), ModelError> {
    match (node_a, node_b) {
        (Some(a), Some(b)) => practice_dyad(peer_a, peer_b, topology, params, a, b),
        // With one idle peer the other still updates mastery, but there is
        // no meaningful exchange pick for the idle side; model the round as
        // the active side alone.
        (Some(a), None) => {
            let updated = peer_a.mastery_update(topology, params, a)?;
            peer_a.mastery[a] = updated;
            half_exchange(peer_a, peer_b, topology, params, a)
        }
        (None, Some(b)) => {
            let updated = peer_b.mastery_update(topology, params, b)?;
            peer_b.mastery[b] = updated;
            half_exchange(peer_b, peer_a, topology, params, b)
        }
        (None, None) => Ok(()),
    }
}

fn half_exchange(
    picker: &mut LearnerState,
    other: &mut LearnerState,
    topology: &GraphTopology,
    params: &ModelParams,
    node: usize,
) -> Result<(), ModelError> {
    let (first, second) = params.reinforce_increments;
    for round_increment in [first, second] {
        let Some(edge_idx) = picker.pick_incident_edge(topology, node)? else {
            continue;
        };
        let wa = picker.weights.get(edge_idx);
        let wb = other.weights.get(edge_idx);
        if wa == wb {
            picker.weights.bump(edge_idx, round_increment);
            other.weights.bump(edge_idx, round_increment);
        } else {
            let max = wa.max(wb);
            picker.weights.raise_to(edge_idx, max);
            other.weights.raise_to(edge_idx, max);
        }
    }
    Ok(())
}

/// Run every condition of an experiment on the same topology and initial
/// weights, so conditions differ only in their schedules.
pub fn run_experiment(config: &RunConfig) -> Result<RunResult, ModelError> {
    config.validate()?;

    let instances = if config.independent_graphs {
        config.agents_per_condition
    } else {
        1
    };
    let topologies: Vec<GraphTopology> = (0..instances)
        .map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed::topology_seed(config.master_seed, i as u64));
            config.topology.build(&mut rng)
        })
        .collect::<Result<_, _>>()?;

    let conditions = config
        .conditions
        .iter()
        .map(|c| run_condition(c, config, &topologies))
        .collect::<Result<_, _>>()?;

    Ok(RunResult {
        scenario: config.name.clone(),
        total_steps: config.total_steps,
        agents_per_condition: config.agents_per_condition,
        tracked_node: config.tracked_node,
        conditions,
    })
}

/// Collapse a result into per-(condition, step) mean and population
/// standard deviation rows, sorted by condition name then step.
pub fn aggregate(result: &RunResult) -> Result<Vec<SummaryRow>, ModelError> {
    if result.conditions.is_empty() {
        return Err(ModelError::BadConfig("empty result".into()));
    }
    let mut order: Vec<&ConditionResult> = result.conditions.iter().collect();
    order.sort_by(|a, b| a.name.cmp(&b.name));

    let mut rows = Vec::new();
    for cond in order {
        for (step_idx, counts) in cond.knowledge.iter().enumerate() {
            let n = counts.len();
            let mean = counts.iter().map(|&k| k as f64).sum::<f64>() / n as f64;
            let var = counts
                .iter()
                .map(|&k| {
                    let d = k as f64 - mean;
                    d * d
                })
                .sum::<f64>()
                / n as f64;
            rows.push(SummaryRow {
                scenario: result.scenario.clone(),
                condition: cond.name.clone(),
                step: step_idx + 1,
                mean_knowledge: mean,
                sd_knowledge: libm::sqrt(var),
                n_agents: n,
            });
        }
    }
    Ok(rows)
}
