//! One agent and the four mode-specific practice procedures.
//!
//! Every mode shares the sigmoid mastery update; they differ in whether
//! neighbor support enters the update and in what happens to edge weights
//! afterwards. Passive and active practice never touch weights;
//! constructive practice reinforces up to two incident edges; interactive
//! dyads run a two-round weight exchange.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ModelError;
use crate::graph::{EdgeWeights, GraphTopology};

/// ICAP engagement mode, in increasing order of cognitive load.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EngagementMode {
    Passive,
    Active,
    Constructive,
    Interactive,
}

impl EngagementMode {
    pub const ALL: [EngagementMode; 4] = [
        EngagementMode::Passive,
        EngagementMode::Active,
        EngagementMode::Constructive,
        EngagementMode::Interactive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EngagementMode::Passive => "passive",
            EngagementMode::Active => "active",
            EngagementMode::Constructive => "constructive",
            EngagementMode::Interactive => "interactive",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ModelError> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ModelError::BadConfig(format!("unknown engagement mode '{s}'")))
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Neighbor-support indicator: 0 for passive, 1 otherwise.
    pub fn support_factor(self) -> f64 {
        if self == EngagementMode::Passive {
            0.0
        } else {
            1.0
        }
    }
}

/// Model parameters shared by every agent in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Per-node difficulty `b`, uniform across nodes.
    pub difficulty: f64,
    /// Cognitive load per mode, indexed passive..interactive; must be
    /// strictly increasing.
    pub cognitive_load: [f64; 4],
    /// Slope constant inside the sigmoid.
    pub gain: f64,
    /// A node counts as known when mastery strictly exceeds this.
    pub mastery_threshold: f64,
    /// Weight increments for the first and second reinforced edge.
    pub reinforce_increments: (f64, f64),
    /// If set, interactive peers also run constructive-style reinforcement
    /// on their own practicing node after the exchange. Off by default:
    /// the exchange is the interactive weight mechanism.
    pub interactive_also_reinforces: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            difficulty: 0.6,
            cognitive_load: [0.5, 0.6, 0.7, 0.8],
            gain: 3.5,
            mastery_threshold: 0.8,
            reinforce_increments: (0.15, 0.1),
            interactive_also_reinforces: false,
        }
    }
}

impl ModelParams {
    pub fn cl(&self, mode: EngagementMode) -> f64 {
        self.cognitive_load[mode.index()]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.gain > 0.0) {
            return Err(ModelError::BadConfig(format!(
                "gain must be positive, got {}",
                self.gain
            )));
        }
        if !(self.mastery_threshold > 0.0 && self.mastery_threshold < 1.0) {
            return Err(ModelError::BadConfig(format!(
                "mastery_threshold must lie in (0, 1), got {}",
                self.mastery_threshold
            )));
        }
        if self.reinforce_increments.0 < 0.0 || self.reinforce_increments.1 < 0.0 {
            return Err(ModelError::BadConfig(
                "reinforce increments must be non-negative".into(),
            ));
        }
        let cl = &self.cognitive_load;
        if !(cl[0] < cl[1] && cl[1] < cl[2] && cl[2] < cl[3]) {
            return Err(ModelError::BadConfig(format!(
                "cognitive load must increase strictly with engagement mode \
                 (got {} / {} / {} / {})",
                cl[0], cl[1], cl[2], cl[3]
            )));
        }
        Ok(())
    }
}

/// Logistic squashing function; keeps every mastery value inside (0, 1).
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

/// One simulated learner: mode, per-node mastery, a private weight copy,
/// and a private random stream.
#[derive(Debug, Clone)]
pub struct LearnerState {
    pub agent_id: usize,
    pub mode: EngagementMode,
    pub mastery: Vec<f64>,
    pub weights: EdgeWeights,
    pub partner_id: Option<usize>,
    /// Position within the run's practice order.
    pub order_pos: usize,
    rng: ChaCha8Rng,
}

impl LearnerState {
    pub fn new(
        agent_id: usize,
        mode: EngagementMode,
        topology: &GraphTopology,
        initial_weight: f64,
        seed: u64,
    ) -> Result<Self, ModelError> {
        Self::with_weight_sampling(agent_id, mode, topology, initial_weight, false, seed)
    }

    /// Like [`new`](Self::new) but with a choice of weight initializer:
    /// constant `initial_weight` on every edge, or per-edge draws from
    /// `[0, 2 * initial_weight]` taken from the agent's own stream.
    pub fn with_weight_sampling(
        agent_id: usize,
        mode: EngagementMode,
        topology: &GraphTopology,
        initial_weight: f64,
        random_weights: bool,
        seed: u64,
    ) -> Result<Self, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = if random_weights {
            EdgeWeights::sampled(topology, initial_weight, &mut rng)?
        } else {
            EdgeWeights::uniform(topology, initial_weight)?
        };
        Ok(LearnerState {
            agent_id,
            mode,
            mastery: alloc::vec![0.0; topology.node_count()],
            weights,
            partner_id: None,
            order_pos: 0,
            rng,
        })
    }

    /// The node the cursor points at, or `None` once the order is exhausted.
    pub fn cursor_node(&self, order: &[usize]) -> Option<usize> {
        order.get(self.order_pos).copied()
    }

    /// Shuffle a practice order in place from this agent's stream.
    pub fn shuffle_order(&mut self, order: &mut [usize]) {
        use rand::seq::SliceRandom;
        order.shuffle(&mut self.rng);
    }

    /// New mastery value for `node` under this agent's mode: the sigmoid of
    /// gain * (own mastery + support from neighbors weighted by the agent's
    /// own edge copy) minus difficulty and the mode's cognitive load.
    /// Pure; does not mutate the state.
    pub fn mastery_update(
        &self,
        topology: &GraphTopology,
        params: &ModelParams,
        node: usize,
    ) -> Result<f64, ModelError> {
        let mut support = 0.0;
        for &(neighbor, edge_idx) in topology.incident(node)? {
            support += self.mastery[neighbor] * self.weights.get(edge_idx);
        }
        let x = params.gain * (self.mastery[node] + self.mode.support_factor() * support)
            - (params.difficulty + params.cl(self.mode));
        Ok(sigmoid(x))
    }

    /// Constructive reinforcement: up to two distinct edges incident to
    /// `node`, sampled uniformly without replacement, get the first and
    /// second increment respectively. No incident edges, no effect.
    pub fn reinforce_edges(
        &mut self,
        topology: &GraphTopology,
        params: &ModelParams,
        node: usize,
    ) -> Result<(), ModelError> {
        let incident = topology.incident(node)?;
        let (first, second) = params.reinforce_increments;
        match incident.len() {
            0 => {}
            1 => self.weights.bump(incident[0].1, first),
            n => {
                let a = self.rng.gen_range(0..n);
                let mut b = self.rng.gen_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                self.weights.bump(incident[a].1, first);
                self.weights.bump(incident[b].1, second);
            }
        }
        Ok(())
    }

    /// Uniformly pick one edge incident to `node`, if any.
    pub fn pick_incident_edge(
        &mut self,
        topology: &GraphTopology,
        node: usize,
    ) -> Result<Option<usize>, ModelError> {
        let incident = topology.incident(node)?;
        Ok(match incident.len() {
            0 => None,
            n => Some(incident[self.rng.gen_range(0..n)].1),
        })
    }

    /// Count of nodes with mastery strictly above the threshold.
    pub fn knowledge_count(&self, params: &ModelParams) -> usize {
        self.mastery
            .iter()
            .filter(|&&m| m > params.mastery_threshold)
            .count()
    }

    /// Advance the cursor past `order[order_pos]` once its mastery strictly
    /// exceeds the threshold. An exhausted order leaves the agent idle.
    pub fn advance_cursor(&mut self, params: &ModelParams, order: &[usize]) {
        if let Some(&node) = order.get(self.order_pos) {
            if self.mastery[node] > params.mastery_threshold {
                self.order_pos += 1;
            }
        }
    }

    /// One solo practice step on `node` for passive, active, or constructive
    /// agents: mastery update first (against pre-step weights), then any
    /// mode-specific weight dynamics.
    pub fn practice_solo(
        &mut self,
        topology: &GraphTopology,
        params: &ModelParams,
        node: usize,
    ) -> Result<(), ModelError> {
        if self.mode == EngagementMode::Interactive {
            return Err(ModelError::BadDyad(
                "interactive agents must practice through their dyad".into(),
            ));
        }
        let updated = self.mastery_update(topology, params, node)?;
        self.mastery[node] = updated;
        if self.mode == EngagementMode::Constructive {
            self.reinforce_edges(topology, params, node)?;
        }
        Ok(())
    }
}

/// Two-round weight exchange between a partnered interactive dyad. Each
/// round, each peer picks one edge incident to its own practicing node from
/// its own stream; equal weights both grow by the round's increment (0.15
/// then 0.10 by default), unequal weights both snap to the maximum.
pub fn interactive_exchange(
    peer_a: &mut LearnerState,
    peer_b: &mut LearnerState,
    topology: &GraphTopology,
    params: &ModelParams,
    node_a: usize,
    node_b: usize,
) -> Result<(), ModelError> {
    check_dyad(peer_a, peer_b)?;
    let (first, second) = params.reinforce_increments;
    for round_increment in [first, second] {
        for own_node in [(true, node_a), (false, node_b)] {
            let (is_a, node) = own_node;
            let picked = if is_a {
                peer_a.pick_incident_edge(topology, node)?
            } else {
                peer_b.pick_incident_edge(topology, node)?
            };
            let Some(edge_idx) = picked else { continue };
            let wa = peer_a.weights.get(edge_idx);
            let wb = peer_b.weights.get(edge_idx);
            if wa == wb {
                peer_a.weights.bump(edge_idx, round_increment);
                peer_b.weights.bump(edge_idx, round_increment);
            } else {
                let max = wa.max(wb);
                peer_a.weights.raise_to(edge_idx, max);
                peer_b.weights.raise_to(edge_idx, max);
            }
        }
    }
    Ok(())
}

/// One practice step for a whole dyad: both peers update mastery on their
/// own practicing nodes against pre-step weights, then run the exchange.
pub fn practice_dyad(
    peer_a: &mut LearnerState,
    peer_b: &mut LearnerState,
    topology: &GraphTopology,
    params: &ModelParams,
    node_a: usize,
    node_b: usize,
) -> Result<(), ModelError> {
    check_dyad(peer_a, peer_b)?;
    let updated_a = peer_a.mastery_update(topology, params, node_a)?;
    let updated_b = peer_b.mastery_update(topology, params, node_b)?;
    peer_a.mastery[node_a] = updated_a;
    peer_b.mastery[node_b] = updated_b;
    interactive_exchange(peer_a, peer_b, topology, params, node_a, node_b)?;
    if params.interactive_also_reinforces {
        peer_a.reinforce_edges(topology, params, node_a)?;
        peer_b.reinforce_edges(topology, params, node_b)?;
    }
    Ok(())
}

fn check_dyad(peer_a: &LearnerState, peer_b: &LearnerState) -> Result<(), ModelError> {
    if peer_a.mode != EngagementMode::Interactive || peer_b.mode != EngagementMode::Interactive {
        return Err(ModelError::BadDyad("both peers must be interactive".into()));
    }
    if peer_a.partner_id != Some(peer_b.agent_id) || peer_b.partner_id != Some(peer_a.agent_id) {
        return Err(ModelError::BadDyad(format!(
            "agents {} and {} are not mutually partnered",
            peer_a.agent_id, peer_b.agent_id
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_plus() -> GraphTopology {
        // node 0 connected to 1, 2, 3; one stray edge (1, 2)
        GraphTopology::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap()
    }

    fn learner(mode: EngagementMode, topo: &GraphTopology, w0: f64, seed: u64) -> LearnerState {
        LearnerState::new(0, mode, topo, w0, seed).unwrap()
    }

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(-1.1) - 0.24974).abs() < 1e-5);
        for x in [-3.0, -0.7, 0.0, 0.4, 2.5] {
            assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn passive_update_from_zero() {
        let topo = GraphTopology::edgeless(4).unwrap();
        let agent = learner(EngagementMode::Passive, &topo, 0.0, 1);
        let m = agent.mastery_update(&topo, &ModelParams::default(), 0).unwrap();
        assert!((m - 0.24974).abs() < 1e-5);
    }

    #[test]
    fn passive_reaches_threshold_in_five_practices() {
        let topo = GraphTopology::edgeless(1).unwrap();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Passive, &topo, 0.0, 1);
        let expected = [0.24974, 0.443761, 0.611391, 0.738825, 0.81546];
        for (step, want) in expected.iter().enumerate() {
            agent.practice_solo(&topo, &params, 0).unwrap();
            assert!(
                (agent.mastery[0] - want).abs() < 1e-5,
                "step {step}: {} vs {want}",
                agent.mastery[0]
            );
        }
        assert!(agent.mastery[0] > 0.8);
    }

    #[test]
    fn active_update_uses_neighbor_support() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let mut agent = learner(EngagementMode::Active, &topo, 0.4, 1);
        agent.mastery[0] = 0.5;
        agent.mastery[1] = 1.0;
        let m = agent.mastery_update(&topo, &ModelParams::default(), 0).unwrap();
        // sigma(3.5 * (0.5 + 0.4) - 1.2) = sigma(1.95)
        assert!((m - 0.87545).abs() < 1e-4);
    }

    #[test]
    fn edgeless_active_equals_passive_with_different_cl() {
        let topo = GraphTopology::edgeless(3).unwrap();
        let params = ModelParams::default();
        let active = learner(EngagementMode::Active, &topo, 0.0, 1);
        let m = active.mastery_update(&topo, &params, 0).unwrap();
        assert!((m - sigmoid(-1.2)).abs() < 1e-12);
    }

    #[test]
    fn reinforce_bumps_two_distinct_edges() {
        let topo = triangle_plus();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Constructive, &topo, 0.3, 5);
        agent.reinforce_edges(&topo, &params, 0).unwrap();
        let mut touched: Vec<f64> = topo
            .incident(0)
            .unwrap()
            .iter()
            .map(|&(_, e)| agent.weights.get(e))
            .collect();
        touched.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in touched.iter().zip([0.3, 0.4, 0.45]) {
            assert!((got - want).abs() < 1e-12, "{touched:?}");
        }
    }

    #[test]
    fn reinforce_single_edge_gets_first_increment() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Constructive, &topo, 0.3, 5);
        agent.reinforce_edges(&topo, &params, 0).unwrap();
        assert!((agent.weights.get(0) - 0.45).abs() < 1e-12);
    }

    #[test]
    fn reinforce_on_isolated_node_is_noop() {
        let topo = GraphTopology::from_edges(3, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Constructive, &topo, 0.3, 5);
        agent.reinforce_edges(&topo, &params, 2).unwrap();
        assert_eq!(agent.weights.as_slice(), [0.3]);
    }

    #[test]
    fn reinforce_clamps_at_one() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Constructive, &topo, 0.95, 5);
        agent.reinforce_edges(&topo, &params, 0).unwrap();
        assert_eq!(agent.weights.get(0), 1.0);
    }

    fn dyad(topo: &GraphTopology, w0_a: f64, w0_b: f64) -> (LearnerState, LearnerState) {
        let mut a = LearnerState::new(0, EngagementMode::Interactive, topo, w0_a, 11).unwrap();
        let mut b = LearnerState::new(1, EngagementMode::Interactive, topo, w0_b, 12).unwrap();
        a.partner_id = Some(1);
        b.partner_id = Some(0);
        (a, b)
    }

    #[test]
    fn exchange_equal_weights_increment_together() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let (mut a, mut b) = dyad(&topo, 0.3, 0.3);
        interactive_exchange(&mut a, &mut b, &topo, &params, 0, 0).unwrap();
        // single edge: round one raises both to 0.45 on the first pick, the
        // remaining picks keep the copies equal
        assert_eq!(a.weights.get(0), b.weights.get(0));
        assert!(a.weights.get(0) > 0.3);
    }

    #[test]
    fn exchange_unequal_weights_take_maximum() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let (mut a, mut b) = dyad(&topo, 0.2, 0.6);
        // one manual round against each copy: the first pick must equalize at 0.6
        let before_max = a.weights.get(0).max(b.weights.get(0));
        interactive_exchange(&mut a, &mut b, &topo, &params, 0, 0).unwrap();
        assert_eq!(a.weights.get(0), b.weights.get(0));
        assert!(a.weights.get(0) >= before_max);
    }

    #[test]
    fn exchange_on_edgeless_graph_changes_nothing() {
        let topo = GraphTopology::edgeless(4).unwrap();
        let params = ModelParams::default();
        let (mut a, mut b) = dyad(&topo, 0.0, 0.0);
        interactive_exchange(&mut a, &mut b, &topo, &params, 0, 1).unwrap();
        assert!(a.weights.as_slice().is_empty());
    }

    #[test]
    fn exchange_rejects_unpartnered_agents() {
        let topo = GraphTopology::from_edges(2, &[(0, 1)]).unwrap();
        let params = ModelParams::default();
        let mut a = LearnerState::new(0, EngagementMode::Interactive, &topo, 0.3, 1).unwrap();
        let mut b = LearnerState::new(1, EngagementMode::Interactive, &topo, 0.3, 2).unwrap();
        assert!(interactive_exchange(&mut a, &mut b, &topo, &params, 0, 0).is_err());
        a.partner_id = Some(1);
        b.partner_id = Some(0);
        b.mode = EngagementMode::Active;
        assert!(interactive_exchange(&mut a, &mut b, &topo, &params, 0, 0).is_err());
    }

    #[test]
    fn passive_practice_keeps_weights_and_other_masteries() {
        let topo = triangle_plus();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Passive, &topo, 0.3, 9);
        agent.mastery = alloc::vec![0.1, 0.2, 0.3, 0.4];
        let weights_before = agent.weights.clone();
        agent.practice_solo(&topo, &params, 1).unwrap();
        assert_eq!(agent.weights, weights_before);
        assert_eq!(agent.mastery[0], 0.1);
        assert_eq!(agent.mastery[2], 0.3);
        assert_eq!(agent.mastery[3], 0.4);
        assert_ne!(agent.mastery[1], 0.2);
    }

    #[test]
    fn active_practice_never_touches_weights() {
        let topo = triangle_plus();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Active, &topo, 0.3, 9);
        for _ in 0..20 {
            agent.practice_solo(&topo, &params, 0).unwrap();
        }
        assert!(agent.weights.as_slice().iter().all(|&w| w == 0.3));
    }

    #[test]
    fn cursor_advances_only_past_threshold() {
        let topo = GraphTopology::edgeless(3).unwrap();
        let params = ModelParams::default();
        let order = [0, 1, 2];
        let mut agent = learner(EngagementMode::Passive, &topo, 0.0, 1);
        agent.mastery[0] = 0.8; // boundary: strict inequality, no advance
        agent.advance_cursor(&params, &order);
        assert_eq!(agent.cursor_node(&order), Some(0));
        agent.mastery[0] = 0.8155;
        agent.advance_cursor(&params, &order);
        assert_eq!(agent.cursor_node(&order), Some(1));
        agent.mastery[1] = 0.9;
        agent.mastery[2] = 0.9;
        agent.advance_cursor(&params, &order);
        agent.advance_cursor(&params, &order);
        assert_eq!(agent.cursor_node(&order), None);
        agent.advance_cursor(&params, &order); // idle stays idle
        assert_eq!(agent.cursor_node(&order), None);
    }

    #[test]
    fn knowledge_count_uses_strict_threshold() {
        let topo = GraphTopology::edgeless(5).unwrap();
        let params = ModelParams::default();
        let mut agent = learner(EngagementMode::Passive, &topo, 0.0, 1);
        assert_eq!(agent.knowledge_count(&params), 0);
        agent.mastery[0] = 0.81;
        agent.mastery[1] = 0.80;
        agent.mastery[2] = 0.79;
        assert_eq!(agent.knowledge_count(&params), 1);
    }

    #[test]
    fn params_validation_catches_bad_values() {
        let mut p = ModelParams::default();
        assert!(p.validate().is_ok());
        p.cognitive_load = [0.5, 0.5, 0.7, 0.8];
        assert!(p.validate().is_err());
        p = ModelParams::default();
        p.gain = 0.0;
        assert!(p.validate().is_err());
        p = ModelParams::default();
        p.mastery_threshold = 1.0;
        assert!(p.validate().is_err());
        p = ModelParams::default();
        p.reinforce_increments = (-0.1, 0.1);
        assert!(p.validate().is_err());
    }
}
