//! Knowledge-component graph topologies and per-agent edge-weight tables.
//!
//! A [`GraphTopology`] is immutable once built and shared by every agent in
//! a run; each agent keeps a private [`EdgeWeights`] copy, so learners
//! diverge in weights but never in structure.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::ModelError;

/// Undirected graph over knowledge components. No self-loops, no duplicate
/// edges; edges are stored normalized with the smaller index first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphTopology {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    /// Per node: (neighbor, edge index) pairs, ascending by neighbor.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl GraphTopology {
    fn from_edge_set(node_count: usize, set: BTreeSet<(usize, usize)>) -> Self {
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = alloc::vec![Vec::new(); node_count];
        for (idx, &(a, b)) in edges.iter().enumerate() {
            adjacency[a].push((b, idx));
            adjacency[b].push((a, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        GraphTopology {
            node_count,
            edges,
            adjacency,
        }
    }

    /// Topology with no edges at all; every mode then degenerates to the
    /// passive update (modulo cognitive load).
    pub fn edgeless(node_count: usize) -> Result<Self, ModelError> {
        if node_count == 0 {
            return Err(ModelError::OutOfRange {
                what: "node_count",
                detail: format!("{node_count} (must be >= 1)"),
            });
        }
        Ok(Self::from_edge_set(node_count, BTreeSet::new()))
    }

    /// Topology from an explicit edge list. Rejects self-loops and
    /// out-of-range indices; duplicate edges collapse to one.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self, ModelError> {
        if node_count == 0 {
            return Err(ModelError::OutOfRange {
                what: "node_count",
                detail: format!("{node_count} (must be >= 1)"),
            });
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(ModelError::BadNodeIndex {
                    node: a.max(b),
                    node_count,
                });
            }
            if a == b {
                return Err(ModelError::OutOfRange {
                    what: "edge",
                    detail: format!("self-loop at node {a}"),
                });
            }
            set.insert(normalize(a, b));
        }
        Ok(Self::from_edge_set(node_count, set))
    }

    /// Small-world graph in the Watts-Strogatz style, generalized to
    /// fractional mean degree: an even-degree ring lattice is topped up
    /// with uniformly random extra edges until the edge count is exactly
    /// `round(node_count * mean_degree / 2)`, then each lattice edge is
    /// independently rewired with probability `rewire_prob`.
    pub fn small_world(
        node_count: usize,
        mean_degree: f64,
        rewire_prob: f64,
        rng: &mut impl Rng,
    ) -> Result<Self, ModelError> {
        if node_count < 3 {
            return Err(ModelError::OutOfRange {
                what: "node_count",
                detail: format!("{node_count} (must be >= 3)"),
            });
        }
        if !(mean_degree > 0.0 && mean_degree < node_count as f64) {
            return Err(ModelError::OutOfRange {
                what: "mean_degree",
                detail: format!("{mean_degree} (must be in (0, node_count))"),
            });
        }
        if !(0.0..=1.0).contains(&rewire_prob) {
            return Err(ModelError::OutOfRange {
                what: "rewire_prob",
                detail: format!("{rewire_prob} (must be in [0, 1])"),
            });
        }

        let target_edges = libm::round(node_count as f64 * mean_degree / 2.0) as usize;
        let half_k = (libm::floor(mean_degree / 2.0) as usize).min((node_count - 1) / 2);

        let mut set = BTreeSet::new();
        // (anchor, other) pairs; the non-anchor endpoint is the one rewired.
        let mut lattice = Vec::new();
        for i in 0..node_count {
            for offset in 1..=half_k {
                let j = (i + offset) % node_count;
                if set.insert(normalize(i, j)) {
                    lattice.push((i, j));
                }
            }
        }

        // Random extra edges make up the difference between the even-degree
        // lattice and the requested mean degree.
        while set.len() < target_edges {
            let a = rng.gen_range(0..node_count);
            let b = rng.gen_range(0..node_count);
            if a != b {
                set.insert(normalize(a, b));
            }
        }

        for (anchor, other) in lattice {
            if !rng.gen_bool(rewire_prob) {
                continue;
            }
            // Replace the non-anchor endpoint; bounded retries in case the
            // anchor is already connected to almost everything.
            for _ in 0..4 * node_count {
                let candidate = rng.gen_range(0..node_count);
                if candidate == anchor || set.contains(&normalize(anchor, candidate)) {
                    continue;
                }
                set.remove(&normalize(anchor, other));
                set.insert(normalize(anchor, candidate));
                break;
            }
        }

        debug_assert_eq!(set.len(), target_edges);
        Ok(Self::from_edge_set(node_count, set))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge endpoints by edge index, normalized `(low, high)`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> Result<impl Iterator<Item = usize> + '_, ModelError> {
        Ok(self.incident(node)?.iter().map(|&(n, _)| n))
    }

    /// `(neighbor, edge index)` pairs incident to `node`, ascending by neighbor.
    pub fn incident(&self, node: usize) -> Result<&[(usize, usize)], ModelError> {
        self.adjacency.get(node).map(Vec::as_slice).ok_or(ModelError::BadNodeIndex {
            node,
            node_count: self.node_count,
        })
    }
}

fn normalize(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One agent's copy of the edge strengths, indexed parallel to
/// [`GraphTopology::edges`]. Weights live in `[0, 1]` and only ever grow.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    weights: Vec<f64>,
}

impl EdgeWeights {
    pub fn uniform(topology: &GraphTopology, initial_weight: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&initial_weight) {
            return Err(ModelError::OutOfRange {
                what: "initial_weight",
                detail: format!("{initial_weight} (must be in [0, 1])"),
            });
        }
        Ok(EdgeWeights {
            weights: alloc::vec![initial_weight; topology.edge_count()],
        })
    }

    /// Per-edge weights drawn uniformly from `[0, 2 * mean_weight]`, so the
    /// expected weight matches the constant initializer.
    pub fn sampled(
        topology: &GraphTopology,
        mean_weight: f64,
        rng: &mut impl Rng,
    ) -> Result<Self, ModelError> {
        if !(0.0..=0.5).contains(&mean_weight) {
            return Err(ModelError::OutOfRange {
                what: "initial_weight",
                detail: format!("{mean_weight} (must be in [0, 0.5] when sampled)"),
            });
        }
        Ok(EdgeWeights {
            weights: (0..topology.edge_count())
                .map(|_| rng.gen_range(0.0..=2.0 * mean_weight))
                .collect(),
        })
    }

    pub fn get(&self, edge_idx: usize) -> f64 {
        self.weights[edge_idx]
    }

    /// Add `amount` to an edge weight, clamping at the 1.0 ceiling.
    pub fn bump(&mut self, edge_idx: usize, amount: f64) {
        let w = &mut self.weights[edge_idx];
        *w = (*w + amount).min(1.0);
    }

    /// Raise an edge weight to `floor` if it is currently below it.
    pub fn raise_to(&mut self, edge_idx: usize, floor: f64) {
        let w = &mut self.weights[edge_idx];
        if *w < floor {
            *w = floor.min(1.0);
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}
