//! Agent-based model of procedural learning.
//!
//! Learners practice knowledge components (nodes of an undirected graph)
//! under one of four engagement modes (passive, active, constructive,
//! interactive). Mastery of the practicing node follows a sigmoid update
//! that trades neighbor support against the mode's cognitive load;
//! constructive and interactive practice additionally strengthen edge
//! weights. The [`engine`] module drives whole populations through
//! scheduled runs, and [`scenarios`] ships ready-made experiment configs.
//!
//! The crate is `no_std` (with `alloc`); all randomness flows through
//! per-agent seeded streams so every run is reproducible bit-for-bit.

#![no_std]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod graph;
pub mod learner;
pub mod scenarios;
pub mod seed;

pub use engine::{Condition, RunConfig, RunResult, Schedule, TopologySpec};
pub use error::ModelError;
pub use graph::{EdgeWeights, GraphTopology};
pub use learner::{EngagementMode, LearnerState, ModelParams};
pub use scenarios::ScenarioId;
