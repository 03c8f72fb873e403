//! Config-file loading and command-line parameter overrides.
//!
//! Config files are TOML with optional `[graph]`, `[params]`, `[run]`, and
//! `[[conditions]]` sections; every field defaults to the baseline
//! four-condition scenario, so an empty file reproduces it exactly.

use std::path::Path;

use abicap_core::engine::{Condition, Schedule, TopologySpec};
use abicap_core::{EngagementMode, ModelError, RunConfig, ScenarioId};
use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    graph: Option<GraphSection>,
    params: Option<ParamsSection>,
    run: Option<RunSection>,
    conditions: Option<Vec<ConditionSection>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    nodes: Option<usize>,
    mean_degree: Option<f64>,
    rewire_prob: Option<f64>,
    edgeless: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    difficulty: Option<f64>,
    cl_passive: Option<f64>,
    cl_active: Option<f64>,
    cl_constructive: Option<f64>,
    cl_interactive: Option<f64>,
    gain: Option<f64>,
    mastery_threshold: Option<f64>,
    reinforce_first: Option<f64>,
    reinforce_second: Option<f64>,
    interactive_also_reinforces: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    name: Option<String>,
    initial_weight: Option<f64>,
    random_initial_weights: Option<bool>,
    agents_per_condition: Option<usize>,
    total_steps: Option<usize>,
    master_seed: Option<u64>,
    independent_graphs: Option<bool>,
    random_practice_order: Option<bool>,
    record_mastery: Option<bool>,
    tracked_node: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionSection {
    name: String,
    mode: String,
    #[serde(default)]
    mode_switches: Vec<(usize, String)>,
    #[serde(default)]
    forced_practice: Vec<(usize, usize, usize)>,
    #[serde(default)]
    practice_order: Vec<usize>,
}

/// Parse a TOML config file into a full run configuration. Every field is
/// optional; omissions fall back to the baseline scenario defaults.
pub fn load_config_file(path: &Path, master_seed: u64) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let file: FileConfig = toml::from_str(&text)
        .with_context(|| format!("parsing config file {}", path.display()))?;

    let mut config = ScenarioId::IcapBaseline.config(master_seed);

    if let Some(graph) = &file.graph {
        let nodes = graph.nodes.unwrap_or(config.topology.node_count());
        config.topology = if graph.edgeless.unwrap_or(false) {
            TopologySpec::Edgeless { nodes }
        } else {
            let (default_degree, default_beta) = match config.topology {
                TopologySpec::SmallWorld {
                    mean_degree,
                    rewire_prob,
                    ..
                } => (mean_degree, rewire_prob),
                TopologySpec::Edgeless { .. } => (3.0, 0.0),
            };
            TopologySpec::SmallWorld {
                nodes,
                mean_degree: graph.mean_degree.unwrap_or(default_degree),
                rewire_prob: graph.rewire_prob.unwrap_or(default_beta),
            }
        };
    }

    if let Some(params) = &file.params {
        let p = &mut config.params;
        set_opt(&mut p.difficulty, params.difficulty);
        set_opt(&mut p.cognitive_load[0], params.cl_passive);
        set_opt(&mut p.cognitive_load[1], params.cl_active);
        set_opt(&mut p.cognitive_load[2], params.cl_constructive);
        set_opt(&mut p.cognitive_load[3], params.cl_interactive);
        set_opt(&mut p.gain, params.gain);
        set_opt(&mut p.mastery_threshold, params.mastery_threshold);
        set_opt(&mut p.reinforce_increments.0, params.reinforce_first);
        set_opt(&mut p.reinforce_increments.1, params.reinforce_second);
        set_opt(&mut p.interactive_also_reinforces, params.interactive_also_reinforces);
    }

    if let Some(run) = &file.run {
        if let Some(name) = &run.name {
            config.name = name.clone();
        }
        set_opt(&mut config.initial_weight, run.initial_weight);
        set_opt(&mut config.random_initial_weights, run.random_initial_weights);
        set_opt(&mut config.agents_per_condition, run.agents_per_condition);
        set_opt(&mut config.total_steps, run.total_steps);
        set_opt(&mut config.master_seed, run.master_seed);
        set_opt(&mut config.independent_graphs, run.independent_graphs);
        set_opt(&mut config.random_practice_order, run.random_practice_order);
        set_opt(&mut config.record_mastery, run.record_mastery);
        set_opt(&mut config.tracked_node, run.tracked_node);
    }

    if let Some(conditions) = &file.conditions {
        config.conditions = conditions
            .iter()
            .map(|c| {
                let mut schedule = Schedule::constant(parse_mode(&c.mode)?);
                schedule.mode_switches = c
                    .mode_switches
                    .iter()
                    .map(|(step, mode)| Ok((*step, parse_mode(mode)?)))
                    .collect::<Result<_>>()?;
                schedule.forced_practice = c.forced_practice.clone();
                schedule.practice_order = c.practice_order.clone();
                Ok(Condition::new(c.name.clone(), schedule))
            })
            .collect::<Result<_>>()?;
    }

    config
        .validate()
        .map_err(|e| config_error(e, path))?;
    Ok(config)
}

fn set_opt<T: Clone>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_mode(s: &str) -> Result<EngagementMode> {
    EngagementMode::parse(s).map_err(|e| anyhow!("{e}"))
}

fn config_error(e: ModelError, path: &Path) -> anyhow::Error {
    match &e {
        ModelError::BadConfig(msg) if msg.contains("cognitive load") => anyhow!(
            "{}: {msg}; cognitive load must rise strictly with the mode's degree of engagement",
            path.display()
        ),
        _ => anyhow!("{}: {e}", path.display()),
    }
}

/// Every key accepted by [`apply_override`], in documentation order.
pub const OVERRIDE_KEYS: [&str; 24] = [
    "name",
    "nodes",
    "mean_degree",
    "rewire_prob",
    "edgeless",
    "initial_weight",
    "random_initial_weights",
    "agents_per_condition",
    "total_steps",
    "master_seed",
    "independent_graphs",
    "random_practice_order",
    "record_mastery",
    "tracked_node",
    "difficulty",
    "cl_passive",
    "cl_active",
    "cl_constructive",
    "cl_interactive",
    "gain",
    "mastery_threshold",
    "reinforce_first",
    "reinforce_second",
    "interactive_also_reinforces",
];

/// Apply one `key=value` override to a run configuration. Unknown keys and
/// unparsable values are rejected.
pub fn apply_override(config: &mut RunConfig, spec: &str) -> Result<()> {
    let (key, value) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("override '{spec}' is not of the form key=value"))?;

    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e| anyhow!("invalid value '{value}' for {key}: {e}"))
    }

    match key {
        "name" => config.name = value.to_string(),
        "nodes" => set_topology_nodes(config, parse(key, value)?),
        "mean_degree" => {
            let v: f64 = parse(key, value)?;
            set_small_world(config, |d, _| *d = v)?;
        }
        "rewire_prob" => {
            let v: f64 = parse(key, value)?;
            set_small_world(config, |_, b| *b = v)?;
        }
        "edgeless" => {
            let flag: bool = parse(key, value)?;
            let nodes = config.topology.node_count();
            if flag {
                config.topology = TopologySpec::Edgeless { nodes };
            } else if matches!(config.topology, TopologySpec::Edgeless { .. }) {
                config.topology = TopologySpec::SmallWorld {
                    nodes,
                    mean_degree: 3.0,
                    rewire_prob: 0.0,
                };
            }
        }
        "initial_weight" => config.initial_weight = parse(key, value)?,
        "random_initial_weights" => config.random_initial_weights = parse(key, value)?,
        "agents_per_condition" => config.agents_per_condition = parse(key, value)?,
        "total_steps" => config.total_steps = parse(key, value)?,
        "master_seed" => config.master_seed = parse(key, value)?,
        "independent_graphs" => config.independent_graphs = parse(key, value)?,
        "random_practice_order" => config.random_practice_order = parse(key, value)?,
        "record_mastery" => config.record_mastery = parse(key, value)?,
        "tracked_node" => config.tracked_node = parse(key, value)?,
        "difficulty" => config.params.difficulty = parse(key, value)?,
        "cl_passive" => config.params.cognitive_load[0] = parse(key, value)?,
        "cl_active" => config.params.cognitive_load[1] = parse(key, value)?,
        "cl_constructive" => config.params.cognitive_load[2] = parse(key, value)?,
        "cl_interactive" => config.params.cognitive_load[3] = parse(key, value)?,
        "gain" => config.params.gain = parse(key, value)?,
        "mastery_threshold" => config.params.mastery_threshold = parse(key, value)?,
        "reinforce_first" => config.params.reinforce_increments.0 = parse(key, value)?,
        "reinforce_second" => config.params.reinforce_increments.1 = parse(key, value)?,
        "interactive_also_reinforces" => config.params.interactive_also_reinforces = parse(key, value)?,
        _ => bail!(
            "unknown override key '{key}'; valid keys: {}",
            OVERRIDE_KEYS.join(", ")
        ),
    }
    Ok(())
}

fn set_topology_nodes(config: &mut RunConfig, nodes: usize) {
    config.topology = match config.topology {
        TopologySpec::SmallWorld {
            mean_degree,
            rewire_prob,
            ..
        } => TopologySpec::SmallWorld {
            nodes,
            mean_degree,
            rewire_prob,
        },
        TopologySpec::Edgeless { .. } => TopologySpec::Edgeless { nodes },
    };
}

fn set_small_world(config: &mut RunConfig, apply: impl FnOnce(&mut f64, &mut f64)) -> Result<()> {
    match &mut config.topology {
        TopologySpec::SmallWorld {
            mean_degree,
            rewire_prob,
            ..
        } => {
            apply(mean_degree, rewire_prob);
            Ok(())
        }
        TopologySpec::Edgeless { .. } => {
            bail!("graph overrides need a small-world topology; set edgeless=false first")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_file_equals_baseline_defaults() {
        let f = write_temp("");
        let loaded = load_config_file(f.path(), 42).unwrap();
        assert_eq!(loaded, ScenarioId::IcapBaseline.config(42));
    }

    #[test]
    fn partial_file_overrides_only_named_fields() {
        let f = write_temp("[graph]\nnodes = 10\n");
        let loaded = load_config_file(f.path(), 42).unwrap();
        assert_eq!(loaded.topology.node_count(), 10);
        let baseline = ScenarioId::IcapBaseline.config(42);
        assert_eq!(loaded.params, baseline.params);
        assert_eq!(loaded.total_steps, baseline.total_steps);
    }

    #[test]
    fn non_increasing_cl_is_rejected_with_field_context() {
        let f = write_temp("[params]\ncl_active = 0.5\n");
        let err = load_config_file(f.path(), 42).unwrap_err().to_string();
        assert!(err.contains("cognitive load"), "{err}");
    }

    #[test]
    fn unknown_section_key_is_rejected() {
        let f = write_temp("[run]\nbogus = 3\n");
        assert!(load_config_file(f.path(), 42).is_err());
    }

    #[test]
    fn conditions_section_replaces_default_conditions() {
        let f = write_temp(
            "[[conditions]]\nname = \"switcher\"\nmode = \"constructive\"\n\
             mode_switches = [[20, \"active\"]]\nforced_practice = [[20, 24, 0]]\n",
        );
        let loaded = load_config_file(f.path(), 7).unwrap();
        assert_eq!(loaded.conditions.len(), 1);
        let schedule = &loaded.conditions[0].schedule;
        assert_eq!(schedule.initial_mode, EngagementMode::Constructive);
        assert_eq!(schedule.mode_switches, vec![(20, EngagementMode::Active)]);
        assert_eq!(schedule.forced_practice, vec![(20, 24, 0)]);
    }

    #[test]
    fn every_override_key_changes_the_config() {
        let values = [
            ("name", "other"),
            ("nodes", "12"),
            ("mean_degree", "2.5"),
            ("rewire_prob", "0.5"),
            ("edgeless", "true"),
            ("initial_weight", "0.25"),
            ("random_initial_weights", "true"),
            ("agents_per_condition", "10"),
            ("total_steps", "12"),
            ("master_seed", "99"),
            ("independent_graphs", "true"),
            ("random_practice_order", "true"),
            ("record_mastery", "true"),
            ("tracked_node", "2"),
            ("difficulty", "0.55"),
            ("cl_passive", "0.41"),
            ("cl_active", "0.59"),
            ("cl_constructive", "0.71"),
            ("cl_interactive", "0.82"),
            ("gain", "3.0"),
            ("mastery_threshold", "0.75"),
            ("reinforce_first", "0.2"),
            ("reinforce_second", "0.05"),
            ("interactive_also_reinforces", "true"),
        ];
        assert_eq!(values.len(), OVERRIDE_KEYS.len());
        for (key, value) in values {
            assert!(OVERRIDE_KEYS.contains(&key), "{key} missing from key list");
            let mut config = ScenarioId::IcapBaseline.config(42);
            let before = config.clone();
            apply_override(&mut config, &format!("{key}={value}")).unwrap();
            assert_ne!(config, before, "override {key} had no effect");
        }
    }

    #[test]
    fn unknown_override_key_is_rejected() {
        let mut config = ScenarioId::IcapBaseline.config(42);
        let err = apply_override(&mut config, "frobnicate=1").unwrap_err().to_string();
        assert!(err.contains("unknown override key"), "{err}");
        assert!(err.contains("gain"), "{err}");
        assert!(apply_override(&mut config, "no_equals_sign").is_err());
        assert!(apply_override(&mut config, "gain=abc").is_err());
    }

    #[test]
    fn graph_overrides_on_edgeless_topology_are_rejected() {
        let mut config = ScenarioId::Edgeless.config(42);
        assert!(apply_override(&mut config, "rewire_prob=0.5").is_err());
        apply_override(&mut config, "edgeless=false").unwrap();
        assert!(apply_override(&mut config, "rewire_prob=0.5").is_ok());
    }
}
