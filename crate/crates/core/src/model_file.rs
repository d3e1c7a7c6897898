//! JSON model format.
//!
//! ```json
//! {
//!   "alphabet":   { "events": ["σ1", "σ2", "σ3"], "controllable": ["σ1", "σ2"] },
//!   "plant":      { "states": ["1", "2"], "initial": "1", "transitions": [["1", "σ3", "2"]] },
//!   "supervisor": { "decisions": { "1": [0, 0], "2": [1, 0] } },
//!   "channels":   [ { "events": ["σ1", "σ2"], "max_delay": 2, "max_loss": 1 } ]
//! }
//! ```
//!
//! Decision vectors list one bit per controllable event in alphabet order.
//! Without `supervisor.automaton` the decisions are keyed by plant state.
//! Without `channels` every controllable event gets its own delay- and
//! loss-free channel.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automata::{Dfa, EventAlphabet, StateId};
use crate::channel::ChannelParams;
use crate::model::Model;
use crate::network::{ChannelGroup, ChannelPartition};
use crate::supervisor::{DecisionVector, SupervisorMap};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: AlphabetSpec,
    pub plant: AutomatonSpec,
    pub supervisor: SupervisorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSpec {
    pub events: Vec<String>,
    #[serde(default)]
    pub controllable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonSpec {
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default)]
    pub transitions: Vec<TransitionSpec>,
}

/// `[source, event, target]`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionSpec(pub String, pub String, pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupervisorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automaton: Option<AutomatonSpec>,
    pub decisions: BTreeMap<String, Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub events: Vec<String>,
    #[serde(default)]
    pub max_delay: u32,
    #[serde(default)]
    pub max_loss: u32,
}

/// A semantic problem in a model file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    /// Path of the offending element, e.g. `plant.transitions[3]`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{} validation error(s):\n{}", .0.len(), .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<ValidationIssue>),
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    ModelFile::from_json(text)?.validate().map_err(ModelError::Invalid)
}

struct Issues(Vec<ValidationIssue>);

impl Issues {
    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(ValidationIssue {
            location: location.into(),
            message: message.into(),
        });
    }
}

fn check_automaton(loc: &str, spec: &AutomatonSpec, events: &HashSet<&str>, issues: &mut Issues) {
    if spec.states.is_empty() {
        issues.push(format!("{loc}.states"), "at least one state is required");
    }
    let mut seen = HashSet::new();
    for (i, s) in spec.states.iter().enumerate() {
        if s.is_empty() {
            issues.push(format!("{loc}.states[{i}]"), "state identifier is empty");
        } else if !seen.insert(s.as_str()) {
            issues.push(format!("{loc}.states[{i}]"), format!("duplicate state `{s}`"));
        }
    }
    if !seen.contains(spec.initial.as_str()) {
        issues.push(
            format!("{loc}.initial"),
            format!("initial state `{}` is not declared", spec.initial),
        );
    }
    let mut targets: HashMap<(&str, &str), &str> = HashMap::new();
    for (i, TransitionSpec(from, ev, to)) in spec.transitions.iter().enumerate() {
        let at = format!("{loc}.transitions[{i}]");
        let mut ok = true;
        for s in [from, to] {
            if !seen.contains(s.as_str()) {
                issues.push(&at, format!("unknown state `{s}`"));
                ok = false;
            }
        }
        if !events.contains(ev.as_str()) {
            issues.push(&at, format!("unknown event `{ev}`"));
            ok = false;
        }
        if ok {
            match targets.get(&(from.as_str(), ev.as_str())) {
                Some(&prev) if prev != to => issues.push(
                    &at,
                    format!("state `{from}` already has a `{ev}` transition (to `{prev}`)"),
                ),
                _ => {
                    targets.insert((from, ev), to);
                }
            }
        }
    }
}

fn build_automaton(spec: &AutomatonSpec, alphabet: &EventAlphabet) -> Dfa {
    let initial = spec.states.iter().position(|s| *s == spec.initial).expect("checked");
    let mut dfa = Dfa::new(alphabet.clone(), spec.states.clone(), StateId(initial)).expect("checked");
    for TransitionSpec(from, ev, to) in &spec.transitions {
        let from = dfa.state_id(from).expect("checked");
        let to = dfa.state_id(to).expect("checked");
        let ev = alphabet.id(ev).expect("checked");
        dfa.add_transition(from, ev, to).expect("checked");
    }
    dfa
}

fn automaton_spec(dfa: &Dfa) -> AutomatonSpec {
    let ab = dfa.alphabet();
    AutomatonSpec {
        states: dfa.state_names().to_vec(),
        initial: dfa.state_name(dfa.initial()).to_string(),
        transitions: dfa
            .transitions()
            .map(|(f, e, t)| {
                TransitionSpec(
                    dfa.state_name(f).to_string(),
                    ab.name(e).to_string(),
                    dfa.state_name(t).to_string(),
                )
            })
            .collect(),
    }
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            ModelError::Syntax {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Checks every reference and structural constraint, reporting all
    /// problems found rather than stopping at the first.
    pub fn validate(&self) -> Result<Model, Vec<ValidationIssue>> {
        let mut issues = Issues(Vec::new());

        let mut events: HashSet<&str> = HashSet::new();
        for (i, e) in self.alphabet.events.iter().enumerate() {
            if e.is_empty() {
                issues.push(format!("alphabet.events[{i}]"), "event identifier is empty");
            } else if !events.insert(e) {
                issues.push(format!("alphabet.events[{i}]"), format!("duplicate event `{e}`"));
            }
        }
        let mut controllable: HashSet<&str> = HashSet::new();
        for (i, c) in self.alphabet.controllable.iter().enumerate() {
            if !events.contains(c.as_str()) {
                issues.push(
                    format!("alphabet.controllable[{i}]"),
                    format!("`{c}` is not a declared event"),
                );
            } else if !controllable.insert(c) {
                issues.push(format!("alphabet.controllable[{i}]"), format!("`{c}` listed twice"));
            }
        }

        check_automaton("plant", &self.plant, &events, &mut issues);
        let (sup_loc, sup_spec) = match &self.supervisor.automaton {
            Some(a) => {
                check_automaton("supervisor.automaton", a, &events, &mut issues);
                ("supervisor.automaton", a)
            }
            None => ("plant", &self.plant),
        };
        let sup_states: HashSet<&str> = sup_spec.states.iter().map(String::as_str).collect();
        for (state, bits) in &self.supervisor.decisions {
            let at = format!("supervisor.decisions.{state}");
            if !sup_states.contains(state.as_str()) {
                issues.push(&at, format!("`{state}` is not a state of {sup_loc}"));
            }
            if bits.len() != controllable.len() {
                issues.push(
                    &at,
                    format!(
                        "decision vector has {} entries, expected one per controllable event ({})",
                        bits.len(),
                        controllable.len()
                    ),
                );
            }
            if bits.iter().any(|&b| b > 1) {
                issues.push(&at, "decision bits must be 0 or 1");
            }
        }

        if let Some(channels) = &self.channels {
            let mut owner: HashMap<&str, usize> = HashMap::new();
            for (gi, g) in channels.iter().enumerate() {
                let at = format!("channels[{gi}]");
                if g.events.is_empty() {
                    issues.push(&at, "channel group has no events");
                }
                for e in &g.events {
                    if !events.contains(e.as_str()) {
                        issues.push(&at, format!("unknown event `{e}`"));
                    } else if !controllable.contains(e.as_str()) {
                        issues.push(&at, format!("event `{e}` is uncontrollable"));
                    } else if let Some(&other) = owner.get(e.as_str()) {
                        issues.push(&at, format!("event `{e}` is shared with channel group {other}"));
                    } else {
                        owner.insert(e, gi);
                    }
                }
            }
            for c in &self.alphabet.controllable {
                if controllable.contains(c.as_str()) && !owner.contains_key(c.as_str()) {
                    issues.push(
                        "channels",
                        format!("controllable event `{c}` is not assigned to a channel group"),
                    );
                }
            }
        }

        if !issues.0.is_empty() {
            return Err(issues.0);
        }

        let alphabet =
            EventAlphabet::new(&self.alphabet.events, &self.alphabet.controllable).expect("alphabet checked above");
        let plant = build_automaton(&self.plant, &alphabet);
        let sup_dfa = build_automaton(sup_spec, &alphabet);
        let outputs = sup_dfa
            .state_names()
            .iter()
            .map(|s| {
                self.supervisor
                    .decisions
                    .get(s)
                    .map(|b| DecisionVector::from_bits(b).expect("bits checked above"))
            })
            .collect();
        let supervisor = SupervisorMap::new(sup_dfa, outputs).expect("widths checked above");
        let partition = match &self.channels {
            None => ChannelPartition::singletons(&alphabet, ChannelParams::ZERO),
            Some(channels) => {
                let groups = channels
                    .iter()
                    .map(|g| ChannelGroup {
                        events: g.events.iter().map(|e| alphabet.id(e).expect("checked")).collect(),
                        params: ChannelParams::new(g.max_delay, g.max_loss),
                    })
                    .collect();
                ChannelPartition::new(&alphabet, groups).expect("partition checked above")
            }
        };
        Model::new(plant, supervisor, partition).map_err(|e| {
            vec![ValidationIssue {
                location: "supervisor".into(),
                message: e.to_string(),
            }]
        })
    }

    /// Serializable form of a validated model. The supervisor automaton is
    /// written out only when it differs from the plant.
    pub fn from_model(model: &Model) -> Self {
        let ab = model.alphabet();
        let sup = model.supervisor();
        let sa = sup.automaton();
        let decisions = sa
            .states()
            .filter_map(|x| {
                sup.outputs()[x.0]
                    .as_ref()
                    .map(|d| (sa.state_name(x).to_string(), d.bits()))
            })
            .collect();
        ModelFile {
            alphabet: AlphabetSpec {
                events: ab.names().to_vec(),
                controllable: ab.controllable().iter().map(|&e| ab.name(e).to_string()).collect(),
            },
            plant: automaton_spec(model.plant()),
            supervisor: SupervisorSpec {
                automaton: (sa != model.plant()).then(|| automaton_spec(sa)),
                decisions,
            },
            channels: Some(
                model
                    .partition()
                    .groups()
                    .iter()
                    .map(|g| ChannelSpec {
                        events: g.events.iter().map(|&e| ab.name(e).to_string()).collect(),
                        max_delay: g.params.max_delay,
                        max_loss: g.params.max_loss,
                    })
                    .collect(),
            ),
        }
    }
}
