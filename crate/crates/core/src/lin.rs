//! Window-based closed-loop language for a single package-based control
//! channel, used as a reference to compare the exact networked semantics
//! against.
//!
//! After `s`, an event `σ` may occur if it is uncontrollable or enabled by
//! any of the decisions issued after `s`, `s_{-1}`, ..., `s_{-n}`, where
//! `s_{-k}` drops the last `k` events (and is the empty string once `k ≥ |s|`).

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::automata::{language_diff, language_inclusion, Dfa, Inclusion, StateId, Word};
use crate::closed_loop::{build_extended, build_language_automaton};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::supervisor::DecisionVector;

/// Plant state, supervisor state and the last `n + 1` issued decisions, newest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinState {
    pub plant: StateId,
    pub sup: StateId,
    pub history: Vec<DecisionVector>,
}

/// Automaton of the window language with window `n_c`.
pub fn build_lin(model: &Model, n_c: usize) -> Result<Dfa> {
    let plant = model.plant();
    let sup = model.supervisor();
    let sa = sup.automaton();
    let ab = model.alphabet();

    let d0 = sup.decision_at(sa.initial())?.clone();
    let init = LinState {
        plant: plant.initial(),
        sup: sa.initial(),
        history: vec![d0; n_c + 1],
    };
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut delta = Vec::new();
    let mut head = 0;
    while head < states.len() {
        for e in ab.events() {
            let cur = &states[head];
            let allowed = match ab.controllable_position(e) {
                None => true,
                Some(pos) => cur.history.iter().any(|d| d.get(pos).is_enabled()),
            };
            if !allowed {
                continue;
            }
            let Some(q) = plant.successor(cur.plant, e) else {
                continue;
            };
            let x = sa.successor(cur.sup, e).ok_or_else(|| {
                Error::ModelCoverage(format!(
                    "supervisor state `{}` has no `{}` transition",
                    sa.state_name(cur.sup),
                    ab.name(e)
                ))
            })?;
            let mut history = Vec::with_capacity(n_c + 1);
            history.push(sup.decision_at(x)?.clone());
            history.extend(cur.history[..n_c].iter().cloned());
            let next = LinState {
                plant: q,
                sup: x,
                history,
            };
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    index.insert(next.clone(), states.len());
                    states.push(next);
                    states.len() - 1
                }
            };
            delta.push((head, e, id));
        }
        head += 1;
    }
    let names = (0..states.len()).map(|i| i.to_string()).collect();
    let mut dfa = Dfa::new(ab.clone(), names, StateId(0))?;
    for (from, e, to) in delta {
        dfa.add_transition(StateId(from), e, StateId(to))?;
    }
    Ok(dfa)
}

/// Largest `N^D + N^L` over the channel groups (0 without groups).
pub fn default_window(model: &Model) -> usize {
    model
        .partition()
        .groups()
        .iter()
        .map(|g| (g.params.max_delay + g.params.max_loss) as usize)
        .max()
        .unwrap_or(0)
}

/// Whether the window language is a meaningful reference for this model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    /// At most one channel group: decisions travel as one package.
    SingleChannel,
    /// Several independent channels; the window language has no multi-channel
    /// counterpart, so verdicts are informational only.
    Incomparable,
}

/// Both languages compared in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinComparison {
    pub n_c: usize,
    pub setting: Setting,
    pub max_len: usize,
    pub networked_in_lin: Inclusion,
    pub lin_in_networked: Inclusion,
    /// Networked strings the window language rejects, up to `max_len`.
    pub networked_minus_lin: BTreeSet<Word>,
    /// Window-language strings that the network cannot produce, up to `max_len`.
    pub lin_minus_networked: BTreeSet<Word>,
}

/// Builds the networked closed loop (bounded by `cap` extended states) and the
/// window language (window `n_c`, defaulting to [`default_window`]) and
/// compares them.
pub fn compare_models(model: &Model, n_c: Option<usize>, max_len: usize, cap: usize) -> Result<LinComparison> {
    let n_c = n_c.unwrap_or_else(|| default_window(model));
    let networked = build_language_automaton(&build_extended(model, cap)?);
    let lin = build_lin(model, n_c)?;
    Ok(LinComparison {
        n_c,
        setting: if model.partition().len() <= 1 {
            Setting::SingleChannel
        } else {
            Setting::Incomparable
        },
        max_len,
        networked_in_lin: language_inclusion(&networked, &lin)?,
        lin_in_networked: language_inclusion(&lin, &networked)?,
        networked_minus_lin: language_diff(&networked, &lin, max_len)?,
        lin_minus_networked: language_diff(&lin, &networked, max_len)?,
    })
}
