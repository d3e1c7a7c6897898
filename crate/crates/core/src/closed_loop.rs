//! Networked closed-loop behaviour.
//!
//! The extended state `(plant state, supervisor state, network config)` is
//! explored breadth-first from the initial configuration. Because the network
//! picks among several outcomes for every issued decision, the resulting
//! transition system is nondeterministic; the closed-loop language is its
//! projection onto events, obtained by subset construction.

use std::collections::{BTreeSet, HashMap};

use crate::automata::{write_dot, Dfa, EventAlphabet, EventId, StateId, Word};
use crate::channel::{move_dl, GroupState};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::network::{initial_config, overall_move, NetworkConfig};
use crate::supervisor::Decision;

/// Default bound on explored extended states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Node of the extended state space. The executed string is implicit: it is
/// any path from the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedState {
    pub plant: StateId,
    pub sup: StateId,
    pub config: NetworkConfig,
}

/// Reachable extended state space. State 0 is initial.
#[derive(Debug, Clone)]
pub struct ExtendedAutomaton {
    alphabet: EventAlphabet,
    states: Vec<ExtendedState>,
    // per state, ordered by event then by canonical config order
    edges: Vec<Vec<(EventId, usize)>>,
}

impl ExtendedAutomaton {
    pub fn alphabet(&self) -> &EventAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[ExtendedState] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    pub fn edges(&self, state: usize) -> &[(EventId, usize)] {
        &self.edges[state]
    }

    /// Extended states reachable by exactly `word`.
    pub fn states_after(&self, word: &[EventId]) -> BTreeSet<usize> {
        let mut cur = BTreeSet::from([0]);
        for &e in word {
            cur = cur
                .iter()
                .flat_map(|&s| self.edges[s].iter().filter(|(ev, _)| *ev == e).map(|&(_, t)| t))
                .collect();
        }
        cur
    }

    /// DOT rendering labelled with plant state, supervisor state (when the
    /// supervisor is not the plant itself) and network configuration.
    pub fn to_dot(&self, model: &Model) -> String {
        let same = model.supervisor().automaton() == model.plant();
        let labels: Vec<String> = self
            .states
            .iter()
            .map(|s| {
                let q = model.plant().state_name(s.plant);
                if same {
                    format!("{q}\n{}", s.config)
                } else {
                    let x = model.supervisor().automaton().state_name(s.sup);
                    format!("{q} · {x}\n{}", s.config)
                }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .flat_map(|(from, es)| es.iter().map(move |&(e, to)| (from, self.alphabet.name(e), to)));
        write_dot(0, &labels, edges)
    }
}

pub fn initial_state(model: &Model) -> Result<ExtendedState> {
    let sa = model.supervisor().automaton();
    Ok(ExtendedState {
        plant: model.plant().initial(),
        sup: sa.initial(),
        config: initial_config(model.supervisor(), model.partition())?,
    })
}

/// Extended states reachable from `es` by one occurrence of `event`. Empty
/// when the plant cannot execute `event` or the actuators disable it.
pub fn successors(model: &Model, es: &ExtendedState, event: EventId) -> Result<Vec<ExtendedState>> {
    model.alphabet().check(event)?;
    let Some(q) = model.plant().successor(es.plant, event) else {
        return Ok(Vec::new());
    };
    if !es.config.enables(event, model.partition()) {
        return Ok(Vec::new());
    }
    let sup = model.supervisor();
    let x = sup.automaton().successor(es.sup, event).ok_or_else(|| {
        Error::ModelCoverage(format!(
            "supervisor state `{}` has no `{}` transition",
            sup.automaton().state_name(es.sup),
            model.alphabet().name(event)
        ))
    })?;
    let gamma = sup.decision_at(x)?;
    Ok(overall_move(&es.config, gamma, model.partition())?
        .into_iter()
        .map(|config| ExtendedState {
            plant: q,
            sup: x,
            config,
        })
        .collect())
}

/// Breadth-first fixed point of [`successors`] from the initial state.
/// Fails with [`Error::ResourceLimit`] once more than `cap` states are found.
pub fn build_extended(model: &Model, cap: usize) -> Result<ExtendedAutomaton> {
    let init = initial_state(model)?;
    if cap == 0 {
        return Err(Error::ResourceLimit { cap });
    }
    let mut states = vec![init.clone()];
    let mut index = HashMap::from([(init, 0usize)]);
    let mut edges: Vec<Vec<(EventId, usize)>> = Vec::new();
    let mut head = 0;
    while head < states.len() {
        let mut out = Vec::new();
        for e in model.alphabet().events() {
            for next in successors(model, &states[head], e)? {
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        if states.len() == cap {
                            return Err(Error::ResourceLimit { cap });
                        }
                        let id = states.len();
                        index.insert(next.clone(), id);
                        states.push(next);
                        id
                    }
                };
                out.push((e, id));
            }
        }
        edges.push(out);
        head += 1;
    }
    Ok(ExtendedAutomaton {
        alphabet: model.alphabet().clone(),
        states,
        edges,
    })
}

/// Deterministic automaton for the projection of the extended language onto
/// event strings. State `K` is named `K`; its extended-state subset is
/// available from [`language_subsets`].
pub fn build_language_automaton(ext: &ExtendedAutomaton) -> Dfa {
    language_subsets(ext).0
}

/// Subset construction over `ext`, also returning the subset behind each state.
pub fn language_subsets(ext: &ExtendedAutomaton) -> (Dfa, Vec<Vec<usize>>) {
    let ab = &ext.alphabet;
    let mut subsets: Vec<Vec<usize>> = vec![vec![0]];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(vec![0], 0)]);
    let mut delta: Vec<(usize, EventId, usize)> = Vec::new();
    let mut head = 0;
    while head < subsets.len() {
        let mut by_event: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ab.len()];
        for &s in &subsets[head] {
            for &(e, t) in &ext.edges[s] {
                by_event[e.0].insert(t);
            }
        }
        for (e, targets) in by_event.into_iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let key: Vec<usize> = targets.into_iter().collect();
            let id = *index.entry(key.clone()).or_insert_with(|| {
                subsets.push(key);
                subsets.len() - 1
            });
            delta.push((head, EventId(e), id));
        }
        head += 1;
    }
    let names = (0..subsets.len()).map(|i| i.to_string()).collect();
    let mut dfa = Dfa::new(ab.clone(), names, StateId(0)).expect("initial subset exists");
    for (from, e, to) in delta {
        dfa.add_transition(StateId(from), e, StateId(to))
            .expect("subset construction is deterministic");
    }
    (dfa, subsets)
}

/// Non-networked closed loop: `σ` may follow `s` iff the plant allows it and
/// it is uncontrollable or enabled by the decision issued after `s`.
pub fn standard_closed_loop(model: &Model) -> Result<Dfa> {
    let plant = model.plant();
    let sup = model.supervisor();
    let sa = sup.automaton();
    let ab = model.alphabet();
    let start = (plant.initial(), sa.initial());
    let mut pairs = vec![start];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut delta = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (q, x) = pairs[head];
        let decision = sup.decision_at(x)?;
        for e in ab.events() {
            let allowed = match ab.controllable_position(e) {
                None => true,
                Some(pos) => decision.get(pos).is_enabled(),
            };
            if !allowed {
                continue;
            }
            let Some(q2) = plant.successor(q, e) else { continue };
            let x2 = sa.successor(x, e).ok_or_else(|| {
                Error::ModelCoverage(format!(
                    "supervisor state `{}` has no `{}` transition",
                    sa.state_name(x),
                    ab.name(e)
                ))
            })?;
            let id = *index.entry((q2, x2)).or_insert_with(|| {
                pairs.push((q2, x2));
                pairs.len() - 1
            });
            delta.push((head, e, id));
        }
        head += 1;
    }
    let names = pairs
        .iter()
        .map(|&(q, x)| format!("({},{})", plant.state_name(q), sa.state_name(x)))
        .collect();
    let mut dfa = Dfa::new(ab.clone(), names, StateId(0))?;
    for (from, e, to) in delta {
        dfa.add_transition(StateId(from), e, StateId(to))?;
    }
    Ok(dfa)
}

/// All extended strings `(s, config)` with `|s| ≤ depth`, computed by
/// unfolding the recursive definition of the extended language level by level.
///
/// Only the per-group channel operator is shared with [`build_extended`]: the
/// plant and supervisor are re-run on whole strings, and the initial
/// configuration, enablement check and product over groups are recomputed
/// here.
pub fn oracle_enumerate(model: &Model, depth: usize) -> Result<BTreeSet<(Word, NetworkConfig)>> {
    let ab = model.alphabet();
    let plant = model.plant();
    let sup = model.supervisor();
    let groups = model.partition().groups();

    let group_bits = |full: &crate::supervisor::DecisionVector| -> Vec<crate::supervisor::DecisionVector> {
        groups
            .iter()
            .map(|g| {
                g.events
                    .iter()
                    .map(|&e| full.get(ab.controllable_position(e).expect("group events are controllable")))
                    .collect()
            })
            .collect()
    };
    let enabled = |config: &NetworkConfig, e: EventId| -> bool {
        if !ab.is_controllable(e) {
            return true;
        }
        groups.iter().zip(&config.groups).any(|(g, gs)| {
            g.events
                .iter()
                .position(|&x| x == e)
                .is_some_and(|off| gs.actuator.get(off) == Decision::Enable)
        })
    };

    let a0 = sup.decision_after(&[])?;
    let c0 = NetworkConfig {
        groups: group_bits(&a0).into_iter().map(GroupState::settled).collect(),
    };
    let mut all = BTreeSet::from([(Vec::new(), c0.clone())]);
    let mut level = BTreeSet::from([(Vec::new(), c0)]);
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        for (s, config) in &level {
            for e in ab.events() {
                let mut s2 = s.clone();
                s2.push(e);
                if plant.run(&s2)?.is_none() || !enabled(config, e) {
                    continue;
                }
                let gamma = group_bits(&sup.decision_after(&s2)?);
                let mut joint: Vec<Vec<GroupState>> = vec![Vec::new()];
                for ((g, gs), gi) in groups.iter().zip(&config.groups).zip(&gamma) {
                    let outcomes = move_dl(gs, gi, &g.params)?;
                    joint = joint
                        .into_iter()
                        .flat_map(|prefix| {
                            outcomes.iter().map(move |o| {
                                let mut v = prefix.clone();
                                v.push(o.clone());
                                v
                            })
                        })
                        .collect();
                }
                for groups in joint {
                    next.insert((s2.clone(), NetworkConfig { groups }));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{language_equivalent, tests::example_plant as example_plant};
    use crate::channel::{ChannelConfig, ChannelEntry, ChannelParams, LossCounter};
    use crate::model::tests::package_model;
    use crate::network::ChannelPartition;
    use crate::supervisor::{DecisionVector, SupervisorMap};

    const S1: EventId = EventId(0);
    const S2: EventId = EventId(1);
    const S3: EventId = EventId(2);

    fn v(bits: &[u8]) -> DecisionVector {
        DecisionVector::from_bits(bits).unwrap()
    }

    fn one(a: &[u8], theta: &[(&[u8], u32)], c: u32) -> NetworkConfig {
        NetworkConfig {
            groups: vec![GroupState::new(
                v(a),
                ChannelConfig::from_entries(theta.iter().map(|(b, n)| ChannelEntry::new(v(b), *n))),
                LossCounter(c),
            )],
        }
    }

    #[test]
    fn first_step_of_package_example() {
        let m = package_model(2, 1);
        let init = initial_state(&m).unwrap();
        assert_eq!(init.config, one(&[0, 0], &[], 0));
        let succ: BTreeSet<_> = successors(&m, &init, S3)
            .unwrap()
            .into_iter()
            .map(|s| (s.plant, s.config))
            .collect();
        assert_eq!(
            succ,
            BTreeSet::from([
                (StateId(1), one(&[0, 0], &[(&[1, 0], 2)], 0)),
                (StateId(1), one(&[0, 0], &[], 1)),
                (StateId(1), one(&[1, 0], &[], 0)),
            ])
        );
        let blocked = ExtendedState {
            plant: StateId(1),
            sup: StateId(1),
            config: one(&[0, 0], &[], 1),
        };
        assert!(successors(&m, &blocked, S1).unwrap().is_empty());
        assert!(successors(&m, &init, S1).unwrap().is_empty());
        assert!(matches!(
            successors(&m, &init, EventId(9)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn package_example_state_space() {
        let m = package_model(2, 1);
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(ext.num_states(), 10);
        let lang = build_language_automaton(&ext);
        assert_eq!(
            lang.enumerate_language(6),
            BTreeSet::from([vec![], vec![S3], vec![S3, S1], vec![S3, S1, S2]])
        );
        assert_eq!(ext.states_after(&[S3, S1, S2]).len(), 3);
        assert!(ext.states_after(&[S3, S1, S2, S1]).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        let m = package_model(2, 1);
        assert_eq!(build_extended(&m, 9).unwrap_err(), Error::ResourceLimit { cap: 9 });
        assert!(build_extended(&m, 10).is_ok());
        assert_eq!(build_extended(&m, 0).unwrap_err(), Error::ResourceLimit { cap: 0 });
    }

    #[test]
    fn standard_loop_on_example() {
        let m = package_model(0, 0);
        let std = standard_closed_loop(&m).unwrap();
        let expected = BTreeSet::from([vec![], vec![S3], vec![S3, S1], vec![S3, S1, S2]]);
        assert_eq!(std.enumerate_language(6), expected);
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        // one extended state per plant state reached
        assert_eq!(ext.num_states(), 4);
        assert!(language_equivalent(&build_language_automaton(&ext), &std).unwrap());
    }

    #[test]
    fn standard_loop_extremes() {
        let plant = example_plant();
        let ab = plant.alphabet().clone();
        let part = ChannelPartition::singletons(&ab, ChannelParams::ZERO);
        let all_on = SupervisorMap::new(plant.clone(), vec![Some(v(&[1, 1])); 5]).unwrap();
        let m = Model::new(plant.clone(), all_on, part.clone()).unwrap();
        assert!(language_equivalent(&standard_closed_loop(&m).unwrap(), &plant).unwrap());

        // controllable-only plant, everything disabled
        let ab2 = EventAlphabet::new(&["a", "b"], &["a", "b"]).unwrap();
        let mut p2 = Dfa::new(ab2.clone(), vec!["0".into(), "1".into()], StateId(0)).unwrap();
        p2.add_transition(StateId(0), EventId(0), StateId(1)).unwrap();
        p2.add_transition(StateId(0), EventId(1), StateId(1)).unwrap();
        let off = SupervisorMap::new(p2.clone(), vec![Some(v(&[0, 0])); 2]).unwrap();
        let m2 = Model::new(p2, off, ChannelPartition::singletons(&ab2, ChannelParams::new(2, 1))).unwrap();
        assert_eq!(
            standard_closed_loop(&m2).unwrap().enumerate_language(3),
            BTreeSet::from([vec![]])
        );
        let ext = build_extended(&m2, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(
            build_language_automaton(&ext).enumerate_language(3),
            BTreeSet::from([vec![]])
        );
    }

    #[test]
    fn no_controllable_events_gives_plant_language() {
        let ab = EventAlphabet::new(&["a", "b"], &[] as &[&str]).unwrap();
        let mut p = Dfa::new(ab.clone(), vec!["0".into(), "1".into()], StateId(0)).unwrap();
        p.add_transition(StateId(0), EventId(0), StateId(1)).unwrap();
        p.add_transition(StateId(1), EventId(1), StateId(0)).unwrap();
        let sup = SupervisorMap::new(p.clone(), vec![Some(v(&[])); 2]).unwrap();
        let m = Model::new(p.clone(), sup, ChannelPartition::singletons(&ab, ChannelParams::ZERO)).unwrap();
        let lang = build_language_automaton(&build_extended(&m, DEFAULT_STATE_CAP).unwrap());
        for k in 0..6 {
            assert_eq!(lang.enumerate_language(k), p.enumerate_language(k));
        }
    }

    #[test]
    fn oracle_examples() {
        let m = package_model(2, 1);
        assert_eq!(
            oracle_enumerate(&m, 0).unwrap(),
            BTreeSet::from([(vec![], one(&[0, 0], &[], 0))])
        );
        let d1: BTreeSet<_> = oracle_enumerate(&m, 1)
            .unwrap()
            .into_iter()
            .filter(|(s, _)| s.len() == 1)
            .collect();
        assert_eq!(
            d1,
            BTreeSet::from([
                (vec![S3], one(&[0, 0], &[(&[1, 0], 2)], 0)),
                (vec![S3], one(&[0, 0], &[], 1)),
                (vec![S3], one(&[1, 0], &[], 0)),
            ])
        );
        let all = oracle_enumerate(&m, 8).unwrap();
        assert_eq!(all.len(), 10);
        let words: BTreeSet<Word> = all.into_iter().map(|(s, _)| s).collect();
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(words, build_language_automaton(&ext).enumerate_language(8));
    }

    #[test]
    fn dot_labels_configs() {
        let m = package_model(2, 1);
        let ext = build_extended(&m, DEFAULT_STATE_CAP).unwrap();
        let dot = ext.to_dot(&m);
        assert!(dot.contains("s0 [label=\"1\\n((0,0), ∅, 0)\"];"), "{dot}");
        assert_eq!(dot.matches(" -> s").count(), 1 + ext.num_transitions());
    }
}
