//! Seeded random instances and the cross-model property suite.
//!
//! Every trial derives its instance from `seed + trial`, so a failure can be
//! replayed from the serialized instance alone or regenerated from the seed.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automata::{language_equivalent, language_inclusion, Dfa, Word};
use crate::channel::{move_d, move_dl, move_l, ChannelConfig, ChannelEntry, ChannelParams, GroupState, LossCounter};
use crate::closed_loop::{
    build_extended, build_language_automaton, oracle_enumerate, standard_closed_loop, ExtendedAutomaton,
    DEFAULT_STATE_CAP,
};
use crate::error::{Error, Result};
use crate::lin::{build_lin, default_window};
use crate::model::Model;
use crate::model_file::{AlphabetSpec, AutomatonSpec, ChannelSpec, ModelFile, SupervisorSpec, TransitionSpec};
use crate::network::NetworkConfig;
use crate::supervisor::{Decision, DecisionVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupMode {
    /// One channel per controllable event.
    Singleton,
    /// One channel carrying all controllable decisions.
    SinglePackage,
    /// Controllable events assigned to channels at random.
    RandomPartition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub max_states: usize,
    pub max_events: usize,
    pub max_controllable: usize,
    pub max_nd: u32,
    pub max_nl: u32,
    pub group_mode: GroupMode,
    /// Probability that a given `(state, event)` pair has a transition.
    pub transition_density: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_states: 5,
            max_events: 4,
            max_controllable: 2,
            max_nd: 2,
            max_nl: 1,
            group_mode: GroupMode::Singleton,
            transition_density: 0.5,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_states == 0 || self.max_events == 0 {
            return Err(Error::InvalidArgument(
                "max_states and max_events must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.transition_density) {
            return Err(Error::InvalidArgument(format!(
                "transition_density {} outside [0, 1]",
                self.transition_density
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..=1)).collect()
}

/// Random model: plant trimmed to its reachable part, a random supervisor
/// (either indexed by plant state or remembering the last event), and
/// channel groups per `p.group_mode` with random bounds.
pub fn gen_instance(p: &GenParams) -> Result<ModelFile> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let n_events = rng.gen_range(1..=p.max_events);
    let events: Vec<String> = (1..=n_events).map(|i| format!("e{i}")).collect();
    let n_ctrl = rng.gen_range(0..=p.max_controllable.min(n_events));
    let mut order: Vec<usize> = (0..n_events).collect();
    order.shuffle(&mut rng);
    let mut ctrl: Vec<usize> = order[..n_ctrl].to_vec();
    ctrl.sort_unstable();

    let n_states = rng.gen_range(1..=p.max_states);
    let raw: Vec<Vec<Option<usize>>> = (0..n_states)
        .map(|_| {
            (0..n_events)
                .map(|_| rng.gen_bool(p.transition_density).then(|| rng.gen_range(0..n_states)))
                .collect()
        })
        .collect();
    // keep only the part reachable from state 0, numbered in discovery order
    let mut ids = vec![None; n_states];
    ids[0] = Some(0);
    let mut reached = vec![0];
    let mut queue = VecDeque::from([0]);
    while let Some(s) = queue.pop_front() {
        for t in raw[s].iter().flatten() {
            if ids[*t].is_none() {
                ids[*t] = Some(reached.len());
                reached.push(*t);
                queue.push_back(*t);
            }
        }
    }
    let name = |old: usize| format!("q{}", ids[old].expect("reachable"));
    let states: Vec<String> = (0..reached.len()).map(|i| format!("q{i}")).collect();
    let mut transitions = Vec::new();
    for &s in &reached {
        for (e, t) in raw[s].iter().enumerate() {
            if let Some(t) = t {
                transitions.push(TransitionSpec(name(s), events[e].clone(), name(*t)));
            }
        }
    }
    let plant = AutomatonSpec {
        states: states.clone(),
        initial: "q0".into(),
        transitions,
    };

    let supervisor = if rng.gen_bool(0.5) {
        SupervisorSpec {
            automaton: None,
            decisions: states
                .iter()
                .map(|s| (s.clone(), random_bits(&mut rng, n_ctrl)))
                .collect(),
        }
    } else {
        let mut sup_states = vec!["x0".to_string()];
        sup_states.extend(events.iter().map(|e| format!("after_{e}")));
        let transitions = sup_states
            .iter()
            .flat_map(|x| {
                events
                    .iter()
                    .map(move |e| TransitionSpec(x.clone(), e.clone(), format!("after_{e}")))
            })
            .collect();
        SupervisorSpec {
            decisions: sup_states
                .iter()
                .map(|x| (x.clone(), random_bits(&mut rng, n_ctrl)))
                .collect(),
            automaton: Some(AutomatonSpec {
                states: sup_states,
                initial: "x0".into(),
                transitions,
            }),
        }
    };

    let groups: Vec<Vec<usize>> = match p.group_mode {
        GroupMode::Singleton => ctrl.iter().map(|&e| vec![e]).collect(),
        GroupMode::SinglePackage if ctrl.is_empty() => Vec::new(),
        GroupMode::SinglePackage => vec![ctrl.clone()],
        GroupMode::RandomPartition => {
            let mut buckets = vec![Vec::new(); ctrl.len()];
            for &e in &ctrl {
                let b = rng.gen_range(0..ctrl.len());
                buckets[b].push(e);
            }
            buckets.into_iter().filter(|b| !b.is_empty()).collect()
        }
    };
    let channels = groups
        .into_iter()
        .map(|g| ChannelSpec {
            events: g.iter().map(|&e| events[e].clone()).collect(),
            max_delay: rng.gen_range(0..=p.max_nd),
            max_loss: rng.gen_range(0..=p.max_nl),
        })
        .collect();

    Ok(ModelFile {
        alphabet: AlphabetSpec {
            controllable: ctrl.iter().map(|&e| events[e].clone()).collect(),
            events,
        },
        plant,
        supervisor,
        channels: Some(channels),
    })
}

/// Properties checked on every generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    /// Model generation, validation and construction succeeded within the cap.
    Construction,
    /// Reachable configurations, and every operator outcome from them, satisfy the invariants.
    ConfigClosure,
    /// The recursive oracle and the extended automaton agree on every string and configuration.
    OracleEquivalence,
    /// With all bounds zero the networked and standard closed loops coincide.
    ZeroNetworkEquivalence,
    /// With loss bounds zero the combined operator matches the delay-only operator.
    DelayOnlyReduction,
    /// With delay bounds zero the combined operator matches the loss-only operator.
    LossOnlyReduction,
    UncontrollableAdmission,
    PrefixClosure,
    PlantInclusion,
    /// Single-channel instances: networked language inside the window language with window `N^D + N^L`.
    LinInclusion,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Construction,
        Property::ConfigClosure,
        Property::OracleEquivalence,
        Property::ZeroNetworkEquivalence,
        Property::DelayOnlyReduction,
        Property::LossOnlyReduction,
        Property::UncontrollableAdmission,
        Property::PrefixClosure,
        Property::PlantInclusion,
        Property::LinInclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Construction => "construction",
            Property::ConfigClosure => "config-closure",
            Property::OracleEquivalence => "oracle-equivalence",
            Property::ZeroNetworkEquivalence => "zero-network-equivalence",
            Property::DelayOnlyReduction => "delay-only-reduction",
            Property::LossOnlyReduction => "loss-only-reduction",
            Property::UncontrollableAdmission => "uncontrollable-admission",
            Property::PrefixClosure => "prefix-closure",
            Property::PlantInclusion => "plant-inclusion",
            Property::LinInclusion => "lin-inclusion",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Skip,
}

/// All decision vectors of the given width.
fn all_decisions(width: usize) -> Vec<DecisionVector> {
    (0..1u32 << width)
        .map(|m| {
            (0..width)
                .map(|i| {
                    if m >> i & 1 == 1 {
                        Decision::Enable
                    } else {
                        Decision::Disable
                    }
                })
                .collect()
        })
        .collect()
}

/// Distinct reachable `(group, state)` pairs.
fn reachable_group_states(ext: &ExtendedAutomaton) -> BTreeSet<(usize, GroupState)> {
    ext.states()
        .iter()
        .flat_map(|s| s.config.groups.iter().cloned().enumerate())
        .collect()
}

/// Invariant violations over the reachable configurations of `ext`.
pub fn config_violations(model: &Model, ext: &ExtendedAutomaton) -> Vec<String> {
    let part = model.partition();
    let mut out = Vec::new();
    for s in ext.states() {
        if let Err(e) = s.config.validate(part) {
            out.push(format!("reachable config {}: {e}", s.config));
        }
    }
    for (gi, g) in reachable_group_states(ext) {
        let params = part.groups()[gi].params;
        for gamma in all_decisions(g.actuator.len()) {
            match move_dl(&g, &gamma, &params) {
                Ok(outs) => {
                    for o in outs {
                        if let Err(e) = o.validate(&params) {
                            out.push(format!("group {gi}: {g} --{gamma}--> {o}: {e}"));
                        }
                    }
                }
                Err(e) => out.push(format!("group {gi}: {g} --{gamma}--> error {e}")),
            }
        }
    }
    out
}

/// Language-level invariants of a closed-loop automaton against its plant:
/// prefix closure up to `depth`, inclusion in the plant language and
/// admission of every plant-feasible uncontrollable continuation.
pub fn language_violations(model: &Model, lang: &Dfa, depth: usize) -> Vec<(Property, String)> {
    let mut out = Vec::new();
    let words = lang.enumerate_language(depth);
    if !words.contains(&Vec::new()) {
        out.push((Property::PrefixClosure, "empty string missing".to_string()));
    }
    for w in &words {
        if !w.is_empty() && !words.contains(&w[..w.len() - 1]) {
            out.push((
                Property::PrefixClosure,
                format!("`{}` present without its prefix", model.alphabet().format_word(w)),
            ));
        }
    }
    match language_inclusion(lang, model.plant()) {
        Ok(inc) => {
            if let Some(w) = inc.witness() {
                out.push((
                    Property::PlantInclusion,
                    format!("`{}` not generated by the plant", model.alphabet().format_word(w)),
                ));
            }
        }
        Err(e) => out.push((Property::PlantInclusion, e.to_string())),
    }
    if let Some(w) = uncontrollable_gap(model, lang) {
        out.push((
            Property::UncontrollableAdmission,
            format!(
                "uncontrollable continuation `{}` missing",
                model.alphabet().format_word(&w)
            ),
        ));
    }
    out
}

/// Shortest `s·σ_u` with `s` in the closed loop, `s·σ_u` in the plant, but
/// `s·σ_u` missing from the closed loop.
fn uncontrollable_gap(model: &Model, lang: &Dfa) -> Option<Word> {
    let plant = model.plant();
    let ab = model.alphabet();
    let start = (lang.initial(), plant.initial());
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some(((l, q), word)) = queue.pop_front() {
        for e in ab.events() {
            let Some(q2) = plant.successor(q, e) else { continue };
            let next = lang.live_successor(l, e);
            if next.is_none() && !ab.is_controllable(e) {
                let mut w = word.clone();
                w.push(e);
                return Some(w);
            }
            if let Some(l2) = next {
                if seen.insert((l2, q2)) {
                    let mut w = word.clone();
                    w.push(e);
                    queue.push_back(((l2, q2), w));
                }
            }
        }
    }
    None
}

fn oracle_mismatch(model: &Model, ext: &ExtendedAutomaton, depth: usize) -> Result<Option<String>> {
    let mut by_word: BTreeMap<Word, BTreeSet<NetworkConfig>> = BTreeMap::new();
    for (w, c) in oracle_enumerate(model, depth)? {
        by_word.entry(w).or_default().insert(c);
    }
    let ab = model.alphabet();
    let lang = build_language_automaton(ext);
    let words = lang.enumerate_language(depth);
    if words.len() != by_word.len() || !words.iter().eq(by_word.keys()) {
        let extra: Vec<_> = by_word.keys().filter(|w| !words.contains(*w)).take(1).collect();
        let missing: Vec<_> = words.iter().filter(|w| !by_word.contains_key(*w)).take(1).collect();
        return Ok(Some(format!(
            "projection differs: oracle-only {:?}, automaton-only {:?}",
            extra.iter().map(|w| ab.format_word(w)).collect::<Vec<_>>(),
            missing.iter().map(|w| ab.format_word(w)).collect::<Vec<_>>()
        )));
    }
    for (w, configs) in &by_word {
        let from_ext: BTreeSet<NetworkConfig> = ext
            .states_after(w)
            .into_iter()
            .map(|i| ext.states()[i].config.clone())
            .collect();
        if &from_ext != configs {
            return Ok(Some(format!(
                "configurations after `{}` differ: oracle {}, automaton {}",
                ab.format_word(w),
                configs.len(),
                from_ext.len()
            )));
        }
    }
    Ok(None)
}

fn reduction_mismatch(
    reduced: &Model,
    cap: usize,
    lifted: impl Fn(&GroupState, &DecisionVector, &ChannelParams) -> Result<BTreeSet<GroupState>>,
) -> Result<Option<String>> {
    let ext = build_extended(reduced, cap)?;
    for (gi, g) in reachable_group_states(&ext) {
        let params = reduced.partition().groups()[gi].params;
        for gamma in all_decisions(g.actuator.len()) {
            let combined = move_dl(&g, &gamma, &params)?;
            let expected = lifted(&g, &gamma, &params)?;
            if combined != expected {
                return Ok(Some(format!("group {gi}: {g} issuing {gamma}")));
            }
        }
    }
    Ok(None)
}

fn lift_delay(g: &GroupState, gamma: &DecisionVector, p: &ChannelParams) -> Result<BTreeSet<GroupState>> {
    Ok(move_d(&g.actuator, &g.channel, gamma, p)?
        .into_iter()
        .map(|(a, th)| GroupState::new(a, th, LossCounter(0)))
        .collect())
}

fn lift_loss(g: &GroupState, gamma: &DecisionVector, p: &ChannelParams) -> Result<BTreeSet<GroupState>> {
    Ok(move_l(&g.actuator, g.counter, gamma, p)?
        .into_iter()
        .map(|(a, c)| GroupState::new(a, ChannelConfig::empty(), c))
        .collect())
}

fn verdict(r: Result<Option<String>>) -> Verdict {
    match r {
        Ok(None) => Verdict::Pass,
        Ok(Some(msg)) => Verdict::Fail(msg),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

/// Runs every property on one model. Construction errors fail
/// [`Property::Construction`] and skip the rest.
pub fn check_model(model: &Model, depth: usize, cap: usize) -> BTreeMap<Property, Verdict> {
    let mut out = BTreeMap::new();
    let ext = match build_extended(model, cap) {
        Ok(ext) => ext,
        Err(e) => {
            out.insert(Property::Construction, Verdict::Fail(e.to_string()));
            for p in &Property::ALL[1..] {
                out.insert(*p, Verdict::Skip);
            }
            return out;
        }
    };
    out.insert(Property::Construction, Verdict::Pass);
    let lang = build_language_automaton(&ext);

    let closure = config_violations(model, &ext);
    out.insert(
        Property::ConfigClosure,
        match closure.first() {
            None => Verdict::Pass,
            Some(v) => Verdict::Fail(format!("{} violation(s), first: {v}", closure.len())),
        },
    );

    out.insert(
        Property::OracleEquivalence,
        verdict(oracle_mismatch(model, &ext, depth)),
    );

    let zero = model.zero_network();
    out.insert(
        Property::ZeroNetworkEquivalence,
        verdict((|| {
            let networked = build_language_automaton(&build_extended(&zero, cap)?);
            let standard = standard_closed_loop(&zero)?;
            Ok((!language_equivalent(&networked, &standard)?)
                .then(|| "networked language differs from the standard closed loop".to_string()))
        })()),
    );

    out.insert(
        Property::DelayOnlyReduction,
        verdict(reduction_mismatch(&model.delay_only(), cap, lift_delay)),
    );
    out.insert(
        Property::LossOnlyReduction,
        verdict(reduction_mismatch(&model.loss_only(), cap, lift_loss)),
    );

    let lang_issues = language_violations(model, &lang, depth);
    for p in [
        Property::UncontrollableAdmission,
        Property::PrefixClosure,
        Property::PlantInclusion,
    ] {
        let v = match lang_issues.iter().find(|(q, _)| *q == p) {
            None => Verdict::Pass,
            Some((_, msg)) => Verdict::Fail(msg.clone()),
        };
        out.insert(p, v);
    }

    let lin = if model.partition().len() <= 1 {
        verdict((|| {
            let window = default_window(model);
            let reference = build_lin(model, window)?;
            Ok(language_inclusion(&lang, &reference)?.witness().map(|w| {
                format!(
                    "`{}` is feasible but outside the window-{window} language",
                    model.alphabet().format_word(w)
                )
            }))
        })())
    } else {
        Verdict::Skip
    };
    out.insert(Property::LinInclusion, lin);
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// A failing check with everything needed to replay it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub seed: u64,
    pub depth: usize,
    pub property: Property,
    pub detail: String,
    pub instance: ModelFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub params: GenParams,
    pub trials: usize,
    pub depth: usize,
    pub tallies: BTreeMap<Property, Tally>,
    pub failures: Vec<Failure>,
    /// Largest extended state space seen across trials.
    pub max_extended_states: usize,
}

impl SuiteReport {
    pub fn tally(&self, p: Property) -> Tally {
        self.tallies.get(&p).copied().unwrap_or_default()
    }

    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

struct TrialResult {
    trial: usize,
    seed: u64,
    instance: Option<ModelFile>,
    verdicts: BTreeMap<Property, Verdict>,
    extended_states: usize,
}

fn run_trial(p: &GenParams, trial: usize, depth: usize) -> TrialResult {
    let seed = p.seed.wrapping_add(trial as u64);
    let mut result = TrialResult {
        trial,
        seed,
        instance: None,
        verdicts: BTreeMap::new(),
        extended_states: 0,
    };
    let instance = match gen_instance(&p.with_seed(seed)) {
        Ok(i) => i,
        Err(e) => {
            result
                .verdicts
                .insert(Property::Construction, Verdict::Fail(e.to_string()));
            return result;
        }
    };
    match instance.validate() {
        Ok(model) => {
            result.verdicts = check_model(&model, depth, DEFAULT_STATE_CAP);
            result.extended_states = build_extended(&model, DEFAULT_STATE_CAP).map_or(0, |e| e.num_states());
        }
        Err(issues) => {
            let msg = issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; ");
            result.verdicts.insert(Property::Construction, Verdict::Fail(msg));
        }
    }
    result.instance = Some(instance);
    result
}

/// Generates `trials` instances from `p.seed`, `p.seed + 1`, ... and checks
/// every [`Property`] on each. Trials run in parallel; the report is ordered
/// by trial index.
pub fn run_suite(p: &GenParams, trials: usize, depth: usize) -> SuiteReport {
    let mut results: Vec<TrialResult> = (0..trials).into_par_iter().map(|t| run_trial(p, t, depth)).collect();
    results.sort_by_key(|r| r.trial);

    let mut tallies: BTreeMap<Property, Tally> = Property::ALL.iter().map(|&p| (p, Tally::default())).collect();
    let mut failures = Vec::new();
    let mut max_extended_states = 0;
    for r in results {
        max_extended_states = max_extended_states.max(r.extended_states);
        for (prop, v) in r.verdicts {
            let t = tallies.entry(prop).or_default();
            match v {
                Verdict::Pass => t.passed += 1,
                Verdict::Skip => t.skipped += 1,
                Verdict::Fail(detail) => {
                    t.failed += 1;
                    failures.push(Failure {
                        trial: r.trial,
                        seed: r.seed,
                        depth,
                        property: prop,
                        detail,
                        instance: r.instance.clone().unwrap_or_else(placeholder_instance),
                    });
                }
            }
        }
    }
    SuiteReport {
        params: p.clone(),
        trials,
        depth,
        tallies,
        failures,
        max_extended_states,
    }
}

// only reached when generation itself fails, which valid params rule out
fn placeholder_instance() -> ModelFile {
    ModelFile {
        alphabet: AlphabetSpec {
            events: Vec::new(),
            controllable: Vec::new(),
        },
        plant: AutomatonSpec {
            states: Vec::new(),
            initial: String::new(),
            transitions: Vec::new(),
        },
        supervisor: SupervisorSpec {
            automaton: None,
            decisions: BTreeMap::new(),
        },
        channels: None,
    }
}

/// Outcome of [`reduction_trials`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReductionReport {
    pub delay_only: Tally,
    pub loss_only: Tally,
    pub failures: Vec<String>,
}

/// Checks the two reduction identities of [`move_dl`] on `samples` random
/// group states each: with `max_loss = 0` it must equal [`move_d`] with a zero
/// counter, and with `max_delay = 0` it must equal [`move_l`] with an empty
/// channel.
pub fn reduction_trials(seed: u64, samples: usize) -> ReductionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ReductionReport::default();
    let record = |tally: &mut Tally, failures: &mut Vec<String>, label: String, ok: Result<bool>| match ok {
        Ok(true) => tally.passed += 1,
        Ok(false) => {
            tally.failed += 1;
            failures.push(label);
        }
        Err(e) => {
            tally.failed += 1;
            failures.push(format!("{label}: {e}"));
        }
    };
    for _ in 0..samples {
        let width = rng.gen_range(1..=3);
        let nd = rng.gen_range(0..=4u32);
        let nl = rng.gen_range(0..=3u32);
        let actuator = DecisionVector::from_bits(&random_bits(&mut rng, width)).expect("bits");
        let gamma = DecisionVector::from_bits(&random_bits(&mut rng, width)).expect("bits");
        let mut entries = Vec::new();
        for n in 1..=nd {
            if rng.gen_bool(0.5) {
                entries.push(ChannelEntry::new(
                    DecisionVector::from_bits(&random_bits(&mut rng, width)).expect("bits"),
                    n,
                ));
            }
        }
        let theta = ChannelConfig::from_entries(entries);

        let p = ChannelParams::new(nd, 0);
        let g = GroupState::new(actuator.clone(), theta, LossCounter(0));
        let ok = move_dl(&g, &gamma, &p).and_then(|c| Ok(c == lift_delay(&g, &gamma, &p)?));
        record(
            &mut report.delay_only,
            &mut report.failures,
            format!("delay-only {g} issuing {gamma} (N^D={nd})"),
            ok,
        );

        let p = ChannelParams::new(0, nl);
        let g = GroupState::new(actuator, ChannelConfig::empty(), LossCounter(rng.gen_range(0..=nl)));
        let ok = move_dl(&g, &gamma, &p).and_then(|c| Ok(c == lift_loss(&g, &gamma, &p)?));
        record(
            &mut report.loss_only,
            &mut report.failures,
            format!("loss-only {g} issuing {gamma} (N^L={nl})"),
            ok,
        );
    }
    report
}
