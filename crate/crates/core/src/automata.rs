//! Deterministic finite automata with partial transition functions.
//!
//! Every state is accepting except an optional dead sink: the language of a
//! [`Dfa`] is the set of event sequences that label a defined path from the
//! initial state that avoids the sink. Such languages are prefix-closed by
//! construction, which is the only flavour of language the rest of the crate
//! works with. The sink only appears after [`Dfa::complete`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of an event in an [`EventAlphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(pub usize);

/// Index of a state in a [`Dfa`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

/// A finite event sequence.
pub type Word = Vec<EventId>;

/// Ordered event set partitioned into controllable and uncontrollable events.
#[derive(Debug, Clone)]
pub struct EventAlphabet {
    names: Vec<String>,
    controllable: Vec<bool>,
    // position of each controllable event among the controllable events
    ctrl_pos: Vec<Option<usize>>,
    ctrl_events: Vec<EventId>,
    index: HashMap<String, EventId>,
}

impl PartialEq for EventAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.controllable == other.controllable
    }
}

impl Eq for EventAlphabet {}

impl EventAlphabet {
    /// Builds an alphabet from ordered event names and the controllable subset.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(events: &[S], controllable: &[T]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            let e = e.as_ref();
            if e.is_empty() {
                return Err(Error::InvalidArgument("event identifiers must be non-empty".into()));
            }
            if index.insert(e.to_string(), EventId(i)).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate event `{e}`")));
            }
            names.push(e.to_string());
        }
        let mut flags = vec![false; names.len()];
        for c in controllable {
            let c = c.as_ref();
            let id = index
                .get(c)
                .ok_or_else(|| Error::InvalidArgument(format!("controllable event `{c}` is not in the alphabet")))?;
            if flags[id.0] {
                return Err(Error::InvalidArgument(format!("controllable event `{c}` listed twice")));
            }
            flags[id.0] = true;
        }
        let mut ctrl_pos = vec![None; names.len()];
        let mut ctrl_events = Vec::new();
        for (i, &f) in flags.iter().enumerate() {
            if f {
                ctrl_pos[i] = Some(ctrl_events.len());
                ctrl_events.push(EventId(i));
            }
        }
        Ok(Self {
            names,
            controllable: flags,
            ctrl_pos,
            ctrl_events,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// All events in alphabet order.
    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.names.len()).map(EventId)
    }

    pub fn name(&self, e: EventId) -> &str {
        &self.names[e.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, e: EventId) -> bool {
        e.0 < self.names.len()
    }

    pub fn check(&self, e: EventId) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("event #{} is not in the alphabet", e.0)))
        }
    }

    pub fn is_controllable(&self, e: EventId) -> bool {
        self.controllable[e.0]
    }

    /// Controllable events in alphabet order; decision vectors are indexed by this order.
    pub fn controllable(&self) -> &[EventId] {
        &self.ctrl_events
    }

    pub fn uncontrollable(&self) -> Vec<EventId> {
        self.events().filter(|&e| !self.is_controllable(e)).collect()
    }

    /// Position of `e` within [`Self::controllable`], if controllable.
    pub fn controllable_position(&self, e: EventId) -> Option<usize> {
        self.ctrl_pos[e.0]
    }

    /// Space-separated event names; the empty word formats as an empty string.
    pub fn format_word(&self, word: &[EventId]) -> String {
        word.iter().map(|&e| self.name(e)).collect::<Vec<_>>().join(" ")
    }

    /// Parses a whitespace-separated list of event names.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace()
            .map(|t| {
                self.id(t)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown event `{t}`")))
            })
            .collect()
    }
}

/// Deterministic finite automaton with a partial transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: EventAlphabet,
    states: Vec<String>,
    initial: StateId,
    // row-major: state * |Σ| + event
    delta: Vec<Option<StateId>>,
    dead: Option<StateId>,
}

impl Dfa {
    /// Creates an automaton with no transitions.
    pub fn new(alphabet: EventAlphabet, states: Vec<String>, initial: StateId) -> Result<Self> {
        if initial.0 >= states.len() {
            return Err(Error::InvalidArgument(format!(
                "initial state #{} out of range ({} states)",
                initial.0,
                states.len()
            )));
        }
        let delta = vec![None; states.len() * alphabet.len()];
        Ok(Self {
            alphabet,
            states,
            initial,
            delta,
            dead: None,
        })
    }

    /// Adds `from --event--> to`. Re-adding an identical transition is a no-op;
    /// a conflicting one is rejected.
    pub fn add_transition(&mut self, from: StateId, event: EventId, to: StateId) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        self.alphabet.check(event)?;
        let slot = &mut self.delta[from.0 * self.alphabet.len() + event.0];
        match *slot {
            Some(existing) if existing != to => Err(Error::InvalidArgument(format!(
                "state `{}` already has a `{}` transition",
                self.states[from.0],
                self.alphabet.name(event)
            ))),
            _ => {
                *slot = Some(to);
                Ok(())
            }
        }
    }

    pub fn alphabet(&self) -> &EventAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    fn check_state(&self, s: StateId) -> Result<()> {
        if s.0 < self.states.len() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "state #{} is not in the automaton",
                s.0
            )))
        }
    }

    /// Unchecked successor lookup. Panics if `s` or `e` is out of range.
    #[inline]
    pub fn successor(&self, s: StateId, e: EventId) -> Option<StateId> {
        self.delta[s.0 * self.alphabet.len() + e.0]
    }

    /// The rejecting sink added by [`Dfa::complete`], if any.
    pub fn dead_state(&self) -> Option<StateId> {
        self.dead
    }

    /// Successor restricted to the language: transitions into the dead sink count as undefined.
    #[inline]
    pub fn live_successor(&self, s: StateId, e: EventId) -> Option<StateId> {
        self.successor(s, e).filter(|&t| Some(t) != self.dead)
    }

    /// Whether `word` belongs to the generated language.
    pub fn accepts(&self, word: &[EventId]) -> bool {
        matches!(self.run(word), Ok(Some(s)) if Some(s) != self.dead)
    }

    /// `δ(state, event)`; `Ok(None)` when the transition is undefined.
    pub fn step(&self, state: StateId, event: EventId) -> Result<Option<StateId>> {
        self.check_state(state)?;
        self.alphabet.check(event)?;
        Ok(self.successor(state, event))
    }

    /// Runs `word` from the initial state.
    pub fn run(&self, word: &[EventId]) -> Result<Option<StateId>> {
        self.run_from(self.initial, word)
    }

    pub fn run_from(&self, start: StateId, word: &[EventId]) -> Result<Option<StateId>> {
        self.check_state(start)?;
        for &e in word {
            self.alphabet.check(e)?;
        }
        let mut cur = start;
        for &e in word {
            match self.successor(cur, e) {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    /// All defined transitions, ordered by source state then event.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        let n = self.alphabet.len();
        self.delta
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|to| (StateId(i / n), EventId(i % n), to)))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|t| t.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }

    /// Reachability flags indexed by state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial.0] = true;
        while let Some(s) = queue.pop_front() {
            for e in self.alphabet.events() {
                if let Some(t) = self.successor(s, e) {
                    if !seen[t.0] {
                        seen[t.0] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// Every word of length at most `max_len` in the generated language,
    /// in lexicographic order over alphabet order.
    pub fn enumerate_language(&self, max_len: usize) -> BTreeSet<Word> {
        let mut out = BTreeSet::new();
        if Some(self.initial) == self.dead {
            return out;
        }
        let mut frontier = vec![(Vec::new(), self.initial)];
        out.insert(Vec::new());
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (word, s) in &frontier {
                for e in self.alphabet.events() {
                    if let Some(t) = self.live_successor(*s, e) {
                        let mut w = word.clone();
                        w.push(e);
                        out.insert(w.clone());
                        next.push((w, t));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// Adds a fresh rejecting dead state (the last state) and routes every
    /// undefined transition to it. The generated language is unchanged.
    /// An automaton that already has a dead sink reuses it.
    pub fn complete(&self) -> Dfa {
        if let Some(dead) = self.dead {
            let mut out = self.clone();
            for t in &mut out.delta {
                t.get_or_insert(dead);
            }
            return out;
        }
        let n = self.alphabet.len();
        let dead = StateId(self.states.len());
        let mut states = self.states.clone();
        let mut name = String::from("⊥");
        while states.contains(&name) {
            name.push('\'');
        }
        states.push(name);
        let mut delta: Vec<Option<StateId>> = self.delta.iter().map(|t| Some(t.unwrap_or(dead))).collect();
        delta.extend(std::iter::repeat_n(Some(dead), n));
        Dfa {
            alphabet: self.alphabet.clone(),
            states,
            initial: self.initial,
            delta,
            dead: Some(dead),
        }
    }
}

/// Outcome of a language inclusion check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    /// A shortest word in `L(a) \ L(b)`, least in alphabet order among the shortest.
    Counterexample(Word),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }

    pub fn witness(&self) -> Option<&[EventId]> {
        match self {
            Inclusion::Holds => None,
            Inclusion::Counterexample(w) => Some(w),
        }
    }
}

fn check_same_alphabet(a: &Dfa, b: &Dfa) -> Result<()> {
    if a.alphabet != b.alphabet {
        return Err(Error::InvalidArgument("automata are over different alphabets".into()));
    }
    Ok(())
}

/// Decides `L(a) ⊆ L(b)` by breadth-first search of `a` against the completed `b`.
pub fn language_inclusion(a: &Dfa, b: &Dfa) -> Result<Inclusion> {
    check_same_alphabet(a, b)?;
    let bc = b.complete();
    let dead = bc.dead.expect("completion adds a dead state");
    if Some(a.initial) == a.dead {
        return Ok(Inclusion::Holds);
    }

    let mut nodes: Vec<(StateId, StateId)> = vec![(a.initial, bc.initial)];
    let mut parent: Vec<Option<(usize, EventId)>> = vec![None];
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::from([((a.initial, bc.initial), 0)]);
    let mut head = 0;
    let word_to = |mut i: usize, parent: &[Option<(usize, EventId)>]| {
        let mut w = Vec::new();
        while let Some((p, e)) = parent[i] {
            w.push(e);
            i = p;
        }
        w.reverse();
        w
    };
    while head < nodes.len() {
        let (qa, qb) = nodes[head];
        for e in a.alphabet.events() {
            let Some(na) = a.live_successor(qa, e) else { continue };
            let nb = bc.successor(qb, e).expect("completed automaton is total");
            if nb == dead {
                let mut w = word_to(head, &parent);
                w.push(e);
                return Ok(Inclusion::Counterexample(w));
            }
            if let std::collections::hash_map::Entry::Vacant(v) = index.entry((na, nb)) {
                v.insert(nodes.len());
                nodes.push((na, nb));
                parent.push(Some((head, e)));
            }
        }
        head += 1;
    }
    Ok(Inclusion::Holds)
}

/// `L(a) = L(b)`.
pub fn language_equivalent(a: &Dfa, b: &Dfa) -> Result<bool> {
    Ok(language_inclusion(a, b)?.holds() && language_inclusion(b, a)?.holds())
}

/// Words of length at most `max_len` in `L(a)` but not in `L(b)`.
pub fn language_diff(a: &Dfa, b: &Dfa, max_len: usize) -> Result<BTreeSet<Word>> {
    check_same_alphabet(a, b)?;
    Ok(a.enumerate_language(max_len)
        .into_iter()
        .filter(|w| !b.accepts(w))
        .collect())
}

fn escape_dot(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Renders `dfa` as a DOT digraph. Node `sK` is state `K`; when present,
/// `annotations[K]` is appended to the node label on a second line.
pub fn export_dot(dfa: &Dfa, annotations: Option<&[String]>) -> String {
    let labels: Vec<String> = dfa
        .states()
        .map(|s| match annotations.and_then(|a| a.get(s.0)) {
            Some(text) => format!("{}\n{}", dfa.state_name(s), text),
            None => dfa.state_name(s).to_string(),
        })
        .collect();
    write_dot(
        dfa.initial.0,
        &labels,
        dfa.transitions()
            .map(|(from, e, to)| (from.0, dfa.alphabet.name(e), to.0)),
    )
}

/// Shared DOT layout for automata and transition systems. Labels are escaped
/// here; a newline in a label becomes a DOT line break.
pub(crate) fn write_dot<'a>(
    initial: usize,
    labels: &[String],
    edges: impl Iterator<Item = (usize, &'a str, usize)>,
) -> String {
    use fmt::Write;
    let mut out = String::new();
    out.push_str("digraph automaton {\n");
    out.push_str("    rankdir=LR;\n");
    out.push_str("    node [shape=circle];\n");
    out.push_str("    init [shape=point, label=\"\"];\n");
    let _ = writeln!(out, "    init -> s{initial};");
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(out, "    s{i} [label=\"{}\"];", escape_dot(label));
    }
    for (from, event, to) in edges {
        let _ = writeln!(out, "    s{from} -> s{to} [label=\"{}\"];", escape_dot(event));
    }
    out.push_str("}\n");
    out
}
