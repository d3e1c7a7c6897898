//! Single control channel dynamics under bounded delays and bounded
//! consecutive losses.
//!
//! A channel group carries decisions for one or more actuators. Its state is
//! the actuator configuration (the decision currently in force), the channel
//! configuration (decisions in flight, each tagged with its maximum remaining
//! time), and a counter of consecutive losses. Time is counted in plant event
//! occurrences: each call to a `move_*` operator is one event, during which the
//! supervisor issues exactly one new decision.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supervisor::DecisionVector;

/// Delay and loss bounds of one channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Maximum number of event occurrences a decision may stay in the channel.
    pub max_delay: u32,
    /// Maximum number of consecutive decisions that may be lost.
    pub max_loss: u32,
}

impl ChannelParams {
    pub const ZERO: ChannelParams = ChannelParams {
        max_delay: 0,
        max_loss: 0,
    };

    pub fn new(max_delay: u32, max_loss: u32) -> Self {
        Self { max_delay, max_loss }
    }
}

/// A decision in flight together with its maximum remaining time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelEntry {
    // field order gives the FIFO ordering under the derived `Ord`
    pub remaining: u32,
    pub decision: DecisionVector,
}

impl ChannelEntry {
    pub fn new(decision: DecisionVector, remaining: u32) -> Self {
        Self { remaining, decision }
    }
}

/// Decisions waiting in a channel, kept sorted by ascending remaining time,
/// which is also FIFO order (oldest first).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ChannelConfig {
    entries: Vec<ChannelEntry>,
}

impl ChannelConfig {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a configuration from entries in any order. Use [`Self::validate`]
    /// to check the invariants.
    pub fn from_entries<I: IntoIterator<Item = ChannelEntry>>(entries: I) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort();
        Self { entries }
    }

    pub fn entries(&self) -> &[ChannelEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entry with the minimal remaining time.
    pub fn oldest(&self) -> Option<&ChannelEntry> {
        self.entries.first()
    }

    /// Checks remaining times lie in `[1, max_delay]` and are pairwise
    /// distinct, and that every decision has `width` components.
    pub fn validate(&self, params: &ChannelParams, width: usize) -> Result<()> {
        if self.entries.len() > params.max_delay as usize {
            return Err(Error::InvalidState(format!(
                "channel holds {} decisions but the delay bound is {}",
                self.entries.len(),
                params.max_delay
            )));
        }
        let mut prev = 0;
        for e in &self.entries {
            if e.remaining == 0 || e.remaining > params.max_delay {
                return Err(Error::InvalidState(format!(
                    "remaining time {} outside [1, {}]",
                    e.remaining, params.max_delay
                )));
            }
            if e.remaining <= prev {
                return Err(Error::InvalidState(format!(
                    "remaining times must be distinct and ascending, found {} after {prev}",
                    e.remaining
                )));
            }
            if e.decision.len() != width {
                return Err(Error::InvalidState(format!(
                    "channel decision {} has width {}, expected {width}",
                    e.decision,
                    e.decision.len()
                )));
            }
            prev = e.remaining;
        }
        Ok(())
    }

    fn with_issued(mut self, decision: &DecisionVector, remaining: u32) -> Self {
        // every surviving entry was decremented, so the new one is the youngest
        debug_assert!(self.entries.last().is_none_or(|e| e.remaining < remaining));
        self.entries.push(ChannelEntry::new(decision.clone(), remaining));
        self
    }

    fn without_oldest(&self) -> Self {
        Self {
            entries: self.entries[1..].to_vec(),
        }
    }
}

impl fmt::Display for ChannelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({},{})", e.decision, e.remaining)?;
        }
        f.write_str("}")
    }
}

/// Number of consecutive losses so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LossCounter(pub u32);

impl LossCounter {
    pub fn validate(self, params: &ChannelParams) -> Result<()> {
        if self.0 > params.max_loss {
            return Err(Error::InvalidState(format!(
                "loss counter {} exceeds the loss bound {}",
                self.0, params.max_loss
            )));
        }
        Ok(())
    }
}

/// Network configuration of one channel group: `(a_i, θ_i, c_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupState {
    pub actuator: DecisionVector,
    pub channel: ChannelConfig,
    pub counter: LossCounter,
}

impl GroupState {
    pub fn new(actuator: DecisionVector, channel: ChannelConfig, counter: LossCounter) -> Self {
        Self {
            actuator,
            channel,
            counter,
        }
    }

    /// Actuator holds `decision`; nothing in flight; no losses.
    pub fn settled(decision: DecisionVector) -> Self {
        Self::new(decision, ChannelConfig::empty(), LossCounter(0))
    }

    pub fn validate(&self, params: &ChannelParams) -> Result<()> {
        self.channel.validate(params, self.actuator.len())?;
        self.counter.validate(params)
    }
}

impl fmt::Display for GroupState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.actuator, self.channel, self.counter.0)
    }
}

/// Advances every decision in flight by one time unit and drops those whose
/// remaining time was 1. Callers are responsible for delivering the dropped
/// entry.
pub fn nx(theta: &ChannelConfig) -> ChannelConfig {
    ChannelConfig {
        entries: theta
            .entries
            .iter()
            .filter(|e| e.remaining > 1)
            .map(|e| ChannelEntry::new(e.decision.clone(), e.remaining - 1))
            .collect(),
    }
}

fn check_width(actuator: &DecisionVector, gamma: &DecisionVector) -> Result<()> {
    if actuator.len() != gamma.len() {
        return Err(Error::InvalidArgument(format!(
            "issued decision {gamma} has width {}, actuator {actuator} has width {}",
            gamma.len(),
            actuator.len()
        )));
    }
    Ok(())
}

/// Delay-only dynamics: the possible `(actuator, channel)` pairs after the
/// supervisor issues `gamma`. Loss bounds in `params` are ignored.
pub fn move_d(
    actuator: &DecisionVector,
    theta: &ChannelConfig,
    gamma: &DecisionVector,
    params: &ChannelParams,
) -> Result<BTreeSet<(DecisionVector, ChannelConfig)>> {
    check_width(actuator, gamma)?;
    theta.validate(params, actuator.len())?;
    let nd = params.max_delay;
    let mut out = BTreeSet::new();
    match theta.oldest() {
        None => {
            out.insert((gamma.clone(), ChannelConfig::empty()));
            // with no delay budget there is no remaining-time slot to occupy
            if nd > 0 {
                out.insert((actuator.clone(), ChannelConfig::empty().with_issued(gamma, nd)));
            }
        }
        Some(oldest) if oldest.remaining == 1 => {
            out.insert((oldest.decision.clone(), nx(theta).with_issued(gamma, nd)));
        }
        Some(oldest) => {
            out.insert((actuator.clone(), nx(theta).with_issued(gamma, nd)));
            out.insert((
                oldest.decision.clone(),
                nx(&theta.without_oldest()).with_issued(gamma, nd),
            ));
        }
    }
    Ok(out)
}

/// Loss-only dynamics: the possible `(actuator, counter)` pairs after the
/// supervisor issues `gamma`.
pub fn move_l(
    actuator: &DecisionVector,
    counter: LossCounter,
    gamma: &DecisionVector,
    params: &ChannelParams,
) -> Result<BTreeSet<(DecisionVector, LossCounter)>> {
    check_width(actuator, gamma)?;
    counter.validate(params)?;
    let mut out = BTreeSet::from([(gamma.clone(), LossCounter(0))]);
    if counter.0 < params.max_loss {
        out.insert((actuator.clone(), LossCounter(counter.0 + 1)));
    }
    Ok(out)
}

/// Combined delay and loss dynamics of one channel group.
///
/// The outcome set is split on three conditions: whether the channel is
/// empty, whether its oldest decision has exactly one unit left (and must be
/// delivered now), and whether the loss budget is exhausted. A lost decision
/// never enters the channel and bumps the counter; any other outcome resets
/// it. When `max_delay` is zero the channel stays empty and the issued
/// decision either reaches the actuator or is lost.
pub fn move_dl(g: &GroupState, gamma: &DecisionVector, params: &ChannelParams) -> Result<BTreeSet<GroupState>> {
    check_width(&g.actuator, gamma)?;
    g.validate(params)?;
    let nd = params.max_delay;
    let a = &g.actuator;
    let theta = &g.channel;
    let can_lose = g.counter.0 < params.max_loss;
    let lost = LossCounter(g.counter.0 + 1);
    let reset = LossCounter(0);

    let mut out = BTreeSet::new();
    match theta.oldest() {
        None => {
            if can_lose {
                out.insert(GroupState::new(a.clone(), ChannelConfig::empty(), lost));
            }
            out.insert(GroupState::settled(gamma.clone()));
            if nd > 0 {
                out.insert(GroupState::new(
                    a.clone(),
                    ChannelConfig::empty().with_issued(gamma, nd),
                    reset,
                ));
            }
        }
        Some(oldest) if oldest.remaining == 1 => {
            let delivered = &oldest.decision;
            let advanced = nx(theta);
            if can_lose {
                out.insert(GroupState::new(delivered.clone(), advanced.clone(), lost));
            }
            out.insert(GroupState::new(
                delivered.clone(),
                advanced.with_issued(gamma, nd),
                reset,
            ));
        }
        Some(oldest) => {
            let delivered = &oldest.decision;
            let held = nx(theta);
            let drained = nx(&theta.without_oldest());
            if can_lose {
                out.insert(GroupState::new(a.clone(), held.clone(), lost));
                out.insert(GroupState::new(delivered.clone(), drained.clone(), lost));
            }
            out.insert(GroupState::new(a.clone(), held.with_issued(gamma, nd), reset));
            out.insert(GroupState::new(
                delivered.clone(),
                drained.with_issued(gamma, nd),
                reset,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(bits: &[u8]) -> DecisionVector {
        DecisionVector::from_bits(bits).unwrap()
    }

    fn cfg(entries: &[(&[u8], u32)]) -> ChannelConfig {
        ChannelConfig::from_entries(entries.iter().map(|(b, n)| ChannelEntry::new(v(b), *n)))
    }

    fn gs(a: &[u8], theta: &[(&[u8], u32)], c: u32) -> GroupState {
        GroupState::new(v(a), cfg(theta), LossCounter(c))
    }

    #[test]
    fn nx_examples() {
        assert_eq!(nx(&ChannelConfig::empty()), ChannelConfig::empty());
        assert_eq!(nx(&cfg(&[(&[0], 2)])), cfg(&[(&[0], 1)]));
        assert_eq!(nx(&cfg(&[(&[0], 1), (&[1], 2)])), cfg(&[(&[1], 1)]));
    }

    #[test]
    fn move_d_examples() {
        let p = ChannelParams::new(2, 0);
        assert_eq!(
            move_d(&v(&[0]), &ChannelConfig::empty(), &v(&[0]), &p).unwrap(),
            BTreeSet::from([(v(&[0]), cfg(&[])), (v(&[0]), cfg(&[(&[0], 2)]))])
        );
        assert_eq!(
            move_d(&v(&[0]), &cfg(&[(&[0], 2)]), &v(&[1]), &p).unwrap(),
            BTreeSet::from([(v(&[0]), cfg(&[(&[1], 2)])), (v(&[0]), cfg(&[(&[0], 1), (&[1], 2)]))])
        );
        assert_eq!(
            move_d(&v(&[1]), &cfg(&[(&[0], 1)]), &v(&[1]), &p).unwrap(),
            BTreeSet::from([(v(&[0]), cfg(&[(&[1], 2)]))])
        );
    }

    #[test]
    fn move_d_rejects_invalid_channel() {
        let p = ChannelParams::new(2, 0);
        let dup = ChannelConfig::from_entries([ChannelEntry::new(v(&[0]), 1), ChannelEntry::new(v(&[1]), 1)]);
        assert!(matches!(
            move_d(&v(&[0]), &dup, &v(&[0]), &p),
            Err(Error::InvalidState(_))
        ));
        let late = cfg(&[(&[0], 3)]);
        assert!(matches!(
            move_d(&v(&[0]), &late, &v(&[0]), &p),
            Err(Error::InvalidState(_))
        ));
        assert!(move_d(&v(&[0]), &ChannelConfig::empty(), &v(&[0, 1]), &p).is_err());
    }

    #[test]
    fn move_l_examples() {
        let p = ChannelParams::new(0, 1);
        assert_eq!(
            move_l(&v(&[0]), LossCounter(0), &v(&[1]), &p).unwrap(),
            BTreeSet::from([(v(&[0]), LossCounter(1)), (v(&[1]), LossCounter(0))])
        );
        assert_eq!(
            move_l(&v(&[0]), LossCounter(1), &v(&[0]), &p).unwrap(),
            BTreeSet::from([(v(&[0]), LossCounter(0))])
        );
        let p0 = ChannelParams::ZERO;
        for a in [0, 1] {
            for g in [0, 1] {
                assert_eq!(
                    move_l(&v(&[a]), LossCounter(0), &v(&[g]), &p0).unwrap(),
                    BTreeSet::from([(v(&[g]), LossCounter(0))])
                );
            }
        }
        assert!(matches!(
            move_l(&v(&[0]), LossCounter(2), &v(&[0]), &p),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn move_dl_examples() {
        let p = ChannelParams::new(2, 1);
        assert_eq!(
            move_dl(&gs(&[0], &[], 0), &v(&[1]), &p).unwrap(),
            BTreeSet::from([gs(&[1], &[], 0), gs(&[0], &[(&[1], 2)], 0), gs(&[0], &[], 1)])
        );
        assert_eq!(
            move_dl(&gs(&[0], &[(&[1], 1)], 1), &v(&[0]), &p).unwrap(),
            BTreeSet::from([gs(&[1], &[(&[0], 2)], 0)])
        );
        let p = ChannelParams::new(2, 0);
        assert_eq!(
            move_dl(&gs(&[0], &[(&[0], 2)], 0), &v(&[1]), &p).unwrap(),
            BTreeSet::from([gs(&[0], &[(&[1], 2)], 0), gs(&[0], &[(&[0], 1), (&[1], 2)], 0)])
        );
    }

    /// Hand-expanded outcome sets for each of the six cases, N^D = 3, N^L = 2,
    /// actuator 0, issued decision 1.
    #[test]
    fn move_dl_case_table() {
        let p = ChannelParams::new(3, 2);
        let one = v(&[1]);
        let cases: Vec<(GroupState, Vec<GroupState>)> = vec![
            // empty channel, loss budget exhausted
            (gs(&[0], &[], 2), vec![gs(&[1], &[], 0), gs(&[0], &[(&[1], 3)], 0)]),
            // empty channel, may lose
            (
                gs(&[0], &[], 1),
                vec![gs(&[0], &[], 2), gs(&[1], &[], 0), gs(&[0], &[(&[1], 3)], 0)],
            ),
            // forced delivery, budget exhausted
            (
                gs(&[0], &[(&[1], 1), (&[0], 3)], 2),
                vec![gs(&[1], &[(&[0], 2), (&[1], 3)], 0)],
            ),
            // forced delivery, may lose
            (
                gs(&[0], &[(&[1], 1), (&[0], 3)], 0),
                vec![gs(&[1], &[(&[0], 2), (&[1], 3)], 0), gs(&[1], &[(&[0], 2)], 1)],
            ),
            // optional delivery, budget exhausted
            (
                gs(&[0], &[(&[1], 2), (&[0], 3)], 2),
                vec![
                    gs(&[1], &[(&[0], 2), (&[1], 3)], 0),
                    gs(&[0], &[(&[1], 1), (&[0], 2), (&[1], 3)], 0),
                ],
            ),
            // optional delivery, may lose
            (
                gs(&[0], &[(&[1], 2), (&[0], 3)], 1),
                vec![
                    gs(&[0], &[(&[1], 1), (&[0], 2)], 2),
                    gs(&[1], &[(&[0], 2)], 2),
                    gs(&[0], &[(&[1], 1), (&[0], 2), (&[1], 3)], 0),
                    gs(&[1], &[(&[0], 2), (&[1], 3)], 0),
                ],
            ),
        ];
        for (g, expected) in cases {
            let got = move_dl(&g, &one, &p).unwrap();
            let expected: BTreeSet<_> = expected.into_iter().collect();
            assert_eq!(got, expected, "from {g}");
        }
    }

    #[test]
    fn move_dl_cardinalities() {
        let p = ChannelParams::new(2, 1);
        let sizes: Vec<usize> = [
            gs(&[0], &[], 1),
            gs(&[0], &[], 0),
            gs(&[0], &[(&[0], 1)], 1),
            gs(&[0], &[(&[0], 1)], 0),
            gs(&[0], &[(&[0], 2)], 1),
            gs(&[0], &[(&[0], 2)], 0),
        ]
        .iter()
        .map(|g| move_dl(g, &v(&[0]), &p).unwrap().len())
        .collect();
        assert_eq!(sizes, vec![2, 3, 1, 2, 2, 4]);
    }

    #[test]
    fn redundant_loss_still_counts() {
        // a == γ: received and lost outcomes differ only in the counter
        let p = ChannelParams::new(0, 1);
        let out = move_dl(&gs(&[1], &[], 0), &v(&[1]), &p).unwrap();
        assert_eq!(out, BTreeSet::from([gs(&[1], &[], 0), gs(&[1], &[], 1)]));
    }

    #[test]
    fn display() {
        assert_eq!(gs(&[1, 0], &[(&[0, 1], 2)], 0).to_string(), "((1,0), {((0,1),2)}, 0)");
        assert_eq!(gs(&[0], &[], 1).to_string(), "(0, ∅, 1)");
    }

    #[test]
    fn config_count_bound() {
        // exhaustively explore channel configs for width 1 and small bounds
        for nd in 0..=3u32 {
            for nl in 0..=2u32 {
                let p = ChannelParams::new(nd, nl);
                let decisions = [v(&[0]), v(&[1])];
                let mut seen = BTreeSet::new();
                let mut stack: Vec<GroupState> = decisions.iter().map(|d| GroupState::settled(d.clone())).collect();
                while let Some(g) = stack.pop() {
                    if !seen.insert(g.clone()) {
                        continue;
                    }
                    for d in &decisions {
                        stack.extend(move_dl(&g, d, &p).unwrap());
                    }
                }
                let channels: BTreeSet<_> = seen.iter().map(|g| g.channel.clone()).collect();
                assert!(channels.len() <= 3usize.pow(nd), "nd={nd} nl={nl}: {}", channels.len());
            }
        }
    }

    fn arb_group() -> impl Strategy<Value = (GroupState, DecisionVector, ChannelParams)> {
        (1usize..=2, 0u32..=3, 0u32..=2).prop_flat_map(|(width, nd, nl)| {
            let bits = move || proptest::collection::vec(0u8..=1, width);
            let slots = proptest::collection::vec(proptest::option::of(bits()), nd as usize);
            (bits(), slots, 0..=nl, bits()).prop_map(move |(a, slots, c, g)| {
                let theta = ChannelConfig::from_entries(
                    slots
                        .into_iter()
                        .enumerate()
                        .filter_map(|(i, b)| b.map(|b| ChannelEntry::new(v(&b), i as u32 + 1))),
                );
                (
                    GroupState::new(v(&a), theta, LossCounter(c)),
                    v(&g),
                    ChannelParams::new(nd, nl),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn outcomes_are_valid((g, gamma, p) in arb_group()) {
            for o in move_dl(&g, &gamma, &p).unwrap() {
                prop_assert!(o.validate(&p).is_ok(), "{} -> {}", g, o);
            }
            for (a, th) in move_d(&g.actuator, &g.channel, &gamma, &p).unwrap() {
                prop_assert!(th.validate(&p, a.len()).is_ok());
            }
            if g.channel.is_empty() {
                for (_, c) in move_l(&g.actuator, g.counter, &gamma, &p).unwrap() {
                    prop_assert!(c.validate(&p).is_ok());
                }
            }
        }

        #[test]
        fn reduces_to_delay_only((g, gamma, p) in arb_group()) {
            let p = ChannelParams::new(p.max_delay, 0);
            let g = GroupState::new(g.actuator, g.channel, LossCounter(0));
            let lifted: BTreeSet<_> = move_d(&g.actuator, &g.channel, &gamma, &p)
                .unwrap()
                .into_iter()
                .map(|(a, th)| GroupState::new(a, th, LossCounter(0)))
                .collect();
            prop_assert_eq!(move_dl(&g, &gamma, &p).unwrap(), lifted);
        }

        #[test]
        fn reduces_to_loss_only((g, gamma, p) in arb_group()) {
            let p = ChannelParams::new(0, p.max_loss);
            let g = GroupState::new(g.actuator, ChannelConfig::empty(), g.counter);
            let lifted: BTreeSet<_> = move_l(&g.actuator, g.counter, &gamma, &p)
                .unwrap()
                .into_iter()
                .map(|(a, c)| GroupState::new(a, ChannelConfig::empty(), c))
                .collect();
            prop_assert_eq!(move_dl(&g, &gamma, &p).unwrap(), lifted);
        }

        #[test]
        fn zero_network_is_immediate((g, gamma, _p) in arb_group()) {
            let g = GroupState::settled(g.actuator);
            prop_assert_eq!(
                move_dl(&g, &gamma, &ChannelParams::ZERO).unwrap(),
                BTreeSet::from([GroupState::settled(gamma.clone())])
            );
        }

        #[test]
        fn oldest_is_delivered_when_due((g, gamma, p) in arb_group()) {
            if let Some(oldest) = g.channel.oldest().filter(|e| e.remaining == 1) {
                for o in move_dl(&g, &gamma, &p).unwrap() {
                    prop_assert_eq!(&o.actuator, &oldest.decision);
                }
            }
        }

        #[test]
        fn counter_tracks_losses((g, gamma, p) in arb_group()) {
            let nd = p.max_delay;
            for o in move_dl(&g, &gamma, &p).unwrap() {
                let entered = nd > 0 && o.channel.entries().iter().any(|e| e.remaining == nd);
                let direct = g.channel.is_empty() && o == GroupState::settled(gamma.clone());
                if o.counter.0 == 0 {
                    prop_assert!(entered || direct, "{} -> {}", g, o);
                } else {
                    prop_assert_eq!(o.counter.0, g.counter.0 + 1);
                    prop_assert!(!entered);
                }
            }
        }
    }
}
