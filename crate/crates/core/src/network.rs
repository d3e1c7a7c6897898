//! Composition of independent channel groups into the overall network
//! configuration.

use std::collections::BTreeSet;
use std::fmt;

use crate::automata::{EventAlphabet, EventId};
use crate::channel::{move_dl, ChannelParams, GroupState};
use crate::error::{Error, Result};
use crate::supervisor::{Decision, DecisionVector, SupervisorMap};

/// Controllable events sharing one channel, with that channel's bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelGroup {
    /// Members in alphabet order; the group's decision vectors follow this order.
    pub events: Vec<EventId>,
    pub params: ChannelParams,
}

/// Partition of the controllable events into channel groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPartition {
    groups: Vec<ChannelGroup>,
    // for each controllable position: (group index, offset within the group)
    slots: Vec<(usize, usize)>,
    // indexed by EventId
    event_slot: Vec<Option<(usize, usize)>>,
}

impl ChannelPartition {
    /// Validates that `groups` are non-empty, disjoint, contain only
    /// controllable events and together cover every controllable event.
    pub fn new(alphabet: &EventAlphabet, groups: Vec<ChannelGroup>) -> Result<Self> {
        let mut event_slot = vec![None; alphabet.len()];
        let mut groups = groups;
        for (gi, g) in groups.iter_mut().enumerate() {
            if g.events.is_empty() {
                return Err(Error::InvalidArgument(format!("channel group #{gi} is empty")));
            }
            g.events.sort();
            for &e in &g.events {
                alphabet.check(e)?;
                if !alphabet.is_controllable(e) {
                    return Err(Error::InvalidArgument(format!(
                        "event `{}` in channel group #{gi} is uncontrollable",
                        alphabet.name(e)
                    )));
                }
            }
            for (off, &e) in g.events.iter().enumerate() {
                if event_slot[e.0].is_some() {
                    return Err(Error::InvalidArgument(format!(
                        "event `{}` appears in more than one channel group",
                        alphabet.name(e)
                    )));
                }
                event_slot[e.0] = Some((gi, off));
            }
        }
        let mut slots = Vec::with_capacity(alphabet.controllable().len());
        for &e in alphabet.controllable() {
            match event_slot[e.0] {
                Some(slot) => slots.push(slot),
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "controllable event `{}` is not assigned to a channel group",
                        alphabet.name(e)
                    )))
                }
            }
        }
        Ok(Self {
            groups,
            slots,
            event_slot,
        })
    }

    /// One channel per controllable event, all with the same bounds.
    pub fn singletons(alphabet: &EventAlphabet, params: ChannelParams) -> Self {
        let groups = alphabet
            .controllable()
            .iter()
            .map(|&e| ChannelGroup {
                events: vec![e],
                params,
            })
            .collect();
        Self::new(alphabet, groups).expect("singleton groups partition Σ_c")
    }

    /// A single channel carrying every controllable decision as one package.
    pub fn single_package(alphabet: &EventAlphabet, params: ChannelParams) -> Self {
        let groups = if alphabet.controllable().is_empty() {
            Vec::new()
        } else {
            vec![ChannelGroup {
                events: alphabet.controllable().to_vec(),
                params,
            }]
        };
        Self::new(alphabet, groups).expect("one group covering Σ_c is a partition")
    }

    pub fn groups(&self) -> &[ChannelGroup] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Same groups with bounds rewritten by `f`.
    pub fn map_params(&self, mut f: impl FnMut(ChannelParams) -> ChannelParams) -> Self {
        let mut out = self.clone();
        for g in &mut out.groups {
            g.params = f(g.params);
        }
        out
    }

    /// Splits a full decision vector over `Σ_c` into per-group vectors.
    pub fn split(&self, full: &DecisionVector) -> Result<Vec<DecisionVector>> {
        if full.len() != self.slots.len() {
            return Err(Error::InvalidArgument(format!(
                "decision vector {full} has width {}, expected {}",
                full.len(),
                self.slots.len()
            )));
        }
        let mut parts: Vec<Vec<Decision>> = self
            .groups
            .iter()
            .map(|g| vec![Decision::Disable; g.events.len()])
            .collect();
        for (pos, &(gi, off)) in self.slots.iter().enumerate() {
            parts[gi][off] = full.get(pos);
        }
        Ok(parts.into_iter().map(DecisionVector::new).collect())
    }

    /// Inverse of [`Self::split`].
    pub fn merge<'a, I>(&self, parts: I) -> DecisionVector
    where
        I: IntoIterator<Item = &'a DecisionVector>,
    {
        let parts: Vec<&DecisionVector> = parts.into_iter().collect();
        self.slots.iter().map(|&(gi, off)| parts[gi].get(off)).collect()
    }

    /// Group index and offset of a controllable event.
    pub fn slot_of(&self, e: EventId) -> Option<(usize, usize)> {
        self.event_slot.get(e.0).copied().flatten()
    }
}

/// `(a, θ, c)` across all channel groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetworkConfig {
    pub groups: Vec<GroupState>,
}

impl NetworkConfig {
    /// Flattened actuator vector over `Σ_c`.
    pub fn actuators(&self, part: &ChannelPartition) -> DecisionVector {
        part.merge(self.groups.iter().map(|g| &g.actuator))
    }

    pub fn validate(&self, part: &ChannelPartition) -> Result<()> {
        if self.groups.len() != part.len() {
            return Err(Error::InvalidState(format!(
                "configuration has {} groups, partition has {}",
                self.groups.len(),
                part.len()
            )));
        }
        for (g, spec) in self.groups.iter().zip(part.groups()) {
            if g.actuator.len() != spec.events.len() {
                return Err(Error::InvalidState(format!(
                    "actuator {} has width {}, group has {} events",
                    g.actuator,
                    g.actuator.len(),
                    spec.events.len()
                )));
            }
            g.validate(&spec.params)?;
        }
        Ok(())
    }

    /// Whether `e` may occur under the current actuator configuration.
    pub fn enables(&self, e: EventId, part: &ChannelPartition) -> bool {
        match part.slot_of(e) {
            None => true,
            Some((gi, off)) => self.groups[gi].actuator.get(off).is_enabled(),
        }
    }
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.groups.as_slice() {
            [] => f.write_str("()"),
            [only] => write!(f, "{only}"),
            many => {
                f.write_str("[")?;
                for (i, g) in many.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// Actuators hold the initial decisions; channels empty; counters zero.
pub fn initial_config(sup: &SupervisorMap, part: &ChannelPartition) -> Result<NetworkConfig> {
    let a0 = sup.decision_after(&[])?;
    Ok(NetworkConfig {
        groups: part.split(&a0)?.into_iter().map(GroupState::settled).collect(),
    })
}

/// Every joint outcome of issuing `gamma` (a full vector over `Σ_c`) on all
/// channels at once. Channels evolve independently, so this is the product of
/// the per-group outcome sets.
pub fn overall_move(
    nc: &NetworkConfig,
    gamma: &DecisionVector,
    part: &ChannelPartition,
) -> Result<BTreeSet<NetworkConfig>> {
    nc.validate(part)?;
    let issued = part.split(gamma)?;
    let mut partial: Vec<Vec<GroupState>> = vec![Vec::new()];
    for ((g, spec), gi) in nc.groups.iter().zip(part.groups()).zip(&issued) {
        let outcomes = move_dl(g, gi, &spec.params)?;
        let mut next = Vec::with_capacity(partial.len() * outcomes.len());
        for prefix in &partial {
            for o in &outcomes {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        partial = next;
    }
    Ok(partial.into_iter().map(|groups| NetworkConfig { groups }).collect())
}

/// `Γ(a) ∪ Σ_uc` in alphabet order.
pub fn enabled_events(nc: &NetworkConfig, part: &ChannelPartition, alphabet: &EventAlphabet) -> Vec<EventId> {
    alphabet.events().filter(|&e| nc.enables(e, part)).collect()
}
