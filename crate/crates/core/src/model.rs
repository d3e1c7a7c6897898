use std::collections::{HashSet, VecDeque};

use crate::automata::{Dfa, EventAlphabet, StateId};
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::network::ChannelPartition;
use crate::supervisor::SupervisorMap;

/// A plant, its supervisor and the control network between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    plant: Dfa,
    supervisor: SupervisorMap,
    partition: ChannelPartition,
}

impl Model {
    /// Checks that plant and supervisor share an alphabet and that the
    /// supervisor issues a decision after every string the plant can generate.
    pub fn new(plant: Dfa, supervisor: SupervisorMap, partition: ChannelPartition) -> Result<Self> {
        if plant.alphabet() != supervisor.automaton().alphabet() {
            return Err(Error::InvalidArgument(
                "plant and supervisor are over different alphabets".into(),
            ));
        }
        check_coverage(&plant, &supervisor)?;
        Ok(Self {
            plant,
            supervisor,
            partition,
        })
    }

    pub fn alphabet(&self) -> &EventAlphabet {
        self.plant.alphabet()
    }

    pub fn plant(&self) -> &Dfa {
        &self.plant
    }

    pub fn supervisor(&self) -> &SupervisorMap {
        &self.supervisor
    }

    pub fn partition(&self) -> &ChannelPartition {
        &self.partition
    }

    /// Same plant and supervisor over a different network.
    pub fn with_partition(&self, partition: ChannelPartition) -> Self {
        Self {
            plant: self.plant.clone(),
            supervisor: self.supervisor.clone(),
            partition,
        }
    }

    /// Every channel delay- and loss-free.
    pub fn zero_network(&self) -> Self {
        self.with_partition(self.partition.map_params(|_| ChannelParams::ZERO))
    }

    /// Loss bounds forced to zero.
    pub fn delay_only(&self) -> Self {
        self.with_partition(self.partition.map_params(|p| ChannelParams::new(p.max_delay, 0)))
    }

    /// Delay bounds forced to zero.
    pub fn loss_only(&self) -> Self {
        self.with_partition(self.partition.map_params(|p| ChannelParams::new(0, p.max_loss)))
    }
}

/// Walks the product of plant and supervisor and fails on the first string
/// (shortest, alphabet order) after which the supervisor has no decision.
pub fn check_coverage(plant: &Dfa, sup: &SupervisorMap) -> Result<()> {
    let sa = sup.automaton();
    let start = (plant.initial(), sa.initial());
    let mut seen: HashSet<(StateId, StateId)> = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, Vec::new())]);
    let ab = plant.alphabet();
    while let Some(((q, x), word)) = queue.pop_front() {
        if sup.outputs().get(x.0).is_none_or(Option::is_none) {
            return Err(Error::ModelCoverage(format!(
                "no decision at supervisor state `{}` reached by `{}`",
                sa.state_name(x),
                ab.format_word(&word)
            )));
        }
        for e in ab.events() {
            let Some(q2) = plant.successor(q, e) else { continue };
            let mut w = word.clone();
            w.push(e);
            let Some(x2) = sa.successor(x, e) else {
                return Err(Error::ModelCoverage(format!(
                    "supervisor undefined on plant string `{}`",
                    ab.format_word(&w)
                )));
            };
            if seen.insert((q2, x2)) {
                queue.push_back(((q2, x2), w));
            }
        }
    }
    Ok(())
}
