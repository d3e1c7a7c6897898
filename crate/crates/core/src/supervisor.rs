//! State-feedback supervisors: a supervisor automaton whose states carry an
//! enable/disable decision for every controllable event.

use std::fmt;

use crate::automata::{Dfa, EventAlphabet, EventId, StateId};
use crate::error::{Error, Result};

/// Control decision for one controllable event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decision {
    Disable,
    Enable,
}

impl Decision {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Decision::Disable),
            1 => Some(Decision::Enable),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Decision::Disable => 0,
            Decision::Enable => 1,
        }
    }

    pub fn is_enabled(self) -> bool {
        self == Decision::Enable
    }
}

/// One decision per event, in a fixed event order. Used both for full vectors
/// over `Σ_c` and for the sub-vector carried by one channel group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecisionVector(Vec<Decision>);

impl DecisionVector {
    pub fn new(bits: Vec<Decision>) -> Self {
        Self(bits)
    }

    pub fn uniform(len: usize, d: Decision) -> Self {
        Self(vec![d; len])
    }

    /// Builds a vector from `0`/`1` values; `None` if any value is out of range.
    pub fn from_bits(bits: &[u8]) -> Option<Self> {
        bits.iter()
            .map(|&b| Decision::from_bit(b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn bits(&self) -> Vec<u8> {
        self.0.iter().map(|d| d.bit()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Decision {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[Decision] {
        &self.0
    }

    /// Componentwise `self ≤ other` with `Disable < Enable`.
    pub fn le_bitwise(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl FromIterator<Decision> for DecisionVector {
    fn from_iter<I: IntoIterator<Item = Decision>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for DecisionVector {
    /// Single decisions print as a bare bit, wider vectors as `(b1,b2,...)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0[0].bit());
        }
        f.write_str("(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", d.bit())?;
        }
        f.write_str(")")
    }
}

/// Controllable events enabled by `a`, where `a` is indexed by
/// [`EventAlphabet::controllable`].
pub fn gamma(a: &DecisionVector, alphabet: &EventAlphabet) -> Vec<EventId> {
    alphabet
        .controllable()
        .iter()
        .zip(a.as_slice())
        .filter(|(_, d)| d.is_enabled())
        .map(|(&e, _)| e)
        .collect()
}

/// Moore-style supervisor realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupervisorMap {
    automaton: Dfa,
    output: Vec<Option<DecisionVector>>,
}

impl SupervisorMap {
    /// `output[x]` is the decision vector at supervisor state `x`; states that
    /// are never reached may be left undefined.
    pub fn new(automaton: Dfa, output: Vec<Option<DecisionVector>>) -> Result<Self> {
        if output.len() != automaton.num_states() {
            return Err(Error::InvalidArgument(format!(
                "supervisor has {} states but {} outputs",
                automaton.num_states(),
                output.len()
            )));
        }
        let width = automaton.alphabet().controllable().len();
        for (x, out) in output.iter().enumerate() {
            if let Some(v) = out {
                if v.len() != width {
                    return Err(Error::InvalidArgument(format!(
                        "decision at supervisor state `{}` has {} entries, expected {width}",
                        automaton.state_name(StateId(x)),
                        v.len()
                    )));
                }
            }
        }
        Ok(Self { automaton, output })
    }

    pub fn automaton(&self) -> &Dfa {
        &self.automaton
    }

    pub fn outputs(&self) -> &[Option<DecisionVector>] {
        &self.output
    }

    pub fn decision_at(&self, x: StateId) -> Result<&DecisionVector> {
        self.output.get(x.0).and_then(Option::as_ref).ok_or_else(|| {
            Error::ModelCoverage(format!(
                "no decision at supervisor state `{}`",
                self.automaton.state_names().get(x.0).map_or("?", String::as_str)
            ))
        })
    }

    /// Decision issued after `s` has been executed.
    pub fn decision_after(&self, s: &[EventId]) -> Result<DecisionVector> {
        match self.automaton.run(s)? {
            Some(x) => self.decision_at(x).cloned(),
            None => Err(Error::ModelCoverage(format!(
                "supervisor undefined on `{}`",
                self.automaton.alphabet().format_word(s)
            ))),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::automata::tests::example_plant as example_plant;

    pub(crate) fn example_supervisor() -> SupervisorMap {
        let plant = example_plant();
        let out = [[0, 0], [1, 0], [0, 1], [0, 1], [0, 0]]
            .iter()
            .map(|b| DecisionVector::from_bits(b))
            .collect();
        SupervisorMap::new(plant, out).unwrap()
    }

    fn v(bits: &[u8]) -> DecisionVector {
        DecisionVector::from_bits(bits).unwrap()
    }

    #[test]
    fn decisions_along_example_string() {
        let sup = example_supervisor();
        let (s1, s2, s3) = (EventId(0), EventId(1), EventId(2));
        assert_eq!(sup.decision_after(&[]).unwrap(), v(&[0, 0]));
        assert_eq!(sup.decision_after(&[s3]).unwrap(), v(&[1, 0]));
        assert_eq!(sup.decision_after(&[s3, s1]).unwrap(), v(&[0, 1]));
        assert_eq!(sup.decision_after(&[s3, s1, s2]).unwrap(), v(&[0, 1]));
        assert!(matches!(sup.decision_after(&[s1]), Err(Error::ModelCoverage(_))));
    }

    #[test]
    fn missing_output_is_a_coverage_error() {
        let plant = example_plant();
        let mut out = vec![Some(v(&[0, 0])); 5];
        out[1] = None;
        let sup = SupervisorMap::new(plant, out).unwrap();
        assert!(matches!(
            sup.decision_after(&[EventId(2)]),
            Err(Error::ModelCoverage(_))
        ));
    }

    #[test]
    fn width_is_checked() {
        let plant = example_plant();
        let out = vec![Some(v(&[0])); 5];
        assert!(SupervisorMap::new(plant, out).is_err());
    }

    #[test]
    fn gamma_examples() {
        let ab = example_plant().alphabet().clone();
        assert!(gamma(&v(&[0, 0]), &ab).is_empty());
        assert_eq!(gamma(&v(&[1, 0]), &ab), vec![EventId(0)]);
        assert_eq!(gamma(&v(&[1, 1]), &ab), ab.controllable().to_vec());
    }

    #[test]
    fn display() {
        assert_eq!(v(&[0, 1]).to_string(), "(0,1)");
        assert_eq!(v(&[1]).to_string(), "1");
        assert!(DecisionVector::from_bits(&[2]).is_none());
    }

    #[test]
    fn gamma_is_monotone() {
        let ab = EventAlphabet::new(&["a", "b", "c"], &["a", "b", "c"]).unwrap();
        for x in 0u8..8 {
            for y in 0u8..8 {
                let a = v(&[x & 1, (x >> 1) & 1, (x >> 2) & 1]);
                let b = v(&[y & 1, (y >> 1) & 1, (y >> 2) & 1]);
                if a.le_bitwise(&b) {
                    let ga = gamma(&a, &ab);
                    let gb = gamma(&b, &ab);
                    assert!(ga.iter().all(|e| gb.contains(e)));
                }
            }
        }
    }
}
