//! Exact closed-loop analysis for supervisory control of discrete-event
//! systems over control channels with bounded delays and bounded consecutive
//! losses.
//!
//! The pipeline is: parse a [`ModelFile`] into a validated [`Model`], explore
//! the extended state space with [`build_extended`], project it to the
//! closed-loop language with [`build_language_automaton`], and compare the
//! result against the window-based reference language with
//! [`compare_models`].

pub mod automata;
pub mod channel;
pub mod closed_loop;
mod error;
pub mod harness;
pub mod lin;
pub mod model;
pub mod model_file;
pub mod network;
pub mod supervisor;

pub use automata::{
    export_dot, language_diff, language_equivalent, language_inclusion, Dfa, EventAlphabet, EventId, Inclusion,
    StateId, Word,
};
pub use channel::{move_d, move_dl, move_l, nx, ChannelConfig, ChannelEntry, ChannelParams, GroupState, LossCounter};
pub use closed_loop::{
    build_extended, build_language_automaton, oracle_enumerate, standard_closed_loop, successors, ExtendedAutomaton,
    ExtendedState, DEFAULT_STATE_CAP,
};
pub use error::{Error, Result};
pub use lin::{build_lin, compare_models, LinComparison, Setting};
pub use model::Model;
pub use model_file::{parse_model, ModelError, ModelFile, ValidationIssue};
pub use network::{enabled_events, initial_config, overall_move, ChannelGroup, ChannelPartition, NetworkConfig};
pub use supervisor::{gamma, Decision, DecisionVector, SupervisorMap};
