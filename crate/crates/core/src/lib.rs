//! Reversing Petri nets: nets whose tokens are named and persistent, whose
//! transitions create bonds between tokens, and whose executions can be undone
//! in backtracking, causal, or out-of-causal order.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`] and [`validate`]: nets, markings, histories, actions.
//! - [`connectivity`]: connected components inside a place.
//! - [`semantics`]: enabledness and firing in all directions.
//! - [`equivalence`]: concurrency, causal equivalence, component equivalence.
//! - [`explorer`]: bounded state spaces, property checks, random nets.
//! - [`interface`]: text format, JSON codec, sessions.

pub mod connectivity;
pub mod equivalence;
pub mod explorer;
pub mod interface;
pub mod model;
pub mod nets;
pub mod semantics;
pub mod validate;

pub use interface::dsl::{parse_net, print_net};
pub use model::{
    Action, ArcLabel, BaseId, Bond, Component, Direction, History, Marking, Mode, Net, PlaceId, State, Tokens, Trace,
    TransId,
};
pub use semantics::{step, SemanticsError};
pub use validate::{validate, Rule, ValidationReport};
